//! Dormand-Prince 5(4) with Hairer's fourth-order dense output, specialised to
//! two-component states.

pub(crate) type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub x: f64,
    pub h: f64,
    rcont: [State; 5],
}

impl Step {
    pub fn end(&self) -> f64 {
        self.x + self.h
    }

    pub fn start_state(&self) -> State {
        self.rcont[0]
    }

    pub fn end_state(&self) -> State {
        self.eval(self.end())
    }

    pub fn eval(&self, x: f64) -> State {
        let t = (x - self.x) / self.h;
        let t1 = 1.0 - t;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i]))))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub overflow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Reached,
    Stopped,
    MaxSteps(f64),
    Blowup(f64),
    Underflow(f64),
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x_end`. `stop` sees every
/// accepted step and ends the integration by returning true.
pub(crate) fn integrate<F, S>(
    rhs: F,
    x0: f64,
    y0: State,
    x_end: f64,
    opts: &Options,
    mut stop: S,
) -> (Vec<Step>, Outcome)
where
    F: Fn(f64, &State) -> State,
    S: FnMut(&Step) -> bool,
{
    let mut steps = Vec::new();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(x, &y);
    let mut h = opts.h_init.min(opts.h_max);
    while x < x_end {
        if steps.len() >= opts.max_steps {
            return (steps, Outcome::MaxSteps(x));
        }
        let last = x + h >= x_end;
        if last {
            h = x_end - x;
        }
        if h <= 16.0 * f64::EPSILON * x.abs().max(1e-300) {
            return (steps, Outcome::Underflow(x));
        }
        let k2 = rhs(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            x + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            x + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(x + h, &y1);

        let mut err = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sk) * (e / sk);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            if h <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
                return (steps, Outcome::Blowup(x));
            }
            h *= 0.2;
            continue;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        if err <= 1.0 {
            let rcont = [
                y,
                [y1[0] - y[0], y1[1] - y[1]],
                std::array::from_fn(|i| h * k1[i] - (y1[i] - y[i])),
                std::array::from_fn(|i| {
                    let diff = y1[i] - y[i];
                    let bspl = h * k1[i] - diff;
                    diff - h * k7[i] - bspl
                }),
                std::array::from_fn(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                }),
            ];
            let step = Step { x, h, rcont };
            x = if last { x_end } else { x + h };
            y = y1;
            k1 = k7;
            let halt = stop(&step);
            steps.push(step);
            if y.iter().any(|v| v.abs() > opts.overflow) {
                return (steps, Outcome::Blowup(x));
            }
            if halt {
                return (steps, Outcome::Stopped);
            }
            h = (h * factor).min(opts.h_max);
        } else {
            h *= factor.min(1.0);
        }
    }
    (steps, Outcome::Reached)
}
