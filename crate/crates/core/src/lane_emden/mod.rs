//! Shooting solver for `-L u = u^p` and `-L u = e^u` on model manifolds, with
//! energy and Pohozaev monitors.
//!
//! Radially the equation reads `u'' + ((d-1) psi'/psi - f') u' = -N(u)` with
//! `u(0) = ell`, `u'(0) = 0`. The solver starts from the Taylor expansion at a
//! small radius and continues with adaptive Dormand-Prince steps.

mod dopri5;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{ric_infinity_components, ModelManifold};
use crate::radial::{
    differentiate_values, integrate_fn, CumulativeIntegral, GridResidual, RadialEval, RadialFunction,
    RadialGrid, Spacing,
};
use dopri5::{Outcome, State, Step};

/// Right-hand side `N(u)` of the equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `|u|^{p-1} u`; equal to `u^p` while `u > 0`.
    Power(f64),
    /// `e^u`.
    Exponential,
}

impl Nonlinearity {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power(p) => u.abs().powf(p - 1.0) * u,
            Nonlinearity::Exponential => u.exp(),
        }
    }

    pub fn derivative(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power(p) => p * u.abs().powf(p - 1.0),
            Nonlinearity::Exponential => u.exp(),
        }
    }

    /// Primitive `G` with `G' = N` and `G(0) = 0` (power) or `G = e^u`.
    pub fn primitive(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power(p) => u.abs().powf(p + 1.0) / (p + 1.0),
            Nonlinearity::Exponential => u.exp(),
        }
    }

    pub fn exponent(self) -> Option<f64> {
        match self {
            Nonlinearity::Power(p) => Some(p),
            Nonlinearity::Exponential => None,
        }
    }
}

/// Critical Sobolev exponent `(d+2)/(d-2)`.
pub fn critical_exponent(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    Ok((d as f64 + 2.0) / (d as f64 - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    /// `u > 0` on the whole requested interval.
    GlobalPositive,
    /// First zero of `u`.
    CrossedZeroAt(f64),
    /// Integration ended at this radius without a sign verdict.
    TruncatedAt(f64),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::GlobalPositive => f.write_str("global-positive"),
            Status::CrossedZeroAt(r) => write!(f, "crossed-zero-at({r:.16e})"),
            Status::TruncatedAt(r) => write!(f, "truncated-at({r:.16e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative local error per step; the absolute floor is `1e-6 tol`.
    pub tol: f64,
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl SolveOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h_max: None,
            max_steps: 2_000_000,
        }
    }
}

/// Overflow guard on `|u|` and `|u'|`.
pub const OVERFLOW: f64 = 1e300;

/// Radius where the Taylor start hands over to the integrator.
pub fn series_radius(grid: &RadialGrid) -> f64 {
    let nodes = grid.nodes();
    (1e-2 * (nodes[1] - nodes[0])).max(1e-4)
}

struct DenseEval {
    manifold: ModelManifold,
    nl: Nonlinearity,
    ell: f64,
    r0: f64,
    /// `u = ell + c r^2` below `r0`.
    c: f64,
    steps: Vec<Step>,
}

impl DenseEval {
    fn state(&self, r: f64) -> State {
        if r <= self.r0 || self.steps.is_empty() {
            return [self.ell + self.c * r * r, 2.0 * self.c * r];
        }
        let i = self
            .steps
            .partition_point(|s| s.x <= r)
            .saturating_sub(1)
            .min(self.steps.len() - 1);
        self.steps[i].eval(r)
    }
}

/// `(d-1) psi'/psi - f'` and its derivative.
fn drift_with_slope(m: &ModelManifold, r: f64) -> (f64, f64) {
    let d1 = m.d() as f64 - 1.0;
    let psi = m.psi();
    let (p0, p1, p2) = (psi.value_at(r), psi.at(1, r), psi.at(2, r));
    let q = p1 / p0;
    (d1 * q - m.f().at(1, r), d1 * (p2 / p0 - q * q) - m.f().at(2, r))
}

impl RadialEval for DenseEval {
    fn max_order(&self) -> usize {
        3
    }

    fn eval(&self, order: usize, r: f64) -> f64 {
        let [u, du] = self.state(r);
        if order < 2 {
            return [u, du][order];
        }
        if r == 0.0 {
            return if order == 2 { 2.0 * self.c } else { 0.0 };
        }
        let (l, dl) = drift_with_slope(&self.manifold, r);
        let ddu = -l * du - self.nl.eval(u);
        match order {
            2 => ddu,
            3 => -dl * du - l * ddu - self.nl.derivative(u) * du,
            _ => f64::NAN,
        }
    }
}

/// Derivative-shifted view of an evaluator.
struct Shifted(Arc<dyn RadialEval>);

impl RadialEval for Shifted {
    fn max_order(&self) -> usize {
        self.0.max_order() - 1
    }

    fn eval(&self, order: usize, r: f64) -> f64 {
        self.0.eval(order + 1, r)
    }
}

/// Radial solution with `u(0) = ell`, `u'(0) = 0`.
#[derive(Clone, Debug)]
pub struct SolutionProfile {
    manifold: ModelManifold,
    nonlinearity: Nonlinearity,
    ell: f64,
    u: RadialFunction,
    u_prime: RadialFunction,
    status: Status,
    r_end: f64,
    steps: usize,
}

impl SolutionProfile {
    /// Profile from an analytic `u` (derivatives to order 2 at least) sampled
    /// on `grid`, valid on `[0, r_end]`.
    pub fn from_analytic(
        manifold: ModelManifold,
        nonlinearity: Nonlinearity,
        u: Arc<dyn RadialEval>,
        grid: RadialGrid,
        status: Status,
    ) -> Result<Self> {
        if u.max_order() < 2 {
            return Err(Error::InvalidRange(
                "an analytic profile needs two derivatives".into(),
            ));
        }
        let ell = u.eval(0, 0.0);
        let r_end = match status {
            Status::CrossedZeroAt(r) | Status::TruncatedAt(r) => r,
            Status::GlobalPositive => grid.r_max(),
        };
        let u_prime = RadialFunction::from_eval(grid.clone(), Arc::new(Shifted(u.clone())));
        Ok(Self {
            manifold,
            nonlinearity,
            ell,
            u: RadialFunction::from_eval(grid, u),
            u_prime,
            status,
            r_end,
            steps: 0,
        })
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    /// Lane-Emden exponent, `None` for the exponential nonlinearity.
    pub fn p(&self) -> Option<f64> {
        self.nonlinearity.exponent()
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn u(&self) -> &RadialFunction {
        &self.u
    }

    pub fn u_prime(&self) -> &RadialFunction {
        &self.u_prime
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u.grid()
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// End of the interval where the profile is defined.
    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// Accepted integrator steps (0 for analytic profiles).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn check_range(&self, r: f64) -> Result<()> {
        if r >= 0.0 && r <= self.r_end * (1.0 + 1e-14) {
            Ok(())
        } else {
            Err(Error::OutOfRange { r, r_end: self.r_end })
        }
    }

    /// `(u, u', u'')` at `r`.
    pub fn state(&self, r: f64) -> Result<(f64, f64, f64)> {
        self.check_range(r)?;
        Ok((self.u.at(0, r), self.u.at(1, r), self.u.at(2, r)))
    }
}

fn validate_common(m: &ModelManifold, r_max: f64, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let g = m.grid();
    if g.r_min() != 0.0 {
        return Err(Error::InvalidRange(
            "the solver needs a grid from the origin".into(),
        ));
    }
    if !(r_max > series_radius(g)) || r_max > g.r_max() {
        return Err(Error::OutOfGrid {
            r: r_max,
            r_min: g.r_min(),
            r_max: g.r_max(),
        });
    }
    Ok(())
}

/// Solves `-L u = u^p`, `u(0) = ell > 0`, up to `r_max` or the first zero.
pub fn solve_radial(m: &ModelManifold, p: f64, ell: f64, r_max: f64, tol: f64) -> Result<SolutionProfile> {
    solve_radial_with(m, p, ell, r_max, &SolveOptions::new(tol))
}

pub fn solve_radial_with(
    m: &ModelManifold,
    p: f64,
    ell: f64,
    r_max: f64,
    opts: &SolveOptions,
) -> Result<SolutionProfile> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::NonpositiveEll(ell));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    validate_common(m, r_max, opts.tol)?;
    shoot(m, Nonlinearity::Power(p), ell, r_max, opts)
}

/// Solves `-L u = e^u` in dimension 2, `u(0) = ell`, up to `r_max`.
pub fn solve_liouville(m: &ModelManifold, ell: f64, r_max: f64, tol: f64) -> Result<SolutionProfile> {
    solve_liouville_with(m, ell, r_max, &SolveOptions::new(tol))
}

pub fn solve_liouville_with(
    m: &ModelManifold,
    ell: f64,
    r_max: f64,
    opts: &SolveOptions,
) -> Result<SolutionProfile> {
    if m.d() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: m.d(),
        });
    }
    if !ell.is_finite() {
        return Err(Error::InvalidRange(format!("center value {ell} is not finite")));
    }
    validate_common(m, r_max, opts.tol)?;
    shoot(m, Nonlinearity::Exponential, ell, r_max, opts)
}

fn shoot(
    m: &ModelManifold,
    nl: Nonlinearity,
    ell: f64,
    r_max: f64,
    opts: &SolveOptions,
) -> Result<SolutionProfile> {
    let d = m.d() as f64;
    let r0 = series_radius(m.grid());
    let c = -nl.eval(ell) / (2.0 * d);
    let y0 = [ell + c * r0 * r0, 2.0 * c * r0];
    let dopts = dopri5::Options {
        rtol: opts.tol,
        atol: opts.tol * 1e-6,
        h_init: 0.1 * r0,
        h_max: opts.h_max.unwrap_or(f64::INFINITY),
        max_steps: opts.max_steps,
        overflow: OVERFLOW,
    };
    let watch_sign = matches!(nl, Nonlinearity::Power(_));
    let rhs = |r: f64, y: &State| [y[1], -m.drift(r) * y[1] - nl.eval(y[0])];
    let (steps, outcome) = dopri5::integrate(rhs, r0, y0, r_max, &dopts, |s| {
        watch_sign && s.end_state()[0] <= 0.0
    });
    let (status, r_end) = match outcome {
        Outcome::Blowup(r) => return Err(Error::BlowupDetected(r)),
        Outcome::Underflow(r) => return Err(Error::StepSizeUnderflow(r)),
        Outcome::MaxSteps(r) => (Status::TruncatedAt(r), r),
        Outcome::Reached if watch_sign => (Status::GlobalPositive, r_max),
        Outcome::Reached => (Status::TruncatedAt(r_max), r_max),
        Outcome::Stopped => {
            let last = steps.last().expect("a stopped integration has a step");
            let r_star = refine_zero(last, opts.tol);
            (Status::CrossedZeroAt(r_star), r_star)
        }
    };
    let n_steps = steps.len();
    let eval: Arc<dyn RadialEval> = Arc::new(DenseEval {
        manifold: m.clone(),
        nl,
        ell,
        r0,
        c,
        steps,
    });
    let grid = match m.grid().truncated(r_end) {
        Some(g) => g,
        None => RadialGrid::new(0.0, r_end, 64, Spacing::Uniform)?,
    };
    let mut profile = SolutionProfile::from_analytic(m.clone(), nl, eval, grid, status)?;
    profile.ell = ell;
    profile.r_end = r_end;
    profile.steps = n_steps;
    Ok(profile)
}

/// Bisection on the dense output of the step containing the sign change.
fn refine_zero(step: &Step, tol: f64) -> f64 {
    let (mut a, mut b) = (step.x, step.end());
    if step.start_state()[0] <= 0.0 {
        return a;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let u = step.eval(mid)[0];
        if u.abs() <= tol && u <= 0.0 || b - a <= 4.0 * f64::EPSILON * b {
            return mid;
        }
        if u > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `E = u'^2/2 + G(u)` with `G = u^{p+1}/(p+1)` (or `e^u`).
pub fn energy(profile: &SolutionProfile, r: f64) -> Result<f64> {
    let (u, du, _) = profile.state(r)?;
    Ok(0.5 * du * du + profile.nonlinearity.primitive(u))
}

fn power_of(profile: &SolutionProfile) -> Result<f64> {
    profile
        .p()
        .ok_or_else(|| Error::InvalidBranch("the Pohozaev function needs a power nonlinearity".into()))
}

/// `P(r) = V(r) E(r) + W u u'/(p+1)` with `W = e^{-f} psi^{d-1}` and
/// `V = int_0^r W`.
pub fn pohozaev(profile: &SolutionProfile, r: f64) -> Result<f64> {
    let p = power_of(profile)?;
    let e = energy(profile, r)?;
    let (u, du, _) = profile.state(r)?;
    let m = &profile.manifold;
    Ok(m.volume_integral(r) * e + m.density(r) * u * du / (p + 1.0))
}

/// Slope factor `K` in `P' = K u'^2`:
/// `K = (1/2 + 1/(p+1)) W - (W'/W) V`.
///
/// For manifolds with an integrated weight the decomposition
/// `K = (1/2 + 1/(p+1) - (d-1)/d) W + ((d-1)/d)(W'/W) int_0^r (W/W')^2 W Q`,
/// `Q = Ric^r + 2 psi' f'/psi - f'^2/(d-1)`, is evaluated too and must agree.
pub fn pohozaev_slope_factor(m: &ModelManifold, p: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::SingularRadius(r));
    }
    let k = slope_factor_direct(m, p, r)?;
    if m.kind() != crate::geometry::ManifoldKind::Generic {
        let integral = integrate_fn(m.grid(), 0.0, r, &[], &|s| decomposition_integrand(m, s));
        let split = slope_factor_split(m, p, r, integral);
        check_split(m, p, r, k, split)?;
    }
    Ok(k)
}

fn slope_factor_direct(m: &ModelManifold, p: f64, r: f64) -> Result<f64> {
    let l = m.drift(r);
    if !(l > 0.0) {
        return Err(Error::MonotonicityViolated(r));
    }
    let c = 0.5 + 1.0 / (p + 1.0);
    Ok(c * m.density(r) - l * m.volume_integral(r))
}

/// `Ric^r + 2 psi' f'/psi - f'^2/(d-1)`; equals `-L' - L^2/(d-1)` for the
/// drift `L = W'/W`.
pub fn positivity_quantity(m: &ModelManifold, r: f64) -> Result<f64> {
    let (ric_r, _) = ric_infinity_components(m, r)?;
    let psi = m.psi();
    let f1 = m.f().at(1, r);
    Ok(ric_r + 2.0 * psi.at(1, r) * f1 / psi.value_at(r) - f1 * f1 / (m.d() as f64 - 1.0))
}

fn decomposition_integrand(m: &ModelManifold, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let l = m.drift(s);
    m.density(s) / (l * l) * positivity_quantity(m, s).unwrap_or(f64::NAN)
}

fn slope_factor_split(m: &ModelManifold, p: f64, r: f64, integral: f64) -> f64 {
    let d = m.d() as f64;
    let c = 0.5 + 1.0 / (p + 1.0);
    (c - (d - 1.0) / d) * m.density(r) + (d - 1.0) / d * m.drift(r) * integral
}

fn check_split(m: &ModelManifold, p: f64, r: f64, direct: f64, split: f64) -> Result<()> {
    let c = 0.5 + 1.0 / (p + 1.0);
    let scale = c * m.density(r) + m.drift(r) * m.volume_integral(r);
    if !((direct - split).abs() <= 1e-8 * scale + 1e-14) {
        return Err(Error::IdentityMismatch {
            what: "Pohozaev slope factor",
            a: direct,
            b: split,
        });
    }
    Ok(())
}

/// `E`, `P` and `K` on the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevTrace {
    pub r: Vec<f64>,
    pub energy: Vec<f64>,
    pub pohozaev: Vec<f64>,
    /// `None` when `(e^{-f} psi^{d-1})' > 0` fails somewhere.
    pub slope_factor: Option<Vec<f64>>,
    pub k_nonpositive: bool,
    pub p_nonpositive: bool,
    pub e_decreasing: bool,
    pub max_slope_factor: f64,
    pub max_pohozaev_ratio: f64,
}

/// Tolerance on `K <= 0`, on top of a rounding allowance for the cancelling
/// terms `c W` and `(W'/W) V`.
pub const SLOPE_FACTOR_TOL: f64 = 1e-8;

fn slope_factor_slack(m: &ModelManifold, p: f64, r: f64) -> f64 {
    let c = 0.5 + 1.0 / (p + 1.0);
    SLOPE_FACTOR_TOL + 1e-13 * (c * m.density(r) + m.drift(r).abs() * m.volume_integral(r))
}

pub fn pohozaev_trace(profile: &SolutionProfile) -> Result<PohozaevTrace> {
    let p = power_of(profile)?;
    let m = &profile.manifold;
    let r: Vec<f64> = profile.grid().nodes().to_vec();
    let split_integral = (m.kind() != crate::geometry::ManifoldKind::Generic).then(|| {
        let mm = m.clone();
        CumulativeIntegral::new(m.grid(), Arc::new(move |s| decomposition_integrand(&mm, s)))
    });
    let mut energy_v = Vec::with_capacity(r.len());
    let mut poho = Vec::with_capacity(r.len());
    let mut slope = Some(Vec::with_capacity(r.len()));
    let mut k_ok = true;
    let mut max_ratio = f64::NEG_INFINITY;
    for &x in &r {
        let (u, du, _) = profile.state(x)?;
        let e = 0.5 * du * du + profile.nonlinearity.primitive(u);
        let (a, b) = (m.volume_integral(x) * e, m.density(x) * u * du / (p + 1.0));
        energy_v.push(e);
        poho.push(a + b);
        let scale = a.abs() + b.abs();
        if scale > 0.0 {
            max_ratio = max_ratio.max((a + b) / scale);
        }
        if let Some(ks) = slope.as_mut() {
            if x == 0.0 {
                ks.push(0.0);
                continue;
            }
            match slope_factor_direct(m, p, x) {
                Ok(k) => {
                    if let Some(ci) = &split_integral {
                        check_split(m, p, x, k, slope_factor_split(m, p, x, ci.at(x)))?;
                    }
                    k_ok &= k <= slope_factor_slack(m, p, x);
                    ks.push(k);
                }
                Err(Error::MonotonicityViolated(_)) => slope = None,
                Err(e) => return Err(e),
            }
        }
    }
    let max_slope_factor = slope
        .as_deref()
        .map_or(f64::NAN, |k| k.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(PohozaevTrace {
        k_nonpositive: slope.is_some() && k_ok,
        p_nonpositive: max_ratio <= 1e-8,
        e_decreasing: energy_v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
        max_slope_factor,
        max_pohozaev_ratio: max_ratio,
        r,
        energy: energy_v,
        pohozaev: poho,
        slope_factor: slope,
    })
}

/// True iff `Ric^r + 2 psi' f'/psi - f'^2/(d-1) <= 0` at every node `r > 0`.
pub fn positivity_criterion(m: &ModelManifold) -> Result<bool> {
    for &r in m.grid().nodes().iter().filter(|&&r| r > 0.0) {
        let q = positivity_quantity(m, r)?;
        if q > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub r: Vec<f64>,
    pub holds: Vec<bool>,
    pub all_hold: bool,
    /// Largest `u / bound`.
    pub max_ratio: f64,
}

/// Pointwise `u(r) <= (C r^2 + ell^{1-p})^{-1/(p-1)}` on the profile grid.
pub fn asymptotic_bound_check(profile: &SolutionProfile, c: f64, ell: f64, p: f64) -> Result<BoundCheck> {
    if let Status::CrossedZeroAt(r) = profile.status {
        return Err(Error::NonpositiveU(r));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidRange(format!(
            "bound constant must be positive, got {c}"
        )));
    }
    let r: Vec<f64> = profile.grid().nodes().to_vec();
    let mut holds = Vec::with_capacity(r.len());
    let mut max_ratio = f64::NEG_INFINITY;
    for (&x, &u) in r.iter().zip(profile.u.values()) {
        let bound = (c * x * x + ell.powf(1.0 - p)).powf(-1.0 / (p - 1.0));
        let ratio = u / bound;
        max_ratio = max_ratio.max(ratio);
        holds.push(ratio <= 1.0 + 1e-10);
    }
    Ok(BoundCheck {
        all_hold: holds.iter().all(|&h| h),
        r,
        holds,
        max_ratio,
    })
}

/// Residual of `(W u')' = -W N(u)` with the left side differenced on the
/// grid, on interior regular nodes. Tolerance `10 h^2`, scaled by the size of
/// the terms where they exceed 1.
pub fn divergence_form_residual(profile: &SolutionProfile) -> Result<GridResidual> {
    let m = &profile.manifold;
    let grid = profile.grid();
    let nodes = grid.nodes();
    let flux: Vec<f64> = nodes
        .iter()
        .zip(profile.u_prime.values())
        .map(|(&r, &du)| m.density(r) * du)
        .collect();
    let dflux = differentiate_values(nodes, &flux, 1);
    let mut out = GridResidual {
        r: Vec::new(),
        residual: Vec::new(),
        tolerance: Vec::new(),
    };
    for i in grid.first_regular_index()..nodes.len() - 1 {
        let r = nodes[i];
        let rhs = -m.density(r) * profile.nonlinearity.eval(profile.u.values()[i]);
        let scale = dflux[i].abs().max(rhs.abs()).max(flux[i].abs() / r);
        out.r.push(r);
        out.residual.push(dflux[i] - rhs);
        out.tolerance.push(grid.tolerance(i) * scale.max(1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
