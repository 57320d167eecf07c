//! The P-function of a radial solution and the identities built on it.
//!
//! A positive solution `u` of `-L u = u^p` is rewritten as `v = u^{-(p-1)/2}`
//! (and `v = e^{-u/2}` for `-L u = e^u`), which solves
//! `L v = (m |v'|^2 / 2 + c_m) / v =: P`. Everything here is evaluated on
//! radial data with the Hessian convention of [`crate::geometry`].

use crate::construction::default_grid;
use crate::error::{Error, Result};
use crate::geometry::{ric_radial, sphere_area, weighted_volume, ModelManifold, VirtualDim};
use crate::lane_emden::{critical_exponent, Nonlinearity, SolutionProfile, Status};
use crate::radial::{
    closure_eval, differentiate_values, integrate_fn, GridResidual, RadialFunction, RadialGrid,
};

/// Agreement required between the two forms of `k[v]`, relative to the size
/// of their terms.
pub const K_IDENTITY_TOL: f64 = 1e-8;
/// Relative tolerance on the integration-by-parts identity.
pub const IBP_TOL: f64 = 1e-8;

/// Derivative of `g(w(r))` with `w = a + b r^2`, given `g^{(j)}(w)` for
/// `j <= 4`, `w' = w1` and `w'' = w2`.
fn chain_quadratic(g: [f64; 5], w1: f64, w2: f64, order: usize) -> f64 {
    match order {
        0 => g[0],
        1 => g[1] * w1,
        2 => g[2] * w1 * w1 + g[1] * w2,
        3 => g[3] * w1.powi(3) + 3.0 * g[2] * w1 * w2,
        4 => g[4] * w1.powi(4) + 6.0 * g[3] * w1 * w1 * w2 + 3.0 * g[2] * w2 * w2,
        _ => f64::NAN,
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRange(format!("b must be positive, got {b}")))
    }
}

/// `u = (a + b r^2)^{-(d-2)/2}` with `d (d-2) a b = 1` on Euclidean space, on
/// the default grid.
pub fn bubble(d: usize, b: f64) -> Result<SolutionProfile> {
    bubble_on(default_grid(), d, b)
}

pub fn bubble_on(grid: RadialGrid, d: usize, b: f64) -> Result<SolutionProfile> {
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    check_b(b)?;
    let p = critical_exponent(d)?;
    let df = d as f64;
    let a = 1.0 / (df * (df - 2.0) * b);
    let k = (df - 2.0) / 2.0;
    let u = closure_eval(4, move |order, r| {
        let w = a + b * r * r;
        let mut g = [0.0; 5];
        let mut c = 1.0;
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = c * w.powf(-k - j as f64);
            c *= -k - j as f64;
        }
        chain_quadratic(g, 2.0 * b * r, 2.0 * b, order)
    });
    let m = ModelManifold::euclidean(d, grid.clone())?;
    SolutionProfile::from_analytic(m, Nonlinearity::Power(p), u, grid, Status::GlobalPositive)
}

/// `u = -2 log(a + b r^2)` with `8 a b = 1` on the Euclidean plane, on the
/// default grid.
pub fn log_bubble(b: f64) -> Result<SolutionProfile> {
    log_bubble_on(default_grid(), b)
}

pub fn log_bubble_on(grid: RadialGrid, b: f64) -> Result<SolutionProfile> {
    check_b(b)?;
    let a = 1.0 / (8.0 * b);
    let u = closure_eval(4, move |order, r| {
        let w = a + b * r * r;
        let g = [
            -2.0 * w.ln(),
            -2.0 / w,
            2.0 / (w * w),
            -4.0 / w.powi(3),
            12.0 / w.powi(4),
        ];
        chain_quadratic(g, 2.0 * b * r, 2.0 * b, order)
    });
    let m = ModelManifold::euclidean(2, grid.clone())?;
    SolutionProfile::from_analytic(m, Nonlinearity::Exponential, u, grid, Status::GlobalPositive)
}

/// Sup over nodes in `(0, r_hi]` of `|u'' + L r u' + N(u)|`, the residual of
/// the radial equation with the profile's own derivatives.
pub fn equation_residual(profile: &SolutionProfile, r_hi: f64) -> Result<f64> {
    let m = profile.manifold();
    let nl = profile.nonlinearity();
    let mut worst = 0.0_f64;
    for &r in profile.grid().nodes() {
        if r <= 0.0 || r > r_hi {
            continue;
        }
        let (u, du, ddu) = profile.state(r)?;
        worst = worst.max((ddu + m.drift(r) * du + nl.eval(u)).abs());
    }
    Ok(worst)
}

/// `v`, `P = (m v'^2/2 + c_m)/v` and the parameters of the transformed
/// equation.
#[derive(Clone, Debug)]
pub struct PFunctionData {
    manifold: ModelManifold,
    m: f64,
    n: VirtualDim,
    c_m: f64,
    v: RadialFunction,
    p: RadialFunction,
    r_end: f64,
}

impl PFunctionData {
    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n(&self) -> VirtualDim {
        self.n
    }

    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    pub fn v(&self) -> &RadialFunction {
        &self.v
    }

    /// The P-function.
    pub fn p(&self) -> &RadialFunction {
        &self.p
    }

    pub fn grid(&self) -> &RadialGrid {
        self.v.grid()
    }

    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// Same data with another virtual dimension `n >= d`.
    pub fn with_virtual_dim(mut self, n: VirtualDim) -> Result<Self> {
        if let VirtualDim::Finite(x) = n {
            if !(x >= self.manifold.d() as f64) {
                return Err(Error::InvalidN {
                    n: x,
                    d: self.manifold.d(),
                });
            }
        }
        self.n = n;
        Ok(self)
    }

    fn check_range(&self, r: f64) -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::SingularRadius(r));
        }
        if r > self.r_end * (1.0 + 1e-14) {
            return Err(Error::OutOfRange { r, r_end: self.r_end });
        }
        Ok(())
    }

    fn local(&self, r: f64) -> Result<Local> {
        self.check_range(r)?;
        let mf = &self.manifold;
        let d1 = mf.d() as f64 - 1.0;
        let (v, v1, v2) = (self.v.value_at(r), self.v.at(1, r), self.v.at(2, r));
        let q = mf.psi().at(1, r) / mf.psi().value_at(r);
        let f1 = mf.f().at(1, r);
        let delta_v = v2 + d1 * q * v1;
        Ok(Local {
            v,
            v1,
            v2,
            tangential: q * v1,
            delta_v,
            lv: delta_v - f1 * v1,
            s: f1 * v1,
            p: self.p.value_at(r),
            p1: self.p.at(1, r),
            ric_inf: ric_radial(mf, VirtualDim::Infinite, r)?,
        })
    }
}

/// Pointwise radial quantities of `v`.
struct Local {
    v: f64,
    v1: f64,
    v2: f64,
    /// Tangential Hessian eigenvalue `(psi'/psi) v'`.
    tangential: f64,
    delta_v: f64,
    lv: f64,
    /// `f' v'`.
    s: f64,
    p: f64,
    p1: f64,
    ric_inf: f64,
}

/// Transform of a solution profile into P-function data. The virtual
/// dimension defaults to `d` on unweighted manifolds and to infinity
/// otherwise.
pub fn v_transform(profile: &SolutionProfile) -> Result<PFunctionData> {
    let nl = profile.nonlinearity();
    let (m, c_m) = match nl {
        Nonlinearity::Power(p) => {
            if let Status::CrossedZeroAt(r) = profile.status() {
                return Err(Error::NonpositiveU(r));
            }
            if let Some(i) = profile.u().values().iter().position(|&u| !(u > 0.0)) {
                return Err(Error::NonpositiveU(profile.grid().nodes()[i]));
            }
            let m = 2.0 * (p + 1.0) / (p - 1.0);
            (m, 2.0 / (m - 2.0))
        }
        Nonlinearity::Exponential => (2.0, 0.5),
    };
    // g^{(j)}(u) for v = g(u).
    let g = move |u: f64| -> [f64; 4] {
        match nl {
            Nonlinearity::Power(p) => {
                let beta = (p - 1.0) / 2.0;
                let mut out = [0.0; 4];
                let mut c = 1.0;
                for (j, o) in out.iter_mut().enumerate() {
                    *o = c * u.powf(-beta - j as f64);
                    c *= -beta - j as f64;
                }
                out
            }
            Nonlinearity::Exponential => {
                let e = (-0.5 * u).exp();
                [e, -0.5 * e, 0.25 * e, -0.125 * e]
            }
        }
    };
    let u = profile.u().clone();
    let v_eval = closure_eval(3, move |order, r| {
        let (u0, u1) = (u.value_at(r), u.at(1, r));
        let g = g(u0);
        match order {
            0 => g[0],
            1 => g[1] * u1,
            2 => g[2] * u1 * u1 + g[1] * u.at(2, r),
            3 => {
                let u2 = u.at(2, r);
                g[3] * u1.powi(3) + 3.0 * g[2] * u1 * u2 + g[1] * u.at(3, r)
            }
            _ => f64::NAN,
        }
    });
    let grid = profile.grid().clone();
    let v = RadialFunction::from_eval(grid.clone(), v_eval);
    let vv = v.clone();
    let p_eval = closure_eval(2, move |order, r| {
        let (v0, v1) = (vv.value_at(r), vv.at(1, r));
        let p = (0.5 * m * v1 * v1 + c_m) / v0;
        if order == 0 {
            return p;
        }
        let v2 = vv.at(2, r);
        let p1 = v1 / v0 * (m * v2 - p);
        match order {
            1 => p1,
            2 => (v2 * v0 - v1 * v1) / (v0 * v0) * (m * v2 - p) + v1 / v0 * (m * vv.at(3, r) - p1),
            _ => f64::NAN,
        }
    });
    let p_fn = RadialFunction::from_eval(grid, p_eval);
    let manifold = profile.manifold().clone();
    let unweighted = manifold.f().values().iter().all(|&f| f == 0.0);
    let n = if unweighted {
        VirtualDim::Finite(manifold.d() as f64)
    } else {
        VirtualDim::Infinite
    };
    Ok(PFunctionData {
        manifold,
        m,
        n,
        c_m,
        v,
        p: p_fn,
        r_end: profile.r_end(),
    })
}

/// `max |P(r) - P(0)|` over the nodes.
pub fn p_variation(data: &PFunctionData) -> f64 {
    let p = data.p.values();
    p.iter().fold(0.0, |m, &x| m.max((x - p[0]).abs()))
}

/// Residual of `L v = P` at nodes `r > 0`, relative to `1 + |P|`.
pub fn transformed_equation_residual(data: &PFunctionData) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &r in data.grid().nodes().iter().filter(|&&r| r > 0.0) {
        let l = data.local(r)?;
        worst = worst.max((l.lv - l.p).abs() / (1.0 + l.p.abs()));
    }
    Ok(worst)
}

/// `k[v]` and, for finite `n`, the four nonnegative-form summands
/// `|grad^2 v - (Delta v/d) g|^2`, `(m-n)/(mn) (L v)^2`,
/// `(n-d)/(nd) (L v + n/(n-d) f' v')^2` and `Ric_{n,d} v'^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDecomposition {
    pub k: f64,
    pub terms: Option<[f64; 4]>,
}

impl KDecomposition {
    pub fn four_term_sum(&self) -> Option<f64> {
        self.terms.map(|t| t.iter().sum())
    }
}

/// Both forms of `k[v]` at `r`, without comparing them.
pub fn k_decomposition(data: &PFunctionData, r: f64) -> Result<KDecomposition> {
    let l = data.local(r)?;
    let d = data.manifold.d() as f64;
    let m = data.m;
    let hess_sq = l.v2 * l.v2 + (d - 1.0) * l.tangential * l.tangential;
    let k = hess_sq - l.lv * l.lv / m + l.ric_inf * l.v1 * l.v1;
    let terms = match data.n {
        VirtualDim::Infinite => None,
        VirtualDim::Finite(n) => {
            let mean = l.delta_v / d;
            let traceless = (l.v2 - mean).powi(2) + (d - 1.0) * (l.tangential - mean).powi(2);
            let second = (m - n) / (m * n) * l.lv * l.lv;
            let ric = ric_radial(&data.manifold, VirtualDim::Finite(n), r)?;
            if n > d {
                let third = ((n - d) * l.lv + n * l.s).powi(2) / (n * d * (n - d));
                Some([traceless, second, third, ric * l.v1 * l.v1])
            } else if l.s.abs() <= 1e-14 * (1.0 + l.lv.abs()) {
                Some([traceless, second, 0.0, ric * l.v1 * l.v1])
            } else {
                None
            }
        }
    };
    Ok(KDecomposition { k, terms })
}

/// `k[v] = |grad^2 v|^2 - (L v)^2/m + Ric_{infinity,d}(grad v, grad v)` at
/// `r`. For finite `n` the four-term form is evaluated as well and must
/// agree.
pub fn k_functional(data: &PFunctionData, r: f64) -> Result<f64> {
    let kd = k_decomposition(data, r)?;
    if let Some(t) = kd.terms {
        let sum: f64 = t.iter().sum();
        let scale = 1.0 + t.iter().map(|x| x.abs()).sum::<f64>() + kd.k.abs();
        if (sum - kd.k).abs() > K_IDENTITY_TOL * scale {
            return Err(Error::IdentityMismatch {
                what: "k[v]",
                a: kd.k,
                b: sum,
            });
        }
    }
    Ok(kd.k)
}

/// `W_f[v]` at `r` for the virtual dimension of `data`.
pub fn w_functional(data: &PFunctionData, r: f64) -> Result<f64> {
    let l = data.local(r)?;
    let d = data.manifold.d() as f64;
    let m = data.m;
    let v1sq = l.v1 * l.v1;
    match data.n {
        VirtualDim::Infinite => Ok((m - d) / (m * m) * l.lv * l.lv + 2.0 / m * l.lv * l.s + l.ric_inf * v1sq),
        VirtualDim::Finite(n) if n == d => {
            let ric = ric_radial(&data.manifold, VirtualDim::Finite(n), r)?;
            Ok((m - d) / (m * m) * l.delta_v * l.delta_v + ric * v1sq)
        }
        VirtualDim::Finite(n) => {
            if !(m > d) {
                return Err(Error::InvalidBranch(format!(
                    "W_f with d < n = {n} needs m > d, got m = {m}, d = {d}"
                )));
            }
            let ric = ric_radial(&data.manifold, VirtualDim::Finite(n), r)?;
            Ok(((m - d) / m * l.lv + l.s).powi(2) / (m - d)
                + (m - n) / ((n - d) * (m - d)) * l.s * l.s
                + ric * v1sq)
        }
    }
}

/// `X = v^{2-m} P'` at the nodes and its grid derivative.
fn flux_with_slope(data: &PFunctionData) -> (Vec<f64>, Vec<f64>) {
    let nodes = data.grid().nodes();
    let x: Vec<f64> = nodes
        .iter()
        .map(|&r| data.v.value_at(r).powf(2.0 - data.m) * data.p.at(1, r))
        .collect();
    let dx = differentiate_values(nodes, &x, 1);
    (x, dx)
}

/// Tolerance tier for grid-differenced identities.
fn identity_tolerance(grid: &RadialGrid, i: usize, scale: f64) -> f64 {
    10.0 * grid.tolerance(i) * scale.max(1.0)
}

/// Residual of `m v^{1-m} k[v] = div_f(v^{2-m} P')` on interior regular
/// nodes, with `div_f X = X' + L r X` and `X'` differenced on the grid.
/// Tolerance `100 h^2`, scaled by the size of the terms where they exceed 1.
pub fn divergence_identity_residual(data: &PFunctionData) -> Result<GridResidual> {
    let grid = data.grid().clone();
    let nodes = grid.nodes();
    let (x, dx) = flux_with_slope(data);
    let mut out = GridResidual {
        r: Vec::new(),
        residual: Vec::new(),
        tolerance: Vec::new(),
    };
    for i in grid.first_regular_index()..nodes.len() - 1 {
        let r = nodes[i];
        let k = k_decomposition(data, r)?.k;
        let lhs = data.m * data.v.values()[i].powf(1.0 - data.m) * k;
        let drift_term = data.manifold.drift(r) * x[i];
        let scale = lhs.abs() + dx[i].abs() + drift_term.abs();
        out.r.push(r);
        out.residual.push(lhs - dx[i] - drift_term);
        out.tolerance.push(identity_tolerance(&grid, i, scale));
    }
    Ok(out)
}

/// Pointwise inequality trace: `excess = lhs - rhs`, expected `<= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityTrace {
    pub r: Vec<f64>,
    pub excess: Vec<f64>,
    pub tolerance: Vec<f64>,
    /// `W_f[v]` at the same nodes.
    pub w: Vec<f64>,
}

impl InequalityTrace {
    pub fn holds(&self) -> bool {
        self.excess.iter().zip(&self.tolerance).all(|(e, t)| *e <= *t)
    }

    /// Largest `excess / tolerance`.
    pub fn max_ratio(&self) -> f64 {
        self.excess
            .iter()
            .zip(&self.tolerance)
            .fold(f64::NEG_INFINITY, |m, (e, t)| m.max(e / t))
    }

    pub fn min_w(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `(1/2) P^{-1} v^{2-m} P'^2 + m v^{1-m} W_f[v] <= div_f(v^{2-m} P')` on
/// interior regular nodes, with the divergence differenced on the grid.
pub fn fundamental_inequality(data: &PFunctionData) -> Result<InequalityTrace> {
    let grid = data.grid().clone();
    let nodes = grid.nodes();
    let (x, dx) = flux_with_slope(data);
    let mut out = InequalityTrace {
        r: Vec::new(),
        excess: Vec::new(),
        tolerance: Vec::new(),
        w: Vec::new(),
    };
    let m = data.m;
    for i in grid.first_regular_index()..nodes.len() - 1 {
        let r = nodes[i];
        let l = data.local(r)?;
        let w = w_functional(data, r)?;
        let grad = 0.5 / l.p * l.v.powf(2.0 - m) * l.p1 * l.p1;
        let lhs = grad + m * l.v.powf(1.0 - m) * w;
        let rhs = dx[i] + data.manifold.drift(r) * x[i];
        let scale = grad.abs() + lhs.abs() + dx[i].abs() + (rhs - dx[i]).abs();
        out.r.push(r);
        out.excess.push(lhs - rhs);
        out.tolerance.push(identity_tolerance(&grid, i, scale));
        out.w.push(w);
    }
    Ok(out)
}

/// Quintic smoothstep cutoff: 1 on `[0, R]`, 0 beyond `2R`, `C^2`.
pub fn radial_cutoff(radius: f64, m: &ModelManifold) -> Result<RadialFunction> {
    check_double_radius(radius, m.grid())?;
    Ok(RadialFunction::analytic(m.grid().clone(), 2, move |order, r| {
        cutoff_eval(radius, order, r)
    }))
}

fn cutoff_eval(radius: f64, order: usize, r: f64) -> f64 {
    if r <= radius {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if r >= 2.0 * radius {
        return 0.0;
    }
    let t = (r - radius) / radius;
    match order {
        0 => 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
        1 => -30.0 * t * t * (1.0 - t) * (1.0 - t) / radius,
        2 => -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (radius * radius),
        _ => f64::NAN,
    }
}

fn check_double_radius(radius: f64, grid: &RadialGrid) -> Result<()> {
    if !(radius > 0.0) || 2.0 * radius > grid.r_max() {
        return Err(Error::OutOfGrid {
            r: 2.0 * radius,
            r_min: grid.r_min(),
            r_max: grid.r_max(),
        });
    }
    Ok(())
}

/// Scale-free constants of a cutoff: `R max|phi'|`, `R^2 max phi'^2/phi` and
/// `R^2 max(-L phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffConstants {
    pub gradient: f64,
    pub gradient_squared: f64,
    pub laplacian: f64,
}

/// Cutoff constants sampled on the transition annulus.
pub fn cutoff_constants(m: &ModelManifold, radius: f64) -> Result<CutoffConstants> {
    let phi = radial_cutoff(radius, m)?;
    let samples = 2000;
    let mut c = CutoffConstants {
        gradient: 0.0,
        gradient_squared: 0.0,
        laplacian: 0.0,
    };
    for j in 1..samples {
        let r = radius * (1.0 + j as f64 / samples as f64);
        let (p0, p1, p2) = (phi.value_at(r), phi.at(1, r), phi.at(2, r));
        c.gradient = c.gradient.max(p1.abs() * radius);
        if p0 > 0.0 {
            c.gradient_squared = c.gradient_squared.max(p1 * p1 / p0 * radius * radius);
        }
        c.laplacian = c.laplacian.max(-(p2 + m.drift(r) * p1) * radius * radius);
    }
    Ok(c)
}

/// Which bound of the integral estimates to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatePart {
    /// `int_{B_R} e^{-f} v^{-q} (|v'|^2 + 1)`, `2 <= q < m/2 + 1`.
    Gradient,
    /// `int_{B_R} e^{-f} v^{-q}`, `0 <= q <= m/2 + 1`.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRatio {
    pub lhs: f64,
    /// `mu(B_{2R}) R^{-q}`.
    pub bound_factor: f64,
}

impl EstimateRatio {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.bound_factor
    }
}

fn check_q(data: &PFunctionData, part: EstimatePart, q: f64) -> Result<()> {
    let max = data.m / 2.0 + 1.0;
    let ok = match part {
        EstimatePart::Gradient => q >= 2.0 && q < max,
        EstimatePart::Plain => q >= 0.0 && q <= max,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::QOutOfRange { q, max })
    }
}

fn check_data_radius(data: &PFunctionData, radius: f64) -> Result<()> {
    check_double_radius(radius, data.grid())?;
    if 2.0 * radius > data.r_end * (1.0 + 1e-14) {
        return Err(Error::OutOfRange {
            r: 2.0 * radius,
            r_end: data.r_end,
        });
    }
    Ok(())
}

/// Left side of the integral estimate over `B_R` against `mu(B_{2R}) R^{-q}`.
pub fn integral_estimate_ratio(
    data: &PFunctionData,
    part: EstimatePart,
    q: f64,
    radius: f64,
) -> Result<EstimateRatio> {
    check_q(data, part, q)?;
    check_data_radius(data, radius)?;
    let mf = &data.manifold;
    let integral = integrate_fn(data.grid(), 0.0, radius, &[], &|r| {
        let v = data.v.value_at(r);
        let extra = match part {
            EstimatePart::Gradient => data.v.at(1, r).powi(2) + 1.0,
            EstimatePart::Plain => 1.0,
        };
        mf.density(r) * v.powf(-q) * extra
    });
    Ok(EstimateRatio {
        lhs: sphere_area(mf.d()) * integral,
        bound_factor: weighted_volume(mf, 2.0 * radius)? * radius.powf(-q),
    })
}

/// The identity obtained by testing `L v = P` against `e^{-f} v^{1-q} phi_R^2`:
/// `(m/2 + 1 - q) int W v^{-q} v'^2 phi^2 + c_m int W v^{-q} phi^2`
/// against `-int W v^{1-q} v' (phi^2)'`, `W = e^{-f} psi^{d-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` relative to the sum of the absolute terms.
    pub relative: f64,
}

impl IbpResidual {
    pub fn passes(&self) -> bool {
        self.relative <= IBP_TOL
    }
}

pub fn ibp_residual(data: &PFunctionData, q: f64, radius: f64) -> Result<IbpResidual> {
    check_data_radius(data, radius)?;
    let mf = &data.manifold;
    let grid = data.grid();
    let upper = 2.0 * radius;
    let breaks = [radius];
    let term = |g: &dyn Fn(f64, f64, f64, f64, f64) -> f64| {
        integrate_fn(grid, 0.0, upper, &breaks, &|r| {
            let (v, v1) = (data.v.value_at(r), data.v.at(1, r));
            let (phi, dphi) = (cutoff_eval(radius, 0, r), cutoff_eval(radius, 1, r));
            mf.density(r) * g(v, v1, phi, dphi, v.powf(-q))
        })
    };
    let a = (data.m / 2.0 + 1.0 - q) * term(&|_, v1, phi, _, vq| vq * v1 * v1 * phi * phi);
    let b = data.c_m * term(&|_, _, phi, _, vq| vq * phi * phi);
    let c = -term(&|v, v1, phi, dphi, vq| vq * v * v1 * 2.0 * phi * dphi);
    let scale = a.abs() + b.abs() + c.abs();
    Ok(IbpResidual {
        lhs: a + b,
        rhs: c,
        relative: if scale > 0.0 {
            (a + b - c).abs() / scale
        } else {
            0.0
        },
    })
}

/// `sup_{r <= R} (u'/u)^2 / (R^{-2} + sup_{r <= 2R} u^{4/(n-2)})`.
pub fn cheng_yau_ratio(profile: &SolutionProfile, n: f64, radius: f64) -> Result<f64> {
    if !(n > 2.0) {
        return Err(Error::InvalidN {
            n,
            d: profile.manifold().d(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::SingularRadius(radius));
    }
    profile.check_range(2.0 * radius)?;
    let exponent = 4.0 / (n - 2.0);
    let mut numerator = 0.0_f64;
    let mut sup_u = 0.0_f64;
    let radii = profile
        .grid()
        .nodes()
        .iter()
        .copied()
        .filter(|&r| r <= 2.0 * radius)
        .chain([radius, 2.0 * radius]);
    for r in radii {
        let (u, du, _) = profile.state(r)?;
        if !(u > 0.0) {
            return Err(Error::NonpositiveU(r));
        }
        if r <= radius {
            numerator = numerator.max((du / u).powi(2));
        }
        sup_u = sup_u.max(u.powf(exponent));
    }
    Ok(numerator / (radius.powi(-2) + sup_u))
}

/// Outcome of the comparison `u(r) >= A r^{2-kappa}` for `r >= R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorCheck {
    /// `A = R^{kappa-2} u(R)`.
    pub a: f64,
    pub r: Vec<f64>,
    /// `u(r) r^{kappa-2} / A`.
    pub ratio: Vec<f64>,
    pub holds: bool,
}

impl FloorCheck {
    pub fn min_ratio(&self) -> f64 {
        self.ratio.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Checks `L u <= 0` at the profile nodes and then the floor
/// `u >= A r^{2-kappa}` beyond `R`.
pub fn superharmonic_floor_check(profile: &SolutionProfile, kappa: f64, radius: f64) -> Result<FloorCheck> {
    if !(kappa > 2.0) {
        return Err(Error::InvalidRange(format!("kappa must exceed 2, got {kappa}")));
    }
    if !(radius > 0.0) {
        return Err(Error::SingularRadius(radius));
    }
    profile.check_range(radius)?;
    let m = profile.manifold();
    let r_end = profile.r_end();
    for &r in profile.grid().nodes().iter().filter(|&&r| r > 0.0 && r <= r_end) {
        let (_, du, ddu) = profile.state(r)?;
        let drift = m.drift(r) * du;
        let lu = ddu + drift;
        if lu > 1e-8 * (1.0 + ddu.abs() + drift.abs()) {
            return Err(Error::SuperharmonicityViolated { r, value: lu });
        }
    }
    let u_r = profile.state(radius)?.0;
    if !(u_r > 0.0) {
        return Err(Error::NonpositiveU(radius));
    }
    let a = radius.powf(kappa - 2.0) * u_r;
    let mut out = FloorCheck {
        a,
        r: Vec::new(),
        ratio: Vec::new(),
        holds: true,
    };
    for &r in profile
        .grid()
        .nodes()
        .iter()
        .filter(|&&r| r >= radius && r <= r_end)
    {
        let ratio = profile.u().value_at(r) * r.powf(kappa - 2.0) / a;
        out.holds &= ratio >= 1.0 - 1e-12;
        out.r.push(r);
        out.ratio.push(ratio);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_example, DEFAULT_TOL};
    use crate::lane_emden::solve_radial;
    use crate::radial::{make_grid, Spacing};
    use approx::assert_relative_eq;

    fn grid(r_max: f64) -> RadialGrid {
        make_grid(0.0, r_max, 1024, Spacing::Geometric).unwrap()
    }

    #[test]
    fn bubble_parameters() {
        let b = bubble_on(grid(50.0), 4, 0.125).unwrap();
        assert_relative_eq!(b.ell(), 1.0);
        assert_eq!(b.p(), Some(3.0));
        let r = 3.0;
        assert_relative_eq!(b.u().value_at(r), 1.0 / (1.0 + r * r / 8.0), epsilon = 1e-15);
        let b3 = bubble_on(grid(50.0), 3, 1.0).unwrap();
        assert_relative_eq!(b3.ell(), 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(bubble(2, 1.0).unwrap_err(), Error::InvalidDimension(2));
        assert!(bubble(3, 0.0).is_err());
    }

    #[test]
    fn bubble_derivatives_match_differences() {
        let b = bubble_on(grid(50.0), 5, 0.3).unwrap();
        let e = b.u().evaluator().unwrap().clone();
        let h = 1e-4;
        for &r in &[0.3, 1.0, 2.5, 9.0] {
            for order in 1..=4 {
                let fd = (e.eval(order - 1, r + h) - e.eval(order - 1, r - h)) / (2.0 * h);
                assert_relative_eq!(e.eval(order, r), fd, epsilon = 1e-7, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn bubbles_solve_their_equations() {
        for d in 3..=6 {
            let b = bubble_on(grid(50.0), d, 0.125).unwrap();
            assert!(equation_residual(&b, 50.0).unwrap() < 1e-10, "d = {d}");
        }
        let lb = log_bubble_on(grid(50.0), 0.125).unwrap();
        assert_relative_eq!(lb.ell(), 0.0);
        assert!(equation_residual(&lb, 50.0).unwrap() < 1e-10);
    }

    #[test]
    fn v_transform_of_bubbles() {
        let data = v_transform(&bubble_on(grid(50.0), 4, 0.125).unwrap()).unwrap();
        assert_eq!((data.m(), data.c_m()), (4.0, 1.0));
        assert_eq!(data.n(), VirtualDim::Finite(4.0));
        for &r in &[0.0, 0.5, 7.0, 40.0] {
            assert_relative_eq!(data.v().value_at(r), 1.0 + r * r / 8.0, max_relative = 1e-14);
            assert_relative_eq!(data.p().value_at(r), 1.0, epsilon = 1e-13);
        }
        assert!(p_variation(&data) < 1e-12);
        assert!(transformed_equation_residual(&data).unwrap() < 1e-12);

        let log = v_transform(&log_bubble_on(grid(50.0), 0.125).unwrap()).unwrap();
        assert_eq!((log.m(), log.c_m()), (2.0, 0.5));
        assert_relative_eq!(log.v().value_at(4.0), 3.0, epsilon = 1e-14);
        assert!(log.p().values().iter().all(|p| (p - 0.5).abs() < 1e-13));
    }

    #[test]
    fn p_at_origin_is_laplacian_of_quadratic() {
        for d in 3..=6 {
            let b = 0.2;
            let data = v_transform(&bubble_on(grid(20.0), d, b).unwrap()).unwrap();
            assert_relative_eq!(data.p().values()[0], 2.0 * b * d as f64, max_relative = 1e-13);
            assert_eq!(data.m(), d as f64);
        }
    }

    #[test]
    fn k_vanishes_on_bubbles() {
        for d in 3..=6 {
            let data = v_transform(&bubble_on(grid(50.0), d, 0.125).unwrap()).unwrap();
            for &r in data.grid().nodes().iter().filter(|&&r| r > 0.0 && r <= 50.0) {
                let kd = k_decomposition(&data, r).unwrap();
                assert!(kd.k.abs() < 1e-10, "d = {d}, r = {r}, k = {}", kd.k);
                let t = kd.terms.unwrap();
                assert!(t.iter().all(|x| x.abs() < 1e-10));
                assert!(w_functional(&data, r).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn k_nonnegative_for_subcritical_transform() {
        // Exponent below critical: m > d, flat data.
        let mf = ModelManifold::euclidean(3, grid(20.0)).unwrap();
        let prof = solve_radial(&mf, 3.0, 1.0, 2.0, 1e-11).unwrap();
        let data = v_transform(&prof).unwrap();
        assert_eq!(data.m(), 4.0);
        for &r in data.grid().nodes().iter().filter(|&&r| r > 0.0) {
            assert!(k_functional(&data, r).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn finite_branch_requires_m_above_d() {
        let data = v_transform(&bubble_on(grid(20.0), 4, 0.125).unwrap())
            .unwrap()
            .with_virtual_dim(VirtualDim::Finite(5.0))
            .unwrap();
        assert!(matches!(w_functional(&data, 1.0), Err(Error::InvalidBranch(_))));
        let bad = v_transform(&bubble_on(grid(20.0), 4, 0.125).unwrap())
            .unwrap()
            .with_virtual_dim(VirtualDim::Finite(3.0));
        assert!(matches!(bad, Err(Error::InvalidN { .. })));
        assert_eq!(k_functional(&data, 0.0).unwrap_err(), Error::SingularRadius(0.0));
    }

    #[test]
    fn divergence_identity_on_bubbles() {
        let data = v_transform(&bubble_on(grid(50.0), 4, 0.125).unwrap()).unwrap();
        let res = divergence_identity_residual(&data).unwrap();
        assert!(res.passes());
        assert!(res.max_abs() < 1e-10);
        let log = v_transform(&log_bubble_on(grid(50.0), 0.125).unwrap()).unwrap();
        assert!(divergence_identity_residual(&log).unwrap().passes());
        assert!(fundamental_inequality(&data).unwrap().holds());
    }

    #[test]
    fn identities_on_subcritical_solution() {
        // P is not constant here, so both sides of the identities are nontrivial.
        let mf = ModelManifold::euclidean(3, grid(20.0)).unwrap();
        let prof = solve_radial(&mf, 3.0, 1.0, 2.0, 1e-12).unwrap();
        let data = v_transform(&prof).unwrap();
        assert!(p_variation(&data) > 1e-3);
        let res = divergence_identity_residual(&data).unwrap();
        assert!(res.passes(), "ratio {}", res.max_ratio());
        let ineq = fundamental_inequality(&data).unwrap();
        assert!(ineq.holds(), "ratio {}", ineq.max_ratio());
        for q in [0.0, 1.5, 3.0] {
            let ibp = ibp_residual(&data, q, 0.8).unwrap();
            assert!(ibp.passes(), "q = {q}: {}", ibp.relative);
        }
    }

    #[test]
    fn ibp_identity_on_bubbles() {
        let data = v_transform(&bubble_on(grid(400.0), 4, 0.125).unwrap()).unwrap();
        for q in [0.0, 2.0, 3.0] {
            for radius in [1.0, 10.0, 100.0] {
                let ibp = ibp_residual(&data, q, radius).unwrap();
                assert!(ibp.passes(), "q = {q}, R = {radius}: {}", ibp.relative);
            }
        }
    }

    #[test]
    fn integral_estimates() {
        let data = v_transform(&bubble_on(grid(400.0), 4, 0.125).unwrap()).unwrap();
        let plain0 = integral_estimate_ratio(&data, EstimatePart::Plain, 0.0, 3.0).unwrap();
        assert_relative_eq!(
            plain0.lhs,
            weighted_volume(data.manifold(), 3.0).unwrap(),
            max_relative = 1e-12
        );
        assert!(plain0.ratio() <= 1.0);
        assert!(matches!(
            integral_estimate_ratio(&data, EstimatePart::Gradient, 3.0, 1.0),
            Err(Error::QOutOfRange { .. })
        ));
        assert!(matches!(
            integral_estimate_ratio(&data, EstimatePart::Plain, 3.5, 1.0),
            Err(Error::QOutOfRange { .. })
        ));
        assert!(integral_estimate_ratio(&data, EstimatePart::Plain, 1.0, 300.0).is_err());
        for (part, q) in [(EstimatePart::Gradient, 2.0), (EstimatePart::Plain, 3.0)] {
            let at = |r| integral_estimate_ratio(&data, part, q, r).unwrap().ratio();
            let base = at(1.0);
            for r in [2.0, 5.0, 10.0, 50.0, 100.0] {
                assert!(at(r) <= 10.0 * base);
            }
        }
    }

    #[test]
    fn cutoff_shape_and_scaling() {
        let mf = ModelManifold::euclidean(3, grid(100.0)).unwrap();
        let phi = radial_cutoff(2.0, &mf).unwrap();
        assert_eq!(phi.value_at(0.0), 1.0);
        assert_eq!(phi.value_at(4.0), 0.0);
        assert_relative_eq!(phi.value_at(3.0), 0.5, epsilon = 1e-15);
        assert!(phi.analytic_consistency(1).unwrap().unwrap() < 1.0);
        let consts: Vec<_> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&r| cutoff_constants(&mf, r).unwrap())
            .collect();
        for c in &consts {
            assert_relative_eq!(c.gradient, 1.875, max_relative = 1e-6);
            assert_relative_eq!(
                c.gradient_squared,
                consts[0].gradient_squared,
                max_relative = 1e-9
            );
            assert_relative_eq!(c.laplacian, consts[0].laplacian, max_relative = 1e-9);
        }
        assert!(radial_cutoff(60.0, &mf).is_err());
    }

    #[test]
    fn cheng_yau_on_bubble() {
        let b = bubble_on(grid(400.0), 4, 0.125).unwrap();
        let r = 2.0;
        // (u'/u)^2 = (r/4)^2/(1 + r^2/8)^2 peaks at r = sqrt(8).
        let num = (r / 4.0_f64).powi(2) / (1.0 + r * r / 8.0).powi(2);
        assert_relative_eq!(
            cheng_yau_ratio(&b, 4.0, r).unwrap(),
            num / (0.25 + 1.0),
            max_relative = 1e-12
        );
        assert!(cheng_yau_ratio(&b, 4.0, 1e-3).unwrap() < 1e-9);
        let sup = [1.0, 3.0, 10.0, 30.0, 100.0]
            .iter()
            .map(|&r| cheng_yau_ratio(&b, 4.0, r).unwrap())
            .fold(0.0, f64::max);
        assert!(sup < 0.5);
    }

    #[test]
    fn superharmonic_floor_on_bubbles() {
        for d in [3usize, 4] {
            let b = bubble_on(grid(400.0), d, 0.125).unwrap();
            let chk = superharmonic_floor_check(&b, d as f64, 1.0).unwrap();
            assert!(chk.holds);
            assert_relative_eq!(chk.min_ratio(), 1.0, max_relative = 1e-12);
        }
        let b = bubble_on(grid(400.0), 3, 0.125).unwrap();
        assert!(superharmonic_floor_check(&b, 2.0, 1.0).is_err());
    }

    #[test]
    fn floor_rejects_subharmonic_profile() {
        // -L u = -u^3 makes u L-subharmonic.
        let mf = ModelManifold::euclidean(3, grid(20.0)).unwrap();
        let u = closure_eval(3, |k, r| match k {
            0 => 1.0 + r * r,
            1 => 2.0 * r,
            2 => 2.0,
            _ => 0.0,
        });
        let prof = SolutionProfile::from_analytic(
            mf,
            Nonlinearity::Power(3.0),
            u,
            grid(20.0),
            Status::GlobalPositive,
        )
        .unwrap();
        assert!(matches!(
            superharmonic_floor_check(&prof, 3.0, 1.0),
            Err(Error::SuperharmonicityViolated { .. })
        ));
    }

    #[test]
    fn nonpositive_profiles_are_rejected() {
        let mf = ModelManifold::new(
            3,
            crate::geometry::euclidean_warping(grid(20.0)),
            crate::geometry::gaussian_weight(grid(20.0), 1.0),
        )
        .unwrap();
        let prof = solve_radial(&mf, 3.0, 1.0, 20.0, 1e-9).unwrap();
        assert!(matches!(prof.status(), Status::CrossedZeroAt(_)));
        assert!(matches!(v_transform(&prof), Err(Error::NonpositiveU(_))));
    }

    #[test]
    fn identities_on_constructed_solution() {
        let mf = build_example(3, 0.5, 0.0).unwrap();
        let prof = solve_radial(&mf, 5.0, 1.0, 1e3, DEFAULT_TOL).unwrap();
        let data = v_transform(&prof).unwrap();
        assert_eq!(data.n(), VirtualDim::Infinite);
        assert_eq!(data.m(), 3.0);
        assert!(transformed_equation_residual(&data).unwrap() < 1e-8);
        let res = divergence_identity_residual(&data).unwrap();
        assert!(res.passes(), "ratio {} at {:?}", res.max_ratio(), res.worst_r());
        let ineq = fundamental_inequality(&data).unwrap();
        assert!(ineq.holds(), "ratio {}", ineq.max_ratio());
        // f' < 0 and v' > 0 make f' v' negative, so W_f dips below zero.
        assert!(ineq.min_w() < 0.0);
        let cy: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&r| cheng_yau_ratio(&prof, 3.0, r).unwrap())
            .collect();
        assert!(cy.iter().all(|c| c.is_finite() && *c < 10.0 * cy[0].max(0.1)));
        for q in [0.0, 2.0, 2.5] {
            assert!(ibp_residual(&data, q, 10.0).unwrap().passes());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn bubble_p_is_constant(d in 3usize..8, b in 0.01f64..5.0) {
                let data = v_transform(&bubble_on(grid(50.0), d, b).unwrap()).unwrap();
                prop_assert!(p_variation(&data) <= 1e-8 * (1.0 + 2.0 * b * d as f64));
                prop_assert!((data.p().values()[0] - 2.0 * b * d as f64).abs() <= 1e-10 * b * d as f64);
            }

            #[test]
            fn p_matches_its_formula_and_is_positive(p in 1.5f64..4.0, ell in 0.2f64..3.0) {
                let mf = ModelManifold::euclidean(3, grid(20.0)).unwrap();
                let prof = solve_radial(&mf, p, ell, 1.0, 1e-10).unwrap();
                let data = v_transform(&prof).unwrap();
                let (m, c) = (data.m(), data.c_m());
                prop_assert!((c - 2.0 / (m - 2.0)).abs() < 1e-14);
                for (i, &r) in data.grid().nodes().iter().enumerate() {
                    let (v, v1) = (data.v().values()[i], data.v().at(1, r));
                    let pv = data.p().values()[i];
                    prop_assert!(v > 0.0 && pv > 0.0);
                    prop_assert!((pv - (0.5 * m * v1 * v1 + c) / v).abs() <= 1e-12 * pv);
                }
            }

            #[test]
            fn four_term_form_agrees(n_extra in 0.0f64..5.0, r in 0.05f64..10.0) {
                let mf = ModelManifold::new(
                    3,
                    crate::geometry::euclidean_warping(grid(20.0)),
                    crate::geometry::gaussian_weight(grid(20.0), 0.1),
                ).unwrap();
                let prof = solve_radial(&mf, 2.0, 1.0, 1.0, 1e-10).unwrap();
                let data = v_transform(&prof).unwrap()
                    .with_virtual_dim(VirtualDim::Finite(3.0 + 1e-3 + n_extra)).unwrap();
                prop_assert!(k_functional(&data, r.min(data.r_end())).is_ok());
            }
        }
    }
}
