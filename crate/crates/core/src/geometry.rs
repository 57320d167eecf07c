//! Weighted model manifolds `(R^d, dr^2 + psi(r)^2 dtheta^2, e^{-f} dvol)`.
//!
//! Curvature, drift Laplacian, weighted volume and comparison quantities are
//! evaluated pointwise from the radial data. Radial Hessian convention: a
//! radial `w` has Hessian eigenvalues `w''` (once) and `(psi'/psi) w'`
//! (`d - 1` times).

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{
    differentiate_values, integrate_fn, CumulativeIntegral, GridResidual, RadialFunction, RadialGrid,
};

/// Virtual dimension of the Bakry-Emery tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VirtualDim {
    Finite(f64),
    Infinite,
}

/// How a manifold's weight was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldKind {
    Generic,
    /// Weight integrated from the warping function.
    FromWarping,
    /// Explicit warping `alpha r + (1 - alpha) r / sqrt(r^2 + 1)` with its
    /// integrated weight.
    Constructed {
        alpha: f64,
    },
}

#[derive(Clone, Debug)]
pub struct ModelManifold {
    d: usize,
    psi: RadialFunction,
    f: RadialFunction,
    f0: f64,
    kind: ManifoldKind,
    /// `int e^{-f} psi^{d-1}` from the first node.
    volume: CumulativeIntegral,
    /// `int psi'^2` from the origin, kept for integrated weights.
    warping_energy: Option<CumulativeIntegral>,
}

/// Area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    // Gamma(d/2) by recursion from Gamma(1) or Gamma(1/2).
    let (mut x, mut gamma) = if d.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (0.5, PI.sqrt())
    };
    let half = d as f64 / 2.0;
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

fn warping_tolerance(psi: &RadialFunction) -> f64 {
    if psi.analytic_order().is_some_and(|k| k >= 1) {
        1e-10
    } else {
        psi.grid().tolerance(0).max(1e-10)
    }
}

fn validate_warping(psi: &RadialFunction) -> Result<()> {
    let grid = psi.grid();
    let tol = warping_tolerance(psi);
    if grid.r_min() == 0.0 {
        let v0 = psi.values()[0];
        if v0.abs() > tol {
            return Err(Error::InvalidWarping(format!("psi(0) = {v0}, expected 0")));
        }
        let d0 = psi.at(1, 0.0);
        if (d0 - 1.0).abs() > tol {
            return Err(Error::InvalidWarping(format!("psi'(0) = {d0}, expected 1")));
        }
    }
    let d1 = psi.derivative_values(1)?;
    for (&r, &v) in grid.nodes().iter().zip(&d1) {
        if r > 0.0 && !(v > 0.0) {
            return Err(Error::InvalidWarping(format!("psi'({r}) = {v} is not positive")));
        }
    }
    for (&r, &v) in grid.nodes().iter().zip(psi.values()) {
        if r > 0.0 && !(v > 0.0) {
            return Err(Error::InvalidWarping(format!("psi({r}) = {v} is not positive")));
        }
    }
    Ok(())
}

impl ModelManifold {
    pub fn new(d: usize, psi: RadialFunction, f: RadialFunction) -> Result<Self> {
        Self::assemble(d, psi, f, ManifoldKind::Generic, None)
    }

    /// Flat space with trivial weight.
    pub fn euclidean(d: usize, grid: RadialGrid) -> Result<Self> {
        Self::new(d, euclidean_warping(grid.clone()), zero_weight(grid))
    }

    /// Warping `psi` with the weight integrated by [`weight_from_warping`].
    pub fn from_warping(d: usize, psi: RadialFunction, f0: f64) -> Result<Self> {
        let f = weight_from_warping(&psi, d, f0)?;
        let p = psi.clone();
        let energy = CumulativeIntegral::new(
            psi.grid(),
            Arc::new(move |s| {
                let v = p.at(1, s);
                v * v
            }),
        );
        Self::assemble(d, psi, f, ManifoldKind::FromWarping, Some(energy))
    }

    pub(crate) fn with_kind(mut self, kind: ManifoldKind) -> Self {
        self.kind = kind;
        self
    }

    fn assemble(
        d: usize,
        psi: RadialFunction,
        f: RadialFunction,
        kind: ManifoldKind,
        warping_energy: Option<CumulativeIntegral>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if psi.grid().nodes() != f.grid().nodes() {
            return Err(Error::InvalidRange(
                "warping and weight must share one grid".into(),
            ));
        }
        validate_warping(&psi)?;
        let grid = psi.grid().clone();
        if grid.r_min() == 0.0 {
            let d0 = f.at(1, 0.0);
            if d0.abs() > warping_tolerance(&f) {
                return Err(Error::InvalidWeight(format!(
                    "f'(0) = {d0}; a smooth radial weight needs f'(0) = 0"
                )));
            }
        }
        let f0 = f.value_at(grid.r_min());
        let (p, w) = (psi.clone(), f.clone());
        let volume = CumulativeIntegral::new(
            &grid,
            Arc::new(move |s| (-w.value_at(s)).exp() * p.value_at(s).powi(d as i32 - 1)),
        );
        Ok(Self {
            d,
            psi,
            f,
            f0,
            kind,
            volume,
            warping_energy,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn psi(&self) -> &RadialFunction {
        &self.psi
    }

    pub fn f(&self) -> &RadialFunction {
        &self.f
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn grid(&self) -> &RadialGrid {
        self.psi.grid()
    }

    /// Radial density `W = e^{-f} psi^{d-1}` of the weighted measure.
    pub fn density(&self, r: f64) -> f64 {
        (-self.f.value_at(r)).exp() * self.psi.value_at(r).powi(self.d as i32 - 1)
    }

    /// `W'/W = (d-1) psi'/psi - f'`, which is also `L r`. Requires `r > 0`.
    pub fn drift(&self, r: f64) -> f64 {
        (self.d as f64 - 1.0) * self.psi.at(1, r) / self.psi.value_at(r) - self.f.at(1, r)
    }

    /// `int_{r_min}^r W` without the sphere factor.
    pub fn volume_integral(&self, r: f64) -> f64 {
        self.volume.at(r)
    }

    pub fn volume_cumulative(&self) -> &CumulativeIntegral {
        &self.volume
    }

    fn check_positive(r: f64) -> Result<()> {
        if r > 0.0 {
            Ok(())
        } else {
            Err(Error::SingularRadius(r))
        }
    }
}

/// `psi(r) = r` with analytic derivatives.
pub fn euclidean_warping(grid: RadialGrid) -> RadialFunction {
    RadialFunction::analytic(grid, 3, |k, r| match k {
        0 => r,
        1 => 1.0,
        _ => 0.0,
    })
}

pub fn zero_weight(grid: RadialGrid) -> RadialFunction {
    RadialFunction::analytic(grid, 3, |_, _| 0.0)
}

/// `f(r) = c r^2`; `c = 1` is the Gaussian shrinking soliton.
pub fn gaussian_weight(grid: RadialGrid, c: f64) -> RadialFunction {
    RadialFunction::analytic(grid, 3, move |k, r| match k {
        0 => c * r * r,
        1 => 2.0 * c * r,
        2 => 2.0 * c,
        _ => 0.0,
    })
}

/// Smooth weight with `e^{-f} ~ 2^beta r^{2-d} log^beta r` as `r -> infinity`:
/// `f = ((d-2)/2) ln(1 + r^2) - beta ln ln(e + r^2)`.
pub fn log_tail_weight(grid: RadialGrid, d: usize, beta: f64) -> RadialFunction {
    let k = (d as f64 - 2.0) / 2.0;
    let e = std::f64::consts::E;
    RadialFunction::analytic(grid, 2, move |order, r| {
        let r2 = r * r;
        let g = (e + r2).ln();
        let g1 = 2.0 * r / (e + r2);
        let g2 = 2.0 * (e - r2) / ((e + r2) * (e + r2));
        match order {
            0 => k * (1.0 + r2).ln() - beta * g.ln(),
            1 => 2.0 * k * r / (1.0 + r2) - beta * g1 / g,
            2 => 2.0 * k * (1.0 - r2) / ((1.0 + r2) * (1.0 + r2)) - beta * (g2 * g - g1 * g1) / (g * g),
            _ => f64::NAN,
        }
    })
}

/// `(Ric^r, Ric^theta)` of `Ric_{infinity,d}`: the radial eigenvalue
/// `-(d-1) psi''/psi + f''` and the `dtheta^2` coefficient
/// `-psi'' psi + (d-2)(1 - psi'^2) + psi psi' f'`.
pub fn ric_infinity_components(m: &ModelManifold, r: f64) -> Result<(f64, f64)> {
    ModelManifold::check_positive(r)?;
    let d = m.d as f64;
    let (p0, p1, p2) = (m.psi.value_at(r), m.psi.at(1, r), m.psi.at(2, r));
    let (f1, f2) = (m.f.at(1, r), m.f.at(2, r));
    let ric_r = -(d - 1.0) * p2 / p0 + f2;
    let ric_theta = -p2 * p0 + (d - 2.0) * (1.0 - p1 * p1) + p0 * p1 * f1;
    Ok((ric_r, ric_theta))
}

/// Radial eigenvalue of `Ric_{n,d}`: `Ric^r - f'^2/(n - d)`.
pub fn ric_n_radial(m: &ModelManifold, n: f64, r: f64) -> Result<f64> {
    if !(n > m.d as f64) {
        return Err(Error::InvalidN { n, d: m.d });
    }
    let (ric_r, _) = ric_infinity_components(m, r)?;
    let f1 = m.f.at(1, r);
    Ok(ric_r - f1 * f1 / (n - m.d as f64))
}

/// Radial eigenvalue for either virtual dimension.
pub fn ric_radial(m: &ModelManifold, n: VirtualDim, r: f64) -> Result<f64> {
    match n {
        VirtualDim::Infinite => ric_infinity_components(m, r).map(|c| c.0),
        VirtualDim::Finite(n) if n == m.d as f64 => {
            ModelManifold::check_positive(r)?;
            Ok(-(m.d as f64 - 1.0) * m.psi.at(2, r) / m.psi.value_at(r))
        }
        VirtualDim::Finite(n) => ric_n_radial(m, n, r),
    }
}

/// `L w = w'' + (d-1)(psi'/psi) w' - f' w'` for radial `w`.
pub fn weighted_laplacian_radial(m: &ModelManifold, w: &RadialFunction, r: f64) -> Result<f64> {
    ModelManifold::check_positive(r)?;
    Ok(w.at(2, r) + m.drift(r) * w.at(1, r))
}

/// `L r = (d-1) psi'/psi - f'`. For integrated weights the closed form is
/// evaluated as well and must agree.
pub fn laplacian_of_distance(m: &ModelManifold, r: f64) -> Result<f64> {
    ModelManifold::check_positive(r)?;
    let generic = m.drift(r);
    if let Some(closed) = laplacian_closed_form(m, r)? {
        if (closed - generic).abs() > 1e-8 * (1.0 + generic.abs()) {
            return Err(Error::IdentityMismatch {
                what: "L r",
                a: generic,
                b: closed,
            });
        }
    }
    Ok(generic)
}

/// `(d-1) int_0^r psi'^2 / psi(r)^2`, available when the weight was
/// integrated from the warping function.
pub fn laplacian_closed_form(m: &ModelManifold, r: f64) -> Result<Option<f64>> {
    ModelManifold::check_positive(r)?;
    Ok(m.warping_energy.as_ref().map(|e| {
        let psi = m.psi.value_at(r);
        (m.d as f64 - 1.0) * e.at(r) / (psi * psi)
    }))
}

/// `mu(B_R) = |S^{d-1}| int_0^R e^{-f} psi^{d-1}`.
pub fn weighted_volume(m: &ModelManifold, radius: f64) -> Result<f64> {
    let g = m.grid();
    if !g.contains(radius) {
        return Err(Error::OutOfGrid {
            r: radius,
            r_min: g.r_min(),
            r_max: g.r_max(),
        });
    }
    Ok(sphere_area(m.d) * m.volume.at(radius))
}

/// Weighted area of the sphere of radius `r`: `|S^{d-1}| e^{-f} psi^{d-1}`.
pub fn surface_area(m: &ModelManifold, r: f64) -> f64 {
    sphere_area(m.d) * m.density(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub r: Vec<f64>,
    pub ric_r_inf: Vec<f64>,
    pub ric_theta_inf: Vec<f64>,
    pub n: Option<f64>,
    pub ric_r_n: Option<Vec<f64>>,
    pub min_ric_r_inf: f64,
    pub min_ric_theta_inf: f64,
    pub min_ric_r_n: Option<f64>,
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Curvature components on the regular nodes (`r >= 3h`).
pub fn curvature_report(m: &ModelManifold, n: Option<f64>) -> Result<CurvatureReport> {
    let nodes = m.grid().nodes();
    let r: Vec<f64> = nodes[m.grid().first_regular_index()..].to_vec();
    let mut ric_r_inf = Vec::with_capacity(r.len());
    let mut ric_theta_inf = Vec::with_capacity(r.len());
    for &x in &r {
        let (a, b) = ric_infinity_components(m, x)?;
        ric_r_inf.push(a);
        ric_theta_inf.push(b);
    }
    let ric_r_n = match n {
        Some(n) => Some(
            r.iter()
                .map(|&x| ric_n_radial(m, n, x))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(CurvatureReport {
        min_ric_r_inf: min_of(&ric_r_inf),
        min_ric_theta_inf: min_of(&ric_theta_inf),
        min_ric_r_n: ric_r_n.as_deref().map(min_of),
        r,
        ric_r_inf,
        ric_theta_inf,
        n,
        ric_r_n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub r: Vec<f64>,
    /// `L r` at `r`.
    pub laplacian: Vec<f64>,
    pub sharp_laplacian_holds: bool,
    /// `max (L r - (d-1)/r)`; positive when the sharp comparison fails.
    pub max_sharp_violation: f64,
    /// Least `C` with `L r <= C/r` for all `r > 0`. Since `r L r -> d - 1` at
    /// the pole this is never below `d - 1`.
    pub rough_constant: f64,
    /// Least `C` with `mu(B_R) <= C R^d` over grid radii `R >= 1`.
    pub volume_constant: Option<f64>,
    /// `int dr / S(r)` over the top decade of the grid.
    pub parabolicity_integral: f64,
    /// Fitted exponent of `1/S(r)` in `r` over the same decade.
    pub tail_exponent: f64,
    /// Tail exponent below `-1`: `int^infinity dr/S` converges.
    pub non_parabolic: bool,
}

/// Tail exponents within this margin of `-1` count as divergent.
pub const PARABOLIC_MARGIN: f64 = 1e-6;

/// Laplacian, volume and parabolicity comparison on `(0, r_max]`.
pub fn comparison_report(m: &ModelManifold, r_max: f64) -> Result<ComparisonReport> {
    let grid = m.grid();
    if r_max > grid.r_max() || r_max <= grid.r_min() {
        return Err(Error::OutOfGrid {
            r: r_max,
            r_min: grid.r_min(),
            r_max: grid.r_max(),
        });
    }
    let d1 = m.d as f64 - 1.0;
    let nodes = grid.nodes();
    let start = grid.first_regular_index();
    let r: Vec<f64> = nodes[start..].iter().copied().filter(|&x| x <= r_max).collect();
    let laplacian: Vec<f64> = r.iter().map(|&x| m.drift(x)).collect();
    let mut max_sharp_violation = f64::NEG_INFINITY;
    let mut rough = d1;
    let mut sharp = true;
    for (&x, &l) in r.iter().zip(&laplacian) {
        let violation = l - d1 / x;
        max_sharp_violation = max_sharp_violation.max(violation);
        if violation > 1e-9 * (1.0 + l.abs()) {
            sharp = false;
        }
        rough = rough.max(x * l);
    }

    let area = sphere_area(m.d);
    let volume_constant = r
        .iter()
        .filter(|&&x| x >= 1.0)
        .map(|&x| area * m.volume.at(x) / x.powi(m.d as i32))
        .reduce(f64::max);

    let lo = (r_max / 10.0).max(r.first().copied().unwrap_or(r_max));
    let inv_area = |x: f64| 1.0 / (area * m.density(x));
    let parabolicity_integral = integrate_fn(grid, lo, r_max, &[], &inv_area);
    let tail: Vec<(f64, f64)> = r
        .iter()
        .filter(|&&x| x >= lo)
        .map(|&x| (x.ln(), inv_area(x).ln()))
        .collect();
    let tail_exponent = least_squares_slope(&tail);

    Ok(ComparisonReport {
        r,
        laplacian,
        sharp_laplacian_holds: sharp,
        max_sharp_violation,
        rough_constant: rough,
        volume_constant,
        parabolicity_integral,
        tail_exponent,
        non_parabolic: tail_exponent < -1.0 - PARABOLIC_MARGIN,
    })
}

/// Slope of the least-squares line through `(x, y)`; NaN below 3 points.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// The weight making `Ric^r + 2 psi' f'/psi` vanish against the warping:
/// `f(r) = f0 + (d-1) int_0^r [int_0^s psi'' psi] / psi(s)^2 ds`.
///
/// The returned function carries analytic `f'` and
/// `f'' = (d-1) psi''/psi - 2 psi' f'/psi`.
pub fn weight_from_warping(psi: &RadialFunction, d: usize, f0: f64) -> Result<RadialFunction> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let grid = psi.grid().clone();
    if grid.r_min() != 0.0 {
        return Err(Error::InvalidRange(
            "an integrated weight needs a grid starting at the origin".into(),
        ));
    }
    validate_warping(psi)?;
    let second = psi.derivative_values(2)?;
    for (&r, &v) in grid.nodes().iter().zip(&second) {
        if r > 0.0 && !(v < 0.0) {
            return Err(Error::WarpingNotConcave(r));
        }
    }

    let dm1 = d as f64 - 1.0;
    let p = psi.clone();
    let inner = CumulativeIntegral::new(&grid, Arc::new(move |s| p.at(2, s) * p.value_at(s)));
    let p = psi.clone();
    let slope = move |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            let v = p.value_at(s);
            dm1 * inner.at(s) / (v * v)
        }
    };
    let outer = CumulativeIntegral::new(&grid, Arc::new(slope));
    let p = psi.clone();
    Ok(RadialFunction::analytic(grid, 2, move |order, r| match order {
        0 => f0 + outer.at(r),
        1 => outer.integrand(r),
        2 if r == 0.0 => dm1 * p.at(3, 0.0) / 3.0,
        2 => {
            let v = p.value_at(r);
            dm1 * p.at(2, r) / v - 2.0 * p.at(1, r) * outer.integrand(r) / v
        }
        _ => f64::NAN,
    }))
}

/// Residual of `f'' + 2 (psi'/psi) f' - (d-1) psi''/psi` with `f''` taken by
/// finite differences of the grid values of `f'`, on interior regular nodes,
/// against the `10 h^2` tolerance.
pub fn ode_relation_residual(m: &ModelManifold) -> Result<GridResidual> {
    let grid = m.grid();
    let nodes = grid.nodes();
    let f1 = m.f.derivative_values(1)?;
    let f2 = differentiate_values(nodes, &f1, 1);
    let dm1 = m.d as f64 - 1.0;
    let mut out = GridResidual {
        r: Vec::new(),
        residual: Vec::new(),
        tolerance: Vec::new(),
    };
    for i in grid.first_regular_index()..nodes.len() - 1 {
        let r = nodes[i];
        let (p0, p1, p2) = (m.psi.value_at(r), m.psi.at(1, r), m.psi.at(2, r));
        out.r.push(r);
        out.residual.push(f2[i] + 2.0 * p1 * f1[i] / p0 - dm1 * p2 / p0);
        out.tolerance.push(grid.tolerance(i));
    }
    Ok(out)
}
