//! Radial grids, sampled radial functions, finite differences and quadrature.
//!
//! Every radial quantity in the crate (warping, weight, solutions, P-functions)
//! is a [`RadialFunction`]: node values on a [`RadialGrid`] plus, when known,
//! an evaluator that returns derivatives at arbitrary radii. Analytic
//! evaluators are always preferred; grid differences are the fallback.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Node spacing of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    /// Geometric progression. A grid starting at the origin is uniform on
    /// `[0, 1]` and geometric beyond, with matching steps at `r = 1`.
    Geometric,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Uniform => f.write_str("uniform"),
            Spacing::Geometric => f.write_str("geometric"),
        }
    }
}

/// Strictly increasing radii `r_min = r_0 < ... < r_{n-1} = r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Arc<[f64]>,
    spacing: Spacing,
}

/// Smallest admissible grid.
pub const MIN_NODES: usize = 16;

/// Builds a grid on `[r_min, r_max]` with `n` nodes.
pub fn make_grid(r_min: f64, r_max: f64, n: usize, spacing: Spacing) -> Result<RadialGrid> {
    RadialGrid::new(r_min, r_max, n, spacing)
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_min < 0.0 || r_min >= r_max {
            return Err(Error::InvalidRange(format!(
                "need 0 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidRange(format!(
                "need at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let mut nodes: Vec<f64> = match spacing {
            Spacing::Uniform => {
                let h = (r_max - r_min) / (n - 1) as f64;
                (0..n).map(|i| r_min + i as f64 * h).collect()
            }
            Spacing::Geometric if r_min > 0.0 => {
                let ln_ratio = (r_max / r_min).ln() / (n - 1) as f64;
                (0..n).map(|i| r_min * (i as f64 * ln_ratio).exp()).collect()
            }
            Spacing::Geometric => anchored_geometric(r_max, n)?,
        };
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRange(
                "grid nodes are not strictly increasing".into(),
            ));
        }
        Ok(Self {
            nodes: nodes.into(),
            spacing,
        })
    }

    /// Grid over explicit nodes; used for truncated solution profiles.
    pub fn from_nodes(nodes: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if nodes.len() < MIN_NODES {
            return Err(Error::InsufficientNodes {
                needed: MIN_NODES,
                got: nodes.len(),
            });
        }
        if nodes[0] < 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidRange(
                "grid nodes must be nonnegative and strictly increasing".into(),
            ));
        }
        Ok(Self {
            nodes: nodes.into(),
            spacing,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Local step at node `i`: the larger of the two adjacent gaps.
    pub fn step(&self, i: usize) -> f64 {
        let n = self.nodes.len();
        let left = if i > 0 {
            self.nodes[i] - self.nodes[i - 1]
        } else {
            0.0
        };
        let right = if i + 1 < n {
            self.nodes[i + 1] - self.nodes[i]
        } else {
            0.0
        };
        left.max(right)
    }

    /// Index `i` of the interval `[r_i, r_{i+1}]` containing `r`, clamped to
    /// the first/last interval.
    pub fn locate(&self, r: f64) -> usize {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&x| x <= r);
        i.saturating_sub(1).min(n - 2)
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_min() && r <= self.r_max()
    }

    /// First node at least three first-steps away from the origin. Curvature
    /// and Laplacian reports start here.
    pub fn first_regular_index(&self) -> usize {
        let h0 = self.nodes[1] - self.nodes[0];
        let cut = self.r_min() + 3.0 * h0;
        self.nodes.partition_point(|&x| x < cut * (1.0 - 1e-12))
    }

    /// Prefix of the grid with nodes `<= r_end`, if it keeps enough nodes.
    pub fn truncated(&self, r_end: f64) -> Option<Self> {
        let k = self.nodes.partition_point(|&x| x <= r_end);
        if k < MIN_NODES {
            return None;
        }
        Some(Self {
            nodes: self.nodes[..k].into(),
            spacing: self.spacing,
        })
    }

    /// Grid-aware "equals" tolerance for O(h^2) quantities at node `i`.
    pub fn tolerance(&self, i: usize) -> f64 {
        let h = self.step(i);
        10.0 * h * h
    }
}

fn anchored_geometric(r_max: f64, n: usize) -> Result<Vec<f64>> {
    if r_max <= 1.0 {
        return Err(Error::InvalidRange(format!(
            "a geometric grid from the origin needs r_max > 1, got {r_max}"
        )));
    }
    let intervals = n - 1;
    let ln_max = r_max.ln();
    // k uniform intervals on [0, 1] with step 1/k, then geometric ratio q with
    // q - 1 ~ 1/k so the step is continuous at r = 1.
    let mismatch = |k: usize| ln_max / (intervals - k) as f64 - (1.0 + 1.0 / k as f64).ln();
    let mut k = 1;
    while k + 1 < intervals && mismatch(k) < 0.0 {
        k += 1;
    }
    let m = intervals - k;
    let ln_q = ln_max / m as f64;
    let mut nodes = Vec::with_capacity(n);
    nodes.extend((0..=k).map(|i| i as f64 / k as f64));
    nodes.extend((1..=m).map(|j| (j as f64 * ln_q).exp()));
    Ok(nodes)
}

/// Derivative evaluator at arbitrary radii.
pub trait RadialEval: Send + Sync {
    /// Highest derivative order available.
    fn max_order(&self) -> usize;
    /// Derivative of the given order (0 = value) at `r`.
    fn eval(&self, order: usize, r: f64) -> f64;
}

struct ClosureEval<F> {
    max_order: usize,
    f: F,
}

impl<F> RadialEval for ClosureEval<F>
where
    F: Fn(usize, f64) -> f64 + Send + Sync,
{
    fn max_order(&self) -> usize {
        self.max_order
    }

    fn eval(&self, order: usize, r: f64) -> f64 {
        (self.f)(order, r)
    }
}

/// Wraps a closure `(order, r) -> value` as an evaluator.
pub fn closure_eval<F>(max_order: usize, f: F) -> Arc<dyn RadialEval>
where
    F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(ClosureEval { max_order, f })
}

/// Sampled scalar function of the geodesic radius.
#[derive(Clone)]
pub struct RadialFunction {
    grid: RadialGrid,
    values: Arc<[f64]>,
    eval: Option<Arc<dyn RadialEval>>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("nodes", &self.grid.len())
            .field("analytic_order", &self.analytic_order())
            .finish()
    }
}

impl RadialFunction {
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid,
            values: values.into(),
            eval: None,
        })
    }

    /// Samples an evaluator on the grid and keeps it for off-grid queries.
    pub fn from_eval(grid: RadialGrid, eval: Arc<dyn RadialEval>) -> Self {
        let values: Vec<f64> = grid.nodes().iter().map(|&r| eval.eval(0, r)).collect();
        Self {
            grid,
            values: values.into(),
            eval: Some(eval),
        }
    }

    pub fn analytic<F>(grid: RadialGrid, max_order: usize, f: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_eval(grid, closure_eval(max_order, f))
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluator(&self) -> Option<&Arc<dyn RadialEval>> {
        self.eval.as_ref()
    }

    /// Highest analytic derivative order, if an evaluator is attached.
    pub fn analytic_order(&self) -> Option<usize> {
        self.eval.as_ref().map(|e| e.max_order())
    }

    /// Value at an arbitrary radius (evaluator, else cubic interpolation).
    pub fn value_at(&self, r: f64) -> f64 {
        match &self.eval {
            Some(e) => e.eval(0, r),
            None => interpolate(self.grid.nodes(), &self.values, r),
        }
    }

    /// Derivative at an arbitrary radius: analytic when available, otherwise
    /// finite differences at the surrounding nodes, interpolated.
    pub fn derivative_at(&self, order: usize, r: f64) -> Result<f64> {
        if let Some(e) = &self.eval {
            if order <= e.max_order() {
                return Ok(e.eval(order, r));
            }
        }
        if order == 0 {
            return Ok(self.value_at(r));
        }
        let nodes = self.grid.nodes();
        check_nodes(nodes.len(), order)?;
        let (lo, hi) = interp_window(nodes.len(), self.grid.locate(r));
        let local: Vec<f64> = (lo..hi).map(|i| fd_at(nodes, &self.values, i, order)).collect();
        Ok(lagrange(&nodes[lo..hi], &local, r))
    }

    /// [`Self::derivative_at`] for orders every grid supports (`<= 3`);
    /// NaN otherwise.
    pub fn at(&self, order: usize, r: f64) -> f64 {
        self.derivative_at(order, r).unwrap_or(f64::NAN)
    }

    /// Derivative values at the nodes (analytic when available).
    pub fn derivative_values(&self, order: usize) -> Result<Vec<f64>> {
        if let Some(e) = &self.eval {
            if order <= e.max_order() {
                return Ok(self.grid.nodes().iter().map(|&r| e.eval(order, r)).collect());
            }
        }
        Ok(differentiate(self, order)?.values.to_vec())
    }

    /// Largest gap between grid differences and the analytic derivative on
    /// interior nodes, as a multiple of the `10 h^2` tolerance. `None` when no
    /// analytic derivative of that order exists.
    pub fn analytic_consistency(&self, order: usize) -> Result<Option<f64>> {
        let Some(e) = &self.eval else { return Ok(None) };
        if order > e.max_order() || order == 0 {
            return Ok(None);
        }
        let fd = differentiate(self, order)?;
        let nodes = self.grid.nodes();
        let mut worst = 0.0_f64;
        for (i, &r) in nodes.iter().enumerate().take(nodes.len() - 1).skip(1) {
            let exact = e.eval(order, r);
            let scale = 1.0 + exact.abs();
            worst = worst.max((fd.values[i] - exact).abs() / (scale * self.grid.tolerance(i)));
        }
        Ok(Some(worst))
    }

    /// Same grid, new values, no evaluator.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::from_values(self.grid.clone(), values)
    }
}

fn check_nodes(n: usize, order: usize) -> Result<()> {
    if n < order + 2 {
        return Err(Error::InsufficientNodes {
            needed: order + 2,
            got: n,
        });
    }
    Ok(())
}

/// Finite-difference derivative of the given order on the grid.
///
/// Each node uses an `order + 2` point stencil (centered where possible,
/// one-sided at the ends), which is second order accurate on any grid and
/// exact on quadratics for `order = 1`.
pub fn differentiate(f: &RadialFunction, order: usize) -> Result<RadialFunction> {
    let nodes = f.grid.nodes();
    if order == 0 {
        return RadialFunction::from_values(f.grid.clone(), f.values.to_vec());
    }
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidRange(format!(
            "derivative order must be 1..=3, got {order}"
        )));
    }
    check_nodes(nodes.len(), order)?;
    let out = (0..nodes.len())
        .map(|i| fd_at(nodes, &f.values, i, order))
        .collect();
    RadialFunction::from_values(f.grid.clone(), out)
}

/// Finite differences of raw node values; same stencils as [`differentiate`].
pub fn differentiate_values(nodes: &[f64], values: &[f64], order: usize) -> Vec<f64> {
    (0..nodes.len()).map(|i| fd_at(nodes, values, i, order)).collect()
}

fn fd_at(nodes: &[f64], values: &[f64], i: usize, order: usize) -> f64 {
    let n = nodes.len();
    let size = order + 2;
    let start = i.saturating_sub((size - 1) / 2).min(n - size);
    let w = fornberg_weights(nodes[i], &nodes[start..start + size], order);
    w.iter()
        .zip(&values[start..start + size])
        .map(|(a, b)| a * b)
        .sum()
}

/// Finite-difference weights for the derivative of order `m` at `z`.
fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

fn interp_window(n: usize, interval: usize) -> (usize, usize) {
    let lo = interval.saturating_sub(1).min(n.saturating_sub(4));
    (lo, (lo + 4).min(n))
}

/// Cubic Lagrange interpolation through the four nodes around `r`.
pub fn interpolate(nodes: &[f64], values: &[f64], r: f64) -> f64 {
    let n = nodes.len();
    let i = nodes.partition_point(|&x| x <= r).saturating_sub(1).min(n - 2);
    let (lo, hi) = interp_window(n, i);
    lagrange(&nodes[lo..hi], &values[lo..hi], r)
}

fn lagrange(x: &[f64], y: &[f64], r: f64) -> f64 {
    let mut total = 0.0;
    for (j, (&xj, &yj)) in x.iter().zip(y).enumerate() {
        if r == xj {
            return yj;
        }
        let mut basis = 1.0;
        for (k, &xk) in x.iter().enumerate() {
            if k != j {
                basis *= (r - xk) / (xj - xk);
            }
        }
        total += basis * yj;
    }
    total
}

/// Cumulative integral `F(r_i) = int_{r_min}^{r_i} f` from node values.
///
/// Each interval integrates the quadratic through its own two nodes and one
/// neighbour; interior intervals average the left- and right-leaning
/// quadratics. Exact for quadratics, fourth order on smooth data.
pub fn integrate_cumulative(f: &RadialFunction) -> RadialFunction {
    let values = cumulative_from_values(f.grid.nodes(), &f.values);
    RadialFunction {
        grid: f.grid.clone(),
        values: values.into(),
        eval: None,
    }
}

/// [`integrate_cumulative`] on raw slices.
pub fn cumulative_from_values(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let (a, b) = (x[i], x[i + 1]);
        let left = (i > 0).then(|| quad_integral(&x[i - 1..i + 2], &y[i - 1..i + 2], a, b));
        let right = (i + 2 < n).then(|| quad_integral(&x[i..i + 3], &y[i..i + 3], a, b));
        let piece = match (left, right) {
            (Some(l), Some(r)) => 0.5 * (l + r),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => 0.5 * (b - a) * (y[i] + y[i + 1]),
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

fn quad_integral(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    // Two-point Gauss is exact for the interpolating quadratic.
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let off = half / 3f64.sqrt();
    half * (lagrange(x, y, mid - off) + lagrange(x, y, mid + off))
}

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64 + ?Sized>(a: f64, b: f64, g: &F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(&x, w)| w * g(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integral of `g` over `[a, b]`, one Gauss-Legendre panel per grid interval
/// (extra breakpoints are honoured, so piecewise-smooth integrands stay exact).
pub fn integrate_fn<F: Fn(f64) -> f64 + ?Sized>(
    grid: &RadialGrid,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    g: &F,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = grid
        .nodes()
        .iter()
        .chain(breakpoints)
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| gauss_legendre(w[0], w[1], g)).sum()
}

type Integrand = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `r -> int_{r_min}^r g` with node values precomputed by Gauss-Legendre
/// panels; off-node queries add one partial panel.
#[derive(Clone)]
pub struct CumulativeIntegral {
    nodes: Arc<[f64]>,
    cum: Arc<[f64]>,
    integrand: Integrand,
}

impl fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn new(grid: &RadialGrid, integrand: Integrand) -> Self {
        let nodes: Arc<[f64]> = grid.nodes().into();
        let mut cum = Vec::with_capacity(nodes.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            acc += gauss_legendre(w[0], w[1], &*integrand);
            cum.push(acc);
        }
        Self {
            nodes,
            cum: cum.into(),
            integrand,
        }
    }

    pub fn node_values(&self) -> &[f64] {
        &self.cum
    }

    pub fn integrand(&self, r: f64) -> f64 {
        (self.integrand)(r)
    }

    pub fn at(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        let last = self.nodes[n - 1];
        if r > last {
            let step = last - self.nodes[n - 2];
            let pieces = ((r - last) / step).ceil().max(1.0) as usize;
            let h = (r - last) / pieces as f64;
            let tail: f64 = (0..pieces)
                .map(|k| {
                    let a = last + k as f64 * h;
                    gauss_legendre(a, a + h, &*self.integrand)
                })
                .sum();
            return self.cum[n - 1] + tail;
        }
        let i = self
            .nodes
            .partition_point(|&x| x <= r)
            .saturating_sub(1)
            .min(n - 2);
        if r == self.nodes[i] {
            return self.cum[i];
        }
        self.cum[i] + gauss_legendre(self.nodes[i], r, &*self.integrand)
    }
}

/// Pointwise residual of an identity with its per-node tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResidual {
    pub r: Vec<f64>,
    pub residual: Vec<f64>,
    pub tolerance: Vec<f64>,
}

impl GridResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|residual| / tolerance`; at most 1 when the identity holds.
    pub fn max_ratio(&self) -> f64 {
        self.residual
            .iter()
            .zip(&self.tolerance)
            .fold(0.0, |m, (v, t)| m.max(v.abs() / t))
    }

    pub fn passes(&self) -> bool {
        self.residual
            .iter()
            .zip(&self.tolerance)
            .all(|(v, t)| v.abs() <= *t)
    }

    /// Radius of the largest `|residual| / tolerance`.
    pub fn worst_r(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for ((r, v), t) in self.r.iter().zip(&self.residual).zip(&self.tolerance) {
            let q = v.abs() / t;
            if best.is_none_or(|(_, b)| q > b) {
                best = Some((*r, q));
            }
        }
        best.map(|(r, _)| r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(a: f64, b: f64, n: usize) -> RadialGrid {
        make_grid(a, b, n, Spacing::Uniform).unwrap()
    }

    #[test]
    fn uniform_grid_examples() {
        let g = uniform(0.0, 1.0, 17);
        assert_eq!(g.nodes()[1], 0.0625);
        assert_eq!(g.r_max(), 1.0);
        for w in g.nodes().windows(2) {
            assert!((w[1] - w[0] - 1.0 / 16.0).abs() < 1e-15);
        }
        let g = uniform(0.0, 10.0, 16);
        assert!((g.nodes()[1] - 10.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_grid_ratio() {
        let g = make_grid(1.0, 100.0, 33, Spacing::Geometric).unwrap();
        let ratio = 100f64.powf(1.0 / 32.0);
        for w in g.nodes().windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-12);
        }
        assert_eq!(g.r_min(), 1.0);
        assert_eq!(g.r_max(), 100.0);
    }

    #[test]
    fn anchored_geometric_grid_is_smooth() {
        let g = make_grid(0.0, 1000.0, 4096, Spacing::Geometric).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.r_min(), 0.0);
        assert_eq!(g.r_max(), 1000.0);
        let steps: Vec<f64> = g.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        for s in steps.windows(2) {
            let ratio = s[1] / s[0];
            assert!(ratio > 0.99 && ratio < 1.01, "step ratio {ratio}");
        }
    }

    #[test]
    fn invalid_grids() {
        assert!(matches!(
            make_grid(1.0, 1.0, 20, Spacing::Uniform),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            make_grid(0.0, 1.0, 15, Spacing::Uniform),
            Err(Error::InvalidRange(_))
        ));
        assert!(make_grid(0.0, 0.5, 32, Spacing::Geometric).is_err());
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let g = uniform(0.0, 2.0, 21);
        let f = RadialFunction::from_values(g.clone(), g.nodes().iter().map(|r| r * r).collect()).unwrap();
        let d = differentiate(&f, 1).unwrap();
        for (r, v) in g.nodes().iter().zip(d.values()) {
            assert!((v - 2.0 * r).abs() < 1e-12);
        }
        let c = RadialFunction::from_values(g.clone(), vec![3.5; g.len()]).unwrap();
        for order in 1..=3 {
            assert!(differentiate(&c, order)
                .unwrap()
                .values()
                .iter()
                .all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn derivative_needs_enough_nodes() {
        let g = uniform(0.0, 1.0, 16);
        let f = RadialFunction::from_values(g, vec![0.0; 16]).unwrap();
        assert!(differentiate(&f, 4).is_err());
    }

    #[test]
    fn sine_derivative_is_second_order() {
        let err = |n: usize| {
            let g = uniform(0.0, 3.0, n);
            let f =
                RadialFunction::from_values(g.clone(), g.nodes().iter().map(|r| r.sin()).collect()).unwrap();
            let d = differentiate(&f, 1).unwrap();
            g.nodes()[1..n - 1]
                .iter()
                .zip(&d.values()[1..n - 1])
                .map(|(r, v)| (v - r.cos()).abs())
                .fold(0.0, f64::max)
        };
        let slope = (err(65) / err(129)).log2();
        assert!((slope - 2.0).abs() < 0.1, "observed order {slope}");
    }

    #[test]
    fn higher_order_derivatives_converge() {
        for order in 2..=3 {
            let err = |n: usize| {
                let g = make_grid(0.5, 3.0, n, Spacing::Geometric).unwrap();
                let f = RadialFunction::from_values(g.clone(), g.nodes().iter().map(|r| r.exp()).collect())
                    .unwrap();
                let d = differentiate(&f, order).unwrap();
                g.nodes()
                    .iter()
                    .zip(d.values())
                    .map(|(r, v)| (v - r.exp()).abs())
                    .fold(0.0, f64::max)
            };
            let slope = (err(101) / err(201)).log2();
            assert!(slope > 1.8, "order {order}: observed {slope}");
        }
    }

    #[test]
    fn cumulative_integral_examples() {
        let g = uniform(0.0, 1.0, 16);
        let one = RadialFunction::from_values(g.clone(), vec![1.0; 16]).unwrap();
        assert!((integrate_cumulative(&one).values()[15] - 1.0).abs() < 1e-14);
        let g = uniform(0.0, 2.0, 16);
        let lin = RadialFunction::from_values(g.clone(), g.nodes().to_vec()).unwrap();
        let cum = integrate_cumulative(&lin);
        assert_eq!(cum.values()[0], 0.0);
        assert!((cum.values()[15] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_integral_converges_on_geometric_grid() {
        let err = |n: usize| {
            let g = make_grid(0.1, 2.0, n, Spacing::Geometric).unwrap();
            let f =
                RadialFunction::from_values(g.clone(), g.nodes().iter().map(|r| r.cos()).collect()).unwrap();
            let v = integrate_cumulative(&f).values()[n - 1];
            (v - (2f64.sin() - 0.1f64.sin())).abs()
        };
        assert!((err(33) / err(65)).log2() >= 2.0);
    }

    #[test]
    fn analytic_function_prefers_evaluator() {
        let g = uniform(0.0, 2.0, 41);
        let f = RadialFunction::analytic(g, 3, |k, r| match k {
            0 => r.sin(),
            1 => r.cos(),
            2 => -r.sin(),
            _ => -r.cos(),
        });
        assert_eq!(f.derivative_at(1, 0.3).unwrap(), 0.3f64.cos());
        let worst = f.analytic_consistency(1).unwrap().unwrap();
        assert!(worst <= 1.0, "{worst}");
        let worst = f.analytic_consistency(3).unwrap().unwrap();
        assert!(worst <= 1.0, "{worst}");
    }

    #[test]
    fn sampled_function_falls_back_to_differences() {
        let g = uniform(0.0, 2.0, 201);
        let f = RadialFunction::from_values(g.clone(), g.nodes().iter().map(|r| r.exp()).collect()).unwrap();
        let d = f.derivative_at(1, 0.777).unwrap();
        assert!((d - 0.777f64.exp()).abs() < 1e-4);
        assert!((f.value_at(1.2345) - 1.2345f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn gauss_cumulative_matches_closed_form() {
        let g = make_grid(0.0, 50.0, 200, Spacing::Geometric).unwrap();
        let c = CumulativeIntegral::new(&g, Arc::new(|r: f64| r * r));
        for r in [0.0, 0.3, 7.7, 50.0, 60.0] {
            assert!((c.at(r) - r * r * r / 3.0).abs() <= 1e-10 * (1.0 + r * r * r));
        }
    }
}
