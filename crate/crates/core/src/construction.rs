//! The explicit model manifold with `Ric_{infinity,d} > 0` away from the pole
//! carrying global positive solutions of the critical and supercritical
//! Lane-Emden equation, together with a verifier for its properties.

use std::sync::Arc;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::geometry::{
    comparison_report, least_squares_slope, ode_relation_residual, ric_infinity_components, sphere_area,
    weighted_volume, ComparisonReport, ManifoldKind, ModelManifold,
};
use crate::lane_emden::{
    asymptotic_bound_check, critical_exponent, pohozaev_trace, solve_radial, BoundCheck, PohozaevTrace,
    SolutionProfile, Status,
};
use crate::radial::{make_grid, CumulativeIntegral, GridResidual, RadialFunction, RadialGrid, Spacing};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_NODES: usize = 4096;
/// Solver tolerance used by [`verify_theorem`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// `psi(r) = alpha r + (1 - alpha) r / sqrt(r^2 + 1)` with derivatives to
/// order 3.
pub fn explicit_warping(grid: RadialGrid, alpha: f64) -> RadialFunction {
    RadialFunction::analytic(grid, 3, move |k, r| {
        let s = r * r + 1.0;
        let b = 1.0 - alpha;
        match k {
            0 => alpha * r + b * r / s.sqrt(),
            1 => alpha + b * s.powf(-1.5),
            2 => -3.0 * b * r * s.powf(-2.5),
            3 => b * (12.0 * r * r - 3.0) * s.powf(-3.5),
            _ => f64::NAN,
        }
    })
}

pub fn default_grid() -> RadialGrid {
    make_grid(0.0, DEFAULT_R_MAX, DEFAULT_NODES, Spacing::Geometric)
        .expect("default grid parameters are valid")
}

/// The explicit manifold on the default grid.
pub fn build_example(d: usize, alpha: f64, f0: f64) -> Result<ModelManifold> {
    build_example_on(default_grid(), d, alpha, f0)
}

pub fn build_example_on(grid: RadialGrid, d: usize, alpha: f64, f0: f64) -> Result<ModelManifold> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    let psi = explicit_warping(grid, alpha);
    Ok(ModelManifold::from_warping(d, psi, f0)?.with_kind(ManifoldKind::Constructed { alpha }))
}

fn constructed_alpha(m: &ModelManifold) -> Result<f64> {
    match m.kind() {
        ManifoldKind::Constructed { alpha } => Ok(alpha),
        _ => Err(Error::NotConstructed),
    }
}

/// Conditions `Ric^r > 0`, `Ric^theta > 0` and
/// `Ric^r <= -2 psi' f'/psi + f'^2/(d-1)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionChecks {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
    pub min_ric_r: f64,
    pub min_ric_theta: f64,
    /// `max (Ric^r + 2 psi' f'/psi - f'^2/(d-1))` with analytic `f''`.
    pub max_iii_slack: f64,
    /// Residual of `f'' + 2 (psi'/psi) f' = (d-1) psi''/psi` with `f''`
    /// differenced on the grid.
    pub ode_residual: GridResidual,
    /// `max |residual| / h^2` over the same nodes.
    pub ode_residual_per_h2: f64,
}

impl ConditionChecks {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii
    }
}

pub fn condition_checks(m: &ModelManifold) -> Result<ConditionChecks> {
    constructed_alpha(m)?;
    let d1 = m.d() as f64 - 1.0;
    let mut min_r = f64::INFINITY;
    let mut min_t = f64::INFINITY;
    let mut slack = f64::NEG_INFINITY;
    for &r in m.grid().nodes().iter().filter(|&&r| r > 0.0) {
        let (a, b) = ric_infinity_components(m, r)?;
        min_r = min_r.min(a);
        min_t = min_t.min(b);
        let (p0, p1) = (m.psi().value_at(r), m.psi().at(1, r));
        let f1 = m.f().at(1, r);
        slack = slack.max(a + 2.0 * p1 * f1 / p0 - f1 * f1 / d1);
    }
    let ode_residual = ode_relation_residual(m)?;
    let grid = m.grid();
    let nodes = grid.nodes();
    let first = grid.first_regular_index();
    let ode_residual_per_h2 = ode_residual
        .residual
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let h = grid.step(first + k);
            v.abs() / (h * h)
        })
        .fold(0.0, f64::max);
    debug_assert_eq!(ode_residual.r.first(), nodes.get(first));
    Ok(ConditionChecks {
        i: min_r > 0.0,
        ii: min_t > 0.0,
        iii: slack <= 1e-9 && ode_residual.passes(),
        min_ric_r: min_r,
        min_ric_theta: min_t,
        max_iii_slack: slack,
        ode_residual,
        ode_residual_per_h2,
    })
}

/// `Psi = (d-2)(1 - psi'^2) + psi psi' f'`.
pub fn psi_cap(m: &ModelManifold, r: f64) -> f64 {
    let (p0, p1) = (m.psi().value_at(r), m.psi().at(1, r));
    (m.d() as f64 - 2.0) * (1.0 - p1 * p1) + p0 * p1 * m.f().at(1, r)
}

/// `Psi' = -(d-3) psi' psi'' - psi'^2 f' + psi'' psi f'`, the form obtained
/// after eliminating `f''`.
pub fn psi_cap_slope(m: &ModelManifold, r: f64) -> f64 {
    let psi = m.psi();
    let (p0, p1, p2) = (psi.value_at(r), psi.at(1, r), psi.at(2, r));
    let f1 = m.f().at(1, r);
    -(m.d() as f64 - 3.0) * p1 * p2 - p1 * p1 * f1 + p2 * p0 * f1
}

/// Everything checked on one instance of the construction.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub d: usize,
    pub alpha: f64,
    pub p: f64,
    pub ell: f64,
    pub manifold: ModelManifold,
    pub profile: SolutionProfile,
    pub status: Status,
    pub conditions: ConditionChecks,
    pub comparison: ComparisonReport,
    pub trace: PohozaevTrace,
    pub bound: BoundCheck,
    /// `C = ((p-1)/(2d)) (C1/C2) alpha^{d-1}`.
    pub bound_constant: f64,
    /// Grid extrema of `e^{-f}`.
    pub c1: f64,
    pub c2: f64,
    /// `psi(0) = 0`, `psi'(0) = 1`, `psi' > 0`, `alpha r < psi < r`.
    pub warping_ok: bool,
    /// `mu(B_R) <= (C2/d) |S^{d-1}| R^d` at every node.
    pub volume_ok: bool,
    pub max_volume_ratio: f64,
    /// Sharp comparison fails at every `r > 0` while
    /// `L r <= (d-1)/(alpha^2 r)`.
    pub sharp_fails: bool,
    pub rough_holds: bool,
    pub max_rough_excess: f64,
    /// `u(0) = ell`.
    pub center_ok: bool,
    /// `u' < 0` for `r > 0`.
    pub decreasing: bool,
    /// `f' u' > 0` for `r > 0`.
    pub drift_alignment: bool,
    pub min_f_prime_u_prime: f64,
    /// `u <= (C r^2 + ell^{1-p})^{-1/(p-1)}` at every node.
    pub bound_ok: bool,
    /// `chi(r) = int_0^r (psi' - psi/s)^2 ds > 0` with `chi' > 0`.
    pub chi_positive: bool,
    pub min_chi: f64,
    /// Largest gap between `chi` and `int_0^r psi'^2 - psi^2/r`.
    pub chi_form_gap: f64,
    /// Whether `chi' > (psi' - 1)^2` at every node; reported, not required.
    pub chi_prime_exceeds_gap_square: bool,
    /// `Psi > 0` for `r > 0`, non-decreasing, with `Psi' > 0`.
    pub psi_cap_positive: bool,
    /// `max |f - f0|` on the grid.
    pub weight_oscillation: f64,
    /// Fitted exponent of `|int_0^r psi'' psi|` over the top decade.
    pub integral_tail_exponent: f64,
}

/// Tail rate exponent bound `1 - epsilon` with `epsilon = 1/2`.
pub const TAIL_EXPONENT_BOUND: f64 = 0.5;

impl TheoremReport {
    pub fn solution_global(&self) -> bool {
        self.status == Status::GlobalPositive
    }

    pub fn checks(&self) -> Vec<Check> {
        let d1 = self.d as f64 - 1.0;
        let c = &self.conditions;
        vec![
            Check::new(
                "warping",
                "psi(0)=0, psi'(0)=1, psi'>0, alpha r < psi < r",
                self.warping_ok,
                0.0,
                0.0,
            ),
            Check::at_most(
                "volume_growth",
                "mu(B_R) <= (C2/d) |S^{d-1}| R^d",
                self.max_volume_ratio,
                1.0 + 1e-12,
            ),
            Check::new(
                "sharp_laplacian_fails",
                "L r > (d-1)/r for r > 0",
                self.sharp_fails,
                self.comparison.max_sharp_violation,
                0.0,
            ),
            Check::at_most(
                "rough_laplacian",
                "L r <= (d-1)/(alpha^2 r) + 1e-8",
                self.max_rough_excess,
                1e-8,
            ),
            Check::at_most(
                "center_value",
                "u(0) = ell",
                (self.profile.ell() - self.ell).abs(),
                0.0,
            ),
            Check::new(
                "global_positive",
                "u > 0 on [0, r_max]",
                self.solution_global(),
                self.profile.r_end(),
                0.0,
            )
            .with_detail(self.status.to_string()),
            Check::new("decreasing", "u' < 0 for r > 0", self.decreasing, 0.0, 0.0),
            Check::new(
                "drift_alignment",
                "f' u' > 0 for r > 0",
                self.drift_alignment,
                self.min_f_prime_u_prime,
                0.0,
            ),
            Check::at_most(
                "asymptotic_bound",
                "u <= (C r^2 + ell^{1-p})^{-1/(p-1)}",
                self.bound.max_ratio,
                1.0 + 1e-10,
            )
            .with_detail(format!("C = {:.16e}", self.bound_constant)),
            Check::new(
                "ric_radial_positive",
                "Ric^r > 0 for r > 0",
                c.i,
                c.min_ric_r,
                0.0,
            ),
            Check::new(
                "ric_tangential_positive",
                "Ric^theta > 0 for r > 0",
                c.ii,
                c.min_ric_theta,
                0.0,
            ),
            Check::at_most(
                "condition_iii",
                "f'' + 2 psi' f'/psi - (d-1) psi''/psi = 0 (residual / h^2 <= 100)",
                c.ode_residual_per_h2,
                100.0,
            ),
            Check::at_most(
                "slope_factor_nonpositive",
                "K <= 1e-8",
                self.trace.max_slope_factor,
                crate::lane_emden::SLOPE_FACTOR_TOL,
            ),
            Check::new(
                "pohozaev_nonpositive",
                "P_u <= 0",
                self.trace.p_nonpositive,
                self.trace.max_pohozaev_ratio,
                1e-8,
            ),
            Check::new(
                "chi_positive",
                "chi > 0, chi' > 0 for r > 0",
                self.chi_positive,
                self.min_chi,
                0.0,
            ),
            Check::new(
                "psi_cap_positive",
                "Psi > 0, Psi' > 0 for r > 0",
                self.psi_cap_positive,
                0.0,
                0.0,
            ),
            Check::new(
                "integral_tail",
                "|int_0^r psi'' psi| grows slower than r^{1/2}",
                self.integral_tail_exponent < TAIL_EXPONENT_BOUND,
                self.integral_tail_exponent,
                TAIL_EXPONENT_BOUND,
            ),
            Check::new(
                "rough_constant",
                "least C with L r <= C/r is at most (d-1)/alpha^2",
                self.comparison.rough_constant <= d1 / (self.alpha * self.alpha) + 1e-8,
                self.comparison.rough_constant,
                d1 / (self.alpha * self.alpha),
            ),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

/// Solves the equation on the constructed manifold and checks every claimed
/// property.
pub fn verify_theorem(m: &ModelManifold, p: f64, ell: f64) -> Result<TheoremReport> {
    verify_theorem_with(m, p, ell, DEFAULT_TOL)
}

pub fn verify_theorem_with(m: &ModelManifold, p: f64, ell: f64, tol: f64) -> Result<TheoremReport> {
    let alpha = constructed_alpha(m)?;
    let d = m.d();
    let ps = critical_exponent(d)?;
    if !(p >= ps * (1.0 - 1e-12)) {
        return Err(Error::InvalidExponent(p));
    }
    if !(ell > 0.0) {
        return Err(Error::NonpositiveEll(ell));
    }
    let grid = m.grid().clone();
    let nodes = grid.nodes();
    let r_max = grid.r_max();
    let profile = solve_radial(m, p, ell, r_max, tol)?;
    let conditions = condition_checks(m)?;
    let comparison = comparison_report(m, r_max)?;
    let trace = pohozaev_trace(&profile)?;

    let psi = m.psi();
    let warping_ok = psi.values()[0] == 0.0
        && (psi.at(1, 0.0) - 1.0).abs() <= 1e-14
        && nodes.iter().skip(1).all(|&r| {
            let v = psi.value_at(r);
            psi.at(1, r) > 0.0 && alpha * r < v && v < r
        });

    let e_f: Vec<f64> = m.f().values().iter().map(|f| (-f).exp()).collect();
    let c1 = e_f.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = e_f.iter().copied().fold(0.0, f64::max);
    let area = sphere_area(d);
    let mut max_volume_ratio: f64 = 0.0;
    for &r in nodes.iter().skip(1) {
        let cap = c2 / d as f64 * area * r.powi(d as i32);
        max_volume_ratio = max_volume_ratio.max(weighted_volume(m, r)? / cap);
    }

    let d1 = d as f64 - 1.0;
    let max_rough_excess = comparison
        .r
        .iter()
        .zip(&comparison.laplacian)
        .map(|(&r, &l)| l - d1 / (alpha * alpha * r))
        .fold(f64::NEG_INFINITY, f64::max);
    let sharp_fails = nodes.iter().skip(1).all(|&r| laplacian_gap(m, r) > 0.0);

    let u = profile.u();
    let du = profile.u_prime();
    let decreasing = du.values().iter().skip(1).all(|&v| v < 0.0);
    let f1 = m.f().derivative_values(1)?;
    let min_f_prime_u_prime = f1
        .iter()
        .zip(du.values())
        .skip(1)
        .map(|(a, b)| a * b)
        .fold(f64::INFINITY, f64::min);

    let bound_constant = (p - 1.0) / (2.0 * d as f64) * (c1 / c2) * alpha.powi(d as i32 - 1);
    let bound = asymptotic_bound_check(&profile, bound_constant, ell, p)?;

    let (min_chi, chi_form_gap, chi_ok, chi_claim) = chi_checks(m);
    let psi_cap_positive = psi_cap_checks(m);

    let weight_oscillation = m
        .f()
        .values()
        .iter()
        .map(|f| (f - m.f0()).abs())
        .fold(0.0, f64::max);
    let integral_tail_exponent = {
        let p = psi.clone();
        let inner = CumulativeIntegral::new(&grid, Arc::new(move |s| p.at(2, s) * p.value_at(s)));
        let pts: Vec<(f64, f64)> = nodes
            .iter()
            .filter(|&&r| r >= r_max / 10.0)
            .map(|&r| (r.ln(), inner.at(r).abs().ln()))
            .collect();
        least_squares_slope(&pts)
    };

    Ok(TheoremReport {
        d,
        alpha,
        p,
        ell,
        manifold: m.clone(),
        status: profile.status(),
        center_ok: u.values()[0] == ell,
        profile,
        conditions,
        comparison,
        trace,
        bound_ok: bound.all_hold,
        bound,
        bound_constant,
        c1,
        c2,
        warping_ok,
        volume_ok: max_volume_ratio <= 1.0 + 1e-12,
        max_volume_ratio,
        sharp_fails,
        rough_holds: max_rough_excess <= 1e-8,
        max_rough_excess,
        decreasing,
        drift_alignment: min_f_prime_u_prime > 0.0,
        min_f_prime_u_prime,
        chi_positive: chi_ok,
        min_chi,
        chi_form_gap,
        chi_prime_exceeds_gap_square: chi_claim,
        psi_cap_positive,
        weight_oscillation,
        integral_tail_exponent,
    })
}

/// `L r - (d-1)/r = (d-1) chi(r) / psi(r)^2`.
fn laplacian_gap(m: &ModelManifold, r: f64) -> f64 {
    let psi = m.psi().value_at(r);
    (m.d() as f64 - 1.0) * chi(m, r) / (psi * psi)
}

fn chi_integrand(m: &ModelManifold, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let g = m.psi().at(1, s) - m.psi().value_at(s) / s;
    g * g
}

/// `chi(r) = int_0^r (psi' - psi/s)^2 ds`, free of the cancellation in
/// `int_0^r psi'^2 - psi(r)^2 / r`.
pub fn chi(m: &ModelManifold, r: f64) -> f64 {
    crate::radial::integrate_fn(m.grid(), 0.0, r, &[], &|s| chi_integrand(m, s))
}

fn chi_checks(m: &ModelManifold) -> (f64, f64, bool, bool) {
    let mm = m.clone();
    let cum = CumulativeIntegral::new(m.grid(), Arc::new(move |s| chi_integrand(&mm, s)));
    let p = m.psi().clone();
    let energy = CumulativeIntegral::new(
        m.grid(),
        Arc::new(move |s| {
            let v = p.at(1, s);
            v * v
        }),
    );
    let mut min_chi = f64::INFINITY;
    let mut gap: f64 = 0.0;
    let mut ok = true;
    let mut claim = true;
    for &r in m.grid().nodes().iter().skip(1) {
        let c = cum.at(r);
        let psi = m.psi().value_at(r);
        let direct = energy.at(r) - psi * psi / r;
        gap = gap.max((c - direct).abs() / (1.0 + energy.at(r)));
        min_chi = min_chi.min(c);
        let slope = chi_integrand(m, r);
        ok &= c > 0.0 && slope > 0.0;
        let d1 = m.psi().at(1, r) - 1.0;
        claim &= slope > d1 * d1;
    }
    (min_chi, gap, ok, claim)
}

fn psi_cap_checks(m: &ModelManifold) -> bool {
    let nodes = m.grid().nodes();
    let values: Vec<f64> = nodes.iter().map(|&r| psi_cap(m, r)).collect();
    let positive = values.iter().skip(1).all(|&v| v > 0.0);
    let slope_positive = nodes.iter().skip(1).all(|&r| psi_cap_slope(m, r) > 0.0);
    let monotone = values
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-13 * w[0].abs().max(w[1].abs()));
    positive && slope_positive && monotone
}
