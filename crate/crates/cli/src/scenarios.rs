//! The named verification scenarios.

use std::collections::BTreeMap;

use bel_core::construction::{build_example_on, verify_theorem_with, TheoremReport};
use bel_core::geometry::{
    comparison_report, euclidean_warping, gaussian_weight, log_tail_weight, ric_infinity_components,
    sphere_area, weighted_laplacian_radial, weighted_volume,
};
use bel_core::lane_emden::{critical_exponent, energy, pohozaev_trace, solve_radial};
use bel_core::pfunction::{
    bubble_on, cheng_yau_ratio, cutoff_constants, divergence_identity_residual, equation_residual,
    fundamental_inequality, ibp_residual, integral_estimate_ratio, k_decomposition, log_bubble_on,
    superharmonic_floor_check, v_transform, w_functional, EstimatePart, PFunctionData, IBP_TOL,
};
use bel_core::{make_grid, Check, ModelManifold, RadialFunction, RadialGrid, SolutionProfile, Status};
use serde_json::{json, Value};

use crate::config::{ManifoldChoice, Scenario, ScenarioConfig};
use crate::report::Columns;

/// Checks, profile columns and non-verdict findings of one run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub columns: Columns,
    pub findings: BTreeMap<String, Value>,
}

impl Outcome {
    fn finding(&mut self, key: &str, value: impl Into<Value>) {
        self.findings.insert(key.to_owned(), value.into());
    }
}

type Res<T> = bel_core::Result<T>;

/// Radii of the estimate sweeps.
pub const SWEEP_RADII: [f64; 7] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
/// A sweep is bounded when its supremum is at most this multiple of the value
/// at the first radius.
pub const SWEEP_GROWTH_LIMIT: f64 = 10.0;
/// Default `b` of the bubbles.
pub const DEFAULT_B: f64 = 0.125;
/// Radius range of the bubble residual checks.
const BUBBLE_CHECK_RADIUS: f64 = 50.0;

pub fn run(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::default();
    let result = match cfg.scenario {
        Scenario::EuclideanSanity => euclidean_sanity(cfg, &mut out),
        Scenario::Bubble => bubble(cfg, &mut out),
        Scenario::LogBubble => log_bubble(cfg, &mut out),
        Scenario::Theorem22 => theorem(cfg, &mut out),
        Scenario::SolitonLiouville => soliton(cfg, &mut out),
        Scenario::Example2Parabolicity => example_2(cfg, &mut out),
        Scenario::EstimatesSweep => estimates(cfg, &mut out),
        Scenario::Custom => custom(cfg, &mut out),
    };
    if let Err(e) = result {
        out.checks
            .push(Check::error(cfg.scenario.name(), "scenario completed", &e));
    }
    out
}

fn grid(cfg: &ScenarioConfig) -> Res<RadialGrid> {
    make_grid(0.0, cfg.grid.r_max, cfg.grid.nodes, cfg.grid.spacing)
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn positive_nodes(g: &RadialGrid, r_hi: f64) -> impl Iterator<Item = f64> + '_ {
    g.nodes().iter().copied().filter(move |&r| r > 0.0 && r <= r_hi)
}

/// Largest relative increase allowed over the last step of a sweep.
pub const SWEEP_TAIL_GROWTH: f64 = 0.01;

/// `sup / first` over a sweep and the relative increase over its last step.
pub fn sweep_growth(values: &[f64]) -> (f64, f64) {
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = values.len();
    let tail = if n >= 2 {
        values[n - 1] / values[n - 2] - 1.0
    } else {
        0.0
    };
    (sup / values[0], tail)
}

fn sweep_check(out: &mut Outcome, name: &str, relation: &str, values: &[f64]) {
    let (growth, tail) = sweep_growth(values);
    let ok = values.iter().all(|v| v.is_finite() && *v > 0.0)
        && growth <= SWEEP_GROWTH_LIMIT
        && tail <= SWEEP_TAIL_GROWTH;
    out.checks.push(
        Check::new(name, relation, ok, growth, SWEEP_GROWTH_LIMIT).with_detail(format!(
            "tail growth {tail:.3e}; values over R = {SWEEP_RADII:?}: {values:?}"
        )),
    );
}

fn ric_columns(m: &ModelManifold, nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    nodes
        .iter()
        .map(|&r| ric_infinity_components(m, r).unwrap_or((f64::NAN, f64::NAN)))
        .unzip()
}

fn profile_columns(profile: &SolutionProfile, data: Option<&PFunctionData>) -> Columns {
    let r = profile.grid().nodes().to_vec();
    vec![
        ("r", Some(r)),
        ("u", Some(profile.u().values().to_vec())),
        ("u_prime", Some(profile.u_prime().values().to_vec())),
        ("v", data.map(|d| d.v().values().to_vec())),
        ("P", data.map(|d| d.p().values().to_vec())),
    ]
}

fn euclidean_sanity(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let g = grid(cfg)?;
    let m = ModelManifold::euclidean(d, g.clone())?;
    let nodes: Vec<f64> = positive_nodes(&g, f64::INFINITY).collect();
    let (ric_r, ric_t) = ric_columns(&m, &nodes);
    out.checks.push(Check::at_most(
        "ric_radial_zero",
        "|Ric^r| <= 1e-10 at every node",
        max_abs(ric_r.iter().copied()),
        1e-10,
    ));
    out.checks.push(Check::at_most(
        "ric_tangential_zero",
        "|Ric^theta| <= 1e-10 at every node",
        max_abs(ric_t.iter().copied()),
        1e-10,
    ));
    let d1 = d as f64 - 1.0;
    out.checks.push(Check::at_most(
        "laplacian_of_distance",
        "|r L r - (d-1)| <= 1e-12",
        max_abs(nodes.iter().map(|&r| r * m.drift(r) - d1)),
        1e-12,
    ));
    let square = RadialFunction::analytic(g.clone(), 2, |k, r| match k {
        0 => r * r,
        1 => 2.0 * r,
        _ => 2.0,
    });
    out.checks.push(Check::at_most(
        "laplacian_of_square",
        "L r^2 = 2d",
        max_abs(
            nodes
                .iter()
                .map(|&r| weighted_laplacian_radial(&m, &square, r).unwrap_or(f64::NAN) - 2.0 * d as f64),
        ),
        1e-12,
    ));
    if g.r_max() >= 1.0 {
        let ball = sphere_area(d) / d as f64;
        out.checks.push(Check::at_most(
            "unit_ball_volume",
            "|mu(B_1) - |S^{d-1}|/d| <= 1e-6",
            (weighted_volume(&m, 1.0)? - ball).abs(),
            1e-6,
        ));
    }
    let cmp = comparison_report(&m, g.r_max())?;
    out.checks.push(Check::new(
        "sharp_comparison",
        "L r <= (d-1)/r",
        cmp.sharp_laplacian_holds,
        cmp.max_sharp_violation,
        0.0,
    ));
    out.checks.push(Check::at_most(
        "rough_constant",
        "least C with L r <= C/r equals d-1",
        (cmp.rough_constant - d1).abs(),
        1e-12,
    ));
    out.checks.push(Check::new(
        "parabolicity",
        "non-parabolic iff d >= 3",
        cmp.non_parabolic == (d >= 3),
        cmp.tail_exponent,
        -1.0,
    ));
    let mut r0 = vec![0.0];
    r0.extend(&nodes);
    let (mut cr, mut ct) = (vec![f64::NAN], vec![f64::NAN]);
    cr.extend(ric_r);
    ct.extend(ric_t);
    out.columns = vec![("r", Some(r0)), ("ric_r", Some(cr)), ("ric_theta", Some(ct))];
    Ok(())
}

/// Identity checks shared by the bubble scenarios.
fn identity_checks(out: &mut Outcome, data: &PFunctionData, qs: &[f64], radius: f64) -> Res<()> {
    let res = divergence_identity_residual(data)?;
    out.checks.push(Check::at_most(
        "divergence_identity",
        "m v^{1-m} k[v] = div_f(v^{2-m} P'), residual / (100 h^2) <= 1",
        res.max_ratio(),
        1.0,
    ));
    let ineq = fundamental_inequality(data)?;
    out.checks.push(Check::at_most(
        "pointwise_inequality",
        "(1/2) P^{-1} v^{2-m} P'^2 + m v^{1-m} W_f <= div_f(v^{2-m} P'), excess / (100 h^2) <= 1",
        ineq.max_ratio().max(0.0),
        1.0,
    ));
    for &q in qs {
        let ibp = ibp_residual(data, q, radius)?;
        out.checks.push(
            Check::at_most(
                &format!("ibp_identity_q{q}"),
                "integration by parts against e^{-f} v^{1-q} phi_R^2, relative residual",
                ibp.relative,
                IBP_TOL,
            )
            .with_detail(format!(
                "R = {radius}, lhs = {:.16e}, rhs = {:.16e}",
                ibp.lhs, ibp.rhs
            )),
        );
    }
    Ok(())
}

fn bubble(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let b = cfg.get_or("b", DEFAULT_B);
    let g = grid(cfg)?;
    let profile = bubble_on(g.clone(), d, b)?;
    let data = v_transform(&profile)?;
    let r_hi = BUBBLE_CHECK_RADIUS.min(g.r_max());
    out.checks.push(Check::at_most(
        "equation_residual",
        "sup |Delta u + u^{(d+2)/(d-2)}| on [0, 50] <= 1e-8",
        equation_residual(&profile, r_hi)?,
        1e-8,
    ));
    let target = 2.0 * b * d as f64;
    out.checks.push(Check::at_most(
        "p_constant",
        "max |P - 2 b d| <= 1e-8",
        max_abs(data.p().values().iter().map(|p| p - target)),
        1e-8,
    ));
    let mut k_max: f64 = 0.0;
    let mut split_gap: f64 = 0.0;
    let mut w_max: f64 = 0.0;
    for r in positive_nodes(&g, f64::INFINITY) {
        let kd = k_decomposition(&data, r)?;
        k_max = k_max.max(kd.k);
        split_gap = split_gap.max(kd.four_term_sum().map_or(f64::NAN, |s| (s - kd.k).abs()));
        w_max = w_max.max(w_functional(&data, r)?.abs());
    }
    out.checks.push(Check::at_most(
        "k_vanishes",
        "k[v] <= 1e-8 at every node",
        k_max,
        1e-8,
    ));
    out.checks.push(Check::at_most(
        "k_four_term_form",
        "|k[v] - four-term form| <= 1e-8 at every node",
        split_gap,
        1e-8,
    ));
    out.checks.push(Check::at_most(
        "w_vanishes",
        "|W_f[v]| <= 1e-8 with n = d",
        w_max,
        1e-8,
    ));
    let radius = 10.0_f64.min(g.r_max() / 2.0);
    identity_checks(out, &data, &[0.0, 2.0, data.m() / 2.0 + 1.0], radius)?;
    out.finding("a", 1.0 / (d as f64 * (d as f64 - 2.0) * b));
    out.finding("m", data.m());
    out.columns = profile_columns(&profile, Some(&data));
    Ok(())
}

fn log_bubble(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let b = cfg.get_or("b", DEFAULT_B);
    let g = grid(cfg)?;
    let profile = log_bubble_on(g.clone(), b)?;
    let data = v_transform(&profile)?;
    out.checks.push(Check::at_most(
        "equation_residual",
        "sup |Delta u + e^u| on [0, 50] <= 1e-8",
        equation_residual(&profile, BUBBLE_CHECK_RADIUS.min(g.r_max()))?,
        1e-8,
    ));
    out.checks.push(Check::at_most(
        "p_constant",
        "max |P - 1/2| <= 1e-8",
        max_abs(data.p().values().iter().map(|p| p - 0.5)),
        1e-8,
    ));
    let radius = 10.0_f64.min(g.r_max() / 2.0);
    identity_checks(out, &data, &[0.0, 1.0, 2.0], radius)?;
    out.finding("a", 1.0 / (8.0 * b));
    out.columns = profile_columns(&profile, Some(&data));
    Ok(())
}

fn theorem_report(cfg: &ScenarioConfig) -> Res<TheoremReport> {
    let d = cfg.dim();
    let alpha = cfg.get_or("alpha", bel_core::construction::DEFAULT_ALPHA);
    let p = match cfg.get("p") {
        Some(p) => p,
        None => critical_exponent(d)?,
    };
    let ell = cfg.get_or("ell", 1.0);
    let m = build_example_on(grid(cfg)?, d, alpha, 0.0)?;
    verify_theorem_with(&m, p, ell, cfg.tol)
}

fn theorem(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let rep = theorem_report(cfg)?;
    out.checks.extend(rep.checks());
    let data = v_transform(&rep.profile)?;
    let res = divergence_identity_residual(&data)?;
    out.checks.push(Check::at_most(
        "divergence_identity",
        "m v^{1-m} k[v] = div_f(v^{2-m} P'), residual / (100 h^2) <= 1",
        res.max_ratio(),
        1.0,
    ));
    let ineq = fundamental_inequality(&data)?;
    out.checks.push(
        Check::at_most(
            "pointwise_inequality",
            "(1/2) P^{-1} v^{2-m} P'^2 + m v^{1-m} W_f <= div_f(v^{2-m} P'), excess / (100 h^2) <= 1",
            ineq.max_ratio().max(0.0),
            1.0,
        )
        .with_detail(format!("min W_f = {:.16e}", ineq.min_w())),
    );
    let cy = cheng_yau_sweep(&rep.profile, cfg.get_or("n", rep.d as f64))?;
    sweep_check(
        out,
        "cheng_yau_bounded",
        "sup_{B_R} |u'/u|^2 / (R^-2 + sup_{B_2R} u^{4/(d-2)}) bounded",
        &cy,
    );

    out.finding("status", rep.status.to_string());
    out.finding("rough_constant", rep.comparison.rough_constant);
    out.finding("bound_constant", rep.bound_constant);
    out.finding("c1", rep.c1);
    out.finding("c2", rep.c2);
    out.finding("min_chi", rep.min_chi);
    out.finding("chi_prime_exceeds_gap_square", rep.chi_prime_exceeds_gap_square);
    out.finding("weight_oscillation", rep.weight_oscillation);
    out.finding("integral_tail_exponent", rep.integral_tail_exponent);
    out.finding("min_w", ineq.min_w());
    out.finding("solver_steps", rep.profile.steps() as f64);

    let nodes = rep.profile.grid().nodes();
    let (mut ric_r, mut ric_t) = ric_columns(&rep.manifold, nodes);
    if nodes[0] == 0.0 {
        ric_r[0] = f64::NAN;
        ric_t[0] = f64::NAN;
    }
    let energies: Vec<f64> = nodes
        .iter()
        .map(|&r| energy(&rep.profile, r).unwrap_or(f64::NAN))
        .collect();
    let mut cols = profile_columns(&rep.profile, Some(&data));
    cols.push(("ric_r", Some(ric_r)));
    cols.push(("ric_theta", Some(ric_t)));
    cols.push(("K", rep.trace.slope_factor.clone()));
    cols.push(("pohozaev", Some(rep.trace.pohozaev.clone())));
    cols.push(("energy", Some(energies)));
    out.columns = cols;
    Ok(())
}

fn cheng_yau_sweep(profile: &SolutionProfile, n: f64) -> Res<Vec<f64>> {
    SWEEP_RADII
        .iter()
        .map(|&r| cheng_yau_ratio(profile, n, r))
        .collect()
}

fn soliton(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let g = grid(cfg)?;
    let c = cfg.get_or("c", 1.0);
    let m = ModelManifold::new(d, euclidean_warping(g.clone()), gaussian_weight(g.clone(), c))?;
    let p = cfg.get("p").unwrap_or(3.0);
    let ell = cfg.get("ell").unwrap_or(1.0);
    let profile = solve_radial(&m, p, ell, g.r_max(), cfg.tol)?;
    let status = profile.status();
    let r_star = match status {
        Status::CrossedZeroAt(r) => r,
        _ => f64::NAN,
    };
    out.checks.push(
        Check::new(
            "crosses_zero",
            "u reaches 0 at a finite radius r* > 0",
            r_star.is_finite() && r_star > 0.0,
            r_star,
            g.r_max(),
        )
        .with_detail(status.to_string()),
    );
    out.finding("status", status.to_string());
    if r_star.is_finite() {
        out.finding("r_star", r_star);
    }
    let energies: Vec<f64> = profile
        .grid()
        .nodes()
        .iter()
        .map(|&r| energy(&profile, r).unwrap_or(f64::NAN))
        .collect();
    let mut cols = profile_columns(&profile, None);
    cols.push(("energy", Some(energies)));
    out.columns = cols;
    Ok(())
}

fn example_2(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let beta = cfg.get_or("beta", 2.0);
    let p = cfg.get_or("p", 2.0);
    let g = grid(cfg)?;
    let m = ModelManifold::new(
        d,
        euclidean_warping(g.clone()),
        log_tail_weight(g.clone(), d, beta),
    )?;
    let cmp = comparison_report(&m, g.r_max())?;
    out.checks.push(Check::new(
        "non_parabolic",
        "fitted tail exponent of 1/S(r) < -1 (int^infinity dr/S converges)",
        cmp.non_parabolic,
        cmp.tail_exponent,
        -1.0,
    ));
    let exponent = 2.0 * p / (p - 1.0);
    let radii: Vec<f64> = g
        .nodes()
        .iter()
        .copied()
        .filter(|&r| (10.0..=1e3).contains(&r))
        .collect();
    let ratios: Vec<f64> = radii
        .iter()
        .map(|&r| weighted_volume(&m, r).map(|v| v / r.powf(exponent)))
        .collect::<Res<_>>()?;
    let worst_increase = ratios
        .windows(2)
        .map(|w| w[1] / w[0] - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check::new(
        "volume_ratio_decreasing",
        "mu(B_R)/R^{2p/(p-1)} decreasing on R in [10, 1000]",
        radii.len() >= 2 && worst_increase < 0.0,
        worst_increase,
        0.0,
    ));
    // mu(B_R) ~ C R^2 log^beta R for d = 3.
    let fit = radii
        .iter()
        .map(|&r| Ok(weighted_volume(&m, r)? / (r.powi(2) * r.ln().powf(beta))))
        .collect::<Res<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.finding("volume_constant_r2_log", fit);
    out.finding("parabolicity_integral", cmp.parabolicity_integral);
    out.finding("tail_exponent", cmp.tail_exponent);
    let nodes: Vec<f64> = g.nodes().to_vec();
    let (mut ric_r, mut ric_t) = ric_columns(&m, &nodes);
    ric_r[0] = f64::NAN;
    ric_t[0] = f64::NAN;
    out.columns = vec![
        ("r", Some(nodes)),
        ("ric_r", Some(ric_r)),
        ("ric_theta", Some(ric_t)),
    ];
    Ok(())
}

fn estimates(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let b = cfg.get_or("b", DEFAULT_B);
    let g = grid(cfg)?;
    let profile = bubble_on(g.clone(), d, b)?;
    let data = v_transform(&profile)?;
    let q_top = data.m() / 2.0 + 1.0;
    for (part, q, name) in [
        (EstimatePart::Gradient, 2.0, "integral_estimate_gradient_q2"),
        (EstimatePart::Plain, q_top, "integral_estimate_plain_qmax"),
    ] {
        let vals: Vec<f64> = SWEEP_RADII
            .iter()
            .map(|&r| integral_estimate_ratio(&data, part, q, r).map(|e| e.ratio()))
            .collect::<Res<_>>()?;
        sweep_check(
            out,
            name,
            "int_{B_R} e^{-f} v^{-q} (...) / (mu(B_2R) R^{-q}) bounded",
            &vals,
        );
    }
    let cy = cheng_yau_sweep(&profile, d as f64)?;
    sweep_check(
        out,
        "cheng_yau_bubble",
        "sup_{B_R} |u'/u|^2 / (R^-2 + sup_{B_2R} u^{4/(d-2)}) bounded",
        &cy,
    );

    let floor = superharmonic_floor_check(&profile, d as f64, 1.0)?;
    out.checks.push(Check::new(
        "superharmonic_floor",
        "u >= A r^{2-kappa} beyond R = 1 with kappa = d",
        floor.holds,
        floor.min_ratio(),
        1.0,
    ));

    let consts: Vec<_> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&r| cutoff_constants(profile.manifold(), r))
        .collect::<Res<_>>()?;
    let spread = |f: fn(&bel_core::pfunction::CutoffConstants) -> f64| {
        let v: Vec<f64> = consts.iter().map(f).collect();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo - 1.0
    };
    let worst = spread(|c| c.gradient)
        .max(spread(|c| c.gradient_squared))
        .max(spread(|c| c.laplacian));
    out.checks.push(Check::at_most(
        "cutoff_scaling",
        "R |phi'|, R^2 phi'^2/phi, R^2 (-L phi) independent of R in {1,2,4,8}",
        worst,
        1e-6,
    ));
    out.finding("cutoff_gradient_constant", consts[0].gradient);
    out.finding("cutoff_laplacian_constant", consts[0].laplacian);

    if d >= 3 {
        let rep = theorem_report(cfg)?;
        let cy = cheng_yau_sweep(&rep.profile, d as f64)?;
        sweep_check(
            out,
            "cheng_yau_constructed",
            "sup_{B_R} |u'/u|^2 / (R^-2 + sup_{B_2R} u^{4/(d-2)}) bounded on the explicit manifold",
            &cy,
        );
    }
    out.columns = profile_columns(&profile, Some(&data));
    Ok(())
}

fn custom(cfg: &ScenarioConfig, out: &mut Outcome) -> Res<()> {
    let d = cfg.dim();
    let g = grid(cfg)?;
    let m = match cfg.manifold.unwrap_or(ManifoldChoice::Euclidean) {
        ManifoldChoice::Euclidean => ModelManifold::euclidean(d, g.clone())?,
        ManifoldChoice::Gaussian => ModelManifold::new(
            d,
            euclidean_warping(g.clone()),
            gaussian_weight(g.clone(), cfg.get_or("c", 1.0)),
        )?,
        ManifoldChoice::Constructed => build_example_on(
            g.clone(),
            d,
            cfg.get_or("alpha", bel_core::construction::DEFAULT_ALPHA),
            0.0,
        )?,
    };
    let p = cfg.get("p").unwrap_or(3.0);
    let ell = cfg.get("ell").unwrap_or(1.0);
    let profile = solve_radial(&m, p, ell, g.r_max(), cfg.tol)?;
    out.checks.push(
        Check::new(
            "solved",
            "shooting reached r_max or a zero of u",
            true,
            profile.r_end(),
            g.r_max(),
        )
        .with_detail(profile.status().to_string()),
    );
    let trace = pohozaev_trace(&profile)?;
    out.finding("status", profile.status().to_string());
    out.finding("k_nonpositive", trace.k_nonpositive);
    out.finding("p_nonpositive", trace.p_nonpositive);
    out.finding("e_decreasing", trace.e_decreasing);
    out.finding("max_slope_factor", json_number(trace.max_slope_factor));
    let mut cols = profile_columns(&profile, None);
    cols.push(("K", trace.slope_factor.clone()));
    cols.push(("pohozaev", Some(trace.pohozaev)));
    cols.push(("energy", Some(trace.energy)));
    out.columns = cols;
    Ok(())
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}
