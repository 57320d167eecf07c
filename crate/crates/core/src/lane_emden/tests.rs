use super::*;
use crate::geometry::{euclidean_warping, gaussian_weight, zero_weight};
use crate::radial::make_grid;
use approx::assert_relative_eq;

fn euclid(d: usize, r_max: f64, n: usize) -> ModelManifold {
    let g = make_grid(0.0, r_max, n, Spacing::Uniform).unwrap();
    ModelManifold::euclidean(d, g).unwrap()
}

fn euclid_geo(d: usize, r_max: f64, n: usize) -> ModelManifold {
    let g = make_grid(0.0, r_max, n, Spacing::Geometric).unwrap();
    ModelManifold::euclidean(d, g).unwrap()
}

fn gaussian_soliton() -> ModelManifold {
    let g = make_grid(0.0, 20.0, 2001, Spacing::Uniform).unwrap();
    ModelManifold::new(3, euclidean_warping(g.clone()), gaussian_weight(g, 1.0)).unwrap()
}

#[test]
fn recovers_d4_bubble() {
    let tol = 1e-10;
    let m = euclid(4, 10.0, 201);
    let s = solve_radial(&m, 3.0, 1.0, 10.0, tol).unwrap();
    assert_eq!(s.status(), Status::GlobalPositive);
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let r = i as f64 * 0.01;
        let (u, du, _) = s.state(r).unwrap();
        let w = 1.0 + r * r / 8.0;
        worst = worst.max((u - 1.0 / w).abs());
        assert!((du + r / 4.0 / (w * w)).abs() <= 10.0 * tol);
    }
    assert!(worst <= 10.0 * tol, "max error {worst}");
}

#[test]
fn taylor_start_matches_series() {
    let m = gaussian_soliton();
    for (ell, p) in [(1.0, 3.0), (2.0, 2.0), (0.5, 5.0)] {
        let s = solve_radial(&m, p, ell, 1.0, 1e-12).unwrap();
        for h in [1e-3, 2e-3, 4e-3] {
            let u = s.u().value_at(h);
            let series = ell - ell.powf(p) * h * h / 6.0;
            assert!(
                (u - series).abs() <= 50.0 * h.powi(4) * ell.powf(2.0 * p),
                "h = {h}"
            );
        }
    }
}

#[test]
fn gaussian_soliton_solution_crosses_zero() {
    let m = gaussian_soliton();
    for ell in [0.5, 1.0, 2.0] {
        let s = solve_radial(&m, 3.0, ell, 20.0, 1e-10).unwrap();
        let Status::CrossedZeroAt(r_star) = s.status() else {
            panic!("ell = {ell}: status {}", s.status());
        };
        assert!(r_star > 0.0 && r_star < 20.0);
        let (u, du, _) = s.state(r_star).unwrap();
        assert!(u.abs() <= 1e-10);
        assert!(du < 0.0, "u and u' vanish together");
        assert_eq!(s.r_end(), r_star);
        assert!(s.grid().r_max() <= r_star);
        assert!(s.state(r_star * 1.01).is_err());
    }
}

#[test]
fn liouville_log_bubble() {
    let m = euclid(2, 50.0, 501);
    let s = solve_liouville(&m, 0.0, 50.0, 1e-11).unwrap();
    assert_eq!(s.status(), Status::TruncatedAt(50.0));
    for i in 0..=500 {
        let r = i as f64 * 0.1;
        let exact = -2.0 * (1.0 + r * r / 8.0).ln();
        assert!((s.u().value_at(r) - exact).abs() <= 1e-9, "r = {r}");
    }
    for &r in s.grid().nodes().iter().filter(|&&r| r >= 10.0) {
        let lower = -4.0 * (r * r.ln().sqrt()).ln();
        assert!(s.u().value_at(r) > lower);
    }
}

#[test]
fn liouville_series_and_dimension() {
    let m = euclid(2, 1.0, 101);
    for ell in [-1.0, 0.0, 1.5] {
        let s = solve_liouville(&m, ell, 1.0, 1e-12).unwrap();
        let h = 2e-3;
        let expect = ell - ell.exp() * h * h / 4.0;
        assert!((s.u().value_at(h) - expect).abs() <= 10.0 * h.powi(4) * (2.0 * ell).exp());
    }
    let m3 = euclid(3, 1.0, 101);
    assert!(matches!(
        solve_liouville(&m3, 0.0, 1.0, 1e-8),
        Err(Error::WrongDimension { expected: 2, got: 3 })
    ));
}

#[test]
fn rejects_bad_inputs() {
    let m = euclid(3, 1.0, 101);
    assert!(matches!(
        solve_radial(&m, 3.0, 0.0, 1.0, 1e-8),
        Err(Error::NonpositiveEll(_))
    ));
    assert!(matches!(
        solve_radial(&m, 1.0, 1.0, 1.0, 1e-8),
        Err(Error::InvalidExponent(_))
    ));
    assert!(matches!(
        solve_radial(&m, 3.0, 1.0, 1.0, 0.0),
        Err(Error::InvalidTolerance(_))
    ));
    assert!(matches!(
        solve_radial(&m, 3.0, 1.0, 2.0, 1e-8),
        Err(Error::OutOfGrid { .. })
    ));
}

#[test]
fn energy_examples() {
    let m = euclid_geo(4, 1000.0, 3000);
    let s = solve_radial(&m, 3.0, 1.0, 1000.0, 1e-10).unwrap();
    assert_relative_eq!(energy(&s, 0.0).unwrap(), 0.25);
    let e: Vec<f64> = s.grid().nodes().iter().map(|&r| energy(&s, r).unwrap()).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]));
    assert!(*e.last().unwrap() < 1e-9);
    // E' = -u'^2 L r against differences of E on the grid.
    let de = differentiate_values(s.grid().nodes(), &e, 1);
    for (i, &r) in s.grid().nodes().iter().enumerate().skip(50).take(2000) {
        let du = s.u_prime().values()[i];
        let exact = -du * du * m.drift(r);
        assert!(
            (de[i] - exact).abs() <= s.grid().tolerance(i) * (1.0 + exact.abs()),
            "r = {r}"
        );
    }
    assert!(matches!(energy(&s, 2000.0), Err(Error::OutOfRange { .. })));
}

#[test]
fn critical_bubble_pohozaev_vanishes() {
    let m = euclid_geo(4, 1000.0, 3000);
    let s = solve_radial(&m, 3.0, 1.0, 1000.0, 1e-11).unwrap();
    assert_eq!(pohozaev(&s, 0.0).unwrap(), 0.0);
    let trace = pohozaev_trace(&s).unwrap();
    assert!(trace.p_nonpositive, "max ratio {}", trace.max_pohozaev_ratio);
    assert!(trace.k_nonpositive);
    assert!(trace.e_decreasing);
    let k = trace.slope_factor.unwrap();
    assert!(k
        .iter()
        .zip(&trace.r)
        .all(|(k, r)| k.abs() < 1e-12 * (1.0 + r.powi(3))));
}

#[test]
fn euclidean_slope_factor_leading_coefficient() {
    for d in [3usize, 4, 5, 6] {
        let m = euclid(d, 5.0, 101);
        let ps = critical_exponent(d).unwrap();
        let c = 0.5 + 1.0 / (ps + 1.0) - (d as f64 - 1.0) / d as f64;
        assert!(c.abs() < 1e-15);
        for r in [0.1, 1.0, 4.0] {
            assert!(pohozaev_slope_factor(&m, ps, r).unwrap().abs() < 1e-12 * r.powi(d as i32 - 1));
            assert!(pohozaev_slope_factor(&m, ps + 1.0, r).unwrap() < 0.0);
        }
    }
}

#[test]
fn slope_factor_needs_increasing_density() {
    let g = make_grid(0.0, 5.0, 101, Spacing::Uniform).unwrap();
    let m = ModelManifold::new(3, euclidean_warping(g.clone()), gaussian_weight(g, 1.0)).unwrap();
    assert!(pohozaev_slope_factor(&m, 5.0, 0.5).is_ok());
    assert!(matches!(
        pohozaev_slope_factor(&m, 5.0, 2.0),
        Err(Error::MonotonicityViolated(_))
    ));
    assert!(matches!(
        pohozaev_slope_factor(&m, 5.0, 0.0),
        Err(Error::SingularRadius(_))
    ));
}

#[test]
fn pohozaev_derivative_is_slope_times_gradient_squared() {
    let m = euclid_geo(3, 100.0, 3000);
    let s = solve_radial(&m, 6.0, 1.0, 100.0, 1e-11).unwrap();
    let trace = pohozaev_trace(&s).unwrap();
    let k = trace.slope_factor.as_ref().unwrap();
    let dp = differentiate_values(&trace.r, &trace.pohozaev, 1);
    for i in s.grid().first_regular_index()..trace.r.len() - 1 {
        let du = s.u_prime().values()[i];
        let rhs = k[i] * du * du;
        let scale = m.density(trace.r[i]) * (du * du + s.u().values()[i].powi(7));
        assert!(
            (dp[i] - rhs).abs() <= s.grid().tolerance(i) * scale.max(1e-300),
            "r = {}",
            trace.r[i]
        );
    }
    assert!(k[1..].iter().all(|&v| v < 0.0));
}

#[test]
fn positivity_criterion_examples() {
    assert!(positivity_criterion(&euclid(3, 5.0, 101)).unwrap());
    let g = make_grid(0.0, 5.0, 101, Spacing::Uniform).unwrap();
    let plus = ModelManifold::new(3, euclidean_warping(g.clone()), gaussian_weight(g.clone(), 1.0)).unwrap();
    assert!(!positivity_criterion(&plus).unwrap());
    let minus = ModelManifold::new(3, euclidean_warping(g.clone()), gaussian_weight(g, -1.0)).unwrap();
    assert!(positivity_criterion(&minus).unwrap());
}

#[test]
fn asymptotic_bound_on_bubble() {
    let m = euclid_geo(4, 1000.0, 2000);
    let s = solve_radial(&m, 3.0, 1.0, 1000.0, 1e-11).unwrap();
    let ok = asymptotic_bound_check(&s, 1.0 / 64.0, 1.0, 3.0).unwrap();
    assert!(ok.all_hold);
    assert!(ok.holds[0]);
    assert_relative_eq!(s.u().values()[0], 1.0);
    let bad = asymptotic_bound_check(&s, 1.0, 1.0, 3.0).unwrap();
    assert!(!bad.all_hold);
    let crossed = solve_radial(&gaussian_soliton(), 3.0, 1.0, 20.0, 1e-8).unwrap();
    assert!(matches!(
        asymptotic_bound_check(&crossed, 1.0, 1.0, 3.0),
        Err(Error::NonpositiveU(_))
    ));
}

#[test]
fn divergence_form_holds() {
    let m = euclid_geo(4, 1000.0, 4096);
    let s = solve_radial(&m, 3.0, 1.0, 1000.0, 1e-11).unwrap();
    let res = divergence_form_residual(&s).unwrap();
    assert!(res.passes(), "ratio {} at {:?}", res.max_ratio(), res.worst_r());
    let g = make_grid(0.0, 20.0, 2001, Spacing::Uniform).unwrap();
    let m = ModelManifold::new(3, euclidean_warping(g.clone()), zero_weight(g)).unwrap();
    let s = solve_radial(&m, 2.5, 2.0, 20.0, 1e-11).unwrap();
    let res = divergence_form_residual(&s).unwrap();
    assert!(res.passes(), "ratio {} at {:?}", res.max_ratio(), res.worst_r());
}

#[test]
fn tightening_tolerance_reduces_error() {
    let m = euclid(4, 10.0, 201);
    let err = |tol: f64, h_max: f64| {
        let mut opts = SolveOptions::new(tol);
        opts.h_max = Some(h_max);
        let s = solve_radial_with(&m, 3.0, 1.0, 10.0, &opts).unwrap();
        (0..=100)
            .map(|i| {
                let r = i as f64 * 0.1;
                (s.u().value_at(r) - 1.0 / (1.0 + r * r / 8.0)).abs()
            })
            .fold(0.0, f64::max)
    };
    let coarse = err(1e-6, 0.5);
    let fine = err(1e-6 / 32.0, 0.25);
    assert!(coarse / fine >= 8.0, "{coarse} / {fine}");
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decreasing_while_positive(d in 3usize..7, p in 1.2f64..8.0, ell in 0.2f64..3.0) {
            let m = euclid(d, 15.0, 301);
            let s = solve_radial(&m, p, ell, 15.0, 1e-9).unwrap();
            prop_assert!((s.u().values()[0] - ell).abs() < 1e-12);
            prop_assert!(s.u_prime().values()[0] == 0.0);
            for (&r, (&u, &du)) in s.grid().nodes().iter().zip(s.u().values().iter().zip(s.u_prime().values())) {
                if r > 0.0 && u > 0.0 {
                    prop_assert!(du < 0.0, "u' = {} at r = {}", du, r);
                }
            }
            if let Status::CrossedZeroAt(r) = s.status() {
                prop_assert!(s.u().at(1, r) < 0.0);
            }
        }

        #[test]
        fn energy_never_increases(p in 1.5f64..7.0, ell in 0.3f64..2.0) {
            let m = euclid(3, 10.0, 201);
            let s = solve_radial(&m, p, ell, 10.0, 1e-10).unwrap();
            let e: Vec<f64> = s.grid().nodes().iter().map(|&r| energy(&s, r).unwrap()).collect();
            prop_assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }
}
