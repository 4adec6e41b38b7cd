use std::f64::consts::PI;

use pentadiag::ma1::{
    autocovariance, d0_points, empirical_cumulant, in_domain, induced_params, l_n, limit_l,
    limit_terms, near_closure_d0, simulate_ma1, spectral_density, CumulantValue, Ma1Point,
};
use pentadiag::quadrature::{log_integral_closed, log_integral_quadrature, quad_oracle, LogCosParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(phi: f64, l1: f64, l2: f64) -> Ma1Point {
    Ma1Point::new(phi, l1, l2).unwrap()
}

/// Random `(phi, lambda)` inside `D_lambda`, away from the `D0` curve.
fn interior_point(rng: &mut ChaCha8Rng) -> Ma1Point {
    loop {
        let x = pt(
            rng.gen_range(-0.9..0.9),
            rng.gen_range(-2.0..0.5),
            rng.gen_range(-2.0..2.0),
        );
        if in_domain(&x) && !near_closure_d0(&x, 1e-3) {
            return x;
        }
    }
}

#[test]
fn induced_r_equals_p_minus_s() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let x = pt(rng.gen_range(-0.99..0.99), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (p, _, r, s) = induced_params(&x).unwrap().parts();
        assert!((r - (p - s)).abs() <= 1e-15 * p.abs().max(1.0) * 4.0, "{x:?}");
    }
}

#[test]
fn autocovariance_is_fourier_coefficient() {
    for phi in [0.0, 1.0 / 3.0, -0.8] {
        for k in 0..4i64 {
            let v = quad_oracle(
                |w: f64| (k as f64 * w).cos() * spectral_density(phi, w),
                -PI,
                PI,
                1e-13,
            )
            .unwrap()
                / (2.0 * PI);
            assert!((v - autocovariance(phi, k)).abs() < 1e-10, "phi={phi} k={k}: {v}");
        }
    }
    for i in 0..20 {
        let w = -PI + i as f64 * 0.3;
        assert_eq!(spectral_density(0.4, w), spectral_density(0.4, -w));
    }
}

#[test]
fn cumulant_convergence() {
    let x = pt(1.0 / 3.0, -1.0, -1.0);
    let lim = limit_l(&x).unwrap().value().unwrap();
    let gaps: Vec<f64> = [5, 10, 50, 100, 500]
        .iter()
        .map(|&n| (l_n(&x, n).unwrap().value().unwrap() - lim).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[4] < 1e-4);
}

#[test]
fn limit_matches_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let x = interior_point(&mut rng);
        let (p, q, _, s) = induced_params(&x).unwrap().parts();
        let direct = quad_oracle(
            |w: f64| (p - 2.0 * s + 2.0 * q * w.cos() + 4.0 * s * w.cos().powi(2)).ln(),
            -PI,
            PI,
            1e-12,
        )
        .unwrap()
            * (-1.0 / (4.0 * PI));
        let lim = limit_l(&x).unwrap().value().unwrap();
        assert!((lim - direct).abs() < 1e-8, "{x:?}: {lim} vs {direct}");
    }
}

#[test]
fn limit_terms_are_the_gammas() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = interior_point(&mut rng);
        let t = limit_terms(&x).unwrap().unwrap();
        let lc = LogCosParams::new(t.p - 2.0 * t.s, 2.0 * t.q, 4.0 * t.s).unwrap();
        let (g1, g2) = lc.gammas();
        assert!((g1 - t.a).norm() < 1e-12 && (g2 - t.b).norm() < 1e-12);
    }
}

#[test]
fn lemma_matches_quadrature_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < 50 {
        let (a, b, c) = (rng.gen_range(0.0..4.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(lc) = LogCosParams::new(a, b, c) else {
            continue;
        };
        if lc.min_on_unit_interval() < 1e-3 {
            continue;
        }
        let closed = log_integral_closed(&lc).unwrap();
        let quad = log_integral_quadrature(&lc, 1e-11).unwrap();
        assert!((closed - quad).abs() < 1e-8, "{lc:?}: {closed} vs {quad}");
        done += 1;
    }
}

#[test]
fn boundary_integrands() {
    // (1 + cos w)^2 vanishes at the endpoint w = pi; the half-angle form
    // avoids the cancellation in 1 + cos w there.
    let lc = LogCosParams::new(1.0, 2.0, 1.0).unwrap();
    let closed = log_integral_closed(&lc).unwrap();
    let quad = quad_oracle(|w: f64| 2.0 * (2.0 * (w / 2.0).cos().powi(2)).ln(), 0.0, PI, 1e-11).unwrap();
    assert!((closed - quad).abs() < 1e-8, "{closed} vs {quad}");
    let lc = LogCosParams::new(0.0, 0.0, 1.0).unwrap();
    assert!((log_integral_closed(&lc).unwrap() + 2.0 * PI * 2f64.ln()).abs() < 1e-14);
}

#[test]
fn d0_scatter_lies_on_curve() {
    for (l1, l2) in d0_points(1.0 / 3.0, 200) {
        let x = pt(1.0 / 3.0, l1, l2);
        assert!(near_closure_d0(&x, 1e-10));
        assert_eq!(limit_l(&x).unwrap(), CumulantValue::Infinite);
    }
}

#[test]
fn simulation_moments() {
    let n = 2000;
    let seeds = 100u64;
    let (mut u0, mut u1, mut v1) = (0.0, 0.0, 0.0);
    for seed in 0..seeds {
        u0 += simulate_ma1(0.0, n, seed).unwrap().0 / n as f64;
        let (u, v) = simulate_ma1(1.0 / 3.0, n, seed).unwrap();
        u1 += u / n as f64;
        v1 += v / n as f64;
    }
    let k = seeds as f64;
    let nf = n as f64;
    assert!((u0 / k - 1.0).abs() < 5.0 / nf.sqrt());
    // Standard deviations of U/n and V/n are below 2/sqrt(n) here; the mean
    // over seeds divides them by 10.
    let band = 3.0 * 2.0 / nf.sqrt() / k.sqrt();
    assert!((u1 / k - 10.0 / 9.0).abs() < band, "{}", u1 / k);
    assert!((v1 / k - (nf - 1.0) / nf / 3.0).abs() < band, "{}", v1 / k);
}

#[test]
fn empirical_first_order() {
    let x = pt(1.0 / 3.0, -1e-3, 1e-3);
    let n = 50;
    let emp = empirical_cumulant(&x, n, 20_000, 7).unwrap();
    let nf = n as f64;
    let first = -1e-3 * 10.0 / 9.0 + 1e-3 * (nf - 1.0) / nf / 3.0;
    assert!((emp.value - first).abs() < 4.0 * emp.std_error + 1e-5, "{emp:?} vs {first}");
}

#[test]
fn empirical_overflow_is_reported() {
    let x = pt(0.0, 5.0, 0.0);
    assert!(empirical_cumulant(&x, 200, 10, 1).is_err());
}
