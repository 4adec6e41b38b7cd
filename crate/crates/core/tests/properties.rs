mod common;

use common::{pp, sample_case};
use pentadiag::definiteness::{classify_region, eigenvalues_closed_form, g_poly};
use pentadiag::determinant::{
    case_id, det_d_closed, det_d_eigenproduct, det_d_recurrence, det_e_closed, CaseId,
};
use pentadiag::logscalar::LogScalar;
use pentadiag::matrix::{build_d, PentaParams};
use pentadiag::oracle::{exact_det, oracle_det, oracle_eigenvalues, oracle_inertia, rational_to_log};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn three_way_agreement_every_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for case in CaseId::ALL {
        for _ in 0..60 {
            let pr = sample_case(&mut rng, case);
            assert_eq!(case_id(&pr), case, "{pr:?}");
            let n = rng.gen_range(3..=40);
            let c = det_d_closed(&pr, n).unwrap().value;
            let r = det_d_recurrence(&pr, n).value;
            let o = oracle_det(&build_d(&pr, n).unwrap());
            let e1 = c.rel_log_diff(o);
            let e2 = r.rel_log_diff(o);
            assert!(e1 < 1e-8 && e2 < 1e-8, "{case} {pr:?} n={n}: closed {c}, rec {r}, oracle {o}");
            worst = worst.max(e1).max(e2);
        }
    }
    eprintln!("worst relative log error {worst:e}");
}

/// Points on each degenerate manifold, moved off it along a ray.
#[test]
fn continuity_across_case_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let degenerate = CaseId::ALL.into_iter().filter(|c| *c != CaseId::GEN_DISTINCT);
    for case in degenerate {
        for _ in 0..8 {
            let base = sample_case(&mut rng, case);
            let (p, q, r, s) = base.parts();
            let (dq, ds) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for eps in [1e-3, 1e-5, 1e-7, 1e-8, 2e-9, 1e-10, 1e-12] {
                let pr = pp(p, q + eps * dq, r, s + eps * ds);
                for n in [5, 12, 25, 40] {
                    let c = det_d_closed(&pr, n).unwrap().value;
                    let o = det_d_recurrence(&pr, n).value;
                    let d = c.rel_value_diff(o);
                    assert!(
                        d < 1e-6,
                        "{case} eps={eps} {pr:?} n={n}: closed {c}, recurrence {o}"
                    );
                }
            }
        }
    }
}

#[test]
fn e_closed_satisfies_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..80 {
        let pr = sample_case(&mut rng, CaseId::GEN_DISTINCT);
        let (p, q, _, s) = pr.parts();
        let t = p * s - q * q;
        let c = [p - s, t, -s * t, s.powi(3) * (s - p), s.powi(5)];
        let e: Vec<f64> = (1..=40)
            .map(|n| det_e_closed(&pr, n).unwrap().value.to_f64())
            .collect();
        for n in 6..=40 {
            let terms: Vec<f64> = (0..5).map(|i| c[i] * e[n - 2 - i]).collect();
            let mass: f64 = terms.iter().map(|x| x.abs()).sum();
            let res = (e[n - 1] - terms.iter().sum::<f64>()).abs();
            assert!(res <= 1e-8 * mass.max(e[n - 1].abs()), "{pr:?} n={n}: residual {res:e}");
        }
    }
}

#[test]
fn eigenproduct_matches_closed_on_manifold() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let p = rng.gen_range(-3.0..3.0);
        let s = rng.gen_range(-2.0..2.0);
        let pr = pp(p, rng.gen_range(-2.0..2.0), p - s, s);
        let n = rng.gen_range(3..=60);
        let a = det_d_eigenproduct(&pr, n).unwrap().value;
        let b = det_d_closed(&pr, n).unwrap().value;
        assert!(a.rel_log_diff(b) < 1e-8, "{pr:?} n={n}: {a} vs {b}");
    }
}

#[test]
fn oracle_matches_exact_cofactors() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..60 {
        let half = |rng: &mut ChaCha8Rng| rng.gen_range(-8i32..=8) as f64 / 2.0;
        let pr = pp(half(&mut rng), half(&mut rng), half(&mut rng), half(&mut rng));
        let n = rng.gen_range(3..=10);
        let m = build_d(&pr, n).unwrap();
        let exact = rational_to_log(&exact_det(&m).unwrap());
        let float = oracle_det(&m);
        if exact.is_zero() {
            assert!(float.is_zero() || float.log_abs() < -20.0, "{pr:?} n={n}: {float}");
        } else {
            assert!(float.rel_log_diff(exact) < 1e-10, "{pr:?} n={n}: {float} vs {exact}");
        }
    }
}

#[test]
fn inertia_and_eigenvalue_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let pr = pp(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-2.0..2.0),
        );
        let n = rng.gen_range(3..=10);
        let m = build_d(&pr, n).unwrap();
        let inertia = oracle_inertia(&m, 0.0);
        assert_eq!(inertia.order(), n);
        let eig = oracle_eigenvalues(&m, 1e-13);
        let top = eig[n - 1];
        let shifted = oracle_inertia(&m, top + 1.0);
        assert_eq!((shifted.n_pos, shifted.n_neg, shifted.n_zero), (0, n, 0));
        let prod = eig
            .iter()
            .fold(LogScalar::ONE, |acc, &x| acc * LogScalar::from_f64(x));
        let det = oracle_det(&m);
        if det.log_abs() > -10.0 {
            assert!(prod.rel_log_diff(det) < 1e-8, "{pr:?} n={n}: {prod} vs {det}");
        }
    }
}

fn admissible_point(rng: &mut ChaCha8Rng) -> PentaParams {
    loop {
        let p = rng.gen_range(0.0..4.0);
        let s = rng.gen_range(-p / 2.0..p / 2.0);
        let q = rng.gen_range(-p..p);
        let r = p - s + rng.gen_range(0.0..1.0);
        let pr = pp(p, q, r, s);
        if classify_region(&pr).unwrap().is_admissible() {
            return pr;
        }
    }
}

#[test]
fn admissible_points_have_no_negative_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..500 {
        let pr = admissible_point(&mut rng);
        let n = rng.gen_range(3..=30);
        let inertia = oracle_inertia(&build_d(&pr, n).unwrap(), 0.0);
        assert_eq!(inertia.n_neg, 0, "{pr:?} n={n}: {inertia:?}");
    }
}

#[test]
fn closed_form_spectrum_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..40 {
        let p = rng.gen_range(-3.0..3.0);
        let s = rng.gen_range(-2.0..2.0);
        let pr = pp(p, rng.gen_range(-2.0..2.0), p - s, s);
        let n = rng.gen_range(3..=30);
        let mut a = eigenvalues_closed_form(&pr, n).unwrap();
        a.sort_by(f64::total_cmp);
        let b = oracle_eigenvalues(&build_d(&pr, n).unwrap(), 1e-12);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8, "{pr:?} n={n}: {x} vs {y}");
        }
    }
}

#[test]
fn spectra_nest_when_orders_divide() {
    let pr = pp(1.0 / 3.0, -10.0 / 9.0, 2.0 / 3.0, -1.0 / 3.0);
    for (n, m) in [(5, 11), (3, 7), (2 + 3, 17), (4, 9)] {
        let big = eigenvalues_closed_form(&pr, m).unwrap();
        for a in eigenvalues_closed_form(&pr, n).unwrap() {
            assert!(big.iter().any(|b| (a - b).abs() < 1e-12), "n={n} m={m}: {a}");
        }
    }
}

#[test]
fn eigenvalues_are_g_at_twice_cosines() {
    let pr = pp(2.5, -0.7, 2.5 - 0.4, 0.4);
    for n in 3..=50 {
        let eig = eigenvalues_closed_form(&pr, n).unwrap();
        for (k, a) in eig.iter().enumerate() {
            let x = 2.0 * ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            assert!((a - g_poly(&pr, x)).abs() < 1e-12);
        }
    }
}

#[test]
fn negative_count_grows_with_n() {
    let pr = pp(5.0, -1.0, 1.0, 2.0);
    for n in 5..=20 {
        let want = if n <= 8 { 1 } else { 2 };
        assert_eq!(oracle_inertia(&build_d(&pr, n).unwrap(), 0.0).n_neg, want, "n={n}");
    }
}
