//! Shared helpers for the integration test targets.

#![allow(dead_code)]

use pentadiag::determinant::CaseId;
use pentadiag::matrix::PentaParams;
use rand::Rng;

pub fn pp(p: f64, q: f64, r: f64, s: f64) -> PentaParams {
    PentaParams::new(p, q, r, s).unwrap()
}

fn nonzero<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.gen_range(lo..hi);
        if x.abs() > 0.05 * (hi - lo) {
            return x;
        }
    }
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// A random parameter point that falls in `case`.
pub fn sample_case<R: Rng>(rng: &mut R, case: CaseId) -> PentaParams {
    let r = rng.gen_range(-3.0..3.0);
    match case {
        CaseId::GEN_DISTINCT => pp(
            rng.gen_range(-3.0..3.0),
            nonzero(rng, -3.0, 3.0),
            r,
            nonzero(rng, -2.0, 2.0),
        ),
        CaseId::Q2_4S_P_GT_6S | CaseId::Q2_4S_P_LT_6S => {
            let s = nonzero(rng, -1.5, 1.5);
            let gt = case == CaseId::Q2_4S_P_GT_6S;
            // Need 4 s (p - 2s) > 0 and the stated side of 6s.
            let p = match (s > 0.0, gt) {
                (true, true) => 6.0 * s + rng.gen_range(0.2..3.0),
                (true, false) => 2.0 * s + rng.gen_range(0.05..0.95) * 4.0 * s,
                (false, true) => 6.0 * s + rng.gen_range(0.05..0.95) * (-4.0 * s),
                (false, false) => 6.0 * s - rng.gen_range(0.2..3.0),
            };
            let q = sign(rng) * (4.0 * s * (p - 2.0 * s)).sqrt();
            pp(p, q, r, s)
        }
        CaseId::Q2_QUARTER_P_NE_6S => {
            let s = nonzero(rng, -1.5, 1.5);
            let mut p: f64 = rng.gen_range(-4.0..4.0);
            if (p - 6.0 * s).abs() < 0.2 || (p + 2.0 * s).abs() < 0.2 {
                p += 0.5;
            }
            pp(p, sign(rng) * (p + 2.0 * s) / 2.0, r, s)
        }
        CaseId::ALL_EQUAL_P_6S => {
            let s = nonzero(rng, -1.0, 1.0);
            pp(6.0 * s, sign(rng) * 4.0 * s, r, s)
        }
        CaseId::QZERO_GEN => {
            let s = nonzero(rng, -2.0, 2.0);
            let mut p: f64 = rng.gen_range(-4.0..4.0);
            if (p.abs() - 2.0 * s.abs()).abs() < 0.1 {
                p += 0.3;
            }
            pp(p, 0.0, r, s)
        }
        CaseId::QZERO_P_2S => {
            let s = nonzero(rng, -2.0, 2.0);
            pp(2.0 * s, 0.0, r, s)
        }
        CaseId::QZERO_P_NEG2S => {
            let s = nonzero(rng, -2.0, 2.0);
            pp(-2.0 * s, 0.0, r, s)
        }
        CaseId::SZERO_GEN => {
            let q = nonzero(rng, -2.0, 2.0);
            let mut p: f64 = rng.gen_range(-4.0..4.0);
            if (p.abs() - 2.0 * q.abs()).abs() < 0.1 {
                p += 0.3;
            }
            pp(p, q, r, 0.0)
        }
        CaseId::SZERO_P2_4Q2 => {
            let q = nonzero(rng, -2.0, 2.0);
            pp(sign(rng) * 2.0 * q, q, r, 0.0)
        }
        CaseId::DIAG => pp(rng.gen_range(-3.0..3.0), 0.0, r, 0.0),
    }
}
