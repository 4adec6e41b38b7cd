//! The MA(1) process `X_k = e_k + phi e_(k-1)` and the normalized cumulant
//! generating function of `(U_n, V_n) = (sum X_k^2, sum X_k X_(k-1))`.
//!
//! `E exp(l1 U_n + l2 V_n) = det(D_n)^(-1/2)` for the pentadiagonal `D_n`
//! with parameters [`induced_params`], so `L_n = -log det(D_n) / (2n)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::definiteness::eigenvalues_closed_form;
use crate::determinant::{csqrt, det_d_closed};
use crate::error::{Error, Result};
use crate::matrix::PentaParams;
use crate::quadrature::{log_integral_closed, LogCosParams};
use crate::rng::NormalStream;

/// Eigenvalues at or below `1e-12 * scale` disqualify positive definiteness.
pub const PD_TOL: f64 = 1e-12;

/// Distance to the `D0` curve below which the limit is reported infinite.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Grid resolution in `t` for the distance to the `D0` curve.
const CURVE_GRID: usize = 10_000;

/// Largest exponent `l1 U + l2 V` accepted by [`empirical_cumulant`].
const EXP_LIMIT: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ma1Point {
    pub phi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Ma1Point {
    pub fn new(phi: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, value) in [("phi", phi), ("lambda1", lambda1), ("lambda2", lambda2)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        check_phi(phi)?;
        Ok(Ma1Point {
            phi,
            lambda1,
            lambda2,
        })
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::NonInvertible { phi })
    }
}

/// `L_n` or the limit `L`; `Infinite` is the `+inf` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CumulantValue {
    Finite(f64),
    Infinite,
}

impl CumulantValue {
    pub fn is_finite(self) -> bool {
        matches!(self, CumulantValue::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            CumulantValue::Finite(v) => Some(v),
            CumulantValue::Infinite => None,
        }
    }
}

/// `(p, q, r, s)` of `D_n`; `r = p - s` holds identically.
pub fn induced_params(pt: &Ma1Point) -> Result<PentaParams> {
    check_phi(pt.phi)?;
    let Ma1Point {
        phi,
        lambda1: l1,
        lambda2: l2,
    } = *pt;
    let h0 = 1.0 + phi * phi;
    PentaParams::new(
        1.0 - 2.0 * l1 * h0 - 2.0 * l2 * phi,
        -2.0 * l1 * phi - l2 * h0,
        1.0 - 2.0 * l1 * h0 - l2 * phi,
        -l2 * phi,
    )
}

/// `h(w) = 1 + phi^2 + 2 phi cos w`.
pub fn spectral_density(phi: f64, omega: f64) -> f64 {
    1.0 + phi * phi + 2.0 * phi * omega.cos()
}

/// Fourier coefficients of the spectral density.
pub fn autocovariance(phi: f64, k: i64) -> f64 {
    match k.unsigned_abs() {
        0 => 1.0 + phi * phi,
        1 => phi,
        _ => 0.0,
    }
}

/// Smallest eigenvalue of `D_n` for `r = p - s`, `n >= 3`. The eigenvalues
/// are a quadratic in `c_k = cos(k pi / (n + 1))`, so only the two ends of the
/// spectrum and the nodes next to the vertex need to be inspected.
pub fn min_eigenvalue(params: &PentaParams, n: usize) -> f64 {
    let (p, q, _, s) = params.parts();
    let nf = n as f64;
    let alpha = |k: usize| {
        let c = (k as f64 * PI / (nf + 1.0)).cos();
        4.0 * s * c * c + 2.0 * q * c + p - 2.0 * s
    };
    let mut m = alpha(1).min(alpha(n));
    if s > 0.0 {
        let vertex = (-q / (4.0 * s)).clamp(-1.0, 1.0);
        let k = (nf + 1.0) * vertex.acos() / PI;
        for cand in [k.floor(), k.ceil()] {
            let cand = (cand as usize).clamp(1, n);
            m = m.min(alpha(cand));
        }
    }
    m
}

/// `L_n = -log det(D_n) / (2n)` when `D_n` is positive definite, `n >= 2`.
pub fn l_n(pt: &Ma1Point, n: usize) -> Result<CumulantValue> {
    if n < 2 {
        return Err(Error::OrderTooSmall {
            min: 2,
            got: n as u64,
        });
    }
    let params = induced_params(pt)?;
    let tol = PD_TOL * params.scale();
    let nf = n as f64;
    if n == 2 {
        let (_, q, r, _) = params.parts();
        if r - q.abs() <= tol {
            return Ok(CumulantValue::Infinite);
        }
        return Ok(CumulantValue::Finite(-((r - q) * (r + q)).ln() / (2.0 * nf)));
    }
    if min_eigenvalue(&params, n) <= tol {
        return Ok(CumulantValue::Infinite);
    }
    let det = det_d_closed(&params, n)?.value;
    if det.sign() != 1 {
        return Err(Error::Consistency(format!(
            "determinant {det} of a positive definite matrix at n = {n}"
        )));
    }
    Ok(CumulantValue::Finite(-det.log_abs() / (2.0 * nf)))
}

/// `L_n` from the product of the explicit eigenvalues, `n >= 3`.
pub fn l_n_eigen(pt: &Ma1Point, n: usize) -> Result<CumulantValue> {
    let params = induced_params(pt)?;
    let eig = eigenvalues_closed_form(&params, n)?;
    let tol = PD_TOL * params.scale();
    if eig.iter().any(|&a| a <= tol) {
        return Ok(CumulantValue::Infinite);
    }
    let log_det: f64 = eig.iter().map(|a| a.ln()).sum();
    Ok(CumulantValue::Finite(-log_det / (2.0 * n as f64)))
}

/// `(1 + 4 l2 phi) / (2 (1 + phi^2)) <= l1 <= 1 / (2 (1 + phi^2))` and
/// `(2 l1 phi + l2 (1 + phi^2))^2 <= -4 l2 phi (1 - 2 l1 (1 + phi^2))`.
///
/// In terms of the induced parameters: `2s <= p <= 6s` and
/// `q^2 <= 4s (p - 2s)`.
pub fn in_domain_d1(pt: &Ma1Point) -> bool {
    let Ma1Point {
        phi,
        lambda1: l1,
        lambda2: l2,
    } = *pt;
    let h0 = 1.0 + phi * phi;
    let q = 2.0 * l1 * phi + l2 * h0;
    (1.0 + 4.0 * l2 * phi) / (2.0 * h0) <= l1
        && l1 <= 1.0 / (2.0 * h0)
        && q * q <= -4.0 * l2 * phi * (1.0 - 2.0 * l1 * h0)
}

/// `(-1 + 2 l1 (1 + phi^2)) / 4 < l2 phi <= (1 - 2 l1 (1 + phi^2)) / 4` and
/// `l1 - 1 / (2 (1 - phi)^2) <= l2 <= 1 / (2 (1 + phi)^2) - l1`.
///
/// In terms of the induced parameters: `-p/2 <= s < p/6` and
/// `|q| <= (p + 2s) / 2`.
pub fn in_domain_d2(pt: &Ma1Point) -> bool {
    let Ma1Point {
        phi,
        lambda1: l1,
        lambda2: l2,
    } = *pt;
    let h0 = 1.0 + phi * phi;
    let lp = l2 * phi;
    (-1.0 + 2.0 * l1 * h0) / 4.0 < lp
        && lp <= (1.0 - 2.0 * l1 * h0) / 4.0
        && l1 - 1.0 / (2.0 * (1.0 - phi).powi(2)) <= l2
        && l2 <= 1.0 / (2.0 * (1.0 + phi).powi(2)) - l1
}

pub fn in_domain(pt: &Ma1Point) -> bool {
    in_domain_d1(pt) || in_domain_d2(pt)
}

/// Point `t` of the `D0` curve, `t in [-1, 1]`; `t = cos(k pi / (n + 1))`
/// gives the parameters where `D_n` has the null eigenvalue `alpha_{n,k}`.
pub fn d0_curve(phi: f64, t: f64) -> (f64, f64) {
    let h = 1.0 + phi * phi + 2.0 * phi * t;
    (
        (1.0 + phi * phi + 4.0 * phi * t) / (2.0 * h * h),
        -phi / (h * h),
    )
}

/// The `n` points of `D0` for order `n`, `k = 1..=n`.
pub fn d0_points(phi: f64, n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|k| d0_curve(phi, (k as f64 * PI / (n as f64 + 1.0)).cos()))
        .collect()
}

/// Euclidean distance from `(l1, l2)` to the `D0` curve: a uniform grid in
/// `t` followed by golden-section refinement around the best node.
pub fn distance_to_d0(pt: &Ma1Point) -> f64 {
    let dist2 = |t: f64| {
        let (a, b) = d0_curve(pt.phi, t);
        (a - pt.lambda1).powi(2) + (b - pt.lambda2).powi(2)
    };
    let step = 2.0 / CURVE_GRID as f64;
    let t_at = |i: usize| (-1.0 + i as f64 * step).min(1.0);
    let best = (0..=CURVE_GRID)
        .min_by(|&i, &j| dist2(t_at(i)).total_cmp(&dist2(t_at(j))))
        .expect("non-empty grid");
    let mut lo = t_at(best.saturating_sub(1));
    let mut hi = t_at((best + 1).min(CURVE_GRID));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist2(x1), dist2(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist2(x2);
        }
    }
    let refined = f1.min(f2).min(dist2(t_at(best)));
    refined.sqrt()
}

pub fn near_closure_d0(pt: &Ma1Point, tol: f64) -> bool {
    distance_to_d0(pt) <= tol
}

/// `A, B = (q -+ sqrt(q^2 - 4s (p - 2s))) / (p - 2s)` for the induced
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitTerms {
    pub a: C,
    pub b: C,
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

/// `None` when `p = 2s` (within `1e-14 * max(1, |q|, |s|)`), where `A` and
/// `B` are undefined.
pub fn limit_terms(pt: &Ma1Point) -> Result<Option<LimitTerms>> {
    let params = induced_params(pt)?;
    let (p, q, _, s) = params.parts();
    let m = p - 2.0 * s;
    if m.abs() <= 1e-14 * 1f64.max(q.abs()).max(s.abs()) {
        return Ok(None);
    }
    let d = csqrt(C::new(q * q - 4.0 * s * m, 0.0));
    let qc = C::new(q, 0.0);
    Ok(Some(LimitTerms {
        a: (qc - d) / m,
        b: (qc + d) / m,
        p,
        q,
        s,
    }))
}

/// `L = lim L_n = -log[(p - 2s)(1 + sqrt(1 - A^2))(1 + sqrt(1 - B^2)) / 4] / 2`
/// on `D_lambda` away from the closure of `D0`, `+inf` elsewhere.
pub fn limit_l(pt: &Ma1Point) -> Result<CumulantValue> {
    if !in_domain(pt) || near_closure_d0(pt, CLOSURE_TOL) {
        return Ok(CumulantValue::Infinite);
    }
    let Some(t) = limit_terms(pt)? else {
        // p = 2s: the integrand is log(4s cos^2 w).
        let params = induced_params(pt)?;
        let lc = LogCosParams::new(0.0, 0.0, 4.0 * params.s())?;
        return Ok(CumulantValue::Finite(-log_integral_closed(&lc)? / (2.0 * PI)));
    };
    let one = C::new(1.0, 0.0);
    let f = |g: C| one + csqrt(one - g * g);
    let val = (f(t.a) * f(t.b) * ((t.p - 2.0 * t.s) / 4.0)).ln();
    if val.im.is_nan() || val.im.abs() > 1e-10 {
        return Err(Error::Consistency(format!(
            "limit has imaginary part {:e}",
            val.im
        )));
    }
    Ok(CumulantValue::Finite(-0.5 * val.re))
}

/// `(U_n, V_n)` for one path of stream `stream`, built from the variates
/// `e_0..e_n` of [`NormalStream`].
pub fn simulate_ma1_stream(phi: f64, n: usize, seed: u64, stream: u64) -> Result<(f64, f64)> {
    check_phi(phi)?;
    if n < 2 {
        return Err(Error::OrderTooSmall {
            min: 2,
            got: n as u64,
        });
    }
    let rng = NormalStream::new(seed, stream);
    let mut prev_eps = rng.normal(0);
    let mut prev_x = 0.0;
    let (mut u, mut v) = (0.0, 0.0);
    for k in 1..=n {
        let eps = rng.normal(k as u64);
        let x = eps + phi * prev_eps;
        u += x * x;
        if k >= 2 {
            v += x * prev_x;
        }
        prev_eps = eps;
        prev_x = x;
    }
    Ok((u, v))
}

/// `(U_n, V_n)` for the first stream of `seed`.
pub fn simulate_ma1(phi: f64, n: usize, seed: u64) -> Result<(f64, f64)> {
    simulate_ma1_stream(phi, n, seed, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCumulant {
    pub value: f64,
    pub std_error: f64,
    pub replications: usize,
}

/// `(1/n) log mean exp(l1 U_n + l2 V_n)` over `replications` independent
/// paths (replication `j` uses stream `j`). The standard error comes from
/// 50 batch means and the delta method.
pub fn empirical_cumulant(
    pt: &Ma1Point,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<EmpiricalCumulant> {
    if replications == 0 {
        return Err(Error::InvalidArgument(
            "replications must be positive".to_string(),
        ));
    }
    let mut x = Vec::with_capacity(replications);
    for j in 0..replications {
        let (u, v) = simulate_ma1_stream(pt.phi, n, seed, j as u64)?;
        let e = pt.lambda1 * u + pt.lambda2 * v;
        if e.is_nan() || e > EXP_LIMIT {
            return Err(Error::ExpOverflow { exponent: e });
        }
        x.push(e);
    }
    let shift = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = x.iter().map(|e| (e - shift).exp()).collect();
    let mean = w.iter().sum::<f64>() / replications as f64;
    let nf = n as f64;
    let value = (mean.ln() + shift) / nf;

    let batches = replications.min(50);
    let size = replications / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| w[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let std_error = if batches > 1 {
        let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
        (var / batches as f64).sqrt() / (bm * nf)
    } else {
        f64::INFINITY
    };
    Ok(EmpiricalCumulant {
        value,
        std_error,
        replications,
    })
}
