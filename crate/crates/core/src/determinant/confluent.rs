//! Divided-difference evaluation of the root expansion, stable when roots
//! nearly coincide.
//!
//! With `rho(z) = z^m - c_1 z^(m-1) - ... - c_m` and initial values
//! `e_1..e_m`, partial fractions give `e_n = (z^(n-1) M(z))[z_1, ..., z_m]`,
//! the divided difference over the roots of `rho`, for a polynomial `M` of
//! degree below `m` fixed by the initial values. Since `D_n` and `E_n` differ
//! only in the last diagonal entry, `d_n = e_n + (r - p) e_(n-1)`.
//!
//! A divided difference of `f` over `z_1..z_m` is the top-right entry of
//! `f(J)`, where `J` is upper bidiagonal with the nodes on the diagonal and
//! ones above it. `J^k` is formed by repeated squaring with rescaling, so the
//! cost grows like `log n` and coincident nodes need no special treatment.

use num_complex::Complex64 as C;

use crate::logscalar::LogScalar;
use crate::matrix::PentaParams;

use super::recurrence::{e_coefficients, initial_conditions};
use super::roots::{CharacteristicRoots, RootKind};

type Mat = Vec<Vec<C>>;

fn zero(m: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); m]; m]
}

fn identity(m: usize) -> Mat {
    let mut a = zero(m);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    a
}

/// Product of upper-triangular matrices.
fn mul(a: &Mat, b: &Mat) -> Mat {
    let m = a.len();
    let mut out = zero(m);
    for i in 0..m {
        for j in i..m {
            out[i][j] = (i..=j).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Divides by the largest entry modulus and returns its log.
fn renormalize(a: &mut Mat) -> f64 {
    let mx = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if mx == 0.0 || !mx.is_finite() {
        return 0.0;
    }
    for z in a.iter_mut().flatten() {
        *z /= mx;
    }
    mx.ln()
}

/// `t^k` as `(matrix, log_scale)` with the true power `exp(log_scale) * matrix`.
fn power(t: &Mat, mut k: u64) -> (Mat, f64) {
    let m = t.len();
    let mut result = identity(m);
    let mut log_result = 0.0;
    let mut base = t.clone();
    let mut log_base = renormalize(&mut base);
    while k > 0 {
        if k & 1 == 1 {
            result = mul(&result, &base);
            log_result += log_base + renormalize(&mut result);
        }
        k >>= 1;
        if k > 0 {
            base = mul(&base, &base);
            log_base = 2.0 * log_base + renormalize(&mut base);
        }
    }
    (result, log_result)
}

/// Recurrence coefficients `c_1..c_m` and initial values `e_1..e_m` for the
/// reduced order that matches the root kind.
fn reduced_system(params: &PentaParams, kind: RootKind) -> (Vec<f64>, Vec<f64>) {
    let (p, q, r, _) = params.parts();
    let init = initial_conditions(params);
    match kind {
        RootKind::GeneralQS => (e_coefficients(params).to_vec(), init.to_vec()),
        RootKind::QZero => (e_coefficients(params)[..4].to_vec(), init[..4].to_vec()),
        RootKind::SZero => (vec![p, -q * q], vec![r, p * r - q * q]),
        RootKind::Diagonal => (vec![p], vec![r]),
    }
}

/// Outcome of one evaluation before the reality check.
pub(crate) struct Raw {
    pub re: f64,
    pub im: f64,
    /// Sum of the moduli of the products forming the entry.
    pub mass: f64,
    pub log_scale: f64,
}

impl Raw {
    pub fn finish(self) -> Option<LogScalar> {
        if !(self.re.is_finite() && self.im.is_finite() && self.mass.is_finite()) {
            return None;
        }
        if self.im.is_nan() || self.im.abs() > 1e-8 * self.re.abs() + 1e-12 * self.mass {
            return None;
        }
        if self.re.abs() <= 1e-12 * self.mass {
            return Some(LogScalar::ZERO);
        }
        Some(LogScalar::from_f64(self.re).scale_log(self.log_scale))
    }
}

/// `e_n` (`corner = p`) or `d_n` (`corner = r`) as
/// `(z^(n-2) (z + corner - p) M(z))[roots]`; `n >= 2`.
pub(crate) fn evaluate(params: &PentaParams, roots: &CharacteristicRoots, n: usize, corner: f64) -> Raw {
    debug_assert!(n >= 2);
    let (c, e) = reduced_system(params, roots.kind);
    let m = c.len();
    let nodes = &roots.roots[..m];

    // P(x) = E(x) (1 - sum c_i x^i) truncated; M(z) = z^(m-1) P(1/z).
    let pk: Vec<f64> = (0..m)
        .map(|k| e[k] - (1..=k).map(|i| c[i - 1] * e[k - i]).sum::<f64>())
        .collect();

    let cmax = nodes.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let scale = if cmax > 0.0 { cmax } else { 1.0 };
    let mut t = zero(m);
    for i in 0..m {
        t[i][i] = nodes[i] / scale;
        if i + 1 < m {
            t[i][i + 1] = C::new(1.0 / scale, 0.0);
        }
    }
    // B = M(J) (J + (corner - p) I), with J = scale * t.
    let j_mat: Mat = t
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect();
    let mut mj = zero(m);
    for &coef in &pk {
        mj = mul(&mj, &j_mat);
        for (i, row) in mj.iter_mut().enumerate() {
            row[i] += coef;
        }
    }
    let mut shifted = j_mat.clone();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] += corner - params.p();
    }
    let b = mul(&mj, &shifted);

    let (tp, log_tp) = power(&t, n as u64 - 2);
    let mut val = C::new(0.0, 0.0);
    let mut mass = 0.0;
    for k in 0..m {
        let prod = b[0][k] * tp[k][m - 1];
        val += prod;
        mass += prod.norm();
    }
    Raw {
        re: val.re,
        im: val.im,
        mass,
        log_scale: log_tp + (n as f64 - 2.0) * scale.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::characteristic_roots;
    use crate::matrix::{build_d, build_e};
    use crate::oracle::oracle_det;

    fn pp(p: f64, q: f64, r: f64, s: f64) -> PentaParams {
        PentaParams::new(p, q, r, s).unwrap()
    }

    #[test]
    fn matches_oracle_generic_and_degenerate() {
        let pts = [
            pp(5.0, -1.0, 1.0, 2.0),
            pp(8.0, 24f64.sqrt(), 1.3, 1.0),
            pp(6.0, 4.0, 0.9, 1.0),
            pp(3.0, 0.0, 0.5, 1.0),
            pp(2.0, 0.0, 0.5, 1.0),
            pp(3.0, 1.0, 0.5, 0.0),
            pp(2.0, 1.0, 0.7, 0.0),
            pp(3.0, 1.0, 0.7, 1e-10),
        ];
        for pr in pts {
            let roots = characteristic_roots(&pr);
            for n in 3..=16 {
                let e = evaluate(&pr, &roots, n, pr.p()).finish().unwrap();
                let d = evaluate(&pr, &roots, n, pr.r()).finish().unwrap();
                let eo = oracle_det(&build_e(&pr, n).unwrap());
                let dob = oracle_det(&build_d(&pr, n).unwrap());
                assert!(e.rel_value_diff(eo) < 1e-9, "{pr:?} n={n}: {e} vs {eo}");
                assert!(d.rel_value_diff(dob) < 1e-9, "{pr:?} n={n}: {d} vs {dob}");
            }
        }
    }

    #[test]
    fn huge_power() {
        let pr = pp(5.0, -1.0, 1.0, 2.0);
        let roots = characteristic_roots(&pr);
        let d = evaluate(&pr, &roots, 5_000_000, pr.r()).finish().unwrap();
        let (m, e) = d.mantissa_exponent10().unwrap();
        assert_eq!(e, 2_926_158);
        assert!((m - 1.65193).abs() < 1e-4, "{m}");
    }
}
