//! Evaluation of the closed forms in log-polar arithmetic.

use num_complex::Complex64 as C;

use crate::definiteness::{alpha_nk, null_tol};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::matrix::PentaParams;

use super::coefficients::{coefficient_set, Gates, Term};
use super::confluent;
use super::recurrence::{det_d_recurrence, det_e_recurrence};
use super::roots::{characteristic_roots, RootKind};
use super::{DetResult, Method};

/// Points closer than this to a degenerate manifold (but not on it) are
/// re-checked against the recurrence in debug builds.
const NEAR_DEGENERATE: f64 = 1e-6;
const CROSS_CHECK_MAX_N: usize = 256;
const CROSS_CHECK_TOL: f64 = 1e-4;

/// The explicit sum is abandoned when the moduli of its terms add up to more
/// than this multiple of the result. Near a degenerate case the explicit
/// coefficients are large and carry errors that this cancellation amplifies.
const CANCELLATION_LIMIT: f64 = 10.0;

/// A point assigned to a degenerate case whose gating residual exceeds this
/// is off the manifold by more than rounding. The explicit coefficients treat
/// the nearly coincident roots as equal, an error of order `sqrt(residual)`,
/// so such points use the divided-difference form.
const ON_MANIFOLD: f64 = 1e-13;

/// One real contribution `exp(log_mag) * (re + i im)` with `|re + i im| <= 1`.
struct Part {
    log_mag: f64,
    re: f64,
    im: f64,
}

/// `sum_j Q_j z_j^e`, with `Q_j = sum_(i, a) a * kappa_j(n - i) * z_j^(k - i)`
/// and `e = n - k`. Returns the value and the log of the summed magnitudes.
fn evaluate(terms: &[Term], n: usize, shifts: &[(usize, f64)], k: usize) -> Result<Explicit> {
    let e = n as i64 - k as i64;
    let ef = e as f64;

    let mut merged: Vec<(C, C)> = Vec::with_capacity(terms.len());
    for t in terms {
        let q: C = shifts
            .iter()
            .map(|&(i, a)| a * t.kappa.eval(n as f64 - i as f64) * t.root.powi((k - i) as i32))
            .sum();
        match merged.iter_mut().find(|(z, _)| *z == t.root) {
            Some((_, acc)) => *acc += q,
            None => merged.push((t.root, q)),
        }
    }

    let mut parts: Vec<Part> = Vec::with_capacity(merged.len());
    let mut residual: Vec<f64> = Vec::new();
    let mut used = vec![false; merged.len()];
    for i in 0..merged.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (z, q) = merged[i];
        if q == C::new(0.0, 0.0) {
            continue;
        }
        let zn = z.norm();
        if z.im.abs() <= 1e-13 * zn {
            let x = z.re;
            if x == 0.0 {
                match e {
                    0 => parts.push(Part {
                        log_mag: q.norm().ln(),
                        re: q.re / q.norm(),
                        im: q.im / q.norm(),
                    }),
                    e if e > 0 => {}
                    _ => return Err(Error::Consistency("zero root with negative power".into())),
                }
                continue;
            }
            let sign = if x < 0.0 && e.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            parts.push(Part {
                log_mag: q.norm().ln() + ef * x.abs().ln(),
                re: sign * q.re / q.norm(),
                im: sign * q.im / q.norm(),
            });
            continue;
        }
        let partner = (i + 1..merged.len()).find(|&j| {
            !used[j] && (merged[j].0 - z.conj()).norm() <= 1e-9 * zn.max(1e-300)
        });
        match partner {
            Some(j) => {
                used[j] = true;
                let (zj, qj) = merged[j];
                let zb = (z + zj.conj()) / 2.0;
                let qb = (q + qj.conj()) / 2.0;
                let diff = (q - qj.conj()) / 2.0;
                let log_pow = ef * zb.norm().ln();
                if qb != C::new(0.0, 0.0) {
                    parts.push(Part {
                        log_mag: std::f64::consts::LN_2 + qb.norm().ln() + log_pow,
                        re: (qb.arg() + ef * zb.arg()).cos(),
                        im: 0.0,
                    });
                }
                if diff != C::new(0.0, 0.0) {
                    residual.push(std::f64::consts::LN_2 + diff.norm().ln() + log_pow);
                }
            }
            None => {
                let phase = q.arg() + ef * z.arg();
                parts.push(Part {
                    log_mag: q.norm().ln() + ef * zn.ln(),
                    re: phase.cos(),
                    im: phase.sin(),
                });
            }
        }
    }

    let tmax = parts
        .iter()
        .map(|p| p.log_mag)
        .chain(residual.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    if tmax == f64::NEG_INFINITY {
        return Ok(Explicit::zero());
    }
    let (mut re, mut im, mut mass, mut res) = (0.0, 0.0, 0.0, 0.0);
    for p in &parts {
        let w = (p.log_mag - tmax).exp();
        re += w * p.re;
        im += w * p.im;
        mass += w;
    }
    for &l in &residual {
        let w = (l - tmax).exp();
        res += w;
        mass += w;
    }
    Ok(Explicit {
        re,
        imag: im.abs() + res,
        mass,
        tmax,
    })
}

/// Raw output of the explicit-coefficient sum, scaled by `exp(-tmax)`.
struct Explicit {
    re: f64,
    imag: f64,
    mass: f64,
    tmax: f64,
}

impl Explicit {
    fn zero() -> Self {
        Explicit {
            re: 0.0,
            imag: 0.0,
            mass: 0.0,
            tmax: f64::NEG_INFINITY,
        }
    }

    fn is_ill_conditioned(&self) -> bool {
        let finite = self.re.is_finite() && self.imag.is_finite() && self.mass.is_finite();
        !finite || self.mass > CANCELLATION_LIMIT * self.re.abs()
    }

    fn log_mass(&self) -> f64 {
        self.mass.ln() + self.tmax
    }

    fn finish(&self, n: usize) -> Result<LogScalar> {
        if self.mass == 0.0 {
            return Ok(LogScalar::ZERO);
        }
        if self.imag.is_nan() || self.imag > 1e-8 * self.re.abs() + 1e-12 * self.mass {
            return Err(Error::Consistency(format!(
                "closed form is not real: imaginary part {:e} against real part {:e} (n = {n})",
                self.imag,
                self.re.abs()
            )));
        }
        if self.re.abs() <= 1e-12 * self.mass {
            return Ok(LogScalar::ZERO);
        }
        Ok(LogScalar::from_f64(self.re).scale_log(self.tmax))
    }
}

/// Explicit and divided-difference values may differ by this much (relative
/// to the larger value, or to `1e-13` of the summed term magnitudes) before
/// the explicit one is rejected.
const AGREEMENT_TOL: f64 = 1e-9;

/// The explicit sum when it is well conditioned, the point is on its case
/// manifold and it agrees with the divided-difference form over the same
/// roots; otherwise the divided-difference value.
fn resolve(
    explicit: Explicit,
    n: usize,
    off_manifold: bool,
    fallback: impl FnOnce() -> Option<LogScalar>,
) -> Result<(LogScalar, f64)> {
    let alt = fallback();
    let log_mass = |v: LogScalar| {
        if explicit.mass.is_finite() && explicit.mass > 0.0 {
            explicit.log_mass()
        } else {
            v.log_abs()
        }
    };
    if let Some(a) = alt {
        if off_manifold || explicit.is_ill_conditioned() {
            return Ok((a, log_mass(a)));
        }
        return match explicit.finish(n) {
            Ok(v) if agrees(v, a, explicit.log_mass() + 1e-13f64.ln(), AGREEMENT_TOL) => {
                Ok((v, explicit.log_mass()))
            }
            _ => Ok((a, log_mass(a))),
        };
    }
    let v = explicit.finish(n)?;
    Ok((v, explicit.log_mass()))
}

/// `|a - b| <= tol * max(|a|, |b|, exp(floor_log))`.
fn agrees(a: LogScalar, b: LogScalar, floor_log: f64, tol: f64) -> bool {
    let diff = LogScalar::sum([a, -b]);
    if diff.is_zero() {
        return true;
    }
    let reference = a.log_abs().max(b.log_abs()).max(floor_log);
    diff.log_abs() <= reference + tol.ln()
}

fn cross_check(
    params: &PentaParams,
    n: usize,
    value: LogScalar,
    log_mass: f64,
    recurrence: impl Fn() -> LogScalar,
) -> Result<()> {
    if !cfg!(debug_assertions) || n > CROSS_CHECK_MAX_N {
        return Ok(());
    }
    if Gates::new(params).nearest_ungated(params) >= NEAR_DEGENERATE {
        return Ok(());
    }
    let rec = recurrence();
    if agrees(value, rec, log_mass + 1e-8f64.ln(), CROSS_CHECK_TOL) {
        Ok(())
    } else {
        Err(Error::Consistency(format!(
            "closed form {value} disagrees with recurrence {rec} near a degenerate case (n = {n}, {params:?})"
        )))
    }
}

/// `e_n` from the closed form, `n >= 1`.
pub fn det_e_closed(params: &PentaParams, n: usize) -> Result<DetResult> {
    if n < 1 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let roots = characteristic_roots(params);
    let cs = coefficient_set(params, &roots);
    let value = if roots.kind == RootKind::Diagonal {
        LogScalar::from_f64(params.r()) * LogScalar::from_f64(params.p()).powi(n as u64 - 1)
    } else {
        let explicit = evaluate(&cs.terms, n, &[(0, 1.0)], 0)?;
        let off = Gates::new(params).snapped_offset(cs.case_id) > ON_MANIFOLD;
        let (v, log_mass) = resolve(explicit, n, off, || {
            if n == 1 {
                Some(LogScalar::from_f64(params.r()))
            } else {
                confluent::evaluate(params, &roots, n, params.p()).finish()
            }
        })?;
        cross_check(params, n, v, log_mass, || det_e_recurrence(params, n).value)?;
        v
    };
    Ok(DetResult {
        value,
        method: Method::ClosedForm,
        case_id: Some(cs.case_id),
    })
}

/// The coefficients `a_1..a_k` of `d_n = sum_i a_i e_{n-i}` for each root kind.
fn d_shifts(params: &PentaParams, kind: RootKind) -> Vec<(usize, f64)> {
    let (p, q, r, s) = params.parts();
    let a = match kind {
        RootKind::GeneralQS => {
            let t = p * s - q * q;
            vec![r - s, t, -s * t, s.powi(3) * (s - p), s.powi(5)]
        }
        RootKind::QZero => vec![r, 0.0, -p * s * s, s.powi(4)],
        RootKind::SZero => vec![r, -q * q],
        RootKind::Diagonal => vec![r],
    };
    a.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
}

/// `d_n` from the closed form, `n >= 3`. The cost does not grow with `n`.
pub fn det_d_closed(params: &PentaParams, n: usize) -> Result<DetResult> {
    if n < 3 {
        return Err(Error::OrderTooSmall {
            min: 3,
            got: n as u64,
        });
    }
    let roots = characteristic_roots(params);
    let cs = coefficient_set(params, &roots);
    let value = if roots.kind == RootKind::Diagonal {
        LogScalar::from_f64(params.r()).powi(2) * LogScalar::from_f64(params.p()).powi(n as u64 - 2)
    } else {
        let shifts = d_shifts(params, roots.kind);
        let explicit = evaluate(&cs.terms, n, &shifts, shifts.len())?;
        let off = Gates::new(params).snapped_offset(cs.case_id) > ON_MANIFOLD;
        let (v, log_mass) = resolve(explicit, n, off, || {
            confluent::evaluate(params, &roots, n, params.r()).finish()
        })?;
        cross_check(params, n, v, log_mass, || det_d_recurrence(params, n).value)?;
        v
    };
    Ok(DetResult {
        value,
        method: Method::ClosedForm,
        case_id: Some(cs.case_id),
    })
}

/// `d_n` as the product of the explicit eigenvalues; requires `r = p - s`.
/// Eigenvalues within `1e-10 * max(1, |p|, |q|, |s|)` of zero make the
/// product zero.
pub fn det_d_eigenproduct(params: &PentaParams, n: usize) -> Result<DetResult> {
    if !params.has_r_eq_p_minus_s() {
        return Err(Error::RequiresRpEqualPMinusS {
            r: params.r(),
            p_minus_s: params.p() - params.s(),
        });
    }
    if n < 3 {
        return Err(Error::OrderTooSmall {
            min: 3,
            got: n as u64,
        });
    }
    let tol = null_tol(params);
    let mut sign = 1i8;
    let mut log_abs = 0.0;
    for k in 1..=n as u64 {
        let a = alpha_nk(params, n as u64, k);
        if a.abs() <= tol {
            sign = 0;
            break;
        }
        if a < 0.0 {
            sign = -sign;
        }
        log_abs += a.abs().ln();
    }
    Ok(DetResult {
        value: LogScalar::new(sign, log_abs),
        method: Method::EigenProduct,
        case_id: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::CaseId;

    fn pp(p: f64, q: f64, r: f64, s: f64) -> PentaParams {
        PentaParams::new(p, q, r, s).unwrap()
    }

    fn indefinite() -> PentaParams {
        pp(5.0, -1.0, 1.0, 2.0)
    }

    #[test]
    fn table_values() {
        let want = [(3, -13.0), (4, -9.0), (5, -40.0), (6, -63.0)];
        for (n, v) in want {
            let d = det_d_closed(&indefinite(), n).unwrap();
            assert!((d.value.to_f64() - v).abs() < 1e-9, "n={n}: {}", d.value);
            assert_eq!(d.case_id, Some(CaseId::GEN_DISTINCT));
        }
    }

    #[test]
    fn huge_order() {
        let d = det_d_closed(&indefinite(), 5_000_000).unwrap().value;
        let (m, e) = d.mantissa_exponent10().unwrap();
        assert_eq!(e, 2_926_158);
        assert!((m - 1.65193).abs() < 1e-5, "{m}");
    }

    #[test]
    fn e_closed_matches_recurrence() {
        for n in 1..=30 {
            let a = det_e_closed(&indefinite(), n).unwrap().value;
            let b = det_e_recurrence(&indefinite(), n).value;
            assert!(a.rel_value_diff(b) < 1e-8, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn diagonal() {
        let d = det_d_closed(&pp(3.0, 0.0, 2.0, 0.0), 7).unwrap().value;
        assert!((d.to_f64() - 972.0).abs() < 1e-9);
        let e = det_e_closed(&pp(3.0, 0.0, 2.0, 0.0), 1).unwrap().value;
        assert!((e.to_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_product() {
        let admissible = pp(35.0 / 9.0, 16.0 / 9.0, 32.0 / 9.0, 1.0 / 3.0);
        let a = det_d_eigenproduct(&admissible, 6).unwrap().value;
        let b = det_d_closed(&admissible, 6).unwrap().value;
        assert!(a.rel_value_diff(b) < 1e-9, "{a} vs {b}");
        let c = det_d_eigenproduct(&pp(2.5, 0.0, 2.5, 0.0), 9).unwrap().value;
        assert!((c.log_abs() - 9.0 * 2.5f64.ln()).abs() < 1e-12);
        let w = pp(4.0, -2.0 * 2f64.sqrt(), 3.0, 1.0);
        assert_eq!(det_d_eigenproduct(&w, 3).unwrap().value.sign(), 0);
        assert!(det_d_eigenproduct(&indefinite(), 5).is_err());
    }

    #[test]
    fn singular_closed_is_zero() {
        let w = pp(4.0, -2.0 * 2f64.sqrt(), 3.0, 1.0);
        assert!(det_d_closed(&w, 3).unwrap().value.is_zero());
        assert!(det_d_closed(&w, 7).unwrap().value.is_zero());
    }
}

