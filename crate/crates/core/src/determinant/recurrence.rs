//! Linear recurrences for `e_n = det(E_n)` and `d_n = det(D_n)`.

use crate::logscalar::LogScalar;
use crate::matrix::{build_d, PentaParams};
use crate::oracle::oracle_det;

use super::{q_is_zero, DetResult, Method};

/// Rescale the running window at least this often.
const RESCALE_PERIOD: usize = 64;

/// The principal minors `e_1..e_5` of `E_n`, evaluated from their expanded
/// polynomials.
pub fn initial_conditions(params: &PentaParams) -> [f64; 5] {
    let (p, q, r, s) = params.parts();
    let q2 = q * q;
    let e1 = r;
    let e2 = p * r - q2;
    let e3 = p * p * r - q2 * (r - 2.0 * s) - p * (q2 + s * s);
    let e4 = p.powi(3) * r - p * p * (q2 + s * s) - p * (2.0 * q2 * (r - s) + r * s * s)
        + q2 * q2
        + 2.0 * q2 * s * (r - s)
        + s.powi(4);
    let e5 = p.powi(4) * r + q2 * q2 * (r - 4.0 * s) + r * s.powi(4)
        + 2.0 * q2 * s * s * (s - r)
        - p.powi(3) * (q2 + s * s)
        + p * (2.0 * q2 * q2 + 4.0 * q2 * r * s + s.powi(4))
        + p * p * (-2.0 * r * s * s + q2 * (2.0 * s - 3.0 * r));
    [e1, e2, e3, e4, e5]
}

/// Coefficients of `e_{n-1}, ..., e_{n-5}` in the recurrence for `e_n`.
pub(crate) fn e_coefficients(params: &PentaParams) -> [f64; 5] {
    let (p, q, _, s) = params.parts();
    if q_is_zero(params) {
        [p, 0.0, -p * s * s, s.powi(4), 0.0]
    } else {
        let t = p * s - q * q;
        [p - s, t, -s * t, s.powi(3) * (s - p), s.powi(5)]
    }
}

/// Coefficients of `e_{n-1}, ..., e_{n-k}` in the expression of `d_n`.
pub(crate) fn d_coefficients(params: &PentaParams) -> Vec<f64> {
    let (p, q, r, s) = params.parts();
    if q_is_zero(params) {
        vec![r, 0.0, -p * s * s, s.powi(4)]
    } else {
        let t = p * s - q * q;
        vec![r - s, t, -s * t, s.powi(3) * (s - p), s.powi(5)]
    }
}

/// Divides every parameter by `max(|p|, |q|, |r|, |s|)`. `e_n` and `d_n` are
/// homogeneous of degree `n`, so the log of that factor times `n` restores
/// the original value.
fn normalized(params: &PentaParams) -> Option<(PentaParams, f64)> {
    let (p, q, r, s) = params.parts();
    let c = p.abs().max(q.abs()).max(r.abs()).max(s.abs());
    if c == 0.0 {
        return None;
    }
    let pn = PentaParams::new(p / c, q / c, r / c, s / c).expect("finite after scaling");
    Some((pn, c.ln()))
}

/// `e_{m-4}, ..., e_m` scaled by `exp(-log_scale)`, with `e_0 = 1` and
/// `e_j = 0` for `j < 0`.
fn e_window(params: &PentaParams, m: usize) -> ([f64; 5], f64) {
    let init = initial_conditions(params);
    let entry = |j: isize| match j {
        0 => 1.0,
        1..=5 => init[j as usize - 1],
        _ => 0.0,
    };
    if m <= 5 {
        let w = std::array::from_fn(|i| entry(m as isize - 4 + i as isize));
        return (w, 0.0);
    }
    let c = e_coefficients(params);
    let mut w = init;
    let mut log_scale = 0.0;
    for step in 6..=m {
        let next = c[0] * w[4] + c[1] * w[3] + c[2] * w[2] + c[3] * w[1] + c[4] * w[0];
        w.rotate_left(1);
        w[4] = next;
        let mx = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mx == 0.0 {
            // Five consecutive zeros: the sequence stays zero.
            return ([0.0; 5], 0.0);
        }
        if step % RESCALE_PERIOD == 0 || !(1e-100..=1e100).contains(&mx) {
            for v in w.iter_mut() {
                *v /= mx;
            }
            log_scale += mx.ln();
        }
    }
    (w, log_scale)
}

/// `e_n` by forward recurrence, `n >= 1`.
pub fn det_e_recurrence(params: &PentaParams, n: usize) -> DetResult {
    assert!(n >= 1, "E_n needs n >= 1");
    let value = match normalized(params) {
        None => LogScalar::ZERO,
        Some((pn, lc)) => {
            let (w, log_scale) = e_window(&pn, n);
            LogScalar::from_f64(w[4]).scale_log(log_scale + n as f64 * lc)
        }
    };
    DetResult {
        value,
        method: Method::Recurrence,
        case_id: None,
    }
}

/// `d_n` by one application of the `d`-recurrence on top of the `e`
/// sequence; orders `3..=5` use the dense oracle. Results smaller than
/// `1e-12` times the sum of the absolute contributions are reported as zero.
pub fn det_d_recurrence(params: &PentaParams, n: usize) -> DetResult {
    assert!(n >= 3, "D_n needs n >= 3");
    let qzero = q_is_zero(params);
    let first = if qzero { 5 } else { 6 };
    let value = if n < first {
        oracle_det(&build_d(params, n).expect("n >= 3"))
    } else {
        match normalized(params) {
            None => LogScalar::ZERO,
            Some((pn, lc)) => {
                let a = d_coefficients(&pn);
                let (w, log_scale) = e_window(&pn, n - 1);
                let mut acc = 0.0;
                let mut mass = 0.0;
                for (i, ai) in a.iter().enumerate() {
                    let t = ai * w[4 - i];
                    acc += t;
                    mass += t.abs();
                }
                if acc.abs() <= 1e-12 * mass {
                    LogScalar::ZERO
                } else {
                    LogScalar::from_f64(acc).scale_log(log_scale + n as f64 * lc)
                }
            }
        }
    };
    DetResult {
        value,
        method: Method::Recurrence,
        case_id: None,
    }
}
