//! The integral `int_0^pi log(a + b cos w + c cos^2 w) dw` in closed form,
//! and an adaptive Gauss-Kronrod integrator used to check it.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::determinant::csqrt;
use crate::error::{Error, Result};

/// `a` counts as zero below `1e-14 * max(1, |b|, |c|)`.
pub const BRANCH_TOL: f64 = 1e-14;

/// Slack allowed on `min_{|x| <= 1} (a + b x + c x^2) >= 0`.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;

/// Largest imaginary part tolerated in the log of the closed form.
pub const IMAG_TOL: f64 = 1e-10;

pub const MAX_DEPTH: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCosParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LogCosParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, value) in [("a", a), ("b", b), ("c", c)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        let pr = LogCosParams { a, b, c };
        let m = pr.min_on_unit_interval();
        if m < -HYPOTHESIS_SLACK * pr.scale() {
            return Err(Error::Hypothesis(format!(
                "a + b x + c x^2 reaches {m:e} on [-1, 1]"
            )));
        }
        Ok(pr)
    }

    fn scale(&self) -> f64 {
        1f64.max(self.a.abs()).max(self.b.abs()).max(self.c.abs())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a + self.b * x + self.c * x * x
    }

    /// Minimum of the quadratic over `[-1, 1]`: the endpoints and, for
    /// `c > 0`, the clamped vertex.
    pub fn min_on_unit_interval(&self) -> f64 {
        let mut m = self.eval(-1.0).min(self.eval(1.0));
        if self.c > 0.0 {
            let v = (-self.b / (2.0 * self.c)).clamp(-1.0, 1.0);
            m = m.min(self.eval(v));
        }
        m
    }

    /// `(gamma_1, gamma_2) = (b -+ sqrt(b^2 - 4ac)) / (2a)`, so that
    /// `a + b x + c x^2 = a (1 + gamma_1 x) (1 + gamma_2 x)`. Requires `a != 0`.
    pub fn gammas(&self) -> (C, C) {
        let d = csqrt(C::new(self.b * self.b - 4.0 * self.a * self.c, 0.0));
        let b = C::new(self.b, 0.0);
        let two_a = 2.0 * self.a;
        ((b - d) / two_a, (b + d) / two_a)
    }

    fn a_is_zero(&self) -> bool {
        self.a.abs() <= BRANCH_TOL * 1f64.max(self.b.abs()).max(self.c.abs())
    }

    fn b_is_zero(&self) -> bool {
        self.b.abs() <= BRANCH_TOL * 1f64.max(self.a.abs()).max(self.c.abs())
    }
}

/// `int_0^pi log(a + b cos w + c cos^2 w) dw`.
///
/// For `a > 0` this is `pi log[a (1 + sqrt(1 - g1^2)) (1 + sqrt(1 - g2^2)) / 4]`
/// with principal square roots; for `a = b = 0` it is `pi log(c / 4)`.
pub fn log_integral_closed(pr: &LogCosParams) -> Result<f64> {
    if pr.a_is_zero() {
        if !pr.b_is_zero() {
            return Err(Error::Hypothesis(format!(
                "a = 0 requires b = 0, got b = {}",
                pr.b
            )));
        }
        if pr.c <= 0.0 {
            return Err(Error::Hypothesis(
                "integrand vanishes identically".to_string(),
            ));
        }
        return Ok(PI * (pr.c / 4.0).ln());
    }
    let (g1, g2) = pr.gammas();
    let one = C::new(1.0, 0.0);
    let f = |g: C| one + csqrt(one - g * g);
    let prod = f(g1) * f(g2) * (pr.a / 4.0);
    let val = prod.ln();
    if val.im.is_nan() || val.im.abs() > IMAG_TOL {
        return Err(Error::Consistency(format!(
            "log-cosine closed form has imaginary part {:e}",
            val.im
        )));
    }
    Ok(PI * val.re)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// G7-K15 on `[lo, hi]`: `(kronrod estimate, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let pair = f(c - x) + f(c + x);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive G7-K15 quadrature: the piece with the largest error estimate is
/// bisected until the summed estimate is below `tol`. Integrable endpoint or
/// interior log singularities are resolved by repeated bisection; a piece
/// split more than [`MAX_DEPTH`] times is a convergence failure.
pub fn quad_oracle<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let new_piece = |lo: f64, hi: f64, depth: u32| -> Result<Piece> {
        let (value, err) = gk15(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        Ok(Piece { lo, hi, value, err, depth })
    };
    let mut heap = BinaryHeap::new();
    heap.push(new_piece(lo, hi, 0)?);
    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        if total_err <= tol {
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        let worst = heap.pop().expect("at least one piece");
        if worst.depth >= MAX_DEPTH {
            return Err(Error::Quadrature(format!(
                "no convergence after depth {MAX_DEPTH}, error estimate {total_err:e}"
            )));
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(new_piece(worst.lo, mid, worst.depth + 1)?);
        heap.push(new_piece(mid, worst.hi, worst.depth + 1)?);
    }
}

/// The log-cosine integral by [`quad_oracle`].
pub fn log_integral_quadrature(pr: &LogCosParams, tol: f64) -> Result<f64> {
    let pr = *pr;
    quad_oracle(move |w: f64| pr.eval(w.cos()).ln(), 0.0, PI, tol)
}
