//! Dense brute-force oracles. These know nothing about the band structure or
//! the closed forms and exist to check them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::logscalar::LogScalar;
use crate::matrix::DenseSymMatrix;

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn order(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }

    fn count(&mut self, value: f64, tol: f64) {
        if value.abs() <= tol {
            self.n_zero += 1;
        } else if value > 0.0 {
            self.n_pos += 1;
        } else {
            self.n_neg += 1;
        }
    }
}

/// Determinant by row-pivoted Gaussian elimination, accumulated in log space.
/// A pivot column whose largest candidate is below `1e-12 * ||m||_inf`
/// yields an exact zero.
pub fn oracle_det(m: &DenseSymMatrix) -> LogScalar {
    let n = m.order();
    if n == 0 {
        return LogScalar::ONE;
    }
    let tol = 1e-12 * m.inf_norm();
    let mut a = m.entries().to_vec();
    let mut sign: i8 = 1;
    let mut log_abs = 0.0;
    for k in 0..n {
        let (piv, big) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty column");
        if big <= tol || big == 0.0 {
            return LogScalar::ZERO;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            sign = -sign;
        }
        let d = a[k * n + k];
        if d < 0.0 {
            sign = -sign;
        }
        log_abs += d.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    LogScalar::new(sign, log_abs)
}

/// Inertia of `m - shift * I` by symmetric Bunch-Kaufman `LDL^T`
/// factorization with 1x1 and 2x2 pivots (Sylvester's law of inertia).
/// Pivots within `1e-10 * ||m - shift I||_inf` count as zero.
pub fn oracle_inertia(m: &DenseSymMatrix, shift: f64) -> Inertia {
    inertia_with_zero_band(m, shift, 1e-10)
}

fn inertia_with_zero_band(m: &DenseSymMatrix, shift: f64, band: f64) -> Inertia {
    let shifted = m.shifted(shift);
    let n = shifted.order();
    let tol = band * shifted.inf_norm();
    let mut a = shifted.entries().to_vec();
    let mut inertia = Inertia {
        n_pos: 0,
        n_neg: 0,
        n_zero: 0,
    };
    let alpha = (1.0 + 17f64.sqrt()) / 8.0;
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];

    let mut k = 0;
    while k < n {
        let akk = at(&a, k, k).abs();
        let (r, colmax) = (k + 1..n)
            .map(|i| (i, at(&a, i, k).abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((k, 0.0));

        if akk.max(colmax) <= tol {
            // Numerically zero column; drop it.
            inertia.n_zero += 1;
            k += 1;
            continue;
        }

        let two_by_two = if akk >= alpha * colmax {
            false
        } else {
            let rowmax = (k..n)
                .filter(|&j| j != r)
                .map(|j| at(&a, r, j).abs())
                .fold(0.0, f64::max);
            if akk * rowmax >= alpha * colmax * colmax {
                false
            } else if at(&a, r, r).abs() >= alpha * rowmax {
                symmetric_swap(&mut a, n, k, r);
                false
            } else {
                symmetric_swap(&mut a, n, k + 1, r);
                true
            }
        };

        if !two_by_two {
            let d = at(&a, k, k);
            inertia.count(d, tol);
            if d.abs() > tol {
                for i in k + 1..n {
                    let f = at(&a, i, k) / d;
                    if f == 0.0 {
                        continue;
                    }
                    for j in k + 1..n {
                        a[i * n + j] -= f * at(&a, k, j);
                    }
                }
            }
            k += 1;
        } else {
            let (e11, e12, e22) = (at(&a, k, k), at(&a, k, k + 1), at(&a, k + 1, k + 1));
            let mid = 0.5 * (e11 + e22);
            let rad = (0.25 * (e11 - e22).powi(2) + e12 * e12).sqrt();
            inertia.count(mid - rad, tol);
            inertia.count(mid + rad, tol);
            let det = e11 * e22 - e12 * e12;
            // Trailing update A -= C E^{-1} C^T with E^{-1} = [e22 -e12; -e12 e11] / det.
            for i in k + 2..n {
                let (ci1, ci2) = (at(&a, i, k), at(&a, i, k + 1));
                let w1 = (e22 * ci1 - e12 * ci2) / det;
                let w2 = (e11 * ci2 - e12 * ci1) / det;
                for j in k + 2..n {
                    a[i * n + j] -= w1 * at(&a, j, k) + w2 * at(&a, j, k + 1);
                }
            }
            k += 2;
        }
    }
    inertia
}

fn symmetric_swap(a: &mut [f64], n: usize, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..n {
        a.swap(i * n + c, j * n + c);
    }
    for r in 0..n {
        a.swap(r * n + i, r * n + j);
    }
}

/// All eigenvalues in ascending order, each located by bisection on
/// exact pivot-sign counts inside the Gershgorin interval and bracketed to
/// width at most `tol`.
pub fn oracle_eigenvalues(m: &DenseSymMatrix, tol: f64) -> Vec<f64> {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let n = m.order();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| m.get(i, j).abs())
            .sum();
        lo = lo.min(m.get(i, i) - radius);
        hi = hi.max(m.get(i, i) + radius);
    }
    let pad = tol + 1e-9 * (1f64).max(lo.abs()).max(hi.abs());
    lo -= pad;
    hi += pad;

    let below = |x: f64| inertia_with_zero_band(m, x, 0.0).n_neg;
    let mut out = Vec::with_capacity(n);
    let mut start = lo;
    for k in 0..n {
        let (mut a, mut b) = (start, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        out.push(value);
        start = a;
    }
    out
}

/// Exact determinant by Laplace expansion with memoization over column
/// subsets, in rational arithmetic on the exact binary values of the
/// entries. Restricted to `n <= 12` (4096 subsets).
pub fn exact_det(m: &DenseSymMatrix) -> Option<BigRational> {
    let n = m.order();
    if n > 12 {
        return None;
    }
    let entries: Vec<BigRational> = m
        .entries()
        .iter()
        .map(|&v| BigRational::from_float(v))
        .collect::<Option<_>>()?;
    let full = (1usize << n) - 1;
    let mut table = vec![BigRational::zero(); full + 1];
    table[0] = BigRational::one();
    // table[mask] = det of the last |mask| rows restricted to the columns in mask.
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = BigRational::zero();
        let mut position = 0;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let a = &entries[row * n + col];
            if !a.is_zero() {
                let minor = &table[mask & !(1 << col)];
                if !minor.is_zero() {
                    let term = a * minor;
                    if position % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
            position += 1;
        }
        table[mask] = acc;
    }
    Some(table[full].clone())
}

/// Converts an exact rational to a [`LogScalar`] without overflowing.
pub fn rational_to_log(x: &BigRational) -> LogScalar {
    if x.is_zero() {
        return LogScalar::ZERO;
    }
    let sign = if x.is_negative() { -1 } else { 1 };
    let log_abs = big_ln(&x.numer().abs()) - big_ln(&x.denom().abs());
    LogScalar::new(sign, log_abs)
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        let f: f64 = x.to_string().parse().expect("integer literal");
        return f.ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    let f: f64 = top.to_string().parse().expect("integer literal");
    f.ln() + shift as f64 * std::f64::consts::LN_2
}
