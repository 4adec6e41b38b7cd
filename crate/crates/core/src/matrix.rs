//! The matrix family `D_n` and its leading sub-matrix family `E_n`.
//!
//! `D_n` is the symmetric pentadiagonal matrix with diagonals
//! `(s, q, p, q, s)` whose two corner diagonal entries are replaced by `r`:
//!
//! ```text
//!  r q s 0 . . 0
//!  q p q s     .
//!  s q p q s   .
//!  0 . . . . . 0
//!  .   s q p q s
//!  .     s q p q
//!  0 . . 0 s q r
//! ```
//!
//! `E_n` is the same matrix with only the top-left corner perturbed.
//!
//! Indexing: documentation speaks of 1-based entries `(i, j)` with
//! `1 <= i, j <= n`; every Rust API is 0-based, so entry `(i, j)` in the
//! docs is `get(i - 1, j - 1)`.

use crate::error::{Error, Result};

/// The four scalars that define `D_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PentaParams {
    p: f64,
    q: f64,
    r: f64,
    s: f64,
}

impl PentaParams {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        for (name, value) in [("p", p), ("q", q), ("r", r), ("s", s)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        Ok(PentaParams { p, q, r, s })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `(p, q, r, s)`.
    pub fn parts(&self) -> (f64, f64, f64, f64) {
        (self.p, self.q, self.r, self.s)
    }

    /// `max(1, |p|, |q|, |r|, |s|)`, the reference magnitude for absolute
    /// tolerances on the parameters.
    pub fn scale(&self) -> f64 {
        [self.p, self.q, self.r, self.s]
            .iter()
            .fold(1.0f64, |m, v| m.max(v.abs()))
    }

    /// True when `r = p - s` within `1e-12 * max(1, |p|, |s|)`.
    pub fn has_r_eq_p_minus_s(&self) -> bool {
        let tol = 1e-12 * 1f64.max(self.p.abs()).max(self.s.abs());
        (self.r - (self.p - self.s)).abs() <= tol
    }
}

/// Dense row-major symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseSymMatrix {
    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle and
    /// mirrored, so the result is symmetric by construction.
    pub fn from_upper<F: Fn(usize, usize) -> f64>(n: usize, f: F) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        DenseSymMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_upper(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] -= shift;
        }
        out
    }
}

fn band_entry(params: &PentaParams, i: usize, j: usize) -> f64 {
    match j.abs_diff(i) {
        0 => params.p,
        1 => params.q,
        2 => params.s,
        _ => 0.0,
    }
}

/// Dense `D_n`. At `n = 3` the `(1, 3)` entry is `s`, and both `(1, 1)` and
/// `(3, 3)` are `r`.
pub fn build_d(params: &PentaParams, n: usize) -> Result<DenseSymMatrix> {
    if n < 3 {
        return Err(Error::OrderTooSmall {
            min: 3,
            got: n as u64,
        });
    }
    Ok(DenseSymMatrix::from_upper(n, |i, j| {
        if i == j && (i == 0 || i == n - 1) {
            params.r
        } else {
            band_entry(params, i, j)
        }
    }))
}

/// Dense `E_n`; `E_1 = [r]`.
pub fn build_e(params: &PentaParams, n: usize) -> Result<DenseSymMatrix> {
    if n < 1 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    Ok(DenseSymMatrix::from_upper(n, |i, j| {
        if i == 0 && j == 0 {
            params.r
        } else {
            band_entry(params, i, j)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indefinite() -> PentaParams {
        PentaParams::new(5.0, -1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            PentaParams::new(f64::NAN, 0.0, 0.0, 0.0),
            Err(Error::NonFinite { name: "p", .. })
        ));
        assert!(PentaParams::new(0.0, 0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn example_matrix_rows() {
        let d = build_d(&indefinite(), 5).unwrap();
        assert_eq!(d.row(0), &[1.0, -1.0, 2.0, 0.0, 0.0]);
        assert_eq!(d.row(1), &[-1.0, 5.0, -1.0, 2.0, 0.0]);
        assert_eq!(d.row(2), &[2.0, -1.0, 5.0, -1.0, 2.0]);
        assert_eq!(d.row(3), &[0.0, 2.0, -1.0, 5.0, -1.0]);
        assert_eq!(d.row(4), &[0.0, 0.0, 2.0, -1.0, 1.0]);
    }

    #[test]
    fn identity_case() {
        let id = PentaParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(build_d(&id, 4).unwrap(), DenseSymMatrix::identity(4));
    }

    #[test]
    fn small_orders() {
        let pr = PentaParams::new(2.0, 3.0, 7.0, 5.0).unwrap();
        let d3 = build_d(&pr, 3).unwrap();
        assert_eq!(d3.row(0), &[7.0, 3.0, 5.0]);
        assert_eq!(d3.row(1), &[3.0, 2.0, 3.0]);
        assert_eq!(d3.row(2), &[5.0, 3.0, 7.0]);
        let d4 = build_d(&pr, 4).unwrap();
        assert_eq!(d4.row(3), &[0.0, 5.0, 3.0, 7.0]);
        assert!(matches!(
            build_d(&pr, 2),
            Err(Error::OrderTooSmall { min: 3, got: 2 })
        ));
    }

    #[test]
    fn e_family() {
        let pr = PentaParams::new(2.0, 1.0, 3.0, 0.0).unwrap();
        assert_eq!(build_e(&pr, 1).unwrap().entries(), &[3.0]);
        let e2 = build_e(&pr, 2).unwrap();
        assert_eq!(e2.entries(), &[3.0, 1.0, 1.0, 2.0]);
        assert!(build_e(&pr, 0).is_err());
        let e5 = build_e(&indefinite(), 5).unwrap();
        assert_eq!(e5.get(0, 0), 1.0);
        assert_eq!(e5.get(4, 4), 5.0);
    }

    #[test]
    fn band_structure() {
        let d = build_d(&indefinite(), 9).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(d.get(i, j), d.get(j, i));
                if i.abs_diff(j) > 2 {
                    assert_eq!(d.get(i, j), 0.0);
                }
            }
        }
    }
}
