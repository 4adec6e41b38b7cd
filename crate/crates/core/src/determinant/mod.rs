//! Determinants of `E_n` and `D_n`.
//!
//! Three independent routes are provided: an `O(n)` linear recurrence, a
//! closed form whose cost does not depend on `n`, and, on the manifold
//! `r = p - s`, the product of the explicit eigenvalues. All of them report
//! a [`LogScalar`].
//!
//! The closed form writes `e_n = sum_j kappa_j(n) z_j^n` over the roots `z_j`
//! of the recurrence. `d_n` is then a fixed combination
//! `sum_i a_i e_{n-i}`, which gives `d_n = sum_j Q_j(n) z_j^(n-k)` with
//! `Q_j(n) = sum_i a_i kappa_j(n - i) z_j^(k - i)`. When `kappa_j` does not
//! depend on `n` this is `kappa_j f(z_j)` for the quartic (or lower) `f`
//! built from the `a_i`.

mod closed;
mod coefficients;
mod confluent;
mod recurrence;
mod roots;

use std::fmt;

pub use closed::{det_d_closed, det_d_eigenproduct, det_e_closed};
pub use coefficients::{case_id, coefficient_set, CaseId, CoefficientSet, NPoly, Term, CASE_TOL};
pub use recurrence::{det_d_recurrence, det_e_recurrence, initial_conditions};
pub use roots::{characteristic_roots, CharacteristicRoots, RootAux, RootKind};
pub(crate) use roots::csqrt;

use crate::logscalar::LogScalar;
use crate::matrix::PentaParams;

/// `q` and `s` below `1e-14 * max(1, |p|, |q|, |r|, |s|)` are treated as zero.
pub const ZERO_PARAM_TOL: f64 = 1e-14;

pub(crate) fn q_is_zero(params: &PentaParams) -> bool {
    params.q().abs() <= ZERO_PARAM_TOL * params.scale()
}

pub(crate) fn s_is_zero(params: &PentaParams) -> bool {
    params.s().abs() <= ZERO_PARAM_TOL * params.scale()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Recurrence,
    ClosedForm,
    EigenProduct,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed",
            Method::EigenProduct => "eigen",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    pub value: LogScalar,
    pub method: Method,
    pub case_id: Option<CaseId>,
}
