//! Roots of the characteristic polynomial of the `e_n` recurrence.

use num_complex::Complex64 as C;

use crate::matrix::PentaParams;

use super::{q_is_zero, s_is_zero};
use crate::determinant::recurrence::e_coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Five roots `mu_1..mu_5` with `mu_5 = s`.
    GeneralQS,
    /// `q = 0`: four roots `nu_1..nu_4` with `nu_1 = -s`, `nu_2 = s`.
    QZero,
    /// `s = 0`: two roots `xi_1, xi_2`.
    SZero,
    /// `q = s = 0`: the single root `p`.
    Diagonal,
}

/// Intermediate square roots; each is present only where it is defined for
/// the parameter point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RootAux {
    pub alpha: Option<C>,
    pub beta1: Option<C>,
    pub beta2: Option<C>,
    pub gamma: Option<C>,
    pub delta: Option<C>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRoots {
    pub kind: RootKind,
    pub roots: Vec<C>,
    pub aux: RootAux,
}

/// Principal square root with a signed-zero imaginary part treated as `+0`,
/// so negative reals always map to the positive imaginary axis.
pub(crate) fn csqrt(z: C) -> C {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    C::new(z.re, im).sqrt()
}

pub(crate) fn rsqrt(x: f64) -> C {
    csqrt(C::new(x, 0.0))
}

pub fn characteristic_roots(params: &PentaParams) -> CharacteristicRoots {
    let (p, q, _, s) = params.parts();
    let qz = q_is_zero(params);
    let sz = s_is_zero(params);
    let mut aux = RootAux::default();
    let (kind, roots) = match (qz, sz) {
        (true, true) => (RootKind::Diagonal, vec![C::new(p, 0.0)]),
        (true, false) => {
            let d = rsqrt(p * p - 4.0 * s * s);
            let c = C::new(p, 0.0);
            (
                RootKind::QZero,
                vec![C::new(-s, 0.0), C::new(s, 0.0), (c - d) / 2.0, (c + d) / 2.0],
            )
        }
        (false, true) => {
            let d = rsqrt(p * p - 4.0 * q * q);
            let c = C::new(p, 0.0);
            (RootKind::SZero, vec![(c - d) / 2.0, (c + d) / 2.0])
        }
        (false, false) => {
            let alpha = rsqrt((p + 2.0 * s).powi(2) - 4.0 * q * q);
            let m = p - 2.0 * s;
            let b1 = csqrt(2.0 * m * (p + 2.0 * s - alpha) - 4.0 * q * q);
            let b2 = csqrt(2.0 * m * (p + 2.0 * s + alpha) - 4.0 * q * q);
            aux.alpha = Some(alpha);
            aux.beta1 = Some(b1);
            aux.beta2 = Some(b2);
            aux.gamma = Some(rsqrt((p - 6.0 * s) * (p - 2.0 * s)));
            aux.delta = Some(rsqrt((p - 6.0 * s) * (p + 2.0 * s)));
            let m = C::new(m, 0.0);
            (
                RootKind::GeneralQS,
                vec![
                    (m - alpha - b1) / 4.0,
                    (m - alpha + b1) / 4.0,
                    (m + alpha - b2) / 4.0,
                    (m + alpha + b2) / 4.0,
                    C::new(s, 0.0),
                ],
            )
        }
    };
    CharacteristicRoots { kind, roots, aux }
}

/// Coefficients of the monic characteristic polynomial, highest degree first.
fn char_poly(params: &PentaParams, kind: RootKind) -> Vec<f64> {
    let (p, q, _, _) = params.parts();
    match kind {
        RootKind::Diagonal => vec![1.0, -p],
        RootKind::SZero => vec![1.0, -p, q * q],
        RootKind::QZero | RootKind::GeneralQS => {
            let c = e_coefficients(params);
            let order = if kind == RootKind::QZero { 4 } else { 5 };
            std::iter::once(1.0)
                .chain(c[..order].iter().map(|v| -v))
                .collect()
        }
    }
}

impl CharacteristicRoots {
    /// Largest relative residual `|rho(z)| / sum |c_i| |z|^i` over the roots.
    pub fn max_residual(&self, params: &PentaParams) -> f64 {
        let coeffs = char_poly(params, self.kind);
        self.roots
            .iter()
            .map(|&z| {
                let mut val = C::new(0.0, 0.0);
                let mut mag = 0.0;
                for &c in &coeffs {
                    val = val * z + c;
                    mag = mag * z.norm() + c.abs();
                }
                if mag == 0.0 {
                    0.0
                } else {
                    val.norm() / mag
                }
            })
            .fold(0.0, f64::max)
    }
}
