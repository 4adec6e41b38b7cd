//! Case dispatch and the coefficients `kappa_j` of `e_n = sum_j kappa_j z_j^n`.
//!
//! In degenerate cases some `kappa_j` grow polynomially with `n`; they are
//! stored as [`NPoly`] records so a single [`CoefficientSet`] serves every
//! order.

use std::fmt;

use num_complex::Complex64 as C;

use crate::matrix::PentaParams;

use super::roots::{csqrt, rsqrt, CharacteristicRoots, RootKind};

/// Relative tolerance on the equalities that select a degenerate case.
pub const CASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(non_camel_case_types)]
pub enum CaseId {
    GEN_DISTINCT,
    Q2_4S_P_GT_6S,
    Q2_4S_P_LT_6S,
    Q2_QUARTER_P_NE_6S,
    ALL_EQUAL_P_6S,
    QZERO_GEN,
    QZERO_P_2S,
    QZERO_P_NEG2S,
    SZERO_GEN,
    SZERO_P2_4Q2,
    DIAG,
}

impl CaseId {
    pub const ALL: [CaseId; 11] = [
        CaseId::GEN_DISTINCT,
        CaseId::Q2_4S_P_GT_6S,
        CaseId::Q2_4S_P_LT_6S,
        CaseId::Q2_QUARTER_P_NE_6S,
        CaseId::ALL_EQUAL_P_6S,
        CaseId::QZERO_GEN,
        CaseId::QZERO_P_2S,
        CaseId::QZERO_P_NEG2S,
        CaseId::SZERO_GEN,
        CaseId::SZERO_P2_4Q2,
        CaseId::DIAG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::GEN_DISTINCT => "GEN_DISTINCT",
            CaseId::Q2_4S_P_GT_6S => "Q2_4S_P_GT_6S",
            CaseId::Q2_4S_P_LT_6S => "Q2_4S_P_LT_6S",
            CaseId::Q2_QUARTER_P_NE_6S => "Q2_QUARTER_P_NE_6S",
            CaseId::ALL_EQUAL_P_6S => "ALL_EQUAL_P_6S",
            CaseId::QZERO_GEN => "QZERO_GEN",
            CaseId::QZERO_P_2S => "QZERO_P_2S",
            CaseId::QZERO_P_NEG2S => "QZERO_P_NEG2S",
            CaseId::SZERO_GEN => "SZERO_GEN",
            CaseId::SZERO_P2_4Q2 => "SZERO_P2_4Q2",
            CaseId::DIAG => "DIAG",
        }
    }

    pub fn root_kind(self) -> RootKind {
        match self {
            CaseId::GEN_DISTINCT
            | CaseId::Q2_4S_P_GT_6S
            | CaseId::Q2_4S_P_LT_6S
            | CaseId::Q2_QUARTER_P_NE_6S
            | CaseId::ALL_EQUAL_P_6S => RootKind::GeneralQS,
            CaseId::QZERO_GEN | CaseId::QZERO_P_2S | CaseId::QZERO_P_NEG2S => RootKind::QZero,
            CaseId::SZERO_GEN | CaseId::SZERO_P2_4Q2 => RootKind::SZero,
            CaseId::DIAG => RootKind::Diagonal,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Polynomial in `n` of degree at most 4 with complex coefficients,
/// `c[0] + c[1] n + ... + c[4] n^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NPoly {
    pub c: [C; 5],
}

impl NPoly {
    pub fn constant(x: C) -> Self {
        Self::monomial(0, x)
    }

    /// `x * n^k`.
    pub fn monomial(k: usize, x: C) -> Self {
        let mut c = [C::new(0.0, 0.0); 5];
        c[k] = x;
        NPoly { c }
    }

    pub fn degree(&self) -> usize {
        (0..5).rev().find(|&k| self.c[k] != C::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn eval(&self, n: f64) -> C {
        self.c.iter().rev().fold(C::new(0.0, 0.0), |acc, &a| acc * n + a)
    }
}

/// One summand `kappa(n) * root^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub root: C,
    pub kappa: NPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub case_id: CaseId,
    /// In the order `kappa_1, kappa_2, ...`; roots may repeat.
    pub terms: Vec<Term>,
}

impl CoefficientSet {
    /// `kappa_j` evaluated at order `n`.
    pub fn kappas_at(&self, n: f64) -> Vec<C> {
        self.terms.iter().map(|t| t.kappa.eval(n)).collect()
    }
}

/// Relative residuals of every gating equality at a parameter point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Gates {
    pub q2_4s: f64,
    pub q2_quarter: f64,
    pub p_6s: f64,
    pub p_2s: f64,
    pub p_neg2s: f64,
    pub p2_4q2: f64,
}

impl Gates {
    pub fn new(params: &PentaParams) -> Self {
        let (p, q, _, s) = params.parts();
        let sc = 1f64.max(p.abs()).max(q.abs()).max(s.abs());
        let sc2 = sc * sc;
        let q2 = q * q;
        Gates {
            q2_4s: (q2 - 4.0 * s * (p - 2.0 * s)).abs() / sc2,
            q2_quarter: (q2 - (p + 2.0 * s).powi(2) / 4.0).abs() / sc2,
            p_6s: (p - 6.0 * s).abs() / sc,
            p_2s: (p - 2.0 * s).abs() / sc,
            p_neg2s: (p + 2.0 * s).abs() / sc,
            p2_4q2: (p * p - 4.0 * q2).abs() / sc2,
        }
    }

    /// Smallest residual that did not trigger a degenerate case; small values
    /// flag a point close to, but not on, a degenerate manifold.
    pub fn nearest_ungated(&self, params: &PentaParams) -> f64 {
        let (_, q, _, s) = params.parts();
        let sc = 1f64.max(params.p().abs()).max(q.abs()).max(s.abs());
        [
            self.q2_4s,
            self.q2_quarter,
            self.p_6s,
            self.p_2s,
            self.p_neg2s,
            self.p2_4q2,
            q.abs() / sc,
            s.abs() / sc,
        ]
        .into_iter()
        .filter(|&g| g > CASE_TOL)
        .fold(f64::INFINITY, f64::min)
    }
}

impl Gates {
    /// Largest residual among the equalities that selected `case`: how far
    /// the point sits from the manifold it was assigned to.
    pub fn snapped_offset(&self, case: CaseId) -> f64 {
        let on = |x: f64| if x <= CASE_TOL { x } else { 0.0 };
        match case {
            CaseId::Q2_4S_P_GT_6S | CaseId::Q2_4S_P_LT_6S => self.q2_4s,
            CaseId::Q2_QUARTER_P_NE_6S => self.q2_quarter,
            CaseId::ALL_EQUAL_P_6S => on(self.q2_4s).max(on(self.q2_quarter)).max(on(self.p_6s)),
            CaseId::QZERO_P_2S => self.p_2s,
            CaseId::QZERO_P_NEG2S => self.p_neg2s,
            CaseId::SZERO_P2_4Q2 => self.p2_4q2,
            CaseId::GEN_DISTINCT | CaseId::QZERO_GEN | CaseId::SZERO_GEN | CaseId::DIAG => 0.0,
        }
    }
}

/// The case that applies at `params`.
pub fn case_id(params: &PentaParams) -> CaseId {
    let (p, _, _, s) = params.parts();
    let g = Gates::new(params);
    let on = |x: f64| x <= CASE_TOL;
    match (super::q_is_zero(params), super::s_is_zero(params)) {
        (true, true) => CaseId::DIAG,
        (true, false) => {
            if on(g.p_2s) {
                CaseId::QZERO_P_2S
            } else if on(g.p_neg2s) {
                CaseId::QZERO_P_NEG2S
            } else {
                CaseId::QZERO_GEN
            }
        }
        (false, true) => {
            if on(g.p2_4q2) {
                CaseId::SZERO_P2_4Q2
            } else {
                CaseId::SZERO_GEN
            }
        }
        (false, false) => {
            let q1 = on(g.q2_4s);
            let q2 = on(g.q2_quarter);
            let p6 = on(g.p_6s);
            if (q1 && (p6 || q2)) || (q2 && p6) {
                CaseId::ALL_EQUAL_P_6S
            } else if q1 {
                if p > 6.0 * s {
                    CaseId::Q2_4S_P_GT_6S
                } else {
                    CaseId::Q2_4S_P_LT_6S
                }
            } else if q2 {
                CaseId::Q2_QUARTER_P_NE_6S
            } else {
                CaseId::GEN_DISTINCT
            }
        }
    }
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// Kernel for the five distinct roots.
#[allow(clippy::too_many_arguments)]
fn kernel(p: C, q: C, r: C, s: C, x: C, y: C, z: C) -> C {
    let q2 = q * q;
    let s2 = s * s;
    let num = 64.0
        * (2.0 * s2 * s2 * (2.0 * s + 3.0 * p + x + z)
            + p * s2 * (4.0 * q2 - 2.0 * s * (p - x) - (p + x) * (2.0 * p + z))
            - 2.0 * s * q2 * (4.0 * q2 - 2.0 * p * p - (p - 2.0 * s) * (2.0 * x + z) - x * z)
            + r * (4.0 * q2 * q2 - q2 * (p + x) * (2.0 * p + z)
                + 2.0 * s * q2 * (p - 2.0 * s + 3.0 * x + 2.0 * z)
                - 2.0 * s2 * p * (p + x + z)
                - 2.0 * s2 * s * (p - 2.0 * s - x + z))
            + (q2 - p * r)
                * (2.0 * s2 * (2.0 * s + 3.0 * p + x)
                    + 2.0 * q2 * (3.0 * p - 4.0 * s + x + z)
                    - (s * (p - x) + p * (p + x)) * (2.0 * p + z)));
    let w = 2.0 * x + z;
    let den = z * (p - 2.0 * s + x + z) * (p - 6.0 * s + x + z) * (w * w - y * y);
    num / den
}

fn k1(p: f64, r: f64, s: f64) -> f64 {
    (p * p - p * (r + 8.0 * s) + 2.0 * s * (2.0 * r + 11.0 * s)) / (p - 6.0 * s).powi(2)
}

fn k2(p: f64, r: f64, s: f64, j: f64) -> f64 {
    (p - r - j * s) / (p - 6.0 * s)
}

fn k3(p: C, r: C, s: C, z: C) -> C {
    let a = p - 4.0 * s + z;
    let num = 2.0 * s * s * (p - 2.0 * s) * (p - 2.0 * s) * a * ((r - p) * a + 2.0 * s * s);
    let b = 4.0 * s * (3.0 * s - z) + p * (p - 8.0 * s + z);
    num / (z * b * b * b)
}

fn k4(p: C, r: C, s: C, z: C) -> C {
    let p2 = p * p;
    let p3 = p2 * p;
    let p4 = p3 * p;
    let p5 = p4 * p;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let num = 8.0
        * (p5 * (12.0 * s - p + z)
            - 2.0 * p4 * s * (24.0 * s - 4.0 * r + 5.0 * z)
            - 4.0 * p3 * s * (2.0 * r * (10.0 * s + z) - s * (16.0 * s + 9.0 * z))
            + 8.0 * p2 * s2 * (4.0 * r * (5.0 * s + 2.0 * z) + s * (20.0 * s - 7.0 * z))
            + 16.0 * p * s3 * (2.0 * r * (8.0 * s - 3.0 * z) - 5.0 * s * (8.0 * s + z))
            - 32.0 * s4 * (2.0 * r * (6.0 * s + z) + s * (6.0 * s - 7.0 * z)));
    let a = p - 2.0 * s - z;
    let b = p - 6.0 * s - z;
    num / (z * (p - 6.0 * s) * a * a * b * b)
}

fn k5(p: C, r: C, s: C, z: C) -> C {
    let p2 = p * p;
    let p3 = p2 * p;
    let p4 = p3 * p;
    let s2 = s * s;
    let s3 = s2 * s;
    let num = 4.0
        * (p4 * (2.0 * r + 4.0 * s - p + z)
            - 2.0 * p3 * (r * (6.0 * s + z) - s * (6.0 * s - z))
            - 8.0 * p2 * s * (r * (s - z) + s * (s + z))
            + 8.0 * p * s2 * (r * (8.0 * s + z) - s * (6.0 * s + z))
            - 16.0 * s3 * (4.0 * s2 - r * (2.0 * s - z)));
    let a = p - 2.0 * s - z;
    num / (z * z * (p - 6.0 * s - z) * a * a)
}

fn k6(p: f64, r: f64, s: f64, j: f64) -> f64 {
    (p - r + j * s) / (2.0 * (p + 2.0 * j * s))
}

fn k7(p: f64, r: f64, s: f64, d: C, j: f64) -> C {
    let s2 = s * s;
    let num = re(p.powi(3) * r - p * p * s2 - 3.0 * p * r * s2 + 2.0 * s2 * s2)
        + j * (p * s2 + r * s2 - p * p * r) * d;
    let den = (p * p - 4.0 * s2) * (re(p * p - 2.0 * s2) - j * p * d);
    num / den
}

fn constant(root: C, k: C) -> Term {
    Term {
        root,
        kappa: NPoly::constant(k),
    }
}

fn mono(root: C, deg: usize, k: C) -> Term {
    Term {
        root,
        kappa: NPoly::monomial(deg, k),
    }
}

/// Coefficients for the case selected by [`case_id`]. `roots` must come from
/// [`characteristic_roots`](super::characteristic_roots) at the same point.
pub fn coefficient_set(params: &PentaParams, roots: &CharacteristicRoots) -> CoefficientSet {
    let case_id = case_id(params);
    debug_assert_eq!(case_id.root_kind(), roots.kind);
    let (p, q, r, s) = params.parts();
    let (pc, qc, rc, sc) = (re(p), re(q), re(r), re(s));
    let sroot = re(s);
    let terms = match case_id {
        CaseId::GEN_DISTINCT => {
            let alpha = roots.aux.alpha.expect("alpha");
            let b1 = roots.aux.beta1.expect("beta1");
            let b2 = roots.aux.beta2.expect("beta2");
            let k = |x, y, z| kernel(pc, qc, rc, sc, x, y, z);
            let k5 = 2.0 * s * (r + s - p) / (q * q - 4.0 * s * (p - 2.0 * s));
            let mu = &roots.roots;
            vec![
                constant(mu[0], k(-alpha, b2, -b1)),
                constant(mu[1], k(-alpha, b2, b1)),
                constant(mu[2], k(alpha, b1, -b2)),
                constant(mu[3], k(alpha, b1, b2)),
                constant(mu[4], re(k5)),
            ]
        }
        CaseId::Q2_4S_P_GT_6S | CaseId::Q2_4S_P_LT_6S => {
            let g = roots.aux.gamma.unwrap_or_else(|| rsqrt((p - 6.0 * s) * (p - 2.0 * s)));
            let lo = (re(p - 4.0 * s) - g) / 2.0;
            let hi = (re(p - 4.0 * s) + g) / 2.0;
            let a = constant(sroot, re(k1(p, r, s)));
            let b = mono(sroot, 1, re(2.0 * k2(p, r, s, 2.0)));
            let c = constant(lo, k3(pc, rc, sc, g));
            let d = constant(hi, k3(pc, rc, sc, -g));
            let e = mono(sroot, 2, re(k2(p, r, s, 1.0)));
            if case_id == CaseId::Q2_4S_P_GT_6S {
                vec![a, b, c, d, e]
            } else {
                vec![c, d, a, b, e]
            }
        }
        CaseId::Q2_QUARTER_P_NE_6S => {
            let d = roots.aux.delta.unwrap_or_else(|| rsqrt((p - 6.0 * s) * (p + 2.0 * s)));
            let m1 = (re(p - 2.0 * s) - d) / 4.0;
            let m2 = (re(p - 2.0 * s) + d) / 4.0;
            vec![
                constant(m1, k4(pc, rc, sc, d)),
                constant(m2, k4(pc, rc, sc, -d)),
                mono(m1, 1, k5(pc, rc, sc, d)),
                mono(m2, 1, k5(pc, rc, sc, -d)),
                constant(sroot, re(8.0 * s * (r + s - p) / (p - 6.0 * s).powi(2))),
            ]
        }
        CaseId::ALL_EQUAL_P_6S => vec![
            constant(sroot, re(1.0)),
            mono(sroot, 1, re((r + 8.0 * s) / (6.0 * s))),
            mono(sroot, 2, re((5.0 * r - 7.0 * s) / (12.0 * s))),
            mono(sroot, 3, re((r - 4.0 * s) / (3.0 * s))),
            mono(sroot, 4, re((r - 5.0 * s) / (12.0 * s))),
        ],
        CaseId::QZERO_GEN => {
            let d = rsqrt(p * p - 4.0 * s * s);
            vec![
                constant(re(-s), re(k6(p, r, s, 1.0))),
                constant(re(s), re(k6(p, r, s, -1.0))),
                constant((pc - d) / 2.0, k7(p, r, s, d, 1.0)),
                constant((pc + d) / 2.0, k7(p, r, s, d, -1.0)),
            ]
        }
        CaseId::QZERO_P_2S => {
            let half = re(p / 2.0);
            vec![
                constant(re(-s), re((3.0 * s - r) / (8.0 * s))),
                constant(re(s), re((r + 5.0 * s) / (8.0 * s))),
                mono(half, 1, re(r / (2.0 * s))),
                mono(half, 2, re((r - s) / (4.0 * s))),
            ]
        }
        CaseId::QZERO_P_NEG2S => {
            let half = re(p / 2.0);
            vec![
                constant(re(-s), re((5.0 * s - r) / (8.0 * s))),
                constant(re(s), re((r + 3.0 * s) / (8.0 * s))),
                mono(half, 1, re(-r / (2.0 * s))),
                mono(half, 2, re(-(r + s) / (4.0 * s))),
            ]
        }
        CaseId::SZERO_GEN => {
            let d = csqrt(re(p * p - 4.0 * q * q));
            vec![
                constant((pc - d) / 2.0, (pc - 2.0 * r + d) / (2.0 * d)),
                constant((pc + d) / 2.0, (2.0 * r - pc + d) / (2.0 * d)),
            ]
        }
        CaseId::SZERO_P2_4Q2 => {
            let half = re(p / 2.0);
            vec![
                constant(half, re(1.0)),
                mono(half, 1, re((2.0 * r - p) / p)),
            ]
        }
        CaseId::DIAG => vec![constant(re(p), re(if p == 0.0 { 0.0 } else { r / p }))],
    };
    CoefficientSet { case_id, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::characteristic_roots;
    use crate::matrix::build_e;
    use crate::oracle::oracle_det;

    fn pp(p: f64, q: f64, r: f64, s: f64) -> PentaParams {
        PentaParams::new(p, q, r, s).unwrap()
    }

    fn direct_sum(cs: &CoefficientSet, n: usize) -> f64 {
        cs.terms
            .iter()
            .map(|t| t.kappa.eval(n as f64) * t.root.powu(n as u32))
            .sum::<C>()
            .re
    }

    #[test]
    fn example_kappas() {
        let pr = pp(5.0, -1.0, 1.0, 2.0);
        let cs = coefficient_set(&pr, &characteristic_roots(&pr));
        assert_eq!(cs.case_id, CaseId::GEN_DISTINCT);
        let k = cs.kappas_at(0.0);
        let want = [
            (0.163717, 0.05368),
            (0.163717, -0.05368),
            (-0.395173, 0.0),
            (-0.075118, 0.0),
            (1.14286, 0.0),
        ];
        for (a, (wr, wi)) in k.iter().zip(want) {
            assert!((a.re - wr).abs() < 1e-5 && (a.im - wi).abs() < 1e-5, "{a}");
        }
    }

    #[test]
    fn all_equal_case() {
        let pr = pp(6.0, 4.0, 0.9, 1.0);
        let cs = coefficient_set(&pr, &characteristic_roots(&pr));
        assert_eq!(cs.case_id, CaseId::ALL_EQUAL_P_6S);
        assert_eq!(cs.terms[0].kappa.eval(7.0), re(1.0));
        for (j, t) in cs.terms.iter().enumerate() {
            assert_eq!(t.kappa.degree(), j);
        }
        let n = 3.0;
        assert!((cs.terms[1].kappa.eval(n).re - n * (0.9 + 8.0) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn s_zero_repeated() {
        let pr = pp(2.0, 1.0, 1.0, 0.0);
        let cs = coefficient_set(&pr, &characteristic_roots(&pr));
        assert_eq!(cs.case_id, CaseId::SZERO_P2_4Q2);
        assert_eq!(cs.terms[0].kappa.eval(5.0), re(1.0));
        assert_eq!(cs.terms[1].kappa.eval(5.0), re(0.0));
    }

    #[test]
    fn every_case_reproduces_minors() {
        let sqrt = f64::sqrt;
        let points = [
            (CaseId::GEN_DISTINCT, pp(5.0, -1.0, 1.0, 2.0)),
            (CaseId::Q2_4S_P_GT_6S, pp(8.0, sqrt(24.0), 1.3, 1.0)),
            (CaseId::Q2_4S_P_LT_6S, pp(5.0, sqrt(12.0), 0.7, 1.0)),
            (CaseId::Q2_QUARTER_P_NE_6S, pp(3.0, 2.5, 0.4, 1.0)),
            (CaseId::ALL_EQUAL_P_6S, pp(6.0, -4.0, 0.9, 1.0)),
            (CaseId::QZERO_GEN, pp(3.0, 0.0, 0.5, 1.0)),
            (CaseId::QZERO_P_2S, pp(2.0, 0.0, 0.5, 1.0)),
            (CaseId::QZERO_P_NEG2S, pp(-2.0, 0.0, 0.5, 1.0)),
            (CaseId::SZERO_GEN, pp(3.0, 1.0, 0.5, 0.0)),
            (CaseId::SZERO_P2_4Q2, pp(2.0, 1.0, 0.7, 0.0)),
            (CaseId::DIAG, pp(1.5, 0.0, 0.7, 0.0)),
            (CaseId::Q2_4S_P_GT_6S, pp(-3.0, 2.0, 0.3, -1.0)),
            (CaseId::Q2_4S_P_LT_6S, pp(-8.0, sqrt(24.0), 0.3, -1.0)),
            (CaseId::Q2_QUARTER_P_NE_6S, pp(1.0, -0.5, 0.3, -1.0)),
            (CaseId::QZERO_GEN, pp(0.5, 0.0, 0.3, 1.0)),
            (CaseId::SZERO_GEN, pp(1.0, 1.0, 0.3, 0.0)),
        ];
        for (want, pr) in points {
            let cs = coefficient_set(&pr, &characteristic_roots(&pr));
            assert_eq!(cs.case_id, want, "{pr:?}");
            for n in 1..=12 {
                let a = direct_sum(&cs, n);
                let b = oracle_det(&build_e(&pr, n).unwrap()).to_f64();
                assert!(
                    (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                    "{want} n={n}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn near_degenerate_gating() {
        let q = (4.0f64 * (8.0 - 2.0) * (1.0 + 1e-12)).sqrt();
        assert_eq!(case_id(&pp(8.0, q, 1.0, 1.0)), CaseId::Q2_4S_P_GT_6S);
        let q = (4.0f64 * (8.0 - 2.0) * (1.0 + 1e-6)).sqrt();
        assert_eq!(case_id(&pp(8.0, q, 1.0, 1.0)), CaseId::GEN_DISTINCT);
        assert_eq!(case_id(&pp(3.0, 1e-15, 1.0, 1.0)), CaseId::QZERO_GEN);
    }
}
