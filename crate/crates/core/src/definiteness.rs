//! Non-negative and positive definiteness of `D_n` for every order `n`.
//!
//! The eigenvalues of `D_n` are bounded below by `min g(x)` over
//! `x in [-2, 2]`, where `g(x) = s x^2 + q x + (p - 2s)`, as soon as
//! `r >= p - s`. The four regions `D1..D4` spell out `g >= 0` on `[-2, 2]`
//! case by case on the sign of `s`. On the manifold `r = p - s` the
//! eigenvalues are known exactly: `alpha_{n,k} = g(2 cos(k pi / (n + 1)))`.
//!
//! Region membership is a sufficient condition only. Outside `D1..D4` a
//! given `D_n` may still happen to be non-negative; nothing here claims
//! otherwise.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::PentaParams;

/// Largest order scanned when deciding whether `t = -q / (4 s)` equals
/// `cos(k pi / (n + 1))` for some `k, n`.
pub const DEFAULT_D0_SCAN: u64 = 1_000_000;

/// Tolerance on `arccos(t) / pi - k / (n + 1)` for the `D0` scan.
pub const D0_FRACTION_TOL: f64 = 1e-9;

/// Relative tolerance for the equality `q^2 = 4 s (p - 2s)`.
pub const DEGENERATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    D1,
    D2,
    D3,
    D4,
    D0,
    Outside,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::D1 => "D1",
            RegionTag::D2 => "D2",
            RegionTag::D3 => "D3",
            RegionTag::D4 => "D4",
            RegionTag::D0 => "D0",
            RegionTag::Outside => "OUTSIDE",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `D_n` has the eigenvalue `alpha_{n,k} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NullWitness {
    pub k: u64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLabel {
    pub tag: RegionTag,
    /// Present only for [`RegionTag::D0`], with `1 <= k <= n`.
    pub witness: Option<NullWitness>,
}

impl RegionLabel {
    fn plain(tag: RegionTag) -> Self {
        RegionLabel { tag, witness: None }
    }

    pub fn is_admissible(&self) -> bool {
        matches!(
            self.tag,
            RegionTag::D1 | RegionTag::D2 | RegionTag::D3 | RegionTag::D4
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefinitenessReport {
    pub nonneg_all_n: bool,
    pub positive_all_n: bool,
    pub region: RegionLabel,
    pub requires_r_ge_p_minus_s: bool,
}

/// `g(x) = s x^2 + q x + (p - 2s)`.
pub fn g_poly(params: &PentaParams, x: f64) -> f64 {
    let (p, q, _, s) = params.parts();
    s * x * x + q * x + (p - 2.0 * s)
}

/// Membership in `D1..D4`, tested by their defining inequalities in the
/// order `D2` (`s = 0`), `D1` (`s < 0`), `D3`, `D4` (`s > 0`).
pub fn classify_region(params: &PentaParams) -> Result<RegionLabel> {
    let (p, q, _, s) = params.parts();
    if p < 0.0 {
        return Err(Error::NegativeDiagonal { p });
    }
    let half_sum = 0.5 * (p + 2.0 * s);
    let tag = if s == 0.0 {
        if p >= 2.0 * q.abs() {
            RegionTag::D2
        } else {
            RegionTag::Outside
        }
    } else if s < 0.0 {
        if -0.5 * p <= s && -half_sum <= q && q <= half_sum {
            RegionTag::D1
        } else {
            RegionTag::Outside
        }
    } else {
        let disc = 4.0 * s * (p - 2.0 * s);
        let root = disc.max(0.0).sqrt();
        if s <= 0.5 * p && -root <= q && q <= root {
            RegionTag::D3
        } else if s < p / 6.0
            && ((-half_sum <= q && q < -root) || (root < q && q <= half_sum))
        {
            RegionTag::D4
        } else {
            RegionTag::Outside
        }
    };
    Ok(RegionLabel::plain(tag))
}

fn r_ge_p_minus_s(params: &PentaParams) -> bool {
    let (p, _, r, s) = params.parts();
    let tol = 1e-12 * 1f64.max(p.abs()).max(s.abs());
    r >= p - s - tol
}

/// Sufficient test for `D_n >= 0` at every order: `r >= p - s` and
/// `(p, q, s)` in `D1 u D2 u D3 u D4`.
pub fn is_nonneg_all_n(params: &PentaParams) -> Result<DefinitenessReport> {
    let region = classify_region(params)?;
    let pre = r_ge_p_minus_s(params);
    Ok(DefinitenessReport {
        nonneg_all_n: pre && region.is_admissible(),
        positive_all_n: false,
        region,
        requires_r_ge_p_minus_s: pre,
    })
}

fn require_r_eq_p_minus_s(params: &PentaParams) -> Result<()> {
    if params.has_r_eq_p_minus_s() {
        Ok(())
    } else {
        Err(Error::RequiresRpEqualPMinusS {
            r: params.r(),
            p_minus_s: params.p() - params.s(),
        })
    }
}

/// `alpha_{n,k} = 4 s c^2 + 2 q c + p - 2s` with `c = cos(k pi / (n + 1))`,
/// for `k = 1..=n` in index order (not sorted). Requires `r = p - s`.
pub fn eigenvalues_closed_form(params: &PentaParams, n: usize) -> Result<Vec<f64>> {
    require_r_eq_p_minus_s(params)?;
    if n < 3 {
        return Err(Error::OrderTooSmall {
            min: 3,
            got: n as u64,
        });
    }
    Ok((1..=n).map(|k| alpha_nk(params, n as u64, k as u64)).collect())
}

pub(crate) fn alpha_nk(params: &PentaParams, n: u64, k: u64) -> f64 {
    let (p, q, _, s) = params.parts();
    let c = (k as f64 * PI / (n as f64 + 1.0)).cos();
    4.0 * s * c * c + 2.0 * q * c + p - 2.0 * s
}

/// Absolute threshold below which `alpha_{n,k}` counts as a null eigenvalue.
pub(crate) fn null_tol(params: &PentaParams) -> f64 {
    let (p, q, _, s) = params.parts();
    1e-10 * 1f64.max(p.abs()).max(q.abs()).max(s.abs())
}

/// Smallest `k` in `1..=n` with `alpha_{n,k} = 0` (within
/// `1e-10 * max(1, |p|, |q|, |s|)`).
pub fn null_eigenvalue_witness(params: &PentaParams, n: usize) -> Result<Option<u64>> {
    require_r_eq_p_minus_s(params)?;
    let tol = null_tol(params);
    Ok((1..=n as u64).find(|&k| alpha_nk(params, n as u64, k).abs() <= tol))
}

/// Strict positive definiteness at every order for `r = p - s`, using the
/// default `D0` scan depth.
pub fn is_positive_all_n(params: &PentaParams) -> Result<DefinitenessReport> {
    is_positive_all_n_with(params, DEFAULT_D0_SCAN)
}

/// As [`is_positive_all_n`] with an explicit largest order `n_max` for the
/// `D0` scan.
pub fn is_positive_all_n_with(params: &PentaParams, n_max: u64) -> Result<DefinitenessReport> {
    require_r_eq_p_minus_s(params)?;
    let region = classify_region(params)?;
    let (p, q, _, s) = params.parts();
    let admissible = region.is_admissible();
    let mut report = DefinitenessReport {
        nonneg_all_n: admissible,
        positive_all_n: false,
        region,
        requires_r_ge_p_minus_s: true,
    };
    if !admissible {
        return Ok(report);
    }
    // g vanishes identically: the zero matrix.
    if p == 0.0 && q == 0.0 && s == 0.0 {
        return Ok(report);
    }
    if let Some(witness) = d0_witness(params, n_max) {
        report.region = RegionLabel {
            tag: RegionTag::D0,
            witness: Some(witness),
        };
        return Ok(report);
    }
    report.positive_all_n = true;
    Ok(report)
}

/// `(p, q, s)` lies in `D0` when `s > 0`, `q^2 = 4 s (p - 2s)` and the double
/// root `t = -q / (4s)` of `g(2t)` equals `cos(k pi / (n + 1))` for some
/// `1 <= k <= n <= n_max`. The witness is reported with `n >= 3`.
fn d0_witness(params: &PentaParams, n_max: u64) -> Option<NullWitness> {
    let (p, q, _, s) = params.parts();
    if s <= 0.0 {
        return None;
    }
    let scale = 1f64.max(p.abs()).max(q.abs()).max(s.abs());
    let disc = q * q - 4.0 * s * (p - 2.0 * s);
    if disc.abs() > DEGENERATE_TOL * scale * scale {
        return None;
    }
    let t = -q / (4.0 * s);
    if !(t > -1.0 && t < 1.0) {
        return None;
    }
    let theta = t.acos() / PI;
    let (k, m) = simplest_fraction(theta - D0_FRACTION_TOL, theta + D0_FRACTION_TOL, n_max + 1)?;
    // theta = k / m with 0 < k < m, so D_{m-1} has alpha_{m-1,k} = 0; the same
    // holds for every multiple j*m - 1.
    let j = 4u64.div_ceil(m).max(1);
    Some(NullWitness {
        k: k * j,
        n: m * j - 1,
    })
}

/// Fraction `k / m` in `[lo, hi]` with the smallest denominator, searched by
/// walking the Stern-Brocot tree; `None` if that denominator exceeds `max_den`.
fn simplest_fraction(lo: f64, hi: f64, max_den: u64) -> Option<(u64, u64)> {
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo > hi {
        return None;
    }
    // Left and right bounds of the current Stern-Brocot interval.
    let (mut a, mut b) = (0u64, 1u64);
    let (mut c, mut d) = (1u64, 1u64);
    if lo <= 0.0 {
        return None;
    }
    if hi >= 1.0 {
        return None;
    }
    loop {
        let (k, m) = (a + c, b + d);
        if m > max_den {
            return None;
        }
        let x = k as f64 / m as f64;
        if x < lo {
            let t = batch_steps(a, b, c, d, |v| v < lo);
            a += t * c;
            b += t * d;
        } else if x > hi {
            let t = batch_steps(c, d, a, b, |v| v > hi);
            c += t * a;
            d += t * b;
        } else {
            return Some((k, m));
        }
    }
}

/// Largest `t >= 1` such that `(a + t c) / (b + t d)` still satisfies
/// `outside`, found by doubling then bisection. The caller guarantees `t = 1`
/// qualifies.
fn batch_steps(a: u64, b: u64, c: u64, d: u64, outside: impl Fn(f64) -> bool) -> u64 {
    let at = |t: u64| outside((a + t * c) as f64 / (b + t * d) as f64);
    let cap = 1u64 << 40;
    let mut lo = 1u64;
    let mut hi = 2u64;
    while hi <= cap && at(hi) {
        lo = hi;
        hi *= 2;
    }
    if hi > cap {
        return lo;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_d;
    use crate::oracle::{oracle_eigenvalues, oracle_inertia};

    fn pp(p: f64, q: f64, r: f64, s: f64) -> PentaParams {
        PentaParams::new(p, q, r, s).unwrap()
    }

    fn admissible() -> PentaParams {
        pp(35.0 / 9.0, 16.0 / 9.0, 32.0 / 9.0, 1.0 / 3.0)
    }

    /// MA(1) map at `phi = 1/3`, `lambda = (0, 1)`.
    fn two_negative() -> PentaParams {
        pp(1.0 / 3.0, -10.0 / 9.0, 2.0 / 3.0, -1.0 / 3.0)
    }

    fn d0_point() -> PentaParams {
        pp(4.0, -2.0 * 2f64.sqrt(), 3.0, 1.0)
    }

    #[test]
    fn g_values() {
        let pr = pp(5.0, -1.0, 1.0, 2.0);
        assert_eq!(g_poly(&pr, 0.0), 1.0);
        assert_eq!(g_poly(&pr, 1.0), 2.0);
        assert_eq!(g_poly(&pp(4.0, 4.0, 0.0, 1.0), -2.0), -2.0);
        assert_eq!(g_poly(&pp(7.0, 3.0, 0.0, 1.5), 0.0), 4.0);
    }

    #[test]
    fn regions() {
        let tag = |p, q, s| classify_region(&pp(p, q, 0.0, s)).unwrap().tag;
        assert_eq!(tag(4.0, 0.0, -1.0), RegionTag::D1);
        assert_eq!(tag(2.0, 1.0, 0.0), RegionTag::D2);
        assert_eq!(tag(5.0, -1.0, 2.0), RegionTag::D3);
        // s < p/6 and sqrt(4 s (p - 2s)) < q <= (p + 2s)/2
        assert_eq!(tag(12.0, 6.5, 1.0), RegionTag::D4);
        assert_eq!(tag(12.0, 7.5, 1.0), RegionTag::Outside);
        assert_eq!(tag(2.0, 1.5, 0.0), RegionTag::Outside);
        assert_eq!(tag(1.0, 0.0, -1.0), RegionTag::Outside);
        assert!(matches!(
            classify_region(&pp(-1.0, 0.0, 0.0, 0.0)),
            Err(Error::NegativeDiagonal { .. })
        ));
    }

    #[test]
    fn region_matches_g_on_grid() {
        // D1..D4 are exactly {g >= 0 on [-2, 2]} for p >= 0.
        let g_ok = |pr: &PentaParams| {
            (0..=400).all(|i| g_poly(pr, -2.0 + 4.0 * i as f64 / 400.0) >= -1e-12)
        };
        for pi in 0..10 {
            for qi in -12..=12 {
                for si in -8..=8 {
                    let pr = pp(pi as f64 * 0.7 + 0.1, qi as f64 * 0.37, 0.0, si as f64 * 0.29);
                    let ok = g_ok(&pr);
                    let adm = classify_region(&pr).unwrap().is_admissible();
                    if adm {
                        assert!(ok, "{pr:?}");
                    }
                    // Grid resolution may miss a thin violation; only check the
                    // converse away from the boundary.
                    let margin = (0..=400)
                        .map(|i| g_poly(&pr, -2.0 + 4.0 * i as f64 / 400.0))
                        .fold(f64::INFINITY, f64::min);
                    if margin > 1e-3 {
                        assert!(adm, "{pr:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn nonneg_reports() {
        let r = is_nonneg_all_n(&pp(5.0, -1.0, 1.0, 2.0)).unwrap();
        assert!(!r.nonneg_all_n);
        assert!(!r.requires_r_ge_p_minus_s);
        assert_eq!(r.region.tag, RegionTag::D3);

        let zero = is_nonneg_all_n(&pp(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(zero.nonneg_all_n);

        let r = is_nonneg_all_n(&admissible()).unwrap();
        assert!(r.nonneg_all_n && r.requires_r_ge_p_minus_s);
        for n in 3..=30 {
            assert_eq!(oracle_inertia(&build_d(&admissible(), n).unwrap(), 0.0).n_neg, 0);
        }
    }

    #[test]
    fn closed_form_eigenvalues() {
        let ev = eigenvalues_closed_form(&two_negative(), 5).unwrap();
        let r3 = 3f64.sqrt();
        let expected = [-10.0 / (3.0 * r3), -4.0 / 9.0, 1.0, 16.0 / 9.0, 10.0 / (3.0 * r3)];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        for v in eigenvalues_closed_form(&pp(2.5, 0.0, 2.5, 0.0), 6).unwrap() {
            assert_eq!(v, 2.5);
        }
        let pr = pp(4.0, 1.0, 3.0, 1.0);
        let mut cf = eigenvalues_closed_form(&pr, 7).unwrap();
        cf.sort_by(f64::total_cmp);
        let or = oracle_eigenvalues(&build_d(&pr, 7).unwrap(), 1e-11);
        for (a, b) in cf.iter().zip(&or) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(matches!(
            eigenvalues_closed_form(&pp(5.0, -1.0, 1.0, 2.0), 5),
            Err(Error::RequiresRpEqualPMinusS { .. })
        ));
    }

    #[test]
    fn witnesses() {
        assert_eq!(null_eigenvalue_witness(&d0_point(), 3).unwrap(), Some(1));
        assert_eq!(
            null_eigenvalue_witness(&pp(1.0, 0.0, 1.0, 0.0), 10).unwrap(),
            None
        );
        assert_eq!(null_eigenvalue_witness(&admissible(), 50).unwrap(), None);
        // D_7 has (k + 1) / 8 = 1/4 at k = 2.
        assert_eq!(null_eigenvalue_witness(&d0_point(), 7).unwrap(), Some(2));
        assert_eq!(null_eigenvalue_witness(&d0_point(), 5).unwrap(), None);
    }

    #[test]
    fn positive_reports() {
        let r = is_positive_all_n(&d0_point()).unwrap();
        assert!(!r.positive_all_n);
        assert!(r.nonneg_all_n);
        assert_eq!(r.region.tag, RegionTag::D0);
        assert_eq!(r.region.witness, Some(NullWitness { k: 1, n: 3 }));

        let diag = is_positive_all_n(&pp(2.0, 0.0, 2.0, 0.0)).unwrap();
        assert!(diag.positive_all_n);
        assert_eq!(diag.region.tag, RegionTag::D2);

        let r = is_positive_all_n(&admissible()).unwrap();
        assert!(r.positive_all_n);

        let zero = is_positive_all_n(&pp(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(zero.nonneg_all_n && !zero.positive_all_n);

        // t = cos(pi / 2) = 0: q = 0 and p = 2s; witness lifted to n >= 3.
        let half = is_positive_all_n(&pp(2.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(half.region.witness, Some(NullWitness { k: 2, n: 3 }));

        // Boundary arc with t = -q / 4 = -0.3535...: no fraction with
        // denominator <= 51 lies within the scan tolerance.
        let s: f64 = 1.0;
        let p = 2.5;
        let q = (4.0 * s * (p - 2.0 * s)).sqrt();
        let short = is_positive_all_n_with(&pp(p, q, p - s, s), 50).unwrap();
        assert!(short.positive_all_n);
        assert_eq!(short.region.tag, RegionTag::D3);

        // Off the boundary arc the scan never runs.
        let inside = is_positive_all_n(&pp(3.0, 0.5, 2.0, 1.0)).unwrap();
        assert!(inside.positive_all_n);
    }

    #[test]
    fn simplest_fraction_search() {
        assert_eq!(simplest_fraction(0.2499, 0.2501, 100), Some((1, 4)));
        assert_eq!(simplest_fraction(0.333, 0.334, 100), Some((1, 3)));
        let x = 355.0 / 1130.0;
        assert_eq!(simplest_fraction(x - 1e-12, x + 1e-12, 10_000), Some((71, 226)));
        assert_eq!(simplest_fraction(x - 1e-12, x + 1e-12, 100), None);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let (k, m) = simplest_fraction(golden - 1e-9, golden + 1e-9, 1_000_000).unwrap();
        assert!((k as f64 / m as f64 - golden).abs() <= 1e-9);
        assert!(m > 10_000);
    }
}
