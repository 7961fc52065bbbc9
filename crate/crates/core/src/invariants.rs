// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Aggregate invariants over toric models: `α` and `δ^(p)` upper bounds,
//! their consistency checks, K-stability threshold comparisons and the
//! unnormalized `δ̄^(p)`.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::rational::{binomial, pow};
use crate::numeric::{beta_constant, format_rational, int, to_f64, Rational};
use crate::toric::{
    candidate_table, candidates, delta_p_search, log_discrepancy, volume_curve_of, CandidateRow, DeltaSearch,
    ToricModel, ToricValuation,
};
use crate::volume_curve::{s_p, s_p_f64};

/// Relative tolerance for float threshold comparisons.
pub const BORDERLINE_TOL: f64 = 1e-9;

/// Minimum of `A(v)/τ(v)` over the candidate set; an upper bound for `α`.
#[derive(Clone, Debug)]
pub struct AlphaSearch {
    pub value: Rational,
    pub argmin: Vec<i64>,
}

pub fn alpha_candidate(tm: &ToricModel, bound: u32) -> Result<AlphaSearch> {
    if bound == 0 {
        return Err(Error::Argument("search bound must be at least 1".into()));
    }
    let mut best: Option<AlphaSearch> = None;
    for v in candidates(tm.dim(), bound) {
        let tv = ToricValuation::new(tm, v)?;
        let a = log_discrepancy(tm, &tv)?;
        let tau = tm
            .polytope()
            .vertices()
            .iter()
            .map(|w| tv.form().eval(w))
            .max()
            .expect("nonempty");
        let ratio = a / tau;
        if best.as_ref().map_or(true, |b| ratio < b.value) {
            best = Some(AlphaSearch {
                value: ratio,
                argmin: tv.v().to_vec(),
            });
        }
    }
    Ok(best.expect("candidate set is nonempty"))
}

/// `n/(n+1) · ((n+p)/n)^{1/p}`.
pub fn kstability_threshold(n: u32, p: f64) -> f64 {
    let n = n as f64;
    n / (n + 1.0) * ((n + p) / n).powf(1.0 / p)
}

/// `threshold^p = (n/(n+1))^p (n+p)/n` for integer `p`.
pub fn kstability_threshold_pow(n: u32, p: u32) -> Rational {
    pow(&Rational::new(n.into(), (n + 1).into()), p) * Rational::new((n + p).into(), n.into())
}

/// `h(x) = x log n − Σ_{i=1}^{n−1} log((x+i)/i)`.
pub fn h_function(n: u32, x: f64) -> f64 {
    x * (n as f64).ln() - (1..n).map(|i| ((x + i as f64) / i as f64).ln()).sum::<f64>()
}

/// Exact sign test for `h(p) > 0` at integer `p`: `n^p > Π (p+i)/i`.
pub fn h_positive_exact(n: u32, p: u32) -> bool {
    let prod: Rational = (1..n).map(|i| Rational::new((p + i).into(), i.into())).product();
    pow(&int(n as i64), p) > prod
}

/// `h(p) = 0` exactly at integer `p` (true at `p = 1`).
pub fn h_zero_exact(n: u32, p: u32) -> bool {
    let prod: Rational = (1..n).map(|i| Rational::new((p + i).into(), i.into())).product();
    pow(&int(n as i64), p) == prod
}

/// `δ^(p)(−K_{ℙⁿ}) = (1/(n+1)) · (Γ(p+n+1)/(Γ(p+1)Γ(n+1)))^{1/p}`.
pub fn projective_space_delta(n: u32, p: f64) -> f64 {
    (1.0 / beta_constant(n, p)).powf(1.0 / p) / (n as f64 + 1.0)
}

/// `δ^(p)(−K_{ℙⁿ})^p` at integer `p`: `(p+n choose n) / (n+1)^p`.
pub fn projective_space_delta_pow(n: u32, p: u32) -> Rational {
    binomial(p + n, n) / pow(&int(n as i64 + 1), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The candidate upper bound exceeds the threshold. Only evidence: the
    /// true `δ^(p)` may be smaller.
    ExceedsThreshold,
    BelowThreshold,
    Borderline,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ExceedsThreshold => "exceeds-threshold",
            Verdict::BelowThreshold => "below-threshold",
            Verdict::Borderline => "borderline",
        })
    }
}

/// Threshold comparison for the anticanonical polarization.
#[derive(Clone, Debug)]
pub struct KStabilityReport {
    pub n: u32,
    pub p: f64,
    /// `δ^(p)(−K)` upper bound.
    pub delta: f64,
    pub delta_pow: Option<Rational>,
    pub threshold: f64,
    pub threshold_pow: Option<Rational>,
    pub verdict: Verdict,
    pub argmin: Vec<i64>,
    /// Closed-form value for `ℙⁿ` at this `(n, p)`.
    pub projective_value: f64,
    pub h: Option<f64>,
    pub h_positive: Option<bool>,
}

/// Compares `δ^(p)(−K)` against `n/(n+1)·((n+p)/n)^{1/p}`. The model's
/// polytope must be a positive multiple of the anticanonical one up to
/// translation; `δ^(p)(−K) = λ δ^(p)(L)` for `L ≡ λ(−K)`.
pub fn kstability_verdict(tm: &ToricModel, p: f64, bound: u32, tol: f64) -> Result<KStabilityReport> {
    let lambda = tm
        .anticanonical_multiple()
        .ok_or_else(|| Error::Argument("polarization is not proportional to the anticanonical class".into()))?;
    let search = delta_p_search(tm, p, bound)?;
    Ok(verdict_from_search(tm.dim() as u32, &lambda, &search, tol))
}

fn verdict_from_search(n: u32, lambda: &Rational, search: &DeltaSearch, tol: f64) -> KStabilityReport {
    let p = search.p;
    let delta = to_f64(lambda) * search.value;
    let threshold = kstability_threshold(n, p);
    let exact_p = (p.fract() == 0.0 && (1.0..=64.0).contains(&p)).then_some(p as u32);
    let delta_pow = exact_p.and_then(|k| search.value_pow.as_ref().map(|v| v * pow(lambda, k)));
    let threshold_pow = exact_p.map(|k| kstability_threshold_pow(n, k));
    let verdict = match (&delta_pow, &threshold_pow) {
        (Some(d), Some(t)) => match d.cmp(t) {
            std::cmp::Ordering::Greater => Verdict::ExceedsThreshold,
            std::cmp::Ordering::Less => Verdict::BelowThreshold,
            std::cmp::Ordering::Equal => Verdict::Borderline,
        },
        _ => {
            if (delta - threshold).abs() <= tol * threshold.abs() {
                Verdict::Borderline
            } else if delta > threshold {
                Verdict::ExceedsThreshold
            } else {
                Verdict::BelowThreshold
            }
        }
    };
    let (h, h_positive) = if n >= 2 {
        (Some(h_function(n, p)), exact_p.map(|k| h_positive_exact(n, k)))
    } else {
        (None, None)
    };
    KStabilityReport {
        n,
        p,
        delta,
        delta_pow,
        threshold,
        threshold_pow,
        verdict,
        argmin: search.argmin.clone(),
        projective_value: projective_space_delta(n, p),
        h,
        h_positive,
    }
}

/// One row of a [`delta_family`] report.
#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub p: f64,
    pub search: DeltaSearch,
    pub threshold: f64,
    pub verdict: Option<Verdict>,
}

/// `δ^(p)` upper bounds along a p-grid with the checks relating them.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub n: u32,
    pub bound: u32,
    pub alpha: AlphaSearch,
    pub rows: Vec<FamilyRow>,
    /// Consecutive grid points where the bound increased.
    pub nonincreasing_violations: Vec<(f64, f64)>,
    /// `δ^(p) − α` at the largest grid point.
    pub alpha_gap: Option<f64>,
    /// Per-candidate bracket failures, as readable witnesses.
    pub bracket_violations: Vec<String>,
    /// `(n+1)/n α ≤ δ ≤ (n+1) α` for the `p = 1` row, when present.
    pub sandwich_holds: Option<bool>,
}

impl InvariantReport {
    pub fn is_consistent(&self) -> bool {
        self.nonincreasing_violations.is_empty()
            && self.bracket_violations.is_empty()
            && self.sandwich_holds != Some(false)
    }

    /// Columns `p, delta_upper, argmin, alpha_upper, threshold, verdict`.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    fmt_float(r.p),
                    fmt_float(r.search.value),
                    format!("{:?}", r.search.argmin).replace(' ', ""),
                    fmt_float(to_f64(&self.alpha.value)),
                    fmt_float(r.threshold),
                    r.verdict.map_or_else(|| "n/a".to_string(), |v| v.to_string()),
                ]
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let delta = match r.search.exact_value() {
                    Some(x) => serde_json::Value::String(format_rational(&x)),
                    None => serde_json::json!(r.search.value),
                };
                serde_json::json!({
                    "p": r.p,
                    "delta_upper": delta,
                    "delta_upper_pow": r.search.value_pow.as_ref().map(format_rational),
                    "argmin": r.search.argmin,
                    "alpha_upper": format_rational(&self.alpha.value),
                    "threshold": r.threshold,
                    "verdict": r.verdict.map(|v| v.to_string()),
                })
            })
            .collect();
        serde_json::json!({
            "dim": self.n,
            "bound": self.bound,
            "upper_bound_over_candidates": true,
            "alpha_upper": format_rational(&self.alpha.value),
            "alpha_argmin": self.alpha.argmin,
            "rows": rows,
            "nonincreasing_violations": self.nonincreasing_violations,
            "alpha_gap": self.alpha_gap,
            "bracket_violations": self.bracket_violations,
            "sandwich_holds": self.sandwich_holds,
        })
    }
}

/// Twelve significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 12 - 1 - x.abs().log10().floor() as i32;
    if (0..=20).contains(&digits) {
        let s = format!("{:.*}", digits as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Per-candidate consequences of the barycenter bounds and of the
/// monotonicity of `H`, checked exactly at integer `p`.
pub fn bracket_violations(n: u32, p: f64, row: &CandidateRow, s1: &Rational) -> Vec<String> {
    let mut out = Vec::new();
    let alpha_ratio = to_f64(&row.a) / to_f64(&row.tau);
    let v = format!("{:?}", row.v);
    if let (Some(k), Some(s)) = ((p.fract() == 0.0).then_some(p as u32), &row.s_p_exact) {
        let tau_p = pow(&row.tau, k);
        let upper = &tau_p * Rational::new(n.into(), (n + k).into());
        let lower = &tau_p / binomial(k + n, n);
        if *s > upper || *s < lower {
            out.push(format!("v = {v}, p = {k}: S^(p) = {} outside barycenter bounds", format_rational(s)));
        }
        let key = pow(&Rational::new((n + 1).into(), n.into()), k) * Rational::new(n.into(), (n + k).into()) * pow(s1, k);
        if *s < key {
            out.push(format!("v = {v}, p = {k}: S^(p) below ((n+1)/n)^p n/(n+p) S^p"));
        }
    } else {
        let lo = ((n as f64 + p) / n as f64).powf(1.0 / p) * alpha_ratio;
        let hi = (1.0 / beta_constant(n, p)).powf(1.0 / p) * alpha_ratio;
        let slack = 1e-9 * hi.abs().max(1.0);
        if row.ratio < lo - slack || row.ratio > hi + slack {
            out.push(format!("v = {v}, p = {p}: ratio {} outside [{lo}, {hi}]", row.ratio));
        }
    }
    out
}

/// Verdicts (when `L` is proportional to `−K`) use `tol` for non-integer `p`.
pub fn delta_family(tm: &ToricModel, grid: &[f64], bound: u32, tol: f64) -> Result<InvariantReport> {
    let n = tm.dim() as u32;
    let alpha = alpha_candidate(tm, bound)?;
    let lambda = tm.anticanonical_multiple();
    let base = candidate_table(tm, 1.0, bound)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut bracket = Vec::new();
    for &p in grid {
        let search = delta_p_search(tm, p, bound)?;
        for (row, b) in search.table.iter().zip(&base) {
            bracket.extend(bracket_violations(n, p, row, b.s_p_exact.as_ref().expect("p = 1 is exact")));
        }
        let threshold = kstability_threshold(n, p);
        let verdict = lambda
            .as_ref()
            .map(|l| verdict_from_search(n, l, &search, tol).verdict);
        rows.push(FamilyRow {
            p,
            search,
            threshold,
            verdict,
        });
    }
    let mut violations = Vec::new();
    for w in rows.windows(2) {
        let increased = w[1].search.value > w[0].search.value * (1.0 + 1e-12);
        if increased && w[1].p > w[0].p {
            violations.push((w[0].p, w[1].p));
        }
    }
    let alpha_gap = rows
        .iter()
        .max_by(|a, b| a.p.total_cmp(&b.p))
        .map(|r| r.search.value - to_f64(&alpha.value));
    let sandwich_holds = rows.iter().find(|r| r.p == 1.0).map(|r| {
        let d = r.search.value_pow.clone().expect("p = 1 is exact");
        let a = &alpha.value;
        let nn = int(n as i64);
        (&nn + Rational::one()) / &nn * a <= d && d <= (nn + Rational::one()) * a
    });
    Ok(InvariantReport {
        n,
        bound,
        alpha,
        rows,
        nonincreasing_violations: violations,
        alpha_gap,
        bracket_violations: bracket,
        sandwich_holds,
    })
}

/// `δ̄^(p) = A / (∫_0^τ p x^{p−1} vol(x) dx)^{1/p} = A / (V S^(p))^{1/p}`.
pub fn delta_bar_p(tm: &ToricModel, tv: &ToricValuation, p: f64) -> Result<f64> {
    let a = log_discrepancy(tm, tv)?;
    let curve = volume_curve_of(tm, tv)?;
    let s = s_p_f64(&curve, p)?;
    Ok(to_f64(&a) / (to_f64(curve.volume()) * s).powf(1.0 / p))
}

/// `δ̄^(p)` raised to the `p`, exact for integer `p`.
pub fn delta_bar_p_pow(tm: &ToricModel, tv: &ToricValuation, p: u32) -> Result<Rational> {
    let a = log_discrepancy(tm, tv)?;
    let curve = volume_curve_of(tm, tv)?;
    let s = s_p(&curve, p)?;
    if !s.is_positive() {
        return Err(Error::Domain("S^(p) vanishes".into()));
    }
    Ok(pow(&a, p) / (curve.volume() * s))
}

/// `δ^(p)` upper bounds of `L + t D_ρ` (support number of ray `ρ` raised
/// by `t`) along a t-grid. Exploratory only.
pub fn continuity_scan(tm: &ToricModel, p: f64, bound: u32, ray: usize, ts: &[Rational]) -> Result<Vec<(Rational, f64)>> {
    let base = tm.support();
    if ray >= base.len() {
        return Err(Error::Argument(format!("ray index {ray} out of range")));
    }
    ts.iter()
        .map(|t| {
            let mut support = base.clone();
            support[ray] += t;
            let model = tm.with_support(&support)?;
            Ok((t.clone(), delta_p_search(&model, p, bound)?.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn alpha_values() {
        let k = ToricModel::builtin("p2-anticanonical").unwrap();
        assert_eq!(alpha_candidate(&k, 3).unwrap().value, rat(1, 3));
        let p1 = ToricModel::builtin("pn:1").unwrap().with_support(&[int(0), int(2)]).unwrap();
        assert_eq!(alpha_candidate(&p1, 2).unwrap().value, rat(1, 2));
        let p2 = ToricModel::builtin("p2").unwrap();
        assert_eq!(alpha_candidate(&p2, 3).unwrap().value, int(1));
    }

    #[test]
    fn threshold_arithmetic() {
        assert!((kstability_threshold(2, 2.0) - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert!(h_zero_exact(2, 1) && h_zero_exact(5, 1));
        for p in 2..=6 {
            assert!(h_positive_exact(2, p));
            assert!(h_function(2, p as f64) > 0.0);
        }
        assert!((projective_space_delta(2, 2.0) - 6f64.sqrt() / 3.0).abs() < 1e-12);
        assert_eq!(projective_space_delta_pow(2, 2), rat(2, 3));
    }

    #[test]
    fn verdicts() {
        let p1 = ToricModel::builtin("pn:1").unwrap();
        for p in [2.0, 3.0] {
            assert_eq!(kstability_verdict(&p1, p, 2, BORDERLINE_TOL).unwrap().verdict, Verdict::Borderline);
        }
        let p2 = ToricModel::builtin("p2").unwrap();
        let r = kstability_verdict(&p2, 2.0, 3, BORDERLINE_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::BelowThreshold);
        assert_eq!(r.delta_pow, Some(rat(2, 3)));
        assert_eq!(r.h_positive, Some(true));
        let q = ToricModel::builtin("p1xp1").unwrap();
        // δ(−K) = 1 equals the p = 1 threshold.
        assert_eq!(kstability_verdict(&q, 1.0, 2, BORDERLINE_TOL).unwrap().verdict, Verdict::Borderline);
        assert_eq!(kstability_verdict(&q, 2.0, 2, BORDERLINE_TOL).unwrap().delta_pow, Some(rat(3, 4)));
        let bl = ToricModel::builtin("hirzebruch-1").unwrap();
        assert!(matches!(kstability_verdict(&bl, 1.0, 2, BORDERLINE_TOL), Err(Error::Argument(_))));
    }

    #[test]
    fn family_report() {
        let k = ToricModel::builtin("p2-anticanonical").unwrap();
        let r = delta_family(&k, &[1.0, 2.0, 4.0, 8.0, 16.0], 2, BORDERLINE_TOL).unwrap();
        assert!(r.is_consistent(), "{:?}", r.bracket_violations);
        assert_eq!(r.rows[0].search.exact_value(), Some(int(1)));
        assert!(r.alpha_gap.unwrap() > 0.0);
        assert_eq!(r.csv_rows()[0][1], "1");
    }

    #[test]
    fn delta_bar_values_and_scaling() {
        let k = ToricModel::builtin("p2-anticanonical").unwrap();
        let tv = ToricValuation::new(&k, vec![1, 0]).unwrap();
        assert_eq!(delta_bar_p_pow(&k, &tv, 1).unwrap(), rat(1, 9));
        let big = k.with_support(&k.support().iter().map(|a| a * int(2)).collect::<Vec<_>>()).unwrap();
        let tvb = ToricValuation::new(&big, vec![1, 0]).unwrap();
        assert_eq!(delta_bar_p_pow(&big, &tvb, 1).unwrap() * int(8), rat(1, 9));
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(0.816496580927726), "0.816496580928");
    }
}
