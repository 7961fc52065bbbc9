// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Polarized toric models: normal fans, log discrepancies of toric
//! valuations, their volume curves and section filtrations, and the search
//! for `δ^(p)` upper bounds over primitive directions.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::FlagFiltration;
use crate::numeric::linalg::{dot, solve};
use crate::numeric::rational::{factorial, pow};
use crate::numeric::{format_rational, int, to_f64, Rational};
use crate::okounkov::{self, AffineForm, ConcaveTransform, Halfspace, RationalPolytope};
use crate::volume_curve::{s_p, s_p_f64, VolumeCurve};

/// Complete fan given as the normal fan of a reference polytope.
#[derive(Clone, Debug)]
pub struct Fan {
    reference: RationalPolytope,
    rays: Vec<Vec<i64>>,
    /// Ray indices of the maximal cone at each reference vertex.
    cones: Vec<Vec<usize>>,
    /// `m_σ` with `⟨m_σ, u_ρ⟩ = 1` on the rays of each cone, when solvable everywhere.
    gorenstein: Option<Vec<Vec<Rational>>>,
}

impl Fan {
    pub fn normal_fan(p: &RationalPolytope) -> Result<Self> {
        if !p.is_full_dimensional() {
            return Err(Error::Argument("toric polytope must be full-dimensional".into()));
        }
        let rays: Vec<Vec<i64>> = p
            .facets()
            .iter()
            .map(|h| {
                h.normal
                    .iter()
                    .map(|c| c.to_integer().to_i64().expect("ray fits in i64"))
                    .collect()
            })
            .collect();
        let cones: Vec<Vec<usize>> = p
            .vertices()
            .iter()
            .map(|w| {
                (0..rays.len())
                    .filter(|&i| p.facets()[i].eval(w).is_zero())
                    .collect()
            })
            .collect();
        let gorenstein: Option<Vec<Vec<Rational>>> = cones
            .iter()
            .map(|cone| {
                let a: Vec<Vec<Rational>> = cone.iter().map(|&i| ray_rational(&rays[i])).collect();
                let b = vec![Rational::one(); cone.len()];
                solve(&a, &b)
            })
            .collect();
        Ok(Fan {
            reference: p.clone(),
            rays,
            cones,
            gorenstein,
        })
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn is_q_gorenstein(&self) -> bool {
        self.gorenstein.is_some()
    }

    /// Index of a maximal cone containing `v`: the cone of a reference
    /// vertex minimizing `⟨·, v⟩` (the smallest such index).
    pub fn cone_containing(&self, v: &[i64]) -> usize {
        let vr = ray_rational(v);
        let vals: Vec<Rational> = self.reference.vertices().iter().map(|w| dot(w, &vr)).collect();
        let min = vals.iter().min().expect("nonempty");
        vals.iter().position(|x| x == min).expect("present")
    }

    /// `A(v) = ⟨m_σ, v⟩` for `σ ∋ v`.
    pub fn log_discrepancy(&self, v: &[i64]) -> Result<Rational> {
        let ms = self
            .gorenstein
            .as_ref()
            .ok_or_else(|| Error::Unsupported("normal fan is not Q-Gorenstein".into()))?;
        let a = dot(&ms[self.cone_containing(v)], &ray_rational(v));
        if !a.is_positive() {
            return Err(Error::invariant(
                "ToricModel.log_discrepancy_positive",
                format!("A({v:?}) = {}", format_rational(&a)),
            ));
        }
        Ok(a)
    }

    /// `{u : ⟨u, u_ρ⟩ ≥ −a_ρ}`.
    pub fn polytope_with_support(&self, support: &[Rational]) -> Result<RationalPolytope> {
        if support.len() != self.rays.len() {
            return Err(Error::Structure(format!(
                "{} support numbers for {} rays",
                support.len(),
                self.rays.len()
            )));
        }
        let hs: Vec<Halfspace> = self
            .rays
            .iter()
            .zip(support)
            .map(|(r, a)| Halfspace::new(ray_rational(r), a.clone()))
            .collect();
        RationalPolytope::from_halfspaces(self.dim(), &hs)
    }
}

fn ray_rational(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&c| int(c)).collect()
}

/// A fan together with a polytope defining the polarization.
#[derive(Clone, Debug)]
pub struct ToricModel {
    fan: Fan,
    polytope: RationalPolytope,
}

impl ToricModel {
    /// Model whose fan is the normal fan of `p`.
    pub fn from_polytope(p: RationalPolytope) -> Result<Self> {
        let fan = Fan::normal_fan(&p)?;
        Ok(ToricModel { fan, polytope: p })
    }

    /// Same fan, polytope `{⟨u, u_ρ⟩ ≥ −a_ρ}`.
    pub fn with_support(&self, support: &[Rational]) -> Result<Self> {
        Ok(ToricModel {
            fan: self.fan.clone(),
            polytope: self.fan.polytope_with_support(support)?,
        })
    }

    /// Polytope of `−K`: all support numbers equal to one.
    pub fn anticanonical(&self) -> Result<Self> {
        self.with_support(&vec![Rational::one(); self.fan.rays.len()])
    }

    /// Reads `{"dim": n, "vertices": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_polytope(RationalPolytope::from_json(text)?)
    }

    /// Built-in models: `p2`, `p2-anticanonical`, `p1xp1`, `pn:<n>`,
    /// `hirzebruch-<a>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let pts = |raw: &[&[i64]]| -> Vec<Vec<Rational>> { raw.iter().map(|r| ray_rational(r)).collect() };
        let simplex = |n: usize, k: i64| -> Vec<Vec<Rational>> {
            let mut v = vec![vec![Rational::zero(); n]];
            for i in 0..n {
                let mut e = vec![Rational::zero(); n];
                e[i] = int(k);
                v.push(e);
            }
            v
        };
        let polytope = match name {
            "p2" => RationalPolytope::from_vertices(2, simplex(2, 1))?,
            "p2-anticanonical" => RationalPolytope::from_vertices(2, simplex(2, 3))?,
            "p1xp1" => RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]))?,
            _ => {
                if let Some(n) = name.strip_prefix("pn:") {
                    let n: usize = n.parse().map_err(|_| Error::Argument(format!("bad dimension in {name}")))?;
                    if !(1..=6).contains(&n) {
                        return Err(Error::Unsupported(format!("projective space dimension {n} outside 1..=6")));
                    }
                    RationalPolytope::from_vertices(n, simplex(n, 1))?
                } else if let Some(a) = name.strip_prefix("hirzebruch-") {
                    let a: i64 = a.parse().map_err(|_| Error::Argument(format!("bad twist in {name}")))?;
                    if a < 0 {
                        return Err(Error::Argument("Hirzebruch twist must be nonnegative".into()));
                    }
                    RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 0], &[1 + a, 1], &[0, 1]]))?
                } else {
                    return Err(Error::Argument(format!("unknown built-in model {name}")));
                }
            }
        };
        Self::from_polytope(polytope)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn polytope(&self) -> &RationalPolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// `n! vol P`.
    pub fn volume(&self) -> Rational {
        self.polytope.volume() * factorial(self.dim() as u32)
    }

    /// Support numbers `a_ρ = −min_P ⟨·, u_ρ⟩`.
    pub fn support(&self) -> Vec<Rational> {
        self.fan
            .rays
            .iter()
            .map(|r| {
                let rr = ray_rational(r);
                -self.polytope.vertices().iter().map(|w| dot(w, &rr)).min().expect("nonempty")
            })
            .collect()
    }

    /// `λ` with `a_ρ + ⟨c, u_ρ⟩ = λ` for every ray, i.e. `L ≡ λ(−K)` up to
    /// translation; `None` when no such `λ > 0` exists.
    pub fn anticanonical_multiple(&self) -> Option<Rational> {
        let n = self.dim();
        let a: Vec<Vec<Rational>> = self
            .fan
            .rays
            .iter()
            .map(|r| {
                let mut row = ray_rational(r);
                row.push(-Rational::one());
                row
            })
            .collect();
        let b: Vec<Rational> = self.support().into_iter().map(|x| -x).collect();
        let sol = solve(&a, &b)?;
        let lambda = sol[n].clone();
        lambda.is_positive().then_some(lambda)
    }
}

/// A primitive direction `v` with `g_v(u) = ⟨u, v⟩ + c ≥ 0` on `P`, `min g_v = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricValuation {
    v: Vec<i64>,
    offset: Rational,
}

impl ToricValuation {
    pub fn new(tm: &ToricModel, v: Vec<i64>) -> Result<Self> {
        Self::on_polytope(tm.polytope(), v)
    }

    pub fn on_polytope(p: &RationalPolytope, v: Vec<i64>) -> Result<Self> {
        if v.len() != p.dim() {
            return Err(Error::Argument(format!("direction {v:?} is not in dimension {}", p.dim())));
        }
        if v.iter().all(|&c| c == 0) {
            return Err(Error::Argument("valuation direction must be nonzero".into()));
        }
        let g = v.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        if g != 1 {
            return Err(Error::Argument(format!("direction {v:?} is not primitive")));
        }
        let vr = ray_rational(&v);
        let offset = -p.vertices().iter().map(|w| dot(w, &vr)).min().expect("nonempty");
        Ok(ToricValuation { v, offset })
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn form(&self) -> AffineForm {
        AffineForm::new(ray_rational(&self.v), self.offset.clone())
    }

    pub fn eval(&self, u: &[i64]) -> Rational {
        let uv: i64 = u.iter().zip(&self.v).map(|(a, b)| a * b).sum();
        int(uv) + &self.offset
    }
}

/// The transform `g_v` on `P`.
pub fn concave_transform(tm: &ToricModel, tv: &ToricValuation) -> Result<ConcaveTransform> {
    ConcaveTransform::new(tm.polytope().clone(), vec![tv.form()])
}

/// `x ↦ n! vol{u ∈ P : g_v(u) ≥ x}`.
pub fn volume_curve_of(tm: &ToricModel, tv: &ToricValuation) -> Result<VolumeCurve> {
    let ct = concave_transform(tm, tv)?;
    okounkov::volume_curve(&ct, &factorial(tm.dim() as u32))
}

pub fn log_discrepancy(tm: &ToricModel, tv: &ToricValuation) -> Result<Rational> {
    tm.fan().log_discrepancy(tv.v())
}

/// Jumps `⟨u, v⟩ + m c` over the lattice points of `mP`.
pub fn section_filtration(tm: &ToricModel, tv: &ToricValuation, m: u32) -> Result<FlagFiltration> {
    if m == 0 {
        return Err(Error::Argument("level m must be positive".into()));
    }
    let mp = tm.polytope().scale(&int(m as i64))?;
    let mc = tv.offset() * int(m as i64);
    let mut jumps: Vec<Rational> = mp
        .lattice_points()
        .iter()
        .map(|u| {
            let uv: i64 = u.iter().zip(tv.v()).map(|(a, b)| a * b).sum();
            int(uv) + &mc
        })
        .collect();
    if jumps.is_empty() {
        return Err(Error::Argument(format!("{m}P has no lattice points")));
    }
    jumps.sort();
    FlagFiltration::new(m, jumps)
}

/// Primitive integer vectors with `‖v‖_∞ ≤ bound`, by sup norm and then
/// lexicographically, so ties in a search resolve to the shortest vector.
pub fn candidates(dim: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = bound as i64;
    let mut out = Vec::new();
    let mut cur = vec![-b; dim];
    loop {
        if cur.iter().fold(0i64, |acc, &c| acc.gcd(&c)) == 1 {
            out.push(cur.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                out.sort_by_key(|v| (v.iter().map(|c| c.abs()).max(), v.clone()));
                return out;
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
        }
    }
}

/// One candidate of the search.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateRow {
    pub v: Vec<i64>,
    #[serde(rename = "A", with = "crate::numeric::rational::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::numeric::rational::serde_rational")]
    pub tau: Rational,
    /// `S^(p)` exactly for integer `p`.
    #[serde(skip)]
    pub s_p_exact: Option<Rational>,
    #[serde(rename = "S_p")]
    pub s_p: f64,
    /// `A / S^(p)^{1/p}`.
    pub ratio: f64,
}

impl CandidateRow {
    /// `A^p / S^(p)`, exact for integer `p`.
    pub fn ratio_pow(&self, p: u32) -> Option<Rational> {
        self.s_p_exact.as_ref().map(|s| pow(&self.a, p) / s)
    }
}

/// Minimum of `A(v)/S^(p)(v)^{1/p}` over the candidate set. This is an
/// upper bound for `δ^(p)`; the infimum over all valuations may be smaller.
#[derive(Clone, Debug)]
pub struct DeltaSearch {
    pub p: f64,
    pub bound: u32,
    pub value: f64,
    /// `value^p` exactly, for integer `p`.
    pub value_pow: Option<Rational>,
    pub argmin: Vec<i64>,
    pub table: Vec<CandidateRow>,
}

fn integer_p(p: f64) -> Option<u32> {
    (p.fract() == 0.0 && (1.0..=64.0).contains(&p)).then_some(p as u32)
}

/// Rows for every candidate, in candidate order.
pub fn candidate_table(tm: &ToricModel, p: f64, bound: u32) -> Result<Vec<CandidateRow>> {
    if !tm.fan().is_q_gorenstein() {
        return Err(Error::Unsupported("normal fan is not Q-Gorenstein".into()));
    }
    if bound == 0 {
        return Err(Error::Argument("search bound must be at least 1".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p = {p} < 1")));
    }
    let exact = integer_p(p);
    candidates(tm.dim(), bound)
        .into_par_iter()
        .map(|v| {
            let tv = ToricValuation::new(tm, v)?;
            let a = log_discrepancy(tm, &tv)?;
            let curve = volume_curve_of(tm, &tv)?;
            let s_exact = match exact {
                Some(k) => Some(s_p(&curve, k)?),
                None => None,
            };
            let s = match &s_exact {
                Some(s) => to_f64(s),
                None => s_p_f64(&curve, p)?,
            };
            Ok(CandidateRow {
                v: tv.v().to_vec(),
                ratio: to_f64(&a) / s.powf(1.0 / p),
                a,
                tau: curve.tau().clone(),
                s_p_exact: s_exact,
                s_p: s,
            })
        })
        .collect()
}

pub fn delta_p_search(tm: &ToricModel, p: f64, bound: u32) -> Result<DeltaSearch> {
    let table = candidate_table(tm, p, bound)?;
    let exact = integer_p(p);
    // Strict improvement only, so ties keep the lexicographically first v.
    let mut best = 0;
    for i in 1..table.len() {
        let better = match exact {
            Some(k) => table[i].ratio_pow(k) < table[best].ratio_pow(k),
            None => table[i].ratio < table[best].ratio,
        };
        if better {
            best = i;
        }
    }
    let value_pow = exact.and_then(|k| table[best].ratio_pow(k));
    Ok(DeltaSearch {
        p,
        bound,
        value: table[best].ratio,
        value_pow,
        argmin: table[best].v.clone(),
        table,
    })
}

impl DeltaSearch {
    /// Exact value when it is rational (integer `p` and a perfect power).
    pub fn exact_value(&self) -> Option<Rational> {
        let k = integer_p(self.p)?;
        let vp = self.value_pow.as_ref()?;
        if k == 1 {
            return Some(vp.clone());
        }
        let root = |x: &num_bigint::BigInt| -> Option<num_bigint::BigInt> {
            let r = x.nth_root(k);
            (num_traits::pow(r.clone(), k as usize) == *x).then_some(r)
        };
        Some(Rational::new(root(vp.numer())?, root(vp.denom())?))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let delta = match self.exact_value() {
            Some(r) => serde_json::Value::String(format_rational(&r)),
            None => serde_json::json!(self.value),
        };
        serde_json::json!({
            "p": self.p,
            "delta_upper": delta,
            "argmin": self.argmin,
            "table": self.table,
        })
    }
}
