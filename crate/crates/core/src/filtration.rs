// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Filtrations of section spaces at a fixed level: jumping numbers, their
//! moments, compatible bases, rounding, and the monomial generated
//! approximations.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::linalg::{dot, nullspace, rank, rref};
use crate::numeric::rational::{pow, to_f64};
use crate::numeric::{format_rational, int, Rational};
use crate::okounkov::RationalPolytope;

/// A nested chain of subspaces of `Q^d`, each given by spanning rows.
pub type Flag = Vec<Vec<Vec<Rational>>>;

/// Jumping numbers `a_1 ≤ … ≤ a_d` at level `m`, optionally realized by a flag.
///
/// When present, `flag[k]` spans `F^{b_k}` where `b_0 < b_1 < …` are the
/// distinct jumps, so `dim flag[k] = #{j : a_j ≥ b_k}` and `flag[0] = Q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagFiltration {
    m: u32,
    jumps: Vec<Rational>,
    flag: Option<Flag>,
}

impl FlagFiltration {
    pub fn new(m: u32, jumps: Vec<Rational>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("level m must be positive".into()));
        }
        if jumps.is_empty() {
            return Err(Error::Argument("a filtration needs at least one jump".into()));
        }
        if let Some(w) = jumps.windows(2).find(|w| w[0] > w[1]) {
            return Err(Error::Structure(format!(
                "jumps not sorted: {} > {}",
                format_rational(&w[0]),
                format_rational(&w[1])
            )));
        }
        if jumps[0].is_negative() {
            return Err(Error::Structure("jumps must be nonnegative".into()));
        }
        Ok(FlagFiltration { m, jumps, flag: None })
    }

    /// Attaches a flag, checking nesting and dimensions against the jumps.
    pub fn with_flag(self, flag: Flag) -> Result<Self> {
        let d = self.jumps.len();
        let levels = self.distinct_jumps();
        if flag.len() != levels.len() {
            return Err(Error::Structure(format!(
                "flag has {} members for {} distinct jumps",
                flag.len(),
                levels.len()
            )));
        }
        for (k, (member, b)) in flag.iter().zip(&levels).enumerate() {
            if member.iter().any(|r| r.len() != d) {
                return Err(Error::Structure(format!("flag member {k} is not in dimension {d}")));
            }
            let want = self.jumps.iter().filter(|a| *a >= b).count();
            if rank(member) != want {
                return Err(Error::Structure(format!(
                    "flag member {k} has dimension {} but {want} jumps are ≥ {}",
                    rank(member),
                    format_rational(b)
                )));
            }
            if k > 0 {
                let mut joined = flag[k - 1].clone();
                joined.extend(member.iter().cloned());
                if rank(&joined) != rank(&flag[k - 1]) {
                    return Err(Error::Structure(format!("flag member {k} is not contained in member {}", k - 1)));
                }
            }
        }
        Ok(FlagFiltration {
            flag: Some(flag),
            ..self
        })
    }

    /// Jumps with the coordinate flag `F^{b} = span{e_j : a_j ≥ b}`.
    pub fn monomial(m: u32, jumps: Vec<Rational>) -> Result<Self> {
        let f = FlagFiltration::new(m, jumps)?;
        let d = f.jumps.len();
        let flag = f
            .distinct_jumps()
            .iter()
            .map(|b| {
                (0..d)
                    .filter(|&j| f.jumps[j] >= *b)
                    .map(|j| unit(d, j))
                    .collect()
            })
            .collect();
        f.with_flag(flag)
    }

    /// Monomial flag pulled back along an invertible change of basis `g`:
    /// `F^b = span{g e_j : a_j ≥ b}`.
    pub fn transformed(m: u32, jumps: Vec<Rational>, g: &[Vec<Rational>]) -> Result<Self> {
        let d = jumps.len();
        if g.len() != d || rank(g) != d {
            return Err(Error::Structure("change of basis must be invertible of size d".into()));
        }
        let f = FlagFiltration::new(m, jumps)?;
        let column = |j: usize| -> Vec<Rational> { (0..d).map(|i| g[i][j].clone()).collect() };
        let flag = f
            .distinct_jumps()
            .iter()
            .map(|b| (0..d).filter(|&j| f.jumps[j] >= *b).map(column).collect())
            .collect();
        f.with_flag(flag)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.jumps.len()
    }

    pub fn jumps(&self) -> &[Rational] {
        &self.jumps
    }

    pub fn flag(&self) -> Option<&Flag> {
        self.flag.as_ref()
    }

    pub fn distinct_jumps(&self) -> Vec<Rational> {
        let mut v = self.jumps.clone();
        v.dedup();
        v
    }

    /// `codim F^λ = #{j : a_j < λ}`.
    pub fn codim(&self, lambda: &Rational) -> usize {
        self.jumps.iter().filter(|a| *a < lambda).count()
    }

    /// `ord(s) = max{λ : s ∈ F^λ}` against the flag; `None` without a flag
    /// or for the zero vector.
    pub fn ord(&self, s: &[Rational]) -> Option<Rational> {
        let annihilators = self.annihilators()?;
        self.ord_with(&annihilators, s)
    }

    /// Per flag member, a basis of the linear forms vanishing on it.
    fn annihilators(&self) -> Option<Vec<Vec<Vec<Rational>>>> {
        let flag = self.flag.as_ref()?;
        Some(flag.iter().map(|member| nullspace(member, self.d())).collect())
    }

    fn ord_with(&self, annihilators: &[Vec<Vec<Rational>>], s: &[Rational]) -> Option<Rational> {
        if s.iter().all(Zero::is_zero) {
            return None;
        }
        let levels = self.distinct_jumps();
        (0..annihilators.len())
            .rev()
            .find(|&k| annihilators[k].iter().all(|a| dot(a, s).is_zero()))
            .map(|k| levels[k].clone())
    }

    /// `(1/d) Σ (ord(s_i)/m)^p` for a basis `s`.
    pub fn basis_moment(&self, basis: &[Vec<Rational>], p: u32) -> Result<Rational> {
        if basis.len() != self.d() || rank(basis) != self.d() {
            return Err(Error::Argument("not a basis".into()));
        }
        let annihilators = self.annihilators().ok_or_else(|| Error::Argument("filtration has no flag".into()))?;
        Ok(self.independent_moment(&annihilators, basis, p))
    }

    fn independent_moment(&self, annihilators: &[Vec<Vec<Rational>>], basis: &[Vec<Rational>], p: u32) -> Rational {
        let m = int(self.m as i64);
        let mut total = Rational::zero();
        for s in basis {
            let ord = self.ord_with(annihilators, s).expect("nonzero basis vector");
            total += pow(&(ord / &m), p);
        }
        total / int(self.d() as i64)
    }
}

fn unit(d: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[j] = int(1);
    v
}

/// `(1/d) Σ (a_j/m)^p`.
pub fn s_m_p(f: &FlagFiltration, p: u32) -> Rational {
    let m = int(f.m as i64);
    let total: Rational = f.jumps.iter().map(|a| pow(&(a / &m), p)).sum();
    total / int(f.d() as i64)
}

/// Real-exponent version of [`s_m_p`].
pub fn s_m_p_real(f: &FlagFiltration, p: f64) -> f64 {
    let m = f.m as f64;
    f.jumps.iter().map(|a| (to_f64(a) / m).powf(p)).sum::<f64>() / f.d() as f64
}

/// `a_d / m`.
pub fn t_m(f: &FlagFiltration) -> Rational {
    f.jumps.last().expect("nonempty") / int(f.m as i64)
}

/// `F_ℕ^λ = F^{⌈λ⌉}`: jumps become floors; flag members sharing a floor merge
/// into the largest of them.
pub fn round_to_integer_filtration(f: &FlagFiltration) -> FlagFiltration {
    let jumps: Vec<Rational> = f.jumps.iter().map(|a| a.floor()).collect();
    let flag = f.flag.as_ref().map(|flag| {
        let levels = f.distinct_jumps();
        let mut out: Flag = Vec::new();
        let mut last: Option<Rational> = None;
        for (member, b) in flag.iter().zip(&levels) {
            let fl = b.floor();
            if last.as_ref() != Some(&fl) {
                out.push(member.clone());
                last = Some(fl);
            }
        }
        out
    });
    FlagFiltration { m: f.m, jumps, flag }
}

/// `(1/d) Σ_{j ≥ 1} (j/m)^p (dim F^j − dim F^{j+1})` for an ℕ-filtration.
pub fn telescoping_s_m_p(f: &FlagFiltration, p: u32) -> Result<Rational> {
    if let Some(a) = f.jumps.iter().find(|a| !a.is_integer()) {
        return Err(Error::Argument(format!("jump {} is not an integer", format_rational(a))));
    }
    let top = f.jumps.last().expect("nonempty").to_integer().to_u64().expect("jump fits in u64");
    let dim_at = |j: u64| -> i64 { (f.d() - f.codim(&int(j as i64))) as i64 };
    let m = int(f.m as i64);
    let mut total = Rational::zero();
    for j in 1..=top {
        let diff = dim_at(j) - dim_at(j + 1);
        total += pow(&(int(j as i64) / &m), p) * int(diff);
    }
    Ok(total / int(f.d() as i64))
}

/// Basis of `Q^d` in which every chain member is spanned by a suffix.
///
/// The chain is listed from largest to smallest; `Q^d` is implied when the
/// first member is proper. Each step extends the deeper span by reduced rows
/// of the next member in pivot order.
pub fn compatible_basis(chain: &[Vec<Vec<Rational>>], d: usize) -> Result<Vec<Vec<Rational>>> {
    let mut members: Vec<Vec<Vec<Rational>>> = Vec::new();
    let full: Vec<Vec<Rational>> = (0..d).map(|j| unit(d, j)).collect();
    if chain.first().map_or(true, |c| rank(c) < d) {
        members.push(full);
    }
    members.extend(chain.iter().cloned());
    for (k, m) in members.iter().enumerate() {
        if m.iter().any(|r| r.len() != d) {
            return Err(Error::Structure(format!("chain member {k} is not in dimension {d}")));
        }
        if k > 0 {
            let prev = rank(&members[k - 1]);
            let mut joined = members[k - 1].clone();
            joined.extend(m.iter().cloned());
            if rank(&joined) != prev {
                return Err(Error::Structure(format!("chain member {k} is not contained in its predecessor")));
            }
            if rank(m) >= prev {
                return Err(Error::Structure(format!("chain member {k} is not strictly smaller")));
            }
        }
    }
    let mut span: Vec<Vec<Rational>> = Vec::new();
    let mut blocks: Vec<Vec<Vec<Rational>>> = Vec::new();
    for member in members.iter().rev() {
        let mut reduced = member.clone();
        let pivots = rref(&mut reduced);
        let mut block = Vec::new();
        for row in reduced.into_iter().take(pivots.len()) {
            let mut trial = span.clone();
            trial.push(row.clone());
            if rank(&trial) > span.len() {
                span.push(row.clone());
                block.push(row);
            }
        }
        blocks.push(block);
    }
    Ok(blocks.into_iter().rev().flatten().collect())
}

/// Random bases near the flag: integer combinations with entries in
/// `{−3, …, 3}` of a compatible basis, rejecting singular draws.
/// Returns the largest basis moment seen. Deterministic for a given seed.
pub fn sup_over_bases_oracle(f: &FlagFiltration, p: u32, samples: usize, seed: u64) -> Result<Rational> {
    let flag = f.flag.as_ref().ok_or_else(|| Error::Argument("oracle needs a flag".into()))?;
    let adapted = compatible_basis(flag, f.d())?;
    let annihilators = f.annihilators().expect("flag present");
    const CHUNK: usize = 64;
    let chunks = samples.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Option<Rational>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best: Option<Rational> = None;
            let mut drawn = 0;
            while drawn < count {
                let basis = random_combination(&mut rng, &adapted);
                if rank(&basis) < f.d() {
                    continue;
                }
                drawn += 1;
                let v = f.independent_moment(&annihilators, &basis, p);
                if best.as_ref().map_or(true, |b| v > *b) {
                    best = Some(v);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    best.into_iter()
        .flatten()
        .max()
        .ok_or_else(|| Error::Argument("oracle needs at least one sample".into()))
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = basis.len();
    (0..d)
        .map(|_| {
            let coeffs: Vec<Rational> = (0..d).map(|_| int(rng.gen_range(-3..=3))).collect();
            (0..d)
                .map(|i| (0..d).map(|k| &coeffs[k] * &basis[k][i]).sum())
                .collect()
        })
        .collect()
}

/// Monomial filtration `w_m(u) = scale·(⟨u, v⟩ − m·min_P⟨·, v⟩)` on the
/// lattice points of `mP`.
#[derive(Clone, Debug)]
pub struct MonomialGradedFiltration {
    polytope: RationalPolytope,
    v: Vec<i64>,
    scale: Rational,
    min_value: Rational,
}

impl MonomialGradedFiltration {
    pub fn new(polytope: RationalPolytope, v: Vec<i64>, scale: Rational) -> Result<Self> {
        if v.len() != polytope.dim() {
            return Err(Error::Structure("valuation vector has the wrong dimension".into()));
        }
        if !scale.is_positive() {
            return Err(Error::Argument("scale must be positive".into()));
        }
        let vr: Vec<Rational> = v.iter().map(|&c| int(c)).collect();
        let min_value = polytope
            .vertices()
            .iter()
            .map(|u| dot(u, &vr))
            .min()
            .expect("nonempty");
        Ok(MonomialGradedFiltration {
            polytope,
            v,
            scale,
            min_value,
        })
    }

    pub fn polytope(&self) -> &RationalPolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// Lattice points of `kP` (`{0}` for `k = 0`).
    pub fn points(&self, k: u32) -> Vec<Vec<i64>> {
        if k == 0 {
            return vec![vec![0; self.dim()]];
        }
        self.polytope.scale(&int(k as i64)).expect("positive").lattice_points()
    }

    pub fn weight(&self, m: u32, u: &[i64]) -> Rational {
        let uv: i64 = u.iter().zip(&self.v).map(|(a, b)| a * b).sum();
        &self.scale * (int(uv) - &self.min_value * int(m as i64))
    }

    /// Level-`m` filtration with one jump per lattice point of `mP`.
    pub fn level(&self, m: u32) -> Result<FlagFiltration> {
        let mut jumps: Vec<Rational> = self.points(m).iter().map(|u| self.weight(m, u)).collect();
        jumps.sort();
        FlagFiltration::new(m, jumps)
    }
}

/// Largest level handled by [`generated_filtration`].
pub const MAX_GENERATED_LEVEL: u32 = 20;
/// Largest dimension handled by [`generated_filtration`].
pub const MAX_GENERATED_DIM: usize = 2;

/// Weights of the filtration generated at level `m`, evaluated at level `k`.
#[derive(Clone, Debug)]
pub struct GeneratedWeights {
    pub k: u32,
    pub points: Vec<Vec<i64>>,
    pub weights: Vec<Rational>,
    /// Points of `kP` with no decomposition through level `m`; weight 0.
    pub infeasible: Vec<bool>,
}

impl GeneratedWeights {
    pub fn as_filtration(&self) -> Result<FlagFiltration> {
        let mut jumps = self.weights.clone();
        jumps.sort();
        FlagFiltration::new(self.k, jumps)
    }
}

/// Level-`k` weights of the filtration generated by the ℕ-rounded level-`m`
/// weights `⌊w_m⌋`: the best `Σ ⌊w_m(u_i)⌋` over `u = u_1 + … + u_r + u_0`
/// with `u_i ∈ mP`, `u_0 ∈ (k − rm)P`. Zero below level `m`.
pub fn generated_filtration(base: &MonomialGradedFiltration, m: u32, k: u32) -> Result<GeneratedWeights> {
    if m == 0 || k == 0 {
        return Err(Error::Argument("levels must be positive".into()));
    }
    if k > MAX_GENERATED_LEVEL || base.dim() > MAX_GENERATED_DIM {
        return Err(Error::Unsupported(format!(
            "generated filtration capped at k ≤ {MAX_GENERATED_LEVEL}, n ≤ {MAX_GENERATED_DIM}"
        )));
    }
    let points = base.points(k);
    if k < m {
        let n = points.len();
        return Ok(GeneratedWeights {
            k,
            points,
            weights: vec![Rational::zero(); n],
            infeasible: vec![false; n],
        });
    }
    let level_m: Vec<(Vec<i64>, Rational)> = base
        .points(m)
        .into_iter()
        .map(|u| {
            let w = base.weight(m, &u).floor();
            (u, w)
        })
        .collect();
    let rounds = k / m;
    // best[r - 1]: max total weight of r level-m factors summing to a point of rmP.
    let mut best: Vec<HashMap<Vec<i64>, Rational>> = vec![level_m.iter().cloned().collect()];
    for _ in 1..rounds {
        let prev = best.last().expect("nonempty");
        let mut next: HashMap<Vec<i64>, Rational> = HashMap::new();
        for (u, w) in prev {
            for (u1, w1) in &level_m {
                let s: Vec<i64> = u.iter().zip(u1).map(|(a, b)| a + b).collect();
                let total = w + w1;
                match next.get(&s) {
                    Some(cur) if *cur >= total => {}
                    _ => {
                        next.insert(s, total);
                    }
                }
            }
        }
        best.push(next);
    }
    let mut weights = Vec::with_capacity(points.len());
    let mut infeasible = Vec::with_capacity(points.len());
    let remainders: Vec<Vec<Vec<i64>>> = (1..=rounds).map(|r| base.points(k - r * m)).collect();
    for u in &points {
        let mut top: Option<Rational> = None;
        for r in 1..=rounds {
            for u0 in &remainders[(r - 1) as usize] {
                let rest: Vec<i64> = u.iter().zip(u0).map(|(a, b)| a - b).collect();
                if let Some(w) = best[(r - 1) as usize].get(&rest) {
                    if top.as_ref().map_or(true, |t| w > t) {
                        top = Some(w.clone());
                    }
                }
            }
        }
        infeasible.push(top.is_none());
        weights.push(top.unwrap_or_else(Rational::zero));
    }
    Ok(GeneratedWeights {
        k,
        points,
        weights,
        infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn simplex(k: i64) -> RationalPolytope {
        RationalPolytope::from_vertices(2, vec![ints(&[0, 0]), ints(&[k, 0]), ints(&[0, k])]).unwrap()
    }

    #[test]
    fn jump_moments() {
        let f = FlagFiltration::new(1, ints(&[0, 1, 2])).unwrap();
        assert_eq!(s_m_p(&f, 1), int(1));
        assert_eq!(s_m_p(&f, 2), rat(5, 3));
        assert_eq!(t_m(&f), int(2));
        assert_eq!(t_m(&FlagFiltration::new(3, ints(&[0, 0])).unwrap()), int(0));
        assert_eq!(telescoping_s_m_p(&f, 2).unwrap(), rat(5, 3));
    }

    #[test]
    fn unsorted_jumps_rejected() {
        assert!(matches!(FlagFiltration::new(1, ints(&[2, 1])), Err(Error::Structure(_))));
    }

    #[test]
    fn toric_level_values() {
        let base = MonomialGradedFiltration::new(simplex(1), vec![1, 0], int(1)).unwrap();
        let f2 = base.level(2).unwrap();
        assert_eq!(f2.d(), 6);
        assert_eq!(s_m_p(&f2, 1), rat(1, 3));
        assert_eq!(t_m(&base.level(3).unwrap()), int(1));
    }

    #[test]
    fn rounding() {
        let f = FlagFiltration::monomial(1, vec![rat(1, 2), rat(17, 10)]).unwrap();
        let r = round_to_integer_filtration(&f);
        assert_eq!(r.jumps(), ints(&[0, 1]).as_slice());
        assert_eq!(r.flag().unwrap().len(), 2);
        let merged = round_to_integer_filtration(&FlagFiltration::monomial(1, vec![rat(1, 3), rat(2, 3)]).unwrap());
        assert_eq!(merged.flag().unwrap().len(), 1);
    }

    #[test]
    fn compatible_bases() {
        let chain = vec![vec![ints(&[1, 1])]];
        let b = compatible_basis(&chain, 2).unwrap();
        assert!(b.contains(&ints(&[1, 1])));
        assert_eq!(compatible_basis(&[], 3).unwrap(), vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
        let bad = vec![vec![ints(&[1, 0])], vec![ints(&[0, 1])]];
        assert!(matches!(compatible_basis(&bad, 2), Err(Error::Structure(_))));
    }

    #[test]
    fn oracle_matches_on_monomial_flag() {
        let f = FlagFiltration::monomial(1, ints(&[0, 1, 3])).unwrap();
        let basis = compatible_basis(f.flag().unwrap(), 3).unwrap();
        assert_eq!(f.basis_moment(&basis, 2).unwrap(), s_m_p(&f, 2));
        assert_eq!(sup_over_bases_oracle(&f, 2, 1000, 7).unwrap(), s_m_p(&f, 2));
        assert_eq!(sup_over_bases_oracle(&f, 2, 300, 1).unwrap(), sup_over_bases_oracle(&f, 2, 300, 1).unwrap());
    }

    #[test]
    fn generated_weights() {
        // P^1 with O(2) and v a vertex: w_m(u) = u on [0, 2m].
        let p1 = RationalPolytope::from_vertices(1, vec![ints(&[0]), ints(&[2])]).unwrap();
        let base = MonomialGradedFiltration::new(p1, vec![1], int(1)).unwrap();
        let low = generated_filtration(&base, 3, 2).unwrap();
        assert!(low.weights.iter().all(Zero::is_zero));
        let g = generated_filtration(&base, 2, 4).unwrap();
        for (u, w) in g.points.iter().zip(&g.weights) {
            assert_eq!(*w, base.weight(4, u));
        }
        let g = generated_filtration(&base, 2, 5).unwrap();
        for (u, w) in g.points.iter().zip(&g.weights) {
            assert!(*w <= base.weight(5, u));
        }
    }
}
