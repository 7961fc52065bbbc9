// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::linalg::{affine_dim, det, dot, nullspace, rank, solve, sub};
use crate::numeric::rational::{factorial, serde_rational};
use crate::numeric::{format_rational, Rational};

/// `⟨normal, x⟩ + offset ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) + &self.offset
    }

    /// Positive rescaling making the normal a primitive integer vector.
    pub fn primitive(&self) -> Self {
        if self.normal.iter().all(Zero::is_zero) {
            return self.clone();
        }
        let lcm = self
            .normal
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .normal
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let factor = Rational::new(lcm, gcd);
        Halfspace {
            normal: self.normal.iter().map(|c| c * &factor).collect(),
            offset: &self.offset * &factor,
        }
    }
}

/// A rational polytope held in both vertex and facet form.
///
/// Vertices are the extreme points in lexicographic order. Lower-dimensional
/// polytopes keep their points but carry no facets and have zero volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<Vec<Rational>>,
    facets: Vec<Halfspace>,
    full_dimensional: bool,
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl RationalPolytope {
    /// Convex hull of a finite point set.
    pub fn from_vertices(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("polytope dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::Argument("polytope needs at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Structure(format!("point of length {} in dimension {dim}", p.len())));
        }
        let mut pts: Vec<Vec<Rational>> = points;
        pts.sort();
        pts.dedup();
        let refs: Vec<&Vec<Rational>> = pts.iter().collect();
        if affine_dim(&refs) != Some(dim) {
            return Ok(RationalPolytope {
                dim,
                vertices: pts,
                facets: Vec::new(),
                full_dimensional: false,
            });
        }
        let mut facets: BTreeSet<Halfspace> = BTreeSet::new();
        combinations(pts.len(), dim, |subset| {
            let base = &pts[subset[0]];
            let diffs: Vec<Vec<Rational>> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
            let ns = nullspace(&diffs, dim);
            if ns.len() != 1 {
                return;
            }
            let mut h = Halfspace::new(ns[0].clone(), -dot(&ns[0], base));
            let (mut pos, mut neg) = (false, false);
            for p in &pts {
                let v = h.eval(p);
                pos |= v.is_positive();
                neg |= v.is_negative();
            }
            if pos && neg {
                return;
            }
            if neg {
                h = Halfspace::new(h.normal.iter().map(|c| -c).collect(), -h.offset);
            }
            facets.insert(h.primitive());
        });
        let facets: Vec<Halfspace> = facets.into_iter().collect();
        let vertices: Vec<Vec<Rational>> = pts
            .into_iter()
            .filter(|p| {
                let tight: Vec<Vec<Rational>> = facets
                    .iter()
                    .filter(|h| h.eval(p).is_zero())
                    .map(|h| h.normal.clone())
                    .collect();
                rank(&tight) == dim
            })
            .collect();
        Ok(RationalPolytope {
            dim,
            vertices,
            facets,
            full_dimensional: true,
        })
    }

    /// Bounded intersection of halfspaces.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        let mut points = Vec::new();
        combinations(halfspaces.len(), dim, |subset| {
            let a: Vec<Vec<Rational>> = subset.iter().map(|&i| halfspaces[i].normal.clone()).collect();
            if rank(&a) < dim {
                return;
            }
            let b: Vec<Rational> = subset.iter().map(|&i| -halfspaces[i].offset.clone()).collect();
            if let Some(x) = solve(&a, &b) {
                if halfspaces.iter().all(|h| !h.eval(&x).is_negative()) {
                    points.push(x);
                }
            }
        });
        if points.is_empty() {
            return Err(Error::Argument("halfspace system is empty or unbounded".into()));
        }
        let p = Self::from_vertices(dim, points)?;
        // Truncating an unbounded region produces a hull facet that is not
        // one of the inputs.
        if !p.full_dimensional {
            return Err(Error::Argument("halfspace system is unbounded or has empty interior".into()));
        }
        for h in &p.facets {
            if !halfspaces.iter().any(|g| g.primitive() == *h) {
                return Err(Error::Argument("halfspace system is unbounded".into()));
            }
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.full_dimensional
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if self.full_dimensional {
            self.facets.iter().all(|h| !h.eval(x).is_negative())
        } else {
            // Only used on full-dimensional bodies in practice.
            self.vertices.iter().any(|v| v.as_slice() == x)
        }
    }

    fn incidence(&self) -> Vec<Vec<usize>> {
        self.vertices
            .iter()
            .map(|v| {
                self.facets
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| h.eval(v).is_zero())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }

    /// Vertex pairs spanning an edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let inc = self.incidence();
        let mut edges = Vec::new();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let common: Vec<Vec<Rational>> = inc[i]
                    .iter()
                    .filter(|f| inc[j].contains(f))
                    .map(|&f| self.facets[f].normal.clone())
                    .collect();
                if common.len() + 1 >= self.dim && rank(&common) == self.dim - 1 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// `self ∩ h`; `None` when the intersection is empty.
    pub fn intersect(&self, h: &Halfspace) -> Option<RationalPolytope> {
        if h.normal.iter().all(Zero::is_zero) {
            return if h.offset.is_negative() { None } else { Some(self.clone()) };
        }
        let values: Vec<Rational> = self.vertices.iter().map(|v| h.eval(v)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            return Some(self.clone());
        }
        if values.iter().all(|v| v.is_negative()) {
            return None;
        }
        if !self.full_dimensional {
            let kept: Vec<Vec<Rational>> = self
                .vertices
                .iter()
                .zip(&values)
                .filter(|(_, v)| !v.is_negative())
                .map(|(p, _)| p.clone())
                .collect();
            return RationalPolytope::from_vertices(self.dim, kept).ok();
        }
        let mut points: Vec<Vec<Rational>> = self
            .vertices
            .iter()
            .zip(&values)
            .filter(|(_, v)| !v.is_negative())
            .map(|(p, _)| p.clone())
            .collect();
        for (i, j) in self.edges() {
            let (vi, vj) = (&values[i], &values[j]);
            if (vi.is_positive() && vj.is_negative()) || (vi.is_negative() && vj.is_positive()) {
                let t = vi / (vi - vj);
                let p: Vec<Rational> = self.vertices[i]
                    .iter()
                    .zip(&self.vertices[j])
                    .map(|(a, b)| a + (b - a) * &t)
                    .collect();
                points.push(p);
            }
        }
        points.sort();
        points.dedup();
        let refs: Vec<&Vec<Rational>> = points.iter().collect();
        if affine_dim(&refs) != Some(self.dim) {
            return Some(RationalPolytope {
                dim: self.dim,
                vertices: points,
                facets: Vec::new(),
                full_dimensional: false,
            });
        }
        let mut candidates: Vec<Halfspace> = self.facets.clone();
        candidates.push(h.primitive());
        let mut facets: BTreeSet<Halfspace> = BTreeSet::new();
        for f in candidates {
            let on: Vec<&Vec<Rational>> = points.iter().filter(|p| f.eval(p).is_zero()).collect();
            if affine_dim(&on) == Some(self.dim - 1) {
                facets.insert(f);
            }
        }
        Some(RationalPolytope {
            dim: self.dim,
            vertices: points,
            facets: facets.into_iter().collect(),
            full_dimensional: true,
        })
    }

    /// Pulling triangulation from the lexicographically smallest vertex,
    /// applied recursively on faces. Simplices are vertex-index lists.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        if !self.full_dimensional {
            return Vec::new();
        }
        let facet_sets: Vec<Vec<usize>> = self
            .facets
            .iter()
            .map(|h| {
                (0..self.vertices.len())
                    .filter(|&i| h.eval(&self.vertices[i]).is_zero())
                    .collect()
            })
            .collect();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_face(&all, self.dim, &facet_sets)
    }

    fn triangulate_face(&self, face: &[usize], k: usize, facet_sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![face[0]]];
        }
        // Vertices are sorted, so the smallest index is the lexicographic minimum.
        let apex = face[0];
        let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for fs in facet_sets {
            let meet: Vec<usize> = face.iter().copied().filter(|i| fs.contains(i)).collect();
            if meet.len() < k || meet.contains(&apex) {
                continue;
            }
            let pts: Vec<&Vec<Rational>> = meet.iter().map(|&i| &self.vertices[i]).collect();
            if affine_dim(&pts) == Some(k - 1) {
                subfaces.insert(meet);
            }
        }
        let mut simplices = Vec::new();
        for sf in subfaces {
            for mut s in self.triangulate_face(&sf, k - 1, facet_sets) {
                s.insert(0, apex);
                simplices.push(s);
            }
        }
        simplices
    }

    /// Unsigned volume of the simplex on the given vertex indices.
    pub fn simplex_volume(&self, simplex: &[usize]) -> Rational {
        let base = &self.vertices[simplex[0]];
        let rows: Vec<Vec<Rational>> = simplex[1..].iter().map(|&i| sub(&self.vertices[i], base)).collect();
        det(&rows).abs() / factorial(self.dim as u32)
    }

    /// Exact Euclidean volume; zero for lower-dimensional polytopes.
    pub fn volume(&self) -> Rational {
        self.triangulate().iter().map(|s| self.simplex_volume(s)).sum()
    }

    /// Integer points of the polytope, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let lo: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i].floor().to_integer()).min().expect("nonempty"))
            .map(|b| i64::try_from(b).expect("coordinates fit in i64"))
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i].ceil().to_integer()).max().expect("nonempty"))
            .map(|b| i64::try_from(b).expect("coordinates fit in i64"))
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let x: Vec<Rational> = cur.iter().map(|&c| Rational::from_integer(c.into())).collect();
            let inside = if self.full_dimensional {
                self.contains(&x)
            } else {
                self.vertices.len() == 1 && self.vertices[0] == x
            };
            if inside {
                out.push(cur.clone());
            }
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
            }
        }
    }

    /// `λ·P` for `λ > 0`.
    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::Argument("scale factor must be positive".into()));
        }
        Ok(RationalPolytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|c| c * lambda).collect()).collect(),
            facets: self
                .facets
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), &h.offset * lambda))
                .collect(),
            full_dimensional: self.full_dimensional,
        })
    }

    /// `P + shift`.
    pub fn translate(&self, shift: &[Rational]) -> Self {
        let mut vertices: Vec<Vec<Rational>> =
            self.vertices.iter().map(|v| v.iter().zip(shift).map(|(a, b)| a + b).collect()).collect();
        vertices.sort();
        RationalPolytope {
            dim: self.dim,
            vertices,
            facets: self
                .facets
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), &h.offset - dot(&h.normal, shift)))
                .collect(),
            full_dimensional: self.full_dimensional,
        }
    }

    /// Image under an integer linear map `x ↦ M x` (rows of `M`).
    pub fn linear_image(&self, m: &[Vec<Rational>]) -> Result<Self> {
        let pts = self
            .vertices
            .iter()
            .map(|v| m.iter().map(|row| dot(row, v)).collect())
            .collect();
        Self::from_vertices(self.dim, pts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolytopeRepr {
            dim: self.dim,
            vertices: self.vertices.clone(),
        })
        .expect("serializable")
    }

    /// Reads `{"dim": n, "vertices": [["a/b", ...], ...]}` (integers also accepted).
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: PolytopeRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_vertices(repr.dim, repr.vertices)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PolytopeRepr {
    pub dim: usize,
    #[serde(with = "serde_rational::vec2")]
    pub vertices: Vec<Vec<Rational>>,
}

impl std::fmt::Display for RationalPolytope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "conv[{}]", verts.join(", "))
    }
}

/// Complete homogeneous symmetric polynomial `h_p(values)`.
pub fn complete_homogeneous(values: &[Rational], p: u32) -> Rational {
    let p = p as usize;
    // h[k] over the prefix processed so far.
    let mut h = vec![Rational::zero(); p + 1];
    h[0] = Rational::one();
    for x in values {
        for k in 1..=p {
            let prev = h[k - 1].clone();
            h[k] += x * prev;
        }
    }
    h[p].clone()
}

/// `∫_σ ℓ^p` over an `n`-simplex of volume `vol` whose vertex values of
/// the affine function `ℓ` are `values`:
/// `vol · p! n! / (p+n)! · h_p(values)`.
pub fn simplex_power_integral(vol: &Rational, values: &[Rational], p: u32) -> Rational {
    let n = (values.len() - 1) as u32;
    vol * factorial(p) * factorial(n) / factorial(p + n) * complete_homogeneous(values, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn pts(raw: &[&[i64]]) -> Vec<Vec<Rational>> {
        raw.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn basic_volumes() {
        let square = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
        assert_eq!(square.volume(), int(1));
        assert_eq!(square.facets().len(), 4);
        let tri = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(tri.volume(), rat(1, 2));
        assert_eq!(tri.scale(&int(3)).unwrap().volume(), rat(9, 2));
        let cube = RationalPolytope::from_vertices(
            3,
            pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]),
        )
        .unwrap();
        assert_eq!(cube.volume(), int(1));
        assert_eq!(cube.triangulate().len(), 6);
    }

    #[test]
    fn interior_points_dropped_and_degenerate_flagged() {
        let p = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[2, 0], &[0, 2], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(p.vertices().len(), 3);
        let seg = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap();
        assert!(!seg.is_full_dimensional());
        assert_eq!(seg.volume(), int(0));
    }

    #[test]
    fn clipping() {
        let tri = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        let h = Halfspace::new(vec![int(1), int(0)], rat(-1, 2));
        let clipped = tri.intersect(&h).unwrap();
        assert_eq!(clipped.volume(), rat(1, 8));
        let empty = Halfspace::new(vec![int(1), int(0)], int(-2));
        assert!(tri.intersect(&empty).is_none());
        let touching = Halfspace::new(vec![int(1), int(0)], int(-1));
        assert!(!tri.intersect(&touching).unwrap().is_full_dimensional());
    }

    #[test]
    fn halfspace_round_trip() {
        let hs = vec![
            Halfspace::new(vec![int(1), int(0)], int(0)),
            Halfspace::new(vec![int(0), int(1)], int(0)),
            Halfspace::new(vec![int(-1), int(-1)], int(3)),
        ];
        let p = RationalPolytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.volume(), rat(9, 2));
        let open = &hs[..2];
        assert!(RationalPolytope::from_halfspaces(2, open).is_err());
    }

    #[test]
    fn simplex_integrals() {
        // ∫ x over the unit triangle is 1/6, ∫ x^2 is 1/12.
        let vals = [int(0), int(1), int(0)];
        assert_eq!(simplex_power_integral(&rat(1, 2), &vals, 1), rat(1, 6));
        assert_eq!(simplex_power_integral(&rat(1, 2), &vals, 2), rat(1, 12));
        assert_eq!(complete_homogeneous(&[int(2), int(3)], 2), int(4 + 6 + 9));
    }

    #[test]
    fn lattice_points() {
        let tri = RationalPolytope::from_vertices(2, pts(&[&[0, 0], &[2, 0], &[0, 2]])).unwrap();
        assert_eq!(tri.lattice_points().len(), 6);
        let half = RationalPolytope::from_vertices(1, vec![vec![rat(-1, 2)], vec![rat(5, 2)]]).unwrap();
        assert_eq!(half.lattice_points(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn json() {
        let p = RationalPolytope::from_json(r#"{"dim": 2, "vertices": [["0","0"],["1/2","0"],[0,1]]}"#).unwrap();
        assert_eq!(p.volume(), rat(1, 4));
        assert_eq!(RationalPolytope::from_json(&p.to_json()).unwrap(), p);
    }
}
