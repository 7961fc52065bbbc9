// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Rational polytopes as Okounkov bodies, concave transforms on them and
//! the spectral measures they push forward.

mod polytope;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use polytope::{complete_homogeneous, simplex_power_integral, Halfspace, RationalPolytope};

use crate::error::{Error, Result};
use crate::numeric::linalg::dot;
use crate::numeric::rational::{pow, serde_rational, to_f64};
use crate::numeric::{format_rational, int, PiecewisePolynomial, Polynomial, Rational};
use crate::volume_curve::VolumeCurve;

/// Exact volume; zero for lower-dimensional input (see
/// [`RationalPolytope::is_full_dimensional`]).
pub fn volume(p: &RationalPolytope) -> Rational {
    p.volume()
}

/// `x ↦ ⟨linear, x⟩ + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineForm {
    #[serde(with = "serde_rational::vec")]
    pub linear: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
}

impl AffineForm {
    pub fn new(linear: Vec<Rational>, constant: Rational) -> Self {
        AffineForm { linear, constant }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        AffineForm::new(vec![Rational::zero(); dim], c)
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut linear = vec![Rational::zero(); dim];
        linear[i] = Rational::one();
        AffineForm::new(linear, Rational::zero())
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.linear, x) + &self.constant
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AffineForm::new(self.linear.iter().map(|a| a * c).collect(), &self.constant * c)
    }

    /// `self − other ≥ 0` as a halfspace.
    fn at_least(&self, other: &AffineForm) -> Halfspace {
        Halfspace::new(
            self.linear.iter().zip(&other.linear).map(|(a, b)| a - b).collect(),
            &self.constant - &other.constant,
        )
    }
}

/// `G = min_i a_i` restricted to a body, together with its min-cells.
#[derive(Clone, Debug)]
pub struct ConcaveTransform {
    body: RationalPolytope,
    forms: Vec<AffineForm>,
    cells: Vec<(usize, RationalPolytope)>,
    nonneg: bool,
    max_value: Rational,
}

impl ConcaveTransform {
    pub fn new(body: RationalPolytope, forms: Vec<AffineForm>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::Argument("concave transform needs at least one affine form".into()));
        }
        if let Some(f) = forms.iter().find(|f| f.linear.len() != body.dim()) {
            return Err(Error::Structure(format!(
                "affine form of length {} on a body of dimension {}",
                f.linear.len(),
                body.dim()
            )));
        }
        if !body.is_full_dimensional() {
            return Err(Error::Argument("concave transform needs a full-dimensional body".into()));
        }
        let mut forms = forms;
        forms.sort();
        forms.dedup();
        let mut cells = Vec::new();
        for (i, fi) in forms.iter().enumerate() {
            let mut cell = Some(body.clone());
            for (j, fj) in forms.iter().enumerate() {
                if i == j {
                    continue;
                }
                cell = cell.and_then(|c| c.intersect(&fj.at_least(fi)));
                if cell.as_ref().map_or(true, |c| !c.is_full_dimensional()) {
                    cell = None;
                    break;
                }
            }
            if let Some(c) = cell {
                cells.push((i, c));
            }
        }
        let mut max_value: Option<Rational> = None;
        for (i, c) in &cells {
            for v in c.vertices() {
                let g = forms[*i].eval(v);
                if max_value.as_ref().map_or(true, |m| g > *m) {
                    max_value = Some(g);
                }
            }
        }
        let nonneg = body.vertices().iter().all(|v| !min_eval(&forms, v).is_negative());
        Ok(ConcaveTransform {
            body,
            forms,
            cells,
            nonneg,
            max_value: max_value.expect("a full-dimensional body has a nonempty min-cell"),
        })
    }

    pub fn body(&self) -> &RationalPolytope {
        &self.body
    }

    pub fn forms(&self) -> &[AffineForm] {
        &self.forms
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `G(x)`; the caller ensures `x` lies in the body.
    pub fn value(&self, x: &[Rational]) -> Rational {
        min_eval(&self.forms, x)
    }

    /// `T = max_Δ G`.
    pub fn max_value(&self) -> &Rational {
        &self.max_value
    }

    /// Full-dimensional cells on which form `i` attains the minimum.
    pub fn cells(&self) -> &[(usize, RationalPolytope)] {
        &self.cells
    }

    /// `λ·G`, `λ ≥ 0`.
    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::Argument("scale factor must be nonnegative".into()));
        }
        ConcaveTransform::new(self.body.clone(), self.forms.iter().map(|f| f.scale(lambda)).collect())
    }

    fn require_nonneg(&self) -> Result<()> {
        if self.nonneg {
            return Ok(());
        }
        let v = self
            .body
            .vertices()
            .iter()
            .find(|v| self.value(v).is_negative())
            .expect("a negative vertex exists");
        Err(Error::invariant(
            "ConcaveTransform.nonneg",
            format!(
                "G({}) = {}",
                v.iter().map(format_rational).collect::<Vec<_>>().join(", "),
                format_rational(&self.value(v))
            ),
        ))
    }

    /// Breakpoints of the slice volume: values of `G` on cell vertices in `[0, T]`.
    fn critical_values(&self) -> Vec<Rational> {
        let mut vals = vec![Rational::zero()];
        for (i, c) in &self.cells {
            for v in c.vertices() {
                let g = self.forms[*i].eval(v);
                if g.is_positive() {
                    vals.push(g);
                }
            }
        }
        vals.sort();
        vals.dedup();
        vals
    }
}

fn min_eval(forms: &[AffineForm], x: &[Rational]) -> Rational {
    forms
        .iter()
        .map(|f| f.eval(x))
        .min()
        .expect("at least one form")
}

/// `(1/vol Δ) ∫_Δ G^p`.
pub fn moment_p(ct: &ConcaveTransform, p: u32) -> Result<Rational> {
    ct.require_nonneg()?;
    if p == 0 {
        return Ok(Rational::one());
    }
    let mut total = Rational::zero();
    for (i, cell) in &ct.cells {
        let form = &ct.forms[*i];
        for s in cell.triangulate() {
            let values: Vec<Rational> = s.iter().map(|&k| form.eval(&cell.vertices()[k])).collect();
            total += simplex_power_integral(&cell.simplex_volume(&s), &values, p);
        }
    }
    Ok(total / ct.body.volume())
}

/// `vol{α ∈ Δ : G(α) ≥ t}`.
pub fn slice_volume(ct: &ConcaveTransform, t: &Rational) -> Rational {
    let mut body = Some(ct.body.clone());
    for f in &ct.forms {
        let h = Halfspace::new(f.linear.clone(), &f.constant - t);
        body = body.and_then(|b| b.intersect(&h));
    }
    body.map_or_else(Rational::zero, |b| b.volume())
}

/// `t ↦ slice_volume(ct, t)` on `[0, T]` as an exact piecewise polynomial;
/// `None` when `T = 0`.
pub fn slice_volume_curve(ct: &ConcaveTransform) -> Result<Option<PiecewisePolynomial>> {
    ct.require_nonneg()?;
    let breaks = ct.critical_values();
    if breaks.len() < 2 {
        return Ok(None);
    }
    let n = ct.dim();
    let mut pieces = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let width = &w[1] - &w[0];
        // Interior nodes avoid a possible plateau at T.
        let nodes: Vec<(Rational, Rational)> = (0..=n)
            .map(|k| {
                let t = &w[0] + &width * Rational::new((k as i64 + 1).into(), (n as i64 + 2).into());
                let s = slice_volume(ct, &t);
                (t, s)
            })
            .collect();
        pieces.push(Polynomial::interpolate(&nodes));
    }
    Ok(Some(PiecewisePolynomial::new(breaks, pieces)?))
}

/// The volume curve `x ↦ factor · vol{G ≥ x}`, with `factor = n!` for toric
/// bodies and `1` for plain Lebesgue normalization.
pub fn volume_curve(ct: &ConcaveTransform, factor: &Rational) -> Result<VolumeCurve> {
    let n = ct.dim() as u32;
    let total = ct.body.volume() * factor;
    match slice_volume_curve(ct)? {
        None => VolumeCurve::degenerate(n, total),
        Some(curve) => VolumeCurve::new(n, curve.scale(factor)),
    }
}

/// `∫_0^T p t^{p−1} vol{G ≥ t} dt / vol Δ`, evaluated on the exact slice curve.
pub fn moment_via_slices(ct: &ConcaveTransform, p: u32) -> Result<Rational> {
    if p == 0 {
        return Ok(Rational::one());
    }
    match slice_volume_curve(ct)? {
        None => Ok(Rational::zero()),
        Some(curve) => {
            let v = curve.integrate_monomial_weighted(p, curve.start(), curve.end())?;
            Ok(v * int(p as i64) / ct.body.volume())
        }
    }
}

/// Atoms at `kT/R`, `k = 0..=R`, carrying the normalized slice volume of
/// `{kT/R ≤ G < (k+1)T/R}`.
pub fn pushforward_measure(ct: &ConcaveTransform, resolution: u32) -> Result<SpectralMeasure> {
    ct.require_nonneg()?;
    if resolution == 0 {
        return Err(Error::Argument("resolution must be positive".into()));
    }
    let t_max = ct.max_value();
    if t_max.is_zero() {
        return Ok(SpectralMeasure::dirac(Rational::zero()));
    }
    let vol = ct.body.volume();
    let r = resolution as i64;
    let grid: Vec<Rational> = (0..=r).map(|k| t_max * Rational::new(k.into(), r.into())).collect();
    let slices: Vec<Rational> = grid.iter().map(|t| slice_volume(ct, t)).collect();
    let mut atoms = Vec::new();
    for k in 0..grid.len() {
        let next = slices.get(k + 1).cloned().unwrap_or_else(Rational::zero);
        let mass = (&slices[k] - next) / &vol;
        if mass.is_positive() {
            atoms.push((grid[k].clone(), mass));
        }
    }
    SpectralMeasure::new(atoms)
}

/// A finite atomic probability measure on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralMeasure {
    atoms: Vec<(Rational, Rational)>,
}

impl SpectralMeasure {
    /// Merges repeated locations; rejects negative locations, nonpositive
    /// masses and total mass other than one.
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut atoms = atoms;
        if let Some((x, _)) = atoms.iter().find(|(x, _)| x.is_negative()) {
            return Err(Error::Argument(format!("atom at negative location {}", format_rational(x))));
        }
        if let Some((_, m)) = atoms.iter().find(|(_, m)| !m.is_positive()) {
            return Err(Error::Argument(format!("nonpositive atom mass {}", format_rational(m))));
        }
        atoms.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            match merged.last_mut() {
                Some((y, acc)) if *y == x => *acc += m,
                _ => merged.push((x, m)),
            }
        }
        let total: Rational = merged.iter().map(|(_, m)| m.clone()).sum();
        if !total.is_one() {
            return Err(Error::invariant("SpectralMeasure.unit_mass", format!("total mass = {}", format_rational(&total))));
        }
        Ok(SpectralMeasure { atoms: merged })
    }

    pub fn dirac(at: Rational) -> Self {
        SpectralMeasure {
            atoms: vec![(at, Rational::one())],
        }
    }

    /// Uniform measure on the rescaled jumping numbers `a_j / m`.
    pub fn from_jumps(jumps: &[Rational], m: u32) -> Result<Self> {
        if jumps.is_empty() || m == 0 {
            return Err(Error::Argument("need at least one jump and m ≥ 1".into()));
        }
        let mass = Rational::new(1.into(), (jumps.len() as i64).into());
        let m = int(m as i64);
        SpectralMeasure::new(jumps.iter().map(|a| (a / &m, mass.clone())).collect())
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, m)| m.clone()).sum()
    }

    pub fn max_location(&self) -> &Rational {
        &self.atoms.last().expect("nonempty").0
    }

    /// `∫ x^p dμ`.
    pub fn moment(&self, p: u32) -> Rational {
        self.atoms.iter().map(|(x, m)| pow(x, p) * m).sum()
    }

    pub fn moment_f64(&self, p: f64) -> f64 {
        self.atoms.iter().map(|(x, m)| to_f64(x).powf(p) * to_f64(m)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn simplex() -> RationalPolytope {
        RationalPolytope::from_vertices(2, vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap()
    }

    fn square() -> RationalPolytope {
        RationalPolytope::from_vertices(
            2,
            vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)], vec![int(1), int(1)]],
        )
        .unwrap()
    }

    #[test]
    fn coordinate_moments() {
        let ct = ConcaveTransform::new(simplex(), vec![AffineForm::coordinate(2, 0)]).unwrap();
        assert_eq!(moment_p(&ct, 1).unwrap(), rat(1, 3));
        assert_eq!(moment_p(&ct, 2).unwrap(), rat(1, 6));
        assert_eq!(slice_volume(&ct, &int(0)), rat(1, 2));
        assert_eq!(slice_volume(&ct, &rat(1, 2)), rat(1, 8));
        assert_eq!(slice_volume(&ct, &int(2)), int(0));
        assert_eq!(*ct.max_value(), int(1));
    }

    #[test]
    fn zero_transform() {
        let ct = ConcaveTransform::new(simplex(), vec![AffineForm::constant(2, int(0))]).unwrap();
        for p in 1..5 {
            assert_eq!(moment_p(&ct, p).unwrap(), int(0));
        }
        assert!(slice_volume_curve(&ct).unwrap().is_none());
        assert_eq!(pushforward_measure(&ct, 5).unwrap(), SpectralMeasure::dirac(int(0)));
    }

    #[test]
    fn constant_pushes_forward_to_dirac() {
        let ct = ConcaveTransform::new(square(), vec![AffineForm::constant(2, rat(3, 2))]).unwrap();
        assert_eq!(pushforward_measure(&ct, 7).unwrap(), SpectralMeasure::dirac(rat(3, 2)));
        assert_eq!(moment_p(&ct, 3).unwrap(), rat(27, 8));
    }

    #[test]
    fn tent_on_square() {
        // G = min(x, 1 − x, y, 1 − y): a pyramid of height 1/2.
        let forms = vec![
            AffineForm::coordinate(2, 0),
            AffineForm::new(vec![int(-1), int(0)], int(1)),
            AffineForm::coordinate(2, 1),
            AffineForm::new(vec![int(0), int(-1)], int(1)),
        ];
        let ct = ConcaveTransform::new(square(), forms).unwrap();
        assert_eq!(ct.cells().len(), 4);
        assert_eq!(*ct.max_value(), rat(1, 2));
        // vol{G ≥ t} = (1 − 2t)^2, so ∫ G = ∫_0^{1/2} (1 − 2t)^2 dt = 1/6.
        assert_eq!(moment_p(&ct, 1).unwrap(), rat(1, 6));
        for p in 1..5 {
            assert_eq!(moment_p(&ct, p).unwrap(), moment_via_slices(&ct, p).unwrap());
        }
        let doubled = ct.scale(&int(2)).unwrap();
        assert_eq!(moment_p(&doubled, 3).unwrap(), moment_p(&ct, 3).unwrap() * int(8));
    }

    #[test]
    fn negative_transform_rejected() {
        let ct = ConcaveTransform::new(simplex(), vec![AffineForm::constant(2, int(-1))]).unwrap();
        let err = moment_p(&ct, 1).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }

    #[test]
    fn pushforward_converges() {
        let ct = ConcaveTransform::new(simplex(), vec![AffineForm::coordinate(2, 0)]).unwrap();
        for r in [1, 4, 64] {
            assert_eq!(pushforward_measure(&ct, r).unwrap().total_mass(), int(1));
        }
        let mu = pushforward_measure(&ct, 400).unwrap();
        assert!((to_f64(&mu.moment(1)) - 1.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn forms_json() {
        let f: AffineForm = serde_json::from_str(r#"{"linear": ["1/2", 0], "constant": "3"}"#).unwrap();
        assert_eq!(f.eval(&[int(2), int(5)]), int(4));
    }
}
