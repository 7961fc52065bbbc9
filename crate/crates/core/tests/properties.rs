// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use num_traits::Zero;
use proptest::prelude::*;

use pmoments::corpus;
use pmoments::filtration::{
    generated_filtration, round_to_integer_filtration, s_m_p, sup_over_bases_oracle, telescoping_s_m_p,
    MonomialGradedFiltration,
};
use pmoments::geodesic::{inverse_legendre, legendre};
use pmoments::numeric::{int, log_gamma, rat, to_f64, PiecewisePolynomial, Polynomial, Rational};
use pmoments::okounkov::{moment_p, moment_via_slices, AffineForm, ConcaveTransform, RationalPolytope};
use pmoments::toric::{delta_p_search, ToricModel};
use pmoments::volume_curve::{barycenter_bounds_exact, h_stat_pow_exact, s_p, s_p_stieltjes};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(small_rational(), 1..5).prop_map(Polynomial::new)
}

fn piecewise() -> impl Strategy<Value = PiecewisePolynomial> {
    (1usize..4)
        .prop_flat_map(|k| (prop::collection::vec(1i64..5, k), prop::collection::vec(polynomial(), k)))
        .prop_map(|(widths, pieces)| {
            let mut bps = vec![Rational::zero()];
            for w in widths {
                let last = bps.last().unwrap().clone();
                bps.push(last + rat(w, 2));
            }
            PiecewisePolynomial::new(bps, pieces).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monomial_integral_is_additive(f in piecewise(), p in 1u32..5, cut in 0i64..=16) {
        let (a, b) = (f.start().clone(), f.end().clone());
        let c = &a + (&b - &a) * rat(cut, 16);
        let whole = f.integrate_monomial_weighted(p, &a, &b).unwrap();
        let left = f.integrate_monomial_weighted(p, &a, &c).unwrap();
        let right = f.integrate_monomial_weighted(p, &c, &b).unwrap();
        prop_assert_eq!(whole, left + right);
    }

    #[test]
    fn monomial_integral_is_linear(f in piecewise(), k in small_rational(), p in 1u32..5) {
        let (a, b) = (f.start().clone(), f.end().clone());
        let g = f.map_pieces(|q| q.derivative().scale(&int(2)));
        let combo = f.scale(&k).add(&g).unwrap();
        let lhs = combo.integrate_monomial_weighted(p, &a, &b).unwrap();
        let rhs = f.integrate_monomial_weighted(p, &a, &b).unwrap() * &k
            + g.integrate_monomial_weighted(p, &a, &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn real_power_matches_exact(f in piecewise(), p in 1u32..6) {
        let (a, b) = (f.start().clone(), f.end().clone());
        let exact = to_f64(&f.integrate_monomial_weighted(p, &a, &b).unwrap());
        let approx = f.integrate_real_power(p as f64, &a, &b, 1e-9).unwrap();
        prop_assert!((exact - approx).abs() <= 1e-9 * exact.abs().max(1.0));
    }

    #[test]
    fn gamma_recurrence(x in 0.5f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = x.ln() + log_gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn corpus_curves_satisfy_bounds(seed in any::<u64>(), n in 1u32..4) {
        let c = corpus::admissible_curve(&mut corpus::rng(seed), n).unwrap();
        let mut prev_h: Option<Rational> = None;
        for p in 1..=6u32 {
            let s = s_p(&c, p).unwrap();
            prop_assert_eq!(&s, &s_p_stieltjes(&c, p).unwrap());
            let (lo, hi) = barycenter_bounds_exact(&c, p);
            prop_assert!(lo <= s && s <= hi);
            // H(p)^p compared across consecutive p after raising to a common power.
            let h = h_stat_pow_exact(&c, p).unwrap();
            if let Some(prev) = prev_h {
                let q = p - 1;
                prop_assert!(pmoments::numeric::rational::pow(&prev, p) <= pmoments::numeric::rational::pow(&h, q));
            }
            prev_h = Some(h);
        }
    }

    #[test]
    fn transform_moments(
        raw in prop::collection::vec((0i64..6, 0i64..6), 3..7),
        forms in prop::collection::vec((-3i64..=3, -3i64..=3, 0i64..=12), 1..4),
        lambda in 1i64..5,
    ) {
        let pts: Vec<Vec<Rational>> = raw.iter().map(|&(x, y)| vec![int(x), int(y)]).collect();
        let body = RationalPolytope::from_vertices(2, pts).unwrap();
        prop_assume!(body.is_full_dimensional());
        // Offsets large enough to keep every form nonnegative on [0, 5]^2.
        let forms: Vec<AffineForm> = forms
            .iter()
            .map(|&(a, b, c)| AffineForm::new(vec![int(a), int(b)], int(c + 15 * (a.abs() + b.abs()))))
            .collect();
        let ct = ConcaveTransform::new(body, forms).unwrap();
        let scaled = ct.scale(&int(lambda)).unwrap();
        let t = to_f64(ct.max_value());
        let mut prev = 0.0f64;
        for p in 1..=4u32 {
            let m = moment_p(&ct, p).unwrap();
            prop_assert_eq!(&m, &moment_via_slices(&ct, p).unwrap());
            prop_assert_eq!(moment_p(&scaled, p).unwrap(), &m * pmoments::numeric::rational::pow(&int(lambda), p));
            let root = to_f64(&m).powf(1.0 / p as f64);
            prop_assert!(root + 1e-12 >= prev);
            prop_assert!(root <= t * (1.0 + 1e-12));
            prev = root;
        }
    }

    #[test]
    fn rounding_and_telescoping(seed in any::<u64>(), p in 1u32..5) {
        let f = corpus::fractional_filtration(&mut corpus::rng(seed)).unwrap();
        let r = round_to_integer_filtration(&f);
        prop_assert!(s_m_p(&r, p) <= s_m_p(&f, p));
        prop_assert_eq!(telescoping_s_m_p(&r, p).unwrap(), s_m_p(&r, p));
    }

    #[test]
    fn compatible_basis_is_optimal(seed in any::<u64>(), p in 1u32..4) {
        let f = corpus::random_flag_filtration(&mut corpus::rng(seed), 6).unwrap();
        let best = sup_over_bases_oracle(&f, p, 64, seed).unwrap();
        prop_assert!(best <= s_m_p(&f, p));
        let basis = pmoments::filtration::compatible_basis(f.flag().unwrap(), f.d()).unwrap();
        prop_assert_eq!(f.basis_moment(&basis, p).unwrap(), s_m_p(&f, p));
    }

    #[test]
    fn legendre_round_trip(seed in any::<u64>()) {
        let tc = corpus::random_test_curve(&mut corpus::rng(seed)).unwrap();
        let ray = legendre(&tc);
        ray.check_growth(tc.lambda_max()).unwrap();
        prop_assert_eq!(inverse_legendre(&ray, tc.lambda_max()).unwrap(), tc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generated_weights_are_dominated(m in 1u32..4, k in 1u32..9, num in 1i64..5, den in 1i64..4) {
        let p = RationalPolytope::from_vertices(2, vec![vec![int(0), int(0)], vec![int(2), int(0)], vec![int(0), int(1)]]).unwrap();
        let base = MonomialGradedFiltration::new(p, vec![1, 1], rat(num, den)).unwrap();
        let g = generated_filtration(&base, m, k).unwrap();
        for (u, w) in g.points.iter().zip(&g.weights) {
            prop_assert!(*w <= base.weight(k, u));
        }
    }

    #[test]
    fn toric_scaling(lambda_num in 1i64..4, lambda_den in 1i64..3, p in 1u32..4) {
        let tm = ToricModel::builtin("hirzebruch-1").unwrap();
        let lambda = rat(lambda_num, lambda_den);
        let scaled = tm.with_support(&tm.support().iter().map(|a| a * &lambda).collect::<Vec<_>>()).unwrap();
        let a = delta_p_search(&tm, p as f64, 2).unwrap();
        let b = delta_p_search(&scaled, p as f64, 2).unwrap();
        prop_assert_eq!(&a.argmin, &b.argmin);
        for (ra, rb) in a.table.iter().zip(&b.table) {
            prop_assert_eq!(ra.ratio_pow(p).unwrap(), rb.ratio_pow(p).unwrap() * pmoments::numeric::rational::pow(&lambda, p));
        }
    }
}
