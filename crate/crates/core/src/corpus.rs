// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random inputs for property checks: admissible volume curves,
//! fractional flag filtrations and PL test curves.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::filtration::FlagFiltration;
use crate::geodesic::TestCurve1D;
use crate::numeric::linalg::rank;
use crate::numeric::{int, rat, Rational};
use crate::volume_curve::{curve_from_profile, VolumeCurve};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Volume curve of a body of revolution whose radius profile `f` is a
/// random concave PL function on `[0, τ]`, `τ ∈ {1/2, 3/4, …, 4}`.
pub fn admissible_curve(rng: &mut ChaCha8Rng, n: u32) -> Result<VolumeCurve> {
    let tau = rat(rng.gen_range(2..=16), 4);
    let segments = rng.gen_range(1..=4);
    let mut xs: Vec<Rational> = (1..segments)
        .map(|_| &tau * rat(rng.gen_range(1..64), 64))
        .collect();
    xs.sort();
    xs.dedup();
    xs.insert(0, Rational::zero());
    xs.push(tau.clone());
    // Nonincreasing slopes, then lift so that both ends are nonnegative.
    let mut slopes: Vec<Rational> = (0..xs.len() - 1).map(|_| rat(rng.gen_range(-12..=12), 4)).collect();
    slopes.sort_by(|a, b| b.cmp(a));
    let mut values = vec![Rational::zero()];
    for (w, s) in xs.windows(2).zip(&slopes) {
        let next = values.last().expect("nonempty") + s * (&w[1] - &w[0]);
        values.push(next);
    }
    let low = values.first().expect("nonempty").clone().min(values.last().expect("nonempty").clone());
    let lift = rat(rng.gen_range(0..=4), 4) - low;
    let mut knots: Vec<(Rational, Rational)> = xs.into_iter().zip(values).map(|(x, v)| (x, v + &lift)).collect();
    if knots.iter().all(|k| k.1.is_zero()) {
        knots[0].1 = int(1);
    }
    let volume = rat(rng.gen_range(1..=40), rng.gen_range(1..=4));
    curve_from_profile(n, &volume, &knots)
}

pub fn admissible_curves(n: u32, count: usize, seed: u64) -> Result<Vec<VolumeCurve>> {
    let mut r = rng(seed ^ (u64::from(n) << 32));
    (0..count).map(|_| admissible_curve(&mut r, n)).collect()
}

fn random_jumps(rng: &mut ChaCha8Rng, d: usize, m: u32) -> Vec<Rational> {
    let denoms = [1, 2, 3, 4, 5, 7];
    let mut jumps: Vec<Rational> = (0..d)
        .map(|_| {
            let q = *denoms.choose(rng).expect("nonempty");
            rat(rng.gen_range(0..=(3 * m as i64 * q)), q)
        })
        .collect();
    jumps.sort();
    jumps
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<Rational>> {
    loop {
        let g: Vec<Vec<Rational>> = (0..d)
            .map(|_| (0..d).map(|_| int(rng.gen_range(-2..=2))).collect())
            .collect();
        if rank(&g) == d {
            return g;
        }
    }
}

/// Filtration with fractional jumps at a random level, dimension `1..=8`.
pub fn fractional_filtration(rng: &mut ChaCha8Rng) -> Result<FlagFiltration> {
    let m = rng.gen_range(1..=4);
    let d = rng.gen_range(1..=8);
    FlagFiltration::new(m, random_jumps(rng, d, m))
}

/// Filtration of dimension `1..=max_d` whose flag is a random linear image
/// of the coordinate flag.
pub fn random_flag_filtration(rng: &mut ChaCha8Rng, max_d: usize) -> Result<FlagFiltration> {
    let m = rng.gen_range(1..=3);
    let d = rng.gen_range(1..=max_d);
    let jumps = random_jumps(rng, d, m);
    let g = random_invertible(rng, d);
    FlagFiltration::transformed(m, jumps, &g)
}

/// Concave nonincreasing PL test curve with up to five pieces.
pub fn random_test_curve(rng: &mut ChaCha8Rng) -> Result<TestCurve1D> {
    let pieces = rng.gen_range(0..=5);
    let mut lambdas: Vec<Rational> = (0..pieces).map(|_| rat(rng.gen_range(1..=40), rng.gen_range(1..=4))).collect();
    lambdas.sort();
    lambdas.dedup();
    let mut slopes: Vec<Rational> = (0..lambdas.len()).map(|_| rat(-rng.gen_range(0..=12), rng.gen_range(1..=3))).collect();
    slopes.sort_by(|a, b| b.cmp(a));
    let mut knots = vec![(Rational::zero(), Rational::zero())];
    for (l, s) in lambdas.into_iter().zip(slopes) {
        let (x0, y0) = knots.last().expect("nonempty").clone();
        let y = &y0 + &s * (&l - &x0);
        knots.push((l, y));
    }
    TestCurve1D::new(knots)
}
