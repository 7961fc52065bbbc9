// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Integrand evaluations allowed per call.
pub const EVALUATION_BUDGET: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    tag: usize,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(usize, f64) -> f64>(f: &F, tag: usize, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(tag, center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(tag, center - dx) + f(tag, center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f(tag, x)` over the union of `(a, b, tag)` intervals until the
/// summed error estimate drops to `tol`. The tag lets callers keep one smooth
/// branch per interval.
pub fn adaptive_integrate<F: Fn(usize, f64) -> f64>(f: F, intervals: &[(f64, f64, usize)], tol: f64) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for &(a, b, tag) in intervals {
        let (value, error) = kronrod(&f, tag, a, b);
        evaluations += 15;
        heap.push(Segment { a, b, tag, value, error });
    }
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= tol {
            // Sum small contributions first.
            let mut values: Vec<f64> = heap.iter().map(|s| s.value).collect();
            values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(values.iter().sum());
        }
        if !total_error.is_finite() {
            return Err(Error::Accuracy("integrand produced a non-finite value".into()));
        }
        if evaluations + 30 > EVALUATION_BUDGET {
            return Err(Error::Accuracy(format!(
                "quadrature did not reach tolerance {tol:e} within {EVALUATION_BUDGET} evaluations (error estimate {total_error:e})"
            )));
        }
        let worst = heap.pop().expect("at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in f64.
            return Err(Error::Accuracy(format!(
                "quadrature stalled on [{}, {}] with error {:e}",
                worst.a, worst.b, worst.error
            )));
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(&f, worst.tag, a, b);
            heap.push(Segment { a, b, tag: worst.tag, value, error });
        }
        evaluations += 30;
    }
}
