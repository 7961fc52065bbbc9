// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Integers up to 170 go through the factorial; everything else uses the
/// Lanczos series (g = 7), with reflection below 1/2.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs a finite x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= 170.0 {
        let n = x as u32;
        let fact: f64 = (1..n).map(f64::from).product();
        return Ok(fact.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - lanczos(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(p+1)Γ(n+1)/Γ(p+n+1)`, the lower barycenter constant.
pub fn beta_constant(n: u32, p: f64) -> f64 {
    let n = f64::from(n);
    (log_gamma(p + 1.0).unwrap() + log_gamma(n + 1.0).unwrap() - log_gamma(p + n + 1.0).unwrap()).exp()
}
