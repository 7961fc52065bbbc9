// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use pmoments::corpus;
use pmoments::filtration::{
    compatible_basis, round_to_integer_filtration, s_m_p, sup_over_bases_oracle, FlagFiltration,
};
use pmoments::geodesic::{dp_speed, dp_speed_transform, inverse_legendre, legendre};
use pmoments::invariants::{
    h_positive_exact, h_zero_exact, kstability_threshold_pow, kstability_verdict, projective_space_delta_pow,
    Verdict, BORDERLINE_TOL,
};
use pmoments::numeric::rational::{binomial, pow, power_bracket};
use pmoments::numeric::{format_rational, int, to_f64, Rational};
use pmoments::okounkov::SpectralMeasure;
use pmoments::toric::{concave_transform, section_filtration, volume_curve_of, ToricModel, ToricValuation};
use pmoments::volume_curve::{barycenter_bounds_exact, h_stat, h_stat_pow_exact, k_stat_grid, s_p, VolumeCurve};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("runtime {took:.2?} exceeds {limit:?}"))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn corpus_all() -> Result<Vec<VolumeCurve>, String> {
    let mut all = Vec::new();
    for n in 1..=3 {
        all.extend(corpus::admissible_curves(n, 200, 2026).map_err(e)?);
    }
    Ok(all)
}

fn projective_closed_form() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=3u32 {
        let tm = ToricModel::builtin(&format!("pn:{n}")).and_then(|m| m.anticanonical()).map_err(e)?;
        let ray = tm.fan().rays()[0].clone();
        let curve = volume_curve_of(&tm, &ToricValuation::new(&tm, ray).map_err(e)?).map_err(e)?;
        for p in 1..=4u32 {
            let got = s_p(&curve, p).map_err(e)?;
            let want = pow(&int(n as i64 + 1), p) / binomial(p + n, n);
            ensure(got == want, || {
                format!("n = {n}, p = {p}: S = {} but closed form {}", format_rational(&got), format_rational(&want))
            })?;
            checked += 1;
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("{checked} exact matches in {:.2?}", start.elapsed()))
}

fn barycenter_sandwich() -> Outcome {
    let start = Instant::now();
    let curves = corpus_all()?;
    for (i, c) in curves.iter().enumerate() {
        for p in 1..=6u32 {
            let s = s_p(c, p).map_err(e)?;
            let (lo, hi) = barycenter_bounds_exact(c, p);
            ensure(lo <= s && s <= hi, || format!("curve {i} (n = {}), p = {p}", c.n()))?;
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{} curves x 6 exponents in {:.2?}", curves.len(), start.elapsed()))
}

fn h_monotonicity() -> Outcome {
    let curves = corpus_all()?;
    let grid: Vec<f64> = (0..=18).map(|k| 1.0 + 0.5 * k as f64).collect();
    let mut worst = 0.0f64;
    for (i, c) in curves.iter().enumerate() {
        let hs: Vec<f64> = grid.iter().map(|&p| h_stat(c, p)).collect::<Result<_, _>>().map_err(e)?;
        for w in hs.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
        ensure(worst <= 1e-9, || format!("curve {i}: float decrease {worst:e}"))?;
        for p in 2..=10u32 {
            let prev = h_stat_pow_exact(c, p - 1).map_err(e)?;
            let cur = h_stat_pow_exact(c, p).map_err(e)?;
            ensure(pow(&prev, p) <= pow(&cur, p - 1), || format!("curve {i}: exact decrease at p = {p}"))?;
        }
    }
    Ok(format!("{} curves, largest float decrease {worst:e}", curves.len()))
}

fn k_log_convexity() -> Outcome {
    let curves = corpus_all()?;
    let mut worst = 0.0f64;
    for (i, c) in curves.iter().enumerate() {
        let n = c.n() as f64;
        let grid: Vec<f64> = (0..=40).map(|k| n + 0.25 * k as f64).collect();
        let logs: Vec<f64> = k_stat_grid(c, &grid).map_err(e)?.into_iter().map(f64::ln).collect();
        for w in logs.windows(3) {
            worst = worst.min(w[0] - 2.0 * w[1] + w[2]);
        }
        ensure(worst >= -1e-9, || format!("curve {i}: second difference {worst:e}"))?;
    }
    Ok(format!("{} curves, smallest second difference {worst:e}", curves.len()))
}

fn quantization_convergence() -> Outcome {
    let start = Instant::now();
    let tm = ToricModel::builtin("p2").map_err(e)?;
    let tv = ToricValuation::new(&tm, vec![1, 0]).map_err(e)?;
    let curve = volume_curve_of(&tm, &tv).map_err(e)?;
    let mut notes = Vec::new();
    for p in 1..=2u32 {
        let s = s_p(&curve, p).map_err(e)?;
        let gap = |m: u32| -> Result<Rational, String> {
            Ok((s_m_p(&section_filtration(&tm, &tv, m).map_err(e)?, p) - &s).abs())
        };
        let (g4, g16) = (gap(4)?, gap(16)?);
        ensure(g16 <= g4, || format!("p = {p}: gap {} at m = 16 > {} at m = 4", format_rational(&g16), format_rational(&g4)))?;
        if p == 1 {
            for m in [1, 2, 4, 8, 16] {
                let g = gap(m)?;
                ensure(g.is_zero(), || format!("p = 1, m = {m}: gap {}", format_rational(&g)))?;
            }
        }
        notes.push(format!("p = {p}: gap(4) = {}, gap(16) = {}", format_rational(&g4), format_rational(&g16)));
    }
    within(Duration::from_secs(10), start)?;
    Ok(notes.join("; "))
}

/// `Σ x_i^{3/2}` bracketed from below and above.
fn sum_bracket(xs: &[Rational]) -> (Rational, Rational) {
    xs.iter().fold((Rational::zero(), Rational::zero()), |(lo, hi), x| {
        let (l, h) = power_bracket(x, 3, 2, 96);
        (lo + l, hi + h)
    })
}

fn rounding_sandwich_one(f: &FlagFiltration) -> Result<(), String> {
    let r = round_to_integer_filtration(f);
    let m = int(f.m() as i64);
    let d = int(f.d() as i64);
    for p in [1u32, 3] {
        let (sf, sr) = (s_m_p(f, p), s_m_p(&r, p));
        let slack = if p == 1 { Rational::from(int(1)) / &m } else { int(p as i64) / &m * s_m_p(f, p - 1) };
        ensure(sr <= sf && sr >= &sf - &slack, || format!("p = {p}, jumps {:?}", f.jumps().iter().map(format_rational).collect::<Vec<_>>()))?;
    }
    // p = 3/2: bracket the irrational powers; terms with integer jumps cancel.
    let scaled = |a: &Rational| a / &m;
    let moved: Vec<usize> = (0..f.d()).filter(|&j| !f.jumps()[j].is_integer()).collect();
    let orig: Vec<Rational> = moved.iter().map(|&j| scaled(&f.jumps()[j])).collect();
    let down: Vec<Rational> = moved.iter().map(|&j| scaled(&r.jumps()[j])).collect();
    let (orig_lo, orig_hi) = sum_bracket(&orig);
    let (down_lo, down_hi) = sum_bracket(&down);
    ensure(moved.is_empty() || down_hi <= orig_lo, || "p = 3/2: upper inequality not certified".into())?;
    let all_orig: Vec<Rational> = f.jumps().iter().map(scaled).collect();
    let all_down: Vec<Rational> = r.jumps().iter().map(scaled).collect();
    let (sf_lo, sf_hi) = sum_bracket(&all_orig);
    let (sr_lo, _) = sum_bracket(&all_down);
    let _ = (orig_hi, down_lo, sf_lo);
    let s1 = s_m_p(f, 1);
    let (inv_root_lo, _) = power_bracket(&(int(1) / &m), 1, 2, 96);
    // S(F_N) ≥ S(F) − (3/2) m^{−1/2} S^(1)(F).
    let rhs_hi = &sf_hi / &d - Rational::new(3.into(), 2.into()) * inv_root_lo * &s1;
    ensure(sr_lo / &d >= rhs_hi, || "p = 3/2: lower inequality not certified".into())
}

fn rounding_sandwich() -> Outcome {
    let mut rng = corpus::rng(606);
    for i in 0..100 {
        let f = corpus::fractional_filtration(&mut rng).map_err(e)?;
        rounding_sandwich_one(&f).map_err(|w| format!("filtration {i}: {w}"))?;
    }
    Ok("100 filtrations, p in {1, 3/2, 3}".into())
}

fn compatible_optimality() -> Outcome {
    let mut rng = corpus::rng(707);
    let mut attained = 0;
    for i in 0..50 {
        let f = corpus::random_flag_filtration(&mut rng, 5).map_err(e)?;
        for p in [1u32, 2] {
            let target = s_m_p(&f, p);
            let best = sup_over_bases_oracle(&f, p, 1000, 7000 + i).map_err(e)?;
            ensure(best <= target, || format!("flag {i}, p = {p}: sampled {} > {}", format_rational(&best), format_rational(&target)))?;
            attained += usize::from(best == target);
            let basis = compatible_basis(f.flag().expect("flag"), f.d()).map_err(e)?;
            let value = f.basis_moment(&basis, p).map_err(e)?;
            ensure(value == target, || format!("flag {i}, p = {p}: compatible basis gives {}", format_rational(&value)))?;
        }
    }
    Ok(format!("50 flags x 2 exponents; sampling reached the optimum in {attained} of 100"))
}

fn legendre_duality() -> Outcome {
    let mut rng = corpus::rng(808);
    for i in 0..100 {
        let tc = corpus::random_test_curve(&mut rng).map_err(e)?;
        let ray = legendre(&tc);
        ray.check_growth(tc.lambda_max()).map_err(|err| format!("curve {i}: {err}"))?;
        let back = inverse_legendre(&ray, tc.lambda_max()).map_err(e)?;
        ensure(back == tc, || format!("curve {i}: round trip changed the knots"))?;
    }
    Ok("100 curves round-trip exactly within 0 <= phi <= T t".into())
}

fn moment_identity() -> Outcome {
    let cases: [(&str, bool, &[i64]); 6] = [
        ("p2", false, &[1, 0]),
        ("p2", true, &[1, 1]),
        ("p1xp1", false, &[1, 1]),
        ("hirzebruch-1", false, &[-1, 2]),
        ("hirzebruch-2", false, &[0, -1]),
        ("pn:3", true, &[1, -1, 0]),
    ];
    let mut worst = 0.0f64;
    for (name, anti, v) in cases {
        let mut tm = ToricModel::builtin(name).map_err(e)?;
        if anti {
            tm = tm.anticanonical().map_err(e)?;
        }
        let tv = ToricValuation::new(&tm, v.to_vec()).map_err(e)?;
        let curve = volume_curve_of(&tm, &tv).map_err(e)?;
        let ct = concave_transform(&tm, &tv).map_err(e)?;
        for p in 1..=4u32 {
            let from_curve = to_f64(&s_p(&curve, p).map_err(e)?).powf(1.0 / p as f64);
            let from_body = dp_speed_transform(&ct, p).map_err(e)?;
            worst = worst.max((from_curve - from_body).abs());
            ensure((from_curve - from_body).abs() <= 1e-10, || format!("{name} v = {v:?}, p = {p}"))?;
        }
        if tm.dim() <= 2 {
            for p in [1.0, 2.0] {
                let target = to_f64(&s_p(&curve, p as u32).map_err(e)?).powf(1.0 / p);
                let gap = |m: u32| -> Result<f64, String> {
                    let f = section_filtration(&tm, &tv, m).map_err(e)?;
                    let mu = SpectralMeasure::from_jumps(f.jumps(), m).map_err(e)?;
                    Ok((dp_speed(&mu, p).map_err(e)? - target).abs())
                };
                let (g4, g16) = (gap(4)?, gap(16)?);
                ensure(g16 <= g4 + 1e-15, || format!("{name} v = {v:?}, p = {p}: gap {g16:e} at 16 > {g4:e} at 4"))?;
            }
        }
    }
    Ok(format!("6 toric cases, largest speed discrepancy {worst:e}"))
}

fn thresholds() -> Outcome {
    let p1 = ToricModel::builtin("pn:1").map_err(e)?;
    for p in [2.0, 3.0] {
        let r = kstability_verdict(&p1, p, 3, BORDERLINE_TOL).map_err(e)?;
        ensure(r.verdict == Verdict::Borderline, || format!("P1, p = {p}: {}", r.verdict))?;
        ensure(r.delta_pow == Some(kstability_threshold_pow(1, p as u32)), || format!("P1, p = {p}: not exactly the threshold"))?;
    }
    let p2 = ToricModel::builtin("p2").map_err(e)?;
    ensure(h_zero_exact(2, 1), || "h(1) != 0".into())?;
    for p in 2..=6u32 {
        let r = kstability_verdict(&p2, p as f64, 3, BORDERLINE_TOL).map_err(e)?;
        ensure(r.verdict == Verdict::BelowThreshold, || format!("P2, p = {p}: {}", r.verdict))?;
        ensure(r.delta_pow == Some(projective_space_delta_pow(2, p)), || format!("P2, p = {p}: value differs from closed form"))?;
        ensure(h_positive_exact(2, p), || format!("h({p}) not positive"))?;
    }
    Ok("P1 borderline at p = 2, 3; P2 below threshold with h(p) > 0 for p = 2..6".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("projective space closed form", projective_closed_form),
        ("barycenter sandwich", barycenter_sandwich),
        ("H monotonicity", h_monotonicity),
        ("K log-convexity", k_log_convexity),
        ("quantization convergence", quantization_convergence),
        ("N-rounding sandwich", rounding_sandwich),
        ("compatible-basis optimality", compatible_optimality),
        ("Legendre involution and growth", legendre_duality),
        ("moment identity", moment_identity),
        ("K-stability thresholds", thresholds),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{:.2?}]", i + 1, start.elapsed()),
            Err(witness) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({witness}) [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
