// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use serde_json::json;

use pmoments::corpus;
use pmoments::filtration::{round_to_integer_filtration, s_m_p};
use pmoments::geodesic::{inverse_legendre, legendre, verify_moment_identity};
use pmoments::invariants::{continuity_scan, delta_family, fmt_float};
use pmoments::numeric::rational::pow;
use pmoments::numeric::{format_rational, int, Rational};
use pmoments::toric::{candidates, volume_curve_of, ToricModel, ToricValuation};
use pmoments::volume_curve::{
    barycenter_bounds_exact, conjecture_scan, h_stat, h_stat_pow_exact, k_stat_grid, max_decrease, s_p, tau_scale,
    VolumeCurve,
};

use crate::config::{load_model, parse_p_grid, parse_t_grid, read_file, InvariantsArgs, ScanArgs, VerifyArgs};
use crate::output::{emit, Table};
use crate::Failure;

pub fn invariants(args: &InvariantsArgs) -> Result<(), Failure> {
    let tm = load_model(&args.model)?;
    let grid = parse_p_grid(&args.p)?;
    let report = delta_family(&tm, &grid, args.model.bound, args.tol)?;
    let mut json = report.to_json();
    json["model"] = json!(args.model.model);
    json["anticanonical"] = json!(args.model.anticanonical);
    let table = Table {
        header: vec!["p", "delta_upper", "argmin", "alpha_upper", "threshold", "verdict"],
        rows: report.csv_rows().into_iter().map(Vec::from).collect(),
        json,
    };
    emit(&args.output, &table)?;
    if let Some((a, b)) = report.nonincreasing_violations.first() {
        return Err(Failure::invariant("DeltaFamily.nonincreasing", &format!("p = {a} -> {b}")));
    }
    if let Some(w) = report.bracket_violations.first() {
        return Err(Failure::invariant("DeltaFamily.bracket", w));
    }
    if report.sandwich_holds == Some(false) {
        return Err(Failure::invariant("DeltaFamily.alpha_sandwich", "p = 1"));
    }
    Ok(())
}

struct Check {
    name: &'static str,
    property: String,
    cases: usize,
    witness: Option<String>,
}

impl Check {
    fn run<T>(
        name: &'static str,
        property: &'static str,
        cases: &[(String, T)],
        test: impl Fn(&T) -> Result<Option<String>, Failure>,
    ) -> Result<Check, Failure> {
        let mut witness = None;
        for (subject, case) in cases {
            if let Some(w) = test(case)? {
                witness = Some(format!("{subject}: {w}"));
                break;
            }
        }
        Ok(Check {
            name,
            property: property.to_string(),
            cases: cases.len(),
            witness,
        })
    }
}

fn model_curves(tm: &ToricModel, bound: u32) -> Result<Vec<(String, VolumeCurve)>, Failure> {
    candidates(tm.dim(), bound)
        .into_iter()
        .map(|v| {
            let tv = ToricValuation::new(tm, v.clone())?;
            Ok((format!("v = {v:?}"), volume_curve_of(tm, &tv)?))
        })
        .collect()
}

fn barycenter(c: &VolumeCurve) -> Result<Option<String>, Failure> {
    for p in 1..=6u32 {
        let s = s_p(c, p)?;
        let (lo, hi) = barycenter_bounds_exact(c, p);
        if s < lo || s > hi {
            return Ok(Some(format!(
                "p = {p}: S = {} outside [{}, {}]",
                format_rational(&s),
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
    }
    Ok(None)
}

fn h_monotone(c: &VolumeCurve, grid: &[f64]) -> Result<Option<String>, Failure> {
    if c.is_degenerate() {
        return Ok(None);
    }
    let values: Vec<f64> = grid.iter().map(|&p| h_stat(c, p)).collect::<Result<_, _>>()?;
    let drop = max_decrease(&values);
    if drop > 1e-9 * tau_scale(c) {
        return Ok(Some(format!("float decrease {drop:e}")));
    }
    for p in 2..=10u32 {
        let (prev, cur) = (h_stat_pow_exact(c, p - 1)?, h_stat_pow_exact(c, p)?);
        if pow(&prev, p) > pow(&cur, p - 1) {
            return Ok(Some(format!("p = {}: H decreases", p)));
        }
    }
    Ok(None)
}

fn k_log_convex(c: &VolumeCurve) -> Result<Option<String>, Failure> {
    if c.is_degenerate() {
        return Ok(None);
    }
    let n = f64::from(c.n());
    let grid: Vec<f64> = (0..=40).map(|k| n + 0.25 * k as f64).collect();
    let logs: Vec<f64> = k_stat_grid(c, &grid)?.into_iter().map(f64::ln).collect();
    for (i, w) in logs.windows(3).enumerate() {
        let second = w[0] - 2.0 * w[1] + w[2];
        if second < -1e-9 {
            return Ok(Some(format!("s = {}: second difference {second:e}", grid[i + 1])));
        }
    }
    Ok(None)
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let tm = load_model(&args.model)?;
    let grid = parse_p_grid(&args.p)?;
    let mut checks = Vec::new();
    let mut curves = model_curves(&tm, args.model.bound)?;
    for n in 1..=3 {
        for (i, c) in corpus::admissible_curves(n, 20, args.seed)?.into_iter().enumerate() {
            curves.push((format!("corpus n = {n} #{i}"), c));
        }
    }
    if let Some(path) = &args.curve {
        let loaded = VolumeCurve::from_json(&read_file(path)?);
        match loaded {
            Ok(c) => curves.push((path.display().to_string(), c)),
            Err(pmoments::Error::Invariant { property, witness }) => checks.push(Check {
                name: "curve_file",
                property,
                cases: 1,
                witness: Some(format!("{}: {witness}", path.display())),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    checks.push(Check::run("barycenter_bounds", "VolumeCurve.barycenter_bounds", &curves, barycenter)?);
    checks.push(Check::run("h_monotonicity", "VolumeCurve.h_nondecreasing", &curves, |c| h_monotone(c, &grid))?);
    checks.push(Check::run("k_log_convexity", "VolumeCurve.k_log_convex", &curves, k_log_convex)?);

    let mut rng = corpus::rng(args.seed);
    let filtrations = (0..20)
        .map(|i| Ok((format!("filtration #{i}"), corpus::fractional_filtration(&mut rng)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    checks.push(Check::run("rounding_sandwich", "Filtration.rounding_sandwich", &filtrations, |f| {
        let r = round_to_integer_filtration(f);
        let m = int(f.m() as i64);
        for p in [1u32, 3] {
            let (sf, sr) = (s_m_p(f, p), s_m_p(&r, p));
            let slack = if p == 1 { Rational::from(int(1)) / &m } else { int(p as i64) / &m * s_m_p(f, p - 1) };
            if sr > sf || sr < &sf - &slack {
                return Ok(Some(format!("p = {p}: rounded {} vs {}", format_rational(&sr), format_rational(&sf))));
            }
        }
        Ok(None)
    })?);

    let tests = (0..20)
        .map(|i| Ok((format!("test curve #{i}"), corpus::random_test_curve(&mut rng)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    checks.push(Check::run("legendre_involution", "GeodesicRay1D.legendre_involution", &tests, |tc| {
        let ray = legendre(tc);
        if let Err(e) = ray.check_growth(tc.lambda_max()) {
            return Ok(Some(e.to_string()));
        }
        Ok((inverse_legendre(&ray, tc.lambda_max())? != *tc).then(|| "round trip changed the knots".to_string()))
    })?);

    let rays: Vec<(String, Vec<i64>)> =
        tm.fan().rays().iter().take(3).map(|v| (format!("v = {v:?}"), v.clone())).collect();
    checks.push(Check::run("moment_identity", "MomentIdentity.convergence", &rays, |v| {
        let tv = ToricValuation::new(&tm, v.clone())?;
        for p in 1..=2u32 {
            let r = verify_moment_identity(&tm, &tv, p, args.m)?;
            if !r.passes {
                let last = r.rows.last().map_or(0.0, |row| row.gap);
                return Ok(Some(format!(
                    "p = {p}: identity gap {:e}, gap {last:e} at m = {} (bound {:e})",
                    r.identity_gap, args.m, r.gap_bound
                )));
            }
        }
        Ok(None)
    })?);

    let status = |c: &Check| if c.witness.is_some() { "fail" } else { "pass" };
    let table = Table {
        header: vec!["check", "property", "cases", "status", "witness"],
        rows: checks
            .iter()
            .map(|c| {
                vec![
                    c.name.to_string(),
                    c.property.clone(),
                    c.cases.to_string(),
                    status(c).to_string(),
                    c.witness.clone().unwrap_or_default(),
                ]
            })
            .collect(),
        json: json!({
            "model": args.model.model,
            "seed": args.seed,
            "passed": checks.iter().all(|c| c.witness.is_none()),
            "checks": checks.iter().map(|c| json!({
                "check": c.name,
                "property": c.property,
                "cases": c.cases,
                "status": status(c),
                "witness": c.witness,
            })).collect::<Vec<_>>(),
        }),
    };
    emit(&args.output, &table)?;
    match checks.iter().find(|c| c.witness.is_some()) {
        Some(c) => Err(Failure::invariant(&c.property, c.witness.as_deref().unwrap_or_default())),
        None => Ok(()),
    }
}

pub fn scan(args: &ScanArgs) -> Result<(), Failure> {
    let tm = load_model(&args.model)?;
    if !tm.fan().is_q_gorenstein() {
        return Err(pmoments::Error::Unsupported("the fan is not Q-Gorenstein".into()).into());
    }
    let ps = parse_p_grid(&args.p)?;
    let ts = parse_t_grid(&args.t)?;
    let curve = match (&args.curve, &args.v) {
        (Some(path), _) => VolumeCurve::from_json(&read_file(path)?)?,
        (None, v) => {
            let v = v.clone().unwrap_or_else(|| tm.fan().rays()[0].clone());
            volume_curve_of(&tm, &ToricValuation::new(&tm, v)?)?
        }
    };
    // series, x, value, step_ok, status
    let mut rows: Vec<[String; 5]> = Vec::new();
    let mut prev: Option<f64> = None;
    for &p in &ps {
        let h = h_stat(&curve, p)?;
        let ok = prev.map_or(true, |q| h >= q * (1.0 - 1e-12));
        rows.push(["H".into(), fmt_float(p), fmt_float(h), ok.to_string(), "proven-nondecreasing".into()]);
        prev = Some(h);
    }
    for row in conjecture_scan(&curve, &ps)? {
        rows.push([
            "beta_normalized".into(),
            fmt_float(row.p),
            fmt_float(row.value),
            row.nonincreasing_step.to_string(),
            "conjectural-nonincreasing".into(),
        ]);
    }
    for (t, delta) in continuity_scan(&tm, args.continuity_p, args.model.bound, args.ray, &ts)? {
        rows.push([
            "delta_continuity".into(),
            format_rational(&t),
            fmt_float(delta),
            String::new(),
            "exploratory".into(),
        ]);
    }
    let json = json!({
        "model": args.model.model,
        "continuity_p": args.continuity_p,
        "ray": args.ray,
        "rows": rows.iter().map(|r| json!({
            "series": r[0], "x": r[1], "value": r[2], "step_ok": r[3], "status": r[4],
        })).collect::<Vec<_>>(),
    });
    emit(
        &args.output,
        &Table {
            header: vec!["series", "x", "value", "step_ok", "status"],
            rows: rows.into_iter().map(Vec::from).collect(),
            json,
        },
    )
}
