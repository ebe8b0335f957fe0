//! Experiment runners. Each writes its artifacts through [`Artifacts`] and
//! returns nothing else; numerical failures propagate verbatim.

use crate::config::Plan;
use crate::error::CliError;
use crate::output::Artifacts;
use macroqsim::convergence::convergence_study;
use macroqsim::devind::{
    lg_chsh, lg_reference_value, no_signalling_defect, optimize_chsh, reference_lg_settings, reference_lg_state, scan_sigma,
    ChshResult, OptimizeResult, SchmidtState,
};
use macroqsim::finite_n::finite_distribution;
use macroqsim::limit::{identity_suite, route_equivalence_suite, single_meas_density, LimitMeasurement};
use serde::Serialize;
use serde_json::json;
use std::f64::consts::TAU;
use std::io::Write;

pub fn run(plan: &Plan, out: &mut Artifacts) -> Result<(), CliError> {
    match plan {
        Plan::Convergence { state, observable, spec, pointer, ns } => {
            let study = convergence_study(state, observable, spec, *pointer, ns)?;
            out.write_with("convergence.csv", "KS and L1 distance to the limit density per N", |w| {
                writeln!(w, "n,ks,l1")?;
                for p in &study.points {
                    writeln!(w, "{},{:.16e},{:.16e}", p.n, p.ks, p.l1)?;
                }
                Ok(())
            })?;
            out.write_with("limit_density.csv", "limit density on the comparison grid", |w| study.limit.write_csv(w))?;
            out.write_json(
                "convergence.json",
                "convergence summary",
                &json!({
                    "points": study.points,
                    "grid": study.grid,
                    "ks_slope": study.ks_slope(),
                    "ks_strictly_decreasing": study.ks_strictly_decreasing(),
                }),
            )
        }
        Plan::Identities { seed, width_draws, quadruples } => {
            let mut reports = identity_suite(*seed, *width_draws, *quadruples)?;
            reports.extend(route_equivalence_suite(*seed)?);
            let all_pass = reports.iter().all(|r| r.pass);
            out.write_json("identities.json", "identity residuals with pass flags", &json!({ "all_pass": all_pass, "reports": reports }))
        }
        Plan::LgReference { range, points, route } => {
            let state = reference_lg_state();
            let settings = reference_lg_settings();
            let reference = lg_reference_value();
            let unit = lg_chsh(&state, settings, 1.0, *route)?;
            let scan = scan_sigma(&state, settings, *range, *points, *route)?;
            out.write_with("sigma_scan.csv", "C on the σ scan grid", |w| {
                writeln!(w, "sigma,value")?;
                for (s, v) in scan.sigmas.iter().zip(&scan.values) {
                    writeln!(w, "{s:.16e},{v:.16e}")?;
                }
                Ok(())
            })?;
            out.write_json(
                "lg_chsh.json",
                "Leggett-Garg CHSH at the reference state and settings",
                &json!({
                    "reference_value": reference,
                    "at_unit_sigma": unit,
                    "unit_sigma_delta": (unit.value - reference).abs(),
                    "best_sigma": scan.best_sigma,
                    "best": scan.best,
                    "delta": (scan.best.value - reference).abs(),
                }),
            )
        }
        Plan::LgOptimize(search) => {
            let res = optimize_chsh(search)?;
            write_search(out, "lg", &res, json!({}))
        }
        Plan::Bell { search, checks, seed } => {
            let res = optimize_chsh(search)?;
            let worst = no_signalling(&res.best, *checks, *seed)?;
            let extra = json!({
                "margin": res.best.value - 2.0,
                "no_signalling_max": worst,
                "no_signalling_checks": checks,
            });
            write_search(out, "bell", &res, extra)
        }
        Plan::FiniteDensity { state, observable, spec, pointer, grid } => {
            let d = finite_distribution(state, observable, spec, *pointer, *grid)?;
            out.write_with("density.csv", "rescaled finite-N outcome density", |w| d.write_csv(w))?;
            out.write_json("density.json", "density summary", &json!({ "grid": d.grid, "mass": d.mass(), "mean": d.mean() }))
        }
        Plan::LimitDensity { state, meas, grid } => {
            let d = single_meas_density(state, meas, *grid)?;
            out.write_with("density.csv", "limit outcome density", |w| d.write_csv(w))?;
            out.write_json(
                "density.json",
                "density summary",
                &json!({ "grid": d.grid, "measurement": meas, "mass": d.mass(), "mean": d.mean() }),
            )
        }
    }
}

#[derive(Serialize)]
struct SearchReport<'a> {
    best: &'a ChshResult,
    best_seed: u64,
    per_seed: &'a [macroqsim::devind::optimize::SeedOutcome],
    checks: serde_json::Value,
}

fn write_search(out: &mut Artifacts, prefix: &str, res: &OptimizeResult, checks: serde_json::Value) -> Result<(), CliError> {
    out.write_with(&format!("{prefix}_trace.csv"), "every objective evaluation of the search", |w| res.write_trace_csv(w))?;
    let report = SearchReport { best: &res.best, best_seed: res.best_seed, per_seed: &res.per_seed, checks };
    out.write_json(&format!("{prefix}_chsh.json"), "best CHSH value and per-seed optima", &report)
}

/// Largest no-signalling defect over `checks` setting triples on an
/// additive-recurrence angle sequence started at `seed`.
fn no_signalling(best: &ChshResult, checks: usize, seed: u64) -> Result<f64, CliError> {
    let rho = best.state.rho();
    let c: Vec<f64> = (0..rho.nrows()).map(|k| rho[(k, k)].re.max(0.0).sqrt()).collect();
    let state = SchmidtState::normalized(&c)?;
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut t = (seed as f64 * golden).fract();
    let mut angle = || {
        t = (t + golden).fract();
        t * TAU
    };
    let xs: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.25).collect();
    let mut worst = 0.0f64;
    for _ in 0..checks {
        let a = LimitMeasurement::ideal(best.width, angle());
        let b1 = LimitMeasurement::ideal(best.width, angle());
        let b2 = LimitMeasurement::ideal(best.width, angle());
        worst = worst.max(no_signalling_defect(&state, &a, &b1, &b2, &xs)?);
    }
    Ok(worst)
}
