//! Multi-start simplex search for the largest CHSH value over settings,
//! states and (optionally) the measurement width.

use super::bell::{bell_chsh, SchmidtState};
use super::leggett_garg::{lg_chsh, CorrelatorRoute};
use super::{ChshKind, ChshResult, Settings};
use crate::error::{Error, Result};
use crate::limit::FockState;
use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::sync::Mutex;

/// Largest state dimension the search accepts.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub kind: ChshKind,
    pub dim: usize,
    /// `(lo, hi)` range of σ (Leggett-Garg) or β (Bell); `lo == hi` fixes it.
    pub width: (f64, f64),
    pub seeds: Vec<u64>,
    pub max_iters: u64,
    pub route: CorrelatorRoute,
}

impl OptimizeConfig {
    /// 16 seeds `0..16`, 4000 simplex iterations per start.
    pub fn new(kind: ChshKind, dim: usize, width: (f64, f64)) -> Self {
        Self { kind, dim, width, seeds: (0..16).collect(), max_iters: 4000, route: CorrelatorRoute::ErfMoments }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::InvalidParameter(format!("state dimension must be in 1..={MAX_DIM}, got {}", self.dim)));
        }
        let (lo, hi) = self.width;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("width range must satisfy 0 < lo ≤ hi, got ({lo}, {hi})")));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("at least one seed is required".into()));
        }
        Ok(())
    }

    fn free_width(&self) -> bool {
        self.width.1 > self.width.0
    }

    /// 4 angles, then hyperspherical amplitude angles, then phases (complex
    /// Leggett-Garg states only), then the width parameter if it is free.
    fn n_params(&self) -> usize {
        let phases = if self.kind == ChshKind::LeggettGarg { self.dim - 1 } else { 0 };
        4 + (self.dim - 1) + phases + usize::from(self.free_width())
    }

    fn width_of(&self, p: &[f64]) -> f64 {
        let (lo, hi) = self.width;
        if self.free_width() {
            let t = p[self.n_params() - 1];
            (lo.ln() + (hi.ln() - lo.ln()) * 0.5 * (1.0 - t.cos())).exp()
        } else {
            lo
        }
    }

    fn amplitudes(&self, p: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        let mut rest = 1.0;
        for k in 0..d - 1 {
            out[k] = rest * p[4 + k].cos();
            rest *= p[4 + k].sin();
        }
        out[d - 1] = rest;
        out
    }

    fn evaluate(&self, p: &[f64]) -> Result<ChshResult> {
        let settings: Settings = [p[0], p[1], p[2], p[3]];
        let amp = self.amplitudes(p);
        let width = self.width_of(p);
        match self.kind {
            ChshKind::LeggettGarg => {
                let phases = &p[4 + self.dim - 1..];
                let c: Vec<C64> = amp
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| if k == 0 { C64::new(r, 0.0) } else { C64::from_polar(r, phases[k - 1]) })
                    .collect();
                lg_chsh(&FockState::pure(&c)?, settings, width, self.route)
            }
            ChshKind::Bell => {
                let c: Vec<f64> = amp.iter().map(|r| r.abs()).collect();
                bell_chsh(&SchmidtState::normalized(&c)?, settings, width)
            }
        }
    }

    fn initial_point(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..TAU)).collect();
        p.extend((0..self.dim - 1).map(|_| rng.gen_range(0.0..PI / 2.0)));
        if self.kind == ChshKind::LeggettGarg {
            p.extend((0..self.dim - 1).map(|_| rng.gen_range(0.0..TAU)));
        }
        if self.free_width() {
            p.push(rng.gen_range(0.0..PI));
        }
        p
    }
}

/// One objective evaluation in the search.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub seed: u64,
    pub evaluation: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

struct Objective<'a> {
    config: &'a OptimizeConfig,
    trace: Mutex<Vec<(Vec<f64>, f64)>>,
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        // A failed evaluation is treated as a very poor point.
        let value = self.config.evaluate(p).map(|r| r.value).unwrap_or(-1e3);
        self.trace.lock().expect("trace lock").push((p.clone(), value));
        Ok(-value)
    }
}

fn simplex(x0: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut out = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        out.push(v);
    }
    out
}

fn run_simplex<'a>(objective: Objective<'a>, x0: &[f64], step: f64, iters: u64) -> Result<(Vec<f64>, Objective<'a>)> {
    let solver = NelderMead::new(simplex(x0, step))
        .with_sd_tolerance(1e-13)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let res = Executor::new(objective, solver)
        .configure(|s| s.max_iters(iters))
        .run()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let best = res.state().best_param.clone().unwrap_or_else(|| x0.to_vec());
    let objective = res.problem.problem.expect("problem is returned by the executor");
    Ok((best, objective))
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub params: Vec<f64>,
    pub result: ChshResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeResult {
    pub best: ChshResult,
    pub best_seed: u64,
    pub per_seed: Vec<SeedOutcome>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl OptimizeResult {
    /// CSV with columns `seed,evaluation,p0,…,value`.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.trace.first().map_or(0, |r| r.params.len());
        let cols: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        writeln!(w, "seed,evaluation,{},value", cols.join(","))?;
        for r in &self.trace {
            let ps: Vec<String> = r.params.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{},{},{},{:.16e}", r.seed, r.evaluation, ps.join(","), r.value)?;
        }
        Ok(())
    }
}

/// Run one simplex search per seed (in parallel) and return the best result.
/// Each start is followed by one restart from its optimum with a smaller
/// simplex. Results do not depend on the thread count.
pub fn optimize_chsh(config: &OptimizeConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| -> Result<(SeedOutcome, Vec<TraceRow>)> {
            let x0 = config.initial_point(seed);
            let objective = Objective { config, trace: Mutex::new(Vec::new()) };
            let (x1, objective) = run_simplex(objective, &x0, 0.4, config.max_iters)?;
            let (x2, objective) = run_simplex(objective, &x1, 0.05, config.max_iters)?;
            let result = config.evaluate(&x2)?;
            let trace = objective
                .trace
                .into_inner()
                .expect("trace lock")
                .into_iter()
                .enumerate()
                .map(|(i, (params, value))| TraceRow { seed, evaluation: i, params, value })
                .collect();
            Ok((SeedOutcome { seed, params: x2, result }, trace))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_seed = Vec::with_capacity(runs.len());
    let mut trace = Vec::new();
    for (outcome, rows) in runs {
        per_seed.push(outcome);
        trace.extend(rows);
    }
    let best_idx = (0..per_seed.len()).fold(0, |b, i| if per_seed[i].result.value > per_seed[b].result.value { i } else { b });
    Ok(OptimizeResult { best: per_seed[best_idx].result.clone(), best_seed: per_seed[best_idx].seed, per_seed, trace })
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The settings equivalent to `target` under the relabelings that leave the
/// CHSH form invariant (swap `A1↔A2` with `B2 → B2+π`, swap `B1↔B2` with
/// `A2 → A2+π`) and under reflection of all angles.
pub fn chsh_settings_orbit(target: Settings) -> Vec<Settings> {
    let key = |s: &Settings| s.map(|a| (a.rem_euclid(TAU) * 1e6).round() as i64 % (TAU * 1e6).round() as i64);
    let gens: [fn(Settings) -> Settings; 3] = [
        |[a1, a2, b1, b2]| [a2, a1, b1, b2 + PI],
        |[a1, a2, b1, b2]| [a1, a2 + PI, b2, b1],
        |s| s.map(|a| -a),
    ];
    let mut seen = vec![key(&target)];
    let mut out = vec![target];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let next = g(out[i]);
            let k = key(&next);
            if !seen.contains(&k) {
                seen.push(k);
                out.push(next);
            }
        }
        i += 1;
    }
    out
}

/// Smallest max-angle distance between `found` and any member of the orbit
/// of `target`, allowing a common shift of all four angles.
pub fn orbit_distance(found: Settings, target: Settings) -> f64 {
    chsh_settings_orbit(target)
        .into_iter()
        .map(|t| {
            let d: Vec<f64> = (0..4).map(|i| wrap(found[i] - t[i])).collect();
            let (s, c) = d.iter().fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
            let shift = s.atan2(c);
            d.iter().map(|x| wrap(x - shift).abs()).fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}
