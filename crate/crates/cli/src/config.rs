//! TOML experiment configuration and its validation into a [`Plan`].

use crate::error::CliError;
use clap::ValueEnum;
use macroqsim::devind::{ChshKind, CorrelatorRoute, OptimizeConfig, SIGMA_SCAN_POINTS, SIGMA_SCAN_RANGE};
use macroqsim::finite_n::{auto_grid, DickeState, GridSpec, PointerSpec};
use macroqsim::limit::{auto_half_width, FockState, LimitMeasurement};
use macroqsim::qubit::{eig_decompose, limit_params, Channel, ChannelSpec, Mat2, QubitObservable};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Convergence,
    Identities,
    LgChsh,
    BellChsh,
    Density,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::Identities => "identities",
            Experiment::LgChsh => "lg-chsh",
            Experiment::BellChsh => "bell-chsh",
            Experiment::Density => "density",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must agree with the subcommand when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<PointerConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentitiesConfig>,
    #[serde(rename = "lg-chsh", skip_serializing_if = "Option::is_none")]
    pub lg_chsh: Option<LgConfig>,
    #[serde(rename = "bell-chsh", skip_serializing_if = "Option::is_none")]
    pub bell_chsh: Option<BellConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Either `excitation = k` (the basis state `|N,k>`) or `coeffs`, a list of
/// `[re, im]` amplitudes on `|N,0>, |N,1>, …`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub n: Option<usize>,
    pub excitation: Option<usize>,
    pub coeffs: Option<Vec<[f64; 2]>>,
}

/// `A = [[a00, a01], [conj(a01), a11]]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    #[serde(default)]
    pub a00: f64,
    #[serde(default)]
    pub a11: f64,
    pub a01: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Identity,
    Dephasing,
    Depolarizing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    #[serde(default)]
    pub strength: f64,
    /// Probability that a particle reaches the apparatus.
    #[serde(default = "one")]
    pub loss_p: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerConfig {
    pub sigma: f64,
}

/// Symmetric outcome grid `[-half_width, half_width]` with step at most `max_dx`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub max_dx: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub ns: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_width_draws")]
    pub width_draws: usize,
    #[serde(default = "default_quadruples")]
    pub quadruples: usize,
}

fn default_width_draws() -> usize {
    8
}
fn default_quadruples() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LgConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// `[lo, hi]`; equal ends fix σ.
    #[serde(default = "unit_range")]
    pub sigma_range: [f64; 2],
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: u64,
    #[serde(default)]
    pub route: CorrelatorRoute,
}

fn default_dim() -> usize {
    3
}
fn unit_range() -> [f64; 2] {
    [1.0, 1.0]
}
fn default_scan_points() -> usize {
    SIGMA_SCAN_POINTS
}
fn default_max_iters() -> u64 {
    4000
}

impl Default for LgConfig {
    fn default() -> Self {
        Self { dim: 3, sigma_range: unit_range(), scan_points: SIGMA_SCAN_POINTS, max_iters: 4000, route: CorrelatorRoute::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_beta_range")]
    pub beta_range: [f64; 2],
    #[serde(default = "default_max_iters")]
    pub max_iters: u64,
    #[serde(default = "default_checks")]
    pub no_signalling_checks: usize,
}

fn default_beta_range() -> [f64; 2] {
    [1e-3, 2.0]
}
fn default_checks() -> usize {
    20
}

impl Default for BellConfig {
    fn default() -> Self {
        Self { dim: 3, beta_range: default_beta_range(), max_iters: 4000, no_signalling_checks: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityModel {
    /// Exact rescaled density for `N` particles.
    Finite,
    /// The macroscopic-limit density.
    Limit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub model: DensityModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Everything an experiment needs, already checked against the library's
/// preconditions.
#[derive(Debug, Clone)]
pub enum Plan {
    Convergence { state: DickeState, observable: QubitObservable, spec: ChannelSpec, pointer: PointerSpec, ns: Vec<usize> },
    Identities { seed: u64, width_draws: usize, quadruples: usize },
    LgReference { range: (f64, f64), points: usize, route: CorrelatorRoute },
    LgOptimize(OptimizeConfig),
    Bell { search: OptimizeConfig, checks: usize, seed: u64 },
    FiniteDensity { state: DickeState, observable: QubitObservable, spec: ChannelSpec, pointer: PointerSpec, grid: GridSpec },
    LimitDensity { state: FockState, meas: LimitMeasurement, grid: GridSpec },
}

fn need<'a, T>(section: &'a Option<T>, name: &str, experiment: Experiment) -> Result<&'a T, CliError> {
    section.as_ref().ok_or_else(|| CliError::Config(format!("experiment {} needs a [{name}] section", experiment.name())))
}

fn lib<T>(r: macroqsim::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn range(r: [f64; 2], what: &str) -> Result<(f64, f64), CliError> {
    if !(r[0] > 0.0 && r[1] >= r[0] && r[1].is_finite()) {
        return Err(CliError::Config(format!("{what} must satisfy 0 < lo ≤ hi, got {r:?}")));
    }
    Ok((r[0], r[1]))
}

impl StateConfig {
    fn coefficients(&self) -> Result<Vec<C64>, CliError> {
        match (self.excitation, &self.coeffs) {
            (Some(k), None) => Ok((0..=k).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()),
            (None, Some(c)) if !c.is_empty() => Ok(c.iter().map(|[re, im]| C64::new(*re, *im)).collect()),
            _ => Err(CliError::Config("[state] needs exactly one of `excitation` or a non-empty `coeffs`".into())),
        }
    }

    fn dicke(&self, n: usize) -> Result<DickeState, CliError> {
        lib(DickeState::pure(n, &self.coefficients()?))
    }

    fn fock(&self) -> Result<FockState, CliError> {
        lib(FockState::pure(&self.coefficients()?))
    }
}

impl ObservableConfig {
    fn build(&self) -> Result<QubitObservable, CliError> {
        let off = C64::new(self.a01[0], self.a01[1]);
        lib(eig_decompose(Mat2::new(C64::new(self.a00, 0.0), off, off.conj(), C64::new(self.a11, 0.0))))
    }
}

impl ChannelConfig {
    fn build(&self) -> Result<ChannelSpec, CliError> {
        let channel = match self.kind {
            ChannelKind::Identity => Channel::Identity,
            ChannelKind::Dephasing => Channel::Dephasing { strength: self.strength },
            ChannelKind::Depolarizing => Channel::Depolarizing { strength: self.strength },
        };
        lib(ChannelSpec::new(channel, self.loss_p))
    }
}

/// Seeds for the run: the command line wins over the config file; the
/// optimizers fall back to `0..16`.
pub fn effective_seeds(cli: &[u64], cfg: &ExperimentConfig, fallback: &[u64]) -> Vec<u64> {
    if !cli.is_empty() {
        cli.to_vec()
    } else if !cfg.seeds.is_empty() {
        cfg.seeds.clone()
    } else {
        fallback.to_vec()
    }
}

pub fn plan(cfg: &ExperimentConfig, experiment: Experiment, seeds: &[u64], reference: bool) -> Result<Plan, CliError> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(CliError::Config(format!("config is for experiment {}, but {} was requested", e.name(), experiment.name())));
        }
    }
    if reference && experiment != Experiment::LgChsh {
        return Err(CliError::Config("--reference only applies to lg-chsh".into()));
    }
    let measurement = || -> Result<(QubitObservable, ChannelSpec, PointerSpec), CliError> {
        let a = need(&cfg.observable, "observable", experiment)?.build()?;
        let spec = need(&cfg.channel, "channel", experiment)?.build()?;
        let pointer = lib(PointerSpec::new(need(&cfg.pointer, "pointer", experiment)?.sigma))?;
        lib(limit_params(&spec, &a, pointer.sigma))?;
        Ok((a, spec, pointer))
    };
    match experiment {
        Experiment::Convergence => {
            let ns = need(&cfg.convergence, "convergence", experiment)?.ns.clone();
            if ns.is_empty() || ns.contains(&0) || ns.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config(format!("convergence.ns must be increasing and positive, got {ns:?}")));
            }
            let (observable, spec, pointer) = measurement()?;
            let state = need(&cfg.state, "state", experiment)?.dicke(ns[0])?;
            Ok(Plan::Convergence { state, observable, spec, pointer, ns })
        }
        Experiment::Identities => {
            let c = cfg.identities.clone().unwrap_or(IdentitiesConfig { width_draws: 8, quadruples: 100 });
            if c.width_draws == 0 || c.quadruples == 0 {
                return Err(CliError::Config("identities needs at least one draw and one quadruple".into()));
            }
            Ok(Plan::Identities { seed: seeds.first().copied().unwrap_or(0), width_draws: c.width_draws, quadruples: c.quadruples })
        }
        Experiment::LgChsh => {
            let c = cfg.lg_chsh.clone().unwrap_or_default();
            if reference {
                let r = if c.sigma_range[0] == c.sigma_range[1] { SIGMA_SCAN_RANGE } else { range(c.sigma_range, "sigma_range")? };
                if c.scan_points < 3 {
                    return Err(CliError::Config("scan_points must be at least 3".into()));
                }
                return Ok(Plan::LgReference { range: r, points: c.scan_points, route: c.route });
            }
            let mut search = OptimizeConfig::new(ChshKind::LeggettGarg, c.dim, range(c.sigma_range, "sigma_range")?);
            search.seeds = seeds.to_vec();
            search.max_iters = c.max_iters;
            search.route = c.route;
            lib(search.validate())?;
            Ok(Plan::LgOptimize(search))
        }
        Experiment::BellChsh => {
            let c = cfg.bell_chsh.clone().unwrap_or_default();
            let mut search = OptimizeConfig::new(ChshKind::Bell, c.dim, range(c.beta_range, "beta_range")?);
            search.seeds = seeds.to_vec();
            search.max_iters = c.max_iters;
            lib(search.validate())?;
            Ok(Plan::Bell { search, checks: c.no_signalling_checks, seed: seeds.first().copied().unwrap_or(0) })
        }
        Experiment::Density => {
            let model = need(&cfg.density, "density", experiment)?.model;
            let (observable, spec, pointer) = measurement()?;
            let sc = need(&cfg.state, "state", experiment)?;
            let explicit = match &cfg.grid {
                Some(g) if !(g.half_width > 0.0 && g.max_dx > 0.0 && g.half_width.is_finite()) => {
                    return Err(CliError::Config(format!("grid needs positive half_width and max_dx, got {g:?}")));
                }
                Some(g) => Some(GridSpec::symmetric(g.half_width, g.max_dx)),
                None => None,
            };
            match model {
                DensityModel::Finite => {
                    let n = sc.n.ok_or_else(|| CliError::Config("finite density needs state.n".into()))?;
                    let state = sc.dicke(n)?;
                    let grid = match explicit {
                        Some(g) => g,
                        None => lib(auto_grid(&state, &observable, &spec, pointer))?,
                    };
                    Ok(Plan::FiniteDensity { state, observable, spec, pointer, grid })
                }
                DensityModel::Limit => {
                    let state = sc.fock()?;
                    let meas = lib(limit_params(&spec, &observable, pointer.sigma))?;
                    let grid = explicit.unwrap_or_else(|| GridSpec::symmetric(auto_half_width(&meas, state.dim()), 0.02));
                    Ok(Plan::LimitDensity { state, meas, grid })
                }
            }
        }
    }
}
