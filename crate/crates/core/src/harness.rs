//! Monte Carlo experiment engine.
//!
//! Each run draws a fresh instance (scores, protected flags, screening order)
//! from the stream `(master_seed, run_index)`, solves the algorithmic best-k
//! baseline on it, solves the compared problem on the same instance, and
//! reports [`RunMetrics`]. Fatigue noise comes from a second stream offset by
//! [`FATIGUE_STREAM_OFFSET`], so it never shares draws with the instance.
//! Runs in which either solve is infeasible are discarded from the means.
//!
//! Aggregates are reduced sequentially over run-ordered metrics, so results are
//! bit-identical for any number of worker threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CandidatePool, ProblemParams, ScreeningOrder};
use crate::error::{Error, Result};
use crate::fatigue::{FatigueKind, FatigueModel};
use crate::metrics::RunMetrics;
use crate::rng::RngStream;
use crate::sampling::{
    generate_iso_correlated, generate_iso_independent, sample_protected, sample_truncated_normal, ScoreDistribution,
};
use crate::search::{cascade_search, examination_search, SearchOutcome};

/// Stream index offset for fatigue draws.
pub const FATIGUE_STREAM_OFFSET: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrderModel {
    /// Uniform random order, independent of scores.
    Independent,
    /// Order whose position–score Spearman correlation targets `rho`.
    Correlated { rho: f64 },
}

impl OrderModel {
    pub fn rho(&self) -> Option<f64> {
        match self {
            OrderModel::Independent => None,
            OrderModel::Correlated { rho } => Some(*rho),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Best,
    Good,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Screener {
    Algo,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Psi,
    Q,
    Rho,
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"), other
                    ))),
                }
            }
        }
    };
}

text_enum!(Problem { Best => "best", Good => "good" });
text_enum!(Screener { Algo => "algo", Human => "human" });
text_enum!(SweepParam { Psi => "psi", Q => "q", Rho => "rho" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// One experiment: an instance family, a compared screener/problem pair and
/// an optional one-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub q: f64,
    pub psi: f64,
    pub pr: f64,
    pub dist: ScoreDistribution,
    pub iso: OrderModel,
    pub fatigue: FatigueModel,
    pub problem: Problem,
    pub screener: Screener,
    pub runs: usize,
    pub master_seed: u64,
    pub sweep: Option<Sweep>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            id: "run".into(),
            n: 120,
            k: 6,
            q: 0.5,
            psi: 0.0,
            pr: 0.2,
            dist: ScoreDistribution::symmetric(),
            iso: OrderModel::Independent,
            fatigue: FatigueModel::none(),
            problem: Problem::Good,
            screener: Screener::Algo,
            runs: 10_000,
            master_seed: 1,
            sweep: None,
        }
    }
}

impl SweepConfig {
    pub fn params(&self) -> ProblemParams {
        ProblemParams { k: self.k, q: self.q, psi: self.psi }
    }

    /// The fatigue model the compared screener actually uses.
    pub fn compared_fatigue(&self) -> FatigueModel {
        match self.screener {
            Screener::Algo => FatigueModel::none(),
            Screener::Human => self.fatigue,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains([',', '"', '\n', '/']) {
            return Err(Error::Config(format!("config id `{}` must be non-empty without , \" / or newlines", self.id)));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.pr) {
            return Err(Error::Config(format!("pr = {} is outside [0, 1]", self.pr)));
        }
        self.params().validate_for(self.n).map_err(to_config)?;
        self.dist.validate().map_err(to_config)?;
        self.fatigue.validate().map_err(to_config)?;
        if let OrderModel::Correlated { rho } = self.iso {
            if !(-1.0..=1.0).contains(&rho) {
                return Err(Error::Config(format!("rho = {rho} is outside [-1, 1]")));
            }
            if self.n < 2 {
                return Err(Error::Config("a correlated order needs n >= 2".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep needs at least one value".into()));
            }
            let (lo, hi) = match sweep.param {
                SweepParam::Psi | SweepParam::Q => (0.0, 1.0),
                SweepParam::Rho => (-1.0, 1.0),
            };
            if let Some(v) = sweep.values.iter().find(|v| !(lo..=hi).contains(*v)) {
                return Err(Error::Config(format!("sweep value {v} for {} is outside [{lo}, {hi}]", sweep.param)));
            }
            if sweep.param == SweepParam::Rho && self.iso == OrderModel::Independent {
                return Err(Error::Config("a rho sweep needs a correlated order".into()));
            }
        }
        Ok(())
    }

    /// The config at one sweep point, with the sweep removed.
    pub fn at(&self, param: SweepParam, value: f64) -> SweepConfig {
        let mut cell = SweepConfig { sweep: None, ..self.clone() };
        match param {
            SweepParam::Psi => cell.psi = value,
            SweepParam::Q => cell.q = value,
            SweepParam::Rho => cell.iso = OrderModel::Correlated { rho: value },
        }
        cell
    }

    /// `(sweep value, cell config)` for every grid point; a single unswept
    /// cell when there is no sweep.
    pub fn cells(&self) -> Vec<(Option<f64>, SweepConfig)> {
        match &self.sweep {
            None => vec![(None, self.clone())],
            Some(s) => s.values.iter().map(|&v| (Some(v), self.at(s.param, v))).collect(),
        }
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    }
}

/// A generated candidate pool with its screening order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub pool: CandidatePool,
    pub order: ScreeningOrder,
}

/// Draws the instance of run `run_index`: scores, then protected flags, then
/// the order, all from stream `(master_seed, run_index)`.
pub fn generate_instance(config: &SweepConfig, run_index: u64) -> Result<Instance> {
    let mut rng = RngStream::new(config.master_seed, run_index);
    let scores = sample_truncated_normal(&config.dist, config.n, &mut rng)?;
    let protected = sample_protected(config.pr, config.n, &mut rng)?;
    let order = match config.iso {
        OrderModel::Independent => generate_iso_independent(config.n, &mut rng)?,
        OrderModel::Correlated { rho } => generate_iso_correlated(&scores, rho, &mut rng)?,
    };
    Ok(Instance { pool: CandidatePool::new(&scores, &protected)?, order })
}

/// The fatigue stream of run `run_index`.
pub fn fatigue_stream(config: &SweepConfig, run_index: u64) -> RngStream {
    RngStream::new(config.master_seed, run_index.wrapping_add(FATIGUE_STREAM_OFFSET))
}

/// Baseline and compared outcomes of one run on the same instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub instance: Instance,
    pub baseline: SearchOutcome,
    pub compared: SearchOutcome,
}

pub fn solve_run(config: &SweepConfig, run_index: u64) -> Result<RunOutcome> {
    if run_index >= FATIGUE_STREAM_OFFSET {
        return Err(Error::InvalidParameter(format!("run index {run_index} is too large")));
    }
    let instance = generate_instance(config, run_index)?;
    let params = config.params();
    // The algorithmic baseline never draws from its stream.
    let mut unused = RngStream::new(config.master_seed, run_index);
    let baseline = examination_search(&instance.pool, &instance.order, &params, &FatigueModel::none(), &mut unused)?;
    let fatigue = config.compared_fatigue();
    let mut rng = fatigue_stream(config, run_index);
    let compared = match (config.problem, fatigue.kind) {
        (Problem::Best, FatigueKind::None) => baseline.clone(),
        (Problem::Best, _) => examination_search(&instance.pool, &instance.order, &params, &fatigue, &mut rng)?,
        (Problem::Good, _) => cascade_search(&instance.pool, &instance.order, &params, &fatigue, &mut rng)?,
    };
    Ok(RunOutcome { instance, baseline, compared })
}

/// Metrics of run `run_index` of an unswept config; an infeasible marker when
/// either the baseline or the compared solve fails to fill k slots.
pub fn run_one(config: &SweepConfig, run_index: u64) -> Result<RunMetrics> {
    let RunOutcome { instance, baseline, compared } = solve_run(config, run_index)?;
    if !baseline.selection.feasible || !compared.selection.feasible {
        return Ok(RunMetrics::infeasible(compared.selection.evaluated_count));
    }
    RunMetrics::compare(&compared.selection, &baseline.selection, &instance.pool)
}

/// Metrics of runs `0..config.runs`, in run order, computed in parallel on the
/// current rayon pool.
pub fn collect_runs(config: &SweepConfig) -> Result<Vec<RunMetrics>> {
    (0..config.runs as u64).into_par_iter().map(|i| run_one(config, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: Option<f64>,
    /// Sample standard deviation; `None` below two observations.
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let (count, sum) = values.clone().fold((0usize, 0.0), |(c, s), v| (c + 1, s + v));
        if count == 0 {
            return Self::default();
        }
        let mean = sum / count as f64;
        let sd = (count > 1).then(|| {
            let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        });
        Self { mean: Some(mean), sd }
    }

    /// Standard error of the mean for `count` observations.
    pub fn standard_error(&self, count: usize) -> Option<f64> {
        self.sd.map(|sd| sd / (count as f64).sqrt())
    }
}

/// Aggregate over the runs of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub sweep_value: Option<f64>,
    pub config: SweepConfig,
    pub runs_total: usize,
    pub runs_feasible: usize,
    pub rtb: MeanSd,
    pub jds: MeanSd,
    pub mean_frac_protected: Option<f64>,
    pub mean_evaluated_count: Option<f64>,
}

impl CellResult {
    pub fn from_runs(sweep_value: Option<f64>, config: SweepConfig, runs: &[RunMetrics]) -> Self {
        let feasible = runs.iter().filter(|m| m.feasible);
        let runs_feasible = feasible.clone().count();
        Self {
            sweep_value,
            config,
            runs_total: runs.len(),
            runs_feasible,
            rtb: MeanSd::of(feasible.clone().map(|m| m.rtb)),
            jds: MeanSd::of(feasible.clone().map(|m| m.jds)),
            mean_frac_protected: MeanSd::of(feasible.clone().map(|m| m.frac_protected)).mean,
            mean_evaluated_count: MeanSd::of(feasible.map(|m| m.evaluated_count as f64)).mean,
        }
    }

    pub fn rtb_standard_error(&self) -> Option<f64> {
        self.rtb.standard_error(self.runs_feasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub config: SweepConfig,
    pub cells: Vec<CellResult>,
}

/// Runs every sweep point of `config` on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<AggregateResult> {
    config.validate()?;
    let cells = config
        .cells()
        .into_iter()
        .map(|(value, cell)| {
            let runs = collect_runs(&cell)?;
            Ok(CellResult::from_runs(value, cell, &runs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateResult { config: config.clone(), cells })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<AggregateResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(config))
}

/// A named figure: the series that are plotted together and written to one CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    pub name: String,
    pub series: Vec<SweepConfig>,
}

/// `0, step, 2·step, …` up to `last`, as exact decimal fractions.
pub fn grid(step_den: u32, last_num: u32) -> Vec<f64> {
    (0..=last_num).map(|i| i as f64 / step_den as f64).collect()
}

const DEFAULT_RUNS: usize = 10_000;
const DEFAULT_SEED: u64 = 1;

fn scenarios() -> [(&'static str, ScoreDistribution); 3] {
    [
        ("symmetric", ScoreDistribution::symmetric()),
        ("asymmetric", ScoreDistribution::asymmetric()),
        ("increasing", ScoreDistribution::increasing()),
    ]
}

fn psi_sweep() -> Option<Sweep> {
    // 0.00 .. 0.95
    Some(Sweep { param: SweepParam::Psi, values: grid(20, 19) })
}

fn q_sweep() -> Option<Sweep> {
    Some(Sweep { param: SweepParam::Q, values: grid(10, 5) })
}

fn rho_label(rho: f64) -> String {
    format!("rho{rho}")
}

/// The canonical experiment grids behind each figure panel, at the default
/// 10,000 runs and seed 1.
pub fn figure_suite() -> Vec<FigureConfig> {
    let base = SweepConfig { runs: DEFAULT_RUNS, master_seed: DEFAULT_SEED, ..SweepConfig::default() };
    let rhos = [-1.0, -0.75, -0.5, -0.25, 0.0];
    let rho_dists = [("symmetric", ScoreDistribution::symmetric()), ("increasing", ScoreDistribution::increasing())];

    let fig1_rtb_jds = scenarios()
        .into_iter()
        .map(|(label, dist)| SweepConfig {
            id: format!("fig1-rtb-jds-{label}"),
            dist,
            sweep: psi_sweep(),
            ..base.clone()
        })
        .collect();

    let fig1_nk = [(120, 6), (400, 20), (30, 6)]
        .into_iter()
        .map(|(n, k)| SweepConfig { id: format!("fig1-nk-n{n}-k{k}"), n, k, sweep: psi_sweep(), ..base.clone() })
        .collect();

    let fig1_rho = rho_dists
        .iter()
        .flat_map(|&(label, dist)| {
            let base = &base;
            rhos.iter().map(move |&rho| SweepConfig {
                id: format!("fig1-rho-{label}-{}", rho_label(rho)),
                dist,
                iso: OrderModel::Correlated { rho },
                sweep: psi_sweep(),
                ..base.clone()
            })
        })
        .collect();

    let fatigue_series = |name: &str, fatigue: FatigueModel| FigureConfig {
        name: name.to_string(),
        series: scenarios()
            .into_iter()
            .map(|(label, dist)| SweepConfig {
                id: format!("{name}-{label}"),
                dist,
                fatigue,
                screener: Screener::Human,
                sweep: psi_sweep(),
                ..base.clone()
            })
            .collect(),
    };

    let fig4_bestk_q = scenarios()
        .into_iter()
        .map(|(label, dist)| SweepConfig {
            id: format!("fig4-bestk-q-{label}"),
            dist,
            fatigue: FatigueModel::eps1(),
            problem: Problem::Best,
            screener: Screener::Human,
            sweep: q_sweep(),
            ..base.clone()
        })
        .collect();

    let fig4_rho = [
        ("eps1-symmetric", FatigueModel::eps1(), ScoreDistribution::symmetric()),
        ("eps2-symmetric", FatigueModel::eps2(), ScoreDistribution::symmetric()),
        ("eps1-increasing", FatigueModel::eps1(), ScoreDistribution::increasing()),
    ]
    .into_iter()
    .flat_map(|(label, fatigue, dist)| {
        let base = &base;
        rhos.iter().map(move |&rho| SweepConfig {
            id: format!("fig4-rho-{label}-{}", rho_label(rho)),
            dist,
            iso: OrderModel::Correlated { rho },
            fatigue,
            screener: Screener::Human,
            sweep: psi_sweep(),
            ..base.clone()
        })
    })
    .collect();

    let fig3_q = [("symmetric", ScoreDistribution::symmetric()), ("increasing", ScoreDistribution::increasing())]
        .into_iter()
        .map(|(label, dist)| SweepConfig {
            id: format!("fig3-q-{label}"),
            n: 400,
            k: 20,
            psi: 0.5,
            dist,
            sweep: q_sweep(),
            ..base.clone()
        })
        .collect();

    vec![
        FigureConfig { name: "fig1-rtb-jds".into(), series: fig1_rtb_jds },
        FigureConfig { name: "fig1-nk".into(), series: fig1_nk },
        FigureConfig { name: "fig1-rho".into(), series: fig1_rho },
        fatigue_series("fig4-eps1", FatigueModel::eps1()),
        fatigue_series("fig4-eps2", FatigueModel::eps2()),
        FigureConfig { name: "fig4-bestk-q".into(), series: fig4_bestk_q },
        FigureConfig { name: "fig4-rho".into(), series: fig4_rho },
        FigureConfig { name: "fig3-q".into(), series: fig3_q },
    ]
}
