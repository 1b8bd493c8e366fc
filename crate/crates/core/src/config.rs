//! Flat key-value experiment configuration.
//!
//! A config file is a JSON object whose keys mirror the CLI flags:
//!
//! ```json
//! { "id": "demo", "n": 120, "k": 6, "q": 0.5, "psi": 0.4,
//!   "dist": "0.5,0.02", "pr": 0.2, "iso": "correlated", "rho": -0.5,
//!   "fatigue": "eps1", "problem": "good", "screener": "human",
//!   "runs": 10000, "seed": 1, "sweep": "psi=0,0.1,0.2" }
//! ```
//!
//! Every key is optional. Values are resolved as defaults, then file, then
//! flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatigue::{FatigueKind, FatigueModel};
use crate::harness::{OrderModel, Problem, Screener, Sweep, SweepConfig, SweepParam};
use crate::sampling::ScoreDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum IsoKind {
    Independent,
    Correlated,
}

/// Partial settings, from a config file or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigLayer {
    /// Series label written to the config_id column.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Pool size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Selection size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Minimum protected fraction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Eligibility threshold of the good-k problem.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    /// Target order/score Spearman correlation (needs --iso correlated).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Screening order generator.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso: Option<IsoKind>,
    /// Truncated-normal score distribution as MU,SIGMA.
    #[arg(long, value_name = "MU,SIGMA")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    /// Probability that a candidate is protected.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pr: Option<f64>,
    /// Fatigue model of the human-like screener.
    #[arg(long, value_parser = ["none", "eps1", "eps2"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fatigue: Option<String>,
    /// Effort per evaluation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Error standard deviation per unit of fatigue.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sd_slope: Option<f64>,
    /// Error mean per unit of fatigue (eps2 only).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_slope: Option<f64>,
    /// Compared problem.
    #[arg(long, value_parser = ["best", "good"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    /// Compared screener.
    #[arg(long, value_parser = ["algo", "human"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screener: Option<String>,
    /// Monte Carlo runs per sweep point.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    /// Master seed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// One-parameter sweep as PARAM=V1,V2,... with PARAM in psi, q, rho.
    #[arg(long, value_name = "PARAM=V1,V2,...", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
}

macro_rules! overlay {
    ($self:ident, $other:ident; $($field:ident),+) => {
        $( if $other.$field.is_some() { $self.$field = $other.$field; } )+
    };
}

impl ConfigLayer {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layer serializes")
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: ConfigLayer) -> Self {
        overlay!(self, other; id, n, k, q, psi, rho, iso, dist, pr, fatigue, lambda,
                 sd_slope, mean_slope, problem, screener, runs, seed, sweep);
        self
    }

    /// The fully specified layer describing `config`.
    pub fn from_config(config: &SweepConfig) -> Self {
        let fatigue = config.fatigue;
        let active = fatigue.is_active();
        ConfigLayer {
            id: Some(config.id.clone()),
            n: Some(config.n),
            k: Some(config.k),
            q: Some(config.q),
            psi: Some(config.psi),
            rho: config.iso.rho(),
            iso: Some(match config.iso {
                OrderModel::Independent => IsoKind::Independent,
                OrderModel::Correlated { .. } => IsoKind::Correlated,
            }),
            dist: Some(format!("{},{}", config.dist.mu, config.dist.sigma)),
            pr: Some(config.pr),
            fatigue: Some(fatigue.kind.to_string()),
            lambda: active.then_some(fatigue.lambda),
            sd_slope: active.then_some(fatigue.sd_slope),
            mean_slope: (fatigue.kind == FatigueKind::Eps2).then_some(fatigue.mean_slope),
            problem: Some(config.problem.to_string()),
            screener: Some(config.screener.to_string()),
            runs: Some(config.runs),
            seed: Some(config.master_seed),
            sweep: config.sweep.as_ref().map(format_sweep),
        }
    }

    /// Applies this layer on top of `base`; returns the validated config and
    /// warnings about parameters that have no effect.
    pub fn resolve(&self, base: &SweepConfig) -> Result<(SweepConfig, Vec<String>)> {
        let mut cfg = base.clone();
        let mut warnings = Vec::new();
        if let Some(id) = &self.id {
            cfg.id = id.clone();
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.q {
            cfg.q = v;
        }
        if let Some(v) = self.psi {
            cfg.psi = v;
        }
        if let Some(v) = self.pr {
            cfg.pr = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(d) = &self.dist {
            cfg.dist = parse_dist(d)?;
        }
        if let Some(p) = &self.problem {
            cfg.problem = p.parse()?;
        }
        if let Some(s) = &self.screener {
            cfg.screener = s.parse()?;
        }
        if let Some(s) = &self.sweep {
            cfg.sweep = Some(parse_sweep(s)?);
        }

        if let Some(kind) = &self.fatigue {
            let kind: FatigueKind = kind.parse()?;
            if kind != cfg.fatigue.kind {
                cfg.fatigue = FatigueModel::from_kind(kind);
            }
        }
        let overrides = [self.lambda, self.sd_slope, self.mean_slope];
        if !cfg.fatigue.is_active() && overrides.iter().any(Option::is_some) {
            return Err(Error::Config("lambda, sd-slope and mean-slope need a fatigue model".into()));
        }
        if let Some(v) = self.lambda {
            cfg.fatigue.lambda = v;
        }
        if let Some(v) = self.sd_slope {
            cfg.fatigue.sd_slope = v;
        }
        if let Some(v) = self.mean_slope {
            if cfg.fatigue.kind != FatigueKind::Eps2 {
                return Err(Error::Config("mean-slope applies to eps2 only".into()));
            }
            cfg.fatigue.mean_slope = v;
        }

        let rho_swept = matches!(&cfg.sweep, Some(s) if s.param == SweepParam::Rho);
        let iso = self.iso.unwrap_or(match base.iso {
            OrderModel::Correlated { .. } => IsoKind::Correlated,
            OrderModel::Independent => IsoKind::Independent,
        });
        cfg.iso = match iso {
            IsoKind::Independent => {
                if self.rho.is_some() {
                    return Err(Error::Config("rho needs a correlated screening order (iso = correlated)".into()));
                }
                OrderModel::Independent
            }
            IsoKind::Correlated => {
                let rho = self
                    .rho
                    .or(base.iso.rho())
                    .or_else(|| rho_swept.then(|| cfg.sweep.as_ref().map(|s| s.values[0])).flatten());
                match rho {
                    Some(rho) => OrderModel::Correlated { rho },
                    None => return Err(Error::Config("a correlated screening order needs rho".into())),
                }
            }
        };

        cfg.validate()?;
        let psi_swept = matches!(&cfg.sweep, Some(s) if s.param == SweepParam::Psi);
        if cfg.problem == Problem::Best && (self.psi.is_some() || psi_swept) {
            warnings.push("psi has no effect on the best-k problem and is ignored".into());
        }
        if cfg.screener == Screener::Algo && cfg.fatigue.is_active() {
            warnings.push("fatigue has no effect on the algorithmic screener and is ignored".into());
        }
        Ok((cfg, warnings))
    }
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| Error::Config(format!("{what}: `{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("{what}: `{text}` is not finite")));
    }
    Ok(v)
}

/// Parses `MU,SIGMA`.
pub fn parse_dist(text: &str) -> Result<ScoreDistribution> {
    let parts: Vec<&str> = text.split(',').collect();
    let [mu, sigma] = parts.as_slice() else {
        return Err(Error::Config(format!("dist `{text}` must be MU,SIGMA")));
    };
    let dist = ScoreDistribution::unit(parse_f64(mu, "dist")?, parse_f64(sigma, "dist")?);
    dist.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(dist)
}

/// Parses `PARAM=V1,V2,...`.
pub fn parse_sweep(text: &str) -> Result<Sweep> {
    let (param, values) =
        text.split_once('=').ok_or_else(|| Error::Config(format!("sweep `{text}` must be PARAM=V1,V2,...")))?;
    let param: SweepParam = param.trim().parse()?;
    let values = values.split(',').map(|v| parse_f64(v, "sweep")).collect::<Result<Vec<_>>>()?;
    Ok(Sweep { param, values })
}

pub fn format_sweep(sweep: &Sweep) -> String {
    let values: Vec<String> = sweep.values.iter().map(f64::to_string).collect();
    format!("{}={}", sweep.param, values.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::figure_suite;

    fn resolve(json: &str) -> Result<SweepConfig> {
        ConfigLayer::from_json(json)?.resolve(&SweepConfig::default()).map(|(c, _)| c)
    }

    #[test]
    fn empty_layer_gives_defaults() {
        assert_eq!(resolve("{}").unwrap(), SweepConfig::default());
    }

    #[test]
    fn suite_round_trips() {
        for fig in figure_suite() {
            for cfg in fig.series {
                let json = ConfigLayer::from_config(&cfg).to_json();
                let back = resolve(&json).unwrap();
                assert_eq!(back, cfg, "{json}");
            }
        }
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigLayer::from_json(r#"{"n": 50, "k": 5, "runs": 10}"#).unwrap();
        let flags = ConfigLayer { k: Some(7), ..Default::default() };
        let (cfg, _) = file.overlay(flags).resolve(&SweepConfig::default()).unwrap();
        assert_eq!((cfg.n, cfg.k, cfg.runs), (50, 7, 10));
    }

    #[test]
    fn parses_all_keys() {
        let cfg = resolve(
            r#"{"id": "x", "n": 30, "k": 6, "q": 0.3, "psi": 0.4, "dist": "0.8,0.05", "pr": 0.3,
                "iso": "correlated", "rho": -0.5, "fatigue": "eps2", "lambda": 0.5, "sd-slope": 0.002,
                "mean-slope": -0.01, "problem": "best", "screener": "human", "runs": 9, "seed": 4,
                "sweep": "q=0,0.5"}"#,
        )
        .unwrap();
        assert_eq!(cfg.dist, ScoreDistribution::asymmetric());
        assert_eq!(cfg.iso, OrderModel::Correlated { rho: -0.5 });
        assert_eq!(
            cfg.fatigue,
            FatigueModel { kind: FatigueKind::Eps2, lambda: 0.5, sd_slope: 0.002, mean_slope: -0.01 }
        );
        assert_eq!(cfg.sweep, Some(Sweep { param: SweepParam::Q, values: vec![0.0, 0.5] }));
        assert_eq!((cfg.problem, cfg.screener, cfg.master_seed), (Problem::Best, Screener::Human, 4));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            r#"{"rho": -0.5}"#,
            r#"{"iso": "correlated"}"#,
            r#"{"unknown": 1}"#,
            r#"{"dist": "0.5"}"#,
            r#"{"dist": "0.5,-1"}"#,
            r#"{"sweep": "z=1,2"}"#,
            r#"{"sweep": "psi=a"}"#,
            r#"{"k": 500}"#,
            r#"{"lambda": 2}"#,
            r#"{"fatigue": "eps1", "mean-slope": -0.1}"#,
            r#"{"problem": "worst"}"#,
            "not json",
        ] {
            assert!(matches!(resolve(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn rho_sweep_needs_no_base_rho() {
        let cfg = resolve(r#"{"iso": "correlated", "sweep": "rho=-1,-0.5"}"#).unwrap();
        assert_eq!(cfg.iso, OrderModel::Correlated { rho: -1.0 });
    }

    #[test]
    fn warnings_for_inert_parameters() {
        let layer = ConfigLayer::from_json(r#"{"problem": "best", "psi": 0.4, "fatigue": "eps1"}"#).unwrap();
        let (_, warnings) = layer.resolve(&SweepConfig::default()).unwrap();
        assert_eq!(warnings.len(), 2);
    }
}
