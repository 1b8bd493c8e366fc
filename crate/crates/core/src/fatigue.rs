//! Accumulated screener fatigue and the score errors it induces.
//!
//! Fatigue grows linearly, `Φ(t) = λ·t`. The error added to the candidate
//! scored at time `t` is drawn from a normal whose mean and standard deviation
//! are linear in `Φ(t − 1)`, the fatigue accumulated before that evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FatigueKind {
    None,
    /// Centered error whose spread grows with fatigue.
    Eps1,
    /// Negatively biased error with a smaller spread.
    Eps2,
}

impl fmt::Display for FatigueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FatigueKind::None => "none",
            FatigueKind::Eps1 => "eps1",
            FatigueKind::Eps2 => "eps2",
        })
    }
}

impl FromStr for FatigueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FatigueKind::None),
            "eps1" => Ok(FatigueKind::Eps1),
            "eps2" => Ok(FatigueKind::Eps2),
            other => Err(Error::Config(format!("unknown fatigue kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatigueModel {
    pub kind: FatigueKind,
    /// Effort per evaluated candidate.
    pub lambda: f64,
    /// Standard deviation per unit of accumulated fatigue.
    pub sd_slope: f64,
    /// Mean per unit of accumulated fatigue; only `Eps2` uses it.
    pub mean_slope: f64,
}

impl Default for FatigueModel {
    fn default() -> Self {
        Self::none()
    }
}

impl FatigueModel {
    pub const fn none() -> Self {
        Self { kind: FatigueKind::None, lambda: 1.0, sd_slope: 0.0, mean_slope: 0.0 }
    }

    /// `N(0, (0.005·(t−1))²)` at `λ = 1`.
    pub const fn eps1() -> Self {
        Self { kind: FatigueKind::Eps1, lambda: 1.0, sd_slope: 0.005, mean_slope: 0.0 }
    }

    /// `N(−0.005·(t−1), (0.001·(t−1))²)` at `λ = 1`.
    pub const fn eps2() -> Self {
        Self { kind: FatigueKind::Eps2, lambda: 1.0, sd_slope: 0.001, mean_slope: -0.005 }
    }

    /// The default parameterization of `kind`.
    pub fn from_kind(kind: FatigueKind) -> Self {
        match kind {
            FatigueKind::None => Self::none(),
            FatigueKind::Eps1 => Self::eps1(),
            FatigueKind::Eps2 => Self::eps2(),
        }
    }

    pub fn is_active(&self) -> bool {
        self.kind != FatigueKind::None
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {} must be >= 0", self.lambda)));
        }
        if !(self.sd_slope >= 0.0 && self.sd_slope.is_finite()) {
            return Err(Error::InvalidParameter(format!("sd_slope = {} must be >= 0", self.sd_slope)));
        }
        if !(self.mean_slope <= 0.0 && self.mean_slope.is_finite()) {
            return Err(Error::InvalidParameter(format!("mean_slope = {} must be <= 0", self.mean_slope)));
        }
        Ok(())
    }

    /// `Φ(t) = λ·t`.
    pub fn accumulated_fatigue(&self, t: i64) -> Result<f64> {
        if t < 0 {
            return Err(Error::InvalidParameter(format!("time t = {t} must be >= 0")));
        }
        Ok(self.lambda * t as f64)
    }

    fn phi(&self, t: usize) -> f64 {
        self.lambda * t as f64
    }

    /// Mean of the error for the candidate scored at time `t >= 1`.
    pub fn error_mean(&self, t: usize) -> f64 {
        match self.kind {
            FatigueKind::Eps2 => self.mean_slope * self.phi(t.saturating_sub(1)),
            _ => 0.0,
        }
    }

    /// Standard deviation of the error for the candidate scored at time `t >= 1`.
    pub fn error_sd(&self, t: usize) -> f64 {
        match self.kind {
            FatigueKind::None => 0.0,
            _ => self.sd_slope * self.phi(t.saturating_sub(1)),
        }
    }

    /// Draws the error for the candidate scored at time `t >= 1`. Inactive
    /// models return 0 without touching `rng`.
    pub fn draw_epsilon(&self, t: usize, rng: &mut RngStream) -> f64 {
        if !self.is_active() {
            return 0.0;
        }
        let z = rng.standard_normal();
        let eps = self.error_mean(t) + self.error_sd(t) * z;
        // 0·z may be −0.0
        if eps == 0.0 {
            0.0
        } else {
            eps
        }
    }
}
