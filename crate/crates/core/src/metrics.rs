//! How close a compared solution comes to the best-k baseline.

use serde::{Deserialize, Serialize};

use crate::domain::{CandidatePool, Selection};
use crate::error::{Error, Result};
use crate::search::{fairness_fraction, utility_add};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Ratio to baseline of truthful additive utility.
    pub rtb: f64,
    /// Jaccard similarity with the baseline set.
    pub jds: f64,
    /// Protected fraction of the compared set.
    pub frac_protected: f64,
    /// Candidates the compared screener scored.
    pub evaluated_count: usize,
    pub feasible: bool,
}

impl RunMetrics {
    /// Marker for a discarded run.
    pub fn infeasible(evaluated_count: usize) -> Self {
        Self { rtb: f64::NAN, jds: f64::NAN, frac_protected: f64::NAN, evaluated_count, feasible: false }
    }

    pub fn compare(compared: &Selection, baseline: &Selection, pool: &CandidatePool) -> Result<Self> {
        Ok(Self {
            rtb: ratio_to_baseline(compared, baseline, pool)?,
            jds: jaccard_similarity(compared, baseline)?,
            frac_protected: fairness_fraction(compared, pool)?,
            evaluated_count: compared.evaluated_count,
            feasible: true,
        })
    }
}

/// Truthful utility of `compared` divided by that of `baseline`. May exceed 1.
pub fn ratio_to_baseline(compared: &Selection, baseline: &Selection, pool: &CandidatePool) -> Result<f64> {
    if compared.len() != baseline.len() {
        return Err(Error::InvalidParameter(format!(
            "compared set has {} members, baseline {}",
            compared.len(),
            baseline.len()
        )));
    }
    let denom = utility_add(baseline, pool)?;
    let num = utility_add(compared, pool)?;
    if denom <= 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(num / denom)
}

/// `|A ∩ B| / |A ∪ B|` over selected ids.
pub fn jaccard_similarity(compared: &Selection, baseline: &Selection) -> Result<f64> {
    if !compared.feasible || !baseline.feasible {
        return Err(Error::InfeasibleSelection);
    }
    let a = compared.ids();
    let b = baseline.ids();
    let inter = a.intersection(&b).count();
    let union = a.union(&b).count();
    if union == 0 {
        return Err(Error::InfeasibleSelection);
    }
    Ok(inter as f64 / union as f64)
}
