//! Instance generation: truncated-normal scores, Bernoulli protected flags and
//! screening orders that are either uniform or rank-correlated with scores.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::domain::{CandidateId, ScreeningOrder};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A normal distribution with location `mu` and standard deviation `sigma`,
/// conditioned on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDistribution {
    pub mu: f64,
    pub sigma: f64,
    #[serde(default)]
    pub lower: f64,
    #[serde(default = "one")]
    pub upper: f64,
}

fn one() -> f64 {
    1.0
}

impl ScoreDistribution {
    /// `tN(mu, sigma)` on `[0, 1]`.
    pub fn unit(mu: f64, sigma: f64) -> Self {
        Self { mu, sigma, lower: 0.0, upper: 1.0 }
    }

    /// Few top candidates.
    pub fn symmetric() -> Self {
        Self::unit(0.5, 0.02)
    }

    pub fn asymmetric() -> Self {
        Self::unit(0.8, 0.05)
    }

    /// Top candidates abundant.
    pub fn increasing() -> Self {
        Self::unit(1.0, 0.05)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma = {} must be > 0", self.sigma)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        if self.lower >= self.upper
            || self.lower.is_nan()
            || self.upper.is_nan()
            || self.lower < 0.0
            || self.upper > 1.0
        {
            return Err(Error::InvalidParameter(format!(
                "truncation bounds [{}, {}] must satisfy 0 <= lower < upper <= 1",
                self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// Truncated quantile function.
    pub fn quantile(&self, u: f64) -> f64 {
        let alpha = (self.lower - self.mu) / self.sigma;
        let beta = (self.upper - self.mu) / self.sigma;
        // Work in whichever tail keeps the CDF values away from 1.
        let z = if alpha > 0.0 {
            let (lo, hi) = (normal_cdf(-beta), normal_cdf(-alpha));
            -normal_quantile(hi - u * (hi - lo))
        } else {
            let (lo, hi) = (normal_cdf(alpha), normal_cdf(beta));
            normal_quantile(lo + u * (hi - lo))
        };
        (self.mu + self.sigma * z).clamp(self.lower, self.upper)
    }
}

/// `n` inverse-CDF draws from `dist`; one uniform per value.
pub fn sample_truncated_normal(dist: &ScoreDistribution, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    dist.validate()?;
    Ok((0..n).map(|_| dist.quantile(rng.open01())).collect())
}

pub fn sample_protected(pr: f64, n: usize, rng: &mut RngStream) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&pr) {
        return Err(Error::InvalidParameter(format!("pr = {pr} is outside [0, 1]")));
    }
    Ok((0..n).map(|_| rng.bernoulli(pr)).collect())
}

/// Uniform random permutation of `0..n` (Fisher–Yates).
pub fn generate_iso_independent(n: usize, rng: &mut RngStream) -> Result<ScreeningOrder> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut ids: Vec<CandidateId> = (0..n as u32).map(CandidateId).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        ids.swap(i, j);
    }
    ScreeningOrder::new(ids)
}

/// A screening order whose Spearman correlation between position and score
/// targets `rho`, built through a Gaussian copula.
///
/// Scores are mapped to normal scores `z = Φ⁻¹((rank − 0.5)/n)`, mixed with
/// independent noise at Pearson correlation `r = 2·sin(π·rho/6)`, and
/// candidates are presented in ascending order of the mixture. `rho = −1`
/// and `rho = +1` skip the noise and sort by descending and ascending score.
/// Ties always fall back to candidate id.
pub fn generate_iso_correlated(scores: &[f64], rho: f64, rng: &mut RngStream) -> Result<ScreeningOrder> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho = {rho} is outside [-1, 1]")));
    }
    let n = scores.len();
    if n < 2 {
        return Err(Error::InvalidParameter("correlated order needs at least 2 scores".into()));
    }
    let mut ids: Vec<CandidateId> = (0..n as u32).map(CandidateId).collect();
    if rho == -1.0 {
        ids.sort_by(|a, b| by_value_then_id(scores[b.index()], scores[a.index()], a, b));
        return ScreeningOrder::new(ids);
    }
    if rho == 1.0 {
        ids.sort_by(|a, b| by_value_then_id(scores[a.index()], scores[b.index()], a, b));
        return ScreeningOrder::new(ids);
    }

    let ranks = distinct_ranks(scores);
    let r = 2.0 * (PI * rho / 6.0).sin();
    let noise_weight = (1.0 - r * r).max(0.0).sqrt();
    let latent: Vec<f64> = ranks
        .iter()
        .map(|&rank| {
            let z = normal_quantile((rank as f64 - 0.5) / n as f64);
            r * z + noise_weight * rng.standard_normal()
        })
        .collect();
    ids.sort_by(|a, b| by_value_then_id(latent[a.index()], latent[b.index()], a, b));
    ScreeningOrder::new(ids)
}

fn by_value_then_id(x: f64, y: f64, a: &CandidateId, b: &CandidateId) -> Ordering {
    x.total_cmp(&y).then(a.cmp(b))
}

// Ascending 1-based ranks with ties broken by index.
fn distinct_ranks(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (r, i) in idx.into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Ranks with ties replaced by their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation between screening positions and scores.
pub fn spearman_rho(positions: &[usize], scores: &[f64]) -> Result<f64> {
    let positions: Vec<f64> = positions.iter().map(|&p| p as f64).collect();
    spearman(&positions, scores)
}

/// Spearman rank correlation of two real samples, average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter("spearman needs at least 2 pairs".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::UndefinedCorrelation("first sample has constant ranks"));
    }
    if syy == 0.0 {
        return Err(Error::UndefinedCorrelation("second sample has constant ranks"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation between each candidate's position in `order` and its
/// score, with `scores` indexed by candidate id.
pub fn order_score_spearman(order: &ScreeningOrder, scores: &[f64]) -> Result<f64> {
    spearman_rho(&order.positions_by_candidate(), scores)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal quantile, Wichura's AS241 (PPND16); relative accuracy
/// about 1e-16 over `(0, 1)`. Returns ±∞ at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&AS241_A, r) / poly(&AS241_B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        poly(&AS241_C, r) / poly(&AS241_D, r)
    } else {
        r -= 5.0;
        poly(&AS241_E, r) / poly(&AS241_F, r)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

// Horner evaluation, coefficients in ascending degree.
fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[allow(clippy::excessive_precision)]
const AS241_A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
#[allow(clippy::excessive_precision)]
const AS241_B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
#[allow(clippy::excessive_precision)]
const AS241_C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
#[allow(clippy::excessive_precision)]
const AS241_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const AS241_E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const AS241_F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];
