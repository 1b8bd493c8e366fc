//! Candidate pools, screening orders and selected sets.
//!
//! Positions are 1-based in every public signature. Candidate ids are dense
//! integers `0..n` assigned at pool creation, and the pool stores candidates in
//! id order; a [`ScreeningOrder`] permutes those ids.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a candidate within its pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidateId(pub u32);

impl CandidateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: CandidateId,
    /// Truthful score in `[0, 1]`.
    pub score: f64,
    /// Membership in the protected group.
    pub protected: bool,
}

/// A non-empty pool of candidates stored in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    candidates: Vec<Candidate>,
}

impl CandidatePool {
    /// Builds a pool from parallel score and protected-flag slices. Ids are
    /// assigned `0..n` in slice order.
    pub fn new(scores: &[f64], protected: &[bool]) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidParameter("candidate pool must not be empty".into()));
        }
        if scores.len() != protected.len() {
            return Err(Error::InvalidParameter(format!(
                "{} scores but {} protected flags",
                scores.len(),
                protected.len()
            )));
        }
        if scores.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("pool too large".into()));
        }
        let candidates = scores
            .iter()
            .zip(protected)
            .enumerate()
            .map(|(i, (&score, &protected))| {
                if !(0.0..=1.0).contains(&score) {
                    return Err(Error::InvalidParameter(format!("score {score} of candidate {i} is outside [0, 1]")));
                }
                Ok(Candidate { id: CandidateId(i as u32), score, protected })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { candidates })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// Always false; pools hold at least one candidate.
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn get(&self, id: CandidateId) -> Option<&Candidate> {
        self.candidates.get(id.index())
    }

    /// Panics if `id` is not in the pool.
    pub fn candidate(&self, id: CandidateId) -> &Candidate {
        &self.candidates[id.index()]
    }

    pub fn scores(&self) -> Vec<f64> {
        self.candidates.iter().map(|c| c.score).collect()
    }

    pub fn protected_count(&self) -> usize {
        self.candidates.iter().filter(|c| c.protected).count()
    }
}

/// The initial screening order: a bijection between positions `1..=n` and
/// candidate ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreeningOrder {
    position_to_candidate: Vec<CandidateId>,
    // 0-based position for each candidate id.
    candidate_to_position: Vec<usize>,
}

impl ScreeningOrder {
    /// Builds an order from the candidate presented at each position, first
    /// to last.
    pub fn new(position_to_candidate: Vec<CandidateId>) -> Result<Self> {
        let n = position_to_candidate.len();
        if n == 0 {
            return Err(Error::InvalidParameter("screening order must not be empty".into()));
        }
        let mut candidate_to_position = vec![usize::MAX; n];
        for (pos, id) in position_to_candidate.iter().enumerate() {
            let slot = candidate_to_position
                .get_mut(id.index())
                .ok_or_else(|| Error::InvalidParameter(format!("{id} is not an id of a pool of size {n}")))?;
            if *slot != usize::MAX {
                return Err(Error::InvalidParameter(format!("{id} appears twice in the order")));
            }
            *slot = pos;
        }
        Ok(Self { position_to_candidate, candidate_to_position })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n as u32).map(CandidateId).collect())
    }

    pub fn len(&self) -> usize {
        self.position_to_candidate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_to_candidate.is_empty()
    }

    /// The candidate at 1-based `position`, or `None` when out of range.
    pub fn candidate_at(&self, position: usize) -> Option<CandidateId> {
        position.checked_sub(1).and_then(|i| self.position_to_candidate.get(i).copied())
    }

    /// 1-based position of `id`.
    pub fn position_of(&self, id: CandidateId) -> Result<usize> {
        self.candidate_to_position.get(id.index()).map(|&p| p + 1).ok_or(Error::UnknownCandidate(id.0))
    }

    /// Candidates in screening order.
    pub fn as_slice(&self) -> &[CandidateId] {
        &self.position_to_candidate
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.position_to_candidate.iter().copied()
    }

    /// 1-based positions indexed by candidate id.
    pub fn positions_by_candidate(&self) -> Vec<usize> {
        self.candidate_to_position.iter().map(|&p| p + 1).collect()
    }
}

/// The returned k-set split into the protected quota `Q` and the rest `R`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    pub quota_set: BTreeSet<CandidateId>,
    pub other_set: BTreeSet<CandidateId>,
    /// Candidates actually scored before the procedure stopped.
    pub evaluated_count: usize,
    /// False when the procedure ran out of candidates before filling k slots;
    /// the sets then hold whatever was admitted so far.
    pub feasible: bool,
}

impl Selection {
    /// A feasible selection with no quota bookkeeping, as used by the oracles
    /// and by callers that hold a plain set of ids.
    pub fn from_ids(ids: impl IntoIterator<Item = CandidateId>) -> Self {
        let other_set: BTreeSet<_> = ids.into_iter().collect();
        Self { quota_set: BTreeSet::new(), other_set, evaluated_count: 0, feasible: true }
    }

    pub fn len(&self) -> usize {
        self.quota_set.len() + self.other_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, id: CandidateId) -> bool {
        self.quota_set.contains(&id) || self.other_set.contains(&id)
    }

    /// All selected ids in ascending order.
    pub fn ids(&self) -> BTreeSet<CandidateId> {
        self.quota_set.union(&self.other_set).copied().collect()
    }
}

/// Problem size and constraint parameters shared by both problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub k: usize,
    /// Required minimum fraction of protected candidates.
    pub q: f64,
    /// Minimum eligible score; only the good-k problem uses it.
    pub psi: f64,
}

impl ProblemParams {
    pub fn new(k: usize, q: f64, psi: f64) -> Result<Self> {
        let params = Self { k, q, psi };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidParameter(format!("q = {} is outside [0, 1]", self.q)));
        }
        if !(0.0..=1.0).contains(&self.psi) {
            return Err(Error::InvalidParameter(format!("psi = {} is outside [0, 1]", self.psi)));
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.k > n {
            return Err(Error::InvalidParameter(format!("k = {} exceeds pool size {n}", self.k)));
        }
        Ok(())
    }

    pub fn quota_targets(&self) -> (usize, usize) {
        quota_targets(self.k, self.q)
    }
}

/// Splits `k` into the protected quota `q* = round(q·k)` and the remainder
/// `r* = k − q*`, rounding halves to even.
pub fn quota_targets(k: usize, q: f64) -> (usize, usize) {
    let q_star = (q * k as f64).round_ties_even().clamp(0.0, k as f64) as usize;
    (q_star, k - q_star)
}
