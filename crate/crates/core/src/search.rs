//! The two screening procedures and the utilities they maximize.
//!
//! [`examination_search`] scores every candidate in screening order, then
//! fills the quota from the top of the descending score list; it solves the
//! best-k problem. [`cascade_search`] walks the screening order and admits the
//! first candidates reaching the minimum score `psi`; it solves the good-k
//! problem and may stop long before the end of the pool. Both take a
//! [`FatigueModel`]: with [`FatigueModel::none`] they are the algorithmic
//! screener, otherwise the human-like one whose scores drift with fatigue.

use std::collections::BTreeSet;

use crate::domain::{quota_targets, CandidateId, CandidatePool, ProblemParams, ScreeningOrder, Selection};
use crate::error::{Error, Result};
use crate::fatigue::FatigueModel;
use crate::rng::RngStream;

/// One evaluation made by the screener.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEntry {
    pub candidate: CandidateId,
    /// Truthful score plus the fatigue error drawn at `time`.
    pub assigned_score: f64,
    /// 1-based count of evaluations so far.
    pub time: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub selection: Selection,
    /// Evaluations in the order they were made.
    pub scored_sequence: Vec<ScoredEntry>,
}

// Quota bookkeeping shared by both procedures.
struct QuotaFill {
    k: usize,
    q_star: usize,
    r_star: usize,
    quota: BTreeSet<CandidateId>,
    other: BTreeSet<CandidateId>,
}

impl QuotaFill {
    fn new(params: &ProblemParams) -> Self {
        let (q_star, r_star) = quota_targets(params.k, params.q);
        Self { k: params.k, q_star, r_star, quota: BTreeSet::new(), other: BTreeSet::new() }
    }

    fn is_full(&self) -> bool {
        self.quota.len() + self.other.len() >= self.k
    }

    // Non-protected candidates only ever go to R.
    fn skips(&self, protected: bool) -> bool {
        !protected && self.other.len() == self.r_star
    }

    fn admit(&mut self, id: CandidateId, protected: bool) {
        if protected && self.quota.len() < self.q_star {
            self.quota.insert(id);
        } else {
            self.other.insert(id);
        }
    }

    fn finish(self, evaluated_count: usize) -> Selection {
        let feasible = self.is_full();
        Selection { quota_set: self.quota, other_set: self.other, evaluated_count, feasible }
    }
}

fn check_inputs(
    pool: &CandidatePool,
    order: &ScreeningOrder,
    params: &ProblemParams,
    fatigue: &FatigueModel,
) -> Result<()> {
    if order.len() != pool.len() {
        return Err(Error::InvalidParameter(format!(
            "order covers {} candidates but the pool has {}",
            order.len(),
            pool.len()
        )));
    }
    params.validate_for(pool.len())?;
    fatigue.validate()
}

/// Best-k screening: score all `n` candidates along `order` (times `1..=n`),
/// sort by descending assigned score with earlier positions winning ties, and
/// fill the quota from the top.
pub fn examination_search(
    pool: &CandidatePool,
    order: &ScreeningOrder,
    params: &ProblemParams,
    fatigue: &FatigueModel,
    rng: &mut RngStream,
) -> Result<SearchOutcome> {
    check_inputs(pool, order, params, fatigue)?;

    let scored_sequence: Vec<ScoredEntry> = order
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let time = i + 1;
            let assigned_score = pool.candidate(id).score + fatigue.draw_epsilon(time, rng);
            ScoredEntry { candidate: id, assigned_score, time }
        })
        .collect();

    let mut ranked: Vec<&ScoredEntry> = scored_sequence.iter().collect();
    // stable: equal scores keep screening order
    ranked.sort_by(|a, b| b.assigned_score.total_cmp(&a.assigned_score));

    let mut fill = QuotaFill::new(params);
    for entry in ranked {
        if fill.is_full() {
            break;
        }
        let protected = pool.candidate(entry.candidate).protected;
        if fill.skips(protected) {
            continue;
        }
        fill.admit(entry.candidate, protected);
    }
    let selection = fill.finish(scored_sequence.len());
    Ok(SearchOutcome { selection, scored_sequence })
}

/// Good-k screening: walk `order`, skip non-protected candidates unscored once
/// `R` is full, score everyone else (the fatigue clock ticks only here) and
/// admit those whose assigned score reaches `psi`. Stops at `k` admissions.
pub fn cascade_search(
    pool: &CandidatePool,
    order: &ScreeningOrder,
    params: &ProblemParams,
    fatigue: &FatigueModel,
    rng: &mut RngStream,
) -> Result<SearchOutcome> {
    check_inputs(pool, order, params, fatigue)?;

    let mut fill = QuotaFill::new(params);
    let mut scored_sequence = Vec::new();
    for id in order.iter() {
        if fill.is_full() {
            break;
        }
        let candidate = pool.candidate(id);
        if fill.skips(candidate.protected) {
            continue;
        }
        let time = scored_sequence.len() + 1;
        let assigned_score = candidate.score + fatigue.draw_epsilon(time, rng);
        scored_sequence.push(ScoredEntry { candidate: id, assigned_score, time });
        if assigned_score >= params.psi {
            fill.admit(id, candidate.protected);
        }
    }
    let selection = fill.finish(scored_sequence.len());
    Ok(SearchOutcome { selection, scored_sequence })
}

fn require_feasible(selection: &Selection) -> Result<()> {
    if selection.feasible && !selection.is_empty() {
        Ok(())
    } else {
        Err(Error::InfeasibleSelection)
    }
}

fn lookup(pool: &CandidatePool, id: CandidateId) -> Result<&crate::domain::Candidate> {
    pool.get(id).ok_or(Error::UnknownCandidate(id.0))
}

/// Fraction of protected candidates in the selected set.
pub fn fairness_fraction(selection: &Selection, pool: &CandidatePool) -> Result<f64> {
    require_feasible(selection)?;
    let mut protected = 0usize;
    for id in selection.ids() {
        if lookup(pool, id)?.protected {
            protected += 1;
        }
    }
    Ok(protected as f64 / selection.len() as f64)
}

/// Sum of truthful scores, accumulated in ascending id order.
pub fn utility_add(selection: &Selection, pool: &CandidatePool) -> Result<f64> {
    require_feasible(selection)?;
    selection.ids().into_iter().try_fold(0.0, |acc, id| Ok(acc + lookup(pool, id)?.score))
}

/// 1 when some unselected candidate of the same group, eligible under `psi`,
/// precedes `candidate` in `order`; the "wasted effort" of passing over them.
pub fn penalty(
    candidate: CandidateId,
    selection: &Selection,
    order: &ScreeningOrder,
    pool: &CandidatePool,
    psi: f64,
) -> Result<u8> {
    if !selection.contains(candidate) {
        return Err(Error::InvalidParameter(format!("{candidate} is not in the selection")));
    }
    let group = lookup(pool, candidate)?.protected;
    let position = order.position_of(candidate)?;
    let wasted = order.as_slice()[..position - 1].iter().any(|&earlier| {
        let c = pool.candidate(earlier);
        !selection.contains(earlier) && c.score >= psi && c.protected == group
    });
    Ok(wasted as u8)
}

/// `k − Σ penalties` when every selected candidate reaches `psi`, else 0.
pub fn utility_psi(selection: &Selection, order: &ScreeningOrder, pool: &CandidatePool, psi: f64) -> Result<f64> {
    require_feasible(selection)?;
    let ids = selection.ids();
    for &id in &ids {
        if lookup(pool, id)?.score < psi {
            return Ok(0.0);
        }
    }
    let mut total = 0usize;
    for &id in &ids {
        total += penalty(id, selection, order, pool, psi)? as usize;
    }
    Ok((ids.len() - total) as f64)
}

/// Candidates left unscreened after the last selected one, or 0 when some
/// selected candidate misses `psi`. Diagnostic only: it cannot tell apart
/// sets that differ before the last selected position.
pub fn utility_saved_effort(
    selection: &Selection,
    order: &ScreeningOrder,
    pool: &CandidatePool,
    psi: f64,
) -> Result<f64> {
    require_feasible(selection)?;
    let mut last = 0;
    for id in selection.ids() {
        if lookup(pool, id)?.score < psi {
            return Ok(0.0);
        }
        last = last.max(order.position_of(id)?);
    }
    Ok((pool.len() - last) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatigue::FatigueModel;

    fn ids(v: &[u32]) -> Vec<CandidateId> {
        v.iter().copied().map(CandidateId).collect()
    }

    fn set(v: &[u32]) -> BTreeSet<CandidateId> {
        ids(v).into_iter().collect()
    }

    fn rng() -> RngStream {
        RngStream::new(0, 0)
    }

    // n = 3, k = 2, q = 0.5, all eligible, W = (0, 1, 1), identity order.
    fn three_candidates() -> (CandidatePool, ScreeningOrder, ProblemParams) {
        let pool = CandidatePool::new(&[0.7, 0.6, 0.8], &[false, true, true]).unwrap();
        (pool, ScreeningOrder::identity(3).unwrap(), ProblemParams::new(2, 0.5, 0.5).unwrap())
    }

    #[test]
    fn fairness_fraction_examples() {
        let pool =
            CandidatePool::new(&[0.5, 0.5, 0.1, 0.2, 0.3, 0.4, 0.6], &[true, false, false, false, false, false, false])
                .unwrap();
        assert_eq!(fairness_fraction(&Selection::from_ids(ids(&[0, 1])), &pool).unwrap(), 0.5);
        assert_eq!(fairness_fraction(&Selection::from_ids(ids(&[1, 2, 3, 4, 5, 6])), &pool).unwrap(), 0.0);
        let (pool, _, _) = three_candidates();
        assert_eq!(fairness_fraction(&Selection::from_ids(ids(&[1, 2])), &pool).unwrap(), 1.0);
        let infeasible = Selection { feasible: false, ..Selection::from_ids(ids(&[1])) };
        assert_eq!(fairness_fraction(&infeasible, &pool), Err(Error::InfeasibleSelection));
    }

    #[test]
    fn utility_add_examples() {
        let pool = CandidatePool::new(&[0.3, 0.7, 0.42], &[false, false, true]).unwrap();
        assert_eq!(utility_add(&Selection::from_ids(ids(&[0, 1])), &pool).unwrap(), 1.0);
        assert_eq!(utility_add(&Selection::from_ids(ids(&[2])), &pool).unwrap(), 0.42);
        let a = Selection::from_ids(ids(&[2, 0, 1]));
        let b = Selection::from_ids(ids(&[1, 2, 0]));
        assert_eq!(utility_add(&a, &pool).unwrap(), utility_add(&b, &pool).unwrap());
    }

    #[test]
    fn penalty_examples() {
        // order (c0, c1, c2); c0 and c2 non-protected and eligible, c1 protected.
        let pool = CandidatePool::new(&[0.6, 0.9, 0.7], &[false, true, false]).unwrap();
        let order = ScreeningOrder::identity(3).unwrap();
        let s = Selection::from_ids(ids(&[1, 2]));
        // c1 is first of its group: no earlier protected candidate.
        assert_eq!(penalty(CandidateId(1), &s, &order, &pool, 0.5).unwrap(), 0);
        // c2 comes after unselected, eligible, same-group c0.
        assert_eq!(penalty(CandidateId(2), &s, &order, &pool, 0.5).unwrap(), 1);
        // c0 ineligible at psi = 0.65 lifts the penalty
        assert_eq!(penalty(CandidateId(2), &s, &order, &pool, 0.65).unwrap(), 0);
        let first = Selection::from_ids(ids(&[0]));
        assert_eq!(penalty(CandidateId(0), &first, &order, &pool, 0.0).unwrap(), 0);
        assert!(penalty(CandidateId(0), &s, &order, &pool, 0.5).is_err());
    }

    #[test]
    fn utility_psi_examples() {
        let (pool, order, params) = three_candidates();
        let s1 = Selection::from_ids(ids(&[0, 1]));
        let s2 = Selection::from_ids(ids(&[1, 2]));
        assert_eq!(utility_psi(&s1, &order, &pool, params.psi).unwrap(), 2.0);
        assert_eq!(utility_psi(&s2, &order, &pool, params.psi).unwrap(), 2.0);
        assert_eq!(utility_psi(&s1, &order, &pool, 0.65).unwrap(), 0.0);

        // k = 3, members c1, c2, c3; c3 passes over unselected non-protected c0.
        let pool = CandidatePool::new(&[0.6, 0.6, 0.6, 0.6], &[false, true, true, false]).unwrap();
        let order = ScreeningOrder::identity(4).unwrap();
        let s = Selection::from_ids(ids(&[1, 2, 3]));
        let penalties: Vec<u8> =
            [1, 2, 3].iter().map(|&c| penalty(CandidateId(c), &s, &order, &pool, 0.5).unwrap()).collect();
        assert_eq!(penalties, vec![0, 0, 1]);
        assert_eq!(utility_psi(&s, &order, &pool, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn saved_effort_examples() {
        // W = (0, 0, 1), all eligible; both {c0, c2} and {c1, c2} end at position 3.
        let pool = CandidatePool::new(&[0.6, 0.7, 0.8], &[false, false, true]).unwrap();
        let order = ScreeningOrder::identity(3).unwrap();
        let a = Selection::from_ids(ids(&[0, 2]));
        let b = Selection::from_ids(ids(&[1, 2]));
        assert_eq!(utility_saved_effort(&a, &order, &pool, 0.5).unwrap(), 0.0);
        assert_eq!(utility_saved_effort(&b, &order, &pool, 0.5).unwrap(), 0.0);
        let all_pairs_fair = [[0, 1], [0, 2], [1, 2]]
            .iter()
            .filter(|p| fairness_fraction(&Selection::from_ids(ids(&p[..])), &pool).unwrap() >= 0.5)
            .map(|p| utility_saved_effort(&Selection::from_ids(ids(&p[..])), &order, &pool, 0.5).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(all_pairs_fair, 0.0);
        let whole = Selection::from_ids(ids(&[0, 1, 2]));
        assert_eq!(utility_saved_effort(&whole, &order, &pool, 0.0).unwrap(), 0.0);
        assert_eq!(utility_saved_effort(&a, &order, &pool, 0.65).unwrap(), 0.0);
        let early = Selection::from_ids(ids(&[0]));
        assert_eq!(utility_saved_effort(&early, &order, &pool, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn examination_selects_whole_pool_when_k_is_n() {
        let pool = CandidatePool::new(&[0.2, 0.9, 0.4], &[false, true, false]).unwrap();
        let order = ScreeningOrder::new(ids(&[2, 0, 1])).unwrap();
        let params = ProblemParams::new(3, 0.0, 0.0).unwrap();
        let out = examination_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert!(out.selection.feasible);
        assert_eq!(out.selection.ids(), set(&[0, 1, 2]));
        assert_eq!(out.selection.evaluated_count, 3);
        let times: Vec<usize> = out.scored_sequence.iter().map(|e| e.time).collect();
        assert_eq!(times, vec![1, 2, 3]);
        let scored: Vec<CandidateId> = out.scored_sequence.iter().map(|e| e.candidate).collect();
        assert_eq!(scored, order.as_slice());
    }

    #[test]
    fn examination_quota_trace() {
        // sorted: 0.9 (np) -> R, 0.8 (np) -> skipped (R full), 0.1 (p) -> Q
        let pool = CandidatePool::new(&[0.9, 0.8, 0.1], &[false, false, true]).unwrap();
        let order = ScreeningOrder::identity(3).unwrap();
        let params = ProblemParams::new(2, 0.5, 0.0).unwrap();
        let out = examination_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(out.selection.quota_set, set(&[2]));
        assert_eq!(out.selection.other_set, set(&[0]));
        assert!(out.selection.feasible);
    }

    #[test]
    fn examination_ties_prefer_earlier_position() {
        let pool = CandidatePool::new(&[0.5, 0.5, 0.5], &[false, false, false]).unwrap();
        let order = ScreeningOrder::new(ids(&[2, 1, 0])).unwrap();
        let params = ProblemParams::new(1, 0.0, 0.0).unwrap();
        let out = examination_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(out.selection.ids(), set(&[2]));
    }

    #[test]
    fn examination_infeasible_without_enough_protected() {
        let pool = CandidatePool::new(&[0.9, 0.8, 0.7, 0.6], &[false, false, false, true]).unwrap();
        let order = ScreeningOrder::identity(4).unwrap();
        let params = ProblemParams::new(4, 0.5, 0.0).unwrap();
        let out = examination_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert!(!out.selection.feasible);
        assert_eq!(out.selection.len(), 3);
    }

    #[test]
    fn k_above_n_is_rejected() {
        let pool = CandidatePool::new(&[0.9, 0.8], &[false, true]).unwrap();
        let order = ScreeningOrder::identity(2).unwrap();
        let params = ProblemParams { k: 3, q: 0.0, psi: 0.0 };
        assert!(examination_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).is_err());
        assert!(cascade_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).is_err());
        let short = ScreeningOrder::identity(1).unwrap();
        let params = ProblemParams { k: 1, q: 0.0, psi: 0.0 };
        assert!(cascade_search(&pool, &short, &params, &FatigueModel::none(), &mut rng()).is_err());
    }

    #[test]
    fn cascade_three_candidates() {
        let (pool, order, params) = three_candidates();
        let out = cascade_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(out.selection.ids(), set(&[0, 1]));
        assert_eq!(out.selection.quota_set, set(&[1]));
        assert_eq!(out.selection.evaluated_count, 2);
        assert_eq!(utility_psi(&out.selection, &order, &pool, params.psi).unwrap(), 2.0);
    }

    #[test]
    fn cascade_follows_order_for_single_slot() {
        let pool = CandidatePool::new(&[0.6, 0.7], &[false, false]).unwrap();
        let params = ProblemParams::new(1, 0.0, 0.5).unwrap();
        let forward = ScreeningOrder::new(ids(&[0, 1])).unwrap();
        let reverse = ScreeningOrder::new(ids(&[1, 0])).unwrap();
        let f = cascade_search(&pool, &forward, &params, &FatigueModel::none(), &mut rng()).unwrap();
        let r = cascade_search(&pool, &reverse, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(f.selection.ids(), set(&[0]));
        assert_eq!(r.selection.ids(), set(&[1]));
    }

    #[test]
    fn cascade_skips_without_scoring_and_routes_extra_protected_to_r() {
        // q* = 1, r* = 1; order: np(0.9), np(0.9) skipped, p(0.9) -> Q
        let pool = CandidatePool::new(&[0.9, 0.9, 0.9, 0.9], &[false, false, true, true]).unwrap();
        let order = ScreeningOrder::identity(4).unwrap();
        let params = ProblemParams::new(2, 0.5, 0.5).unwrap();
        let out = cascade_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(out.selection.ids(), set(&[0, 2]));
        assert_eq!(out.selection.evaluated_count, 2);
        let scored: Vec<u32> = out.scored_sequence.iter().map(|e| e.candidate.0).collect();
        assert_eq!(scored, vec![0, 2]);

        // q* = 1, r* = 1; order: p, p, np -> Q gets first, R gets second protected
        let order = ScreeningOrder::new(ids(&[2, 3, 0, 1])).unwrap();
        let out = cascade_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert_eq!(out.selection.quota_set, set(&[2]));
        assert_eq!(out.selection.other_set, set(&[3]));
    }

    #[test]
    fn cascade_infeasible_when_order_exhausted() {
        let pool = CandidatePool::new(&[0.9, 0.1, 0.2], &[false, true, false]).unwrap();
        let order = ScreeningOrder::identity(3).unwrap();
        let params = ProblemParams::new(2, 0.0, 0.5).unwrap();
        let out = cascade_search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
        assert!(!out.selection.feasible);
        assert_eq!(out.selection.evaluated_count, 3);
        assert!(utility_add(&out.selection, &pool).is_err());
    }

    #[test]
    fn fatigue_clock_counts_scored_candidates_only() {
        // R fills at position 1; positions 2..4 non-protected get skipped.
        let pool = CandidatePool::new(&[0.9, 0.9, 0.9, 0.9, 0.9], &[false, false, false, false, true]).unwrap();
        let order = ScreeningOrder::identity(5).unwrap();
        let params = ProblemParams::new(2, 0.5, 0.0).unwrap();
        let out = cascade_search(&pool, &order, &params, &FatigueModel::eps1(), &mut rng()).unwrap();
        let trace: Vec<(u32, usize)> = out.scored_sequence.iter().map(|e| (e.candidate.0, e.time)).collect();
        assert_eq!(trace, vec![(0, 1), (4, 2)]);
        // first scored candidate: zero error
        assert_eq!(out.scored_sequence[0].assigned_score, 0.9);
    }

    #[test]
    fn inactive_fatigue_matches_algorithmic_scores() {
        let pool = CandidatePool::new(&[0.3, 0.8, 0.55, 0.61], &[true, false, true, false]).unwrap();
        let order = ScreeningOrder::new(ids(&[3, 1, 0, 2])).unwrap();
        let params = ProblemParams::new(2, 0.5, 0.5).unwrap();
        for search in [examination_search, cascade_search] {
            let out = search(&pool, &order, &params, &FatigueModel::none(), &mut rng()).unwrap();
            for e in &out.scored_sequence {
                assert_eq!(e.assigned_score, pool.candidate(e.candidate).score);
            }
        }
    }

    #[test]
    fn fatigued_scores_are_not_clipped() {
        let pool = CandidatePool::new(&vec![0.99; 200], &[false; 200]).unwrap();
        let order = ScreeningOrder::identity(200).unwrap();
        let params = ProblemParams::new(1, 0.0, 0.0).unwrap();
        let out = examination_search(&pool, &order, &params, &FatigueModel::eps1(), &mut rng()).unwrap();
        assert!(out.scored_sequence.iter().any(|e| e.assigned_score > 1.0));
        assert!(out.scored_sequence.iter().any(|e| e.assigned_score < 0.0));
    }
}
