//! Exhaustive reference solvers for tiny instances.
//!
//! Every k-subset of the pool is visited; those meeting the quota are scored
//! and all maximizers kept. These exist to check the screening procedures in
//! tests, so clarity wins over speed and pools are capped at [`MAX_ORACLE_N`].

use crate::domain::{quota_targets, CandidateId, CandidatePool, ProblemParams, ScreeningOrder, Selection};
use crate::error::{Error, Result};
use crate::search::{fairness_fraction, utility_add, utility_psi};

pub const MAX_ORACLE_N: usize = 20;

/// Utilities this close are the same maximum; sums of equal scores in a
/// different order may differ in the last bit.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Maximum utility over quota-feasible subsets; `NaN` when there is none.
    pub max_utility: f64,
    pub argmax_sets: Vec<Selection>,
    /// False when no k-subset satisfies the quota.
    pub feasible: bool,
    /// Number of k-subsets enumerated, always `C(n, k)`.
    pub visited: u64,
}

/// Lexicographic k-combinations of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, indices: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.indices.clone();
        let k = self.indices.len();
        // rightmost index that can still move
        match (0..k).rev().find(|&i| self.indices[i] < self.n - k + i) {
            Some(i) => {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

fn enumerate(
    pool: &CandidatePool,
    params: &ProblemParams,
    mut utility: impl FnMut(&Selection) -> Result<f64>,
) -> Result<OracleResult> {
    let n = pool.len();
    if n > MAX_ORACLE_N {
        return Err(Error::OracleTooLarge { n, max: MAX_ORACLE_N });
    }
    params.validate_for(n)?;
    let (q_star, _) = quota_targets(params.k, params.q);
    let min_fraction = q_star as f64 / params.k as f64;

    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    let mut visited = 0u64;
    for combo in Combinations::new(n, params.k) {
        visited += 1;
        let selection = Selection::from_ids(combo.into_iter().map(|i| CandidateId(i as u32)));
        if fairness_fraction(&selection, pool)? < min_fraction {
            continue;
        }
        let u = utility(&selection)?;
        if u > best + TIE_TOLERANCE {
            best = u;
            argmax.clear();
            argmax.push(selection);
        } else if u >= best - TIE_TOLERANCE {
            best = best.max(u);
            argmax.push(selection);
        }
    }
    let feasible = !argmax.is_empty();
    Ok(OracleResult { max_utility: if feasible { best } else { f64::NAN }, argmax_sets: argmax, feasible, visited })
}

/// Maximum of the additive utility subject to the quota.
pub fn brute_force_best_k(pool: &CandidatePool, params: &ProblemParams) -> Result<OracleResult> {
    enumerate(pool, params, |s| utility_add(s, pool))
}

/// Maximum of the penalized good-k utility under `order`, subject to the quota.
pub fn brute_force_good_k(
    pool: &CandidatePool,
    order: &ScreeningOrder,
    params: &ProblemParams,
) -> Result<OracleResult> {
    if order.len() != pool.len() {
        return Err(Error::InvalidParameter("order and pool sizes differ".into()));
    }
    enumerate(pool, params, |s| utility_psi(s, order, pool, params.psi))
}
