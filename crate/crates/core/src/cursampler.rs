//! Randomized column selection driven by statistical leverage scores.
//!
//! The pipeline is: top-`k` right singular vectors `V_k` -> normalized
//! leverage scores `pi_i = ||V_k(i)||^2 / k` -> `c` importance-sampled columns
//! -> `X^I` and its projection error.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::matcore::{column_projection_error, truncated_svd, ColumnIndexSet, DenseMatrix};

/// Orthonormality tolerance on the `V_k` passed to [`leverage_scores`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Seeded generator used for every random draw in the crate. ChaCha8 has a
/// fixed, platform-independent output stream for a given seed.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeverageScores {
    scores: Vec<f64>,
    rank: usize,
}

impl LeverageScores {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Arbitrary probability vector, e.g. a uniform baseline. Must be
    /// nonnegative and sum to one within `1e-12`.
    pub fn from_probabilities(scores: Vec<f64>, rank: usize) -> Result<Self> {
        if scores.is_empty() {
            return Err(param("score vector is empty"));
        }
        if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(param("scores must be finite and nonnegative"));
        }
        let total: f64 = scores.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(format!("scores sum to {total}, expected 1")));
        }
        Ok(Self { scores, rank })
    }

    fn nonzero_count(&self) -> usize {
        self.scores.iter().filter(|s| **s > 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// `c` i.i.d. draws, duplicates collapsed, so `|I| <= c`.
    #[default]
    WithReplacement,
    /// Draw until `c` distinct columns are selected.
    Distinct,
}

/// `pi_i = ||row i of V_k||^2 / k`.
pub fn leverage_scores(v_k: &DenseMatrix) -> Result<LeverageScores> {
    let k = v_k.ncols();
    if k == 0 || v_k.nrows() < k {
        return Err(param(format!("V_k must be p x k with 1 <= k <= p, got {}x{}", v_k.nrows(), k)));
    }
    let dev = (v_k.transpose() * v_k - DenseMatrix::identity(k, k)).amax();
    if !(dev <= ORTHONORMAL_TOL) {
        return Err(param(format!(
            "V_k columns are not orthonormal: max |V^T V - I| = {dev:.3e} exceeds {ORTHONORMAL_TOL:e}"
        )));
    }
    let scores = v_k.row_iter().map(|row| row.norm_squared() / k as f64).collect();
    Ok(LeverageScores { scores, rank: k })
}

/// Columns drawn from `scores`, plus the number of raw draws performed.
pub fn sample_columns_counted(
    scores: &LeverageScores,
    c: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<(ColumnIndexSet, usize)> {
    let p = scores.len();
    if c == 0 || c > p {
        return Err(param(format!("column count c = {c} must lie in [1, {p}]")));
    }
    let mut rng = seeded_rng(seed);
    let mut dist = WeightedIndex::new(&scores.scores).map_err(|e| param(format!("bad score vector: {e}")))?;
    match mode {
        SamplingMode::WithReplacement => {
            let picks = (0..c).map(|_| dist.sample(&mut rng)).collect();
            Ok((ColumnIndexSet::new(picks, p)?, c))
        }
        SamplingMode::Distinct => {
            let available = scores.nonzero_count();
            if c > available {
                return Err(Error::Infeasible(format!(
                    "{c} distinct columns requested but only {available} have nonzero score"
                )));
            }
            // Removing a drawn column and renormalizing is the same law as
            // redrawing until an unseen column comes up.
            let mut picks = Vec::with_capacity(c);
            while picks.len() < c {
                let j = dist.sample(&mut rng);
                picks.push(j);
                if picks.len() == c {
                    break;
                }
                dist.update_weights(&[(j, &0.0)])
                    .map_err(|e| param(format!("bad score vector: {e}")))?;
            }
            Ok((ColumnIndexSet::new(picks, p)?, c))
        }
    }
}

/// Importance-sample `c` columns. Deterministic in `(scores, c, mode, seed)`.
pub fn sample_columns(scores: &LeverageScores, c: usize, mode: SamplingMode, seed: u64) -> Result<ColumnIndexSet> {
    sample_columns_counted(scores, c, mode, seed).map(|(set, _)| set)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurResult {
    pub selected: ColumnIndexSet,
    /// `||X - X^I X^{I+} X||_F`
    pub error: f64,
    pub scores: LeverageScores,
    pub seed: u64,
    pub draws: usize,
}

pub fn cur_decompose(x: &DenseMatrix, k: usize, c: usize, mode: SamplingMode, seed: u64) -> Result<CurResult> {
    let p = x.ncols();
    if c == 0 || c > p {
        return Err(param(format!("column count c = {c} must lie in [1, {p}]")));
    }
    let factors = truncated_svd(x, k)?;
    let scores = leverage_scores(&factors.v)?;
    let (selected, draws) = sample_columns_counted(&scores, c, mode, seed)?;
    let error = column_projection_error(x, &selected)?;
    Ok(CurResult { selected, error, scores, seed, draws })
}
