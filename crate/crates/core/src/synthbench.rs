//! Synthetic signal-plus-noise benchmarks and their evaluation metrics.
//!
//! `X = Xhat + E` with `E` i.i.d. standard normal and `Xhat` one of
//!
//! * Case I: `c` nonzero Gaussian columns (the last `c`), no low-rank structure;
//! * Case II: `Xhat = theta U V^T`, `V` row-sparse with `c` common nonzero rows;
//! * Case III: `Xhat = theta U V^T`, `V` scattered-sparse: the `k` columns have
//!   disjoint supports of `c` rows each, so they stay exactly orthogonal.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cursampler::{cur_decompose, seeded_rng, SamplingMode, SeededRng};
use crate::error::{param, Error, Result};
use crate::glsolver::{glspca_solve, kkt_scale, tune_lambda1_with, GlConfig, TuneMode, DEFAULT_MAX_PROBES};
use crate::matcore::{column_projection_error, factor_projection, project_onto_columns, thin_svd, truncated_svd, ColumnIndexSet, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            other => Err(param(format!("unknown case {other:?}, expected I, II or III"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub case: Case,
    pub n: usize,
    pub p: usize,
    /// Signal rank (Cases II and III).
    pub k: usize,
    /// Nonzero columns (Case I), nonzero rows of `V` (Case II) or support size
    /// of each column of `V` (Case III).
    pub c: usize,
    /// Signal scale `theta`; `None` picks [`default_amplitude`].
    pub amplitude: Option<f64>,
    pub seed: u64,
}

impl SignalSpec {
    /// `sparsity` is the fraction of zeros in the sparsity target, so
    /// `c = round((1 - sparsity) p)`.
    pub fn from_sparsity(case: Case, n: usize, p: usize, k: usize, sparsity: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sparsity) {
            return Err(param(format!("sparsity {sparsity} must lie in [0, 1]")));
        }
        let c = ((1.0 - sparsity) * p as f64).round() as usize;
        let spec = Self { case, n, p, k, c, amplitude: None, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_amplitude(mut self, theta: f64) -> Self {
        self.amplitude = Some(theta);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let Self { n, p, k, c, .. } = *self;
        if n == 0 || p == 0 {
            return Err(param("n and p must be positive"));
        }
        if let Some(theta) = self.amplitude {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(param(format!("amplitude {theta} must be positive")));
            }
        }
        if c > p {
            return Err(param(format!("c = {c} exceeds p = {p}")));
        }
        match self.case {
            Case::I => Ok(()),
            Case::II | Case::III => {
                if k == 0 || k >= p || k > n {
                    return Err(param(format!("rank k = {k} must satisfy 1 <= k < p and k <= n")));
                }
                if self.case == Case::II && c < k {
                    return Err(param(format!("Case II needs at least k = {k} nonzero rows, got c = {c}")));
                }
                if self.case == Case::III && (c == 0 || c * k > p) {
                    return Err(param(format!(
                        "Case III needs k disjoint supports of size c: c * k = {} must lie in [1, p = {p}]",
                        c * k
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Three times the expected spectral norm of an `n x p` standard-normal noise
/// matrix, `3 (sqrt(n) + sqrt(p))`. The default signal is scaled so that its
/// smallest nonzero singular value equals this.
pub fn default_amplitude(n: usize, p: usize) -> f64 {
    3.0 * ((n as f64).sqrt() + (p as f64).sqrt())
}

/// Elementwise zero pattern (`true` = zero), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroMask {
    rows: usize,
    cols: usize,
    zero: Vec<bool>,
}

impl ZeroMask {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut zero = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                zero.push(f(r, c));
            }
        }
        Self { rows, cols, zero }
    }

    /// Exact zeros of `m`.
    pub fn of_matrix(m: &DenseMatrix) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] == 0.0)
    }

    /// `rows x p` mask whose columns outside `kept` are zero.
    pub fn excluded_columns(rows: usize, kept: &ColumnIndexSet) -> Self {
        Self::from_fn(rows, kept.universe(), |_, c| !kept.contains(c))
    }

    /// `p x cols` mask whose rows outside `kept` are zero.
    pub fn excluded_rows(kept: &ColumnIndexSet, cols: usize) -> Self {
        Self::from_fn(kept.universe(), cols, |r, _| !kept.contains(r))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.zero[r * self.cols + c]
    }

    pub fn zero_count(&self) -> usize {
        self.zero.iter().filter(|z| **z).count()
    }

    /// Columns that are zero in every row.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&c| (0..self.rows).all(|r| self.get(r, c))).collect()
    }

    /// Rows that are zero in every column.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&r| (0..self.cols).all(|c| self.get(r, c))).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub xhat: DenseMatrix,
    /// Over the columns of `Xhat` (Case I, `n x p`) or the entries of `V` (Cases II-III, `p x k`).
    pub true_zero_mask: ZeroMask,
    pub u: Option<DenseMatrix>,
    pub v: Option<DenseMatrix>,
    /// Scale actually applied to the signal.
    pub amplitude: f64,
    pub spec: SignalSpec,
}

fn gaussian(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn orthonormal_columns(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    gaussian(rng, rows, cols).qr().q()
}

pub fn generate(spec: &SignalSpec) -> Result<Dataset> {
    spec.validate()?;
    let SignalSpec { n, p, k, c, .. } = *spec;
    let mut rng = seeded_rng(spec.seed);
    let (xhat, mask, u, v, amplitude) = match spec.case {
        Case::I => {
            let mut block = gaussian(&mut rng, n, c);
            let theta = match spec.amplitude {
                Some(t) => t,
                None if c == 0 => 1.0,
                None => {
                    let sv = thin_svd(&block)?.singular_values;
                    let smallest = sv[n.min(c) - 1];
                    if smallest > 0.0 { default_amplitude(n, p) / smallest } else { 1.0 }
                }
            };
            block *= theta;
            let mut xhat = DenseMatrix::zeros(n, p);
            xhat.columns_mut(p - c, c).copy_from(&block);
            let mask = ZeroMask::of_matrix(&xhat);
            (xhat, mask, None, None, theta)
        }
        Case::II | Case::III => {
            let theta = spec.amplitude.unwrap_or_else(|| default_amplitude(n, p));
            let u = orthonormal_columns(&mut rng, n, k);
            let mut v = DenseMatrix::zeros(p, k);
            if spec.case == Case::II {
                v.rows_mut(p - c, c).copy_from(&orthonormal_columns(&mut rng, c, k));
            } else {
                let mut rows: Vec<usize> = (0..p).collect();
                rows.shuffle(&mut rng);
                for j in 0..k {
                    let support = &rows[j * c..(j + 1) * c];
                    let values = gaussian(&mut rng, c, 1);
                    let norm = values.norm();
                    for (t, &r) in support.iter().enumerate() {
                        v[(r, j)] = values[(t, 0)] / norm;
                    }
                }
            }
            let xhat = (&u * v.transpose()) * theta;
            let mask = ZeroMask::of_matrix(&v);
            (xhat, mask, Some(u), Some(v), theta)
        }
    };
    let noise = gaussian(&mut rng, n, p);
    let x = &xhat + noise;
    Ok(Dataset { x, xhat, true_zero_mask: mask, u, v, amplitude, spec: *spec })
}

/// `||Xhat - X^I X^{I+} X||_F`.
pub fn err_reg(xhat: &DenseMatrix, x: &DenseMatrix, set: &ColumnIndexSet) -> Result<f64> {
    check_same_shape(xhat, x)?;
    Ok((xhat - project_onto_columns(x, set, x)?).norm())
}

/// `||Xhat - X V V^+||_F`.
pub fn err_pca(xhat: &DenseMatrix, x: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    check_same_shape(xhat, x)?;
    Ok((xhat - factor_projection(x, v)?).norm())
}

fn check_same_shape(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(param(format!("signal is {:?} but data is {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

fn check_masks(estimated: &ZeroMask, truth: &ZeroMask) -> Result<()> {
    if estimated.shape() != truth.shape() {
        return Err(param(format!("mask shapes differ: {:?} vs {:?}", estimated.shape(), truth.shape())));
    }
    Ok(())
}

fn hits(estimated: &ZeroMask, truth: &ZeroMask) -> usize {
    estimated.zero.iter().zip(&truth.zero).filter(|(e, t)| **e && **t).count()
}

/// Fraction of estimated zeros that are true zeros; `None` if nothing is estimated zero.
pub fn precision_zeros(estimated: &ZeroMask, truth: &ZeroMask) -> Result<Option<f64>> {
    check_masks(estimated, truth)?;
    let est = estimated.zero_count();
    Ok((est > 0).then(|| hits(estimated, truth) as f64 / est as f64))
}

/// Fraction of true zeros that are estimated zero; `None` if there are no true zeros.
pub fn recall_zeros(estimated: &ZeroMask, truth: &ZeroMask) -> Result<Option<f64>> {
    check_masks(estimated, truth)?;
    let t = truth.zero_count();
    Ok((t > 0).then(|| hits(estimated, truth) as f64 / t as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Leverage-score column sampling.
    Cur,
    /// Group-lasso self-regression, tuned to the true number of nonzero columns.
    Glreg,
    /// GL-SPCA with `lambda1 = 0`: the ridge-shrunk top-`k` singular vectors.
    SpcaOracle,
    /// Group-lasso sparse PCA, tuned to the true zero count.
    Glpca,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cur" => Ok(Method::Cur),
            "glreg" => Ok(Method::Glreg),
            "spca_oracle" | "spca-oracle" => Ok(Method::SpcaOracle),
            "glpca" => Ok(Method::Glpca),
            other => Err(param(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    /// `k` for every method except GL-REG.
    pub rank: usize,
    pub cur_mode: SamplingMode,
    /// Ridge weight for the PCA-type methods, as a multiple of `sigma_1(X)^2`.
    /// Large values keep the ridge regression well posed when `p > n`.
    pub pca_lambda: f64,
    /// Ridge weight for GL-REG.
    pub reg_lambda: f64,
    pub tol: f64,
    /// Stationarity bound relative to `max_i ||X^(i)||^2`.
    pub rel_kkt_tol: f64,
    pub max_iter: usize,
    pub max_probes: usize,
    /// Overrides the column/row count derived from the true zero pattern.
    pub target: Option<usize>,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            rank: 10,
            cur_mode: SamplingMode::Distinct,
            pca_lambda: 1.0,
            reg_lambda: 0.0,
            tol: 1e-7,
            rel_kkt_tol: 1e-6,
            max_iter: 500,
            max_probes: DEFAULT_MAX_PROBES,
            target: None,
        }
    }
}

/// Column (CUR, GL-REG) or row (GL-PCA) count that reproduces the true number of zeros.
pub fn matched_target(data: &Dataset, method: Method, rank: usize) -> usize {
    let p = data.spec.p;
    match (data.spec.case, method) {
        (Case::I, _) => p - data.true_zero_mask.zero_columns().len(),
        (_, Method::Cur | Method::Glreg) => p - data.true_zero_mask.zero_rows().len(),
        (_, _) => {
            let (rows, cols) = data.true_zero_mask.shape();
            let nonzero = rows * cols - data.true_zero_mask.zero_count();
            ((nonzero as f64) / rank.max(1) as f64).round() as usize
        }
    }
}

/// Truth over `p x k` for the PCA-type estimates. A truth laid out like the
/// signal (`n x p`) marks row `r` of `V` zero iff column `r` of `Xhat` is.
fn loading_truth(truth: &ZeroMask, p: usize, k: usize) -> Result<ZeroMask> {
    match truth.shape() {
        (rows, cols) if rows == p && cols == k => Ok(truth.clone()),
        (_, cols) if cols == p => {
            let zero_cols = truth.zero_columns();
            Ok(ZeroMask::from_fn(p, k, |r, _| zero_cols.binary_search(&r).is_ok()))
        }
        shape => Err(param(format!("truth mask {shape:?} fits neither {p}x{k} loadings nor a signal with {p} columns"))),
    }
}

/// Estimated zeros of a column selection, laid out like `truth`: whole columns
/// of the signal, or whole rows of the loadings.
fn selection_mask(truth: &ZeroMask, kept: &ColumnIndexSet) -> Result<ZeroMask> {
    let (rows, cols) = truth.shape();
    if cols == kept.universe() {
        Ok(ZeroMask::excluded_columns(rows, kept))
    } else if rows == kept.universe() {
        Ok(ZeroMask::excluded_rows(kept, cols))
    } else {
        Err(param(format!("truth mask {:?} does not match a selection over {} columns", truth.shape(), kept.universe())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub err_reg: Option<f64>,
    pub err_pca: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Selected columns (CUR, GL-REG) or nonzero rows of `W` (PCA-type).
    pub active_count: usize,
    pub target: usize,
    pub lambda1: Option<f64>,
    pub converged: Option<bool>,
    pub kkt_residual: Option<f64>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator), zero for a single value.
    pub std: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, count })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: Method,
    pub spec: SignalSpec,
    pub tuning: Tuning,
    pub err_reg: Option<Stat>,
    pub err_pca: Option<Stat>,
    pub precision: Option<Stat>,
    pub recall: Option<Stat>,
    pub trials: Vec<TrialOutcome>,
    pub failures: Vec<TrialFailure>,
}

/// Seed of trial `t` for base seed `base`.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

/// The fitted output of one method on one dataset.
#[derive(Debug, Clone)]
pub enum Fit {
    Columns { selected: ColumnIndexSet, lambda1: Option<f64>, converged: Option<bool>, kkt: Option<f64>, iterations: Option<usize> },
    Factors { w: DenseMatrix, lambda1: f64, converged: bool, kkt: f64, iterations: usize },
}

pub fn fit_method(data: &Dataset, method: Method, tuning: &Tuning, seed: u64) -> Result<(Fit, usize)> {
    let x = &data.x;
    let target = tuning.target.unwrap_or_else(|| matched_target(data, method, tuning.rank));
    let scale = kkt_scale(x);
    let config = GlConfig::new(tuning.rank)
        .with_tol(tuning.tol)
        .with_kkt_tol(tuning.rel_kkt_tol * scale)
        .with_max_iter(tuning.max_iter);
    let pca_lambda = || -> Result<f64> {
        let top = truncated_svd(x, 1)?.sigma[0];
        Ok(tuning.pca_lambda * top * top)
    };
    let fit = match method {
        Method::Cur => {
            let r = cur_decompose(x, tuning.rank, target.max(1), tuning.cur_mode, seed)?;
            Fit::Columns { selected: r.selected, lambda1: None, converged: None, kkt: None, iterations: None }
        }
        Method::Glreg => {
            let out = tune_lambda1_with(x, &config.with_lambda(tuning.reg_lambda), target, TuneMode::Reg, tuning.max_probes)?;
            Fit::Columns {
                selected: out.solution.active_rows.clone(),
                lambda1: Some(out.lambda1),
                converged: Some(out.solution.converged),
                kkt: Some(out.solution.kkt_residual),
                iterations: Some(out.solution.iterations),
            }
        }
        Method::SpcaOracle => {
            let sol = glspca_solve(x, &config.with_lambda(pca_lambda()?), None)?;
            Fit::Factors { w: sol.factors.w, lambda1: 0.0, converged: sol.converged, kkt: sol.kkt_residual, iterations: sol.iterations }
        }
        Method::Glpca => {
            let out = tune_lambda1_with(x, &config.with_lambda(pca_lambda()?), target, TuneMode::Spca, tuning.max_probes)?;
            Fit::Factors {
                w: out.solution.factors.w,
                lambda1: out.lambda1,
                converged: out.solution.converged,
                kkt: out.solution.kkt_residual,
                iterations: out.solution.iterations,
            }
        }
    };
    Ok((fit, target))
}

/// What a method estimates: a column subset or a `p x k` loading matrix.
#[derive(Debug, Clone, Copy)]
pub enum Estimate<'a> {
    Columns(&'a ColumnIndexSet),
    Loadings(&'a DenseMatrix),
}

impl Fit {
    pub fn estimate(&self) -> Estimate<'_> {
        match self {
            Fit::Columns { selected, .. } => Estimate::Columns(selected),
            Fit::Factors { w, .. } => Estimate::Loadings(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitScores {
    pub err_reg: Option<f64>,
    pub err_pca: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Selected columns, or nonzero rows of `W`.
    pub active_count: usize,
}

/// Metrics of a column selection or a loading matrix against a signal and its
/// true zero pattern. `truth` is laid out either like the signal (`n x p`)
/// or like the loadings (`p x k`).
pub fn score_fit(xhat: &DenseMatrix, x: &DenseMatrix, truth: &ZeroMask, estimate: Estimate<'_>) -> Result<FitScores> {
    match estimate {
        Estimate::Columns(selected) => {
            let est = selection_mask(truth, selected)?;
            Ok(FitScores {
                err_reg: Some(err_reg(xhat, x, selected)?),
                err_pca: None,
                precision: precision_zeros(&est, truth)?,
                recall: recall_zeros(&est, truth)?,
                active_count: selected.len(),
            })
        }
        Estimate::Loadings(w) => {
            let truth = loading_truth(truth, w.nrows(), w.ncols())?;
            let est = ZeroMask::of_matrix(w);
            let active = (0..w.nrows()).filter(|&r| w.row(r).iter().any(|v| *v != 0.0)).count();
            Ok(FitScores {
                err_reg: None,
                err_pca: Some(err_pca(xhat, x, w)?),
                precision: precision_zeros(&est, &truth)?,
                recall: recall_zeros(&est, &truth)?,
                active_count: active,
            })
        }
    }
}

/// Metrics of a fit against the generating truth.
pub fn evaluate_fit(data: &Dataset, fit: &Fit) -> Result<FitScores> {
    score_fit(&data.xhat, &data.x, &data.true_zero_mask, fit.estimate())
}

pub fn run_trial(spec: &SignalSpec, method: Method, tuning: &Tuning, trial: usize) -> Result<TrialOutcome> {
    run_trial_detailed(spec, method, tuning, trial).map(|(_, _, outcome)| outcome)
}

/// [`run_trial`] that also hands back the generated data and the fit.
pub fn run_trial_detailed(spec: &SignalSpec, method: Method, tuning: &Tuning, trial: usize) -> Result<(Dataset, Fit, TrialOutcome)> {
    let seed = trial_seed(spec.seed, trial);
    let data = generate(&spec.with_seed(seed))?;
    let (fit, target) = fit_method(&data, method, tuning, seed)?;
    let FitScores { err_reg, err_pca, precision, recall, active_count } = evaluate_fit(&data, &fit)?;
    let (lambda1, converged, kkt_residual, iterations) = match &fit {
        Fit::Columns { lambda1, converged, kkt, iterations, .. } => (*lambda1, *converged, *kkt, *iterations),
        Fit::Factors { lambda1, converged, kkt, iterations, .. } => (Some(*lambda1), Some(*converged), Some(*kkt), Some(*iterations)),
    };
    let outcome = TrialOutcome {
        trial,
        seed,
        err_reg,
        err_pca,
        precision,
        recall,
        active_count,
        target,
        lambda1,
        converged,
        kkt_residual,
        iterations,
    };
    Ok((data, fit, outcome))
}

/// Run `trials` independent trials (seeds `spec.seed + t`) in parallel and
/// aggregate in trial order. Failed trials are recorded, not fatal.
pub fn run_trials(spec: &SignalSpec, method: Method, trials: usize, tuning: &Tuning) -> Result<MetricsReport> {
    spec.validate()?;
    if trials == 0 {
        return Err(param("trials must be >= 1"));
    }
    if tuning.rank == 0 {
        return Err(param("rank must be >= 1"));
    }
    let results: Vec<Result<TrialOutcome>> = (0..trials).into_par_iter().map(|t| run_trial(spec, method, tuning, t)).collect();
    Ok(summarize_trials(spec, method, tuning, results))
}

/// Aggregate per-trial results, given in trial order. Failed trials are
/// recorded, not fatal.
pub fn summarize_trials(spec: &SignalSpec, method: Method, tuning: &Tuning, results: Vec<Result<TrialOutcome>>) -> MetricsReport {
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => failures.push(TrialFailure { trial: t, seed: trial_seed(spec.seed, t), error: e.to_string() }),
        }
    }
    let collect = |f: fn(&TrialOutcome) -> Option<f64>| Stat::of(&outcomes.iter().filter_map(f).collect::<Vec<_>>());
    MetricsReport {
        method,
        spec: *spec,
        tuning: *tuning,
        err_reg: collect(|o| o.err_reg),
        err_pca: collect(|o| o.err_pca),
        precision: collect(|o| o.precision),
        recall: collect(|o| o.recall),
        trials: outcomes,
        failures,
    }
}

/// One point of an error-versus-columns curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Requested column count.
    pub target: usize,
    /// Columns actually selected.
    pub selected: usize,
    /// `||X - X^I X^{I+} X||_F`
    pub error: f64,
}

/// CUR error for each requested column count, one sampling seed per curve.
pub fn cur_error_curve(x: &DenseMatrix, k: usize, counts: &[usize], mode: SamplingMode, seed: u64) -> Result<Vec<CurvePoint>> {
    counts
        .iter()
        .map(|&c| {
            let r = cur_decompose(x, k, c, mode, seed)?;
            Ok(CurvePoint { target: c, selected: r.selected.len(), error: r.error })
        })
        .collect()
}

/// GL-REG error for each requested column count, `lambda1` tuned per count.
pub fn glreg_error_curve(x: &DenseMatrix, config: &GlConfig, counts: &[usize], max_probes: usize) -> Result<Vec<CurvePoint>> {
    counts
        .iter()
        .map(|&c| {
            let out = tune_lambda1_with(x, config, c, TuneMode::Reg, max_probes)?;
            let set = out.solution.active_rows;
            Ok(CurvePoint { target: c, selected: set.len(), error: column_projection_error(x, &set)? })
        })
        .collect()
}
