//! Group-lasso self-regression (GL-REG) and group-lasso sparse PCA (GL-SPCA).
//!
//! Both minimize
//!
//! ```text
//! ||X - X W A^T||_F^2 + lambda ||W||_F^2 + lambda1 * sum_i ||W_(i)||_2,   A^T A = I_k
//! ```
//!
//! by alternating an exact block-coordinate sweep over the rows of `W` with an
//! orthogonal Procrustes step for `A`. GL-REG fixes `A = I_p`.
//!
//! For fixed `A` the smooth part equals `||X||^2 - ||XA||^2 + ||XA - XW||^2`,
//! so the sweep keeps the `n x k` residual `R = XA - XW` up to date and reads
//! the row gradient `g_i = R^T X^(i) + ||X^(i)||^2 W_(i)` from it, at `O(nk)`
//! per row. `g_i` is the vector `A^T X^T X^(i) - b_i` of the block
//! optimality conditions.
//!
//! GL-REG is solved on the row space of `X`: with `X = U S V_r^T` every
//! minimizer can be taken of the form `B = C V_r^T` (projecting `B` onto the
//! row space lowers the loss and every row norm), and then
//! `||X - XB||_F = ||X V_r - X C||_F`. That is the GL-SPCA `W`-step with the
//! fixed orthonormal `A = V_r`, so `B` is never materialized during the solve.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::matcore::{column_space_basis, ensure_finite, truncated_svd, thin_svd, ColumnIndexSet, DenseMatrix, RANK_CUTOFF};

/// Tolerance on `A^T A = I_k` for user-supplied factors.
pub const FACTOR_ORTHONORMAL_TOL: f64 = 1e-8;

/// Probe budget of [`tune_lambda1`].
pub const DEFAULT_MAX_PROBES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlConfig {
    /// Ridge weight `lambda >= 0`.
    pub lambda: f64,
    /// Group-lasso weight `lambda1 >= 0`.
    pub lambda1: f64,
    /// Objective change, relative to `max(objective, ||X||_F^2)`, below which
    /// an iteration counts as stalled.
    pub tol: f64,
    /// Absolute bound on [`kkt_residual`] required, together with `tol`, to
    /// declare convergence.
    pub kkt_tol: f64,
    pub max_iter: usize,
    /// Cap on row sweeps per `W`-step between two `A`-steps (GL-SPCA).
    pub max_inner: usize,
    /// Number of components `k` (GL-SPCA only).
    pub rank: usize,
}

impl GlConfig {
    pub fn new(rank: usize) -> Self {
        Self { lambda: 0.0, lambda1: 0.0, tol: 1e-7, kkt_tol: 1e-6, max_iter: 500, max_inner: 200, rank }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_lambda1(mut self, lambda1: f64) -> Self {
        self.lambda1 = lambda1;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_kkt_tol(mut self, kkt_tol: f64) -> Self {
        self.kkt_tol = kkt_tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_max_inner(mut self, max_inner: usize) -> Self {
        self.max_inner = max_inner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(param(format!("lambda = {} must be finite and >= 0", self.lambda)));
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(param(format!("lambda1 = {} must be finite and >= 0", self.lambda1)));
        }
        if !(self.tol > 0.0) {
            return Err(param(format!("tol = {} must be > 0", self.tol)));
        }
        if !(self.kkt_tol > 0.0) {
            return Err(param(format!("kkt_tol = {} must be > 0", self.kkt_tol)));
        }
        if self.max_iter == 0 || self.max_inner == 0 {
            return Err(param("max_iter and max_inner must be >= 1"));
        }
        Ok(())
    }
}

/// `(A, W)`, both `p x k`, with `A^T A = I_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub a: DenseMatrix,
    pub w: DenseMatrix,
}

impl FactorPair {
    pub fn new(a: DenseMatrix, w: DenseMatrix) -> Result<Self> {
        if a.shape() != w.shape() {
            return Err(param(format!("A is {:?} but W is {:?}", a.shape(), w.shape())));
        }
        let k = a.ncols();
        let dev = (a.transpose() * &a - DenseMatrix::identity(k, k)).amax();
        if !(dev <= FACTOR_ORTHONORMAL_TOL) {
            return Err(param(format!("A^T A deviates from I by {dev:.3e}")));
        }
        Ok(Self { a, w })
    }
}

#[derive(Debug, Clone)]
pub struct GlSolution {
    /// For GL-REG, `a` is `I_p` and `w` is the `p x p` coefficient matrix `B`.
    pub factors: FactorPair,
    pub active_rows: ColumnIndexSet,
    /// Objective at the initial point, then after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// Row sweeps performed in total (GL-SPCA runs several per iteration).
    pub sweeps: usize,
    pub converged: bool,
    /// Largest violation of the stationarity conditions in `W`, see [`kkt_residual`].
    pub kkt_residual: f64,
    pub diagnostics: Vec<String>,
}

impl GlSolution {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace holds the initial objective")
    }
}

/// Exact minimizer over one row of `W` with every other row fixed.
///
/// `g` is `A^T X^T X^(i) - b_i`. Returns zero when `||g|| <= lambda1 / 2`,
/// otherwise `g` rescaled to norm `(||g|| - lambda1/2) / (col_normsq + lambda)`.
pub fn block_update(g: &[f64], col_normsq: f64, lambda: f64, lambda1: f64) -> Result<Vec<f64>> {
    let curvature = col_normsq + lambda;
    if !(curvature > 0.0) {
        return Err(Error::DegenerateColumn);
    }
    let mut out = g.to_vec();
    shrink_in_place(&mut out, curvature, lambda1);
    Ok(out)
}

fn shrink_in_place(g: &mut [f64], curvature: f64, lambda1: f64) {
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let half = 0.5 * lambda1;
    if norm <= half {
        g.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let scale = (norm - half) / (curvature * norm);
        g.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Orthogonal factor of the polar decomposition of `m` (`p x k`, `p >= k`):
/// the maximizer of `trace(A^T m)` over `A^T A = I_k`.
pub fn procrustes_step(m: &DenseMatrix) -> Result<DenseMatrix> {
    polar_factor(m).map(|(a, _)| a)
}

/// Polar factor and the numerical rank of `m`. When `m` is rank deficient the
/// null directions are completed to an orthonormal frame; any completion is optimal.
pub(crate) fn polar_factor(m: &DenseMatrix) -> Result<(DenseMatrix, usize)> {
    let (p, k) = m.shape();
    if k == 0 || p < k {
        return Err(param(format!("Procrustes needs p >= k >= 1, got {p}x{k}")));
    }
    if m.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("orthogonal factor of a zero matrix is undefined".into()));
    }
    let svd = thin_svd(m)?;
    let (u, v_t) = (svd.u, svd.v_t);
    let smax = svd.singular_values[0];
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_CUTOFF * smax).count();
    let left = if rank == k { u } else { complete_frame(&u.columns(0, rank).into_owned(), k) };
    // v_t is k x k orthogonal, its rows already complete the right frame.
    Ok((left * v_t, rank))
}

/// Extend orthonormal columns `q` (`p x r`) to `p x k` by Gram-Schmidt against
/// the canonical basis.
fn complete_frame(q: &DenseMatrix, k: usize) -> DenseMatrix {
    let p = q.nrows();
    let mut cols: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    let mut e = 0;
    while cols.len() < k && e < p {
        let mut v = DVector::zeros(p);
        v[e] = 1.0;
        e += 1;
        for _ in 0..2 {
            for c in &cols {
                let d = c.dot(&v);
                v.axpy(-d, c, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / norm);
        }
    }
    DenseMatrix::from_columns(&cols)
}

/// `max(1, max_i ||X^(i)||^2)`, the natural scale of the row gradients. A
/// relative stationarity tolerance times this gives a usable `kkt_tol`.
pub fn kkt_scale(x: &DenseMatrix) -> f64 {
    x.column_iter().map(|c| c.norm_squared()).fold(1.0, f64::max)
}

/// `||X - X W A^T||_F^2 + lambda ||W||_F^2 + lambda1 sum_i ||W_(i)||_2`.
pub fn gl_objective(x: &DenseMatrix, a: &DenseMatrix, w: &DenseMatrix, lambda: f64, lambda1: f64) -> f64 {
    let fit = (x - x * w * a.transpose()).norm_squared();
    let group: f64 = w.row_iter().map(|r| r.norm()).sum();
    fit + lambda * w.norm_squared() + lambda1 * group
}

/// Largest violation over rows of the stationarity conditions
/// `2 W^T X^T X^(i) - 2 A^T X^T X^(i) + 2 lambda W_(i)^T + lambda1 s_i = 0`,
/// where `s_i = W_(i)/||W_(i)||` for a nonzero row and any `||s_i|| <= 1` otherwise.
/// For a zero row the violation is `max(0, ||2 g_i|| - lambda1)`.
pub fn kkt_residual(x: &DenseMatrix, a: &DenseMatrix, w: &DenseMatrix, lambda: f64, lambda1: f64) -> f64 {
    let col_normsq: Vec<f64> = x.column_iter().map(|c| c.norm_squared()).collect();
    let target = x * a;
    let wt = w.transpose();
    let residual = &target - x * w;
    row_kkt(x, &col_normsq, &residual, &wt, lambda, lambda1)
}

/// Shared row-sweep state: the data, its column norms and the penalty weights.
struct Sweeper<'a> {
    x: &'a DenseMatrix,
    col_normsq: Vec<f64>,
    lambda: f64,
    lambda1: f64,
}

impl<'a> Sweeper<'a> {
    fn new(x: &'a DenseMatrix, lambda: f64, lambda1: f64) -> Self {
        let col_normsq = x.column_iter().map(|c| c.norm_squared()).collect();
        Self { x, col_normsq, lambda, lambda1 }
    }

    fn residual(&self, target: &DenseMatrix, wt: &DenseMatrix) -> DenseMatrix {
        target - self.x * wt.transpose()
    }

    /// One pass of exact block updates over rows `0..p` in order. `wt` holds
    /// `W^T` (`k x p`) so each row is contiguous; `residual` is kept equal to
    /// `XA - XW`. Returns the number of rows that changed.
    fn sweep(&self, residual: &mut DenseMatrix, wt: &mut DenseMatrix, degenerate: &mut Vec<usize>) -> usize {
        let n = self.x.nrows();
        let k = wt.nrows();
        let xs = self.x.as_slice();
        let mut g = vec![0.0; k];
        let mut changed = 0;
        for i in 0..self.col_normsq.len() {
            let col = &xs[i * n..(i + 1) * n];
            let d = self.col_normsq[i];
            let row = &mut wt.as_mut_slice()[i * k..(i + 1) * k];
            let curvature = d + self.lambda;
            if !(curvature > 0.0) {
                // zero column, no ridge: the row has no effect on the fit
                if !degenerate.contains(&i) {
                    degenerate.push(i);
                }
                if row.iter().any(|v| *v != 0.0) {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    changed += 1;
                }
                continue;
            }
            let rs = residual.as_slice();
            for (j, gj) in g.iter_mut().enumerate() {
                *gj = dot(&rs[j * n..(j + 1) * n], col) + d * row[j];
            }
            shrink_in_place(&mut g, curvature, self.lambda1);
            let mut moved = false;
            let rs = residual.as_mut_slice();
            for j in 0..k {
                let delta = g[j] - row[j];
                if delta != 0.0 {
                    moved = true;
                    axpy(-delta, col, &mut rs[j * n..(j + 1) * n]);
                    row[j] = g[j];
                }
            }
            if moved {
                changed += 1;
            }
        }
        changed
    }

    /// Smooth part `||X||^2 - ||XA||^2 + ||R||^2` plus penalties.
    fn objective(&self, x_normsq: f64, target_normsq: f64, residual: &DenseMatrix, wt: &DenseMatrix) -> f64 {
        let group: f64 = wt.column_iter().map(|c| c.norm()).sum();
        (x_normsq - target_normsq).max(0.0) + residual.norm_squared() + self.lambda * wt.norm_squared() + self.lambda1 * group
    }
}

fn row_kkt(x: &DenseMatrix, col_normsq: &[f64], residual: &DenseMatrix, wt: &DenseMatrix, lambda: f64, lambda1: f64) -> f64 {
    let n = x.nrows();
    let k = wt.nrows();
    let xs = x.as_slice();
    let rs = residual.as_slice();
    let mut worst: f64 = 0.0;
    let mut g = vec![0.0; k];
    for (i, &d) in col_normsq.iter().enumerate() {
        let col = &xs[i * n..(i + 1) * n];
        let row = &wt.as_slice()[i * k..(i + 1) * k];
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = dot(&rs[j * n..(j + 1) * n], col) + d * row[j];
        }
        let row_norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let violation = if row_norm == 0.0 {
            (2.0 * g.iter().map(|v| v * v).sum::<f64>().sqrt() - lambda1).max(0.0)
        } else {
            let mut acc = 0.0;
            for j in 0..k {
                let r = 2.0 * (d + lambda) * row[j] + lambda1 * row[j] / row_norm - 2.0 * g[j];
                acc += r * r;
            }
            acc.sqrt()
        };
        worst = worst.max(violation);
    }
    worst
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Objective change relative to `max(|prev|, |cur|, ||X||_F^2)`; the data
/// energy keeps the ratio meaningful when the optimum is zero.
fn relative_change(prev: f64, cur: f64, x_normsq: f64) -> f64 {
    let scale = prev.abs().max(cur.abs()).max(x_normsq);
    if scale == 0.0 {
        0.0
    } else {
        (prev - cur).abs() / scale
    }
}

fn nonzero_rows(wt: &DenseMatrix) -> Vec<usize> {
    wt.column_iter()
        .enumerate()
        .filter(|(_, c)| c.iter().any(|v| *v != 0.0))
        .map(|(i, _)| i)
        .collect()
}

/// Raw outcome of the alternating loop, in the coordinates it was run in.
struct LoopOutcome {
    a: DenseMatrix,
    wt: DenseMatrix,
    trace: Vec<f64>,
    iterations: usize,
    sweeps: usize,
    converged: bool,
    kkt: f64,
    diagnostics: Vec<String>,
}

/// Alternate `W`-sweeps with (optionally) Procrustes updates of `A`.
fn alternate(x: &DenseMatrix, config: &GlConfig, mut a: DenseMatrix, mut wt: DenseMatrix, update_a: bool) -> LoopOutcome {
    let sweeper = Sweeper::new(x, config.lambda, config.lambda1);
    let x_normsq = x.norm_squared();
    let mut target = x * &a;
    let mut target_normsq = target.norm_squared();
    let mut residual = sweeper.residual(&target, &wt);
    let mut trace = vec![sweeper.objective(x_normsq, target_normsq, &residual, &wt)];
    let mut degenerate = Vec::new();
    let mut diagnostics = Vec::new();
    let mut rank_deficient_steps = 0usize;
    let mut skipped_a_steps = 0usize;
    let mut converged = false;
    let mut kkt = f64::INFINITY;
    let mut iterations = 0;
    let mut sweeps = 0;

    for _ in 0..config.max_iter {
        iterations += 1;
        sweeps += 1;
        sweeper.sweep(&mut residual, &mut wt, &mut degenerate);
        if update_a {
            // finish the W-step before moving A; a partial W-step lets A drift
            // along directions on which the objective is flat
            let mut last = sweeper.objective(x_normsq, target_normsq, &residual, &wt);
            for _ in 1..config.max_inner {
                sweeps += 1;
                if sweeper.sweep(&mut residual, &mut wt, &mut degenerate) == 0 {
                    break;
                }
                let f = sweeper.objective(x_normsq, target_normsq, &residual, &wt);
                let stalled = relative_change(last, f, x_normsq) < config.tol;
                last = f;
                if stalled {
                    break;
                }
            }
            let w = wt.transpose();
            if w.iter().all(|v| *v == 0.0) {
                skipped_a_steps += 1;
            } else {
                let m = x.transpose() * (x * &w);
                match polar_factor(&m) {
                    Ok((next, rank)) => {
                        if rank < a.ncols() {
                            rank_deficient_steps += 1;
                        }
                        a = next;
                        target = x * &a;
                        target_normsq = target.norm_squared();
                    }
                    Err(_) => skipped_a_steps += 1,
                }
            }
        }
        // refresh to shed drift from the incremental updates
        residual = sweeper.residual(&target, &wt);
        let f = sweeper.objective(x_normsq, target_normsq, &residual, &wt);
        let prev = *trace.last().unwrap();
        trace.push(f);
        if relative_change(prev, f, x_normsq) < config.tol {
            kkt = row_kkt(x, &sweeper.col_normsq, &residual, &wt, config.lambda, config.lambda1);
            if kkt <= config.kkt_tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        kkt = row_kkt(x, &sweeper.col_normsq, &residual, &wt, config.lambda, config.lambda1);
    }
    if !degenerate.is_empty() {
        diagnostics.push(format!(
            "{} zero column(s) with lambda = 0 held at zero: {:?}",
            degenerate.len(),
            degenerate
        ));
    }
    if rank_deficient_steps > 0 {
        diagnostics.push(format!("{rank_deficient_steps} A-step(s) on a rank-deficient X^T X W; orthogonal factor completed"));
    }
    if skipped_a_steps > 0 {
        diagnostics.push(format!("{skipped_a_steps} A-step(s) skipped because W was zero"));
    }
    if !converged {
        diagnostics.push(format!("stopped after {iterations} iterations without meeting tol and kkt_tol"));
    }
    LoopOutcome { a, wt, trace, iterations, sweeps, converged, kkt, diagnostics }
}

fn check_inputs(x: &DenseMatrix, config: &GlConfig) -> Result<()> {
    config.validate()?;
    ensure_finite(x, "data matrix")
}

/// Default GL-SPCA starting point `A = W = V_k`.
pub fn default_spca_init(x: &DenseMatrix, k: usize) -> Result<FactorPair> {
    let v = truncated_svd(x, k)?.v;
    Ok(FactorPair { a: v.clone(), w: v })
}

/// GL-SPCA: alternating row-sweeps and Procrustes steps from `init`
/// (default `A = W = V_k`).
pub fn glspca_solve(x: &DenseMatrix, config: &GlConfig, init: Option<FactorPair>) -> Result<GlSolution> {
    check_inputs(x, config)?;
    let k = config.rank;
    let (n, p) = x.shape();
    if k == 0 || k > n.min(p) {
        return Err(param(format!("rank k = {k} must lie in [1, {}]", n.min(p))));
    }
    let init = match init {
        Some(f) => {
            if f.a.shape() != (p, k) {
                return Err(param(format!("initial factors are {:?}, expected ({p}, {k})", f.a.shape())));
            }
            FactorPair::new(f.a, f.w)?
        }
        None => default_spca_init(x, k)?,
    };
    let out = alternate(x, config, init.a, init.w.transpose(), true);
    let active = ColumnIndexSet::new(nonzero_rows(&out.wt), p)?;
    Ok(GlSolution {
        factors: FactorPair { a: out.a, w: out.wt.transpose() },
        active_rows: active,
        objective_trace: out.trace,
        iterations: out.iterations,
        sweeps: out.sweeps,
        converged: out.converged,
        kkt_residual: out.kkt,
        diagnostics: out.diagnostics,
    })
}

/// GL-REG on the row space of `X` (see module docs). Reusable across solves
/// with different penalties on the same data.
pub struct RegProblem<'a> {
    x: &'a DenseMatrix,
    /// `p x r` orthonormal basis of the row space of `X`.
    basis: DenseMatrix,
}

impl<'a> RegProblem<'a> {
    pub fn new(x: &'a DenseMatrix) -> Result<Self> {
        ensure_finite(x, "data matrix")?;
        let basis = column_space_basis(&x.transpose())?;
        Ok(Self { x, basis })
    }

    pub fn row_space_rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Solve from the reduced coefficients `C^T` (`r x p`) of a previous solve, or from zero.
    fn solve_reduced(&self, config: &GlConfig, init: Option<DenseMatrix>) -> Result<(GlSolution, DenseMatrix)> {
        check_inputs(self.x, config)?;
        let p = self.x.ncols();
        let r = self.basis.ncols();
        if r == 0 {
            let zero = self.x.norm_squared();
            let sol = GlSolution {
                factors: FactorPair { a: DenseMatrix::identity(p, p), w: DenseMatrix::zeros(p, p) },
                active_rows: ColumnIndexSet::empty(p),
                objective_trace: vec![zero],
                iterations: 0,
                sweeps: 0,
                converged: true,
                kkt_residual: 0.0,
                diagnostics: vec!["data matrix is zero; B = 0".into()],
            };
            return Ok((sol, DenseMatrix::zeros(0, p)));
        }
        let wt = init.unwrap_or_else(|| DenseMatrix::zeros(r, p));
        let out = alternate(self.x, config, self.basis.clone(), wt, false);
        let b = out.wt.transpose() * self.basis.transpose();
        let active = ColumnIndexSet::new(nonzero_rows(&out.wt), p)?;
        let sol = GlSolution {
            factors: FactorPair { a: DenseMatrix::identity(p, p), w: b },
            active_rows: active,
            objective_trace: out.trace,
            iterations: out.iterations,
            sweeps: out.sweeps,
            converged: out.converged,
            kkt_residual: out.kkt,
            diagnostics: out.diagnostics,
        };
        Ok((sol, out.wt))
    }

    pub fn solve(&self, config: &GlConfig) -> Result<GlSolution> {
        self.solve_reduced(config, None).map(|(s, _)| s)
    }

    /// Warm start from a previous `p x p` coefficient matrix `B`.
    pub fn solve_from(&self, config: &GlConfig, b: &DenseMatrix) -> Result<GlSolution> {
        let p = self.x.ncols();
        if b.shape() != (p, p) {
            return Err(param(format!("warm start B is {:?}, expected ({p}, {p})", b.shape())));
        }
        let wt = (b * &self.basis).transpose();
        self.solve_reduced(config, Some(wt)).map(|(s, _)| s)
    }

    /// `2 max_i ||X^T X^(i)||`, the smallest `lambda1` whose solution is `B = 0`.
    pub fn lambda1_max(&self) -> f64 {
        lambda1_max(self.x, &self.basis)
    }
}

/// GL-REG: `min ||X - XB||_F^2 + lambda ||B||_F^2 + lambda1 sum_i ||B_(i)||`,
/// started from `B = 0`. `config.rank` is ignored.
pub fn glreg_solve(x: &DenseMatrix, config: &GlConfig) -> Result<GlSolution> {
    config.validate()?;
    RegProblem::new(x)?.solve(config)
}

/// `2 max_i ||A^T X^T X^(i)||`: at `W = 0` every row satisfies the zero
/// condition iff `lambda1` is at least this.
pub fn lambda1_max(x: &DenseMatrix, a: &DenseMatrix) -> f64 {
    let xa = x * a;
    let n = x.nrows();
    let xs = x.as_slice();
    let k = a.ncols();
    let ts = xa.as_slice();
    (0..x.ncols())
        .map(|i| {
            let col = &xs[i * n..(i + 1) * n];
            let sq: f64 = (0..k).map(|j| dot(&ts[j * n..(j + 1) * n], col).powi(2)).sum();
            2.0 * sq.sqrt()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuneMode {
    Spca,
    Reg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub lambda1: f64,
    pub active: usize,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub lambda1: f64,
    pub solution: GlSolution,
    pub target_rows: usize,
    /// `|active - target|` of the returned solution.
    pub gap: usize,
    pub lambda1_max: f64,
    pub probes: Vec<Probe>,
}

/// Bisect `lambda1` on `[0, lambda1_max]` for `target_rows` nonzero rows,
/// warm-starting each probe from the previous one. `config.lambda1` is ignored.
pub fn tune_lambda1(x: &DenseMatrix, config: &GlConfig, target_rows: usize, mode: TuneMode) -> Result<TuneOutcome> {
    tune_lambda1_with(x, config, target_rows, mode, DEFAULT_MAX_PROBES)
}

/// One solver behind a uniform warm-startable interface for the tuner.
enum TuneBackend<'a> {
    Reg(RegProblem<'a>),
    Spca { x: &'a DenseMatrix, start_a: DenseMatrix },
}

impl TuneBackend<'_> {
    fn lambda1_max(&self) -> f64 {
        match self {
            TuneBackend::Reg(prob) => prob.lambda1_max(),
            TuneBackend::Spca { x, start_a } => lambda1_max(x, start_a),
        }
    }

    fn solve(&self, config: &GlConfig, warm: Option<&GlSolution>) -> Result<GlSolution> {
        match self {
            TuneBackend::Reg(prob) => match warm {
                Some(prev) => prob.solve_from(config, &prev.factors.w),
                None => prob.solve(config),
            },
            TuneBackend::Spca { x, start_a } => {
                let init = match warm {
                    Some(prev) => prev.factors.clone(),
                    None => FactorPair { a: start_a.clone(), w: DenseMatrix::zeros(start_a.nrows(), start_a.ncols()) },
                };
                glspca_solve(x, config, Some(init))
            }
        }
    }
}

pub fn tune_lambda1_with(
    x: &DenseMatrix,
    config: &GlConfig,
    target_rows: usize,
    mode: TuneMode,
    max_probes: usize,
) -> Result<TuneOutcome> {
    config.validate()?;
    ensure_finite(x, "data matrix")?;
    let p = x.ncols();
    if target_rows > p {
        return Err(param(format!("target of {target_rows} rows exceeds p = {p}")));
    }
    if max_probes == 0 {
        return Err(param("max_probes must be >= 1"));
    }
    let backend = match mode {
        TuneMode::Reg => TuneBackend::Reg(RegProblem::new(x)?),
        TuneMode::Spca => {
            let k = config.rank;
            let (n, p) = x.shape();
            if k == 0 || k > n.min(p) {
                return Err(param(format!("rank k = {k} must lie in [1, {}]", n.min(p))));
            }
            TuneBackend::Spca { x, start_a: truncated_svd(x, k)?.v }
        }
    };
    let lmax = backend.lambda1_max();
    let mut probes = Vec::new();
    let mut best: Option<(f64, GlSolution)> = None;

    let consider = |lambda1: f64, sol: GlSolution, probes: &mut Vec<Probe>, best: &mut Option<(f64, GlSolution)>| {
        let active = sol.active_rows.len();
        probes.push(Probe { lambda1, active });
        let better = match best {
            None => true,
            Some((bl, bs)) => {
                let (g_new, g_old) = (active.abs_diff(target_rows), bs.active_rows.len().abs_diff(target_rows));
                g_new < g_old || (g_new == g_old && lambda1 < *bl)
            }
        };
        if better {
            *best = Some((lambda1, sol));
        }
    };

    if target_rows == 0 || lmax == 0.0 {
        let lambda1 = lmax * (1.0 + 1e-6);
        let sol = backend.solve(&config.with_lambda1(lambda1), None)?;
        consider(lambda1, sol, &mut probes, &mut best);
    } else {
        let mut lo = 0.0;
        let mut hi = lmax;
        let mut warm: Option<GlSolution> = None;
        let first = if target_rows == p { Some(0.0) } else { None };
        for probe in 0..max_probes {
            let lambda1 = match (probe, first) {
                (0, Some(l)) => l,
                _ => 0.5 * (lo + hi),
            };
            let sol = backend.solve(&config.with_lambda1(lambda1), warm.as_ref())?;
            let active = sol.active_rows.len();
            warm = Some(sol.clone());
            consider(lambda1, sol, &mut probes, &mut best);
            if active == target_rows {
                break;
            }
            if active > target_rows {
                lo = lambda1;
            } else {
                hi = lambda1;
            }
        }
    }
    let (lambda1, solution) = best.expect("at least one probe");
    let gap = solution.active_rows.len().abs_diff(target_rows);
    Ok(TuneOutcome { lambda1, solution, target_rows, gap, lambda1_max: lmax, probes })
}
