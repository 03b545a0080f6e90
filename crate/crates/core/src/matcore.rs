//! Dense-matrix primitives shared by every method: the truncated SVD contract,
//! column-index sets, and the two reconstruction-error functionals
//!
//! * column projection error `||X - X^I X^{I+} X||_F` (regression type), and
//! * factor projection error `||X - X W W^+||_F` (PCA type).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// The universal `n x p` carrier for data, signal and noise matrices.
pub type DenseMatrix = DMatrix<f64>;

/// Singular values below `RANK_CUTOFF * sigma_max` are treated as zero when a
/// pseudoinverse or a projector is formed.
pub const RANK_CUTOFF: f64 = 1e-12;

pub fn ensure_finite(m: &DenseMatrix, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(param(format!("{what} must have at least one row and one column")));
    }
    if let Some(pos) = m.iter().position(|v| !v.is_finite()) {
        let (r, c) = (pos % m.nrows(), pos / m.nrows());
        return Err(param(format!("{what} has a non-finite entry at ({r}, {c})")));
    }
    Ok(())
}

/// Strictly increasing list of 0-based column indices into a universe of `p` columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnIndexSet {
    indices: Vec<usize>,
    universe: usize,
}

impl ColumnIndexSet {
    /// Builds a set from arbitrary indices; order is normalized and duplicates collapse.
    pub fn new(mut indices: Vec<usize>, universe: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= universe) {
            return Err(param(format!("column index {bad} out of range for {universe} columns")));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self { indices, universe })
    }

    pub fn empty(universe: usize) -> Self {
        Self { indices: Vec::new(), universe }
    }

    pub fn all(universe: usize) -> Self {
        Self { indices: (0..universe).collect(), universe }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> Self {
        let indices = (0..self.universe).filter(|i| !self.contains(*i)).collect();
        Self { indices, universe: self.universe }
    }
}

/// Top-`k` singular triple `U_k diag(sigma) V_k^T`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `n x k`, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: DVector<f64>,
    /// `p x k`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U_k diag(sigma) V_k^T`, the best rank-`k` approximation.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    m.norm()
}

/// `m = u diag(singular_values) v_t` with `min(n, p)` factors, singular
/// values nonincreasing.
pub(crate) struct ThinSvd {
    pub u: DenseMatrix,
    pub singular_values: DVector<f64>,
    pub v_t: DenseMatrix,
}

pub(crate) fn thin_svd(m: &DenseMatrix) -> Result<ThinSvd> {
    let (n, p) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(n, p, |i, j| m[(i, j)]);
    let svd = fm
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("SVD of a {n}x{p} matrix failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let r = n.min(p);
    Ok(ThinSvd {
        u: DenseMatrix::from_fn(n, r, |i, j| u[(i, j)]),
        singular_values: DVector::from_fn(r, |i, _| s[i]),
        v_t: DenseMatrix::from_fn(r, p, |i, j| v[(j, i)]),
    })
}

/// Top-`k` factors of `m`. Column signs are whatever the decomposition returns.
///
/// When `rank(m) < k` the trailing singular vectors (with zero singular value)
/// still complete `U_k` and `V_k` to orthonormal bases.
pub fn truncated_svd(m: &DenseMatrix, k: usize) -> Result<SvdFactors> {
    ensure_finite(m, "matrix")?;
    let min_dim = m.nrows().min(m.ncols());
    if k == 0 || k > min_dim {
        return Err(param(format!("rank k = {k} must lie in [1, {min_dim}]")));
    }
    let svd = thin_svd(m)?;
    let (u, v_t) = (svd.u, svd.v_t);
    Ok(SvdFactors {
        u: u.columns(0, k).into_owned(),
        sigma: svd.singular_values.rows(0, k).into_owned(),
        v: v_t.rows(0, k).transpose(),
    })
}

/// Orthonormal basis of the column space of `m`, using the numerical rank cutoff.
/// Returns an `nrows x 0` matrix when `m` is zero.
pub fn column_space_basis(m: &DenseMatrix) -> Result<DenseMatrix> {
    if m.ncols() == 0 {
        return Ok(DenseMatrix::zeros(m.nrows(), 0));
    }
    let svd = thin_svd(m)?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_CUTOFF * smax && s > 0.0).count();
    let u = svd.u;
    Ok(u.columns(0, rank).into_owned())
}

/// Moore-Penrose pseudoinverse with the crate-wide rank cutoff.
pub fn pseudo_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let svd = thin_svd(m)?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let (u, v_t) = (svd.u, svd.v_t);
    let mut out = DenseMatrix::zeros(m.ncols(), m.nrows());
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_CUTOFF * smax && s > 0.0 {
            out += (v_t.row(j).transpose() / s) * u.column(j).transpose();
        }
    }
    Ok(out)
}

/// `X^I`, the submatrix of the selected columns.
pub fn select_columns(x: &DenseMatrix, set: &ColumnIndexSet) -> DenseMatrix {
    x.select_columns(set.indices())
}

/// `X^I X^{I+} target`: orthogonal projection of `target` onto `span(X^I)`.
/// The empty set spans `{0}`.
pub fn project_onto_columns(x: &DenseMatrix, set: &ColumnIndexSet, target: &DenseMatrix) -> Result<DenseMatrix> {
    check_universe(x, set)?;
    if set.is_empty() {
        return Ok(DenseMatrix::zeros(target.nrows(), target.ncols()));
    }
    let q = column_space_basis(&select_columns(x, set))?;
    Ok(&q * (q.transpose() * target))
}

/// `||X - X^I X^{I+} X||_F`, equal to `min_B ||X - X^I B||_F`.
pub fn column_projection_error(x: &DenseMatrix, set: &ColumnIndexSet) -> Result<f64> {
    let proj = project_onto_columns(x, set, x)?;
    Ok((x - proj).norm())
}

/// `X W W^+`. `W` need not have orthonormal columns; `W W^+` is the projector
/// onto the column span of `W`.
pub fn factor_projection(x: &DenseMatrix, w: &DenseMatrix) -> Result<DenseMatrix> {
    if w.nrows() != x.ncols() {
        return Err(param(format!("factor has {} rows, data has {} columns", w.nrows(), x.ncols())));
    }
    let q = column_space_basis(w)?;
    Ok((x * &q) * q.transpose())
}

/// `||X - X W W^+||_F`.
pub fn factor_projection_error(x: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    Ok((x - factor_projection(x, w)?).norm())
}

/// `Err(W) - min_B ||X - X^I B||_F` for a factor supported on `I`.
///
/// Nonnegative up to rounding; zero only when the column spaces of `X^I` and
/// `X^{I^c}` are orthogonal.
pub fn theorem3_gap(x: &DenseMatrix, set: &ColumnIndexSet, w: &DenseMatrix) -> Result<f64> {
    check_universe(x, set)?;
    if w.nrows() != x.ncols() {
        return Err(param(format!("factor has {} rows, data has {} columns", w.nrows(), x.ncols())));
    }
    for i in set.complement().indices() {
        if w.row(*i).iter().any(|v| *v != 0.0) {
            return Err(param(format!("factor row {i} is nonzero but outside the index set")));
        }
    }
    Ok(factor_projection_error(x, w)? - column_projection_error(x, set)?)
}

fn check_universe(x: &DenseMatrix, set: &ColumnIndexSet) -> Result<()> {
    if set.universe() != x.ncols() {
        return Err(param(format!(
            "index set over {} columns used with a matrix of {} columns",
            set.universe(),
            x.ncols()
        )));
    }
    Ok(())
}
