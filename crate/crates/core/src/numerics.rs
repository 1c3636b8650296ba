//! Dense linear algebra used throughout the crate.
//!
//! Every rank and kernel decision goes through [`numerical_rank`], which treats
//! singular values below `tol * sigma_max` as zero. The default relative
//! tolerance is [`DEFAULT_RANK_TOL`]; all public functions accept an explicit
//! override.
//!
//! Storage and arithmetic use `nalgebra`; singular value and eigenvalue
//! decompositions are delegated to `faer`.

use faer::Side;
use nalgebra::{Cholesky, DMatrix, DVector, QR};
use thiserror::Error;

pub use nalgebra::Complex;

/// Dense real matrix. Serialized as row-major nested lists.
pub type Matrix = DMatrix<f64>;
/// Dense real column vector.
pub type Vector = DVector<f64>;

/// Relative singular-value cutoff for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has {rows} rows but numerical rank {rank}; drop the redundant rows first")]
    RankDeficientRows { rows: usize, rank: usize },
    #[error("C C' is singular (rank {rank} < {rows} rows); a projection needs full row rank")]
    SingularGram { rows: usize, rank: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Orthonormal basis of a subspace of `R^n`, stored as the columns of an
/// `n x k` matrix. `k == 0` is the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: Matrix,
}

impl SubspaceBasis {
    /// The zero subspace of `R^n`.
    pub fn zero(n: usize) -> Self {
        Self {
            basis: Matrix::zeros(n, 0),
        }
    }

    /// All of `R^n`.
    pub fn full(n: usize) -> Self {
        Self {
            basis: Matrix::identity(n, n),
        }
    }

    /// Span of the given columns (not necessarily independent or orthonormal).
    pub fn span_of(columns: &Matrix, tol: f64) -> Self {
        Self {
            basis: range_basis(columns, tol),
        }
    }

    /// Span of a list of vectors in `R^n`.
    pub fn span_of_vectors(n: usize, vectors: &[Vector], tol: f64) -> Self {
        let mut cols = Matrix::zeros(n, vectors.len());
        for (k, v) in vectors.iter().enumerate() {
            cols.set_column(k, v);
        }
        Self::span_of(&cols, tol)
    }

    /// `span{e_axis}` in `R^n`.
    pub fn axis(n: usize, axis: usize) -> Self {
        let mut basis = Matrix::zeros(n, 1);
        basis[(axis, 0)] = 1.0;
        Self { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    /// Distance of `v` from the subspace, `|| (I - P) v ||`.
    pub fn residual(&self, v: &Vector) -> f64 {
        let coeffs = self.basis.transpose() * v;
        (v - &self.basis * coeffs).norm()
    }

    pub fn intersection(&self, other: &Self, tol: f64) -> Self {
        let n = self.ambient_dim();
        let id = Matrix::identity(n, n);
        let stacked = vstack(&[&id - self.projector(), &id - other.projector()]);
        kernel_basis(&stacked, tol)
    }

    pub fn sum(&self, other: &Self, tol: f64) -> Self {
        Self::span_of(&hstack(&[self.basis.clone(), other.basis.clone()]), tol)
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self, tol: f64) -> Self {
        if self.dim() == 0 {
            return Self::full(self.ambient_dim());
        }
        kernel_basis(&self.basis.transpose(), tol)
    }

    /// Largest mutual projection residual between two subspaces; zero iff
    /// they are equal. Bases themselves are never compared.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let a = &self.basis - other.projector() * &self.basis;
        let b = &other.basis - self.projector() * &other.basis;
        spectral_norm(&a).max(spectral_norm(&b))
    }
}

fn to_faer(a: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Singular values of `a` in non-increasing order, `min(rows, cols)` of them.
fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    to_faer(a)
        .singular_values()
        .expect("SVD converges on finite input")
}

/// Number of leading singular values above `tol * sigma_max`.
fn rank_of(sv: &[f64], tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Largest singular value (induced 2-norm).
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &Matrix, tol: f64) -> usize {
    rank_of(&singular_values(a), tol)
}

/// Orthonormal basis of `kernel a`.
pub fn kernel_basis(a: &Matrix, tol: f64) -> SubspaceBasis {
    let cols = a.ncols();
    if cols == 0 {
        return SubspaceBasis::zero(0);
    }
    if a.nrows() == 0 {
        return SubspaceBasis::full(cols);
    }
    let svd = to_faer(a).svd().expect("SVD converges on finite input");
    let sv: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let rank = rank_of(&sv, tol);
    let v = svd.V();
    SubspaceBasis {
        basis: Matrix::from_fn(cols, cols - rank, |i, j| v[(i, rank + j)]),
    }
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis(a: &Matrix, tol: f64) -> Matrix {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return Matrix::zeros(rows, 0);
    }
    let svd = to_faer(a)
        .thin_svd()
        .expect("SVD converges on finite input");
    let sv: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let rank = rank_of(&sv, tol);
    let u = svd.U();
    Matrix::from_fn(rows, rank, |i, j| u[(i, j)])
}

/// Gram-Schmidt on the rows of `c` (via QR of `c'`), signs fixed so the
/// triangular factor has a positive diagonal. Already-orthonormal rows come
/// back unchanged.
pub fn orthonormalize_rows(c: &Matrix, tol: f64) -> Result<Matrix, LinalgError> {
    if c.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let rows = c.nrows();
    if rows == 0 {
        return Ok(c.clone());
    }
    let rank = numerical_rank(c, tol);
    if rank < rows {
        return Err(LinalgError::RankDeficientRows { rows, rank });
    }
    let qr = QR::new(c.transpose());
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..rows {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    Ok(q.transpose())
}

/// `C' (C C')^{-1} C`, the orthogonal projector onto the row space of `c`.
pub fn projection_matrix(c: &Matrix, tol: f64) -> Result<Matrix, LinalgError> {
    let n = c.ncols();
    let rows = c.nrows();
    if rows == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let rank = numerical_rank(c, tol);
    if rank < rows {
        return Err(LinalgError::SingularGram { rows, rank });
    }
    let gram = c * c.transpose();
    let chol = Cholesky::new(gram).ok_or(LinalgError::SingularGram { rows, rank })?;
    let p = c.transpose() * chol.solve(c);
    // Symmetrize away round-off.
    Ok((&p + p.transpose()) * 0.5)
}

pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[Matrix]) -> Matrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack: row mismatch");
        out.view_mut((0, c), b.shape()).copy_from(b);
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[Matrix]) -> Matrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack: column mismatch");
        out.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    out
}

/// `1_m (x) I_n`: the columns span the consensus subspace of `R^{mn}`.
pub fn consensus_basis(m: usize, n: usize) -> Matrix {
    kronecker(&Matrix::from_element(m, 1, 1.0), &Matrix::identity(n, n))
}

/// True when `a` is square and `|a - a'| <= 1e-12 * max|a|` entrywise.
pub fn is_symmetric(a: &Matrix) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.amax().max(1.0);
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= 1e-12 * scale))
}

/// Full spectrum with multiplicity. Symmetric input uses the symmetric
/// solver and comes back real, sorted ascending; otherwise eigenvalues are
/// sorted by real part, then imaginary part.
pub fn eigenvalues(a: &Matrix) -> Vec<Complex<f64>> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    if a.nrows() == 0 {
        return Vec::new();
    }
    if is_symmetric(a) {
        let sym = (a + a.transpose()) * 0.5;
        let mut vals = to_faer(&sym)
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("symmetric eigensolver converges on finite input");
        vals.sort_by(f64::total_cmp);
        return vals.into_iter().map(|v| Complex::new(v, 0.0)).collect();
    }
    let mut vals = to_faer(a)
        .eigenvalues()
        .expect("eigensolver converges on finite input");
    vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    vals
}

/// Whether the family is independent: each member meets the sum of the
/// others only at zero. Computed as `dim(sum) == sum(dim)`.
pub fn subspace_family_independent(
    family: &[SubspaceBasis],
    tol: f64,
) -> Result<bool, LinalgError> {
    let Some(first) = family.first() else {
        return Ok(true);
    };
    let n = first.ambient_dim();
    if let Some(bad) = family.iter().find(|s| s.ambient_dim() != n) {
        return Err(LinalgError::DimensionMismatch(format!(
            "subspaces of R^{n} and R^{}",
            bad.ambient_dim()
        )));
    }
    let total: usize = family.iter().map(SubspaceBasis::dim).sum();
    if total == 0 {
        return Ok(true);
    }
    if total > n {
        return Ok(false);
    }
    let stacked = hstack(&family.iter().map(|s| s.basis.clone()).collect::<Vec<_>>());
    Ok(numerical_rank(&stacked, tol) == total)
}

/// `||Q||_{2,inf}`: the induced infinity norm of the `m x m` matrix of
/// blockwise spectral norms of `Q`, with `block x block` blocks.
pub fn mixed_norm_2_inf(q: &Matrix, block: usize) -> Result<f64, LinalgError> {
    if block == 0 || !q.is_square() || !q.nrows().is_multiple_of(block) {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} matrix is not a square array of {block}x{block} blocks",
            q.nrows(),
            q.ncols()
        )));
    }
    let m = q.nrows() / block;
    let mut best = 0.0_f64;
    for i in 0..m {
        let row_sum: f64 = (0..m)
            .map(|j| spectral_norm(&q.view((i * block, j * block), (block, block)).into_owned()))
            .sum();
        best = best.max(row_sum);
    }
    Ok(best)
}
