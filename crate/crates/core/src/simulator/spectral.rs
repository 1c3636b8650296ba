use serde::Serialize;

use crate::numerics::{
    eigenvalues, is_symmetric, kernel_basis, mixed_norm_2_inf, Complex, Matrix, DEFAULT_RANK_TOL,
};

/// Absolute tolerance for counting eigenvalues at 0 and at 1.
pub const UNIT_EIGENVALUE_TOL: f64 = 1e-8;

/// Eigenvalue census of a square matrix, blocked by `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub dim: usize,
    /// Eigenvalues within tolerance of 1.
    pub ones: usize,
    /// Eigenvalues within tolerance of 0.
    pub zeros: usize,
    /// Real eigenvalues above tolerance, not counting those at 1.
    pub positive: usize,
    /// `|lambda| < 1`, excluding eigenvalues at 1.
    pub inside_unit: usize,
    /// `|lambda| > 1` beyond tolerance.
    pub outside: usize,
    /// On the unit circle but not at 1 (e.g. -1).
    pub on_unit_circle: usize,
    /// Geometric multiplicity of the eigenvalue 1.
    pub one_eigenspace_dim: usize,
    pub spectral_radius: f64,
    /// Largest `|lambda|` over eigenvalues not at 1: the asymptotic rate.
    pub second_abs: f64,
    pub symmetric: bool,
    /// For symmetric matrices, whether the spectrum lies in `(-1, 1]`.
    pub paracontracting: Option<bool>,
    /// `None` when `n` does not divide the dimension.
    pub mixed_norm: Option<f64>,
    /// The matrix is the identity: no arc contributes anything.
    pub degenerate: bool,
    #[serde(skip)]
    pub eigenvalues: Vec<Complex<f64>>,
}

impl SpectralReport {
    /// `1 - second_abs`.
    pub fn gap(&self) -> f64 {
        1.0 - self.second_abs
    }
}

pub fn spectral_report(m: &Matrix, n: usize) -> SpectralReport {
    assert!(m.is_square(), "spectral report needs a square matrix");
    let dim = m.nrows();
    let eig = eigenvalues(m);
    let tol = UNIT_EIGENVALUE_TOL;
    let at_one = |z: &Complex<f64>| (z - Complex::new(1.0, 0.0)).norm() < tol;
    let mut r = SpectralReport {
        dim,
        ones: 0,
        zeros: 0,
        positive: 0,
        inside_unit: 0,
        outside: 0,
        on_unit_circle: 0,
        one_eigenspace_dim: kernel_basis(&(m - Matrix::identity(dim, dim)), DEFAULT_RANK_TOL).dim(),
        spectral_radius: eig.iter().map(|z| z.norm()).fold(0.0, f64::max),
        second_abs: 0.0,
        symmetric: is_symmetric(m),
        paracontracting: None,
        mixed_norm: (n > 0 && dim.is_multiple_of(n))
            .then(|| mixed_norm_2_inf(m, n).ok())
            .flatten(),
        degenerate: (m - Matrix::identity(dim, dim)).amax() == 0.0,
        eigenvalues: eig.clone(),
    };
    for z in &eig {
        if z.norm() < tol {
            r.zeros += 1;
        }
        if at_one(z) {
            r.ones += 1;
            continue;
        }
        if z.re > tol && z.im.abs() < tol {
            r.positive += 1;
        }
        let a = z.norm();
        r.second_abs = r.second_abs.max(a);
        if a < 1.0 - tol {
            r.inside_unit += 1;
        } else if a > 1.0 + tol {
            r.outside += 1;
        } else {
            r.on_unit_circle += 1;
        }
    }
    if r.symmetric {
        r.paracontracting = Some(r.outside == 0 && r.on_unit_circle == 0);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_all_ones_and_paracontracting() {
        let r = spectral_report(&Matrix::identity(6, 6), 2);
        assert_eq!((r.ones, r.one_eigenspace_dim), (6, 6));
        assert_eq!(r.paracontracting, Some(true));
        assert!(r.degenerate);
        assert_eq!(r.second_abs, 0.0);
    }

    #[test]
    fn reflection_is_not_paracontracting() {
        let m = Matrix::from_diagonal(&crate::numerics::Vector::from_vec(vec![1.0, -1.0, 0.5]));
        let r = spectral_report(&m, 1);
        assert_eq!((r.ones, r.on_unit_circle, r.inside_unit), (1, 1, 1));
        assert_eq!(r.paracontracting, Some(false));
        assert_eq!(r.positive, 1);
    }

    #[test]
    fn jordan_block_has_one_dimensional_eigenspace() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let r = spectral_report(&m, 1);
        assert_eq!((r.ones, r.one_eigenspace_dim), (2, 1));
        assert_eq!(r.paracontracting, None);
    }

    #[test]
    fn rotation_counts_outside() {
        let m = Matrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let r = spectral_report(&m, 2);
        assert_eq!(r.outside, 2);
        assert!((r.spectral_radius - 2.0).abs() < 1e-12);
    }
}
