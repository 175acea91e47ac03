//! Complex linear-algebra kernels shared by the whole simulator.
//!
//! Everything here operates on `nalgebra` dense complex matrices. The three
//! nontrivial kernels are the Hermitian eigendecomposition (used to extract
//! clutter subspaces), a Cholesky-based log-determinant for PSD matrices
//! (mutual-information evaluation), and a zero-order Bessel function of the
//! first kind (angle-averaged array covariance). `pinv_project` is the
//! complement projector applied by all the zero-forcing combiners.
//!
//! All numerical tolerances live in [`tol`] so tests and production code use
//! the same constants.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Central tolerance table.
pub mod tol {
    /// Maximum relative asymmetry for a matrix to count as Hermitian.
    pub const HERMITIAN_REL: f64 = 1e-12;
    /// Reconstruction bound for the eigendecomposition, relative to ‖A‖_F.
    pub const EIG_RECONSTRUCT_REL: f64 = 1e-9;
    /// Pairwise orthonormality bound for eigenvector columns.
    pub const EIG_ORTHO: f64 = 1e-10;
    /// Eigenvalues below -PSD_EIG_REL * ‖A‖_F are an error for PSD inputs.
    pub const PSD_EIG_REL: f64 = 1e-9;
    /// Eigenvalues >= RANK_REL_CUTOFF * lambda_max count as nonzero when
    /// building projector bases.
    pub const RANK_REL_CUTOFF: f64 = 1e-9;
    /// Absolute accuracy of the Bessel evaluation over |x| <= 1e3 * pi.
    pub const BESSEL_ABS: f64 = 1e-10;
    /// Residual-norm fraction under which a vector is dropped during
    /// Gram-Schmidt orthonormalization of steering vectors.
    pub const GS_DROP: f64 = 1e-8;
    /// A projected combiner with norm below this fraction of the input norm
    /// is degenerate.
    pub const DEGENERATE_COMBINER_REL: f64 = 1e-12;
    /// Orthonormality requirement on projector bases fed to `pinv_project`.
    pub const ORTHONORMAL_BASIS: f64 = 1e-10;
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: max asymmetry {max_dev:.3e} exceeds {tol:.3e}")]
    NotHermitian { max_dev: f64, tol: f64 },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigendecomposition did not converge (size {n}, frobenius {frob:.3e})")]
    EigNonConvergence { n: usize, frob: f64 },
    #[error("PSD-flagged matrix has eigenvalue {lambda:.3e} below -{floor:.3e}")]
    NotPsd { lambda: f64, floor: f64 },
    #[error("matrix is singular or not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("basis columns are not orthonormal: max deviation {max_dev:.3e}")]
    NotOrthonormal { max_dev: f64 },
    #[error("non-finite entry encountered")]
    NonFinite,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// eigenvector columns orthonormal.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigDecomposition {
    /// Reassembles U diag(lambda) U^H.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            let u = self.eigenvectors.column(i);
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += u[r] * u[c].conj() * Complex64::new(lam, 0.0);
                }
            }
        }
        out
    }

    /// Columns whose eigenvalue is at least `tol::RANK_REL_CUTOFF` times the
    /// largest one; this is the numerical range basis used by the
    /// zero-forcing receivers.
    pub fn dominant_basis(&self) -> CMatrix {
        let lmax = self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = tol::RANK_REL_CUTOFF * lmax;
        let keep: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| self.eigenvalues[i] > cutoff && self.eigenvalues[i] > 0.0)
            .collect();
        let n = self.eigenvectors.nrows();
        let mut basis = CMatrix::zeros(n, keep.len());
        for (j, &i) in keep.iter().enumerate() {
            basis.set_column(j, &self.eigenvectors.column(i));
        }
        basis
    }
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_hermitian(a: &CMatrix) -> Result<(), NumericsError> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    let scale = max_abs(a).max(1e-300);
    let mut max_dev = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            let dev = (a[(i, j)] - a[(j, i)].conj()).norm();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    if max_dev > tol::HERMITIAN_REL * scale {
        return Err(NumericsError::NotHermitian {
            max_dev: max_dev / scale,
            tol: tol::HERMITIAN_REL,
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are real and sorted
/// in descending order. Rejects matrices that are not Hermitian to within
/// [`tol::HERMITIAN_REL`].
pub fn hermitian_eig(a: &CMatrix) -> Result<EigDecomposition, NumericsError> {
    check_hermitian(a)?;
    let n = a.nrows();
    // Symmetrize so roundoff in the caller cannot leak into the solver.
    let mut sym = a.clone();
    for i in 0..n {
        for j in 0..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * Complex64::new(0.5, 0.0);
            sym[(i, j)] = avg;
        }
    }
    let frob = frobenius_norm(&sym);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or(NumericsError::EigNonConvergence { n, frob })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Same as [`hermitian_eig`] but the caller asserts the matrix is positive
/// semidefinite; eigenvalues below `-PSD_EIG_REL * ‖A‖_F` are an error.
pub fn hermitian_eig_psd(a: &CMatrix) -> Result<EigDecomposition, NumericsError> {
    let eig = hermitian_eig(a)?;
    let floor = tol::PSD_EIG_REL * frobenius_norm(a);
    if let Some(&lambda) = eig
        .eigenvalues
        .iter()
        .find(|&&l| l < -floor)
    {
        return Err(NumericsError::NotPsd { lambda, floor });
    }
    Ok(eig)
}

/// Natural-log determinant of a Hermitian positive-definite matrix via
/// Cholesky factorization. Callers are expected to have added the noise
/// floor already, so a failed factorization is reported as singularity.
pub fn logdet_psd(a: &CMatrix) -> Result<f64, NumericsError> {
    check_hermitian(a)?;
    let chol = Cholesky::new(a.clone()).ok_or(NumericsError::NotPositiveDefinite)?;
    let mut acc = 0.0;
    for z in chol.l().diagonal().iter() {
        if z.re <= 0.0 {
            return Err(NumericsError::NotPositiveDefinite);
        }
        acc += z.re.ln();
    }
    Ok(2.0 * acc)
}

/// Zero-order Bessel function of the first kind.
///
/// Power series below the crossover, Hankel asymptotic expansion beyond;
/// absolute error below [`tol::BESSEL_ABS`] over |x| <= 1e3 * pi.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < J0_SERIES_CROSSOVER {
        j0_power_series(ax)
    } else {
        j0_asymptotic(ax)
    }
}

const J0_SERIES_CROSSOVER: f64 = 12.0;

fn j0_power_series(x: f64) -> f64 {
    // J0(x) = sum_k (-x^2/4)^k / (k!)^2
    let q = -0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn j0_asymptotic(x: f64) -> f64 {
    // J0(x) ~ sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    // with the Hankel coefficients c_0 = 1, c_{m} = c_{m-1} (-(2m-1)^2)/(8m);
    // P collects even m, Q odd m, both with alternating sign. The series is
    // truncated at its smallest term.
    let mut c = 1.0f64;
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut prev = f64::INFINITY;
    for m in 1..60 {
        c *= -(((2 * m - 1) * (2 * m - 1)) as f64) / (8.0 * m as f64);
        let t = c / x.powi(m as i32);
        if t.abs() >= prev {
            break; // divergent tail reached
        }
        prev = t.abs();
        // sign pattern (-1)^k for term index k = floor(m/2) within each series
        let k = m / 2;
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        if m % 2 == 0 {
            p += sgn * t;
        } else {
            q += sgn * t;
        }
        if t.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Projects `v` onto the orthogonal complement of the column space of `U`:
/// returns `(I - U U^H) v`. `U` must carry orthonormal columns; an empty `U`
/// (zero columns) is the identity projector.
pub fn pinv_project(u: &CMatrix, v: &CVector) -> Result<CVector, NumericsError> {
    if u.ncols() == 0 {
        return Ok(v.clone());
    }
    if u.nrows() != v.len() {
        return Err(NumericsError::DimensionMismatch {
            context: format!("basis has {} rows, vector has {}", u.nrows(), v.len()),
        });
    }
    let mut max_dev = 0.0f64;
    for i in 0..u.ncols() {
        for j in i..u.ncols() {
            let g: Complex64 = u.column(i).dotc(&u.column(j));
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (g - Complex64::new(target, 0.0)).norm();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    if max_dev > tol::ORTHONORMAL_BASIS {
        return Err(NumericsError::NotOrthonormal { max_dev });
    }
    let coeffs = u.adjoint() * v;
    Ok(v - u * coeffs)
}

/// Orthonormal basis for the span of `columns`, built by modified
/// Gram-Schmidt; vectors whose residual drops below [`tol::GS_DROP`] times
/// their original norm are discarded as numerically collinear.
pub fn orthonormalize_columns(columns: &[CVector]) -> CMatrix {
    let dim = columns.first().map(|c| c.len()).unwrap_or(0);
    let mut basis: Vec<CVector> = Vec::new();
    for col in columns {
        let norm0 = col.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut r = col.clone();
        // two MGS passes for numerical safety
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&r);
                r -= b * coeff;
            }
        }
        let norm = r.norm();
        if norm > tol::GS_DROP * norm0 {
            basis.push(r / Complex64::new(norm, 0.0));
        }
    }
    let mut out = CMatrix::zeros(dim, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}
