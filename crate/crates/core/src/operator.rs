//! Dense Hermitian operators, spectral decompositions and pseudo-inverses of
//! real Gram-type matrices.

use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// A `d × d` complex self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Wraps `mat`, rejecting non-square or non-Hermitian input.
    pub fn new(mat: CMatrix, tol_herm: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let op = Self { mat };
        let residual = op.hermiticity_residual();
        if residual > tol_herm {
            return Err(Error::NotHermitian { residual });
        }
        Ok(op)
    }

    /// Wraps `mat` without checks. Used for file input under `--allow-invalid`
    /// and for operators that are Hermitian by construction.
    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            mat: CMatrix::zeros(d, d),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = CVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            mat: CMatrix::from_diagonal(&v),
        }
    }

    /// The rank-one operator `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &CVector) -> Self {
        Self {
            mat: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.mat.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let diff = self.mat[(i, j)] - self.mat[(j, i)].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.mat, &self.mat)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.map(|z| z * factor),
        }
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        spectral(&self.mat).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Hilbert–Schmidt product `Tr[a·b]`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_product(&a.mat, &b.mat))
}

/// Real part of `Tr[a·b]` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
        );
        &self.eigenvectors * CMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }

    /// Frobenius distance of `V†V` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.eigenvectors.ncols();
        (self.eigenvectors.adjoint() * &self.eigenvectors - CMatrix::identity(n, n)).norm()
    }
}

pub fn eig_hermitian(a: &HermitianOperator, tol_herm: f64) -> Result<SpectralDecomposition> {
    let residual = a.hermiticity_residual();
    if residual > tol_herm {
        return Err(Error::NotHermitian { residual });
    }
    Ok(spectral(&a.mat))
}

fn spectral(mat: &CMatrix) -> SpectralDecomposition {
    let sym = (mat + mat.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(mat.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigen-decomposition of a real symmetric matrix, sorted descending.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Moore–Penrose pseudo-inverse of a real symmetric PSD matrix, together with
/// the spectral data it was built from.
#[derive(Debug, Clone)]
pub struct PinvFactorization {
    pub rank: usize,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal basis of the range, one column per retained eigenvalue.
    pub range_basis: DMatrix<f64>,
    pub pinv: DMatrix<f64>,
    pub range_projector: DMatrix<f64>,
}

impl PinvFactorization {
    pub fn dim(&self) -> usize {
        self.pinv.nrows()
    }

    /// `vᵀ M⁺ v`, evaluated in the eigenbasis.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        let coeffs = self.range_basis.tr_mul(v);
        coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * c / l)
            .sum()
    }

    /// `vᵀ M v` restricted to the retained spectrum.
    pub fn forward_form(&self, v: &DVector<f64>) -> f64 {
        let coeffs = self.range_basis.tr_mul(v);
        coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * c * l)
            .sum::<f64>()
            .max(0.0)
    }

    /// Component of `v` orthogonal to the range.
    pub fn off_range(&self, v: &DVector<f64>) -> DVector<f64> {
        v - &self.range_basis * self.range_basis.tr_mul(v)
    }

    pub fn range_residual(&self, v: &DVector<f64>) -> f64 {
        self.off_range(v).norm()
    }

    /// Largest Frobenius residual among the four Penrose identities.
    pub fn penrose_residual(&self, m: &DMatrix<f64>) -> f64 {
        let p = &self.pinv;
        let mp = m * p;
        let pm = p * m;
        [
            (&mp * m - m).norm(),
            (&pm * p - p).norm(),
            (&mp - mp.transpose()).norm(),
            (&pm - pm.transpose()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Largest Frobenius residual of idempotence and symmetry of the range projector.
    pub fn projector_residual(&self) -> f64 {
        let p = &self.range_projector;
        ((p * p) - p).norm().max((p - p.transpose()).norm())
    }
}

/// Pseudo-inverse of a symmetric PSD (Gram-type) matrix.
///
/// Eigenvalues below `rel_tol·λ_max` count as zero. A negative eigenvalue
/// beyond `-rel_tol·λ_max` means the input is not a Gram matrix.
pub fn pinv_gram(m: &DMatrix<f64>, rel_tol: f64) -> Result<PinvFactorization> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("rank cutoff must be positive, got {rel_tol}")));
    }
    let scale = m.amax().max(1.0);
    let residual = symmetry_residual(m);
    if residual > 1e-10 * scale {
        return Err(Error::Asymmetric { residual });
    }
    let n = m.nrows();
    let (values, vectors) = symmetric_eigen_sorted(m);
    let spectral_scale = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let cutoff = rel_tol * spectral_scale;
    if let Some(&lowest) = values.last() {
        if lowest < -cutoff {
            return Err(Error::NotPsd {
                min_eigenvalue: lowest,
            });
        }
    }
    let rank = if spectral_scale == 0.0 {
        0
    } else {
        values.iter().take_while(|&&x| x > cutoff).count()
    };
    let range_basis = vectors.columns(0, rank).into_owned();
    let eigenvalues: Vec<f64> = values[..rank].to_vec();
    let mut pinv = DMatrix::zeros(n, n);
    let mut range_projector = DMatrix::zeros(n, n);
    for (k, &l) in eigenvalues.iter().enumerate() {
        let col = range_basis.column(k);
        let outer = col * col.transpose();
        pinv += &outer / l;
        range_projector += outer;
    }
    Ok(PinvFactorization {
        rank,
        eigenvalues,
        range_basis,
        pinv,
        range_projector,
    })
}

/// Principal square root of a symmetric PSD matrix. Round-off negative
/// eigenvalues down to `-tol_psd` are clamped to zero.
pub fn sqrt_psd(m: &DMatrix<f64>, tol_psd: f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let (values, vectors) = symmetric_eigen_sorted(m);
    if let Some(&lowest) = values.last() {
        if lowest < -tol_psd {
            return Err(Error::NotPsd {
                min_eigenvalue: lowest,
            });
        }
    }
    let roots = DVector::from_iterator(values.len(), values.iter().map(|&x| x.max(0.0).sqrt()));
    Ok(&vectors * DMatrix::from_diagonal(&roots) * vectors.transpose())
}
