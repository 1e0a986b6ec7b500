//! Symmetric positive-definite matrices with a cached Cholesky factor.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkewError};

const SYM_RTOL: f64 = 1e-12;
const RECONSTRUCT_RTOL: f64 = 1e-10;

/// A validated symmetric positive-definite matrix.
///
/// Construction checks symmetry, runs the Cholesky factorization once and
/// keeps the lower factor, and verifies that `L Lᵀ` reproduces the input.
/// All downstream solves, determinants and quadratic forms reuse the factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    mat: DMatrix<f64>,
    chol_l: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let dim = mat.nrows();
        if dim == 0 || mat.ncols() != dim {
            return Err(SkewError::InvalidParameter(format!(
                "expected a square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(SkewError::InvalidParameter(
                "matrix contains non-finite entries".into(),
            ));
        }
        let scale = mat.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (mat[(i, j)] - mat[(j, i)]).abs() > SYM_RTOL * scale {
                    return Err(SkewError::NotSymmetric);
                }
            }
        }
        // Symmetrize exactly so the factorization sees a clean input.
        let mut sym = mat.clone();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = 0.5 * (mat[(i, j)] + mat[(j, i)]);
                sym[(i, j)] = v;
                sym[(j, i)] = v;
            }
        }
        let chol = nalgebra::Cholesky::new(sym.clone()).ok_or(SkewError::NotPositiveDefinite)?;
        let chol_l = chol.unpack();
        if chol_l.diagonal().iter().any(|&d| !(d > 0.0)) {
            return Err(SkewError::NotPositiveDefinite);
        }
        let recon = &chol_l * chol_l.transpose();
        let err = (&recon - &sym)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if err > RECONSTRUCT_RTOL * scale {
            return Err(SkewError::NotPositiveDefinite);
        }
        Ok(Self {
            dim,
            mat: sym,
            chol_l,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(SkewError::InvalidParameter(
                "row-major matrix is not square".into(),
            ));
        }
        let mat = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Self::new(mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is SPD")
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Lower-triangular Cholesky factor `L` with `L Lᵀ = Σ`.
    pub fn chol_l(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * self.chol_l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Solves `L y = v` (forward substitution).
    pub fn solve_lower(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut y = v.clone();
        self.chol_l.solve_lower_triangular_mut(&mut y);
        y
    }

    /// Solves `Σ x = v` via the two triangular solves.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut y = v.clone();
        self.chol_l.solve_lower_triangular_mut(&mut y);
        self.chol_l.tr_solve_lower_triangular_mut(&mut y);
        y
    }

    /// Quadratic form `vᵀ Σ⁻¹ v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        self.solve_lower(v).norm_squared()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let mut inv = DMatrix::identity(self.dim, self.dim);
        for j in 0..self.dim {
            let mut col = inv.column(j).into_owned();
            self.chol_l.solve_lower_triangular_mut(&mut col);
            self.chol_l.tr_solve_lower_triangular_mut(&mut col);
            inv.set_column(j, &col);
        }
        // Clean up rounding asymmetry.
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        inv
    }

    /// Splits `Σ` into its correlation matrix and the vector of scale roots
    /// `ω_i = √Σ_ii`.
    pub fn to_correlation(&self) -> (SpdMatrix, DVector<f64>) {
        let sd = DVector::from_fn(self.dim, |i, _| self.mat[(i, i)].sqrt());
        let mut corr = self.mat.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                corr[(i, j)] /= sd[i] * sd[j];
            }
        }
        for i in 0..self.dim {
            corr[(i, i)] = 1.0;
        }
        let corr = SpdMatrix::new(corr).expect("correlation of an SPD matrix is SPD");
        (corr, sd)
    }

    /// True when every diagonal entry equals one to within `tol`.
    pub fn is_correlation(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (self.mat[(i, i)] - 1.0).abs() <= tol)
    }

    pub fn row_major(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }
}

impl Serialize for SpdMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_major().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SpdMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
