//! Parameter sets for the four families, the slant/shape conversion maps,
//! and the JSON wire format.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkewError};
use crate::spd::SpdMatrix;

/// The four model families. Codes double as CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Vector-slant skew-normal.
    ClassicalSn,
    /// Diagonal-matrix-skewed skew-normal.
    SdbSn,
    /// Vector-slant skew-t.
    ClassicalSt,
    /// Diagonal-matrix-skewed skew-t.
    SdbSt,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::ClassicalSn,
        Family::SdbSn,
        Family::ClassicalSt,
        Family::SdbSt,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Family::ClassicalSn => "csn",
            Family::SdbSn => "ssn",
            Family::ClassicalSt => "cst",
            Family::SdbSt => "sst",
        }
    }

    pub fn from_code(code: &str) -> Result<Family> {
        match code {
            "csn" => Ok(Family::ClassicalSn),
            "ssn" => Ok(Family::SdbSn),
            "cst" => Ok(Family::ClassicalSt),
            "sst" => Ok(Family::SdbSt),
            other => Err(SkewError::InvalidParameter(format!(
                "unknown family code {other:?}, expected csn|ssn|cst|sst"
            ))),
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, Family::ClassicalSn | Family::ClassicalSt)
    }

    pub fn has_nu(self) -> bool {
        matches!(self, Family::ClassicalSt | Family::SdbSt)
    }

    /// Skew-normal counterpart (identity on SN families).
    pub fn without_nu(self) -> Family {
        match self {
            Family::ClassicalSt => Family::ClassicalSn,
            Family::SdbSt => Family::SdbSn,
            f => f,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Free parameters of one component: 2d for location and slant, d(d+1)/2 for
/// the scale matrix, plus one for ν when present. Identical across the two
/// formulations.
pub fn param_count(family: Family, d: usize) -> usize {
    2 * d + d * (d + 1) / 2 + usize::from(family.has_nu())
}

fn check_nu_opt(nu: Option<f64>) -> Result<()> {
    if let Some(v) = nu {
        if !(v > 0.0) || !v.is_finite() {
            return Err(SkewError::InvalidParameter(format!(
                "degrees of freedom must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// Location/scale/slant parameters of the vector-slant families.
#[derive(Debug, Clone)]
pub struct ClassicalParams {
    xi: DVector<f64>,
    omega: SpdMatrix,
    alpha: DVector<f64>,
    nu: Option<f64>,
    // Derived quantities, cached at validation time.
    omega_diag_sqrt: DVector<f64>,
    omega_bar: SpdMatrix,
    eta: DVector<f64>,
}

impl ClassicalParams {
    pub fn new(
        xi: DVector<f64>,
        omega: SpdMatrix,
        alpha: DVector<f64>,
        nu: Option<f64>,
    ) -> Result<Self> {
        let d = omega.dim();
        if xi.len() != d {
            return Err(SkewError::DimensionMismatch {
                expected: d,
                actual: xi.len(),
            });
        }
        if alpha.len() != d {
            return Err(SkewError::DimensionMismatch {
                expected: d,
                actual: alpha.len(),
            });
        }
        check_nu_opt(nu)?;
        if xi.iter().chain(alpha.iter()).any(|v| !v.is_finite()) {
            return Err(SkewError::InvalidParameter(
                "location and slant entries must be finite".into(),
            ));
        }
        let (omega_bar, omega_diag_sqrt) = omega.to_correlation();
        if !omega_bar.is_correlation(1e-12) {
            return Err(SkewError::InvalidParameter(
                "scale matrix does not standardize to a correlation matrix".into(),
            ));
        }
        let eta = DVector::from_fn(d, |i, _| alpha[i] / omega_diag_sqrt[i]);
        Ok(ClassicalParams {
            xi,
            omega,
            alpha,
            nu,
            omega_diag_sqrt,
            omega_bar,
            eta,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }
    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }
    pub fn omega(&self) -> &SpdMatrix {
        &self.omega
    }
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }
    pub fn nu(&self) -> Option<f64> {
        self.nu
    }
    /// ω: componentwise scale, √diag(Ω).
    pub fn scale_diag(&self) -> &DVector<f64> {
        &self.omega_diag_sqrt
    }
    /// Ω̄ = ω⁻¹ Ω ω⁻¹.
    pub fn omega_bar(&self) -> &SpdMatrix {
        &self.omega_bar
    }
    /// ω⁻¹α, so the skewing argument is ηᵀ(x − ξ).
    pub fn eta(&self) -> &DVector<f64> {
        &self.eta
    }

    pub fn family(&self) -> Family {
        if self.nu.is_some() {
            Family::ClassicalSt
        } else {
            Family::ClassicalSn
        }
    }
}

/// Location/scale/slant parameters of the diagonal-matrix-skewed families.
#[derive(Debug, Clone)]
pub struct SdbParams {
    xi: DVector<f64>,
    delta_mat: SpdMatrix,
    lambda: DVector<f64>,
    nu: Option<f64>,
    // Derived quantities, cached at validation time.
    omega_sum: SpdMatrix,
    skew_coef: DMatrix<f64>,
    skew_scale: SpdMatrix,
}

impl SdbParams {
    pub fn new(
        xi: DVector<f64>,
        delta_mat: SpdMatrix,
        lambda: DVector<f64>,
        nu: Option<f64>,
    ) -> Result<Self> {
        let d = delta_mat.dim();
        if xi.len() != d {
            return Err(SkewError::DimensionMismatch {
                expected: d,
                actual: xi.len(),
            });
        }
        if lambda.len() != d {
            return Err(SkewError::DimensionMismatch {
                expected: d,
                actual: lambda.len(),
            });
        }
        check_nu_opt(nu)?;
        if xi.iter().chain(lambda.iter()).any(|v| !v.is_finite()) {
            return Err(SkewError::InvalidParameter(
                "location and slant entries must be finite".into(),
            ));
        }
        // Δ + Λ² and the skewing-factor scale I − Λ(Δ+Λ²)⁻¹Λ; both are
        // positive definite whenever Δ is, but the constructors re-check.
        let mut sum = delta_mat.mat().clone();
        for i in 0..d {
            sum[(i, i)] += lambda[i] * lambda[i];
        }
        let omega_sum = SpdMatrix::new(sum)?;
        let inv = omega_sum.inverse();
        let skew_coef = DMatrix::from_fn(d, d, |i, j| lambda[i] * inv[(i, j)]);
        let skew_scale = SpdMatrix::new(DMatrix::from_fn(d, d, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            base - lambda[i] * inv[(i, j)] * lambda[j]
        }))?;
        Ok(SdbParams {
            xi,
            delta_mat,
            lambda,
            nu,
            omega_sum,
            skew_coef,
            skew_scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.delta_mat.dim()
    }
    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }
    pub fn delta_mat(&self) -> &SpdMatrix {
        &self.delta_mat
    }
    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }
    pub fn nu(&self) -> Option<f64> {
        self.nu
    }
    /// Δ + Λ²: the scale of the symmetric density factor.
    pub fn omega_sum(&self) -> &SpdMatrix {
        &self.omega_sum
    }
    /// Λ(Δ+Λ²)⁻¹: maps x − ξ to the skewing-factor argument.
    pub fn skew_coef(&self) -> &DMatrix<f64> {
        &self.skew_coef
    }
    /// I − Λ(Δ+Λ²)⁻¹Λ: scale of the skewing factor.
    pub fn skew_scale(&self) -> &SpdMatrix {
        &self.skew_scale
    }

    pub fn family(&self) -> Family {
        if self.nu.is_some() {
            Family::SdbSt
        } else {
            Family::SdbSn
        }
    }
}

/// Componentwise shape vector δ with every entry strictly inside (−1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaVector(DVector<f64>);

impl DeltaVector {
    pub fn new(entries: DVector<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite() || v.abs() >= 1.0) {
            return Err(SkewError::InvalidParameter(
                "shape entries must lie strictly inside (-1, 1)".into(),
            ));
        }
        Ok(DeltaVector(entries))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }
}

/// δ = Ω̄α / √(1 + αᵀΩ̄α): always feasible for the given Ω̄.
pub fn alpha_to_delta(alpha: &DVector<f64>, omega_bar: &SpdMatrix) -> Result<DeltaVector> {
    let d = omega_bar.dim();
    if alpha.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: alpha.len(),
        });
    }
    let oa = omega_bar.mat() * alpha;
    let denom = (1.0 + alpha.dot(&oa)).sqrt();
    DeltaVector::new(oa / denom)
}

/// α = Ω̄⁻¹δ / √(1 − δᵀΩ̄⁻¹δ); requires δᵀΩ̄⁻¹δ < 1, which is exactly
/// positive definiteness of the extended correlation matrix [[Ω̄, δ],[δᵀ, 1]].
pub fn delta_to_alpha(delta: &DeltaVector, omega_bar: &SpdMatrix) -> Result<DVector<f64>> {
    let d = omega_bar.dim();
    if delta.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: delta.len(),
        });
    }
    let od = omega_bar.solve(delta.as_vector());
    let q = delta.as_vector().dot(&od);
    if q >= 1.0 {
        return Err(SkewError::InvalidParameter(format!(
            "shape vector infeasible for this correlation matrix (quadratic form {q:.6} >= 1)"
        )));
    }
    Ok(od / (1.0 - q).sqrt())
}

/// A parameter set of any family.
#[derive(Debug, Clone)]
pub enum ParamSet {
    Classical(ClassicalParams),
    Sdb(SdbParams),
}

impl ParamSet {
    pub fn family(&self) -> Family {
        match self {
            ParamSet::Classical(p) => p.family(),
            ParamSet::Sdb(p) => p.family(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ParamSet::Classical(p) => p.dim(),
            ParamSet::Sdb(p) => p.dim(),
        }
    }

    pub fn xi(&self) -> &DVector<f64> {
        match self {
            ParamSet::Classical(p) => p.xi(),
            ParamSet::Sdb(p) => p.xi(),
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self {
            ParamSet::Classical(p) => p.nu(),
            ParamSet::Sdb(p) => p.nu(),
        }
    }

    pub fn to_record(&self) -> ParamRecord {
        match self {
            ParamSet::Classical(p) => ParamRecord {
                family: p.family().code().to_string(),
                xi: p.xi().iter().copied().collect(),
                scale: p.omega().row_major(),
                slant: p.alpha().iter().copied().collect(),
                nu: p.nu(),
            },
            ParamSet::Sdb(p) => ParamRecord {
                family: p.family().code().to_string(),
                xi: p.xi().iter().copied().collect(),
                scale: p.delta_mat().row_major(),
                slant: p.lambda().iter().copied().collect(),
                nu: p.nu(),
            },
        }
    }

    pub fn from_record(rec: &ParamRecord) -> Result<ParamSet> {
        let family = Family::from_code(&rec.family)?;
        if family.has_nu() != rec.nu.is_some() {
            return Err(SkewError::InvalidParameter(format!(
                "family {} and presence of nu disagree",
                rec.family
            )));
        }
        let xi = DVector::from_vec(rec.xi.clone());
        let slant = DVector::from_vec(rec.slant.clone());
        let scale = SpdMatrix::from_rows(&rec.scale)?;
        if family.is_classical() {
            Ok(ParamSet::Classical(ClassicalParams::new(
                xi, scale, slant, rec.nu,
            )?))
        } else {
            Ok(ParamSet::Sdb(SdbParams::new(xi, scale, slant, rec.nu)?))
        }
    }
}

/// JSON wire format: {family, xi, scale, slant, nu?}, scale row-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamRecord {
    pub family: String,
    pub xi: Vec<f64>,
    pub scale: Vec<Vec<f64>>,
    pub slant: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}
