//! Closed-form cumulants and multivariate (Mardia) skewness/kurtosis for
//! both skew-normal formulations, a sample-based estimator of the same
//! statistics, the univariate skew-t skewness, and a numerical search for
//! the extremal values attainable by the diagonal-skew family.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SkewError};
use crate::optim::{minimize, NelderMead, OptimOutcome};
use crate::params::{alpha_to_delta, ClassicalParams, SdbParams};
use crate::special::zeta;
use crate::spd::SpdMatrix;

/// √(2/π), the half-normal mean.
fn half_normal_mean() -> f64 {
    (2.0 / PI).sqrt()
}

/// Mean, covariance, and the nonzero higher cumulants.
#[derive(Debug, Clone)]
pub struct CumulantSet {
    pub mean: DVector<f64>,
    pub covariance: SpdMatrix,
    pub third: Vec<([usize; 3], f64)>,
    pub fourth: Vec<([usize; 4], f64)>,
}

/// Mardia multivariate skewness γ₁ and excess kurtosis γ₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MardiaPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Least upper bound of Mardia skewness over the classical family.
pub fn classical_sup_skewness() -> f64 {
    2.0 * (4.0 - PI).powi(2) / (PI - 2.0).powi(3)
}

/// Least upper bound of Mardia excess kurtosis over the classical family.
pub fn classical_sup_kurtosis() -> f64 {
    8.0 * (PI - 3.0) / (PI - 2.0).powi(2)
}

fn require_sn(nu: Option<f64>, what: &str) -> Result<()> {
    match nu {
        Some(_) => Err(SkewError::InvalidParameter(format!(
            "{what} is defined for the skew-normal family only"
        ))),
        None => Ok(()),
    }
}

/// Cumulants of the diagonal-skew skew-normal. Third and fourth cumulants
/// vanish off the diagonal index tuples, so only those are listed.
pub fn sdb_cumulants(p: &SdbParams) -> Result<CumulantSet> {
    require_sn(p.nu(), "cumulant evaluation")?;
    let d = p.dim();
    let b = half_normal_mean();
    let mean = p.xi() + p.lambda() * b;
    let mut cov = p.delta_mat().mat().clone();
    for i in 0..d {
        cov[(i, i)] += (1.0 - 2.0 / PI) * p.lambda()[i].powi(2);
    }
    let z3 = zeta(3, 0.0)?;
    let z4 = zeta(4, 0.0)?;
    let third = (0..d)
        .map(|r| ([r, r, r], z3 * p.lambda()[r].powi(3)))
        .collect();
    let fourth = (0..d)
        .map(|r| ([r, r, r, r], z4 * p.lambda()[r].powi(4)))
        .collect();
    Ok(CumulantSet {
        mean,
        covariance: SpdMatrix::new(cov)?,
        third,
        fourth,
    })
}

/// Mardia skewness and excess kurtosis of the diagonal-skew skew-normal:
/// quadratic forms of the cubed mean-shift vector in elementwise powers of
/// the inverse covariance.
pub fn sdb_mardia(p: &SdbParams) -> Result<MardiaPair> {
    let cs = sdb_cumulants(p)?;
    let d = p.dim();
    let inv = cs.covariance.inverse();
    let b = half_normal_mean();
    let mu: Vec<f64> = (0..d).map(|j| b * p.lambda()[j]).collect();
    let c3 = ((4.0 - PI) / 2.0).powi(2);
    let mut gamma1 = 0.0;
    for u in 0..d {
        for v in 0..d {
            gamma1 += mu[u].powi(3) * mu[v].powi(3) * inv[(u, v)].powi(3);
        }
    }
    gamma1 *= c3;
    let mut gamma2 = 0.0;
    for u in 0..d {
        gamma2 += mu[u].powi(4) * inv[(u, u)].powi(2);
    }
    gamma2 *= 2.0 * (PI - 3.0);
    Ok(MardiaPair { gamma1, gamma2 })
}

/// Mean and covariance of the classical skew-normal.
pub fn classical_mean_cov(p: &ClassicalParams) -> Result<(DVector<f64>, DMatrix<f64>)> {
    require_sn(p.nu(), "mean/covariance evaluation")?;
    let b = half_normal_mean();
    let delta = alpha_to_delta(p.alpha(), p.omega_bar())?;
    let shift = p.scale_diag().component_mul(delta.as_vector());
    let mean = p.xi() + &shift * b;
    let cov = p.omega().mat() - &shift * shift.transpose() * (b * b);
    Ok((mean, cov))
}

/// Mardia skewness and excess kurtosis of the classical skew-normal. Both
/// depend on the parameters only through the scalar q = b²δᵀΩ̄⁻¹δ/(1−b²δᵀΩ̄⁻¹δ).
pub fn classical_mardia(p: &ClassicalParams) -> Result<MardiaPair> {
    require_sn(p.nu(), "Mardia evaluation")?;
    let delta = alpha_to_delta(p.alpha(), p.omega_bar())?;
    let s = p.omega_bar().quad_form(delta.as_vector());
    let b2 = 2.0 / PI;
    let q = b2 * s / (1.0 - b2 * s);
    Ok(MardiaPair {
        gamma1: ((4.0 - PI) / 2.0).powi(2) * q.powi(3),
        gamma2: 2.0 * (PI - 3.0) * q * q,
    })
}

/// Marginal skewness of the scalar classical skew-t. Defined for ν > 3.
pub fn classical_st_skewness(alpha: f64, nu: f64) -> Result<f64> {
    if !alpha.is_finite() || !nu.is_finite() {
        return Err(SkewError::InvalidParameter(
            "slant and degrees of freedom must be finite".into(),
        ));
    }
    if nu <= 3.0 {
        return Err(SkewError::UndefinedMoment(format!(
            "third moment requires nu > 3, got {nu}"
        )));
    }
    let delta = alpha / (1.0 + alpha * alpha).sqrt();
    let b_nu = (nu / PI).sqrt() * (ln_gamma((nu - 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp();
    let mu = b_nu * delta;
    let var = nu / (nu - 2.0) - mu * mu;
    let third =
        mu * (nu * (3.0 - delta * delta) / (nu - 3.0) - 3.0 * nu / (nu - 2.0) + 2.0 * mu * mu);
    Ok(third / var.powf(1.5))
}

/// Mardia statistics from data (rows are observations): b₁ via the third
/// standardized moment tensor (avoids the n² pairwise form) and b₂ minus
/// d(d+2) so both entries are comparable to the closed forms.
pub fn mardia_from_sample(data: &DMatrix<f64>) -> Result<MardiaPair> {
    let n = data.nrows();
    let d = data.ncols();
    if n < d + 2 {
        return Err(SkewError::InvalidParameter(format!(
            "need at least {} rows for dimension {d}, got {n}",
            d + 2
        )));
    }
    let mean = DVector::from_fn(d, |j, _| data.column(j).sum() / n as f64);
    let mut s = DMatrix::zeros(d, d);
    let mut centered = DVector::zeros(d);
    for r in 0..n {
        for j in 0..d {
            centered[j] = data[(r, j)] - mean[j];
        }
        s.syger(1.0, &centered, &centered, 1.0);
    }
    s.fill_upper_triangle_with_lower_triangle();
    s /= n as f64;
    let s = SpdMatrix::new(s)?;

    let mut third = vec![0.0; d * d * d];
    let mut b2 = 0.0;
    let mut y = DVector::zeros(d);
    for r in 0..n {
        for j in 0..d {
            y[j] = data[(r, j)] - mean[j];
        }
        let z = s.solve_lower(&y);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    third[(a * d + b) * d + c] += z[a] * z[b] * z[c];
                }
            }
        }
        b2 += z.norm_squared().powi(2);
    }
    let gamma1 = third
        .iter()
        .map(|t| (t / n as f64).powi(2))
        .sum::<f64>();
    let gamma2 = b2 / n as f64 - (d * (d + 2)) as f64;
    Ok(MardiaPair { gamma1, gamma2 })
}

/// Which Mardia statistic a search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MardiaObjective {
    Skewness,
    Kurtosis,
}

/// Controls for `maximize_sdb_mardia`. When `fixed_delta` is set, only the
/// slant is searched.
#[derive(Debug, Clone, Default)]
pub struct MardiaSearchConfig {
    pub fixed_delta: Option<SpdMatrix>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MardiaMaxResult {
    pub which: MardiaObjective,
    pub d: usize,
    pub max_value: f64,
    pub argmax_lambda: Vec<f64>,
    pub argmax_delta: Vec<Vec<f64>>,
    pub sign_pattern: Vec<i8>,
    pub n_starts: usize,
    pub converged: bool,
}

const MAX_SEARCH_DIM: usize = 4;
/// Slant magnitudes are searched as exp(t) with t capped at ln(1e6); the
/// objective saturates well before the cap.
const LOG_SLANT_CAP: f64 = 13.815510557964274;

fn decode_search_point(
    x: &[f64],
    signs: &[f64],
    d: usize,
    fixed_delta: &Option<SpdMatrix>,
) -> Option<(DVector<f64>, SpdMatrix)> {
    let lambda = DVector::from_fn(d, |j, _| {
        signs[j] * x[j].clamp(-LOG_SLANT_CAP, LOG_SLANT_CAP).exp()
    });
    let delta = match fixed_delta {
        Some(m) => m.clone(),
        None => {
            let mut l = DMatrix::zeros(d, d);
            let mut k = d;
            for i in 0..d {
                for j in 0..=i {
                    if i == j {
                        l[(i, j)] = x[k].clamp(-5.0, 5.0).exp();
                    } else {
                        l[(i, j)] = x[k].clamp(-50.0, 50.0);
                    }
                    k += 1;
                }
            }
            SpdMatrix::new(&l * l.transpose()).ok()?
        }
    };
    Some((lambda, delta))
}

/// Multi-start simplex search for the largest Mardia statistic attainable by
/// the diagonal-skew skew-normal at dimension `d`. Starts cover every sign
/// pattern of the slant crossed with a log grid of initial magnitudes up to
/// 1e6. A best value found by a run that hit its iteration cap is still
/// returned, flagged through `converged`.
pub fn maximize_sdb_mardia(
    d: usize,
    which: MardiaObjective,
    cfg: &MardiaSearchConfig,
) -> Result<MardiaMaxResult> {
    if d == 0 || d > MAX_SEARCH_DIM {
        return Err(SkewError::UnsupportedDimension {
            dim: d,
            max: MAX_SEARCH_DIM,
        });
    }
    if let Some(m) = &cfg.fixed_delta {
        if m.dim() != d {
            return Err(SkewError::DimensionMismatch {
                expected: d,
                actual: m.dim(),
            });
        }
    }
    let nm = NelderMead {
        max_iter: cfg.max_iter.unwrap_or(1200),
        f_tol: 1e-9,
        init_step: 0.5,
    };
    let n_free = d + if cfg.fixed_delta.is_some() {
        0
    } else {
        d * (d + 1) / 2
    };

    let mut best: Option<(OptimOutcome, Vec<f64>)> = None;
    let mut n_starts = 0;
    for pattern in 0..(1usize << d) {
        let signs: Vec<f64> = (0..d)
            .map(|j| if pattern >> j & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let mut objective = |x: &[f64]| -> f64 {
            match decode_search_point(x, &signs, d, &cfg.fixed_delta) {
                Some((lambda, delta)) => {
                    match SdbParams::new(DVector::zeros(d), delta, lambda, None)
                        .and_then(|p| sdb_mardia(&p))
                    {
                        Ok(pair) => match which {
                            MardiaObjective::Skewness => -pair.gamma1,
                            MardiaObjective::Kurtosis => -pair.gamma2,
                        },
                        Err(_) => f64::INFINITY,
                    }
                }
                None => f64::INFINITY,
            }
        };
        for h0 in [1.0f64, 10.0, 1e3, 1e6] {
            n_starts += 1;
            let mut x0 = vec![0.0; n_free];
            for j in 0..d {
                x0[j] = h0.ln();
            }
            let out = minimize(&mut objective, &x0, &nm);
            let better = match &best {
                None => true,
                Some((b, _)) => out.value < b.value,
            };
            if better {
                best = Some((out, signs.clone()));
            }
        }
    }

    let (out, signs) = best.unwrap();
    let (lambda, delta) = decode_search_point(&out.x, &signs, d, &cfg.fixed_delta)
        .expect("winning point must decode");
    Ok(MardiaMaxResult {
        which,
        d,
        max_value: -out.value,
        argmax_lambda: lambda.iter().copied().collect(),
        argmax_delta: (0..d)
            .map(|i| (0..d).map(|j| delta.mat()[(i, j)]).collect())
            .collect(),
        sign_pattern: lambda.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect(),
        n_starts,
        converged: out.converged,
    })
}
