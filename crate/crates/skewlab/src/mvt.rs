//! Multivariate Student-t density and rectangle probabilities.
//!
//! The univariate distribution function goes through the regularized
//! incomplete beta; the multivariate one integrates the normal rectangle
//! probability against the chi distribution of the mixing radius.

use nalgebra::DVector;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SkewError};
use crate::mvn::{mvn_cdf, QuadratureConfig, MAX_CDF_DIM};
use crate::special::integrate_gl;
use crate::spd::SpdMatrix;

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(SkewError::InvalidParameter(format!(
            "degrees of freedom must be positive and finite, got {nu}"
        )));
    }
    Ok(())
}

/// log of the d-dimensional Student-t density with scale Σ and ν df at x.
pub fn ln_mvt_pdf(x: &DVector<f64>, sigma: &SpdMatrix, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let d = sigma.dim();
    if x.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: x.len(),
        });
    }
    let df = d as f64;
    let q = sigma.quad_form(x);
    Ok(ln_gamma(0.5 * (nu + df))
        - ln_gamma(0.5 * nu)
        - 0.5 * df * (nu * std::f64::consts::PI).ln()
        - 0.5 * sigma.ln_det()
        - 0.5 * (nu + df) * (q / nu).ln_1p())
}

/// d-dimensional Student-t density.
pub fn mvt_pdf(x: &DVector<f64>, sigma: &SpdMatrix, nu: f64) -> Result<f64> {
    Ok(ln_mvt_pdf(x, sigma, nu)?.exp())
}

/// Univariate Student-t distribution function.
pub fn t_cdf(x: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    let z = nu / (nu + x * x);
    let half_tail = 0.5 * beta_reg(0.5 * nu, 0.5, z);
    Ok(if x < 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Mean of the chi distribution with ν degrees of freedom.
fn chi_mean(nu: f64) -> f64 {
    std::f64::consts::SQRT_2 * (ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu)).exp()
}

/// P(X ≤ upper componentwise) for X ∼ t_d(0, Σ, ν), d ≤ 6.
///
/// X = Z √ν / S with S ∼ χ_ν, so the probability is the expectation of the
/// normal rectangle probability at scaled limits over the chi density. The
/// radial integral uses panel doubling; for ν < 2 the substitution
/// s = t^(2/ν) removes the s^(ν−1) endpoint singularity.
pub fn mvt_cdf(
    upper: &DVector<f64>,
    sigma: &SpdMatrix,
    nu: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_nu(nu)?;
    cfg.validate()?;
    let d = sigma.dim();
    if upper.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: upper.len(),
        });
    }
    if d > MAX_CDF_DIM {
        return Err(SkewError::UnsupportedDimension {
            dim: d,
            max: MAX_CDF_DIM,
        });
    }
    let inner_cfg = QuadratureConfig {
        abs_tol: 0.25 * cfg.abs_tol,
        ..*cfg
    };
    let ln_c = (1.0 - 0.5 * nu) * std::f64::consts::LN_2 - ln_gamma(0.5 * nu);
    let sqrt_nu = nu.sqrt();
    let mu = chi_mean(nu);
    let sd = (nu - mu * mu).max(0.0625).sqrt();
    let s_hi = mu + 14.0 * sd;
    // Φ_d at the scaled limits; failures inside the integrand surface after
    // integration through a captured slot.
    let fail: std::cell::RefCell<Option<SkewError>> = std::cell::RefCell::new(None);
    let phi_at = |s: f64| -> f64 {
        let scaled = upper.map(|b| b * s / sqrt_nu);
        match mvn_cdf(&scaled, sigma, &inner_cfg) {
            Ok(p) => p,
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let integral = if nu >= 2.0 {
        let s_lo = (mu - 14.0 * sd).max(1e-12);
        let f = |s: f64| (ln_c + (nu - 1.0) * s.ln() - 0.5 * s * s).exp() * phi_at(s);
        doubling_integral(&f, s_lo, s_hi, cfg)?
    } else {
        // t = s^(ν/2): the weight s^(ν−1) ds becomes (2/ν) t dt.
        let t_hi = s_hi.powf(0.5 * nu);
        let f = |t: f64| {
            let s = t.powf(2.0 / nu);
            (ln_c - 0.5 * s * s).exp() * (2.0 / nu) * t * phi_at(s)
        };
        doubling_integral(&f, 0.0, t_hi, cfg)?
    };
    if let Some(e) = fail.into_inner() {
        return Err(e);
    }
    Ok(integral.clamp(0.0, 1.0))
}

/// Composite Gauss–Legendre with panel doubling until successive estimates
/// agree within half the requested tolerance.
fn doubling_integral<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let order = 16;
    let mut panels = 8usize;
    let mut prev = integrate_gl(f, lo, hi, panels, order);
    let mut used = panels * order;
    loop {
        panels *= 2;
        let next = integrate_gl(f, lo, hi, panels, order);
        used += panels * order;
        if (next - prev).abs() <= 0.5 * cfg.abs_tol {
            return Ok(next);
        }
        if used > cfg.max_points {
            return Err(SkewError::NonConvergence(format!(
                "radial mixture integral: {used} evaluations without reaching {}",
                cfg.abs_tol
            )));
        }
        prev = next;
    }
}
