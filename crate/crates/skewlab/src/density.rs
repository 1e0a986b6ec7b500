//! Density functions of the four families.
//!
//! Classical densities pay one univariate CDF per evaluation; the
//! diagonal-matrix-skewed ("SDB") densities pay one d-dimensional CDF, which
//! is what the benchmark harness ultimately measures.

use nalgebra::DVector;

use crate::error::{Result, SkewError};
use crate::mvn::{ln_mvn_pdf, mvn_cdf, QuadratureConfig};
use crate::mvt::{ln_mvt_pdf, mvt_cdf, t_cdf};
use crate::params::{ClassicalParams, ParamSet, SdbParams};
use crate::special::ln_norm_cdf;

const LN_2: f64 = std::f64::consts::LN_2;
/// Probabilities are floored here before taking logs; rectangle probabilities
/// below this are outside the quadratures' resolution anyway.
const MIN_PROB: f64 = 1e-300;

/// log density for either classical family (skew-normal when ν is absent).
pub fn ln_classical_pdf(x: &DVector<f64>, p: &ClassicalParams) -> Result<f64> {
    let d = p.dim();
    if x.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: x.len(),
        });
    }
    let centered = x - p.xi();
    let arg = p.eta().dot(&centered);
    match p.nu() {
        None => Ok(LN_2 + ln_mvn_pdf(&centered, p.omega())? + ln_norm_cdf(arg)),
        Some(nu) => {
            let q = p.omega().quad_form(&centered);
            let scaled = arg * ((nu + d as f64) / (nu + q)).sqrt();
            let skew = t_cdf(scaled, nu + d as f64)?.max(MIN_PROB);
            Ok(LN_2 + ln_mvt_pdf(&centered, p.omega(), nu)? + skew.ln())
        }
    }
}

/// log density for either SDB family (skew-normal when ν is absent).
pub fn ln_sdb_pdf(x: &DVector<f64>, p: &SdbParams, cfg: &QuadratureConfig) -> Result<f64> {
    let d = p.dim();
    if x.len() != d {
        return Err(SkewError::DimensionMismatch {
            expected: d,
            actual: x.len(),
        });
    }
    let centered = x - p.xi();
    let arg = p.skew_coef() * &centered;
    match p.nu() {
        None => {
            let ln_skew = if d == 1 {
                // Scalar case has an exact stable tail.
                ln_norm_cdf(arg[0] / p.skew_scale().mat()[(0, 0)].sqrt())
            } else {
                mvn_cdf(&arg, p.skew_scale(), cfg)?.max(MIN_PROB).ln()
            };
            Ok(d as f64 * LN_2 + ln_mvn_pdf(&centered, p.omega_sum())? + ln_skew)
        }
        Some(nu) => {
            let q = p.omega_sum().quad_form(&centered);
            let scale = ((nu + d as f64) / (nu + q)).sqrt();
            let scaled = arg * scale;
            let skew = if d == 1 {
                t_cdf(
                    scaled[0] / p.skew_scale().mat()[(0, 0)].sqrt(),
                    nu + d as f64,
                )?
            } else {
                mvt_cdf(&scaled, p.skew_scale(), nu + d as f64, cfg)?
            };
            Ok(d as f64 * LN_2
                + ln_mvt_pdf(&centered, p.omega_sum(), nu)?
                + skew.max(MIN_PROB).ln())
        }
    }
}

/// log density under any parameter set.
pub fn ln_pdf(x: &DVector<f64>, params: &ParamSet, cfg: &QuadratureConfig) -> Result<f64> {
    match params {
        ParamSet::Classical(p) => ln_classical_pdf(x, p),
        ParamSet::Sdb(p) => ln_sdb_pdf(x, p, cfg),
    }
}

fn require_nu(present: bool, nu: Option<f64>) -> Result<()> {
    match (present, nu) {
        (true, None) => Err(SkewError::InvalidParameter(
            "this family requires degrees of freedom".into(),
        )),
        (false, Some(_)) => Err(SkewError::InvalidParameter(
            "this family does not take degrees of freedom".into(),
        )),
        _ => Ok(()),
    }
}

/// 2·φ_d(x−ξ; Ω)·Φ(αᵀω⁻¹(x−ξ)).
pub fn classical_sn_pdf(x: &DVector<f64>, p: &ClassicalParams) -> Result<f64> {
    require_nu(false, p.nu())?;
    Ok(ln_classical_pdf(x, p)?.exp())
}

/// 2·t_d(x−ξ; Ω, ν)·T₁ at the rescaled skewing argument on ν+d df.
pub fn classical_st_pdf(x: &DVector<f64>, p: &ClassicalParams) -> Result<f64> {
    require_nu(true, p.nu())?;
    Ok(ln_classical_pdf(x, p)?.exp())
}

/// 2^d·φ_d(x−ξ; Δ+Λ²)·Φ_d at Λ(Δ+Λ²)⁻¹(x−ξ).
pub fn sdb_sn_pdf_cfg(
    x: &DVector<f64>,
    p: &SdbParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    require_nu(false, p.nu())?;
    Ok(ln_sdb_pdf(x, p, cfg)?.exp())
}

pub fn sdb_sn_pdf(x: &DVector<f64>, p: &SdbParams) -> Result<f64> {
    sdb_sn_pdf_cfg(x, p, &QuadratureConfig::for_dim(p.dim()))
}

/// 2^d·t_d(x−ξ; Δ+Λ², ν)·T_d at the rescaled skewing argument on ν+d df.
pub fn sdb_st_pdf_cfg(
    x: &DVector<f64>,
    p: &SdbParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    require_nu(true, p.nu())?;
    Ok(ln_sdb_pdf(x, p, cfg)?.exp())
}

pub fn sdb_st_pdf(x: &DVector<f64>, p: &SdbParams) -> Result<f64> {
    sdb_st_pdf_cfg(x, p, &QuadratureConfig::for_dim(p.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvn::mvn_pdf;
    use crate::mvt::mvt_pdf;
    use crate::spd::SpdMatrix;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use statrs::function::gamma::ln_gamma;
    use std::f64::consts::PI;

    fn vecd(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    fn phi_oracle(x: f64) -> f64 {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
    }

    fn classical(xi: &[f64], omega: SpdMatrix, alpha: &[f64], nu: Option<f64>) -> ClassicalParams {
        ClassicalParams::new(vecd(xi), omega, vecd(alpha), nu).unwrap()
    }

    fn sdb(xi: &[f64], delta: SpdMatrix, lambda: &[f64], nu: Option<f64>) -> SdbParams {
        SdbParams::new(vecd(xi), delta, vecd(lambda), nu).unwrap()
    }

    #[test]
    fn classical_sn_zero_slant_is_symmetric_density() {
        let omega = SpdMatrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.5]]).unwrap();
        let p = classical(&[0.3, -0.8], omega.clone(), &[0.0, 0.0], None);
        for x in [[0.0, 0.0], [1.4, -0.5], [-2.0, 3.0]] {
            let want = mvn_pdf(&(vecd(&x) - vecd(&[0.3, -0.8])), &omega).unwrap();
            assert_relative_eq!(
                classical_sn_pdf(&vecd(&x), &p).unwrap(),
                want,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn classical_sn_scalar_origin_value() {
        let p = classical(&[0.0], SpdMatrix::identity(1), &[1.0], None);
        assert_relative_eq!(
            classical_sn_pdf(&vecd(&[0.0]), &p).unwrap(),
            0.3989422804,
            epsilon = 1e-10
        );
    }

    #[test]
    fn classical_sn_bivariate_matches_direct_composition() {
        // Independently composed from the plain normal density and Φ.
        let p = classical(&[0.0, 0.0], SpdMatrix::identity(2), &[2.0, -1.0], None);
        let x = vecd(&[0.5, 0.5]);
        let want = 2.0 * (1.0 / (2.0 * PI)) * (-0.25_f64).exp() * phi_oracle(0.5);
        assert_relative_eq!(
            classical_sn_pdf(&x, &p).unwrap(),
            want,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sdb_sn_zero_slant_is_symmetric_density() {
        let delta = SpdMatrix::from_rows(&[vec![1.2, -0.4], vec![-0.4, 2.0]]).unwrap();
        let p = sdb(&[1.0, 1.0], delta.clone(), &[0.0, 0.0], None);
        for x in [[1.0, 1.0], [0.0, 2.5], [-1.0, -1.0]] {
            let want = mvn_pdf(&(vecd(&x) - vecd(&[1.0, 1.0])), &delta).unwrap();
            assert_relative_eq!(sdb_sn_pdf(&vecd(&x), &p).unwrap(), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn sdb_sn_bivariate_matches_hand_algebra() {
        // Δ = I, λ = (1,1): the skewing factor splits into independent
        // univariate Φ terms because both derived matrices are diagonal.
        let p = sdb(&[0.0, 0.0], SpdMatrix::identity(2), &[1.0, 1.0], None);
        let x = vecd(&[1.0, 0.0]);
        let sym = (1.0 / (2.0 * PI * 2.0)) * (-0.25_f64).exp();
        let skew = phi_oracle(0.5 / 0.5_f64.sqrt()) * phi_oracle(0.0);
        let want = 4.0 * sym * skew;
        assert_relative_eq!(sdb_sn_pdf(&x, &p).unwrap(), want, epsilon = 1e-10);
    }

    #[test]
    fn scalar_families_coincide_under_parameter_map() {
        // d=1 map: Ω = Δ+λ², α = λ/√Δ; both formulations give one density.
        let cases = [
            (1.0, 1.0, 0.0, None),
            (0.5, 2.0, -1.0, None),
            (3.0, -4.0, 2.0, None),
            (1.0, 1.0, 0.0, Some(4.0)),
            (2.0, -1.5, -0.7, Some(2.5)),
            (0.8, 5.0, 1.2, Some(10.0)),
        ];
        for &(delta, lambda, xi, nu) in &cases {
            let sp = sdb(
                &[xi],
                SpdMatrix::from_diagonal(&[delta]).unwrap(),
                &[lambda],
                nu,
            );
            let omega = delta + lambda * lambda;
            let alpha = lambda / delta.sqrt();
            let cp = classical(
                &[xi],
                SpdMatrix::from_diagonal(&[omega]).unwrap(),
                &[alpha],
                nu,
            );
            let mut max_diff = 0.0f64;
            let mut x = xi - 6.0 * omega.sqrt();
            let step = 12.0 * omega.sqrt() / 240.0;
            for _ in 0..=240 {
                let a = ln_classical_pdf(&vecd(&[x]), &cp).unwrap().exp();
                let b = ln_sdb_pdf(
                    &vecd(&[x]),
                    &sp,
                    &QuadratureConfig::for_dim(1),
                )
                .unwrap()
                .exp();
                max_diff = max_diff.max((a - b).abs());
                x += step;
            }
            assert!(
                max_diff < 1e-10,
                "delta={delta} lambda={lambda} nu={nu:?}: max diff {max_diff:.3e}"
            );
        }
    }

    #[test]
    fn classical_st_zero_slant_is_symmetric_t() {
        let omega = SpdMatrix::from_rows(&[vec![1.5, 0.3], vec![0.3, 1.0]]).unwrap();
        let p = classical(&[0.0, 0.5], omega.clone(), &[0.0, 0.0], Some(3.0));
        for x in [[0.0, 0.5], [2.0, -1.0]] {
            let want = mvt_pdf(&(vecd(&x) - vecd(&[0.0, 0.5])), &omega, 3.0).unwrap();
            assert_relative_eq!(
                classical_st_pdf(&vecd(&x), &p).unwrap(),
                want,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn classical_st_scalar_matches_composed_oracle() {
        // 2·t₁(1; 4)·T₁(3·√(5/5); 5), with T₁ from quadrature of the density.
        let p = classical(&[0.0], SpdMatrix::identity(1), &[3.0], Some(4.0));
        let t1 = |x: f64, nu: f64| {
            ((ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu)) - 0.5 * (nu * PI).ln()).exp()
                * (1.0 + x * x / nu).powf(-0.5 * (nu + 1.0))
        };
        let t_cdf_oracle =
            0.5 + crate::special::integrate_gl(&|u| t1(u, 5.0), 0.0, 3.0, 48, 16);
        let want = 2.0 * t1(1.0, 4.0) * t_cdf_oracle;
        assert_relative_eq!(
            classical_st_pdf(&vecd(&[1.0]), &p).unwrap(),
            want,
            epsilon = 1e-11
        );
    }

    #[test]
    fn sdb_st_zero_slant_is_symmetric_t() {
        let delta = SpdMatrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 0.8]]).unwrap();
        let p = sdb(&[0.0, 0.0], delta.clone(), &[0.0, 0.0], Some(5.0));
        let x = vecd(&[0.7, -0.7]);
        let want = mvt_pdf(&x, &delta, 5.0).unwrap();
        assert_relative_eq!(sdb_st_pdf(&x, &p).unwrap(), want, epsilon = 1e-7);
    }

    #[test]
    fn st_families_approach_sn_at_huge_nu() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let omega = SpdMatrix::from_rows(&[vec![1.3, 0.4], vec![0.4, 0.9]]).unwrap();
        let cp_t = classical(&[0.2, -0.1], omega.clone(), &[1.5, -2.0], Some(1e6));
        let cp_n = classical(&[0.2, -0.1], omega, &[1.5, -2.0], None);
        for _ in 0..6 {
            let x = DVector::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
            let a = classical_st_pdf(&x, &cp_t).unwrap();
            let b = classical_sn_pdf(&x, &cp_n).unwrap();
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
        let delta = SpdMatrix::from_rows(&[vec![1.0, 0.25], vec![0.25, 1.1]]).unwrap();
        let sp_t = sdb(&[0.0, 0.3], delta.clone(), &[2.0, 1.0], Some(1e6));
        let sp_n = sdb(&[0.0, 0.3], delta, &[2.0, 1.0], None);
        for _ in 0..4 {
            let x = DVector::from_fn(2, |_, _| rng.random_range(-2.5..2.5));
            let a = sdb_st_pdf(&x, &sp_t).unwrap();
            let b = sdb_sn_pdf(&x, &sp_n).unwrap();
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn sdb_sn_factorizes_over_independent_components() {
        // Diagonal Δ makes the joint density an exact product of marginals.
        for d in 2..=3usize {
            let diag: Vec<f64> = (0..d).map(|i| 0.8 + 0.4 * i as f64).collect();
            let lambda: Vec<f64> = (0..d).map(|i| 1.5 - 0.9 * i as f64).collect();
            let xi: Vec<f64> = (0..d).map(|i| 0.2 * i as f64).collect();
            let joint = sdb(&xi, SpdMatrix::from_diagonal(&diag).unwrap(), &lambda, None);
            let cfg = QuadratureConfig {
                abs_tol: 1e-12,
                ..QuadratureConfig::for_dim(d)
            };
            let marginals: Vec<SdbParams> = (0..d)
                .map(|i| sdb(&[xi[i]], SpdMatrix::from_diagonal(&[diag[i]]).unwrap(), &[lambda[i]], None))
                .collect();
            let mut rng = ChaCha12Rng::seed_from_u64(5 + d as u64);
            for _ in 0..12 {
                let x = DVector::from_fn(d, |_, _| rng.random_range(-3.0..3.0));
                let joint_val = sdb_sn_pdf_cfg(&x, &joint, &cfg).unwrap();
                let mut prod = 1.0;
                for (i, m) in marginals.iter().enumerate() {
                    prod *= sdb_sn_pdf(&vecd(&[x[i]]), m).unwrap();
                }
                assert!(
                    (joint_val - prod).abs() < 1e-10,
                    "d={d} x={x:?}: {joint_val} vs {prod}"
                );
            }
        }
    }

    #[test]
    fn family_nu_requirements_enforced() {
        let cp = classical(&[0.0], SpdMatrix::identity(1), &[1.0], None);
        assert!(classical_st_pdf(&vecd(&[0.0]), &cp).is_err());
        let cp_t = classical(&[0.0], SpdMatrix::identity(1), &[1.0], Some(3.0));
        assert!(classical_sn_pdf(&vecd(&[0.0]), &cp_t).is_err());
        let sp = sdb(&[0.0], SpdMatrix::identity(1), &[1.0], None);
        assert!(sdb_st_pdf(&vecd(&[0.0]), &sp).is_err());
        let sp_t = sdb(&[0.0], SpdMatrix::identity(1), &[1.0], Some(3.0));
        assert!(sdb_sn_pdf(&vecd(&[0.0]), &sp_t).is_err());
    }

    #[test]
    fn skewing_factor_cost_dominates_sdb_at_trivariate() {
        // The classical density needs one scalar CDF; the SDB one needs a
        // full trivariate rectangle probability.
        let omega = SpdMatrix::from_rows(&[
            vec![1.0, 0.3, 0.2],
            vec![0.3, 1.0, 0.4],
            vec![0.2, 0.4, 1.0],
        ])
        .unwrap();
        let cp = classical(&[0.0; 3], omega.clone(), &[1.0, -1.0, 0.5], None);
        let sp = sdb(&[0.0; 3], omega, &[1.0, 1.0, 1.0], None);
        let cfg = QuadratureConfig {
            abs_tol: 1e-6,
            ..QuadratureConfig::for_dim(3)
        };
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let points: Vec<DVector<f64>> = (0..200)
            .map(|_| DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0)))
            .collect();
        let t0 = std::time::Instant::now();
        let mut sink = 0.0;
        for x in &points {
            sink += ln_classical_pdf(x, &cp).unwrap();
        }
        let classical_time = t0.elapsed().as_secs_f64();
        let t1 = std::time::Instant::now();
        for x in &points {
            sink += ln_sdb_pdf(x, &sp, &cfg).unwrap();
        }
        let sdb_time = t1.elapsed().as_secs_f64();
        assert!(sink.is_finite());
        let ratio = sdb_time / classical_time.max(1e-12);
        assert!(
            ratio >= 10.0,
            "per-evaluation cost ratio {ratio:.1} below 10 (classical {classical_time:.2e}s, sdb {sdb_time:.2e}s)"
        );
    }
}
