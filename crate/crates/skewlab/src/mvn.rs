//! Multivariate normal density and rectangle probabilities up to d = 6.
//!
//! d = 1 is the erf closed form; d = 2 integrates the Drezner single-integral
//! identity (with a conditioning fallback for |ρ| near 1); d = 3 conditions on
//! one coordinate and integrates a bivariate slice; d = 4..6 use a randomized
//! rank-1 lattice after a separation-of-variables transform.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Result, SkewError};
use crate::special::{gauss_legendre, inv_norm_cdf, norm_cdf, norm_pdf, LN_SQRT_2PI};
use crate::spd::SpdMatrix;

/// Largest dimension for which rectangle probabilities are supported.
pub const MAX_CDF_DIM: usize = 6;

/// Upper limits beyond this are treated as +∞ (Φ(8.5) ≈ 1 − 9.5e-18).
const UPPER_DROP: f64 = 8.5;
/// Any limit below this forces the probability to zero.
const LOWER_ZERO: f64 = -37.0;

/// Controls for the randomized/deterministic quadratures behind Φ_d and T_d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target absolute error of the returned probability.
    pub abs_tol: f64,
    /// Budget on integrand evaluations for the adaptive stages.
    pub max_points: usize,
    /// Seed for the randomized lattice shifts; fixed seed gives
    /// bit-reproducible results.
    pub rng_seed: u64,
}

impl QuadratureConfig {
    /// Default tolerance profile: 1e-8 up to trivariate, 1e-6 beyond.
    pub fn for_dim(d: usize) -> Self {
        QuadratureConfig {
            abs_tol: if d <= 3 { 1e-8 } else { 1e-6 },
            max_points: 4_000_000,
            rng_seed: 0x5107_ab1e,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(SkewError::InvalidParameter(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_points < 1000 {
            return Err(SkewError::InvalidParameter(format!(
                "max_points must be at least 1000, got {}",
                self.max_points
            )));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig::for_dim(3)
    }
}

/// (x − center)ᵀ Σ⁻¹ (x − center) via the cached Cholesky factor.
pub fn mahalanobis(x: &DVector<f64>, center: &DVector<f64>, sigma: &SpdMatrix) -> Result<f64> {
    if x.len() != sigma.dim() {
        return Err(SkewError::DimensionMismatch {
            expected: sigma.dim(),
            actual: x.len(),
        });
    }
    if center.len() != x.len() {
        return Err(SkewError::DimensionMismatch {
            expected: x.len(),
            actual: center.len(),
        });
    }
    Ok(sigma.quad_form(&(x - center)))
}

/// log of the N_d(0, Σ) density at x.
pub fn ln_mvn_pdf(x: &DVector<f64>, sigma: &SpdMatrix) -> Result<f64> {
    if x.len() != sigma.dim() {
        return Err(SkewError::DimensionMismatch {
            expected: sigma.dim(),
            actual: x.len(),
        });
    }
    let q = sigma.quad_form(x);
    Ok(-(x.len() as f64) * LN_SQRT_2PI - 0.5 * sigma.ln_det() - 0.5 * q)
}

/// N_d(0, Σ) density at x.
pub fn mvn_pdf(x: &DVector<f64>, sigma: &SpdMatrix) -> Result<f64> {
    Ok(ln_mvn_pdf(x, sigma)?.exp())
}

/// P(X ≤ upper componentwise) for X ∼ N_d(0, Σ), d ≤ 6.
pub fn mvn_cdf(upper: &DVector<f64>, sigma: &SpdMatrix, cfg: &QuadratureConfig) -> Result<f64> {
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
    // Standardize to a correlation matrix.
    let (corr, sds) = sigma.to_correlation();
    let mut b: Vec<f64> = (0..d).map(|i| upper[i] / sds[i]).collect();
    if b.iter().any(|&v| v <= LOWER_ZERO) {
        return Ok(0.0);
    }
    // Coordinates with effectively infinite limits integrate out exactly.
    let keep: Vec<usize> = (0..d).filter(|&i| b[i] < UPPER_DROP).collect();
    if keep.len() < d {
        if keep.is_empty() {
            return Ok(1.0);
        }
        b = keep.iter().map(|&i| b[i]).collect();
        let sub = corr.mat().select_rows(&keep).select_columns(&keep);
        let sub = SpdMatrix::new(sub)?;
        return mvn_cdf_std(&b, &sub, cfg);
    }
    mvn_cdf_std(&b, &corr, cfg)
}

/// Dispatch on dimension once limits are standardized.
fn mvn_cdf_std(b: &[f64], corr: &SpdMatrix, cfg: &QuadratureConfig) -> Result<f64> {
    match b.len() {
        1 => Ok(norm_cdf(b[0])),
        2 => Ok(bvn_cdf(b[0], b[1], corr.mat()[(0, 1)])),
        3 => tvn_cdf(b, corr, cfg),
        _ => qmc_mvn_cdf(b, corr, cfg),
    }
}

/// Bivariate standard normal P(X ≤ h, Y ≤ k) with correlation ρ.
pub fn bvn_cdf(h: f64, k: f64, rho: f64) -> f64 {
    debug_assert!(rho.abs() < 1.0);
    if rho == 0.0 {
        return norm_cdf(h) * norm_cdf(k);
    }
    if rho.abs() <= 0.925 {
        // Drezner's single integral over the correlation angle:
        // Φ₂ = Φ(h)Φ(k) + (2π)⁻¹ ∫₀^{asin ρ} exp(−(h²+k²−2hk sinθ)/(2cos²θ)) dθ.
        let order = if rho.abs() < 0.3 {
            6
        } else if rho.abs() < 0.75 {
            12
        } else {
            20
        };
        let a = rho.asin();
        let rule = gauss_legendre(order);
        let (mid, half) = (0.5 * a, 0.5 * a);
        let hk = h * k;
        let hs = 0.5 * (h * h + k * k);
        let mut acc = 0.0;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let sn = (mid + half * x).sin();
            acc += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        norm_cdf(h) * norm_cdf(k) + acc * half / (2.0 * std::f64::consts::PI)
    } else {
        bvn_cdf_high_rho(h, k, rho)
    }
}

/// |ρ| near 1: condition on the first coordinate and integrate
/// φ(x)·Φ((k−ρx)/s) with panels refined around the transition at x = k/ρ.
fn bvn_cdf_high_rho(h: f64, k: f64, rho: f64) -> f64 {
    let s = (1.0 - rho).sqrt() * (1.0 + rho).sqrt();
    let w = s / rho.abs();
    let x0 = k / rho;
    let lo = -9.0_f64;
    let hi = h.min(9.0);
    if hi <= lo {
        return 0.0;
    }
    // Panel edges: transition zone [x0 − 6w, x0 + 6w] resolved at width w,
    // smooth Gaussian sections at width ≤ 1.
    let mut edges = vec![lo, hi];
    for m in [-6.0, -2.0, 2.0, 6.0] {
        let e = x0 + m * w;
        if e > lo && e < hi {
            edges.push(e);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rule = gauss_legendre(24);
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let in_transition = b > x0 - 6.0 * w && a < x0 + 6.0 * w;
        let target = if in_transition { w.min(1.0) } else { 1.0 };
        let nsub = ((b - a) / target).ceil().max(1.0) as usize;
        let nsub = nsub.min(64);
        let hsub = (b - a) / nsub as f64;
        for j in 0..nsub {
            let m = a + (j as f64 + 0.5) * hsub;
            let half = 0.5 * hsub;
            let mut acc = 0.0;
            for (x, wt) in rule.0.iter().zip(&rule.1) {
                let t = m + half * x;
                acc += wt * norm_pdf(t) * norm_cdf((k - rho * t) / s);
            }
            total += acc * half;
        }
    }
    total.clamp(0.0, 1.0)
}

/// Trivariate probability by conditioning on the coordinate least correlated
/// with the other two; the slice is a bivariate probability with constant
/// conditional correlation, integrated by panel doubling until `abs_tol`.
fn tvn_cdf(b: &[f64], corr: &SpdMatrix, cfg: &QuadratureConfig) -> Result<f64> {
    let r = corr.mat();
    // Pick the conditioning index minimizing the largest |ρ| to the others;
    // this keeps the slice arguments' slopes bounded.
    let mut pivot = 0;
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let m = (0..3)
            .filter(|&j| j != i)
            .map(|j| r[(i, j)].abs())
            .fold(0.0, f64::max);
        if m < best {
            best = m;
            pivot = i;
        }
    }
    let others: Vec<usize> = (0..3).filter(|&j| j != pivot).collect();
    let (j, l) = (others[0], others[1]);
    let (r1j, r1l, rjl) = (r[(pivot, j)], r[(pivot, l)], r[(j, l)]);
    let sj = (1.0 - r1j * r1j).sqrt();
    let sl = (1.0 - r1l * r1l).sqrt();
    let rc = ((rjl - r1j * r1l) / (sj * sl)).clamp(-1.0 + 1e-14, 1.0 - 1e-14);
    let (bp, bj, bl) = (b[pivot], b[j], b[l]);
    let lo = -9.0_f64;
    let hi = bp.min(9.0);
    if hi <= lo {
        return Ok(0.0);
    }
    let f = |x: f64| norm_pdf(x) * bvn_cdf((bj - r1j * x) / sj, (bl - r1l * x) / sl, rc);
    let order = 16;
    let mut panels = 6.max(((hi - lo) / 3.0).ceil() as usize);
    let mut prev = crate::special::integrate_gl(&f, lo, hi, panels, order);
    let mut used = panels * order;
    loop {
        panels *= 2;
        let next = crate::special::integrate_gl(&f, lo, hi, panels, order);
        used += panels * order;
        if (next - prev).abs() <= 0.5 * cfg.abs_tol {
            return Ok(next.clamp(0.0, 1.0));
        }
        if used > cfg.max_points {
            return Err(SkewError::NonConvergence(format!(
                "trivariate normal probability: {used} evaluations without reaching {}",
                cfg.abs_tol
            )));
        }
        prev = next;
    }
}

/// Sorts limits ascending and returns (sorted limits, Cholesky factor of the
/// permuted correlation); integrating the tightest limit first reduces the
/// variance of the lattice estimator.
fn reorder_chol(b: &[f64], corr: &SpdMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let d = b.len();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| b[i].partial_cmp(&b[j]).unwrap());
    let bs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let perm = corr.mat().select_rows(&idx).select_columns(&idx);
    let sub = SpdMatrix::new(perm)?;
    Ok((bs, sub.chol_l().clone()))
}

/// Genz separation-of-variables integrand: one lattice point u ∈ [0,1)^{d−1}
/// maps to a product of conditional one-dimensional probabilities.
fn sov_prob(bs: &[f64], l: &DMatrix<f64>, u: &[f64], y: &mut [f64]) -> f64 {
    let d = bs.len();
    let mut e = norm_cdf(bs[0] / l[(0, 0)]);
    let mut p = e;
    for i in 1..d {
        let q = (u[i - 1] * e).clamp(1e-295, 1.0 - 1e-16);
        y[i - 1] = inv_norm_cdf(q);
        let mut s = 0.0;
        for k in 0..i {
            s += l[(i, k)] * y[k];
        }
        e = norm_cdf((bs[i] - s) / l[(i, i)]);
        p *= e;
    }
    p
}

/// d = 4..6: randomized Kronecker lattice (Richtmyer generators, baker's
/// transform, 8 shifts). The point set for 2n extends the one for n, so each
/// doubling stage only adds the new points until the shift spread meets
/// `abs_tol` or the evaluation budget runs out.
fn qmc_mvn_cdf(b: &[f64], corr: &SpdMatrix, cfg: &QuadratureConfig) -> Result<f64> {
    let d = b.len();
    let (bs, l) = reorder_chol(b, corr)?;
    const PRIMES: [f64; 5] = [2.0, 3.0, 5.0, 7.0, 11.0];
    let gens: Vec<f64> = PRIMES[..d - 1].iter().map(|p| p.sqrt().fract()).collect();
    const SHIFTS: usize = 8;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    let shifts: Vec<Vec<f64>> = (0..SHIFTS)
        .map(|_| (0..d - 1).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut sums = [0.0f64; SHIFTS];
    let mut done = 0usize;
    let mut n = 1024usize;
    let mut u = vec![0.0; d - 1];
    let mut y = vec![0.0; d - 1];
    loop {
        for (s, shift) in shifts.iter().enumerate() {
            let mut acc = 0.0;
            for j in done + 1..=n {
                for (t, g) in gens.iter().enumerate() {
                    let v = (j as f64 * g + shift[t]).fract();
                    u[t] = (2.0 * v - 1.0).abs();
                }
                acc += sov_prob(&bs, &l, &u, &mut y);
            }
            sums[s] += acc;
        }
        done = n;
        let means: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
        let mean = means.iter().sum::<f64>() / SHIFTS as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
            / (SHIFTS as f64 * (SHIFTS - 1) as f64);
        let err = 3.0 * var.sqrt();
        if err <= cfg.abs_tol {
            return Ok(mean.clamp(0.0, 1.0));
        }
        if 2 * SHIFTS * n > cfg.max_points {
            return Err(SkewError::NonConvergence(format!(
                "lattice rule: error estimate {err:.2e} after {} points, target {}",
                SHIFTS * n,
                cfg.abs_tol
            )));
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn vecd(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    /// Brute-force Φ₂ by conditioning with dense fixed panels; shares no code
    /// with the production Drezner path.
    fn bvn_oracle(h: f64, k: f64, rho: f64) -> f64 {
        let s = (1.0 - rho * rho).sqrt();
        let f = |x: f64| norm_pdf(x) * norm_cdf((k - rho * x) / s);
        crate::special::integrate_gl(&f, -9.5, h.min(9.5), 3000, 10)
    }

    /// One-factor representation for equicorrelated limits (ρ > 0):
    /// X_i = √ρ T + √(1−ρ) Z_i reduces Φ_d to a single integral.
    fn equicorr_oracle(b: &[f64], rho: f64) -> f64 {
        let sr = rho.sqrt();
        let s = (1.0 - rho).sqrt();
        let f = |t: f64| {
            let mut p = norm_pdf(t);
            for &bi in b {
                p *= norm_cdf((bi - sr * t) / s);
            }
            p
        };
        crate::special::integrate_gl(&f, -10.0, 10.0, 2000, 10)
    }

    fn equicorr_matrix(d: usize, rho: f64) -> SpdMatrix {
        let m = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho });
        SpdMatrix::new(m).unwrap()
    }

    #[test]
    fn pdf_standard_normal_values() {
        let s1 = SpdMatrix::identity(1);
        assert_relative_eq!(
            mvn_pdf(&vecd(&[0.0]), &s1).unwrap(),
            0.3989422804,
            epsilon = 1e-10
        );
        let s2 = SpdMatrix::identity(2);
        assert_relative_eq!(
            mvn_pdf(&vecd(&[0.0, 0.0]), &s2).unwrap(),
            0.1591549431,
            epsilon = 1e-10
        );
    }

    #[test]
    fn pdf_matches_explicit_two_by_two() {
        // Σ = [[2, .5], [.5, 1]]: det = 1.75, Σ⁻¹ = [[1, −.5], [−.5, 2]]/1.75.
        let sigma = SpdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let q: f64 = (1.0 - 0.5 - 0.5 + 2.0) / 1.75;
        let expect = (2.0 * PI * 1.75_f64.sqrt()).recip() * (-0.5 * q).exp();
        assert_relative_eq!(
            mvn_pdf(&vecd(&[1.0, 1.0]), &sigma).unwrap(),
            expect,
            epsilon = 1e-13
        );
    }

    #[test]
    fn mahalanobis_examples() {
        let sigma = SpdMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 8.0]]).unwrap();
        let x = vecd(&[1.0, 2.0]);
        let c = vecd(&[0.0, 0.0]);
        assert_relative_eq!(mahalanobis(&x, &c, &sigma).unwrap(), 1.0, epsilon = 1e-13);
        assert_eq!(mahalanobis(&x, &x, &sigma).unwrap(), 0.0);
        let eye = SpdMatrix::identity(2);
        assert_relative_eq!(
            mahalanobis(&x, &c, &eye).unwrap(),
            5.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn cdf_univariate_and_bounds() {
        let s1 = SpdMatrix::identity(1);
        let cfg = QuadratureConfig::for_dim(1);
        assert_relative_eq!(
            mvn_cdf(&vecd(&[0.0]), &s1, &cfg).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            mvn_cdf(&vecd(&[40.0]), &s1, &cfg).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_eq!(mvn_cdf(&vecd(&[-40.0]), &s1, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn cdf_orthants_under_independence() {
        for d in 1..=6 {
            let cfg = QuadratureConfig::for_dim(d);
            let p = mvn_cdf(&DVector::zeros(d), &SpdMatrix::identity(d), &cfg).unwrap();
            let tol = if d <= 3 { 1e-9 } else { 5e-6 };
            assert!(
                (p - 0.5_f64.powi(d as i32)).abs() < tol,
                "d={d}: {p} vs {}",
                0.5_f64.powi(d as i32)
            );
        }
    }

    #[test]
    fn bivariate_orthant_matches_arcsine_identity() {
        for &rho in &[
            -0.999_f64, -0.99, -0.95, -0.9, -0.7, -0.4, -0.1, 0.1, 0.3, 0.5, 0.75, 0.9, 0.925,
            0.95, 0.99, 0.999,
        ] {
            let expect = 0.25 + rho.asin() / (2.0 * PI);
            let got = bvn_cdf(0.0, 0.0, rho);
            assert!(
                (got - expect).abs() < 2e-12,
                "rho={rho}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn bivariate_matches_dense_conditioning_oracle() {
        for &rho in &[-0.99, -0.93, -0.8, -0.5, -0.2, 0.0, 0.35, 0.6, 0.85, 0.925, 0.97, 0.995] {
            for &h in &[-2.5, -0.7, 0.4, 1.8] {
                for &k in &[-1.9, 0.0, 1.2, 3.0] {
                    let got = bvn_cdf(h, k, rho);
                    let want = bvn_oracle(h, k, rho);
                    assert!(
                        (got - want).abs() < 5e-12,
                        "h={h} k={k} rho={rho}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn trivariate_orthant_matches_additive_arcsine_identity() {
        // P(X ≤ 0) for d = 3 equals 1/8 + Σ_{i<j} asin(ρ_ij)/(4π).
        let cases = [
            (0.5, 0.3, 0.2),
            (-0.4, 0.25, 0.6),
            (0.8, 0.5, 0.45),
            (-0.2, -0.3, -0.15),
        ];
        let cfg = QuadratureConfig::for_dim(3);
        for &(a, b, c) in &cases {
            let r = SpdMatrix::from_rows(&[
                vec![1.0, a, b],
                vec![a, 1.0, c],
                vec![b, c, 1.0],
            ])
            .unwrap();
            let expect = 0.125 + (a.asin() + b.asin() + c.asin()) / (4.0 * PI);
            let got = mvn_cdf(&DVector::zeros(3), &r, &cfg).unwrap();
            assert!(
                (got - expect).abs() < 1e-8,
                "rho=({a},{b},{c}): {got} vs {expect}"
            );
        }
    }

    #[test]
    fn trivariate_matches_equicorrelation_oracle_off_origin() {
        let cfg = QuadratureConfig::for_dim(3);
        for &rho in &[0.15, 0.5, 0.85] {
            for b in [[-1.0, 0.2, 0.9], [0.5, 0.5, 0.5], [-0.3, -1.7, 2.2]] {
                let got = mvn_cdf(&vecd(&b), &equicorr_matrix(3, rho), &cfg).unwrap();
                let want = equicorr_oracle(&b, rho);
                assert!(
                    (got - want).abs() < 2e-8,
                    "rho={rho} b={b:?}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn lattice_matches_equicorrelation_oracle() {
        for d in 4..=6 {
            let cfg = QuadratureConfig::for_dim(d);
            for &rho in &[0.2, 0.6] {
                let b: Vec<f64> = (0..d).map(|i| -0.8 + 0.5 * i as f64).collect();
                let got = mvn_cdf(&vecd(&b), &equicorr_matrix(d, rho), &cfg).unwrap();
                let want = equicorr_oracle(&b, rho);
                assert!(
                    (got - want).abs() < 5e-6,
                    "d={d} rho={rho}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn cdf_handles_covariance_scaling_and_dropped_limits() {
        // Non-unit variances standardize internally.
        let sigma = SpdMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 9.0]]).unwrap();
        let cfg = QuadratureConfig::for_dim(2);
        let got = mvn_cdf(&vecd(&[2.0, -3.0]), &sigma, &cfg).unwrap();
        let want = bvn_oracle(1.0, -1.0, 1.0 / 6.0);
        assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        // A +40 limit marginalizes that coordinate away.
        let got = mvn_cdf(&vecd(&[2.0, 120.0]), &sigma, &cfg).unwrap();
        assert_relative_eq!(got, norm_cdf(1.0), epsilon = 1e-12);
    }

    #[test]
    fn cdf_monotone_in_each_limit() {
        let r = SpdMatrix::from_rows(&[
            vec![1.0, 0.45, -0.3],
            vec![0.45, 1.0, 0.2],
            vec![-0.3, 0.2, 1.0],
        ])
        .unwrap();
        let cfg = QuadratureConfig::for_dim(3);
        let grid = [-1.5, -0.5, 0.5, 1.5];
        for coord in 0..3 {
            let mut prev = -1.0;
            for &g in &grid {
                let mut b = vecd(&[0.2, -0.1, 0.3]);
                b[coord] = g;
                let p = mvn_cdf(&b, &r, &cfg).unwrap();
                assert!(
                    p >= prev - 1e-9,
                    "coord {coord}: non-monotone at {g}: {p} < {prev}"
                );
                prev = p;
            }
        }
    }

    #[test]
    fn lattice_is_seed_reproducible() {
        let b = vecd(&[0.3, -0.2, 0.8, 1.1]);
        let r = equicorr_matrix(4, 0.4);
        let cfg = QuadratureConfig::for_dim(4);
        let a = mvn_cdf(&b, &r, &cfg).unwrap();
        let a2 = mvn_cdf(&b, &r, &cfg).unwrap();
        assert_eq!(a.to_bits(), a2.to_bits());
        let other = QuadratureConfig {
            rng_seed: 99,
            ..cfg
        };
        let c = mvn_cdf(&b, &r, &other).unwrap();
        assert_ne!(a.to_bits(), c.to_bits());
        assert!((a - c).abs() < 3.0 * cfg.abs_tol);
    }

    #[test]
    fn rejects_unsupported_dimension_and_bad_config() {
        let b = DVector::zeros(7);
        let r = SpdMatrix::identity(7);
        let cfg = QuadratureConfig::for_dim(7);
        assert!(matches!(
            mvn_cdf(&b, &r, &cfg),
            Err(SkewError::UnsupportedDimension { dim: 7, max: 6 })
        ));
        let bad = QuadratureConfig {
            max_points: 10,
            ..QuadratureConfig::default()
        };
        assert!(mvn_cdf(&DVector::zeros(2), &SpdMatrix::identity(2), &bad).is_err());
    }
}
