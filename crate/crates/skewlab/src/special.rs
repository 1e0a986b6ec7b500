//! Scalar special functions: the standard normal density/CDF pair, the
//! log-CDF derivatives `ζ_r`, and cached Gauss–Legendre rules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Result, SkewError};

pub const SQRT_2PI: f64 = 2.506628274631000502415765284811;
pub const LN_SQRT_2PI: f64 = 0.918938533204672741780329736406;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density φ(x).
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

#[inline]
pub fn ln_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal distribution function Φ(x), via `erfc`.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// log Φ(x), stable in the far left tail where Φ underflows.
pub fn ln_norm_cdf(x: f64) -> f64 {
    if x > -25.0 {
        norm_cdf(x).ln()
    } else {
        // φ(x)/Φ(x) from the Mills-ratio continued fraction.
        ln_norm_pdf(x) - zeta(1, x).expect("r=1 in range").ln()
    }
}

/// Inverse of Φ: a rational first guess polished by Newton steps against the
/// `erfc`-based forward map, giving close to full double precision.
pub fn inv_norm_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "inv_norm_cdf needs p in (0,1)");
    // Abramowitz & Stegun 26.2.23 (|err| < 4.5e-4), reflected for p > 1/2.
    let (pp, sign) = if p <= 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let t = (-2.0 * pp.ln()).sqrt();
    let mut x = sign
        * (t - (2.515517 + t * (0.802853 + t * 0.010328))
            / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
    for _ in 0..3 {
        let err = norm_cdf(x) - p;
        let step = err / norm_pdf(x);
        x -= step;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Reciprocal Mills ratio φ(x)/Φ(x) for very negative `x`, by the Laplace
/// continued fraction; accurate to machine precision for x ≤ -8.
fn mills_recip_tail(x: f64) -> f64 {
    debug_assert!(x < 0.0);
    let a = -x;
    let mut g = a;
    for k in (1..=96).rev() {
        g = a + k as f64 / g;
    }
    g
}

/// ζ_r(x): ζ₀ = log{2Φ(x)} and its derivatives up to order four.
///
/// ζ₁ = φ/Φ, with the recursions
/// ζ₂ = -ζ₁(x+ζ₁), ζ₃ = -ζ₂(x+ζ₁) - ζ₁(1+ζ₂),
/// ζ₄ = -ζ₃(x+2ζ₁) - 2ζ₂(1+ζ₂).
/// Below x = -8 the ratio φ/Φ is taken from the continued-fraction tail to
/// avoid the 0/0 of the direct quotient.
pub fn zeta(r: u32, x: f64) -> Result<f64> {
    if r > 4 {
        return Err(SkewError::InvalidParameter(format!(
            "zeta order {r} out of range 0..=4"
        )));
    }
    if r == 0 {
        let v = if x > -8.0 {
            (2.0 * norm_cdf(x)).ln()
        } else {
            std::f64::consts::LN_2 + ln_norm_pdf(x) - mills_recip_tail(x).ln()
        };
        return Ok(v);
    }
    let z1 = if x > -8.0 {
        norm_pdf(x) / norm_cdf(x)
    } else {
        mills_recip_tail(x)
    };
    if r == 1 {
        return Ok(z1);
    }
    let z2 = -z1 * (x + z1);
    if r == 2 {
        return Ok(z2);
    }
    let z3 = -z2 * (x + z1) - z1 * (1.0 + z2);
    if r == 3 {
        return Ok(z3);
    }
    Ok(-z3 * (x + 2.0 * z1) - 2.0 * z2 * (1.0 + z2))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Computed once per order by Newton iteration on the Legendre recurrence and
/// cached; callers map them onto their own interval.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let arc = Arc::new((nodes, weights));
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Integrates `f` over [a, b] with composite Gauss–Legendre panels.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn norm_cdf_basics() {
        assert_relative_eq!(norm_cdf(0.0), 0.5, epsilon = 1e-15);
        assert!((norm_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!((norm_cdf(40.0) - 1.0).abs() < 1e-15);
        assert!(norm_cdf(-40.0) < 1e-300);
    }

    #[test]
    fn inv_norm_cdf_round_trip() {
        for &p in &[1e-12, 1e-6, 0.025, 0.31, 0.5, 0.777, 0.975, 1.0 - 1e-9] {
            let x = inv_norm_cdf(p);
            assert!((norm_cdf(x) - p).abs() < 1e-13 * p.max(1e-3));
        }
    }

    #[test]
    fn ln_norm_cdf_deep_tail_matches_continued_fraction() {
        // Where Φ is still representable the continued-fraction form must
        // agree with the direct log at the same point.
        for &x in &[-18.0, -21.0, -24.5, -25.5, -26.0] {
            let direct = norm_cdf(x).ln();
            let cf = ln_norm_pdf(x) - zeta(1, x).unwrap().ln();
            assert_relative_eq!(direct, cf, epsilon = 1e-12);
        }
        // Spot value computed at 40-digit precision.
        let v = ln_norm_cdf(-30.0);
        assert_relative_eq!(v, -454.3212439563432, epsilon = 1e-12);
    }

    #[test]
    fn zeta_at_zero_matches_closed_forms() {
        // ζ₀(0) = log(2·0.5) = 0.
        assert_relative_eq!(zeta(0, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        // ζ₃(0) = (2/π)^{3/2}(4-π)/2.
        let z3 = (2.0 / PI).powf(1.5) * (4.0 - PI) / 2.0;
        assert_relative_eq!(zeta(3, 0.0).unwrap(), z3, epsilon = 1e-14);
        // ζ₄(0) = 2(π-3)(2/π)² ≈ 0.114771.
        let z4 = 2.0 * (PI - 3.0) * (2.0 / PI).powi(2);
        assert_relative_eq!(zeta(4, 0.0).unwrap(), z4, epsilon = 1e-14);
        assert!((z4 - 0.114771).abs() < 1e-6);
    }

    #[test]
    fn zeta_rejects_out_of_range_order() {
        assert!(zeta(5, 0.0).is_err());
    }

    #[test]
    fn zeta_matches_finite_differences() {
        // ζ_r is the derivative of ζ_{r-1}; central differences on [-5, 5].
        let h = 1e-5;
        for r in 1..=4u32 {
            let mut x = -5.0;
            while x <= 5.0 {
                let fd = (zeta(r - 1, x + h).unwrap() - zeta(r - 1, x - h).unwrap()) / (2.0 * h);
                let an = zeta(r, x).unwrap();
                assert!(
                    (fd - an).abs() < 1e-6 * (1.0 + an.abs()),
                    "r={r} x={x}: fd={fd} analytic={an}"
                );
                x += 0.25;
            }
        }
    }

    #[test]
    fn zeta_tail_is_continuous_at_switch() {
        for r in 0..=4u32 {
            let a = zeta(r, -7.9999999).unwrap();
            let b = zeta(r, -8.0000001).unwrap();
            assert!(
                (a - b).abs() <= 1e-7 * (1.0 + a.abs()),
                "r={r}: {a} vs {b}"
            );
        }
        // Deep tail stays finite and sane: ζ₁(x) ≈ -x for x → -∞.
        let z = zeta(1, -50.0).unwrap();
        assert!((z - 50.0).abs() < 0.05);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // Degree 2n-1 exactness: ∫_{-1}^{1} x⁶ dx = 2/7 with n = 4.
        let rule = gauss_legendre(4);
        let s: f64 = rule
            .0
            .iter()
            .zip(&rule.1)
            .map(|(x, w)| w * x.powi(6))
            .sum();
        assert_relative_eq!(s, 2.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn composite_gl_integrates_gaussian() {
        let v = integrate_gl(&|x: f64| norm_pdf(x), -10.0, 10.0, 8, 24);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }
}
