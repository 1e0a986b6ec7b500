//! Finite mixtures of the four families: stabilized log-likelihood,
//! E-step responsibilities, MAP labels, and ECM fitting.
//!
//! The M-step maximizes each component's responsibility-weighted log-density
//! numerically over an unconstrained reparameterization, starting from the
//! component's current parameters. The starting point sits in the initial
//! simplex, so every conditional maximization returns a value at least as
//! good as the current one and the observed log-likelihood cannot decrease.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::density::ln_pdf;
use crate::error::{Result, SkewError};
use crate::mvn::QuadratureConfig;
use crate::optim::{minimize, NelderMead};
use crate::params::{param_count, ClassicalParams, Family, ParamRecord, ParamSet, SdbParams};
use crate::spd::SpdMatrix;

/// Responsibility contributions below this are dropped inside the M-step
/// objective; the induced likelihood error is far below the monotonicity
/// slack even for very large n.
const RESP_CUTOFF: f64 = 1e-16;

#[derive(Debug, Clone)]
pub struct MixtureModel {
    family: Family,
    weights: Vec<f64>,
    components: Vec<ParamSet>,
}

impl MixtureModel {
    pub fn new(family: Family, weights: Vec<f64>, components: Vec<ParamSet>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(SkewError::InvalidParameter(format!(
                "need matching nonempty weights/components, got {} and {}",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(SkewError::InvalidParameter(
                "mixture weights must be positive".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(SkewError::InvalidParameter(format!(
                "mixture weights must sum to 1, got {sum}"
            )));
        }
        let d = components[0].dim();
        for c in &components {
            if c.family() != family {
                return Err(SkewError::InvalidParameter(format!(
                    "component family {} does not match mixture family {}",
                    c.family().code(),
                    family.code()
                )));
            }
            if c.dim() != d {
                return Err(SkewError::DimensionMismatch {
                    expected: d,
                    actual: c.dim(),
                });
            }
        }
        Ok(MixtureModel {
            family,
            weights,
            components,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn g(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ParamSet] {
        &self.components
    }
}

/// How the responsibilities are initialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitStrategy {
    /// Best of 10 Lloyd restarts on standardized data, hardened to one-hot.
    Kmeans,
    /// One flat-Dirichlet responsibility row per observation.
    RandomPosterior,
    /// Hard responsibilities from caller-provided labels.
    GivenLabels(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub g: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub seed: u64,
    pub init: InitStrategy,
    pub nu_floor: f64,
    pub nu_ceil: f64,
    /// Simplex iteration budget for each conditional maximization.
    pub mstep_max_iter: usize,
    /// Density quadrature controls; `None` picks a fitting-grade tolerance.
    pub quad: Option<QuadratureConfig>,
}

impl FitConfig {
    pub fn new(g: usize, seed: u64) -> Self {
        FitConfig {
            g,
            max_iter: 500,
            rel_tol: 1e-6,
            seed,
            init: InitStrategy::Kmeans,
            nu_floor: 1.01,
            nu_ceil: 200.0,
            mstep_max_iter: 80,
            quad: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(SkewError::InvalidParameter(
                "component count must be at least 1".into(),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(SkewError::InvalidParameter(
                "rel_tol must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(SkewError::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        if !(self.nu_floor > 1.0 && self.nu_ceil > self.nu_floor) {
            return Err(SkewError::InvalidParameter(
                "need 1 < nu_floor < nu_ceil".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: MixtureModel,
    pub loglik_trace: Vec<f64>,
    pub responsibilities: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn loglik(&self) -> f64 {
        *self.loglik_trace.last().unwrap()
    }

    pub fn to_record(&self) -> FitRecord {
        FitRecord {
            family: self.model.family().code().to_string(),
            g: self.model.g(),
            weights: self.model.weights().to_vec(),
            components: self.model.components().iter().map(|c| c.to_record()).collect(),
            loglik: self.loglik(),
            iterations: self.iterations,
            wall_time: self.wall_time,
            converged: self.converged,
            labels: self.labels.clone(),
        }
    }
}

/// Serialized fit summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitRecord {
    pub family: String,
    pub g: usize,
    pub weights: Vec<f64>,
    pub components: Vec<ParamRecord>,
    pub loglik: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    pub labels: Vec<usize>,
}

fn row_vector(data: &DMatrix<f64>, i: usize, buf: &mut DVector<f64>) {
    for j in 0..data.ncols() {
        buf[j] = data[(i, j)];
    }
}

/// n×g matrix of ln(w_g f_g(x_i)).
fn ln_weighted_matrix(
    data: &DMatrix<f64>,
    m: &MixtureModel,
    quad: &QuadratureConfig,
) -> Result<DMatrix<f64>> {
    let (n, d) = (data.nrows(), data.ncols());
    if d != m.dim() {
        return Err(SkewError::DimensionMismatch {
            expected: m.dim(),
            actual: d,
        });
    }
    if n == 0 {
        return Err(SkewError::InvalidParameter("empty data matrix".into()));
    }
    let mut out = DMatrix::zeros(n, m.g());
    let mut x = DVector::zeros(d);
    for (gi, comp) in m.components().iter().enumerate() {
        let lw = m.weights()[gi].ln();
        for i in 0..n {
            row_vector(data, i, &mut x);
            out[(i, gi)] = lw + ln_pdf(&x, comp, quad)?;
        }
    }
    Ok(out)
}

fn logsumexp(row: &[f64]) -> f64 {
    let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Observed-data log-likelihood Σ_i ln Σ_g w_g f_g(x_i).
pub fn mixture_loglik(
    data: &DMatrix<f64>,
    m: &MixtureModel,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let lw = ln_weighted_matrix(data, m, quad)?;
    let mut total = 0.0;
    let mut row = vec![0.0; m.g()];
    for i in 0..lw.nrows() {
        for (gi, r) in row.iter_mut().enumerate() {
            *r = lw[(i, gi)];
        }
        total += logsumexp(&row);
    }
    Ok(total)
}

/// Posterior component responsibilities and the log-likelihood of the same
/// pass. Rows sum to 1; underflow is impossible because each row is shifted
/// by its own maximum before exponentiation.
pub fn e_step(
    data: &DMatrix<f64>,
    m: &MixtureModel,
    quad: &QuadratureConfig,
) -> Result<(DMatrix<f64>, f64)> {
    let lw = ln_weighted_matrix(data, m, quad)?;
    let (n, g) = (lw.nrows(), lw.ncols());
    let mut resp = DMatrix::zeros(n, g);
    let mut total = 0.0;
    let mut row = vec![0.0; g];
    for i in 0..n {
        for (gi, r) in row.iter_mut().enumerate() {
            *r = lw[(i, gi)];
        }
        let lse = logsumexp(&row);
        total += lse;
        for gi in 0..g {
            resp[(i, gi)] = (row[gi] - lse).exp();
        }
    }
    Ok((resp, total))
}

/// Row-wise argmax; ties resolve to the lowest component index.
pub fn map_labels(resp: &DMatrix<f64>) -> Vec<usize> {
    (0..resp.nrows())
        .map(|i| {
            let mut best = 0;
            for gi in 1..resp.ncols() {
                if resp[(i, gi)] > resp[(i, best)] {
                    best = gi;
                }
            }
            best
        })
        .collect()
}

fn standardized(data: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = (data.nrows(), data.ncols());
    let mut out = data.clone();
    for j in 0..d {
        let mean = data.column(j).sum() / n as f64;
        let var = data.column(j).iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        for i in 0..n {
            out[(i, j)] = (data[(i, j)] - mean) / sd;
        }
    }
    out
}

fn kmeans_labels(data: &DMatrix<f64>, g: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let n = data.nrows();
    let d = data.ncols();
    let z = standardized(data);
    let mut best_labels = vec![0usize; n];
    let mut best_inertia = f64::INFINITY;
    for _ in 0..10 {
        let picks = rand::seq::index::sample(rng, n, g.min(n)).into_vec();
        let mut centroids: Vec<Vec<f64>> = picks
            .iter()
            .map(|&i| (0..d).map(|j| z[(i, j)]).collect())
            .collect();
        while centroids.len() < g {
            centroids.push(vec![0.0; d]);
        }
        let mut labels = vec![0usize; n];
        for _ in 0..100 {
            let mut changed = false;
            for i in 0..n {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (k, c) in centroids.iter().enumerate() {
                    let dist: f64 = (0..d).map(|j| (z[(i, j)] - c[j]).powi(2)).sum();
                    if dist < best_d {
                        best_d = dist;
                        best = k;
                    }
                }
                if labels[i] != best {
                    labels[i] = best;
                    changed = true;
                }
            }
            let mut counts = vec![0usize; g];
            let mut sums = vec![vec![0.0; d]; g];
            for i in 0..n {
                counts[labels[i]] += 1;
                for j in 0..d {
                    sums[labels[i]][j] += z[(i, j)];
                }
            }
            for k in 0..g {
                if counts[k] == 0 {
                    // Move an empty centroid onto the point farthest from
                    // its current assignment.
                    let far = (0..n)
                        .max_by(|&a, &b| {
                            let da: f64 = (0..d)
                                .map(|j| (z[(a, j)] - centroids[labels[a]][j]).powi(2))
                                .sum();
                            let db: f64 = (0..d)
                                .map(|j| (z[(b, j)] - centroids[labels[b]][j]).powi(2))
                                .sum();
                            da.partial_cmp(&db).unwrap()
                        })
                        .unwrap();
                    for j in 0..d {
                        centroids[k][j] = z[(far, j)];
                    }
                    labels[far] = k;
                    changed = true;
                } else {
                    for j in 0..d {
                        centroids[k][j] = sums[k][j] / counts[k] as f64;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let inertia: f64 = (0..n)
            .map(|i| {
                (0..d)
                    .map(|j| (z[(i, j)] - centroids[labels[i]][j]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        if inertia < best_inertia {
            best_inertia = inertia;
            best_labels = labels;
        }
    }
    best_labels
}

fn one_hot(labels: &[usize], g: usize) -> DMatrix<f64> {
    let mut resp = DMatrix::zeros(labels.len(), g);
    for (i, &l) in labels.iter().enumerate() {
        resp[(i, l)] = 1.0;
    }
    resp
}

fn initial_responsibilities(
    data: &DMatrix<f64>,
    cfg: &FitConfig,
    rng: &mut ChaCha12Rng,
) -> Result<DMatrix<f64>> {
    let n = data.nrows();
    match &cfg.init {
        InitStrategy::Kmeans => Ok(one_hot(&kmeans_labels(data, cfg.g, rng), cfg.g)),
        InitStrategy::RandomPosterior => {
            let mut resp = DMatrix::zeros(n, cfg.g);
            for i in 0..n {
                let mut sum = 0.0;
                for gi in 0..cfg.g {
                    let u: f64 = rng.random_range(1e-12..1.0);
                    let e = -u.ln();
                    resp[(i, gi)] = e;
                    sum += e;
                }
                for gi in 0..cfg.g {
                    resp[(i, gi)] /= sum;
                }
            }
            Ok(resp)
        }
        InitStrategy::GivenLabels(labels) => {
            if labels.len() != n {
                return Err(SkewError::LengthMismatch(labels.len(), n));
            }
            if labels.iter().any(|&l| l >= cfg.g) {
                return Err(SkewError::InvalidParameter(format!(
                    "initial labels must lie in 0..{}",
                    cfg.g
                )));
            }
            Ok(one_hot(labels, cfg.g))
        }
    }
}

/// Mean per-column variance; the unit for scale floors.
fn variance_scale(data: &DMatrix<f64>) -> f64 {
    let (n, d) = (data.nrows(), data.ncols());
    let mut acc = 0.0;
    for j in 0..d {
        let mean = data.column(j).sum() / n as f64;
        acc += data.column(j).iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    }
    let v = acc / d as f64;
    if v > 0.0 {
        v
    } else {
        1.0
    }
}

fn build_param_set(
    family: Family,
    xi: DVector<f64>,
    scale: DMatrix<f64>,
    slant: DVector<f64>,
    nu: Option<f64>,
) -> Result<ParamSet> {
    let scale = SpdMatrix::new(scale)?;
    if family.is_classical() {
        Ok(ParamSet::Classical(ClassicalParams::new(
            xi, scale, slant, nu,
        )?))
    } else {
        Ok(ParamSet::Sdb(SdbParams::new(xi, scale, slant, nu)?))
    }
}

/// Zero-slant component from responsibility-weighted moments.
fn component_from_moments(
    data: &DMatrix<f64>,
    resp_col: &[f64],
    family: Family,
    var_scale: f64,
    nu_init: f64,
) -> Result<ParamSet> {
    let (n, d) = (data.nrows(), data.ncols());
    let mass: f64 = resp_col.iter().sum();
    let mut mu = DVector::zeros(d);
    for i in 0..n {
        for j in 0..d {
            mu[j] += resp_col[i] * data[(i, j)];
        }
    }
    mu /= mass;
    let mut s = DMatrix::zeros(d, d);
    let mut c = DVector::zeros(d);
    for i in 0..n {
        for j in 0..d {
            c[j] = data[(i, j)] - mu[j];
        }
        s.syger(resp_col[i], &c, &c, 1.0);
    }
    s.fill_upper_triangle_with_lower_triangle();
    s /= mass;
    for j in 0..d {
        s[(j, j)] += 1e-6 * var_scale;
    }
    let nu = family.has_nu().then_some(nu_init);
    build_param_set(family, mu, s, DVector::zeros(d), nu)
}

fn reseed_component(
    data: &DMatrix<f64>,
    family: Family,
    var_scale: f64,
    nu_init: f64,
    rng: &mut ChaCha12Rng,
) -> Result<ParamSet> {
    let (n, d) = (data.nrows(), data.ncols());
    let pick = rng.random_range(0..n);
    let xi = DVector::from_fn(d, |j, _| data[(pick, j)]);
    let flat = vec![1.0; n];
    let global = component_from_moments(data, &flat, family, var_scale, nu_init)?;
    let scale = match &global {
        ParamSet::Classical(p) => p.omega().mat().clone(),
        ParamSet::Sdb(p) => p.delta_mat().mat().clone(),
    };
    let nu = family.has_nu().then_some(nu_init);
    build_param_set(family, xi, scale, DVector::zeros(d), nu)
}

/// Unconstrained coordinates: location, lower-Cholesky scale with
/// log-diagonal, slant, and log(ν − floor) when the family has ν.
fn pack_component(comp: &ParamSet, nu_floor: f64) -> Vec<f64> {
    let d = comp.dim();
    let (xi, scale, slant) = match comp {
        ParamSet::Classical(p) => (p.xi(), p.omega(), p.alpha()),
        ParamSet::Sdb(p) => (p.xi(), p.delta_mat(), p.lambda()),
    };
    let mut x = Vec::with_capacity(2 * d + d * (d + 1) / 2 + 1);
    x.extend(xi.iter());
    let l = scale.chol_l();
    for i in 0..d {
        for j in 0..=i {
            if i == j {
                x.push(l[(i, j)].ln());
            } else {
                x.push(l[(i, j)]);
            }
        }
    }
    x.extend(slant.iter());
    if let Some(nu) = comp.nu() {
        x.push((nu - nu_floor).max(1e-9).ln());
    }
    x
}

fn unpack_component(
    x: &[f64],
    family: Family,
    d: usize,
    var_scale: f64,
    nu_floor: f64,
    nu_ceil: f64,
) -> Option<ParamSet> {
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut k = 0;
    let xi = DVector::from_fn(d, |j, _| x[j]);
    k += d;
    // Log-diagonal bounds floor the determinant at (1e-8 var_scale)^d, which
    // rules out likelihood spikes from collapsing components.
    let lo = (1e-8 * var_scale).sqrt().ln();
    let hi = (1e10 * var_scale).sqrt().ln();
    let mut l = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            if i == j {
                l[(i, j)] = x[k].clamp(lo, hi).exp();
            } else {
                l[(i, j)] = x[k].clamp(-1e6, 1e6);
            }
            k += 1;
        }
    }
    let scale = &l * l.transpose();
    let slant = DVector::from_fn(d, |j, _| x[k + j].clamp(-1e6, 1e6));
    k += d;
    let nu = if family.has_nu() {
        let t = x[k].clamp(-16.0, (nu_ceil - nu_floor).ln());
        Some(nu_floor + t.exp())
    } else {
        None
    };
    build_param_set(family, xi, scale, slant, nu).ok()
}

/// Conditional M-step: maximizes the responsibility-weighted log-density by
/// simplex search from the current parameters. Never returns a point worse
/// than the start.
fn maximize_component(
    data: &DMatrix<f64>,
    resp_col: &[f64],
    current: &ParamSet,
    family: Family,
    var_scale: f64,
    cfg: &FitConfig,
    quad: &QuadratureConfig,
) -> ParamSet {
    let d = data.ncols();
    let n = data.nrows();
    let x0 = pack_component(current, cfg.nu_floor);
    let mut x = DVector::zeros(d);
    let mut objective = |p: &[f64]| -> f64 {
        match unpack_component(p, family, d, var_scale, cfg.nu_floor, cfg.nu_ceil) {
            Some(comp) => {
                let mut acc = 0.0;
                for i in 0..n {
                    if resp_col[i] < RESP_CUTOFF {
                        continue;
                    }
                    row_vector(data, i, &mut x);
                    match ln_pdf(&x, &comp, quad) {
                        Ok(v) => acc += resp_col[i] * v,
                        Err(_) => return f64::INFINITY,
                    }
                }
                -acc
            }
            None => f64::INFINITY,
        }
    };
    let nm = NelderMead {
        max_iter: cfg.mstep_max_iter,
        f_tol: 1e-10,
        init_step: 0.2,
    };
    let out = minimize(&mut objective, &x0, &nm);
    unpack_component(&out.x, family, d, var_scale, cfg.nu_floor, cfg.nu_ceil)
        .unwrap_or_else(|| current.clone())
}

/// ECM fit of a g-component mixture of `family` to `data` (rows are
/// observations). Deterministic given (data, family, cfg).
pub fn fit(data: &DMatrix<f64>, family: Family, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let (n, d) = (data.nrows(), data.ncols());
    if n == 0 || d == 0 {
        return Err(SkewError::InvalidParameter(
            "data must have at least one row and one column".into(),
        ));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(SkewError::InvalidParameter(
            "data contains non-finite values".into(),
        ));
    }
    let t0 = Instant::now();
    let quad = cfg
        .quad
        .unwrap_or_else(|| QuadratureConfig {
            abs_tol: 1e-6,
            ..QuadratureConfig::for_dim(d)
        });
    quad.validate()?;
    let mut warnings = Vec::new();
    if n <= cfg.g * (param_count(family, d) + 1) {
        warnings.push(format!(
            "sample size {n} is at or below the recommended minimum {} for g={} {}",
            cfg.g * (param_count(family, d) + 1),
            cfg.g,
            family.code()
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let var_scale = variance_scale(data);
    let nu_init = (10.0f64).clamp(cfg.nu_floor + 0.5, cfg.nu_ceil - 1.0);

    let mut resp = initial_responsibilities(data, cfg, &mut rng)?;
    let mut weights = vec![0.0; cfg.g];
    let mut components: Vec<ParamSet> = Vec::with_capacity(cfg.g);
    {
        let mut reseeded_init = false;
        for gi in 0..cfg.g {
            let col: Vec<f64> = (0..n).map(|i| resp[(i, gi)]).collect();
            let mass: f64 = col.iter().sum();
            if mass < (d + 1) as f64 {
                if !reseeded_init {
                    warnings.push(format!("component {gi} started degenerate; re-seeded"));
                }
                reseeded_init = true;
                components.push(reseed_component(data, family, var_scale, nu_init, &mut rng)?);
                weights[gi] = (d + 1) as f64;
            } else {
                components.push(component_from_moments(
                    data, &col, family, var_scale, nu_init,
                )?);
                weights[gi] = mass;
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
    }

    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut reseeded = false;
    let mut iterations = 0;
    let mut aborted = false;

    for t in 0..cfg.max_iter {
        iterations = t + 1;
        let model = MixtureModel::new(family, weights.clone(), components.clone())?;
        let (r, ll) = e_step(data, &model, &quad)?;
        resp = r;
        trace.push(ll);
        if t >= 1 {
            let prev = trace[t - 1];
            if (ll - prev).abs() / (1.0 + ll.abs()) < cfg.rel_tol {
                converged = true;
                break;
            }
        }

        let mut masses: Vec<f64> = (0..cfg.g)
            .map(|gi| (0..n).map(|i| resp[(i, gi)]).sum())
            .collect();
        for gi in 0..cfg.g {
            if masses[gi] < (d + 1) as f64 {
                if !reseeded {
                    reseeded = true;
                    warnings.push(format!(
                        "component {gi} degenerated at iteration {t}; re-seeded"
                    ));
                    components[gi] =
                        reseed_component(data, family, var_scale, nu_init, &mut rng)?;
                    masses[gi] = (d + 1) as f64;
                } else {
                    warnings.push(format!(
                        "component {gi} degenerated again at iteration {t}; stopping"
                    ));
                    aborted = true;
                }
            }
        }
        if aborted {
            break;
        }
        let total: f64 = masses.iter().sum();
        for (w, m) in weights.iter_mut().zip(&masses) {
            *w = m / total;
        }

        for gi in 0..cfg.g {
            let col: Vec<f64> = (0..n).map(|i| resp[(i, gi)]).collect();
            components[gi] = maximize_component(
                data,
                &col,
                &components[gi],
                family,
                var_scale,
                cfg,
                &quad,
            );
        }
    }

    let model = MixtureModel::new(family, weights, components)?;
    if !converged && !aborted {
        // The loop ended on the iteration cap with parameters one M-step
        // ahead of the last recorded pass; refresh so the reported state is
        // self-consistent.
        let (r, ll) = e_step(data, &model, &quad)?;
        resp = r;
        trace.push(ll);
    }
    let labels = map_labels(&resp);
    Ok(FitResult {
        model,
        loglik_trace: trace,
        responsibilities: resp,
        labels,
        iterations,
        wall_time: t0.elapsed().as_secs_f64(),
        converged,
        warnings,
    })
}
