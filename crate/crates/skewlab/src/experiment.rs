//! All-subsets clustering experiment: subset enumeration, paired-family
//! fits sharing one initialization seed per task, ARI scoring against the
//! reference label, streamed reports, and summary tables.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ari::ari;
use crate::dataset::Dataset;
use crate::error::{Result, SkewError};
use crate::mixture::{fit, FitConfig, InitStrategy};
use crate::mvn::QuadratureConfig;
use crate::par::map_tasks;
use crate::params::Family;

/// Lexicographically ordered column combinations of each requested size,
/// smaller sizes first. Duplicate sizes collapse; duplicate column names are
/// rejected.
pub fn enumerate_subsets(columns: &[String], sizes: &[usize]) -> Result<Vec<Vec<String>>> {
    let n = columns.len();
    {
        let mut seen = std::collections::BTreeSet::new();
        for c in columns {
            if !seen.insert(c.as_str()) {
                return Err(SkewError::InvalidParameter(format!(
                    "duplicate column name {c}"
                )));
            }
        }
    }
    if sizes.is_empty() {
        return Err(SkewError::InvalidParameter("no subset sizes given".into()));
    }
    let mut sz = sizes.to_vec();
    sz.sort_unstable();
    sz.dedup();
    for &k in &sz {
        if k == 0 || k > n {
            return Err(SkewError::InvalidParameter(format!(
                "subset size {k} not usable with {n} columns"
            )));
        }
    }
    let mut out = Vec::new();
    for &k in &sz {
        for idx in index_combinations(n, k) {
            out.push(idx.iter().map(|&i| columns[i].clone()).collect());
        }
    }
    Ok(out)
}

fn index_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-task RNG seed. Families deliberately share it so both start from the
/// same partition of the same subset.
pub fn task_seed(seed: u64, subset_index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(subset_index as u64 + 1))
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub families: Vec<Family>,
    pub g: usize,
    pub max_iter: usize,
    pub mstep_max_iter: usize,
    pub rel_tol: f64,
    pub quad_abs_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: vec![2, 3],
            seeds: vec![1],
            families: vec![Family::ClassicalSn, Family::SdbSn],
            g: 2,
            max_iter: 40,
            mstep_max_iter: 40,
            rel_tol: 1e-5,
            quad_abs_tol: 1e-5,
        }
    }
}

/// Outcome of one fit. `ari`/`loglik` are absent only when the fit itself
/// errored, which still yields a report rather than aborting the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyOutcome {
    pub ari: Option<f64>,
    pub wall_time: f64,
    pub converged: bool,
    pub loglik: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub subset: Vec<String>,
    pub seed: u64,
    pub family_results: BTreeMap<String, FamilyOutcome>,
    pub standardized: bool,
    pub timestamp: u64,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Zero-mean unit-variance copy; constant columns are left centered only.
pub fn standardize_columns(data: &DMatrix<f64>) -> DMatrix<f64> {
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

/// Runs the full (subset × seed × family) grid. One report per fit, emitted
/// through `on_report` as it completes and returned in deterministic task
/// order afterwards. Individual fit failures are recorded with
/// `converged: false`, never aborting the sweep.
pub fn run_experiment<F>(
    ds: &Dataset,
    cfg: &SweepConfig,
    on_report: F,
) -> Result<Vec<ExperimentReport>>
where
    F: FnMut(&ExperimentReport) -> Result<()> + Send,
{
    if cfg.g == 0 || cfg.families.is_empty() || cfg.seeds.is_empty() {
        return Err(SkewError::InvalidParameter(
            "sweep needs g >= 1, at least one family and one seed".into(),
        ));
    }
    let subsets = enumerate_subsets(&ds.continuous_names, &cfg.sizes)?;
    let truth = ds.label_codes();
    let mut tasks = Vec::with_capacity(subsets.len() * cfg.seeds.len());
    for (si, sub) in subsets.iter().enumerate() {
        for &seed in &cfg.seeds {
            tasks.push((si, sub.clone(), seed));
        }
    }
    let sink: Mutex<(F, Option<SkewError>)> = Mutex::new((on_report, None));
    let nested: Vec<Vec<ExperimentReport>> = map_tasks(tasks, |(si, sub, seed)| {
        let cols = ds
            .columns(&sub)
            .expect("subsets were enumerated from this dataset's columns");
        let std_cols = standardize_columns(&cols);
        let tseed = task_seed(seed, si);
        let mut reports = Vec::with_capacity(cfg.families.len());
        for &family in &cfg.families {
            let fc = FitConfig {
                g: cfg.g,
                max_iter: cfg.max_iter,
                rel_tol: cfg.rel_tol,
                seed: tseed,
                init: InitStrategy::Kmeans,
                nu_floor: 1.01,
                nu_ceil: 200.0,
                mstep_max_iter: cfg.mstep_max_iter,
                quad: Some(QuadratureConfig {
                    abs_tol: cfg.quad_abs_tol,
                    ..QuadratureConfig::for_dim(sub.len())
                }),
            };
            let t0 = Instant::now();
            let outcome = match fit(&std_cols, family, &fc) {
                Ok(res) => FamilyOutcome {
                    ari: ari(&truth, &res.labels).ok(),
                    wall_time: res.wall_time,
                    converged: res.converged,
                    loglik: Some(res.loglik()),
                },
                Err(_) => FamilyOutcome {
                    ari: None,
                    wall_time: t0.elapsed().as_secs_f64().max(f64::MIN_POSITIVE),
                    converged: false,
                    loglik: None,
                },
            };
            let report = ExperimentReport {
                dataset: ds.name.clone(),
                subset: sub.clone(),
                seed,
                family_results: BTreeMap::from([(family.code().to_string(), outcome)]),
                standardized: true,
                timestamp: unix_now(),
            };
            {
                let mut guard = sink.lock().unwrap();
                if guard.1.is_none() {
                    if let Err(e) = (guard.0)(&report) {
                        guard.1 = Some(e);
                    }
                }
            }
            reports.push(report);
        }
        reports
    });
    let (_, stream_err) = sink.into_inner().unwrap();
    if let Some(e) = stream_err {
        return Err(e);
    }
    Ok(nested.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub dataset: String,
    pub subset: String,
    pub size: usize,
    pub seed: u64,
    pub ari_classical: f64,
    pub ari_sdb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub dataset: String,
    pub size: usize,
    pub mean_ratio: f64,
    pub sd_ratio: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WinLoss {
    pub classical: usize,
    pub sdb: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scatter: Vec<ScatterRow>,
    pub ratios: Vec<RatioRow>,
    pub wins: WinLoss,
}

const ARI_TIE_TOL: f64 = 1e-6;

/// Aggregates reports into the scatter table, per-dataset per-size timing
/// ratios (SDB over classical), and win/loss/tie counts. Only cells with
/// both a classical and an SDB result contribute; aggregation is keyed, so
/// report order does not matter.
pub fn summarize(reports: &[ExperimentReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(SkewError::InvalidParameter(
            "cannot summarize zero reports".into(),
        ));
    }
    type Cell = (Option<FamilyOutcome>, Option<FamilyOutcome>);
    let mut cells: BTreeMap<(String, Vec<String>, u64), Cell> = BTreeMap::new();
    for r in reports {
        for (code, out) in &r.family_results {
            let family = Family::from_code(code)?;
            let key = (r.dataset.clone(), r.subset.clone(), r.seed);
            let cell = cells.entry(key).or_insert((None, None));
            if family.is_classical() {
                cell.0 = Some(out.clone());
            } else {
                cell.1 = Some(out.clone());
            }
        }
    }
    let mut scatter = Vec::new();
    let mut wins = WinLoss::default();
    let mut ratio_groups: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for ((dataset, subset, seed), (c, s)) in &cells {
        let (Some(c), Some(s)) = (c, s) else { continue };
        if let (Some(ac), Some(asdb)) = (c.ari, s.ari) {
            scatter.push(ScatterRow {
                dataset: dataset.clone(),
                subset: subset.join("+"),
                size: subset.len(),
                seed: *seed,
                ari_classical: ac,
                ari_sdb: asdb,
            });
            if ac > asdb + ARI_TIE_TOL {
                wins.classical += 1;
            } else if asdb > ac + ARI_TIE_TOL {
                wins.sdb += 1;
            } else {
                wins.ties += 1;
            }
        }
        if c.wall_time > 0.0 && s.wall_time > 0.0 {
            ratio_groups
                .entry((dataset.clone(), subset.len()))
                .or_default()
                .push(s.wall_time / c.wall_time);
        }
    }
    let ratios = ratio_groups
        .into_iter()
        .map(|((dataset, size), rs)| {
            let n = rs.len();
            let mean = rs.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            RatioRow {
                dataset,
                size,
                mean_ratio: mean,
                sd_ratio: sd,
                pairs: n,
            }
        })
        .collect();
    Ok(Summary {
        scatter,
        ratios,
        wins,
    })
}

impl Summary {
    /// Writes `figure1_scatter.csv` and `table1_ratios.csv` into `dir`.
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("figure1_scatter.csv"))?;
        w.write_record(["dataset", "subset", "size", "seed", "ari_classical", "ari_sdb"])?;
        for r in &self.scatter {
            w.write_record([
                r.dataset.as_str(),
                r.subset.as_str(),
                &r.size.to_string(),
                &r.seed.to_string(),
                &format!("{:.6}", r.ari_classical),
                &format!("{:.6}", r.ari_sdb),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("table1_ratios.csv"))?;
        w.write_record(["dataset", "size", "mean_ratio", "sd_ratio", "pairs"])?;
        for r in &self.ratios {
            w.write_record([
                r.dataset.as_str(),
                &r.size.to_string(),
                &format!("{:.4}", r.mean_ratio),
                &format!("{:.4}", r.sd_ratio),
                &r.pairs.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
