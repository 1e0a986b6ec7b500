//! Command-line front end: single mixture fits, the all-subsets benchmark
//! sweep, the Mardia extremal search, and partition scoring.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skewlab::ari::ari;
use skewlab::dataset::{ingest_csv, read_continuous_csv, DatasetSchema};
use skewlab::error::{Result, SkewError};
use skewlab::experiment::{run_experiment, standardize_columns, summarize, SweepConfig};
use skewlab::mixture::{fit, FitConfig, InitStrategy};
use skewlab::moments::{maximize_sdb_mardia, MardiaObjective, MardiaSearchConfig};
use skewlab::params::Family;

#[derive(Parser)]
#[command(
    name = "skewlab",
    version,
    about = "Skew-normal and skew-t mixture fitting plus a two-formulation clustering benchmark"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    /// Classical skew-normal (scalar skewing factor).
    Csn,
    /// Diagonal-matrix-slant skew-normal (d-dimensional skewing factor).
    Ssn,
    /// Classical skew-t.
    Cst,
    /// Diagonal-matrix-slant skew-t.
    Sst,
}

impl From<FamilyArg> for Family {
    fn from(a: FamilyArg) -> Family {
        match a {
            FamilyArg::Csn => Family::ClassicalSn,
            FamilyArg::Ssn => Family::SdbSn,
            FamilyArg::Cst => Family::ClassicalSt,
            FamilyArg::Sst => Family::SdbSt,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhichArg {
    Skewness,
    Kurtosis,
}

impl From<WhichArg> for MardiaObjective {
    fn from(a: WhichArg) -> MardiaObjective {
        match a {
            WhichArg::Skewness => MardiaObjective::Skewness,
            WhichArg::Kurtosis => MardiaObjective::Kurtosis,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit one mixture to selected CSV columns and print the record as JSON.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated continuous column names to fit on.
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 80)]
        mstep_max_iter: usize,
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        /// Standardize the selected columns before fitting.
        #[arg(long)]
        standardize: bool,
        /// Write the JSON record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the all-subsets two-family sweep; emits reports.jsonl plus
    /// figure1_scatter.csv and table1_ratios.csv into --out.
    Bench {
        #[arg(long)]
        data: PathBuf,
        /// JSON file naming the continuous columns and the label column.
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        sizes: Vec<usize>,
        /// "1..10" (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1")]
        seeds: String,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "csn,ssn")]
        families: Vec<FamilyArg>,
        #[arg(long, default_value_t = 2)]
        g: usize,
        /// Cap on ECM iterations per fit; bounds sweep runtime.
        #[arg(long, default_value_t = 40)]
        max_iter: usize,
        #[arg(long, default_value_t = 40)]
        mstep_max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for the diagonal slant maximizing Mardia skewness or kurtosis.
    MardiaMax {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Simplex iteration budget per start.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Adjusted Rand index between two label files, one label per line.
    Ari {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |t: &str| SkewError::InvalidParameter(format!("cannot parse seed list {t:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| bad(text))?;
        let hi: u64 = b.trim().parse().map_err(|_| bad(text))?;
        if hi < lo {
            return Err(bad(text));
        }
        return Ok((lo..=hi).collect());
    }
    let seeds: Vec<u64> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad(text)))
        .collect::<Result<_>>()?;
    if seeds.is_empty() {
        return Err(bad(text));
    }
    Ok(seeds)
}

fn read_label_file(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let labels: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if labels.is_empty() {
        return Err(SkewError::InvalidParameter(format!(
            "no labels in {}",
            path.display()
        )));
    }
    let mut levels = labels.clone();
    levels.sort_unstable();
    levels.dedup();
    Ok(labels
        .iter()
        .map(|l| levels.binary_search(l).unwrap())
        .collect())
}

fn cmd_fit(
    data: &Path,
    columns: &[String],
    family: Family,
    g: usize,
    seed: u64,
    max_iter: usize,
    mstep_max_iter: usize,
    rel_tol: f64,
    standardize: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let (mut values, dropped) = read_continuous_csv(data, columns)?;
    if dropped > 0 {
        eprintln!("dropped {dropped} rows with missing cells");
    }
    if standardize {
        values = standardize_columns(&values);
    }
    let cfg = FitConfig {
        g,
        max_iter,
        rel_tol,
        seed,
        init: InitStrategy::Kmeans,
        nu_floor: 1.01,
        nu_ceil: 200.0,
        mstep_max_iter,
        quad: None,
    };
    let res = fit(&values, family, &cfg)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&res.to_record())?;
    match out {
        Some(path) => fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(
    data: &Path,
    schema: &Path,
    sizes: Vec<usize>,
    seeds: &str,
    families: Vec<Family>,
    g: usize,
    max_iter: usize,
    mstep_max_iter: usize,
    out: &Path,
) -> Result<ExitCode> {
    let schema = DatasetSchema::from_json_file(schema)?;
    let ds = ingest_csv(data, &schema)?;
    if ds.dropped_rows > 0 {
        eprintln!("dropped {} incomplete rows during ingestion", ds.dropped_rows);
    }
    let cfg = SweepConfig {
        sizes,
        seeds: parse_seeds(seeds)?,
        families,
        g,
        max_iter,
        mstep_max_iter,
        ..SweepConfig::default()
    };
    fs::create_dir_all(out)?;
    let file = File::create(out.join("reports.jsonl"))?;
    let mut sink = BufWriter::new(file);
    let reports = run_experiment(&ds, &cfg, |r| {
        serde_json::to_writer(&mut sink, r)?;
        sink.write_all(b"\n")?;
        Ok(())
    })?;
    sink.flush()?;
    let summary = summarize(&reports)?;
    summary.write_csvs(out)?;
    println!(
        "{} reports; wins classical={} sdb={} ties={}",
        reports.len(),
        summary.wins.classical,
        summary.wins.sdb,
        summary.wins.ties
    );
    for row in &summary.ratios {
        println!(
            "{} d={}: sdb/classical time ratio {:.3} (sd {:.3}, {} pairs)",
            row.dataset, row.size, row.mean_ratio, row.sd_ratio, row.pairs
        );
    }
    let partial = reports
        .iter()
        .any(|r| r.family_results.values().any(|o| !o.converged));
    if partial {
        eprintln!("some fits did not converge; reports carry converged=false");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Fit {
            data,
            columns,
            family,
            g,
            seed,
            max_iter,
            mstep_max_iter,
            rel_tol,
            standardize,
            out,
        } => cmd_fit(
            &data,
            &columns,
            family.into(),
            g,
            seed,
            max_iter,
            mstep_max_iter,
            rel_tol,
            standardize,
            out.as_deref(),
        ),
        Cmd::Bench {
            data,
            schema,
            sizes,
            seeds,
            families,
            g,
            max_iter,
            mstep_max_iter,
            out,
        } => cmd_bench(
            &data,
            &schema,
            sizes,
            &seeds,
            families.into_iter().map(Family::from).collect(),
            g,
            max_iter,
            mstep_max_iter,
            &out,
        ),
        Cmd::MardiaMax { d, which, max_iter } => {
            let cfg = MardiaSearchConfig {
                fixed_delta: None,
                max_iter,
            };
            let res = maximize_sdb_mardia(d, which.into(), &cfg)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ari { pred, truth } => {
            let a = read_label_file(&pred)?;
            let b = read_label_file(&truth)?;
            let v = ari(&a, &b)?;
            println!("{v:.6}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
