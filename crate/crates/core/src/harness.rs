//! Experiment driver: MSE-vs-L sweeps, timing sweeps and bound audits.
//!
//! Trials are independent work items. Trial `t` draws its matrix from seed
//! `stream_seed(master_seed, t)`, so results do not depend on how trials are
//! scheduled across worker threads. Raw rows are sorted before aggregation and
//! output.
//!
//! # Output files
//!
//! For a prefix `P`:
//!
//! * `P_raw.csv`: one row per (family, trial, N, L, algorithm) cell.
//! * `P_agg.csv`: mean and sample standard deviation per (family, N, L,
//!   algorithm).
//! * `P_plot.py`: a matplotlib script that plots `P_agg.csv`.
//!
//! Floats are written with 17 significant digits; an unbounded MSE is written
//! as `inf` and a failed cell as `nan` with the reason in `status`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fp_approx_factor, BoundsReport};
use crate::csvio::{fmt_f64, read_matrix};
use crate::error::{Error, Result};
use crate::linalg::{frame_potential, mse, Mse, NoiseModel, SensingMatrix};
use crate::matgen::{generate, stream_seed, Family, GeneratorSpec};
use crate::placement::{
    exhaustive_oracle, framesense, place, Algorithm, Objective, PlacementOptions,
};

pub const RAW_HEADER: &str = "family,N,K,L,algorithm,trial,seed,mse,fp,wall_time_seconds,status";
pub const AGG_HEADER: &str =
    "family,N,K,L,algorithm,count,n_unbounded,n_failed,mse_mean,mse_std,fp_mean,fp_std,time_mean,time_std";
pub const AUDIT_HEADER: &str = "family,trial,seed,N,K,L,gamma,eta,l_min,l_max,l_mean,d,delta,\
lemma3_lower,lemma3_upper,fp_greedy,fp_opt,fp_ratio,fp_pass,mse_greedy,mse_opt,lemma3_pass,eta_pass,skip_reason";
pub const AUDIT_AGG_HEADER: &str =
    "family,N,K,L,instances,skipped,fp_pass,lemma3_pass,eta_checked,eta_pass";

/// Relative slack allowed when checking MSE containment in the bound
/// interval; the bounds coincide with the MSE on tight frames.
pub const LEMMA3_REL_TOL: f64 = 1e-9;

/// Where each trial's matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    /// A fixed matrix read from a CSV file; every trial reuses it.
    File { csv: PathBuf },
    /// A fresh seeded matrix per trial and family.
    Generated {
        families: Vec<Family>,
        n: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        entry_std: Option<f64>,
    },
}

fn default_trials() -> usize {
    100
}
fn default_sigma2() -> f64 {
    1.0
}
fn default_threads() -> usize {
    1
}
fn default_l_fraction() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}

/// Sweep description, read from JSON with these exact keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    /// Sensor counts for `sweep-mse` and `audit`.
    #[serde(default)]
    pub l_values: Vec<usize>,
    /// Problem sizes for `sweep-time`; `L = ceil(l_fraction · N)`.
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default = "default_l_fraction")]
    pub l_fraction: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Run FrameSense on row-normalized copies (sweeps only).
    #[serde(default = "default_true")]
    pub normalize_rows: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    fn base(matrix: MatrixSource) -> Self {
        Self {
            matrix,
            l_values: Vec::new(),
            n_values: Vec::new(),
            l_fraction: 0.5,
            trials: 100,
            algorithms: Vec::new(),
            sigma2: 1.0,
            master_seed: 1,
            threads: 1,
            normalize_rows: true,
            output: None,
        }
    }

    /// N = 100, K = 30, L ∈ {30, 35, …, 60}, 100 trials, the four random
    /// families and every greedy baseline plus random placement.
    pub fn mse_sweep_default() -> Self {
        Self {
            l_values: (30..=60).step_by(5).collect(),
            algorithms: vec![
                Algorithm::FrameSense,
                Algorithm::Det,
                Algorithm::Mse,
                Algorithm::Mi,
                Algorithm::Random,
            ],
            ..Self::base(MatrixSource::Generated {
                families: vec![
                    Family::Gaussian,
                    Family::GaussianRowNormalized,
                    Family::RandomTightFrame,
                    Family::Bernoulli,
                ],
                n: 100,
                k: 30,
                scale: None,
                entry_std: None,
            })
        }
    }

    /// Gaussian K = 10, N ∈ {20, 50, …, 200}, L = ⌈N/2⌉, 100 trials.
    pub fn timing_sweep_default() -> Self {
        Self {
            n_values: (20..=200).step_by(30).collect(),
            algorithms: vec![
                Algorithm::FrameSense,
                Algorithm::Det,
                Algorithm::Mse,
                Algorithm::Mi,
                Algorithm::Random,
            ],
            ..Self::base(MatrixSource::Generated {
                families: vec![Family::Gaussian],
                n: 0,
                k: 10,
                scale: None,
                entry_std: None,
            })
        }
    }

    /// Gaussian N = 12, K = 4, L = 6, 100 trials.
    pub fn audit_default() -> Self {
        Self {
            l_values: vec![6],
            algorithms: vec![Algorithm::FrameSense],
            ..Self::base(MatrixSource::Generated {
                families: vec![Family::Gaussian],
                n: 12,
                k: 4,
                scale: None,
                entry_std: None,
            })
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn check_common(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.threads == 0 {
            return bad("threads must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms given".into());
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return bad(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if let MatrixSource::Generated { families, .. } = &self.matrix {
            if families.is_empty() {
                return bad("no matrix families given".into());
            }
        }
        Ok(())
    }

    fn check_sensor_counts(&self, n: usize, k: usize, ls: &[usize]) -> Result<()> {
        for &l in ls {
            for &a in &self.algorithms {
                let (min, max) = a.sensor_range(n, k);
                if l < min || l > max {
                    return Err(Error::SensorCount { l, min, max });
                }
            }
        }
        Ok(())
    }
}

/// One trial's matrix and where it came from.
struct Instance {
    family: String,
    trial: usize,
    seed: u64,
    psi: SensingMatrix,
}

/// Work items as (family index, trial, family).
fn instances_for(cfg: &ExperimentConfig) -> Vec<(usize, usize, Option<Family>)> {
    let mut items = Vec::new();
    match &cfg.matrix {
        MatrixSource::Generated { families, .. } => {
            for (fi, f) in families.iter().enumerate() {
                for t in 0..cfg.trials {
                    items.push((fi, t, Some(*f)));
                }
            }
        }
        MatrixSource::File { .. } => {
            for t in 0..cfg.trials {
                items.push((0, t, None));
            }
        }
    }
    items
}

fn make_instance(
    cfg: &ExperimentConfig,
    family: Option<Family>,
    n: usize,
    trial: usize,
    fixed: Option<&SensingMatrix>,
) -> Result<Instance> {
    let seed = stream_seed(cfg.master_seed, trial as u64);
    match (family, &cfg.matrix) {
        (
            Some(f),
            MatrixSource::Generated {
                k,
                scale,
                entry_std,
                ..
            },
        ) => {
            let spec = GeneratorSpec {
                family: f,
                n,
                k: *k,
                seed,
                scale: *scale,
                entry_std: *entry_std,
            };
            Ok(Instance {
                family: f.name().to_string(),
                trial,
                seed,
                psi: generate(&spec)?,
            })
        }
        _ => Ok(Instance {
            family: "file".to_string(),
            trial,
            seed,
            psi: fixed.expect("file source loaded").clone(),
        }),
    }
}

fn load_fixed(cfg: &ExperimentConfig) -> Result<Option<SensingMatrix>> {
    match &cfg.matrix {
        MatrixSource::File { csv } => Ok(Some(read_matrix(csv)?)),
        MatrixSource::Generated { .. } => Ok(None),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub algorithm: Algorithm,
    pub trial: usize,
    /// Seed the trial's matrix was generated from.
    pub seed: u64,
    pub mse: Mse,
    pub fp: f64,
    pub wall_time_seconds: f64,
    /// `ok`, or the error that stopped this cell.
    pub status: String,
}

impl ResultRow {
    fn failed(&self) -> bool {
        self.status != "ok"
    }

    pub fn csv(&self) -> String {
        let mse = if self.failed() {
            "nan".to_string()
        } else {
            fmt_f64(self.mse.value())
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.k,
            self.l,
            self.algorithm,
            self.trial,
            self.seed,
            mse,
            fmt_f64(self.fp),
            fmt_f64(self.wall_time_seconds),
            csv_escape(&self.status),
        )
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Mean and sample standard deviation (`n − 1`; zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggRow {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub algorithm: Algorithm,
    pub count: usize,
    pub n_unbounded: usize,
    pub n_failed: usize,
    /// `inf` as soon as one trial has an unbounded MSE.
    pub mse_mean: f64,
    pub mse_std: f64,
    pub fp_mean: f64,
    pub fp_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
}

impl AggRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.k,
            self.l,
            self.algorithm,
            self.count,
            self.n_unbounded,
            self.n_failed,
            fmt_f64(self.mse_mean),
            fmt_f64(self.mse_std),
            fmt_f64(self.fp_mean),
            fmt_f64(self.fp_std),
            fmt_f64(self.time_mean),
            fmt_f64(self.time_std),
        )
    }
}

/// Raw rows in canonical order plus their aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub raw: Vec<ResultRow>,
    pub agg: Vec<AggRow>,
    kind: TableKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TableKind {
    MseSweep,
    TimingSweep,
}

impl ResultTable {
    fn new(raw: Vec<ResultRow>, kind: TableKind) -> Self {
        let agg = aggregate(&raw);
        Self { raw, agg, kind }
    }

    pub fn raw_csv(&self) -> String {
        let mut out = String::from(RAW_HEADER);
        out.push('\n');
        for r in &self.raw {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    pub fn agg_csv(&self) -> String {
        let mut out = String::from(AGG_HEADER);
        out.push('\n');
        for r in &self.agg {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    /// Aggregate row for `(family, N, L, algorithm)`.
    pub fn find(&self, family: &str, n: usize, l: usize, algorithm: Algorithm) -> Option<&AggRow> {
        self.agg
            .iter()
            .find(|a| a.family == family && a.n == n && a.l == l && a.algorithm == algorithm)
    }

    /// Writes `<prefix>_raw.csv`, `<prefix>_agg.csv` and `<prefix>_plot.py`.
    pub fn write(&self, prefix: &str) -> Result<Vec<PathBuf>> {
        let script = match self.kind {
            TableKind::MseSweep => plot_script(prefix, "L", "mse_mean", "mean MSE", true),
            TableKind::TimingSweep => {
                plot_script(prefix, "N", "time_mean", "mean wall time [s]", true)
            }
        };
        write_outputs(prefix, &self.raw_csv(), &self.agg_csv(), &script)
    }
}

fn write_outputs(prefix: &str, raw: &str, agg: &str, script: &str) -> Result<Vec<PathBuf>> {
    let paths = [
        PathBuf::from(format!("{prefix}_raw.csv")),
        PathBuf::from(format!("{prefix}_agg.csv")),
        PathBuf::from(format!("{prefix}_plot.py")),
    ];
    if let Some(dir) = paths[0].parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&paths[0], raw)?;
    fs::write(&paths[1], agg)?;
    fs::write(&paths[2], script)?;
    Ok(paths.to_vec())
}

fn plot_script(prefix: &str, x: &str, y: &str, ylabel: &str, log_y: bool) -> String {
    let base = Path::new(prefix)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| prefix.to_string());
    format!(
        r#"#!/usr/bin/env python3
# Plots {base}_agg.csv: one panel per matrix family, one curve per algorithm.
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, "{base}_agg.csv")
curves = defaultdict(lambda: defaultdict(list))
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        y = float(row["{y}"])
        std = float(row["{y_std}"])
        curves[row["family"]][row["algorithm"]].append((int(row["{x}"]), y, std))

families = sorted(curves)
fig, axes = plt.subplots(1, len(families), figsize=(5 * len(families), 4), squeeze=False)
for ax, fam in zip(axes[0], families):
    for algo, pts in sorted(curves[fam].items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        hi = [p[1] + p[2] for p in pts]
        ax.plot(xs, ys, marker="o", label=algo)
        ax.fill_between(xs, ys, hi, alpha=0.15)
    ax.set_title(fam)
    ax.set_xlabel("{x}")
    ax.set_ylabel("{ylabel}")
    if {log_y}:
        ax.set_yscale("log")
    ax.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{base}.png")
fig.savefig(out, dpi=120)
print(out)
"#,
        base = base,
        x = x,
        y = y,
        y_std = y.replace("_mean", "_std"),
        ylabel = ylabel,
        log_y = if log_y { "True" } else { "False" },
    )
}

fn aggregate(raw: &[ResultRow]) -> Vec<AggRow> {
    let mut agg: Vec<AggRow> = Vec::new();
    let mut start = 0;
    while start < raw.len() {
        let head = &raw[start];
        let same = |r: &ResultRow| {
            r.family == head.family
                && r.n == head.n
                && r.l == head.l
                && r.algorithm == head.algorithm
        };
        let mut end = start;
        while end < raw.len() && same(&raw[end]) {
            end += 1;
        }
        let group = &raw[start..end];
        let ok: Vec<&ResultRow> = group.iter().filter(|r| !r.failed()).collect();
        let n_unbounded = ok.iter().filter(|r| !r.mse.is_finite()).count();
        let (mse_mean, mse_std) = if n_unbounded > 0 {
            (f64::INFINITY, f64::NAN)
        } else {
            mean_std(&ok.iter().map(|r| r.mse.value()).collect::<Vec<_>>())
        };
        let (fp_mean, fp_std) = mean_std(&ok.iter().map(|r| r.fp).collect::<Vec<_>>());
        let (time_mean, time_std) =
            mean_std(&ok.iter().map(|r| r.wall_time_seconds).collect::<Vec<_>>());
        agg.push(AggRow {
            family: head.family.clone(),
            n: head.n,
            k: head.k,
            l: head.l,
            algorithm: head.algorithm,
            count: group.len(),
            n_unbounded,
            n_failed: group.len() - ok.len(),
            mse_mean,
            mse_std,
            fp_mean,
            fp_std,
            time_mean,
            time_std,
        });
        start = end;
    }
    agg
}

/// Runs one placement cell and evaluates it on the original matrix.
fn run_cell(
    inst: &Instance,
    l: usize,
    algorithm: Algorithm,
    cfg: &ExperimentConfig,
    noise: NoiseModel,
    warm_up: bool,
) -> ResultRow {
    let opts = PlacementOptions {
        normalize_rows: cfg.normalize_rows,
        algorithm,
        seed: stream_seed(inst.seed, l as u64),
        sigma2: cfg.sigma2,
        ridge: None,
    };
    if warm_up {
        let _ = place(&inst.psi, l, &opts);
    }
    let start = Instant::now();
    let placed = place(&inst.psi, l, &opts);
    let elapsed = start.elapsed().as_secs_f64();
    let evaluated = placed.and_then(|sel| {
        let mse = mse(&inst.psi, &sel.chosen, noise)?;
        let fp = frame_potential(&inst.psi, &sel.chosen)?;
        Ok((mse, fp))
    });
    let (mse, fp, status) = match evaluated {
        Ok((m, f)) => (m, f, "ok".to_string()),
        Err(e) => (Mse::Unbounded, f64::NAN, e.to_string()),
    };
    ResultRow {
        family: inst.family.clone(),
        n: inst.psi.n_rows(),
        k: inst.psi.n_cols(),
        l,
        algorithm,
        trial: inst.trial,
        seed: inst.seed,
        mse,
        fp,
        wall_time_seconds: elapsed,
        status,
    }
}

fn sort_rows(rows: &mut [ResultRow], cfg: &ExperimentConfig) {
    let family_rank = |f: &str| -> usize {
        match &cfg.matrix {
            MatrixSource::Generated { families, .. } => families
                .iter()
                .position(|x| x.name() == f)
                .unwrap_or(usize::MAX),
            MatrixSource::File { .. } => 0,
        }
    };
    let algo_rank = |a: Algorithm| {
        cfg.algorithms
            .iter()
            .position(|&x| x == a)
            .unwrap_or(usize::MAX)
    };
    rows.sort_by_key(|r| {
        (
            family_rank(&r.family),
            r.n,
            r.l,
            algo_rank(r.algorithm),
            r.trial,
        )
    });
}

/// MSE as a function of the number of sensors, for every configured family
/// and algorithm. Cells that fail are recorded, not fatal.
pub fn sweep_mse_vs_l(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check_common()?;
    if cfg.l_values.is_empty() {
        return Err(Error::InvalidParameter("l_values is empty".into()));
    }
    let fixed = load_fixed(cfg)?;
    let (n, k) = match (&cfg.matrix, &fixed) {
        (MatrixSource::Generated { n, k, .. }, _) => (*n, *k),
        (_, Some(m)) => (m.n_rows(), m.n_cols()),
        _ => unreachable!(),
    };
    cfg.check_sensor_counts(n, k, &cfg.l_values)?;
    let noise = NoiseModel::new(cfg.sigma2)?;
    let items = instances_for(cfg);

    let run = || -> Result<Vec<Vec<ResultRow>>> {
        items
            .par_iter()
            .map(|&(_, trial, family)| {
                let inst = make_instance(cfg, family, n, trial, fixed.as_ref())?;
                let mut rows = Vec::with_capacity(cfg.l_values.len() * cfg.algorithms.len());
                for &l in &cfg.l_values {
                    for &a in &cfg.algorithms {
                        rows.push(run_cell(&inst, l, a, cfg, noise, false));
                    }
                }
                Ok(rows)
            })
            .collect()
    };
    let mut rows: Vec<ResultRow> = pool(cfg.threads)?
        .install(run)?
        .into_iter()
        .flatten()
        .collect();
    sort_rows(&mut rows, cfg);
    Ok(ResultTable::new(rows, TableKind::MseSweep))
}

/// Wall time per placement as a function of `N`, with `L = ⌈l_fraction·N⌉`.
/// Always single-threaded; each timed call follows one untimed warm-up.
pub fn sweep_timing(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.check_common()?;
    if cfg.n_values.is_empty() {
        return Err(Error::InvalidParameter("n_values is empty".into()));
    }
    if !(cfg.l_fraction > 0.0 && cfg.l_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "l_fraction must lie in (0, 1], got {}",
            cfg.l_fraction
        )));
    }
    let k = match &cfg.matrix {
        MatrixSource::Generated { k, .. } => *k,
        MatrixSource::File { .. } => {
            return Err(Error::InvalidParameter(
                "timing sweeps need a generated matrix source".into(),
            ))
        }
    };
    let noise = NoiseModel::new(cfg.sigma2)?;
    let l_for = |n: usize| (cfg.l_fraction * n as f64).ceil() as usize;
    for &n in &cfg.n_values {
        cfg.check_sensor_counts(n, k, &[l_for(n)])?;
    }

    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        for (_, trial, family) in instances_for(cfg) {
            let inst = make_instance(cfg, family, n, trial, None)?;
            for &a in &cfg.algorithms {
                rows.push(run_cell(&inst, l_for(n), a, cfg, noise, true));
            }
        }
    }
    sort_rows(&mut rows, cfg);
    Ok(ResultTable::new(rows, TableKind::TimingSweep))
}

/// One audited instance: FrameSense against the exhaustive optimum and every
/// bound evaluated at its selection.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub family: String,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub report: Option<BoundsReport>,
    pub fp_greedy: f64,
    pub fp_opt: f64,
    pub mse_greedy: Mse,
    pub mse_opt: f64,
    /// `FP(greedy) ≤ γ · FP(opt)`, compared exactly.
    pub fp_pass: bool,
    pub lemma3_pass: bool,
    /// `MSE(greedy) ≤ η · MSE(opt)`, when `η` is defined.
    pub eta_pass: Option<bool>,
    pub skip_reason: Option<String>,
}

impl AuditRow {
    pub fn skipped(&self) -> bool {
        self.skip_reason.is_some()
    }

    pub fn csv(&self) -> String {
        let prefix = format!("{},{},{}", self.family, self.trial, self.seed);
        let bounds = match &self.report {
            Some(r) => r.csv_row(),
            None => format!("{},{},{}{}", self.n, self.k, self.l, ",nan".repeat(9)),
        };
        let flag = |b: bool| if b { "1" } else { "0" };
        let fp_ratio = self.fp_greedy / self.fp_opt;
        format!(
            "{prefix},{bounds},{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.fp_greedy),
            fmt_f64(self.fp_opt),
            fmt_f64(fp_ratio),
            flag(self.fp_pass),
            fmt_f64(self.mse_greedy.value()),
            fmt_f64(self.mse_opt),
            flag(self.lemma3_pass),
            self.eta_pass.map_or("", flag),
            csv_escape(self.skip_reason.as_deref().unwrap_or("")),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditTable {
    pub rows: Vec<AuditRow>,
}

impl AuditTable {
    pub fn raw_csv(&self) -> String {
        let mut out = String::from(AUDIT_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    /// Pass counts per (family, N, K, L).
    pub fn agg_csv(&self) -> String {
        let mut out = String::from(AUDIT_AGG_HEADER);
        out.push('\n');
        let mut start = 0;
        while start < self.rows.len() {
            let h = &self.rows[start];
            let mut end = start;
            while end < self.rows.len()
                && self.rows[end].family == h.family
                && self.rows[end].n == h.n
                && self.rows[end].l == h.l
            {
                end += 1;
            }
            let g = &self.rows[start..end];
            let done: Vec<&AuditRow> = g.iter().filter(|r| !r.skipped()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                h.family,
                h.n,
                h.k,
                h.l,
                g.len(),
                g.len() - done.len(),
                done.iter().filter(|r| r.fp_pass).count(),
                done.iter().filter(|r| r.lemma3_pass).count(),
                done.iter().filter(|r| r.eta_pass.is_some()).count(),
                done.iter().filter(|r| r.eta_pass == Some(true)).count(),
            );
            start = end;
        }
        out
    }

    pub fn write(&self, prefix: &str) -> Result<Vec<PathBuf>> {
        write_outputs(
            prefix,
            &self.raw_csv(),
            &self.agg_csv(),
            &audit_plot_script(prefix),
        )
    }
}

fn audit_plot_script(prefix: &str) -> String {
    let base = Path::new(prefix)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| prefix.to_string());
    format!(
        r#"#!/usr/bin/env python3
# Scatter of FP(greedy)/FP(opt) against gamma from {base}_raw.csv.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
xs, ys = [], []
with open(os.path.join(here, "{base}_raw.csv"), newline="") as fh:
    for row in csv.DictReader(fh):
        if row["skip_reason"]:
            continue
        xs.append(float(row["gamma"]))
        ys.append(float(row["fp_ratio"]))
fig, ax = plt.subplots(figsize=(5, 4))
ax.scatter(xs, ys, s=10)
lim = max(xs + ys + [1.0])
ax.plot([1, lim], [1, lim], "k--", lw=1, label="ratio = gamma")
ax.set_xlabel("gamma")
ax.set_ylabel("FP(greedy) / FP(opt)")
ax.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{base}.png")
fig.savefig(out, dpi=120)
print(out)
"#
    )
}

fn audit_instance(inst: &Instance, l: usize, noise: NoiseModel) -> Result<AuditRow> {
    let psi = &inst.psi;
    let mut row = AuditRow {
        family: inst.family.clone(),
        trial: inst.trial,
        seed: inst.seed,
        n: psi.n_rows(),
        k: psi.n_cols(),
        l,
        report: None,
        fp_greedy: f64::NAN,
        fp_opt: f64::NAN,
        mse_greedy: Mse::Unbounded,
        mse_opt: f64::NAN,
        fp_pass: false,
        lemma3_pass: false,
        eta_pass: None,
        skip_reason: None,
    };
    let fp_oracle = match exhaustive_oracle(psi, l, Objective::FramePotential) {
        Ok(o) => o,
        Err(e @ Error::EnumerationGuard { .. }) => {
            row.skip_reason = Some(e.to_string());
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    let mse_oracle = exhaustive_oracle(psi, l, Objective::Mse)?;

    // The FP guarantee concerns greedy elimination on Ψ itself.
    let opts = PlacementOptions {
        normalize_rows: false,
        ..PlacementOptions::default()
    };
    let sel = framesense(psi, l, &opts)?;
    let gamma = fp_approx_factor(psi, l)?;
    let report = BoundsReport::compute(psi, &sel.chosen)?;

    row.fp_greedy = frame_potential(psi, &sel.chosen)?;
    row.fp_opt = fp_oracle.value;
    row.fp_pass = row.fp_greedy <= gamma * row.fp_opt;
    row.mse_greedy = mse(psi, &sel.chosen, noise)?;
    row.mse_opt = noise.sigma2() * mse_oracle.value;
    row.lemma3_pass = match (row.mse_greedy, report.lemma3_upper) {
        (Mse::Finite(m), Mse::Finite(hi)) => {
            let m = m / noise.sigma2();
            m >= report.lemma3_lower * (1.0 - LEMMA3_REL_TOL) && m <= hi * (1.0 + LEMMA3_REL_TOL)
        }
        (Mse::Finite(m), Mse::Unbounded) => {
            m / noise.sigma2() >= report.lemma3_lower * (1.0 - LEMMA3_REL_TOL)
        }
        (Mse::Unbounded, upper) => !upper.is_finite(),
    };
    row.eta_pass = report
        .eta
        .map(|eta| row.mse_greedy.value() <= eta * row.mse_opt * (1.0 + LEMMA3_REL_TOL));
    row.report = Some(report);
    Ok(row)
}

/// FrameSense against the exhaustive optimum, with γ, δ, η and the MSE
/// interval for every instance. Instances beyond the enumeration guard are
/// kept with a skip reason.
pub fn oracle_audit(cfg: &ExperimentConfig) -> Result<AuditTable> {
    cfg.check_common()?;
    if cfg.l_values.is_empty() {
        return Err(Error::InvalidParameter("l_values is empty".into()));
    }
    let fixed = load_fixed(cfg)?;
    let (n, k) = match (&cfg.matrix, &fixed) {
        (MatrixSource::Generated { n, k, .. }, _) => (*n, *k),
        (_, Some(m)) => (m.n_rows(), m.n_cols()),
        _ => unreachable!(),
    };
    let (min, max) = Algorithm::FrameSense.sensor_range(n, k);
    if let Some(&l) = cfg.l_values.iter().find(|&&l| l < min || l > max) {
        return Err(Error::SensorCount { l, min, max });
    }
    let noise = NoiseModel::new(cfg.sigma2)?;
    let items = instances_for(cfg);
    let run = || -> Result<Vec<Vec<AuditRow>>> {
        items
            .par_iter()
            .map(|&(_, trial, family)| {
                let inst = make_instance(cfg, family, n, trial, fixed.as_ref())?;
                cfg.l_values
                    .iter()
                    .map(|&l| audit_instance(&inst, l, noise))
                    .collect()
            })
            .collect()
    };
    let mut rows: Vec<AuditRow> = pool(cfg.threads)?
        .install(run)?
        .into_iter()
        .flatten()
        .collect();
    let family_rank = |f: &str| match &cfg.matrix {
        MatrixSource::Generated { families, .. } => families
            .iter()
            .position(|x| x.name() == f)
            .unwrap_or(usize::MAX),
        MatrixSource::File { .. } => 0,
    };
    rows.sort_by_key(|r| (family_rank(&r.family), r.l, r.trial));
    Ok(AuditTable { rows })
}
