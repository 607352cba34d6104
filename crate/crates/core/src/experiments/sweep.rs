//! Replicated one-axis parameter sweeps.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{run_simulation, RunOptions, RunOutput, StopRule};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::exec::{map_jobs, Execution};
use crate::netcap::{write_metrics_csv, DiscardSnapshots};
use crate::percolation::PercolationKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "d_side")]
    DSide,
    #[serde(rename = "oh")]
    Oh,
    #[serde(rename = "pforg")]
    Pforg,
    #[serde(rename = "p_change")]
    PChange,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::N => "N",
            Self::DSide => "d_side",
            Self::Oh => "oh",
            Self::Pforg => "pforg",
            Self::PChange => "p_change",
        }
    }

    /// Returns `base` with this parameter set to `value`.
    pub fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig> {
        let int = || -> Result<u32> {
            if value.fract() != 0.0 || !(0.0..=f64::from(u32::MAX)).contains(&value) {
                return Err(Error::Config(format!(
                    "{} needs a non-negative integer, got {value}",
                    self.name()
                )));
            }
            Ok(value as u32)
        };
        let mut cfg = base.clone();
        match self {
            Self::N => cfg.n = int()?,
            Self::DSide => cfg.d_side = int()?,
            Self::Oh => cfg.oh = int()?,
            Self::Pforg => cfg.pforg = value,
            Self::PChange => {
                cfg.p_change = value;
                cfg.chgr = true;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

fn default_replicates() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub name: String,
    pub base: SimConfig,
    pub axis: SweepAxis,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    #[serde(default)]
    pub master_seed: u64,
    /// Per-cell run length; falls back to `base.max_ticks`.
    #[serde(default)]
    pub cell_max_ticks: Option<Vec<u64>>,
    #[serde(default)]
    pub stop: StopRule,
}

impl SweepSpec {
    /// Loads a spec from a `.json` or `.toml` file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let spec: SweepSpec = if is_toml {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.axis.values.is_empty() {
            return Err(Error::Config("sweep axis has no values".into()));
        }
        if let Some(ticks) = &self.cell_max_ticks {
            if ticks.len() != self.axis.values.len() {
                return Err(Error::Config(format!(
                    "cell_max_ticks has {} entries for {} axis values",
                    ticks.len(),
                    self.axis.values.len()
                )));
            }
        }
        for &v in &self.axis.values {
            self.axis.param.apply(&self.base, v)?;
        }
        Ok(())
    }

    /// Config of one cell, without the per-replicate seed.
    pub fn cell_config(&self, cell: usize) -> Result<SimConfig> {
        let mut cfg = self.axis.param.apply(&self.base, self.axis.values[cell])?;
        if let Some(ticks) = &self.cell_max_ticks {
            cfg.max_ticks = ticks[cell];
        }
        Ok(cfg)
    }

    /// Drops the cells whose value of `N` exceeds `max_n`.
    pub fn restrict_n(&mut self, max_n: u32) {
        let keep: Vec<bool> = self
            .axis
            .values
            .iter()
            .map(|&v| match self.axis.param {
                SweepParam::N => v <= f64::from(max_n),
                _ => self.base.n <= max_n,
            })
            .collect();
        let mut it = keep.iter();
        self.axis.values.retain(|_| *it.next().unwrap());
        if let Some(ticks) = &mut self.cell_max_ticks {
            let mut it = keep.iter();
            ticks.retain(|_| *it.next().unwrap());
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Engine seed of one `(cell, replicate)`. Both steps are bijections on
/// `u64` and the packed index is injective for indices below `2^32`, so
/// distinct pairs never collide under one master seed.
pub fn derive_seed(master: u64, cell: u32, replicate: u32) -> u64 {
    let packed = (u64::from(cell) << 32) | u64::from(replicate);
    splitmix64(master ^ splitmix64(packed))
}

/// Outcome of one run in a sweep. Threshold fields are absent when the
/// run failed or the condition never held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub cell: usize,
    pub value: f64,
    pub replicate: u32,
    pub seed: u64,
    pub ticks: Option<u64>,
    pub t_c_knowledge: Option<u64>,
    pub p_c_knowledge: Option<f64>,
    pub n_b_knowledge: Option<u64>,
    pub beta_knowledge: Option<f64>,
    pub class_knowledge: Option<PercolationKind>,
    pub t_c_meeting: Option<u64>,
    pub p_c_meeting: Option<f64>,
    pub n_b_meeting: Option<u64>,
    pub beta_meeting: Option<f64>,
    pub class_meeting: Option<PercolationKind>,
    pub final_mk: Option<f64>,
    pub final_meeting_rate: Option<f64>,
    pub t_mk_half: Option<u64>,
    pub t_mk_saturated: Option<u64>,
    pub t_meeting_saturated: Option<u64>,
    pub delta_mk_last: Option<f64>,
    pub delta_mk_tail_mean: Option<f64>,
    pub error: Option<String>,
}

impl RunSummary {
    fn failed(cell: usize, value: f64, replicate: u32, seed: u64, error: String) -> Self {
        Self {
            cell,
            value,
            replicate,
            seed,
            ticks: None,
            t_c_knowledge: None,
            p_c_knowledge: None,
            n_b_knowledge: None,
            beta_knowledge: None,
            class_knowledge: None,
            t_c_meeting: None,
            p_c_meeting: None,
            n_b_meeting: None,
            beta_meeting: None,
            class_meeting: None,
            final_mk: None,
            final_meeting_rate: None,
            t_mk_half: None,
            t_mk_saturated: None,
            t_meeting_saturated: None,
            delta_mk_last: None,
            delta_mk_tail_mean: None,
            error: Some(error),
        }
    }

    fn from_output(cell: usize, value: f64, replicate: u32, out: &RunOutput) -> Self {
        let (k, m) = (&out.knowledge, &out.meeting);
        Self {
            cell,
            value,
            replicate,
            seed: out.config.seed,
            ticks: Some(out.ticks),
            t_c_knowledge: k.t_c,
            p_c_knowledge: k.p_c,
            n_b_knowledge: k.n_b,
            beta_knowledge: k.beta(),
            class_knowledge: k.classification,
            t_c_meeting: m.t_c,
            p_c_meeting: m.p_c,
            n_b_meeting: m.n_b,
            beta_meeting: m.beta(),
            class_meeting: m.classification,
            final_mk: Some(out.final_mk),
            final_meeting_rate: Some(out.final_meeting_rate),
            t_mk_half: out.milestones.mk_half,
            t_mk_saturated: out.milestones.mk_saturated,
            t_meeting_saturated: out.milestones.meeting_saturated,
            delta_mk_last: Some(out.delta_mk.last),
            delta_mk_tail_mean: Some(out.delta_mk.tail_mean),
            error: None,
        }
    }
}

/// Mean, sample standard deviation and range over the replicates that
/// produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // summation error must not push the mean outside the range
        Some(Self {
            count: v.len(),
            mean: mean.clamp(min, max),
            std,
            min,
            max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub cell: usize,
    pub value: f64,
    pub runs_ok: usize,
    pub t_c_knowledge: Option<Stat>,
    pub p_c_knowledge: Option<Stat>,
    pub n_b_knowledge: Option<Stat>,
    pub t_c_meeting: Option<Stat>,
    pub p_c_meeting: Option<Stat>,
    pub final_mk: Option<Stat>,
    pub t_mk_half: Option<Stat>,
    pub delta_mk_tail_mean: Option<Stat>,
}

impl CellAggregate {
    fn of(cell: usize, value: f64, runs: &[&RunSummary]) -> Self {
        let stat = |f: &dyn Fn(&RunSummary) -> Option<f64>| Stat::of(runs.iter().filter_map(|r| f(r)));
        Self {
            cell,
            value,
            runs_ok: runs.iter().filter(|r| r.error.is_none()).count(),
            t_c_knowledge: stat(&|r| r.t_c_knowledge.map(|x| x as f64)),
            p_c_knowledge: stat(&|r| r.p_c_knowledge),
            n_b_knowledge: stat(&|r| r.n_b_knowledge.map(|x| x as f64)),
            t_c_meeting: stat(&|r| r.t_c_meeting.map(|x| x as f64)),
            p_c_meeting: stat(&|r| r.p_c_meeting),
            final_mk: stat(&|r| r.final_mk),
            t_mk_half: stat(&|r| r.t_mk_half.map(|x| x as f64)),
            delta_mk_tail_mean: stat(&|r| r.delta_mk_tail_mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub param: SweepParam,
    /// In `(cell, replicate)` order.
    pub runs: Vec<RunSummary>,
    pub cells: Vec<CellAggregate>,
}

/// Runs every `(cell, replicate)` of `spec`. Runs execute concurrently
/// under [`Execution::Parallel`]; each run is single-threaded inside.
///
/// With `out_dir`, each run's metrics go to `runs/<param>_<value>_r<rep>.csv` and
/// the result to `summary.csv`, `runs.csv` and `result.json`.
pub fn run_sweep(spec: &SweepSpec, exec: Execution, out_dir: Option<&Path>) -> Result<SweepResult> {
    spec.validate()?;
    let runs_dir = out_dir.map(|d| d.join("runs"));
    if let Some(dir) = &runs_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut jobs = Vec::new();
    for cell in 0..spec.axis.values.len() {
        let cfg = spec.cell_config(cell)?;
        for rep in 0..spec.replicates {
            let mut cfg = cfg.clone();
            cfg.seed = derive_seed(spec.master_seed, cell as u32, rep);
            jobs.push((cell, rep, cfg));
        }
    }
    let options = RunOptions {
        stop: spec.stop,
        exec: Execution::Sequential,
        log_events: false,
    };
    let runs: Vec<RunSummary> = map_jobs(exec, jobs, |(cell, rep, cfg)| {
        let value = spec.axis.values[cell];
        let outcome = run_simulation(&cfg, options, &mut DiscardSnapshots).and_then(|out| {
            if let Some(dir) = &runs_dir {
                let path = dir.join(format!("{}_{}_r{rep}.csv", spec.axis.param, value));
                write_metrics_csv(&out.rows, &path)?;
            }
            Ok(out)
        });
        match outcome {
            Ok(out) => {
                log::info!(
                    "{} {}={} rep {rep}: knowledge T_c {:?}, final MK {:.4}",
                    spec.name,
                    spec.axis.param,
                    value,
                    out.knowledge.t_c,
                    out.final_mk
                );
                RunSummary::from_output(cell, value, rep, &out)
            }
            Err(e) => {
                log::warn!("{} cell {cell} rep {rep} failed: {e}", spec.name);
                RunSummary::failed(cell, value, rep, cfg.seed, e.to_string())
            }
        }
    });

    let mut cells = Vec::new();
    for (cell, &value) in spec.axis.values.iter().enumerate() {
        let in_cell: Vec<&RunSummary> = runs.iter().filter(|r| r.cell == cell).collect();
        let agg = CellAggregate::of(cell, value, &in_cell);
        if agg.runs_ok == 0 {
            return Err(Error::CellFailed {
                cell,
                message: in_cell
                    .iter()
                    .filter_map(|r| r.error.clone())
                    .next()
                    .unwrap_or_default(),
            });
        }
        cells.push(agg);
    }
    let result = SweepResult {
        name: spec.name.clone(),
        param: spec.axis.param,
        runs,
        cells,
    };
    if let Some(dir) = out_dir {
        write_sweep_outputs(&result, dir)?;
    }
    Ok(result)
}

const STAT_COLUMNS: [&str; 8] = [
    "t_c_knowledge",
    "p_c_knowledge",
    "n_b_knowledge",
    "t_c_meeting",
    "p_c_meeting",
    "final_mk",
    "t_mk_half",
    "delta_mk_tail_mean",
];

fn write_sweep_outputs(result: &SweepResult, dir: &Path) -> Result<()> {
    let path = dir.join("summary.csv");
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec![result.param.name().to_string(), "runs_ok".to_string()];
    for c in STAT_COLUMNS {
        header.push(format!("{c}_mean"));
        header.push(format!("{c}_std"));
    }
    w.write_record(&header)?;
    for cell in &result.cells {
        let mut rec = vec![cell.value.to_string(), cell.runs_ok.to_string()];
        let stats = [
            cell.t_c_knowledge,
            cell.p_c_knowledge,
            cell.n_b_knowledge,
            cell.t_c_meeting,
            cell.p_c_meeting,
            cell.final_mk,
            cell.t_mk_half,
            cell.delta_mk_tail_mean,
        ];
        for s in stats {
            match s {
                Some(s) => {
                    rec.push(s.mean.to_string());
                    rec.push(s.std.to_string());
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("runs.csv");
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in &result.runs {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("result.json");
    let json = serde_json::to_string_pretty(result)?;
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
}
