//! Offline re-analysis of a run directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use mkperc_core::netcap::{
    read_knowledge_csv, read_meeting_csv, read_metrics_csv, read_pajek, LinkGraph,
};
use mkperc_core::percolation::{
    degree_distribution_fit, degree_stats, detect_threshold, largest_strong_component,
    percolation_point, LineFit, PercolationPoint, ThresholdEstimate,
};
use mkperc_core::SimConfig;

use crate::{read_json, Failure};

#[derive(Serialize)]
struct SnapshotReport {
    file: String,
    network: &'static str,
    tick: u64,
    point: PercolationPoint,
    powerlaw_fit: Option<LineFit>,
    largest_strong_component: usize,
}

#[derive(Serialize)]
struct Report {
    knowledge: Option<ThresholdEstimate>,
    meeting: Option<ThresholdEstimate>,
    snapshots: Vec<SnapshotReport>,
}

/// `meeting_t00000016.net` -> `("meeting", 16)`.
fn parse_name(path: &Path) -> Option<(&'static str, u64)> {
    let stem = path.file_stem()?.to_str()?;
    let (kind, tick) = stem.split_once("_t")?;
    let kind = match kind {
        "meeting" => "meeting",
        "knowledge" => "knowledge",
        _ => return None,
    };
    Some((kind, tick.parse().ok()?))
}

fn report<G: LinkGraph>(path: &Path, network: &'static str, tick: u64, g: &G) -> SnapshotReport {
    SnapshotReport {
        file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        network,
        tick,
        point: percolation_point(g, tick),
        powerlaw_fit: degree_distribution_fit(&degree_stats(g)),
        largest_strong_component: largest_strong_component(g),
    }
}

pub fn cmd_analyze(input: &Path, out: Option<&Path>) -> Result<(), Failure> {
    if !input.is_dir() {
        return Err(crate::config_failure(format!("{} is not a directory", input.display())));
    }
    let metrics = input.join("metrics.csv");
    let (knowledge, meeting) = if metrics.is_file() {
        let rows = read_metrics_csv(&metrics)?;
        let k: Vec<_> = rows.iter().map(|r| r.knowledge).collect();
        let m: Vec<_> = rows.iter().map(|r| r.meeting).collect();
        (Some(detect_threshold(&k)), Some(detect_threshold(&m)))
    } else {
        (None, None)
    };

    // Pajek files carry their own node count; CSV edge lists need the config.
    let config: Option<SimConfig> = {
        let path = input.join("config.json");
        path.is_file().then(|| read_json(&path)).transpose()?
    };
    let snap_dir = input.join("snapshots");
    let mut files: Vec<PathBuf> = match std::fs::read_dir(&snap_dir) {
        Ok(entries) => entries.filter_map(|e| e.ok().map(|e| e.path())).collect(),
        Err(_) => Vec::new(),
    };
    files.sort();
    let has_pajek = files.iter().any(|p| p.extension().is_some_and(|e| e == "net"));
    let mut snapshots = Vec::new();
    for path in &files {
        let Some((network, tick)) = parse_name(path) else {
            continue;
        };
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        match (ext, has_pajek) {
            ("net", true) => {
                let g = read_pajek(path)?;
                let r = if g.directed {
                    report(path, network, tick, &g.into_knowledge()?)
                } else {
                    report(path, network, tick, &g.into_meeting()?)
                };
                snapshots.push(r);
            }
            ("csv", false) => {
                let n = config
                    .as_ref()
                    .ok_or_else(|| crate::config_failure("CSV snapshots need config.json for N"))?
                    .n as usize;
                let r = if network == "meeting" {
                    report(path, network, tick, &read_meeting_csv(path, n)?)
                } else {
                    report(path, network, tick, &read_knowledge_csv(path, n)?)
                };
                snapshots.push(r);
            }
            _ => {}
        }
    }
    if knowledge.is_none() && snapshots.is_empty() {
        return Err(crate::config_failure(format!(
            "{} holds neither metrics.csv nor snapshots",
            input.display()
        )));
    }
    let report = Report {
        knowledge,
        meeting,
        snapshots,
    };
    let dest = out.map_or_else(|| input.join("analysis.json"), Path::to_path_buf);
    let text = serde_json::to_string_pretty(&report).map_err(mkperc_core::Error::from)?;
    std::fs::write(&dest, text + "\n").map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", dest.display()),
    })?;
    for (name, est) in [("knowledge", &report.knowledge), ("meeting", &report.meeting)] {
        if let Some(e) = est {
            println!(
                "{name}: T_c {}  p_c {}  N_b {}  class {}",
                crate::fmt_opt(e.t_c),
                e.p_c.map_or("-".into(), |p| format!("{p:.3e}")),
                crate::fmt_opt(e.n_b),
                e.classification.map_or("-".into(), |c| c.to_string()),
            );
        }
    }
    println!("{} snapshots analyzed, report in {}", report.snapshots.len(), dest.display());
    Ok(())
}
