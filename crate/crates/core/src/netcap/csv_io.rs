//! CSV edge lists and the per-tick metrics table.
//!
//! Column order is fixed:
//!
//! * `meeting_t<tick>.csv`: `a,b,weight` (0-based ids, `a < b`)
//! * `knowledge_t<tick>.csv`: `i,j,group,timestamp`
//! * `metrics.csv`: see [`METRICS_HEADER`]. The first ten columns describe
//!   the knowledge network (`K_dir`, `Ps` .. `PbG`) together with the
//!   meeting-network `K_undir` and `meeting_rate`; the `*_meet` columns
//!   repeat the site/link fractions for the meeting network, and `arcs` /
//!   `edges` hold the link counts. An undefined `K` is written as an empty
//!   cell.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArcInfo, KnowledgeNetwork, MeetingNetwork, Snapshot, SnapshotSeries};
use crate::error::{Error, Result};
use crate::percolation::{MetricsRow, PercolationPoint};
use crate::sim::GroupId;

pub const METRICS_HEADER: [&str; 16] = [
    "tick",
    "mk",
    "meeting_rate",
    "K_dir",
    "K_undir",
    "Ps",
    "Pb",
    "PsG",
    "PbG",
    "delta_mk",
    "Ps_meet",
    "Pb_meet",
    "PsG_meet",
    "PbG_meet",
    "arcs",
    "edges",
];

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    a: u32,
    b: u32,
    weight: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ArcRecord {
    i: u32,
    j: u32,
    group: u32,
    timestamp: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricsRecord {
    tick: u64,
    mk: f64,
    meeting_rate: f64,
    #[serde(rename = "K_dir")]
    k_dir: Option<f64>,
    #[serde(rename = "K_undir")]
    k_undir: Option<f64>,
    #[serde(rename = "Ps")]
    ps: f64,
    #[serde(rename = "Pb")]
    pb: f64,
    #[serde(rename = "PsG")]
    psg: f64,
    #[serde(rename = "PbG")]
    pbg: f64,
    delta_mk: f64,
    #[serde(rename = "Ps_meet")]
    ps_meet: f64,
    #[serde(rename = "Pb_meet")]
    pb_meet: f64,
    #[serde(rename = "PsG_meet")]
    psg_meet: f64,
    #[serde(rename = "PbG_meet")]
    pbg_meet: f64,
    arcs: u64,
    edges: u64,
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    // headers are written explicitly so empty tables still carry one
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Reader::from_reader(file))
}

pub fn meeting_file_name(tick: u64) -> String {
    format!("meeting_t{tick:08}.csv")
}

pub fn knowledge_file_name(tick: u64) -> String {
    format!("knowledge_t{tick:08}.csv")
}

pub fn write_meeting_csv(net: &MeetingNetwork, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["a", "b", "weight"])?;
    for ((a, b), weight) in net.edges() {
        w.serialize(EdgeRecord { a, b, weight })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_knowledge_csv(net: &KnowledgeNetwork, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["i", "j", "group", "timestamp"])?;
    for ((i, j), info) in net.arcs() {
        w.serialize(ArcRecord {
            i,
            j,
            group: info.group.0,
            timestamp: info.timestamp,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Node count is not stored in an edge list, so the caller supplies it.
pub fn read_meeting_csv(path: &Path, n: usize) -> Result<MeetingNetwork> {
    let mut net = MeetingNetwork::new(n);
    for rec in reader(path)?.deserialize() {
        let rec: EdgeRecord = rec?;
        net.add_meetings(rec.a, rec.b, rec.weight)?;
    }
    Ok(net)
}

pub fn read_knowledge_csv(path: &Path, n: usize) -> Result<KnowledgeNetwork> {
    let mut net = KnowledgeNetwork::new(n);
    for rec in reader(path)?.deserialize() {
        let rec: ArcRecord = rec?;
        net.insert_arc(
            rec.i,
            rec.j,
            ArcInfo {
                group: GroupId(rec.group),
                timestamp: rec.timestamp,
            },
        )?;
    }
    Ok(net)
}

/// Writes both edge lists of one snapshot into `dir`.
pub fn export_snapshot_csv(snapshot: &Snapshot, dir: &Path) -> Result<()> {
    write_meeting_csv(&snapshot.meeting, &dir.join(meeting_file_name(snapshot.tick)))?;
    write_knowledge_csv(
        &snapshot.knowledge,
        &dir.join(knowledge_file_name(snapshot.tick)),
    )
}

/// Writes every snapshot's edge lists plus `metrics.csv` into `dir`.
pub fn export_csv(series: &SnapshotSeries, rows: &[MetricsRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for snap in &series.snapshots {
        export_snapshot_csv(snap, dir)?;
    }
    write_metrics_csv(rows, &dir.join("metrics.csv"))
}

pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.serialize(MetricsRecord {
            tick: r.tick,
            mk: r.mk,
            meeting_rate: r.meeting_rate,
            k_dir: r.knowledge.k,
            k_undir: r.meeting.k,
            ps: r.knowledge.ps,
            pb: r.knowledge.pb,
            psg: r.knowledge.psg,
            pbg: r.knowledge.pbg,
            delta_mk: r.delta_mk,
            ps_meet: r.meeting.ps,
            pb_meet: r.meeting.pb,
            psg_meet: r.meeting.psg,
            pbg_meet: r.meeting.pbg,
            arcs: r.knowledge.links,
            edges: r.meeting.links,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a metrics table back. The percolating flags are rebuilt as `K > 1`.
pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut rows = Vec::new();
    for rec in reader(path)?.deserialize() {
        let r: MetricsRecord = rec?;
        let point = |k: Option<f64>, ps, pb, psg, pbg, links| PercolationPoint {
            tick: r.tick,
            k,
            percolating: k.is_some_and(|k| k > 1.0),
            ps,
            pb,
            psg,
            pbg,
            links,
        };
        rows.push(MetricsRow {
            tick: r.tick,
            mk: r.mk,
            meeting_rate: r.meeting_rate,
            delta_mk: r.delta_mk,
            knowledge: point(r.k_dir, r.ps, r.pb, r.psg, r.pbg, r.arcs),
            meeting: point(r.k_undir, r.ps_meet, r.pb_meet, r.psg_meet, r.pbg_meet, r.edges),
        });
    }
    Ok(rows)
}
