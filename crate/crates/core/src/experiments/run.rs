//! One simulation run from config to metrics and threshold estimates.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::Result;
use crate::exec::Execution;
use crate::netcap::{capture, Snapshot, SnapshotSink};
use crate::percolation::{
    degree_distribution_fit, degree_stats, detect_threshold, largest_strong_component,
    MetricsRow, PercolationPoint, ThresholdEstimate, BETA_WINDOW,
};
use crate::sim::{Event, SimState};

/// MK and meeting-rate level treated as saturation.
pub const SATURATION: f64 = 0.999;

/// When a run may end before `max_ticks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    Never,
    /// Both MK and the meeting rate reached [`SATURATION`].
    #[default]
    Saturated,
    /// MK alone reached [`SATURATION`]. The meeting rate lags far behind
    /// on sparse grids.
    MkSaturated,
}

impl StopRule {
    fn holds(self, mk: f64, meeting_rate: f64) -> bool {
        match self {
            StopRule::Never => false,
            StopRule::Saturated => mk >= SATURATION && meeting_rate >= SATURATION,
            StopRule::MkSaturated => mk >= SATURATION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub stop: StopRule,
    pub exec: Execution,
    pub log_events: bool,
}

/// First ticks at which the MK and meeting-rate curves reach a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Milestones {
    pub mk_half: Option<u64>,
    pub mk_saturated: Option<u64>,
    pub meeting_half: Option<u64>,
    pub meeting_saturated: Option<u64>,
}

impl Milestones {
    fn observe(&mut self, tick: u64, mk: f64, meeting_rate: f64) {
        let hit = |slot: &mut Option<u64>, value: f64, level: f64| {
            if slot.is_none() && value >= level {
                *slot = Some(tick);
            }
        };
        hit(&mut self.mk_half, mk, 0.5);
        hit(&mut self.mk_saturated, mk, SATURATION);
        hit(&mut self.meeting_half, meeting_rate, 0.5);
        hit(&mut self.meeting_saturated, meeting_rate, SATURATION);
    }
}

/// Summary of the wrong-belief series over the recorded rows.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaMkSummary {
    pub last: f64,
    pub max: f64,
    /// Mean and minimum over rows in the last quarter of the run.
    pub tail_mean: f64,
    pub tail_min: f64,
}

impl DeltaMkSummary {
    fn from_rows(rows: &[MetricsRow]) -> Self {
        let Some(last) = rows.last() else {
            return Self::default();
        };
        let cutoff = last.tick - last.tick / 4;
        let tail: Vec<f64> = rows
            .iter()
            .filter(|r| r.tick >= cutoff)
            .map(|r| r.delta_mk)
            .collect();
        Self {
            last: last.delta_mk,
            max: rows.iter().map(|r| r.delta_mk).fold(0.0, f64::max),
            tail_mean: tail.iter().sum::<f64>() / tail.len() as f64,
            tail_min: tail.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: SimConfig,
    /// Ticks actually simulated.
    pub ticks: u64,
    #[serde(skip)]
    pub rows: Vec<MetricsRow>,
    pub knowledge: ThresholdEstimate,
    pub meeting: ThresholdEstimate,
    pub milestones: Milestones,
    pub final_mk: f64,
    pub final_meeting_rate: f64,
    pub delta_mk: DeltaMkSummary,
    /// Largest strongly connected component of the final knowledge network.
    pub final_strong_component: usize,
    #[serde(skip)]
    pub events: Option<Vec<Event>>,
}

/// Tracks whether a network is still in the region where every structural
/// change is worth a metrics row: below its threshold, or above it while
/// `P_b` is inside the exponent-fit window.
#[derive(Default)]
struct Dense {
    p_c: Option<f64>,
}

impl Dense {
    fn update(&mut self, percolating: bool, pb: f64) -> bool {
        if self.p_c.is_none() && percolating {
            self.p_c = Some(pb);
        }
        self.p_c.is_none_or(|p_c| pb <= BETA_WINDOW * p_c)
    }
}

/// Runs one simulation.
///
/// Metrics rows are kept at tick 0, every `metrics_every` ticks, at the
/// last tick, whenever either network's heterogeneity flag flips, and at
/// every change in link counts until the network has percolated and left
/// the exponent-fit window. Snapshots at the configured schedule are
/// handed to `sink` as they are taken.
pub fn run_simulation(
    config: &SimConfig,
    options: RunOptions,
    sink: &mut dyn SnapshotSink,
) -> Result<RunOutput> {
    let mut state = SimState::init(config)?;
    state.set_execution(options.exec);
    if options.log_events {
        state.enable_event_log();
    }
    let schedule = config.snapshot_schedule();
    let mut next_snapshot = schedule.iter().copied().peekable();

    let take_snapshot = |state: &SimState, sink: &mut dyn SnapshotSink| -> Result<()> {
        let (meeting, knowledge) = capture(state)?;
        sink.accept(Snapshot {
            tick: state.tick(),
            meeting,
            knowledge,
        })
    };

    let mut rows = vec![state.metrics_row()];
    let mut milestones = Milestones::default();
    milestones.observe(0, rows[0].mk, rows[0].meeting_rate);
    if next_snapshot.next_if_eq(&0).is_some() {
        take_snapshot(&state, sink)?;
    }

    let mut flags = state.counters().percolating();
    let mut links = (state.counters().arcs(), state.counters().edges());
    let (mut dense_k, mut dense_m) = (Dense::default(), Dense::default());
    while state.tick() < config.max_ticks {
        state.step();
        let t = state.tick();
        let c = state.counters();
        let (mk, rate) = (c.mk(), c.meeting_rate());
        milestones.observe(t, mk, rate);
        let now_flags = c.percolating();
        let now_links = (c.arcs(), c.edges());
        let (pb_k, pb_m) = c.link_fractions();
        let dense = dense_k.update(now_flags.0, pb_k) | dense_m.update(now_flags.1, pb_m);
        let stop = options.stop.holds(mk, rate);
        let keep = t % config.metrics_every == 0
            || t == config.max_ticks
            || stop
            || now_flags != flags
            || (dense && now_links != links);
        if keep {
            rows.push(state.metrics_row());
        }
        flags = now_flags;
        links = now_links;
        while next_snapshot.next_if(|&s| s <= t).is_some() {
            take_snapshot(&state, sink)?;
        }
        if stop {
            break;
        }
    }

    let (meeting_net, knowledge_net) = capture(&state)?;
    let series = |f: fn(&MetricsRow) -> PercolationPoint| rows.iter().map(f).collect::<Vec<_>>();
    let mut knowledge = detect_threshold(&series(|r| r.knowledge));
    knowledge.powerlaw_fit = degree_distribution_fit(&degree_stats(&knowledge_net));
    let mut meeting = detect_threshold(&series(|r| r.meeting));
    meeting.powerlaw_fit = degree_distribution_fit(&degree_stats(&meeting_net));
    let last = *rows.last().expect("row at tick 0");
    Ok(RunOutput {
        config: config.clone(),
        ticks: state.tick(),
        knowledge,
        meeting,
        milestones,
        final_mk: last.mk,
        final_meeting_rate: last.meeting_rate,
        delta_mk: DeltaMkSummary::from_rows(&rows),
        final_strong_component: largest_strong_component(&knowledge_net),
        events: state.take_event_log(),
        rows,
    })
}
