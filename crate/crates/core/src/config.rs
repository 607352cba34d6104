//! Simulation parameters.
//!
//! Field names mirror the configuration file keys exactly, so a JSON or
//! TOML file with `{"d_side": 5000, "N": 1000, ...}` deserializes directly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance used to decide whether two agents are within overhearing range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    /// L-infinity distance on cells; `oh = 0` means same cell.
    #[default]
    Chebyshev,
    /// Euclidean distance on cell coordinates.
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Grid side length; the environment is `d_side x d_side` cells on a torus.
    pub d_side: u32,
    /// Number of groups.
    pub ng: u32,
    /// Number of agents.
    #[serde(rename = "N")]
    pub n: u32,
    /// Mobility: maximum cells moved per axis per tick.
    pub m: u32,
    /// Overhearing radius in cells.
    pub oh: u32,
    /// Per-agent, per-tick probability of forgetting one known agent.
    pub pforg: f64,
    /// Enables random group changes.
    pub chgr: bool,
    /// Per-agent, per-tick probability of switching group when `chgr` is set.
    pub p_change: f64,
    pub seed: u64,
    pub max_ticks: u64,
    /// Ticks at which full networks are captured, in addition to the
    /// geometric schedule when `geometric_snapshots` is set.
    pub snapshot_ticks: Vec<u64>,
    pub geometric_snapshots: bool,
    pub metric: DistanceMetric,
    /// Row cadence of the metrics series. Rows are also kept whenever a
    /// threshold flag flips and at every link change near a threshold.
    pub metrics_every: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            d_side: 5000,
            ng: 2,
            n: 1000,
            m: 1,
            oh: 0,
            pforg: 0.0,
            chgr: false,
            p_change: 0.001,
            seed: 0,
            max_ticks: 100_000,
            snapshot_ticks: Vec::new(),
            geometric_snapshots: true,
            metric: DistanceMetric::Chebyshev,
            metrics_every: 100,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if self.d_side == 0 {
            return Err(Error::Config("d_side must be at least 1".into()));
        }
        if self.ng == 0 {
            return Err(Error::Config("ng must be at least 1".into()));
        }
        check_probability("pforg", self.pforg)?;
        check_probability("p_change", self.p_change)?;
        if self.metrics_every == 0 {
            return Err(Error::Config("metrics_every must be at least 1".into()));
        }
        if self.snapshot_ticks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "snapshot_ticks must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    /// Loads a config from a `.json` or `.toml` file. Missing keys take
    /// their default values.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let is_toml = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let config: SimConfig = if is_toml {
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Every tick at which a snapshot is captured, sorted and deduplicated.
    /// Always includes tick 0.
    pub fn snapshot_schedule(&self) -> Vec<u64> {
        let mut ticks = vec![0];
        if self.geometric_snapshots {
            let mut t = 1u64;
            while t <= self.max_ticks {
                ticks.push(t);
                t = match t.checked_mul(2) {
                    Some(next) => next,
                    None => break,
                };
            }
        }
        ticks.extend(self.snapshot_ticks.iter().copied().filter(|&t| t <= self.max_ticks));
        ticks.sort_unstable();
        ticks.dedup();
        ticks
    }

    /// Number of possible directed links, `N(N-1)`.
    pub fn possible_arcs(&self) -> u64 {
        let n = u64::from(self.n);
        n * n.saturating_sub(1)
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}
