//! Named presets for the standard experimental campaigns.
//!
//! Run lengths are five times the reference threshold tick of the nearest
//! published setting; runs stop early once MK and the meeting rate both
//! saturate.

use serde::{Deserialize, Serialize};

use super::run::StopRule;
use super::sweep::{SweepAxis, SweepParam, SweepSpec};
use crate::config::SimConfig;
use crate::error::{Error, Result};

/// Reference threshold ticks by population (`d = 5000`, `oh = 0`).
const TC_BY_N: [(f64, u64); 3] = [(1e3, 18_000), (1e4, 1_800), (1e5, 180)];
/// Reference threshold ticks by grid side (`N = 1000`, `oh = 0`).
const TC_BY_D: [(f64, u64); 3] = [(1000.0, 800), (5000.0, 18_000), (10_000.0, 70_000)];
/// Reference threshold ticks by overhearing radius (`N = 1000`, `d = 5000`).
const TC_BY_OH: [(f64, u64); 5] = [(0.0, 18_000), (1.0, 2_000), (2.0, 800), (3.0, 300), (4.0, 200)];

/// Tick budget of the forgetting and churn campaigns at `oh = 3`. Five
/// times the reference threshold (1500 ticks) is far too short for MK to
/// rise; without forgetting MK saturates after roughly 950k ticks at
/// `N = 1000`, so these presets run one million.
pub const LONG_BUDGET_OH3: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub sweeps: Vec<SweepSpec>,
}

fn base() -> SimConfig {
    SimConfig {
        d_side: 5000,
        ng: 2,
        n: 1000,
        m: 1,
        oh: 0,
        pforg: 0.0,
        chgr: false,
        ..SimConfig::default()
    }
}

fn budget(table: &[(f64, u64)]) -> Vec<u64> {
    table.iter().map(|&(_, t)| 5 * t).collect()
}

fn sweep(name: &str, base: SimConfig, param: SweepParam, values: Vec<f64>, ticks: Vec<u64>) -> SweepSpec {
    SweepSpec {
        name: name.to_string(),
        base,
        axis: SweepAxis { param, values },
        replicates: 5,
        master_seed: 0,
        cell_max_ticks: Some(ticks),
        stop: StopRule::Saturated,
    }
}

pub fn experiment_catalog() -> Vec<Preset> {
    let oh3 = SimConfig {
        oh: 3,
        max_ticks: LONG_BUDGET_OH3,
        metrics_every: 1000,
        ..base()
    };
    let churn = SimConfig {
        chgr: true,
        p_change: 0.01,
        ..oh3.clone()
    };
    vec![
        Preset {
            name: "scaling".into(),
            description: "population size N at d_side=5000, oh=0".into(),
            sweeps: vec![sweep(
                "scaling",
                base(),
                SweepParam::N,
                TC_BY_N.iter().map(|p| p.0).collect(),
                budget(&TC_BY_N),
            )],
        },
        Preset {
            name: "density".into(),
            description: "grid side d_side at N=1000, oh=0".into(),
            sweeps: vec![sweep(
                "density",
                base(),
                SweepParam::DSide,
                TC_BY_D.iter().map(|p| p.0).collect(),
                budget(&TC_BY_D),
            )],
        },
        Preset {
            name: "overhearing".into(),
            description: "overhearing radius oh at N=1000, d_side=5000".into(),
            sweeps: vec![sweep(
                "overhearing",
                base(),
                SweepParam::Oh,
                TC_BY_OH.iter().map(|p| p.0).collect(),
                budget(&TC_BY_OH),
            )],
        },
        Preset {
            name: "forgetting".into(),
            description: "forgetting probability at N=1000, d_side=5000, oh=3".into(),
            sweeps: vec![sweep(
                "forgetting",
                oh3.clone(),
                SweepParam::Pforg,
                vec![0.001, 0.1, 0.5, 0.7],
                vec![LONG_BUDGET_OH3; 4],
            )],
        },
        Preset {
            name: "churn".into(),
            description: "group-change frequency, population and density with chgr=true".into(),
            sweeps: vec![
                sweep(
                    "churn-frequency",
                    churn.clone(),
                    SweepParam::PChange,
                    vec![0.0001, 0.001, 0.01],
                    vec![LONG_BUDGET_OH3; 3],
                ),
                sweep(
                    "churn-population",
                    churn.clone(),
                    SweepParam::N,
                    vec![1e3, 1e4, 1e5],
                    vec![LONG_BUDGET_OH3; 3],
                ),
                sweep(
                    "churn-density",
                    churn,
                    SweepParam::DSide,
                    vec![1000.0, 5000.0, 10_000.0],
                    vec![LONG_BUDGET_OH3; 3],
                ),
            ],
        },
    ]
}

pub fn preset(name: &str) -> Result<Preset> {
    experiment_catalog()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
