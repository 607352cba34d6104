//! Threshold detection over a time series of percolation points.

use serde::{Deserialize, Serialize};

use super::metrics::PercolationPoint;
use super::powerlaw::{least_squares, LineFit};

/// Below-threshold giant-cluster fractions under this value count as zero.
pub const NEAR_ZERO: f64 = 0.05;

/// Upper end of the exponent-fit window, as a multiple of `p_c`.
pub const BETA_WINDOW: f64 = 3.0;

/// Which giant-cluster fraction stays near zero below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercolationKind {
    /// Only the site fraction `P_sG` stays near zero.
    Site,
    /// Only the link fraction `P_bG` stays near zero.
    Link,
    /// Both stay near zero.
    Mixed,
    /// Neither does.
    Neither,
}

impl PercolationKind {
    pub fn classify(max_psg_below: f64, max_pbg_below: f64) -> Self {
        match (max_psg_below < NEAR_ZERO, max_pbg_below < NEAR_ZERO) {
            (true, true) => Self::Mixed,
            (true, false) => Self::Site,
            (false, true) => Self::Link,
            (false, false) => Self::Neither,
        }
    }
}

impl std::fmt::Display for PercolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Site => "site",
            Self::Link => "link",
            Self::Mixed => "mixed",
            Self::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// First tick at which the heterogeneity condition holds.
    pub t_c: Option<u64>,
    /// Link fraction `P_b` at `t_c`.
    pub p_c: Option<f64>,
    /// Link count at `t_c`.
    pub n_b: Option<u64>,
    /// Fit of `log P_sG` against `log(P_b - p_c)` for `P_b` in `(p_c, 3 p_c]`;
    /// the slope is the exponent.
    pub beta_fit: Option<LineFit>,
    /// Fit of the degree histogram, filled in by callers that hold a
    /// degree distribution.
    pub powerlaw_fit: Option<LineFit>,
    pub max_psg_below: f64,
    pub max_pbg_below: f64,
    pub classification: Option<PercolationKind>,
    pub diagnostic: Option<String>,
}

impl ThresholdEstimate {
    pub fn beta(&self) -> Option<f64> {
        self.beta_fit.map(|f| f.slope)
    }

    pub fn powerlaw_slope(&self) -> Option<f64> {
        self.powerlaw_fit.map(|f| f.slope)
    }
}

/// Locates the first percolating point of a series ordered by tick.
pub fn detect_threshold(series: &[PercolationPoint]) -> ThresholdEstimate {
    let Some(idx) = series.iter().position(|p| p.percolating) else {
        let last = series.last();
        return ThresholdEstimate {
            t_c: None,
            p_c: None,
            n_b: None,
            beta_fit: None,
            powerlaw_fit: None,
            max_psg_below: max_of(series.iter().map(|p| p.psg)),
            max_pbg_below: max_of(series.iter().map(|p| p.pbg)),
            classification: None,
            diagnostic: Some(match last {
                None => "empty series".to_string(),
                Some(p) => format!(
                    "heterogeneity condition never held in {} points up to tick {} (last K = {})",
                    series.len(),
                    p.tick,
                    p.k.map_or_else(|| "undefined".to_string(), |k| format!("{k:.4}"))
                ),
            }),
        };
    };
    let at = series[idx];
    let below = &series[..idx];
    let max_psg_below = max_of(below.iter().map(|p| p.psg));
    let max_pbg_below = max_of(below.iter().map(|p| p.pbg));

    let p_c = at.pb;
    let (xs, ys): (Vec<f64>, Vec<f64>) = series[idx..]
        .iter()
        .filter(|p| p.pb > p_c && p.pb <= BETA_WINDOW * p_c && p.psg > 0.0)
        .map(|p| ((p.pb - p_c).ln(), p.psg.ln()))
        .unzip();
    let beta_fit = least_squares(&xs, &ys);

    ThresholdEstimate {
        t_c: Some(at.tick),
        p_c: Some(p_c),
        n_b: Some(at.links),
        beta_fit,
        powerlaw_fit: None,
        max_psg_below,
        max_pbg_below,
        classification: Some(PercolationKind::classify(max_psg_below, max_pbg_below)),
        diagnostic: beta_fit
            .is_none()
            .then(|| format!("fewer than two usable points in the exponent window ({} found)", xs.len())),
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}
