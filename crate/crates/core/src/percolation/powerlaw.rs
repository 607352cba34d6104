//! Descriptive log-log fits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::degree::DegreeStats;

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

/// `None` for fewer than two points or zero spread in `x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * nf {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
        residual: (sse / nf).sqrt(),
        points: n,
    })
}

/// Slope of `log(count)` against `log(degree)` over nonzero-degree bins.
/// Needs at least three distinct nonzero degrees.
pub fn fit_degree_histogram(histogram: &BTreeMap<u64, u64>) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = histogram
        .iter()
        .filter(|&(&k, &c)| k > 0 && c > 0)
        .map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln()))
        .unzip();
    if xs.len() < 3 {
        return None;
    }
    least_squares(&xs, &ys)
}

pub fn degree_distribution_fit(stats: &DegreeStats) -> Option<LineFit> {
    fit_degree_histogram(&stats.histogram)
}
