//! Summary statistics for Monte Carlo output.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Sample mean with a two-sided Student-t confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub lo: f64,
    pub hi: f64,
}

impl MeanCi {
    pub fn excludes_zero(&self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }
}

pub fn mean_ci(samples: &[f64], level: f64) -> MeanCi {
    let n = samples.len();
    if n == 0 {
        return MeanCi { n, mean: f64::NAN, sd: f64::NAN, lo: f64::NAN, hi: f64::NAN };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanCi { n, mean, sd: 0.0, lo: mean, hi: mean };
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("n >= 2").inverse_cdf(0.5 + level / 2.0);
    let half = t * sd / (n as f64).sqrt();
    MeanCi { n, mean, sd, lo: mean - half, hi: mean + half }
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Fit of `freq ~ alpha1 * exp(-alpha2 * x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpFit {
    pub alpha1: f64,
    pub alpha2: f64,
    pub points: usize,
}

/// Weighted least squares of `log p` on `x`, with weights `n p / (1 - p)`
/// (inverse delta-method variance of `log p`). Rows with `p = 0` are
/// skipped; `p = 1` is clipped to `1 - 1/(2n)`. Needs two distinct `x`.
pub fn fit_exponential(rows: &[(f64, f64, usize)]) -> Option<ExpFit> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|&&(_, p, n)| p > 0.0 && n > 0)
        .map(|&(x, p, n)| {
            let p = p.min(1.0 - 0.5 / n as f64);
            (x, p.ln(), n as f64 * p / (1.0 - p))
        })
        .collect();
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    if pts.len() < 2 || sw <= 0.0 {
        return None;
    }
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(ExpFit { alpha1: (my - slope * mx).exp(), alpha2: -slope, points: pts.len() })
}
