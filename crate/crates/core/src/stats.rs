//! Small descriptive statistics used by the metrics and the batch aggregates.

use serde::{Deserialize, Serialize};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959964;

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Pearson correlation, two-pass. `None` for fewer than two points or a
/// constant coordinate.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Lower median: element `(len - 1) / 2` of the sorted values.
pub fn lower_median<T: Ord + Copy>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    Some(sorted[(sorted.len() - 1) / 2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaldCi {
    pub mean: f64,
    pub low: f64,
    pub high: f64,
    /// A single sample gives a zero-width interval.
    pub degenerate: bool,
}

/// Normal-approximation interval `mean ± z·sd/√m` with the `m - 1` sample
/// standard deviation; `z` is [`Z_95`] for the default 95% level.
pub fn wald_ci(samples: &[f64]) -> Option<WaldCi> {
    wald_ci_z(samples, Z_95)
}

pub fn wald_ci_z(samples: &[f64], z: f64) -> Option<WaldCi> {
    let m = samples.len();
    let mean = mean(samples)?;
    if m == 1 {
        return Some(WaldCi {
            mean,
            low: mean,
            high: mean,
            degenerate: true,
        });
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let half = z * var.sqrt() / (m as f64).sqrt();
    Some(WaldCi {
        mean,
        low: (mean - half).min(mean),
        high: (mean + half).max(mean),
        degenerate: false,
    })
}
