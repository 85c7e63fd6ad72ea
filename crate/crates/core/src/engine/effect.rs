//! Per-study effect sizes and their weights.

use super::sum::CompensatedSum;
use crate::domain::{EffectSizeKind, GroupStats};

/// Pooled standard deviation S of two groups, weighted by degrees of freedom.
pub fn pooled_sd(g1: &GroupStats, g2: &GroupStats) -> f64 {
    let n1 = f64::from(g1.n());
    let n2 = f64::from(g2.n());
    let ss = (n1 - 1.0) * g1.sd() * g1.sd() + (n2 - 1.0) * g2.sd() * g2.sd();
    (ss / (n1 + n2 - 2.0)).sqrt()
}

/// Small-sample correction factor applied to Cohen's d to obtain Hedges' g.
pub fn hedges_correction(n1: u32, n2: u32) -> f64 {
    1.0 - 3.0 / (4.0 * (f64::from(n1) + f64::from(n2)) - 9.0)
}

/// Standardized mean difference of group 1 over group 2.
///
/// Returns `None` when the pooled standard deviation is zero, i.e. neither
/// group has any spread and the difference cannot be standardized.
pub fn effect_size(g1: &GroupStats, g2: &GroupStats, kind: EffectSizeKind) -> Option<f64> {
    let s = pooled_sd(g1, g2);
    if s == 0.0 {
        return None;
    }
    let d = (g1.mean() - g2.mean()) / s;
    Some(match kind {
        EffectSizeKind::Cohen => d,
        EffectSizeKind::Hedges => hedges_correction(g1.n(), g2.n()) * d,
    })
}

/// Standard error of `delta` within one study (the square root of its
/// sampling variance).
pub fn intra_study_sigma(g1: &GroupStats, g2: &GroupStats, delta: f64) -> f64 {
    let n1 = f64::from(g1.n());
    let n2 = f64::from(g2.n());
    ((n1 + n2) / (n1 * n2) + delta * delta / (2.0 * (n1 + n2))).sqrt()
}

pub fn fe_weight(sigma_intra: f64) -> f64 {
    1.0 / (sigma_intra * sigma_intra)
}

pub fn re_weight(sigma_intra: f64, tau2: f64) -> f64 {
    1.0 / (sigma_intra * sigma_intra + tau2)
}

/// Weighted mean of `deltas`.
///
/// # Panics
///
/// If the slices are empty or differ in length.
pub fn pooled_mu(deltas: &[f64], weights: &[f64]) -> f64 {
    assert!(!deltas.is_empty(), "pooling needs at least one study");
    assert_eq!(deltas.len(), weights.len(), "one weight per study");
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (d, w) in deltas.iter().zip(weights) {
        num += w * d;
        den += *w;
    }
    num.value() / den.value()
}
