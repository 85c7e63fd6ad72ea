//! Effect sizes, heterogeneity, model selection and pooling.

pub mod effect;
pub mod heterogeneity;
pub mod normal;
pub mod sum;

use thiserror::Error;

pub use effect::{effect_size, fe_weight, intra_study_sigma, pooled_mu, pooled_sd, re_weight};
pub use heterogeneity::{heterogeneity, select_model, HeterogeneityStats};
pub use normal::{normal_cdf, normal_quantile};

use crate::domain::{AnalysisConfig, MetaResult, Model, StudyEffect, Subgroup};
use sum::compensated_sum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(
        "study {study:?} has zero standard deviation in both groups; its effect size is undefined"
    )]
    ZeroPooledSd { study: String },
    #[error("heterogeneity needs at least 2 studies, got {0}")]
    TooFewStudies(usize),
    #[error("degenerate weight spread (xi = {0})")]
    DegenerateXi(f64),
    #[error("probability {0} is outside (0, 1)")]
    OutOfDomain(f64),
}

/// Weights of each study under `model`. `tau2` is ignored for fixed effects.
pub fn model_weights(sigma_intra: &[f64], model: Model, tau2: f64) -> Vec<f64> {
    sigma_intra
        .iter()
        .map(|&s| match model {
            Model::FixedEffects => fe_weight(s),
            Model::RandomEffects => re_weight(s, tau2),
        })
        .collect()
}

/// Runs the full analysis of one subgroup.
pub fn analyze_subgroup(sub: &Subgroup, cfg: &AnalysisConfig) -> Result<MetaResult, EngineError> {
    let critical = normal_quantile(1.0 - cfg.alpha() / 2.0)?;
    let labels = sub.member_labels();

    let mut pooled = Vec::with_capacity(sub.len());
    let mut deltas = Vec::with_capacity(sub.len());
    let mut sigmas = Vec::with_capacity(sub.len());
    for (rec, label) in sub.members().iter().zip(&labels) {
        let (g1, g2) = (rec.group1(), rec.group2());
        let delta = effect_size(g1, g2, cfg.kind()).ok_or_else(|| EngineError::ZeroPooledSd {
            study: label.clone(),
        })?;
        pooled.push(pooled_sd(g1, g2));
        deltas.push(delta);
        sigmas.push(intra_study_sigma(g1, g2, delta));
    }
    let fe = model_weights(&sigmas, Model::FixedEffects, 0.0);

    let het = heterogeneity(&deltas, &fe)?;
    let model = select_model(het.i2);
    let weights = match model {
        Model::FixedEffects => fe.clone(),
        Model::RandomEffects => model_weights(&sigmas, model, het.tau2),
    };

    let mu = pooled_mu(&deltas, &weights);
    let sigma = compensated_sum(weights.iter().copied()).sqrt().recip();
    let z = mu / sigma;
    // 2 (1 - Φ(|Z|)) evaluated on the lower tail, which keeps small p exact
    let p = (2.0 * normal_cdf(-z.abs())).min(1.0);

    let effects = sub
        .members()
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (rec, label))| {
            let half = sigmas[i] * critical;
            StudyEffect {
                label,
                record: rec.clone(),
                pooled_sd: pooled[i],
                delta: deltas[i],
                sigma_intra: sigmas[i],
                fe_weight: fe[i],
                weight: weights[i],
                ci_low: deltas[i] - half,
                ci_high: deltas[i] + half,
            }
        })
        .collect();

    Ok(MetaResult {
        key: sub.key().clone(),
        config: *cfg,
        critical_value: critical,
        effects,
        heterogeneity: het,
        model,
        mu,
        sigma,
        ci_low: mu - sigma * critical,
        ci_high: mu + sigma * critical,
        z,
        p,
    })
}
