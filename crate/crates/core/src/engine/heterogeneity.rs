use super::sum::CompensatedSum;
use super::EngineError;
use crate::domain::Model;

/// Between-study heterogeneity of one subgroup, always computed from the
/// fixed-effects weights. Raw values are kept next to the clipped ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterogeneityStats {
    /// Q, weighted squared deviation from the fixed-effects mean.
    pub q: f64,
    pub xi: f64,
    pub tau2_raw: f64,
    /// τ², clipped at zero.
    pub tau2: f64,
    /// I² in percent before clipping.
    pub i2_raw: f64,
    /// I² in percent, clipped to [0, 100].
    pub i2: f64,
}

pub fn heterogeneity(
    deltas: &[f64],
    fe_weights: &[f64],
) -> Result<HeterogeneityStats, EngineError> {
    let k = deltas.len();
    if k < 2 {
        return Err(EngineError::TooFewStudies(k));
    }
    assert_eq!(k, fe_weights.len(), "one weight per study");

    let mu_fe = super::effect::pooled_mu(deltas, fe_weights);
    let mut sum_w = CompensatedSum::new();
    let mut sum_w2 = CompensatedSum::new();
    let mut q = CompensatedSum::new();
    for (d, w) in deltas.iter().zip(fe_weights) {
        sum_w += *w;
        sum_w2 += w * w;
        q += w * (d - mu_fe) * (d - mu_fe);
    }
    let sum_w = sum_w.value();
    let q = q.value();
    let xi = sum_w - sum_w2.value() / sum_w;
    if xi.is_nan() || xi <= 0.0 {
        return Err(EngineError::DegenerateXi(xi));
    }

    let excess = q - (k - 1) as f64;
    let tau2_raw = excess / xi;
    // with Q = 0 there is no variability left to attribute
    let i2_raw = if q == 0.0 { 0.0 } else { excess / q * 100.0 };
    Ok(HeterogeneityStats {
        q,
        xi,
        tau2_raw,
        tau2: tau2_raw.max(0.0),
        i2_raw,
        i2: i2_raw.clamp(0.0, 100.0),
    })
}

/// Random effects once I² exceeds 50 %, fixed effects otherwise.
pub fn select_model(i2: f64) -> Model {
    if i2 > 50.0 {
        Model::RandomEffects
    } else {
        Model::FixedEffects
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_subgroup() {
        let h = heterogeneity(&[0.4, 0.4, 0.4], &[3.0, 7.0, 1.5]).unwrap();
        assert_eq!(h.q, 0.0);
        assert_eq!(h.tau2, 0.0);
        assert_eq!(h.i2, 0.0);
        assert_eq!(h.i2_raw, 0.0);
        assert!(h.tau2_raw < 0.0);
    }

    #[test]
    fn two_unit_weights_clip_to_zero() {
        // mu = 0.5, Q = 0.5, xi = 2 - 2/2 = 1
        let h = heterogeneity(&[0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(h.q, 0.5);
        assert_eq!(h.xi, 1.0);
        assert_eq!(h.tau2_raw, -0.5);
        assert_eq!(h.tau2, 0.0);
        assert_eq!(h.i2_raw, -100.0);
        assert_eq!(h.i2, 0.0);
    }

    #[test]
    fn q_of_three() {
        // deltas 0 and sqrt(6): mu = sqrt(6)/2, Q = 2 * 6/4 = 3
        let h = heterogeneity(&[0.0, 6f64.sqrt()], &[1.0, 1.0]).unwrap();
        assert!((h.q - 3.0).abs() < 1e-14);
        assert!((h.tau2 - 2.0).abs() < 1e-14);
        assert!((h.i2 - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(select_model(h.i2), Model::RandomEffects);
    }

    #[test]
    fn single_study_is_rejected() {
        assert_eq!(
            heterogeneity(&[1.0], &[1.0]),
            Err(EngineError::TooFewStudies(1))
        );
    }

    #[test]
    fn model_threshold_is_strict() {
        assert_eq!(select_model(0.0), Model::FixedEffects);
        assert_eq!(select_model(50.0), Model::FixedEffects);
        assert_eq!(select_model(50.000_001), Model::RandomEffects);
        assert_eq!(select_model(66.7), Model::RandomEffects);
    }
}
