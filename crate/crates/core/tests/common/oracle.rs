//! Straight-line reference transcription of the effect-size and pooling
//! formulas. Deliberately naive: plain loops, plain summation, no shared code
//! with the library except the two normal-distribution kernels (which are
//! checked on their own against quadrature).

#[derive(Debug, Clone, Copy)]
pub struct OracleStudy {
    pub n1: f64,
    pub mean1: f64,
    pub sd1: f64,
    pub n2: f64,
    pub mean2: f64,
    pub sd2: f64,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub pooled_sd: Vec<f64>,
    pub delta: Vec<f64>,
    pub sigma_intra: Vec<f64>,
    pub weight: Vec<f64>,
    pub q: f64,
    pub xi: f64,
    pub tau2: f64,
    pub i2: f64,
    pub random_effects: bool,
    pub mu: f64,
    pub sigma: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    pub p: f64,
}

#[allow(clippy::manual_clamp)]
pub fn oracle_analyze(
    studies: &[OracleStudy],
    hedges: bool,
    critical: f64,
    phi: impl Fn(f64) -> f64,
) -> OracleResult {
    let k = studies.len();
    let mut pooled_sd = Vec::new();
    let mut delta = Vec::new();
    let mut sigma_intra = Vec::new();
    let mut w_fe = Vec::new();
    for s in studies {
        let var =
            ((s.n1 - 1.0) * s.sd1 * s.sd1 + (s.n2 - 1.0) * s.sd2 * s.sd2) / (s.n1 + s.n2 - 2.0);
        let sd = var.sqrt();
        let mut d = (s.mean1 - s.mean2) / sd;
        if hedges {
            d *= 1.0 - 3.0 / (4.0 * (s.n1 + s.n2) - 9.0);
        }
        let si = ((s.n1 + s.n2) / (s.n1 * s.n2) + d * d / (2.0 * (s.n1 + s.n2))).sqrt();
        pooled_sd.push(sd);
        delta.push(d);
        sigma_intra.push(si);
        w_fe.push(1.0 / (si * si));
    }

    let mut sw = 0.0;
    let mut swd = 0.0;
    let mut sw2 = 0.0;
    for i in 0..k {
        sw += w_fe[i];
        swd += w_fe[i] * delta[i];
        sw2 += w_fe[i] * w_fe[i];
    }
    let mu_fe = swd / sw;
    let mut q = 0.0;
    for i in 0..k {
        q += w_fe[i] * (delta[i] - mu_fe) * (delta[i] - mu_fe);
    }
    let xi = sw - sw2 / sw;
    let dof = (k - 1) as f64;
    let mut tau2 = (q - dof) / xi;
    if tau2 < 0.0 {
        tau2 = 0.0;
    }
    let mut i2 = if q == 0.0 { 0.0 } else { (q - dof) / q * 100.0 };
    if i2 < 0.0 {
        i2 = 0.0;
    }
    if i2 > 100.0 {
        i2 = 100.0;
    }
    let random_effects = i2 > 50.0;

    let mut weight = Vec::new();
    for i in 0..k {
        if random_effects {
            weight.push(1.0 / (sigma_intra[i] * sigma_intra[i] + tau2));
        } else {
            weight.push(w_fe[i]);
        }
    }
    let mut tw = 0.0;
    let mut twd = 0.0;
    for i in 0..k {
        tw += weight[i];
        twd += weight[i] * delta[i];
    }
    let mu = twd / tw;
    let sigma = 1.0 / tw.sqrt();
    let z = mu / sigma;
    // 2 * (1 - phi(|z|)), written through the symmetric tail to keep precision
    let p = 2.0 * phi(-z.abs());

    OracleResult {
        pooled_sd,
        delta,
        sigma_intra,
        weight,
        q,
        xi,
        tau2,
        i2,
        random_effects,
        mu,
        sigma,
        ci_low: mu - sigma * critical,
        ci_high: mu + sigma * critical,
        z,
        p,
    }
}

/// Relative error with an exact-zero escape: two exact zeros agree.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}
