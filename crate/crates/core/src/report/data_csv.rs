use std::fmt::Write as _;

use super::format::sig6;
use crate::domain::MetaResult;

/// Semicolon-separated table of one subgroup: one row per study (input
/// fields plus computed quantities), a blank line, then a `quantity;value`
/// summary block. Every number uses [`sig6`].
pub fn emit_data_csv(result: &MetaResult) -> String {
    let mut out = String::new();
    let conditions = result
        .effects()
        .first()
        .map(|e| e.record().conditions().len())
        .unwrap_or(0);

    out.push_str("study;variable;n_1;n_2;mean_1;std_1;mean_2;std_2");
    for i in 1..=conditions {
        let _ = write!(out, ";condition_{i}");
    }
    out.push_str(";pooled_sd;effect_size;sigma_intra;weight;weight_percent;ci_low;ci_high\n");

    let normalized = result.normalized_weights();
    for (e, w) in result.effects().iter().zip(&normalized) {
        let r = e.record();
        let _ = write!(
            out,
            "{};{};{};{};{};{};{};{}",
            r.study(),
            r.variable(),
            r.group1().n(),
            r.group2().n(),
            sig6(r.group1().mean()),
            sig6(r.group1().sd()),
            sig6(r.group2().mean()),
            sig6(r.group2().sd())
        );
        for c in r.conditions() {
            out.push(';');
            out.push_str(c);
        }
        let _ = writeln!(
            out,
            ";{};{};{};{};{};{};{}",
            sig6(e.pooled_sd()),
            sig6(e.delta()),
            sig6(e.sigma_intra()),
            sig6(e.weight()),
            sig6(100.0 * w),
            sig6(e.ci_low()),
            sig6(e.ci_high())
        );
    }

    let cfg = result.config();
    let h = result.heterogeneity();
    let rows: [(&str, String); 19] = [
        ("k", result.k().to_string()),
        ("effect_size", cfg.kind().to_string()),
        ("alpha", sig6(cfg.alpha())),
        ("confidence_level", sig6(confidence_percent(cfg.alpha()))),
        ("critical_value", sig6(result.critical_value())),
        ("model", result.model().to_string()),
        ("mu", sig6(result.mu())),
        ("sigma", sig6(result.sigma())),
        ("ci_low", sig6(result.ci_low())),
        ("ci_high", sig6(result.ci_high())),
        ("z", sig6(result.z())),
        ("p", sig6(result.p())),
        ("q", sig6(h.q)),
        ("xi", sig6(h.xi)),
        ("tau2_raw", sig6(h.tau2_raw)),
        ("tau2", sig6(h.tau2)),
        ("i2_raw", sig6(h.i2_raw)),
        ("i2", sig6(h.i2)),
        (
            "sum_weights",
            sig6(crate::engine::sum::compensated_sum(
                result.effects().iter().map(|e| e.weight()),
            )),
        ),
    ];
    out.push('\n');
    out.push_str("quantity;value\n");
    for (name, value) in rows {
        let _ = writeln!(out, "{name};{value}");
    }
    out
}

pub(crate) fn confidence_percent(alpha: f64) -> f64 {
    (1.0 - alpha) * 100.0
}
