use super::data_csv::confidence_percent;
use super::figure::{nice_ticks, tick_label, Anchor, Figure, Label, Scale, Shape};
use super::format::{escape_latex, sig6};
use crate::domain::{EffectSizeKind, MetaResult};

const WIDTH: f64 = 900.0;
const LABEL_X: f64 = 12.0;
const PLOT_LEFT: f64 = 300.0;
const PLOT_RIGHT: f64 = 640.0;
const WEIGHT_X: f64 = 720.0;
const ESTIMATE_X: f64 = 888.0;
const HEADER_Y: f64 = 24.0;
const FIRST_ROW_Y: f64 = 52.0;
const ROW_STEP: f64 = 24.0;
/// Side of the square for a study carrying all the weight.
const MAX_MARKER: f64 = 18.0;

pub(crate) fn effect_label(kind: EffectSizeKind) -> Label {
    match kind {
        EffectSizeKind::Hedges => Label::new("Hedges' g", "Hedges' $g$"),
        EffectSizeKind::Cohen => Label::new("Cohen's d", "Cohen's $d$"),
    }
}

/// Forest plot of one subgroup: a row per study (sorted by label) with a weight-scaled square
/// and its interval, a diamond for the pooled interval and a dashed line at 0.
pub fn forest_figure(result: &MetaResult) -> Figure {
    let effects = result.effects();
    let weights = result.normalized_weights();
    let k = effects.len() as f64;
    let diamond_y = FIRST_ROW_Y + k * ROW_STEP + 8.0;
    let axis_y = diamond_y + 22.0;
    let footer_y = axis_y + 54.0;
    let mut fig = Figure::new(WIDTH, footer_y + 14.0);

    let lo = effects
        .iter()
        .map(|e| e.ci_low())
        .fold(result.ci_low().min(0.0), f64::min);
    let hi = effects
        .iter()
        .map(|e| e.ci_high())
        .fold(result.ci_high().max(0.0), f64::max);
    let pad = 0.05 * (hi - lo);
    let x = Scale::new((lo - pad, hi + pad), (PLOT_LEFT, PLOT_RIGHT));

    let kind = effect_label(result.config().kind());
    let level = sig6(confidence_percent(result.config().alpha()));
    fig.bold_text(
        (LABEL_X, HEADER_Y),
        Anchor::Start,
        Label::plain("Study"),
        "header",
    );
    fig.bold_text(
        (WEIGHT_X, HEADER_Y),
        Anchor::End,
        Label::plain("Weight"),
        "header",
    );
    fig.bold_text(
        (ESTIMATE_X, HEADER_Y),
        Anchor::End,
        Label::new(
            format!("{} [{level}% CI]", kind.svg),
            format!("{} [{level}\\% CI]", kind.tex),
        ),
        "header",
    );

    fig.line(
        (x.map(0.0), FIRST_ROW_Y - 14.0),
        (x.map(0.0), axis_y),
        "null-line",
        true,
    );

    let mut order: Vec<usize> = (0..effects.len()).collect();
    order.sort_by(|&a, &b| effects[a].label().cmp(effects[b].label()));
    for (row, &i) in order.iter().enumerate() {
        let (e, w) = (&effects[i], weights[i]);
        let y = FIRST_ROW_Y + row as f64 * ROW_STEP;
        fig.line(
            (x.map(e.ci_low()), y),
            (x.map(e.ci_high()), y),
            "whisker",
            false,
        );
        let side = MAX_MARKER * w.sqrt();
        fig.push(Shape::Rect {
            x: x.map(e.delta()) - side / 2.0,
            y: y - side / 2.0,
            width: side,
            height: side,
            class: "study-marker",
        });
        fig.text(
            (LABEL_X, y + 4.0),
            Anchor::Start,
            Label::plain(e.label()),
            "study-label",
        );
        fig.text(
            (WEIGHT_X, y + 4.0),
            Anchor::End,
            Label::plain(&format!("{}%", sig6(100.0 * w))),
            "weight",
        );
        fig.text(
            (ESTIMATE_X, y + 4.0),
            Anchor::End,
            Label::plain(&interval_text(e.delta(), e.ci_low(), e.ci_high())),
            "estimate",
        );
    }

    fig.push(Shape::Polygon {
        points: vec![
            (x.map(result.ci_low()), diamond_y),
            (x.map(result.mu()), diamond_y - 7.0),
            (x.map(result.ci_high()), diamond_y),
            (x.map(result.mu()), diamond_y + 7.0),
        ],
        class: "diamond",
    });
    fig.bold_text(
        (LABEL_X, diamond_y + 4.0),
        Anchor::Start,
        Label::plain("Overall"),
        "overall-label",
    );
    fig.bold_text(
        (WEIGHT_X, diamond_y + 4.0),
        Anchor::End,
        Label::plain("100%"),
        "weight",
    );
    fig.bold_text(
        (ESTIMATE_X, diamond_y + 4.0),
        Anchor::End,
        Label::plain(&interval_text(
            result.mu(),
            result.ci_low(),
            result.ci_high(),
        )),
        "estimate",
    );

    fig.line((PLOT_LEFT, axis_y), (PLOT_RIGHT, axis_y), "axis", false);
    for t in nice_ticks(x.domain.0, x.domain.1, 6) {
        let px = x.map(t);
        fig.line((px, axis_y), (px, axis_y + 4.0), "tick", false);
        fig.text(
            (px, axis_y + 16.0),
            Anchor::Middle,
            Label::plain(&tick_label(t)),
            "tick-label",
        );
    }
    fig.text(
        ((PLOT_LEFT + PLOT_RIGHT) / 2.0, axis_y + 32.0),
        Anchor::Middle,
        kind,
        "axis-title",
    );

    let h = result.heterogeneity();
    let model = result.model().title();
    let (i2, tau2, z, p) = (sig6(h.i2), sig6(h.tau2), sig6(result.z()), sig6(result.p()));
    fig.text(
        (LABEL_X, footer_y),
        Anchor::Start,
        Label::new(
            format!("{model}: I² = {i2}%, τ² = {tau2}, Z = {z}, p = {p}"),
            format!(
                "{}: $I^2$ = {i2}\\%, $\\tau^2$ = {tau2}, $Z$ = {z}, $p$ = {p}",
                escape_latex(model)
            ),
        ),
        "footer",
    );
    fig
}

fn interval_text(center: f64, lo: f64, hi: f64) -> String {
    format!("{} [{}, {}]", sig6(center), sig6(lo), sig6(hi))
}

/// Forest plot as (SVG document, standalone LaTeX source).
pub fn emit_forest(result: &MetaResult) -> (String, String) {
    let fig = forest_figure(result);
    (fig.to_svg(), fig.to_tikz())
}
