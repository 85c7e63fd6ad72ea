use super::figure::{nice_ticks, tick_label, Anchor, Figure, Label, Scale, Shape};
use super::forest::effect_label;
use super::format::sig6;
use crate::domain::MetaResult;

const WIDTH: f64 = 520.0;
const HEIGHT: f64 = 440.0;
const PLOT_LEFT: f64 = 70.0;
const PLOT_RIGHT: f64 = 500.0;
const PLOT_TOP: f64 = 40.0;
const PLOT_BOTTOM: f64 = 360.0;

/// Data-to-pixel mapping of a funnel plot. The y axis is inverted: zero
/// intra-study sigma sits at the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunnelLayout {
    pub x: Scale,
    pub y: Scale,
    pub mu: f64,
    pub critical_value: f64,
    pub sigma_max: f64,
}

impl FunnelLayout {
    pub fn new(result: &MetaResult) -> Self {
        let q = result.critical_value();
        let mu = result.mu();
        let top = result
            .effects()
            .iter()
            .map(|e| e.sigma_intra())
            .fold(0.0, f64::max);
        let sigma_max = 1.1 * top;

        let xs = result
            .effects()
            .iter()
            .map(|e| e.delta())
            .chain([mu - q * sigma_max, mu + q * sigma_max]);
        let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
        let pad = 0.1 * (hi - lo);
        Self {
            x: Scale::new((lo - pad, hi + pad), (PLOT_LEFT, PLOT_RIGHT)),
            y: Scale::new((0.0, sigma_max), (PLOT_TOP, PLOT_BOTTOM)),
            mu,
            critical_value: q,
            sigma_max,
        }
    }

    /// Pixel position of a study.
    pub fn point(&self, delta: f64, sigma_intra: f64) -> (f64, f64) {
        (self.x.map(delta), self.y.map(sigma_intra))
    }

    /// Pixel x of the left and right funnel lines at a given sigma, found by
    /// interpolating along the drawn segments.
    pub fn boundary_at(&self, sigma_intra: f64) -> (f64, f64) {
        let t = sigma_intra / self.sigma_max;
        let apex = self.x.map(self.mu);
        let left = self.x.map(self.mu - self.critical_value * self.sigma_max);
        let right = self.x.map(self.mu + self.critical_value * self.sigma_max);
        (apex + t * (left - apex), apex + t * (right - apex))
    }
}

/// Funnel plot: one point per study at (effect size, intra-study sigma), the
/// lines x = mu ± q·sigma and a vertical line at mu.
pub fn funnel_figure(result: &MetaResult) -> Figure {
    let layout = FunnelLayout::new(result);
    let (x, y) = (layout.x, layout.y);
    let mut fig = Figure::new(WIDTH, HEIGHT);
    let q = layout.critical_value;
    let mu = layout.mu;
    let bottom = layout.sigma_max;

    fig.line(
        (PLOT_LEFT, PLOT_TOP),
        (PLOT_LEFT, PLOT_BOTTOM),
        "axis",
        false,
    );
    fig.line(
        (PLOT_LEFT, PLOT_BOTTOM),
        (PLOT_RIGHT, PLOT_BOTTOM),
        "axis",
        false,
    );
    for t in nice_ticks(x.domain.0, x.domain.1, 6) {
        let px = x.map(t);
        fig.line((px, PLOT_BOTTOM), (px, PLOT_BOTTOM + 4.0), "tick", false);
        fig.text(
            (px, PLOT_BOTTOM + 16.0),
            Anchor::Middle,
            Label::plain(&tick_label(t)),
            "tick-label",
        );
    }
    for t in nice_ticks(0.0, bottom, 5) {
        let py = y.map(t);
        fig.line((PLOT_LEFT - 4.0, py), (PLOT_LEFT, py), "tick", false);
        fig.text(
            (PLOT_LEFT - 7.0, py + 4.0),
            Anchor::End,
            Label::plain(&tick_label(t)),
            "tick-label",
        );
    }

    fig.line(
        (x.map(mu), y.map(0.0)),
        (x.map(mu), y.map(bottom)),
        "mean-line",
        false,
    );
    fig.line(
        (x.map(mu), y.map(0.0)),
        (x.map(mu - q * bottom), y.map(bottom)),
        "funnel-line",
        true,
    );
    fig.line(
        (x.map(mu), y.map(0.0)),
        (x.map(mu + q * bottom), y.map(bottom)),
        "funnel-line",
        true,
    );

    for e in result.effects() {
        let (cx, cy) = layout.point(e.delta(), e.sigma_intra());
        fig.push(Shape::Circle {
            cx,
            cy,
            r: 4.0,
            class: "study-point",
        });
    }

    fig.text(
        ((PLOT_LEFT + PLOT_RIGHT) / 2.0, PLOT_BOTTOM + 34.0),
        Anchor::Middle,
        effect_label(result.config().kind()),
        "axis-title",
    );
    fig.text(
        (PLOT_LEFT - 50.0, PLOT_TOP - 16.0),
        Anchor::Start,
        Label::new("Intra-study σ", "Intra-study $\\sigma$"),
        "axis-title",
    );
    let (m, qs) = (sig6(mu), sig6(q));
    fig.text(
        (PLOT_LEFT - 50.0, HEIGHT - 14.0),
        Anchor::Start,
        Label::new(
            format!("Funnel: x = {m} ± {qs} × σ  ({})", result.model().title()),
            format!(
                "Funnel: $x = {m} \\pm {qs} \\times \\sigma$ ({})",
                result.model().title()
            ),
        ),
        "footer",
    );
    fig
}

/// Funnel plot as (SVG document, standalone LaTeX source).
pub fn emit_funnel(result: &MetaResult) -> (String, String) {
    let fig = funnel_figure(result);
    (fig.to_svg(), fig.to_tikz())
}
