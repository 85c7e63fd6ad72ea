//! Minimal vector scene rendered both as SVG and as a standalone TikZ
//! document. Coordinates are in SVG user units with y pointing down; the TikZ
//! output flips its y unit so the same numbers can be used verbatim.

use std::fmt::Write as _;

use super::format::{coord, escape_latex, escape_xml};

/// Centimetres per scene unit in the TikZ output.
const TIKZ_UNIT_CM: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

/// Text in both target syntaxes. `tex` is raw LaTeX (already escaped).
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub svg: String,
    pub tex: String,
}

impl Label {
    /// Plain text, escaped for each target.
    pub fn plain(s: &str) -> Self {
        Self {
            svg: s.to_string(),
            tex: escape_latex(s),
        }
    }

    pub fn new(svg: impl Into<String>, tex: impl Into<String>) -> Self {
        Self {
            svg: svg.into(),
            tex: tex.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Line {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        class: &'static str,
        dashed: bool,
    },
    Rect {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
        class: &'static str,
    },
    Polygon {
        points: Vec<(f64, f64)>,
        class: &'static str,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
        class: &'static str,
    },
    Text {
        x: f64,
        y: f64,
        anchor: Anchor,
        label: Label,
        class: &'static str,
        bold: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub width: f64,
    pub height: f64,
    pub shapes: Vec<Shape>,
}

impl Figure {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            shapes: Vec::new(),
        }
    }

    pub fn push(&mut self, shape: Shape) {
        self.shapes.push(shape);
    }

    pub fn line(&mut self, from: (f64, f64), to: (f64, f64), class: &'static str, dashed: bool) {
        self.push(Shape::Line {
            x1: from.0,
            y1: from.1,
            x2: to.0,
            y2: to.1,
            class,
            dashed,
        });
    }

    pub fn text(&mut self, at: (f64, f64), anchor: Anchor, label: Label, class: &'static str) {
        self.push(Shape::Text {
            x: at.0,
            y: at.1,
            anchor,
            label,
            class,
            bold: false,
        });
    }

    pub fn bold_text(&mut self, at: (f64, f64), anchor: Anchor, label: Label, class: &'static str) {
        self.push(Shape::Text {
            x: at.0,
            y: at.1,
            anchor,
            label,
            class,
            bold: true,
        });
    }

    pub fn to_svg(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">",
            w = coord(self.width),
            h = coord(self.height)
        );
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        for shape in &self.shapes {
            match shape {
                Shape::Line {
                    x1,
                    y1,
                    x2,
                    y2,
                    class,
                    dashed,
                } => {
                    let _ = writeln!(
                        out,
                        "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1\"{}/>",
                        coord(*x1),
                        coord(*y1),
                        coord(*x2),
                        coord(*y2),
                        stroke_for(class),
                        if *dashed { " stroke-dasharray=\"5,4\"" } else { "" }
                    );
                }
                Shape::Rect {
                    x,
                    y,
                    width,
                    height,
                    class,
                } => {
                    let _ = writeln!(
                        out,
                        "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"black\"/>",
                        coord(*x),
                        coord(*y),
                        coord(*width),
                        coord(*height)
                    );
                }
                Shape::Polygon { points, class } => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|(x, y)| format!("{},{}", coord(*x), coord(*y)))
                        .collect();
                    let _ = writeln!(
                        out,
                        "<polygon class=\"{class}\" points=\"{}\" fill=\"black\"/>",
                        pts.join(" ")
                    );
                }
                Shape::Circle { cx, cy, r, class } => {
                    let _ = writeln!(
                        out,
                        "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#1f4e9c\"/>",
                        coord(*cx),
                        coord(*cy),
                        coord(*r)
                    );
                }
                Shape::Text {
                    x,
                    y,
                    anchor,
                    label,
                    class,
                    bold,
                } => {
                    let anchor = match anchor {
                        Anchor::Start => "start",
                        Anchor::Middle => "middle",
                        Anchor::End => "end",
                    };
                    let _ = writeln!(
                        out,
                        "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\"{}>{}</text>",
                        coord(*x),
                        coord(*y),
                        if *bold { " font-weight=\"bold\"" } else { "" },
                        escape_xml(&label.svg)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn to_tikz(&self) -> String {
        let mut out = String::new();
        out.push_str("\\documentclass[tikz,border=4pt]{standalone}\n");
        out.push_str("\\usepackage[T1]{fontenc}\n");
        out.push_str("\\usepackage[utf8]{inputenc}\n");
        out.push_str("\\usepackage{amsmath}\n");
        out.push_str("\\begin{document}\n");
        let _ = writeln!(
            out,
            "\\begin{{tikzpicture}}[x={u}cm,y=-{u}cm,font=\\sffamily\\scriptsize]",
            u = TIKZ_UNIT_CM
        );
        for shape in &self.shapes {
            match shape {
                Shape::Line {
                    x1,
                    y1,
                    x2,
                    y2,
                    class,
                    dashed,
                } => {
                    let mut opts = vec![tikz_color(class)];
                    if *dashed {
                        opts.push("dashed");
                    }
                    let _ = writeln!(
                        out,
                        "  \\draw[{}] ({},{}) -- ({},{}); % {class}",
                        opts.join(","),
                        coord(*x1),
                        coord(*y1),
                        coord(*x2),
                        coord(*y2)
                    );
                }
                Shape::Rect {
                    x,
                    y,
                    width,
                    height,
                    class,
                } => {
                    let _ = writeln!(
                        out,
                        "  \\fill[black] ({},{}) rectangle ({},{}); % {class}",
                        coord(*x),
                        coord(*y),
                        coord(x + width),
                        coord(y + height)
                    );
                }
                Shape::Polygon { points, class } => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|(x, y)| format!("({},{})", coord(*x), coord(*y)))
                        .collect();
                    let _ = writeln!(
                        out,
                        "  \\fill[black] {} -- cycle; % {class}",
                        pts.join(" -- ")
                    );
                }
                Shape::Circle { cx, cy, r, class } => {
                    let _ = writeln!(
                        out,
                        "  \\fill[blue!60!black] ({},{}) circle[radius={}cm]; % {class}",
                        coord(*cx),
                        coord(*cy),
                        format_cm(r * TIKZ_UNIT_CM)
                    );
                }
                Shape::Text {
                    x,
                    y,
                    anchor,
                    label,
                    class,
                    bold,
                } => {
                    let anchor = match anchor {
                        Anchor::Start => "base west",
                        Anchor::Middle => "base",
                        Anchor::End => "base east",
                    };
                    let text = if *bold {
                        format!("\\textbf{{{}}}", label.tex)
                    } else {
                        label.tex.clone()
                    };
                    let _ = writeln!(
                        out,
                        "  \\node[anchor={anchor},inner sep=0pt] at ({},{}) {{{text}}}; % {class}",
                        coord(*x),
                        coord(*y)
                    );
                }
            }
        }
        out.push_str("\\end{tikzpicture}\n");
        out.push_str("\\end{document}\n");
        out
    }
}

fn format_cm(v: f64) -> String {
    format!("{v:.3}")
}

fn stroke_for(class: &str) -> &'static str {
    match class {
        "null-line" | "grid" => "#888888",
        "funnel-line" | "mean-line" => "#b22222",
        _ => "black",
    }
}

fn tikz_color(class: &str) -> &'static str {
    match class {
        "null-line" | "grid" => "gray",
        "funnel-line" | "mean-line" => "red!70!black",
        _ => "black",
    }
}

/// Evenly spaced "nice" tick positions covering [lo, hi].
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Linear map from data interval to pixel interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
}

impl Scale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        // a zero-width domain would divide by zero
        let domain = if domain.1 > domain.0 {
            domain
        } else {
            (domain.0 - 1.0, domain.0 + 1.0)
        };
        Self { domain, range }
    }

    pub fn map(&self, v: f64) -> f64 {
        let t = (v - self.domain.0) / (self.domain.1 - self.domain.0);
        self.range.0 + t * (self.range.1 - self.range.0)
    }
}

/// Tick label for axis numbers; two significant decimals are plenty.
pub fn tick_label(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_range() {
        assert_eq!(
            nice_ticks(0.0, 1.0, 5),
            vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]
        );
        let t = nice_ticks(-0.73, 1.41, 5);
        assert!(t.first().unwrap() >= &-0.73 && t.last().unwrap() <= &1.41);
        assert!(t.contains(&0.0));
        assert_eq!(nice_ticks(1.0, 1.0, 5), vec![1.0]);
    }

    #[test]
    fn scale_maps_endpoints() {
        let s = Scale::new((-1.0, 1.0), (100.0, 300.0));
        assert_eq!(s.map(-1.0), 100.0);
        assert_eq!(s.map(0.0), 200.0);
        assert_eq!(s.map(1.0), 300.0);
        let flat = Scale::new((2.0, 2.0), (0.0, 10.0));
        assert_eq!(flat.map(2.0), 5.0);
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(tick_label(-0.0), "0");
        assert_eq!(tick_label(2.5), "2.5");
        assert_eq!(tick_label(-1.0), "-1");
    }

    #[test]
    fn both_renderers_share_geometry() {
        let mut f = Figure::new(100.0, 50.0);
        f.line((0.0, 10.0), (100.0, 10.0), "null-line", true);
        f.text((5.0, 5.0), Anchor::End, Label::plain("50%_x"), "label");
        let svg = f.to_svg();
        let tex = f.to_tikz();
        assert!(svg.contains("x1=\"0.00\" y1=\"10.00\" x2=\"100.00\""));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(">50%_x</text>"));
        assert!(tex.contains("(0.00,10.00) -- (100.00,10.00)"));
        assert!(tex.contains("{50\\%\\_x}"));
    }
}
