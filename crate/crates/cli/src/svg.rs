//! Self-contained SVG renderings of the explainability figures.
//!
//! Output is a pure function of the [`PlotSpec`]: coordinates are printed with
//! fixed precision, so equal specs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_at, IoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    LineGrid,
    Band,
    Heatmap,
    Bubble,
    Violin,
    Bar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinePanel {
    pub title: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStrip {
    pub label: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPanel {
    pub title: String,
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    pub strips: Vec<BandStrip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatColumn {
    pub label: String,
    /// Increasing score values, bottom to top.
    pub scores: Vec<f64>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleMark {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolinGroup {
    pub label: String,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub quartiles: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolinPanel {
    pub title: String,
    pub groups: Vec<ViolinGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarPanel {
    pub title: String,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlotData {
    LineGrid {
        panels: Vec<LinePanel>,
        /// Shared y range, e.g. `[0, 1]` for probabilities.
        #[serde(default)]
        y_range: Option<[f64; 2]>,
    },
    Band {
        panels: Vec<BandPanel>,
    },
    Heatmap {
        columns: Vec<HeatColumn>,
    },
    Bubble {
        points: Vec<BubbleMark>,
        median_x: f64,
        median_y: f64,
    },
    Violin {
        panels: Vec<ViolinPanel>,
    },
    Bar {
        panels: Vec<BarPanel>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    #[serde(default)]
    pub x_label: String,
    #[serde(default)]
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    #[serde(flatten)]
    pub data: PlotData,
}

impl PlotSpec {
    pub fn new(title: impl Into<String>, data: PlotData) -> Self {
        Self {
            title: title.into(),
            x_label: String::new(),
            y_label: String::new(),
            width: 960,
            height: 720,
            data,
        }
    }

    pub fn labels(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn kind(&self) -> PlotKind {
        match self.data {
            PlotData::LineGrid { .. } => PlotKind::LineGrid,
            PlotData::Band { .. } => PlotKind::Band,
            PlotData::Heatmap { .. } => PlotKind::Heatmap,
            PlotData::Bubble { .. } => PlotKind::Bubble,
            PlotData::Violin { .. } => PlotKind::Violin,
            PlotData::Bar { .. } => PlotKind::Bar,
        }
    }
}

fn invalid(msg: impl Into<String>) -> IoError {
    IoError::InvalidSpec(msg.into())
}

fn finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{what} contains non-finite values")))
    }
}

fn same_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a == b && a > 0 {
        Ok(())
    } else {
        Err(invalid(format!("{what}: lengths {a} and {b} must match and be nonzero")))
    }
}

fn nonempty<T>(items: &[T], what: &str) -> Result<()> {
    if items.is_empty() {
        Err(invalid(format!("{what} is empty")))
    } else {
        Ok(())
    }
}

pub fn validate(spec: &PlotSpec) -> Result<()> {
    if spec.width < 200 || spec.height < 150 {
        return Err(invalid("dimensions must be at least 200x150"));
    }
    match &spec.data {
        PlotData::LineGrid { panels, y_range } => {
            nonempty(panels, "line panels")?;
            for p in panels {
                same_len(p.x.len(), p.y.len(), &p.title)?;
                finite(&p.x, &p.title)?;
                finite(&p.y, &p.title)?;
            }
            if let Some([lo, hi]) = y_range {
                if !(lo < hi) {
                    return Err(invalid("y_range must be increasing"));
                }
            }
        }
        PlotData::Band { panels } => {
            nonempty(panels, "band panels")?;
            for p in panels {
                same_len(p.t.len(), p.mean.len(), &p.title)?;
                finite(&p.t, &p.title)?;
                finite(&p.mean, &p.title)?;
                for s in &p.strips {
                    same_len(p.t.len(), s.lower.len(), &s.label)?;
                    same_len(p.t.len(), s.upper.len(), &s.label)?;
                    finite(&s.lower, &s.label)?;
                    finite(&s.upper, &s.label)?;
                }
            }
        }
        PlotData::Heatmap { columns } => {
            nonempty(columns, "heatmap columns")?;
            let m = columns[0].scores.len();
            for c in columns {
                same_len(c.scores.len(), c.probabilities.len(), &c.label)?;
                same_len(m, c.scores.len(), "heatmap grid")?;
                finite(&c.scores, &c.label)?;
                if c.probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(invalid(format!("{}: probabilities must lie in [0, 1]", c.label)));
                }
            }
        }
        PlotData::Bubble {
            points,
            median_x,
            median_y,
        } => {
            nonempty(points, "bubble points")?;
            for p in points {
                finite(&[p.x, p.y, p.size], &p.label)?;
                if p.size < 0.0 {
                    return Err(invalid(format!("{}: negative bubble size", p.label)));
                }
            }
            finite(&[*median_x, *median_y], "medians")?;
        }
        PlotData::Violin { panels } => {
            nonempty(panels, "violin panels")?;
            for p in panels {
                nonempty(&p.groups, &p.title)?;
                for g in &p.groups {
                    if g.grid.len() != g.density.len() {
                        return Err(invalid(format!("{}: grid and density lengths differ", g.label)));
                    }
                    finite(&g.grid, &g.label)?;
                    finite(&g.density, &g.label)?;
                }
            }
        }
        PlotData::Bar { panels } => {
            nonempty(panels, "bar panels")?;
            for p in panels {
                same_len(p.labels.len(), p.values.len(), &p.title)?;
                finite(&p.values, &p.title)?;
            }
        }
    }
    Ok(())
}

const GREEN: (f64, f64, f64) = (26.0, 150.0, 65.0);
const YELLOW: (f64, f64, f64) = (255.0, 255.0, 191.0);
const RED: (f64, f64, f64) = (215.0, 25.0, 28.0);

/// Diverging green-yellow-red scale: 0 is green, 0.5 yellow, 1 red.
pub fn heat_color(p: f64) -> (u8, u8, u8) {
    let p = p.clamp(0.0, 1.0);
    let (a, b, s) = if p <= 0.5 {
        (GREEN, YELLOW, p / 0.5)
    } else {
        (YELLOW, RED, (p - 0.5) / 0.5)
    };
    let mix = |x: f64, y: f64| (x + (y - x) * s).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#2ca02c", "#ff7f0e", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[derive(Clone, Copy)]
struct Rect {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, r0: f64, r1: f64) -> Self {
        let (d0, d1) = if d1 > d0 {
            (d0, d1)
        } else {
            let pad = if d0 == 0.0 { 1.0 } else { d0.abs() * 0.05 };
            (d0 - pad, d0 + pad)
        };
        Self { d0, d1, r0, r1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

fn extent<'a>(values: impl IntoIterator<Item = &'a f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(spec: &PlotSpec) -> Self {
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
            w = spec.width,
            h = spec.height
        )
        .unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, spec.width, spec.height).unwrap();
        let mut c = Self { out };
        c.text(spec.width as f64 / 2.0, 22.0, 16.0, "middle", &spec.title);
        if !spec.x_label.is_empty() {
            c.text(spec.width as f64 / 2.0, spec.height as f64 - 8.0, 12.0, "middle", &spec.x_label);
        }
        if !spec.y_label.is_empty() {
            let y = spec.height as f64 / 2.0;
            writeln!(
                c.out,
                r#"<text x="14" y="{y:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {y:.2})">{}</text>"#,
                escape(&spec.y_label)
            )
            .unwrap();
        }
        c
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        )
        .unwrap();
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#
        )
        .unwrap();
    }

    fn rect(&mut self, r: Rect, fill: &str, extra: &str) {
        writeln!(
            self.out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"{extra}/>"#,
            r.x, r.y, r.w, r.h
        )
        .unwrap();
    }

    fn points(pts: impl Iterator<Item = (f64, f64)>) -> String {
        let mut s = String::new();
        for (i, (x, y)) in pts.enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{x:.2},{y:.2}").unwrap();
        }
        s
    }

    fn polyline(&mut self, pts: impl Iterator<Item = (f64, f64)>, stroke: &str, extra: &str) {
        writeln!(
            self.out,
            r#"<polyline points="{}" fill="none" stroke="{stroke}"{extra}/>"#,
            Self::points(pts)
        )
        .unwrap();
    }

    fn polygon(&mut self, pts: impl Iterator<Item = (f64, f64)>, fill: &str, extra: &str) {
        writeln!(self.out, r#"<polygon points="{}" fill="{fill}"{extra}/>"#, Self::points(pts)).unwrap();
    }

    /// Frame plus min/max tick labels on both axes.
    fn axes(&mut self, r: Rect, xs: Scale, ys: Scale) {
        self.rect(r, "none", r##" stroke="#444""##);
        self.text(r.x, r.y + r.h + 12.0, 9.0, "start", &format!("{:.3}", xs.d0));
        self.text(r.x + r.w, r.y + r.h + 12.0, 9.0, "end", &format!("{:.3}", xs.d1));
        self.text(r.x - 3.0, r.y + r.h, 9.0, "end", &format!("{:.3}", ys.d0));
        self.text(r.x - 3.0, r.y + 8.0, 9.0, "end", &format!("{:.3}", ys.d1));
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Panel rectangles laid out row-major in a near-square grid.
fn layout(spec: &PlotSpec, n: usize) -> Vec<(Rect, Rect)> {
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let (top, left, bottom, right) = (36.0, 28.0, 24.0, 8.0);
    let cw = (spec.width as f64 - left - right) / cols as f64;
    let ch = (spec.height as f64 - top - bottom) / rows as f64;
    (0..n)
        .map(|i| {
            let cell = Rect {
                x: left + cw * (i % cols) as f64,
                y: top + ch * (i / cols) as f64,
                w: cw,
                h: ch,
            };
            let plot = Rect {
                x: cell.x + 42.0,
                y: cell.y + 16.0,
                w: (cell.w - 50.0).max(10.0),
                h: (cell.h - 34.0).max(10.0),
            };
            (cell, plot)
        })
        .collect()
}

fn panel_title(c: &mut Canvas, plot: Rect, title: &str) {
    c.text(plot.x + plot.w / 2.0, plot.y - 4.0, 11.0, "middle", title);
}

fn line_grid(c: &mut Canvas, spec: &PlotSpec, panels: &[LinePanel], y_range: Option<[f64; 2]>) {
    for (p, (_, r)) in panels.iter().zip(layout(spec, panels.len())) {
        let (x0, x1) = extent(&p.x);
        let (y0, y1) = y_range.map_or_else(|| extent(&p.y), |[a, b]| (a, b));
        let xs = Scale::new(x0, x1, r.x, r.x + r.w);
        let ys = Scale::new(y0, y1, r.y + r.h, r.y);
        panel_title(c, r, &p.title);
        c.axes(r, xs, ys);
        c.polyline(
            p.x.iter().zip(&p.y).map(|(&x, &y)| (xs.at(x), ys.at(y))),
            PALETTE[0],
            r#" stroke-width="1.5""#,
        );
    }
}

fn bands(c: &mut Canvas, spec: &PlotSpec, panels: &[BandPanel]) {
    for (p, (_, r)) in panels.iter().zip(layout(spec, panels.len())) {
        let (x0, x1) = extent(&p.t);
        let all = p
            .strips
            .iter()
            .flat_map(|s| s.lower.iter().chain(&s.upper))
            .chain(&p.mean);
        let (y0, y1) = extent(all);
        let xs = Scale::new(x0, x1, r.x, r.x + r.w);
        let ys = Scale::new(y0, y1, r.y + r.h, r.y);
        panel_title(c, r, &p.title);
        c.axes(r, xs, ys);
        for (i, s) in p.strips.iter().enumerate() {
            let upper = p.t.iter().zip(&s.upper).map(|(&t, &v)| (xs.at(t), ys.at(v)));
            let lower = p.t.iter().zip(&s.lower).rev().map(|(&t, &v)| (xs.at(t), ys.at(v)));
            c.polygon(
                upper.chain(lower),
                PALETTE[i % PALETTE.len()],
                r#" fill-opacity="0.35" stroke="none""#,
            );
        }
        c.polyline(
            p.t.iter().zip(&p.mean).map(|(&t, &v)| (xs.at(t), ys.at(v))),
            "black",
            r#" stroke-width="1.2" stroke-dasharray="5,3""#,
        );
    }
    // legend keyed on the first panel's strip labels
    if let Some(first) = panels.first() {
        for (i, s) in first.strips.iter().enumerate() {
            let x = 40.0 + 150.0 * i as f64;
            let y = spec.height as f64 - 24.0;
            c.rect(Rect { x, y: y - 9.0, w: 10.0, h: 10.0 }, PALETTE[i % PALETTE.len()], r#" fill-opacity="0.35""#);
            c.text(x + 14.0, y, 10.0, "start", &s.label);
        }
    }
}

fn heatmap(c: &mut Canvas, spec: &PlotSpec, columns: &[HeatColumn]) {
    let r = Rect {
        x: 60.0,
        y: 40.0,
        w: spec.width as f64 - 140.0,
        h: spec.height as f64 - 90.0,
    };
    let m = columns[0].probabilities.len();
    let cw = r.w / columns.len() as f64;
    let chh = r.h / m as f64;
    for (ci, col) in columns.iter().enumerate() {
        let x = r.x + cw * ci as f64;
        for (mi, &p) in col.probabilities.iter().enumerate() {
            let y = r.y + r.h - chh * (mi + 1) as f64;
            c.rect(Rect { x, y, w: cw, h: chh }, &hex(heat_color(p)), "");
        }
        c.text(x + cw / 2.0, r.y + r.h + 12.0, 10.0, "middle", &col.label);
        let (lo, hi) = extent(&col.scores);
        c.text(x + cw / 2.0, r.y + r.h + 24.0, 8.0, "middle", &format!("{lo:.2}"));
        c.text(x + cw / 2.0, r.y - 3.0, 8.0, "middle", &format!("{hi:.2}"));
    }
    c.rect(r, "none", r##" stroke="#444""##);
    // colour bar
    let bx = r.x + r.w + 20.0;
    let steps = 20;
    let bh = r.h / steps as f64;
    for s in 0..steps {
        let p = (s as f64 + 0.5) / steps as f64;
        let y = r.y + r.h - bh * (s + 1) as f64;
        c.rect(Rect { x: bx, y, w: 16.0, h: bh }, &hex(heat_color(p)), "");
    }
    c.text(bx + 20.0, r.y + r.h, 9.0, "start", "0");
    c.text(bx + 20.0, r.y + r.h / 2.0, 9.0, "start", "0.5");
    c.text(bx + 20.0, r.y + 8.0, 9.0, "start", "1");
}

fn bubble(c: &mut Canvas, spec: &PlotSpec, points: &[BubbleMark], median_x: f64, median_y: f64) {
    let r = Rect {
        x: 70.0,
        y: 40.0,
        w: spec.width as f64 - 100.0,
        h: spec.height as f64 - 90.0,
    };
    let (x0, x1) = extent(points.iter().map(|p| &p.x).chain([&median_x]));
    let (y0, y1) = extent(points.iter().map(|p| &p.y).chain([&median_y]));
    let padx = (x1 - x0).abs() * 0.08;
    let pady = (y1 - y0).abs() * 0.08;
    let xs = Scale::new(x0 - padx, x1 + padx, r.x, r.x + r.w);
    let ys = Scale::new(y0 - pady, y1 + pady, r.y + r.h, r.y);
    c.axes(r, xs, ys);
    let max_size = points.iter().map(|p| p.size).fold(0.0, f64::max);
    let max_radius = r.w.min(r.h) * 0.08;
    for (i, p) in points.iter().enumerate() {
        let radius = if max_size > 0.0 {
            (p.size / max_size).sqrt() * max_radius + 2.0
        } else {
            4.0
        };
        let (cx, cy) = (xs.at(p.x), ys.at(p.y));
        writeln!(
            c.out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{radius:.2}" fill="{}" fill-opacity="0.6" stroke="black" stroke-width="0.5"/>"#,
            PALETTE[i % PALETTE.len()]
        )
        .unwrap();
        c.text(cx, cy + 3.0, 9.0, "middle", &p.label);
    }
    let dashed = r##" stroke-dasharray="6,4" stroke-width="1""##;
    c.line(xs.at(median_x), r.y, xs.at(median_x), r.y + r.h, "#555", dashed);
    c.line(r.x, ys.at(median_y), r.x + r.w, ys.at(median_y), "#555", dashed);
}

fn violins(c: &mut Canvas, spec: &PlotSpec, panels: &[ViolinPanel]) {
    for (p, (_, r)) in panels.iter().zip(layout(spec, panels.len())) {
        let all = p.groups.iter().flat_map(|g| g.grid.iter());
        let (y0, y1) = extent(all);
        let ys = Scale::new(y0, y1, r.y + r.h, r.y);
        let xs = Scale::new(0.0, 1.0, r.x, r.x + r.w);
        panel_title(c, r, &p.title);
        c.axes(r, xs, ys);
        let slot = r.w / p.groups.len() as f64;
        for (gi, g) in p.groups.iter().enumerate() {
            let cx = r.x + slot * (gi as f64 + 0.5);
            c.text(cx, r.y + r.h + 12.0, 9.0, "middle", &g.label);
            let dmax = g.density.iter().cloned().fold(0.0, f64::max);
            if dmax > 0.0 {
                let half = slot * 0.42;
                let right = g.grid.iter().zip(&g.density).map(|(&y, &d)| (cx + d / dmax * half, ys.at(y)));
                let left = g.grid.iter().zip(&g.density).rev().map(|(&y, &d)| (cx - d / dmax * half, ys.at(y)));
                c.polygon(
                    right.chain(left),
                    PALETTE[gi % PALETTE.len()],
                    r#" fill-opacity="0.5" stroke="black" stroke-width="0.5""#,
                );
            }
            if let Some([q1, q2, q3]) = g.quartiles {
                let bw = slot * 0.08;
                c.rect(
                    Rect { x: cx - bw / 2.0, y: ys.at(q3), w: bw, h: (ys.at(q1) - ys.at(q3)).max(0.5) },
                    "#333",
                    "",
                );
                c.line(cx - bw, ys.at(q2), cx + bw, ys.at(q2), "white", r#" stroke-width="1.5""#);
            }
        }
    }
}

fn bars(c: &mut Canvas, spec: &PlotSpec, panels: &[BarPanel]) {
    for (p, (_, r)) in panels.iter().zip(layout(spec, panels.len())) {
        let (lo, hi) = extent(&p.values);
        let ys = Scale::new(lo.min(0.0), hi.max(0.0), r.y + r.h, r.y);
        let xs = Scale::new(0.0, p.values.len() as f64, r.x, r.x + r.w);
        panel_title(c, r, &p.title);
        c.axes(r, xs, ys);
        let bw = r.w / p.values.len() as f64;
        let zero = ys.at(0.0);
        for (i, (&v, label)) in p.values.iter().zip(&p.labels).enumerate() {
            let y = ys.at(v);
            let (top, h) = if y < zero { (y, zero - y) } else { (zero, y - zero) };
            let x = r.x + bw * i as f64;
            c.rect(Rect { x: x + bw * 0.1, y: top, w: bw * 0.8, h }, PALETTE[0], "");
            c.text(x + bw / 2.0, r.y + r.h + 22.0, 8.0, "middle", label);
        }
    }
}

pub fn render(spec: &PlotSpec) -> Result<String> {
    validate(spec)?;
    let mut c = Canvas::new(spec);
    match &spec.data {
        PlotData::LineGrid { panels, y_range } => line_grid(&mut c, spec, panels, *y_range),
        PlotData::Band { panels } => bands(&mut c, spec, panels),
        PlotData::Heatmap { columns } => heatmap(&mut c, spec, columns),
        PlotData::Bubble {
            points,
            median_x,
            median_y,
        } => bubble(&mut c, spec, points, *median_x, *median_y),
        PlotData::Violin { panels } => violins(&mut c, spec, panels),
        PlotData::Bar { panels } => bars(&mut c, spec, panels),
    }
    Ok(c.finish())
}

pub fn render_svg(spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render(spec)?).map_err(io_at(path))
}
