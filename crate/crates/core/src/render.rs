//! SVG drawings of realized structures. Clipping and arrow placement are
//! exact; floats appear only when coordinates are printed.

use std::fmt::Write;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{ProjPoint, Rational};
use crate::projmap::ProjMap;
use crate::realization::Realization;
use crate::structure::IncidenceStructure;

/// Axis-aligned box in chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Viewport {
    pub x_min: Rational,
    pub y_min: Rational,
    pub x_max: Rational,
    pub y_max: Rational,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InfinityMarker {
    /// An arrow at the viewport boundary pointing in the point's direction.
    #[default]
    Arrow,
    /// Infinite points are not drawn.
    Hidden,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// Homogeneous coordinate set to one (0, 1 or 2).
    pub chart: usize,
    /// Applied to the realization before charting.
    pub premap: Option<ProjMap>,
    /// Fitted to the finite points when absent.
    pub viewport: Option<Viewport>,
    pub infinity: InfinityMarker,
    /// Width of the drawing in pixels.
    pub width: u32,
    /// Fail with `ChartDegenerate` instead of drawing the line at infinity
    /// as a dashed frame.
    pub reject_line_at_infinity: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            chart: 2,
            premap: None,
            viewport: None,
            infinity: InfinityMarker::Arrow,
            width: 600,
            reject_line_at_infinity: false,
        }
    }
}

const RED: &str = "#d62728";
const BLUE: &str = "#1f5fbf";
const GRAY: &str = "#555555";

fn color(valence: usize) -> &'static str {
    match valence {
        3 => RED,
        4 => BLUE,
        _ => GRAY,
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Chart coordinates: the two remaining homogeneous coordinates, in order,
/// divided by the chart one. Points at infinity of the chart keep their
/// direction instead.
enum Charted {
    Finite(Rational, Rational),
    Infinite(Rational, Rational),
}

fn axes(chart: usize) -> (usize, usize) {
    match chart {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn chart_point(p: &ProjPoint, chart: usize) -> Charted {
    let c = p.coords();
    let (i, j) = axes(chart);
    let x = Rational::from_integer(c[i].clone());
    let y = Rational::from_integer(c[j].clone());
    if c[chart].is_zero() {
        Charted::Infinite(x, y)
    } else {
        let w = Rational::from_integer(c[chart].clone());
        Charted::Finite(x / &w, y / w)
    }
}

fn fit(points: &[(Rational, Rational)]) -> Viewport {
    if points.is_empty() {
        return Viewport {
            x_min: q(-1),
            y_min: q(-1),
            x_max: q(1),
            y_max: q(1),
        };
    }
    let min = |f: &dyn Fn(&(Rational, Rational)) -> Rational| points.iter().map(f).min().expect("non-empty");
    let max = |f: &dyn Fn(&(Rational, Rational)) -> Rational| points.iter().map(f).max().expect("non-empty");
    let (x0, x1) = (min(&|p| p.0.clone()), max(&|p| p.0.clone()));
    let (y0, y1) = (min(&|p| p.1.clone()), max(&|p| p.1.clone()));
    let span = std::cmp::max(&x1 - &x0, &y1 - &y0);
    let margin = if span.is_zero() { q(1) } else { span / q(4) };
    Viewport {
        x_min: x0 - &margin,
        y_min: y0 - &margin,
        x_max: x1 + &margin,
        y_max: y1 + margin,
    }
}

/// The part of `a x + b y + c = 0` inside the box, if any.
fn clip(a: &Rational, b: &Rational, c: &Rational, v: &Viewport) -> Option<[(Rational, Rational); 2]> {
    let mut hits: Vec<(Rational, Rational)> = Vec::new();
    let inside = |t: &Rational, lo: &Rational, hi: &Rational| t >= lo && t <= hi;
    if !b.is_zero() {
        for x in [&v.x_min, &v.x_max] {
            let y = -(a * x + c) / b;
            if inside(&y, &v.y_min, &v.y_max) {
                hits.push((x.clone(), y));
            }
        }
    }
    if !a.is_zero() {
        for y in [&v.y_min, &v.y_max] {
            let x = -(b * y + c) / a;
            if inside(&x, &v.x_min, &v.x_max) {
                hits.push((x, y.clone()));
            }
        }
    }
    hits.sort();
    hits.dedup();
    if hits.len() < 2 {
        return None;
    }
    Some([hits[0].clone(), hits[hits.len() - 1].clone()])
}

/// Where the ray from the box centre in direction `(dx, dy)` leaves the box.
fn boundary_hit(dx: &Rational, dy: &Rational, v: &Viewport) -> (Rational, Rational) {
    let two = q(2);
    let cx = (&v.x_min + &v.x_max) / &two;
    let cy = (&v.y_min + &v.y_max) / &two;
    let mut t: Option<Rational> = None;
    let mut consider = |cand: Rational| {
        if cand.is_positive() && t.as_ref().map_or(true, |s| &cand < s) {
            t = Some(cand);
        }
    };
    if !dx.is_zero() {
        consider((&v.x_max - &cx) / dx);
        consider((&v.x_min - &cx) / dx);
    }
    if !dy.is_zero() {
        consider((&v.y_max - &cy) / dy);
        consider((&v.y_min - &cy) / dy);
    }
    let t = t.expect("direction is nonzero");
    (&cx + dx * &t, &cy + dy * &t)
}

struct Canvas {
    v: Viewport,
    scale: f64,
    height: f64,
    width: f64,
}

const PAD: f64 = 12.0;

impl Canvas {
    fn new(v: Viewport, width: u32) -> Self {
        let w = (&v.x_max - &v.x_min).to_f64().unwrap_or(1.0).max(f64::MIN_POSITIVE);
        let h = (&v.y_max - &v.y_min).to_f64().unwrap_or(1.0);
        let scale = (f64::from(width) - 2.0 * PAD) / w;
        Self {
            height: h * scale + 2.0 * PAD,
            width: f64::from(width),
            scale,
            v,
        }
    }

    fn xy(&self, p: &(Rational, Rational)) -> (f64, f64) {
        let x = (&p.0 - &self.v.x_min).to_f64().unwrap_or(0.0) * self.scale + PAD;
        let y = (&self.v.y_max - &p.1).to_f64().unwrap_or(0.0) * self.scale + PAD;
        (x, y)
    }
}

fn f(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Draws every line clipped to the viewport, finite points as circles and
/// points at infinity as boundary arrows. 3-valent elements are red,
/// 4-valent ones blue, others gray.
pub fn render_svg(s: &IncidenceStructure, r: &Realization, opts: &RenderOptions) -> Result<String> {
    if opts.chart > 2 {
        return Err(Error::Precondition(format!("chart index {} is not 0, 1 or 2", opts.chart)));
    }
    let r = match &opts.premap {
        Some(m) => r.transformed(m),
        None => r.clone(),
    };
    let pts = r.point_coords(s)?;
    let lns = r.line_coords(s)?;
    let charted: Vec<Charted> = pts.iter().map(|p| chart_point(p, opts.chart)).collect();
    let finite: Vec<(Rational, Rational)> = charted
        .iter()
        .filter_map(|c| match c {
            Charted::Finite(x, y) => Some((x.clone(), y.clone())),
            Charted::Infinite(..) => None,
        })
        .collect();
    let v = opts.viewport.clone().unwrap_or_else(|| fit(&finite));
    if v.x_min >= v.x_max || v.y_min >= v.y_max {
        return Err(Error::Precondition("viewport is empty".into()));
    }
    let canvas = Canvas::new(v, opts.width);
    let mut out = String::new();
    let (w, h) = (canvas.width, canvas.height);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        f(w),
        f(h),
        f(w),
        f(h)
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black" stroke-width="0.5"/>"#,
        f(PAD),
        f(PAD),
        f(w - 2.0 * PAD),
        f(h - 2.0 * PAD)
    )
    .unwrap();

    let (i, j) = axes(opts.chart);
    for (k, l) in lns.iter().enumerate() {
        let c = l.coords();
        let (a, b, cc) = (
            Rational::from_integer(c[i].clone()),
            Rational::from_integer(c[j].clone()),
            Rational::from_integer(c[opts.chart].clone()),
        );
        let id = &s.line_ids()[k];
        if a.is_zero() && b.is_zero() {
            if opts.reject_line_at_infinity {
                return Err(Error::ChartDegenerate(id.clone()));
            }
            writeln!(
                out,
                r#"<rect class="line infinite" data-id="{}" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="2" stroke-dasharray="6 4"/>"#,
                escape(id),
                f(PAD / 2.0),
                f(PAD / 2.0),
                f(w - PAD),
                f(h - PAD),
                color(s.line_valence(k))
            )
            .unwrap();
            continue;
        }
        if let Some([p0, p1]) = clip(&a, &b, &cc, &canvas.v) {
            let (x0, y0) = canvas.xy(&p0);
            let (x1, y1) = canvas.xy(&p1);
            writeln!(
                out,
                r#"<line class="line" data-id="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.2"/>"#,
                escape(id),
                f(x0),
                f(y0),
                f(x1),
                f(y1),
                color(s.line_valence(k))
            )
            .unwrap();
        }
    }

    for (k, c) in charted.iter().enumerate() {
        let id = escape(&s.point_ids()[k]);
        let fill = color(s.point_valence(k));
        match c {
            Charted::Finite(x, y) => {
                let inside = x >= &canvas.v.x_min && x <= &canvas.v.x_max && y >= &canvas.v.y_min && y <= &canvas.v.y_max;
                if !inside {
                    continue;
                }
                let (px, py) = canvas.xy(&(x.clone(), y.clone()));
                writeln!(
                    out,
                    r#"<circle class="point" data-id="{id}" cx="{}" cy="{}" r="4" fill="{fill}"><title>{id}</title></circle>"#,
                    f(px),
                    f(py)
                )
                .unwrap();
            }
            Charted::Infinite(dx, dy) => {
                if opts.infinity == InfinityMarker::Hidden {
                    continue;
                }
                let tip = boundary_hit(dx, dy, &canvas.v);
                let (tx, ty) = canvas.xy(&tip);
                // unit direction in screen space, y flipped
                let (ux, uy) = (dx.to_f64().unwrap_or(0.0), -dy.to_f64().unwrap_or(0.0));
                let n = (ux * ux + uy * uy).sqrt();
                let (ux, uy) = (ux / n, uy / n);
                let (bx, by) = (tx - 18.0 * ux, ty - 18.0 * uy);
                let (hx, hy) = (tx - 7.0 * ux, ty - 7.0 * uy);
                let (nx, ny) = (-uy * 4.0, ux * 4.0);
                writeln!(
                    out,
                    r#"<g class="point infinite" data-id="{id}"><title>{id}</title><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{fill}" stroke-width="2"/><polygon points="{},{} {},{} {},{}" fill="{fill}"/></g>"#,
                    f(bx),
                    f(by),
                    f(hx),
                    f(hy),
                    f(tx),
                    f(ty),
                    f(hx + nx),
                    f(hy + ny),
                    f(hx - nx),
                    f(hy - ny)
                )
                .unwrap();
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The identity chart with a given viewport, parsed from `x0,y0,x1,y1`.
pub fn parse_viewport(s: &str) -> Result<Viewport> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Validation(format!("viewport `{s}` needs four comma-separated rationals")));
    }
    let r = parts
        .iter()
        .map(|p| crate::kernel::parse_rational(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Viewport {
        x_min: r[0].clone(),
        y_min: r[1].clone(),
        x_max: r[2].clone(),
        y_max: r[3].clone(),
    })
}
