//! Disk pictures as SVG.
//!
//! Geodesics become arcs of circles orthogonal to the boundary; for
//! endpoints `u`, `v` on the unit circle the carrier has center
//! `(u + v) / (1 + u.v)` and radius `tan(delta / 2)`, `delta` being the
//! angular separation. Output is byte-stable: element order follows the
//! input and every number is written with nine decimals.
//!
//! Coordinates are in user units, `resolution` per pixel (1000 by default),
//! set up through the `viewBox`. Nine decimals of a pixel cannot pin down the
//! center of an arc a pixel wide to the accuracy the orthogonality check
//! needs; the finer grid can.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hyperbolic::{angular_distance, DiskPoint, Geodesic, EPS_THETA};
use crate::lamination::{GeodesicFamily, LaminationApprox};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    pub width: u32,
    pub height: u32,
    /// Gap between the boundary circle and the canvas edge, in pixels.
    pub margin: f64,
    pub stroke_width: f64,
    pub boundary_stroke_width: f64,
    pub point_radius: f64,
    pub boundary: bool,
    /// User units per pixel.
    pub resolution: f64,
    /// Layer colors, cycled; a layer's own color wins.
    pub palette: Vec<String>,
    pub eps_theta: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 1000,
            height: 1000,
            margin: 10.0,
            stroke_width: 1.0,
            boundary_stroke_width: 1.5,
            point_radius: 2.0,
            boundary: true,
            resolution: 1000.0,
            palette: PALETTE.iter().map(|s| s.to_string()).collect(),
            eps_theta: EPS_THETA,
        }
    }
}

impl RenderStyle {
    fn validate(&self) -> Result<()> {
        let radius = f64::from(self.width.min(self.height)) / 2.0 - self.margin;
        if self.width == 0 || self.height == 0 || !(radius > 0.0) {
            return Err(Error::validation("canvas too small for the disk"));
        }
        if !(self.stroke_width > 0.0 && self.boundary_stroke_width > 0.0 && self.point_radius > 0.0)
        {
            return Err(Error::validation(
                "stroke widths and point radius must be positive",
            ));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::validation("resolution must be positive"));
        }
        Ok(())
    }

    /// Disk radius in user units.
    fn radius(&self) -> f64 {
        (f64::from(self.width.min(self.height)) / 2.0 - self.margin) * self.resolution
    }

    fn center(&self) -> (f64, f64) {
        (
            f64::from(self.width) / 2.0 * self.resolution,
            f64::from(self.height) / 2.0 * self.resolution,
        )
    }

    fn to_canvas(&self, p: DiskPoint) -> (f64, f64) {
        let (r, (cx, cy)) = (self.radius(), self.center());
        (cx + r * p.x, cy - r * p.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerItems {
    Geodesics(Vec<Geodesic>),
    Points(Vec<DiskPoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub color: Option<String>,
    pub items: LayerItems,
}

impl Layer {
    pub fn geodesics(name: impl Into<String>, g: Vec<Geodesic>) -> Self {
        Layer {
            name: name.into(),
            color: None,
            items: LayerItems::Geodesics(g),
        }
    }

    pub fn points(name: impl Into<String>, p: Vec<DiskPoint>) -> Self {
        Layer {
            name: name.into(),
            color: None,
            items: LayerItems::Points(p),
        }
    }

    pub fn from_family(name: impl Into<String>, fam: &GeodesicFamily) -> Self {
        Self::geodesics(name, fam.geodesics().copied().collect())
    }

    pub fn from_lamination(name: impl Into<String>, lam: &LaminationApprox) -> Self {
        Self::geodesics(name, lam.leaves.clone())
    }

    pub fn with_color(mut self, color: impl Into<String>) -> Self {
        self.color = Some(color.into());
        self
    }
}

/// Fixed nine-decimal formatting without negative zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.trim_start_matches('-')
        .trim_matches(|c| c == '0' || c == '.')
        .is_empty()
    {
        "0.000000000".to_string()
    } else {
        s
    }
}

/// Euclidean carrier of a non-diameter geodesic in the unit disk:
/// `(center, radius)`. `None` for diameters.
pub fn carrier_circle(g: &Geodesic, eps_theta: f64) -> Option<([f64; 2], f64)> {
    let (a, b) = g.to_disk();
    let delta = angular_distance(a, b);
    if (PI - delta).abs() <= eps_theta {
        return None;
    }
    // Midpoint direction of the shorter boundary arc.
    let mut mid = 0.5 * (a + b);
    if (a - b).abs() > PI {
        mid += PI;
    }
    let half = 0.5 * delta;
    let dist = 1.0 / half.cos();
    Some(([dist * mid.cos(), dist * mid.sin()], half.tan()))
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn geodesic_element(out: &mut String, id: &str, g: &Geodesic, style: &RenderStyle) {
    let (a, b) = g.to_disk();
    let p = style.to_canvas(DiskPoint {
        x: a.cos(),
        y: a.sin(),
    });
    let q = style.to_canvas(DiskPoint {
        x: b.cos(),
        y: b.sin(),
    });
    match carrier_circle(g, style.eps_theta) {
        None => {
            let _ = writeln!(
                out,
                r#"<path id="{id}" d="M {} {} L {} {}"/>"#,
                num(p.0),
                num(p.1),
                num(q.0),
                num(q.1)
            );
        }
        Some((_, r)) => {
            // The arc bulges toward the disk center, so it turns opposite
            // to the triangle (center, p, q) in screen coordinates.
            let (cx, cy) = style.center();
            let cross = (p.0 - cx) * (q.1 - cy) - (p.1 - cy) * (q.0 - cx);
            let sweep = u8::from(cross < 0.0);
            let rc = num(r * style.radius());
            let _ = writeln!(
                out,
                r#"<path id="{id}" d="M {} {} A {rc} {rc} 0 0 {sweep} {} {}"/>"#,
                num(p.0),
                num(p.1),
                num(q.0),
                num(q.1)
            );
        }
    }
}

/// Renders the layers in order; an empty list gives the boundary circle only.
pub fn render_svg(layers: &[Layer], style: &RenderStyle) -> Result<String> {
    style.validate()?;
    let (w, h) = (style.width, style.height);
    let unit = style.resolution;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {} {}">"#,
        num(f64::from(w) * unit),
        num(f64::from(h) * unit)
    );
    if style.boundary {
        let (cx, cy) = style.center();
        let _ = writeln!(
            out,
            r##"<circle id="boundary" cx="{}" cy="{}" r="{}" fill="none" stroke="#000000" stroke-width="{}"/>"##,
            num(cx),
            num(cy),
            num(style.radius()),
            num(style.boundary_stroke_width * unit)
        );
    }
    for (k, layer) in layers.iter().enumerate() {
        let color = layer.color.clone().unwrap_or_else(|| {
            if style.palette.is_empty() {
                "#000000".to_string()
            } else {
                style.palette[k % style.palette.len()].clone()
            }
        });
        let gid = format!("layer{k}-{}", sanitize(&layer.name));
        match &layer.items {
            LayerItems::Geodesics(gs) => {
                let _ = writeln!(
                    out,
                    r#"<g id="{gid}" fill="none" stroke="{color}" stroke-width="{}">"#,
                    num(style.stroke_width * unit)
                );
                for (i, g) in gs.iter().enumerate() {
                    geodesic_element(&mut out, &format!("{gid}-{i}"), g, style);
                }
            }
            LayerItems::Points(ps) => {
                let _ = writeln!(out, r#"<g id="{gid}" fill="{color}" stroke="none">"#);
                for (i, p) in ps.iter().enumerate() {
                    let (x, y) = style.to_canvas(*p);
                    let _ = writeln!(
                        out,
                        r#"<circle id="{gid}-{i}" cx="{}" cy="{}" r="{}"/>"#,
                        num(x),
                        num(y),
                        num(style.point_radius * unit)
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
