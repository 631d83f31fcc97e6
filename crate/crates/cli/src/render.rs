//! Static SVG plots of frameworks, displacement fields and root trajectories.

use std::fmt::Write;

use tensegrity_core::{Configuration, FrameworkGraph, MemberKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("no projection for dimension {0}")]
    Dimension(usize),
    #[error("displacement vector {index} has length {found}, expected {expected}")]
    Displacement { index: usize, expected: usize, found: usize },
    #[error("arrow scale must be positive and finite, got {0}")]
    ArrowScale(f64),
}

/// Map from embedding space to the drawing plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projection {
    /// Isometric view along (1,1,1)/√3; also accepts d ≤ 2 by zero padding.
    Isometric,
    /// First two coordinates, padding with zeros.
    Planar,
}

impl Projection {
    pub fn for_dimension(d: usize) -> Result<Self, RenderError> {
        match d {
            1 | 2 => Ok(Projection::Planar),
            3 => Ok(Projection::Isometric),
            _ => Err(RenderError::Dimension(d)),
        }
    }

    pub fn apply(self, x: &[f64]) -> [f64; 2] {
        let c = |k: usize| x.get(k).copied().unwrap_or(0.0);
        match self {
            Projection::Planar => [c(0), c(1)],
            Projection::Isometric => {
                let (a, b, z) = (c(0), c(1), c(2));
                [(a - b) / 2f64.sqrt(), (2.0 * z - a - b) / 6f64.sqrt()]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    /// `None` picks a projection from the dimension.
    pub projection: Option<Projection>,
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub arrow_scale: f64,
    pub bar_color: String,
    pub cable_color: String,
    pub strut_color: String,
    pub node_color: String,
    /// Colors cycled over displacement vectors and trajectories.
    pub palette: Vec<String>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        let s = |v: &str| v.to_string();
        RenderSpec {
            projection: None,
            width: 640.0,
            height: 480.0,
            margin: 24.0,
            arrow_scale: 1.0,
            bar_color: s("#222222"),
            cable_color: s("#1f77b4"),
            strut_color: s("#d62728"),
            node_color: s("#000000"),
            palette: ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999"]
                .map(String::from)
                .to_vec(),
        }
    }
}

/// What to draw. Trajectories are already planar, e.g. complex coordinates
/// as (re, im).
#[derive(Clone, Debug, Default)]
pub struct Scene<'a> {
    pub framework: Option<(&'a FrameworkGraph, &'a Configuration)>,
    /// Each vector has one entry per coordinate, node-major.
    pub displacements: Vec<Vec<f64>>,
    pub trajectories: Vec<Vec<[f64; 2]>>,
}

struct Frame {
    min: [f64; 2],
    scale: f64,
    height: f64,
    margin: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]], spec: &RenderSpec) -> Frame {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        if points.is_empty() {
            min = [0.0; 2];
            max = [1.0; 2];
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        let avail = (spec.width - 2.0 * spec.margin).min(spec.height - 2.0 * spec.margin).max(1.0);
        Frame { min, scale: avail / span, height: spec.height, margin: spec.margin }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = self.margin + (p[0] - self.min[0]) * self.scale;
        let y = self.height - self.margin - (p[1] - self.min[1]) * self.scale;
        (x, y)
    }
}

fn color(spec: &RenderSpec, k: usize) -> &str {
    if spec.palette.is_empty() {
        "#000000"
    } else {
        &spec.palette[k % spec.palette.len()]
    }
}

pub fn render_svg(scene: &Scene<'_>, spec: &RenderSpec) -> Result<String, RenderError> {
    if !(spec.arrow_scale > 0.0 && spec.arrow_scale.is_finite()) {
        return Err(RenderError::ArrowScale(spec.arrow_scale));
    }
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut arrows: Vec<Vec<(usize, [f64; 2], [f64; 2])>> = Vec::new();
    let mut members = Vec::new();
    if let Some((graph, p)) = scene.framework {
        let (n, d) = (p.node_count(), p.dimension());
        let proj = match spec.projection {
            Some(pr) if d <= 3 => pr,
            Some(_) => return Err(RenderError::Dimension(d)),
            None => Projection::for_dimension(d)?,
        };
        nodes = (0..n).map(|i| proj.apply(p.node(i))).collect();
        members = graph.members().to_vec();
        for (index, v) in scene.displacements.iter().enumerate() {
            if v.len() != n * d {
                return Err(RenderError::Displacement { index, expected: n * d, found: v.len() });
            }
            let group = (0..n)
                .filter_map(|i| {
                    let dv: Vec<f64> = v[i * d..(i + 1) * d].iter().map(|c| c * spec.arrow_scale).collect();
                    let tip: Vec<f64> = p.node(i).iter().zip(&dv).map(|(a, b)| a + b).collect();
                    let tip = proj.apply(&tip);
                    let len = (tip[0] - nodes[i][0]).hypot(tip[1] - nodes[i][1]);
                    (len > 1e-12).then_some((i, nodes[i], tip))
                })
                .collect();
            arrows.push(group);
        }
    } else if !scene.displacements.is_empty() {
        return Err(RenderError::Displacement { index: 0, expected: 0, found: scene.displacements[0].len() });
    }

    let mut all: Vec<[f64; 2]> = nodes.clone();
    all.extend(arrows.iter().flatten().map(|a| a.2));
    all.extend(scene.trajectories.iter().flatten().copied());
    let frame = Frame::fit(&all, spec);

    let mut out = String::new();
    let w = |out: &mut String, s: std::fmt::Arguments<'_>| out.write_fmt(s).expect("write to string");
    w(
        &mut out,
        format_args!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
            spec.width, spec.height, spec.width, spec.height
        ),
    );
    if !arrows.is_empty() {
        out.push_str("<defs>\n");
        for k in 0..arrows.len() {
            w(
                &mut out,
                format_args!(
                    "<marker id=\"head{k}\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"{}\"/></marker>\n",
                    color(spec, k)
                ),
            );
        }
        out.push_str("</defs>\n");
    }
    if !members.is_empty() {
        out.push_str("<g id=\"members\">\n");
        for m in &members {
            let (a, b) = (frame.map(nodes[m.i]), frame.map(nodes[m.j]));
            let (class, stroke, dash) = match m.kind {
                MemberKind::Bar => ("bar", &spec.bar_color, ""),
                MemberKind::Cable => ("cable", &spec.cable_color, " stroke-dasharray=\"6 3\""),
                MemberKind::Strut => ("strut", &spec.strut_color, ""),
            };
            let width = if m.kind == MemberKind::Cable { 1.5 } else { 3.0 };
            w(
                &mut out,
                format_args!(
                    "<line class=\"member {class}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash}/>\n",
                    a.0, a.1, b.0, b.1
                ),
            );
        }
        out.push_str("</g>\n");
    }
    for (k, group) in arrows.iter().enumerate() {
        w(&mut out, format_args!("<g class=\"arrows\" data-vector=\"{k}\" stroke=\"{}\">\n", color(spec, k)));
        for (i, from, to) in group {
            let (a, b) = (frame.map(*from), frame.map(*to));
            w(
                &mut out,
                format_args!(
                    "<line class=\"arrow\" data-node=\"{}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke-width=\"1.5\" marker-end=\"url(#head{k})\"/>\n",
                    i + 1,
                    a.0,
                    a.1,
                    b.0,
                    b.1
                ),
            );
        }
        out.push_str("</g>\n");
    }
    if !nodes.is_empty() {
        out.push_str("<g id=\"nodes\">\n");
        for (i, p) in nodes.iter().enumerate() {
            let (x, y) = frame.map(*p);
            w(
                &mut out,
                format_args!(
                    "<circle class=\"node\" data-node=\"{}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"{}\"/>\n",
                    i + 1,
                    spec.node_color
                ),
            );
        }
        out.push_str("</g>\n");
    }
    if !scene.trajectories.is_empty() {
        out.push_str("<g id=\"trajectories\">\n");
        for (k, path) in scene.trajectories.iter().enumerate() {
            let pts: Vec<String> = path
                .iter()
                .map(|p| {
                    let (x, y) = frame.map(*p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            w(
                &mut out,
                format_args!(
                    "<polyline class=\"trajectory\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    pts.join(" "),
                    color(spec, k)
                ),
            );
            if let Some(end) = path.last() {
                let (x, y) = frame.map(*end);
                w(
                    &mut out,
                    format_args!(
                        "<circle class=\"endpoint\" data-re=\"{}\" data-im=\"{}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"{}\"/>\n",
                        end[0],
                        end[1],
                        color(spec, k)
                    ),
                );
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
