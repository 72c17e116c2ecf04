//! SVG 1.1 rendering of disk models and phase portraits.

use std::f64::consts::PI;
use std::fmt::Write as _;

use polyflow::disk::{DiskModel, ZoneKind};
use polyflow::tracer::{direction_angle, Outcome, SeparatrixGraph};
use polyflow::{Kind, C64};
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Streamline seeds per row and column in phase mode.
    pub density: u32,
    pub seed: u64,
}

impl RenderSpec {
    pub fn check(&self) -> Result<(), String> {
        if self.width == 0 || self.height == 0 {
            return Err("canvas size must be positive".into());
        }
        if self.density == 0 {
            return Err("density must be at least 1".into());
        }
        Ok(())
    }
}

const STYLE: &str = "\
.boundary{fill:none;stroke:#222;stroke-width:1.5}
.label{font:12px sans-serif;fill:#222;text-anchor:middle;dominant-baseline:middle}
.chord{fill:none;stroke:#c0392b;stroke-width:2}
.landing{fill:none;stroke:#2c3e50;stroke-width:1.5}
.transversal{fill:none;stroke:#27ae60;stroke-width:1.5;stroke-dasharray:6 4}
.zone{stroke:none;fill-opacity:0.18}
.zone-strip{fill:#3498db}.zone-sepal{fill:#f1c40f}.zone-cylinder{fill:#9b59b6}
.stream{fill:none;stroke:#95a5a6;stroke-width:0.7}
.separatrix{fill:none;stroke:#2c3e50;stroke-width:1.5}
.homoclinic{fill:none;stroke:#c0392b;stroke-width:2.5}
.equilibrium{stroke:#000;stroke-width:1}
.sink{fill:#2980b9}.source{fill:#e67e22}.center{fill:#fff}.multiple{fill:#8e44ad}";

fn header(spec: &RenderSpec) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<style type=\"text/css\"><![CDATA[\n{STYLE}\n]]></style>\n",
        w = spec.width,
        h = spec.height
    )
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect::<Vec<_>>().join(" ")
}

fn kind_class(k: Kind) -> &'static str {
    match k {
        Kind::Sink => "sink",
        Kind::Source => "source",
        Kind::Center => "center",
        Kind::Multiple => "multiple",
    }
}

struct Disk {
    cx: f64,
    cy: f64,
    r: f64,
    d: usize,
}

impl Disk {
    fn at(&self, z: C64) -> (f64, f64) {
        (self.cx + self.r * z.re, self.cy - self.r * z.im)
    }

    fn point(&self, l: usize) -> C64 {
        C64::from_polar(1.0, direction_angle(l, self.d))
    }

    fn arc(&self, from: usize, to: usize) -> Vec<(f64, f64)> {
        let a = direction_angle(from, self.d);
        let sweep = (direction_angle(to, self.d) - a).rem_euclid(2.0 * PI);
        (0..=8).map(|i| self.at(C64::from_polar(1.0, a + sweep * i as f64 / 8.0))).collect()
    }
}

/// Interior positions for equilibria: landing vertices toward their separatrices, centers
/// toward the ends of their cylinder.
fn vertex_positions(m: &DiskModel, disk: &Disk) -> Vec<C64> {
    let nd = m.nd();
    let lists = m.graph.landing_lists();
    let end_dir = |l: usize| C64::from_polar(1.0, (l as f64 - 0.5) * PI / (disk.d - 1) as f64);
    (0..m.graph.n_equilibria)
        .map(|v| {
            let dirs: Vec<C64> = if lists[v].is_empty() {
                match m.center_zone(v) {
                    Some(z) => m.zones[z].ends.iter().map(|&l| end_dir(l % nd)).collect(),
                    None => vec![],
                }
            } else {
                lists[v].iter().map(|&l| disk.point(l)).collect()
            };
            let mean: C64 = dirs.iter().sum::<C64>() / dirs.len().max(1) as f64;
            let scale = if lists[v].is_empty() { 0.6 } else { 0.45 };
            if mean.norm() < 1e-6 {
                C64::new(0.0, 0.0)
            } else {
                mean / mean.norm() * scale * mean.norm().sqrt()
            }
        })
        .collect()
}

pub fn disk(m: &DiskModel, spec: &RenderSpec) -> String {
    let d = m.degree();
    let nd = m.nd();
    let (w, h) = (spec.width as f64, spec.height as f64);
    let disk = Disk { cx: w / 2.0, cy: h / 2.0, r: 0.42 * w.min(h), d };
    let pos = vertex_positions(m, &disk);
    let mut s = header(spec);

    for z in &m.zones {
        let mut poly = Vec::new();
        for &e in &z.ends {
            let to = e % nd;
            poly.extend(disk.arc((to + nd - 1) % nd, to));
            if let Some(&v) = m.graph.landing.get(&to) {
                poly.push(disk.at(pos[v]));
            }
        }
        let class = match z.kind {
            ZoneKind::Strip => "zone-strip",
            ZoneKind::Sepal { .. } => "zone-sepal",
            ZoneKind::Cylinder { .. } => "zone-cylinder",
        };
        let _ = writeln!(s, "<polygon class=\"zone {class}\" points=\"{}\"/>", points_attr(&poly));
    }
    let _ = writeln!(s, "<circle class=\"boundary\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\"/>", disk.cx, disk.cy, disk.r);
    for &(k, j) in &m.graph.homoclinics {
        let (a, b) = (disk.at(disk.point(k)), disk.at(disk.point(j)));
        let _ = writeln!(s, "<line class=\"chord\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"><title>s_{k},{j}</title></line>", a.0, a.1, b.0, b.1);
    }
    for (&l, &v) in &m.graph.landing {
        let (a, b) = (disk.at(disk.point(l)), disk.at(pos[v]));
        let _ = writeln!(s, "<line class=\"landing\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", a.0, a.1, b.0, b.1);
    }
    for t in &m.transversals {
        let end = |l: usize| C64::from_polar(1.0, (l as f64 - 0.5) * PI / (d - 1) as f64);
        let (a, b) = (disk.at(end(t.k)), disk.at(end(t.j)));
        let _ = writeln!(s, "<line class=\"transversal\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"><title>T_{},{}</title></line>", a.0, a.1, b.0, b.1, t.k, t.j);
    }
    for (v, p) in pos.iter().enumerate() {
        let (x, y) = disk.at(*p);
        let kind = match m.kinds[v] {
            polyflow::disk::EqKind::Sink => Kind::Sink,
            polyflow::disk::EqKind::Source => Kind::Source,
            polyflow::disk::EqKind::Center => Kind::Center,
            polyflow::disk::EqKind::Multiple => Kind::Multiple,
        };
        let _ = writeln!(s, "<circle class=\"equilibrium {}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\"/>", kind_class(kind));
    }
    for l in 0..nd {
        let (x, y) = disk.at(disk.point(l) * 1.08);
        let _ = writeln!(s, "<text class=\"label\" x=\"{x:.2}\" y=\"{y:.2}\">{l}</text>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn phase(sg: &SeparatrixGraph, spec: &RenderSpec) -> String {
    let field = sg.field();
    let half = 2.0 * (1.0 + field.max_root());
    let (w, h) = (spec.width as f64, spec.height as f64);
    let scale = 0.5 * w.min(h) / half;
    let at = |z: C64| (w / 2.0 + scale * z.re, h / 2.0 - scale * z.im);
    let inside = |z: C64| z.re.abs() <= half && z.im.abs() <= half;
    let mut s = header(spec);
    let _ = writeln!(s, "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\"/></clipPath></defs>", spec.width, spec.height);
    s.push_str("<g clip-path=\"url(#frame)\">\n");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.density as usize;
    let cell = 2.0 * half / n as f64;
    let step = cell / 12.0;
    for i in 0..n {
        for j in 0..n {
            let z0 = C64::new(
                -half + cell * (i as f64 + rng.gen_range(0.25..0.75)),
                -half + cell * (j as f64 + rng.gen_range(0.25..0.75)),
            );
            let mut line = Vec::new();
            for dir in [-1.0, 1.0] {
                let mut z = z0;
                let mut half_line = Vec::new();
                for _ in 0..10 {
                    let v = field.eval(z);
                    if v.norm() < 1e-12 || !inside(z) {
                        break;
                    }
                    z += v / v.norm() * step * dir;
                    half_line.push(z);
                }
                if dir < 0.0 {
                    half_line.reverse();
                    line.extend(half_line);
                    line.push(z0);
                } else {
                    line.extend(half_line);
                }
            }
            let pts: Vec<_> = line.into_iter().map(at).collect();
            let _ = writeln!(s, "<polyline class=\"stream\" points=\"{}\"/>", points_attr(&pts));
        }
    }
    for t in &sg.traces {
        let class = match t.outcome {
            Outcome::Homoclinic { .. } => "homoclinic",
            _ => "separatrix",
        };
        let pts: Vec<_> = t.polyline.iter().map(|&z| at(z)).collect();
        let _ = writeln!(s, "<polyline class=\"{class}\" points=\"{}\"><title>s_{}</title></polyline>", points_attr(&pts), t.ell);
    }
    for e in &sg.equilibria {
        let (x, y) = at(e.location);
        let _ = writeln!(s, "<circle class=\"equilibrium {}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\"/>", kind_class(e.kind));
    }
    s.push_str("</g>\n</svg>\n");
    s
}
