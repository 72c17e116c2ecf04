//! JSON schemas. Output goes through [`Json`], which keeps key order and prints floats with
//! 12 significant digits so that identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
pub use serde_json::Value;

use crate::combin::{BifurcationEvent, InequalitySystem, Sign};
use crate::disk::{decompose_with, Boundary, CenterPlacement, DiskModel, EqKind, LabelledGraph, Zone, ZoneKind};
use crate::error::{Error, Result};
use crate::invariants::Invariants;
use crate::poly::{EquilibriumPoint, Polynomial};
use crate::realize::VerifyReport;
use crate::tracer::SeparatrixGraph;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn uint(x: usize) -> Json {
        Json::Int(x as i64)
    }

    pub fn complex(z: C64) -> Json {
        Json::Arr(vec![Json::Num(z.re), Json::Num(z.im)])
    }

    pub fn pairs(v: &[(usize, usize)]) -> Json {
        Json::Arr(v.iter().map(|&(a, b)| Json::Arr(vec![Json::uint(a), Json::uint(b)])).collect())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = |n: usize| "  ".repeat(n);
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&fmt_num(*x)),
            Json::Str(s) => out.push_str(&Value::String(s.clone()).to_string()),
            Json::Arr(v) => {
                let flat = v.iter().all(|x| !matches!(x, Json::Arr(_) | Json::Obj(_)));
                if flat {
                    out.push('[');
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        x.write(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (i, x) in v.iter().enumerate() {
                        out.push_str(&pad(indent + 1));
                        x.write(out, indent + 1);
                        out.push_str(if i + 1 < v.len() { ",\n" } else { "\n" });
                    }
                    out.push_str(&pad(indent));
                    out.push(']');
                }
            }
            Json::Obj(kv) => {
                if kv.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (k, v)) in kv.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    out.push_str(&Value::String(k.clone()).to_string());
                    out.push_str(": ");
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < kv.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
        }
    }
}

/// Twelve significant digits, trailing zeros trimmed; non-finite values become `null`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mant), exp)
    }
}

fn err(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| err(format!("{what}: expected a non-negative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| err(format!("{what}: expected a number")))
}

fn as_complex(v: &Value, what: &str) -> Result<C64> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(C64::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(err(format!("{what}: expected [re, im]"))),
    }
}

fn as_pair(v: &Value, what: &str) -> Result<(usize, usize)> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b, ..]) => Ok((as_usize(a, what)?, as_usize(b, what)?)),
        _ => Err(err(format!("{what}: expected [k, j]"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| err(format!("missing field \"{key}\"")))
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| err(format!("malformed JSON: {e}")))
}

pub fn polynomial_to_json(p: &Polynomial) -> Json {
    Json::obj(vec![
        ("degree", Json::uint(p.degree())),
        ("coefficients", Json::Arr(p.coeffs().iter().map(|&c| Json::complex(c)).collect())),
    ])
}

pub fn polynomial_from_json(v: &Value) -> Result<Polynomial> {
    let d = as_usize(field(v, "degree")?, "degree")?;
    let cs = field(v, "coefficients")?.as_array().ok_or_else(|| err("coefficients: expected an array"))?;
    if d < 2 {
        return Err(err(format!("degree must be at least 2, got {d}")));
    }
    if cs.len() != d - 1 {
        return Err(err(format!("degree {d} needs {} coefficients, got {}", d - 1, cs.len())));
    }
    let coeffs = cs.iter().map(|c| as_complex(c, "coefficient")).collect::<Result<Vec<_>>>()?;
    Polynomial::new(coeffs)
}

fn landing_json(landing: &BTreeMap<usize, usize>) -> Json {
    Json::Obj(landing.iter().map(|(l, e)| (l.to_string(), Json::uint(*e))).collect())
}

pub fn separatrix_graph_to_json(sg: &SeparatrixGraph) -> Json {
    Json::obj(vec![
        ("degree", Json::uint(sg.degree)),
        (
            "homoclinics",
            Json::Arr(
                sg.homoclinics
                    .iter()
                    .map(|&(k, j, t)| Json::Arr(vec![Json::uint(k), Json::uint(j), Json::Num(t)]))
                    .collect(),
            ),
        ),
        ("landing", landing_json(&sg.landing)),
    ])
}

fn kind_name(k: EqKind) -> &'static str {
    match k {
        EqKind::Sink => "sink",
        EqKind::Source => "source",
        EqKind::Center => "center",
        EqKind::Multiple => "multiple",
    }
}

fn boundary_json(m: &DiskModel, b: &Option<Boundary>) -> Json {
    match b {
        None => Json::Null,
        Some(b) => {
            let opt = |x: Option<usize>| x.map(Json::uint).unwrap_or(Json::Null);
            let run: Vec<(usize, usize)> = b.run.iter().map(|&i| m.graph.homoclinics[i]).collect();
            Json::obj(vec![("first", opt(b.first)), ("run", Json::pairs(&run)), ("last", opt(b.last))])
        }
    }
}

fn zone_json(m: &DiskModel, z: &Zone) -> Json {
    let mut kv = Vec::new();
    match z.kind {
        ZoneKind::Cylinder { ccw } => {
            kv.push(("kind", Json::Str("cylinder".into())));
            kv.push(("orientation", Json::Str(if ccw { "ccw" } else { "cw" }.into())));
        }
        ZoneKind::Sepal { upper } => {
            kv.push(("kind", Json::Str("sepal".into())));
            kv.push(("side", Json::Str(if upper { "upper" } else { "lower" }.into())));
        }
        ZoneKind::Strip => kv.push(("kind", Json::Str("strip".into()))),
    }
    kv.push(("lower", boundary_json(m, &z.lower)));
    kv.push(("upper", boundary_json(m, &z.upper)));
    kv.push(("ends", Json::Arr(z.ends.iter().map(|&e| Json::uint(e)).collect())));
    kv.push(("equilibria", Json::Arr(z.equilibria.iter().map(|&e| Json::uint(e)).collect())));
    Json::obj(kv)
}

/// Disk model JSON; `numeric` adds the traced homoclinic times and equilibrium positions.
pub fn disk_model_to_json(m: &DiskModel, numeric: Option<&SeparatrixGraph>) -> Json {
    let homs = Json::Arr(
        m.graph
            .homoclinics
            .iter()
            .map(|&(k, j)| {
                let mut v = vec![Json::uint(k), Json::uint(j)];
                if let Some(sg) = numeric {
                    if let Some(h) = sg.homoclinics.iter().find(|h| h.0 == k && h.1 == j) {
                        v.push(Json::Num(h.2));
                    }
                }
                Json::Arr(v)
            })
            .collect(),
    );
    let eqs = Json::Arr(
        (0..m.graph.n_equilibria)
            .map(|v| {
                let mut kv = vec![
                    ("index", Json::uint(v)),
                    ("multiplicity", Json::uint(m.multiplicities[v])),
                    ("kind", Json::Str(kind_name(m.kinds[v]).into())),
                ];
                if let Some(sg) = numeric {
                    let e: &EquilibriumPoint = &sg.equilibria[v];
                    kv.push(("location", Json::complex(e.location)));
                    kv.push(("residue", Json::complex(e.residue)));
                }
                Json::obj(kv)
            })
            .collect(),
    );
    let c = m.counts;
    Json::obj(vec![
        ("degree", Json::uint(m.degree())),
        ("homoclinics", homs),
        ("landing", landing_json(&m.graph.landing)),
        ("equilibria", eqs),
        ("zones", Json::Arr(m.zones.iter().map(|z| zone_json(m, z)).collect())),
        ("transversals", Json::pairs(&m.transversals.iter().map(|t| (t.k, t.j)).collect::<Vec<_>>())),
        (
            "counts",
            Json::obj(vec![
                ("s", Json::uint(c.s)),
                ("h", Json::uint(c.h)),
                ("mstar", Json::uint(c.mstar)),
                ("N", Json::uint(c.n)),
                ("dim", Json::uint(c.dim())),
                ("codim", Json::uint(c.codim())),
            ]),
        ),
    ])
}

pub fn labelled_graph_from_json(v: &Value) -> Result<LabelledGraph> {
    let d = as_usize(field(v, "degree")?, "degree")?;
    if d < 2 {
        return Err(err(format!("degree must be at least 2, got {d}")));
    }
    let homs = field(v, "homoclinics")?
        .as_array()
        .ok_or_else(|| err("homoclinics: expected an array"))?
        .iter()
        .map(|h| as_pair(h, "homoclinic"))
        .collect::<Result<Vec<_>>>()?;
    let mut landing = BTreeMap::new();
    for (k, e) in field(v, "landing")?.as_object().ok_or_else(|| err("landing: expected an object"))? {
        let l: usize = k.parse().map_err(|_| err(format!("landing key \"{k}\" is not an index")))?;
        landing.insert(l, as_usize(e, "landing target")?);
    }
    let from_landing = landing.values().map(|&e| e + 1).max().unwrap_or(0);
    let n = match v.get("counts").and_then(|c| c.get("N")) {
        Some(n) => as_usize(n, "counts.N")?,
        None => match v.get("equilibria").and_then(|e| e.as_array()) {
            Some(a) => a.len(),
            None => from_landing + crate::disk::cylinder_count(&LabelledGraph::new(d, homs.clone(), landing.clone(), from_landing))?,
        },
    };
    Ok(LabelledGraph::new(d, homs, landing, n))
}

/// Accepts a disk model or a bare separatrix graph. Cylinder centers follow the `zones`
/// entries when present.
pub fn disk_model_from_json(v: &Value) -> Result<DiskModel> {
    let g = labelled_graph_from_json(v)?;
    let mults: Option<Vec<usize>> = v
        .get("equilibria")
        .and_then(|e| e.as_array())
        .map(|a| a.iter().map(|e| e.get("multiplicity").and_then(|m| m.as_u64()).map(|m| m as usize).unwrap_or(1)).collect());
    let mut centers: Vec<(Vec<(usize, usize)>, bool, usize)> = Vec::new();
    if let Some(zs) = v.get("zones").and_then(|z| z.as_array()) {
        for z in zs.iter().filter(|z| z.get("kind").and_then(|k| k.as_str()) == Some("cylinder")) {
            let b = z.get("lower").filter(|b| !b.is_null()).or_else(|| z.get("upper")).ok_or_else(|| err("cylinder without a boundary"))?;
            let mut run = field(b, "run")?.as_array().ok_or_else(|| err("run: expected an array"))?.iter().map(|h| as_pair(h, "run")).collect::<Result<Vec<_>>>()?;
            run.sort();
            let c = field(z, "equilibria")?.as_array().and_then(|a| a.first()).ok_or_else(|| err("cylinder without a center"))?;
            let ccw = z.get("orientation").and_then(|o| o.as_str()) != Some("cw");
            centers.push((run, ccw, as_usize(c, "center")?));
        }
    }
    let gh = g.homoclinics.clone();
    let lookup = |run: &[usize], ccw: bool, _: &[usize]| {
        let mut key: Vec<(usize, usize)> = run.iter().map(|&i| gh[i]).collect();
        key.sort();
        centers.iter().find(|c| c.0 == key && c.1 == ccw).map(|c| c.2)
    };
    let placement = if centers.is_empty() { CenterPlacement::Canonical } else { CenterPlacement::With(&lookup) };
    decompose_with(&g, mults.as_deref(), placement)
}

pub fn invariants_to_json(inv: &Invariants) -> Json {
    Json::obj(vec![
        ("alphas", Json::Arr(inv.alphas.iter().map(|&a| Json::complex(a)).collect())),
        ("taus", Json::Arr(inv.taus.iter().map(|&t| Json::Num(t)).collect())),
        ("transversal_index", Json::pairs(&inv.transversal_index)),
        ("homoclinic_index", Json::pairs(&inv.homoclinic_index)),
    ])
}

pub fn system_to_json(s: &InequalitySystem) -> Json {
    Json::obj(vec![
        ("lhs", Json::Arr(s.lhs.iter().map(|r| Json::Arr(r.iter().map(|&x| Json::Num(x)).collect())).collect())),
        ("rel", Json::Arr(s.rel.iter().map(|r| Json::Str(r.symbol().into())).collect())),
        ("witness", Json::Arr(s.witness.iter().map(|&x| Json::Num(x)).collect())),
    ])
}

pub fn event_to_json(e: &BifurcationEvent, feasibility: Option<&InequalitySystem>) -> Json {
    let mut kv = vec![
        ("broken", Json::pairs(&e.broken)),
        ("formed", Json::pairs(&e.formed)),
        ("rank", Json::uint(e.rank)),
        ("sign", Json::Str(e.sign.symbol().into())),
        ("landing", Json::obj(vec![("j1", Json::uint(e.land_first.1)), ("kn", Json::uint(e.land_last.1))])),
        ("zones", Json::Arr(e.zones.iter().map(|&z| Json::uint(z)).collect())),
        ("heights", Json::Arr(e.heights.iter().map(|&y| Json::Num(y)).collect())),
    ];
    if let Some(f) = feasibility {
        kv.push(("feasibility", system_to_json(f)));
    }
    Json::obj(kv)
}

/// Reads the fields that identify an event; the caller matches it against an enumeration.
pub fn event_from_json(v: &Value) -> Result<BifurcationEvent> {
    let pairs = |key: &str| -> Result<Vec<(usize, usize)>> {
        field(v, key)?.as_array().ok_or_else(|| err(format!("{key}: expected an array")))?.iter().map(|p| as_pair(p, key)).collect()
    };
    let broken = pairs("broken")?;
    let formed = pairs("formed")?;
    if broken.is_empty() {
        return Err(err("event breaks nothing"));
    }
    let sign = match field(v, "sign")?.as_str() {
        Some("+") => Sign::Plus,
        Some("-") => Sign::Minus,
        _ => return Err(err("sign must be \"+\" or \"-\"")),
    };
    let land = field(v, "landing")?;
    let rank = as_usize(field(v, "rank")?, "rank")?;
    let heights = match v.get("heights").and_then(|h| h.as_array()) {
        Some(a) => a.iter().map(|x| as_f64(x, "height")).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let zones = match v.get("zones").and_then(|h| h.as_array()) {
        Some(a) => a.iter().map(|x| as_usize(x, "zone")).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(BifurcationEvent {
        land_first: (broken[0].1, as_usize(field(land, "j1")?, "landing.j1")?),
        land_last: (broken.last().unwrap().0, as_usize(field(land, "kn")?, "landing.kn")?),
        broken,
        formed,
        rank,
        sign,
        zones,
        heights,
    })
}

pub fn report_to_json(e: &BifurcationEvent, r: &VerifyReport) -> Json {
    Json::obj(vec![
        ("event", event_to_json(e, None)),
        ("epsilon", Json::Num(r.epsilon)),
        ("match", Json::Bool(r.matched)),
        ("mismatches", Json::Arr(r.mismatches.iter().map(|s| Json::Str(s.clone())).collect())),
        ("perturbed_polynomial", polynomial_to_json(&r.perturbed)),
    ])
}
