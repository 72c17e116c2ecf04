mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polyflow::combin::{apply_event, decompose_rank_k, enumerate_rank1, event_feasibility, BifurcationEvent};
use polyflow::disk::{from_trace, DiskModel};
use polyflow::invariants::invariants;
use polyflow::io::{self, Json, Value};
use polyflow::realize::{verify_event_on, EPS_LADDER};
use polyflow::tracer::{build_graph, SeparatrixGraph, TraceConfig};
use polyflow::Error;

#[derive(Parser)]
#[command(name = "polyflow", version, about = "Separatrix structure and bifurcations of polynomial vector fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace a polynomial and write its disk model and invariants.
    Analyze {
        input: PathBuf,
        /// Directory receiving diskmodel.json and invariants.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the rank-1 bifurcations of a disk model with feasibility witnesses.
    Enumerate {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scale of the witnesses.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Realize one enumerated event numerically and compare the traced result.
    Verify {
        input: PathBuf,
        index: usize,
        /// Take the event from this list instead of enumerating.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Single perturbation size instead of the default ladder.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Render a disk model or a phase portrait as SVG.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Disk)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        density: u32,
        #[arg(long, default_value_t = 600)]
        size: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Find a sequence of rank-1 events turning one disk model into another.
    DecomposeRank {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Disk,
    Phase,
}

struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) => 2,
            Error::RootSolve(_) | Error::Trace(_) | Error::Invariant(_) | Error::Realize(_) => 3,
            Error::Decompose(_) => 4,
            Error::Internal(_) => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn input(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into() }
}

type Res<T> = Result<T, Fail>;

fn read_json(path: &Path) -> Res<Value> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok(io::parse(&text)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail { code: 1, msg: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The analyze output nests the model under "model"; bare models are accepted too.
fn model_value(v: &Value) -> &Value {
    v.get("model").unwrap_or(v)
}

fn trace_polynomial(v: &Value) -> Res<(SeparatrixGraph, DiskModel)> {
    let p = io::polynomial_from_json(v)?;
    let sg = build_graph(&p, &TraceConfig::default())?;
    let m = from_trace(&sg)?;
    Ok((sg, m))
}

fn events_json(events: &[BifurcationEvent], eps: f64) -> Res<Json> {
    let list = events
        .iter()
        .map(|e| Ok(io::event_to_json(e, Some(&event_feasibility(e, eps)?))))
        .collect::<Res<Vec<_>>>()?;
    Ok(Json::obj(vec![("events", Json::Arr(list))]))
}

fn run(cli: Cli) -> Res<u8> {
    match cli.cmd {
        Cmd::Analyze { input: path, out } => {
            let (sg, m) = trace_polynomial(&read_json(&path)?)?;
            let (inv, _) = invariants(&sg, &m)?;
            let model = io::disk_model_to_json(&m, Some(&sg));
            let inv = io::invariants_to_json(&inv);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Fail { code: 1, msg: format!("{}: {e}", dir.display()) })?;
                    emit(&Some(dir.join("diskmodel.json")), &model.render())?;
                    emit(&Some(dir.join("invariants.json")), &inv.render())?;
                }
                None => emit(&None, &Json::obj(vec![("model", model), ("invariants", inv)]).render())?,
            }
        }
        Cmd::Enumerate { input: path, out, eps } => {
            let v = read_json(&path)?;
            let m = io::disk_model_from_json(model_value(&v))?;
            let events = enumerate_rank1(&m);
            emit(&out, &events_json(&events, eps)?.render())?;
        }
        Cmd::Verify { input: path, index, events, out, eps } => {
            let (sg, m) = trace_polynomial(&read_json(&path)?)?;
            let (inv, frozen) = invariants(&sg, &m)?;
            let all = enumerate_rank1(&m);
            let event = match events {
                None => all.get(index).cloned().ok_or_else(|| input(format!("event index {index} out of range (0..{})", all.len())))?,
                Some(file) => {
                    let v = read_json(&file)?;
                    let list = v.get("events").unwrap_or(&v).as_array().ok_or_else(|| input("events: expected an array"))?;
                    let raw = list.get(index).ok_or_else(|| input(format!("event index {index} out of range (0..{})", list.len())))?;
                    let e = io::event_from_json(raw)?;
                    all.iter()
                        .find(|x| x.key() == e.key())
                        .cloned()
                        .ok_or_else(|| input("event is not a rank-1 bifurcation of this polynomial"))?
                }
            };
            let ladder: Vec<f64> = match eps {
                Some(e) if e > 0.0 => vec![e],
                Some(e) => return Err(input(format!("eps must be positive, got {e}"))),
                None => EPS_LADDER.to_vec(),
            };
            let report = verify_event_on(&sg, &m, &inv, &frozen, &event, &TraceConfig::default(), &ladder)?;
            emit(&out, &io::report_to_json(&event, &report).render())?;
            if !report.matched {
                for s in &report.mismatches {
                    eprintln!("mismatch: {s}");
                }
                return Ok(5);
            }
        }
        Cmd::Plot { input: path, mode, out, density, size, seed } => {
            let spec = svg::RenderSpec { width: size, height: size, density, seed };
            spec.check().map_err(input)?;
            let v = read_json(&path)?;
            let v = model_value(&v);
            let text = if v.get("coefficients").is_some() {
                let (sg, m) = trace_polynomial(v)?;
                match mode {
                    Mode::Disk => svg::disk(&m, &spec),
                    Mode::Phase => svg::phase(&sg, &spec),
                }
            } else {
                if matches!(mode, Mode::Phase) {
                    return Err(input("phase mode needs a polynomial"));
                }
                let m = io::disk_model_from_json(v).map_err(|e| input(e.to_string()))?;
                svg::disk(&m, &spec)
            };
            emit(&out, &text)?;
        }
        Cmd::DecomposeRank { from, to, out, max_states } => {
            let m0 = io::disk_model_from_json(model_value(&read_json(&from)?))?;
            let target = io::labelled_graph_from_json(model_value(&read_json(&to)?))?;
            match decompose_rank_k(&m0, &target, max_states)? {
                Some(seq) => {
                    let mut cur = m0;
                    for e in &seq {
                        cur = apply_event(&cur, e)?;
                    }
                    if cur.graph.homoclinics != target.homoclinics || cur.graph.landing != target.landing {
                        return Err(Error::Internal("sequence does not reach the target".into()).into());
                    }
                    emit(&out, &events_json(&seq, 1e-3)?.render())?;
                }
                None => return Err(Fail { code: 4, msg: "no sequence of rank-1 events reaches the target within the search budget".into() }),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("polyflow: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
