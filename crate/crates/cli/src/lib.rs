//! The `tensegrity` command-line tool.
//!
//! Each subcommand loads its input, runs one pipeline from the core or
//! symbolic crate, prints a JSON report and optionally writes it, plus an
//! SVG plot, into an output directory. Exit status is 0 on success, 1 on a
//! domain error (bad input, failed check) and 2 on a usage error.

pub mod render;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use tensegrity_core::continuation::{
    deform_framework, epsilon_rigidity_check, solve_total_degree_report, DeformDirection, DeformOptions,
    EpsilonOptions, MultiPoly, PolySystem, SolveOptions, TrackStatus, C64,
};
use tensegrity_core::prestress::{prestress_certificate, PrestressOptions};
use tensegrity_core::rigidity::{pin_moving_frame, rigidity_report, ReportOptions};
use tensegrity_core::{load_framework, Framework};
use tensegrity_symbolic::catalog::{
    adjacent_minors, adjacent_primes, displayed_slingshot_minor, slingshot, slingshot_primes, two_row_ring,
};
use tensegrity_symbolic::{parse_polys, symbolic_minors, verify_containment, MonomialOrder, VerificationRecord};
use thiserror::Error;

use crate::render::{render_svg, RenderSpec, Scene};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "tensegrity", version, about = "Rigidity analysis of bar and tensegrity frameworks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for numerical rank decisions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Directory for the JSON report and SVG plot.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot (requires --out).
    #[arg(long, global = true, requires = "out")]
    pub svg: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Flex,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdealSet {
    All,
    Slingshot,
    Adjacent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Lex,
    Degrevlex,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ranks, coranks and the infinitesimal rigidity verdict.
    Analyze { input: PathBuf },
    /// Rigid-motion and flex bases of the Jacobian nullspace.
    Flexes { input: PathBuf },
    /// Search for a prestress stability certificate.
    Prestress { input: PathBuf },
    /// Solve a square polynomial system, one equation per line.
    Solve {
        input: PathBuf,
        #[arg(long, default_value_t = tensegrity_core::continuation::total_degree::DEFAULT_PATH_BUDGET)]
        budget: u64,
    },
    /// Track a pinned framework along a family of hyperplanes.
    Deform {
        input: PathBuf,
        #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Direction::Flex)]
        direction: Direction,
    },
    /// Look for real configurations at distance epsilon from the pinned embedding.
    Epscheck {
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = tensegrity_core::continuation::total_degree::DEFAULT_PATH_BUDGET)]
        budget: u64,
    },
    /// Check the bundled ideal containments.
    VerifyIdeals {
        #[arg(value_enum, default_value_t = IdealSet::All)]
        which: IdealSet,
        #[arg(long, value_enum, default_value_t = Order::Degrevlex)]
        order: Order,
    },
    /// Draw a framework, optionally with its nullspace vectors.
    Plot {
        input: PathBuf,
        #[arg(long)]
        nullspace: bool,
        #[arg(long, default_value_t = 1.0)]
        arrow_scale: f64,
    },
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns what it prints on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let (name, report, svg, ok) = match &cli.command {
        Command::Analyze { input } => {
            let fw = read_framework(input)?;
            let rep = rigidity_report(&fw.system, &fw.embedding, &report_options(cli)).map_err(domain)?;
            ("analyze", to_value(&rep)?, None, true)
        }
        Command::Flexes { input } => {
            let fw = read_framework(input)?;
            let rep = rigidity_report(&fw.system, &fw.embedding, &report_options(cli)).map_err(domain)?;
            let value = json!({
                "corank_at_p": rep.corank_at_p,
                "rigid_motion_dim": rep.rigid_motion_dim,
                "flex_count": rep.flex_count(),
                "rigid_motions": rep.rigid_motions,
                "flexes": rep.flexes,
            });
            let svg = cli.svg.then(|| {
                let vectors = rep.rigid_motions.iter().chain(&rep.flexes).cloned().collect();
                framework_svg(&fw, vectors, 1.0)
            });
            ("flexes", value, svg.transpose()?, true)
        }
        Command::Prestress { input } => {
            let fw = read_framework(input)?;
            let opts = PrestressOptions { seed: cli.seed, tol_rel: cli.tol, ..Default::default() };
            let out = prestress_certificate(&fw.system, &fw.embedding, &opts).map_err(domain)?;
            ("prestress", to_value(&out)?, None, true)
        }
        Command::Solve { input, budget } => {
            let (value, svg) = solve(cli, input, *budget)?;
            ("solve", value, svg, true)
        }
        Command::Deform { input, epsilon, steps, direction } => {
            let fw = pinned(read_framework(input)?)?;
            let dir = match direction {
                Direction::Flex => DeformDirection::Flex,
                Direction::Random => DeformDirection::Random,
            };
            let opts = DeformOptions { seed: cli.seed, ..Default::default() };
            let d = deform_framework(&fw.system, &fw.embedding, &dir, *epsilon, *steps, &opts).map_err(domain)?;
            let svg = cli.svg.then(|| {
                let p = fw.embedding.as_slice();
                let moves = d
                    .steps
                    .iter()
                    .map(|s| s.configuration.concat().iter().zip(p).map(|(a, b)| a - b).collect())
                    .collect();
                framework_svg(&fw, moves, 1.0)
            });
            ("deform", to_value(&d)?, svg.transpose()?, true)
        }
        Command::Epscheck { input, epsilon, budget } => {
            let fw = pinned(read_framework(input)?)?;
            let mut opts = EpsilonOptions { seed: cli.seed, path_budget: *budget, ..Default::default() };
            opts.solve.seed = cli.seed;
            let rep = epsilon_rigidity_check(&fw.system, &fw.embedding, *epsilon, &opts).map_err(domain)?;
            ("epscheck", to_value(&rep)?, None, true)
        }
        Command::VerifyIdeals { which, order } => {
            let order = match order {
                Order::Lex => MonomialOrder::Lex,
                Order::Degrevlex => MonomialOrder::DegRevLex,
            };
            let value = verify_ideals(*which, order)?;
            let ok = value["pass"].as_bool().unwrap_or(false);
            ("verify-ideals", value, None, ok)
        }
        Command::Plot { input, nullspace, arrow_scale } => {
            let fw = read_framework(input)?;
            let vectors = if *nullspace {
                let rep = rigidity_report(&fw.system, &fw.embedding, &report_options(cli)).map_err(domain)?;
                rep.rigid_motions.iter().chain(&rep.flexes).cloned().collect()
            } else {
                Vec::new()
            };
            let svg = framework_svg(&fw, vectors, *arrow_scale)?;
            let value = json!({ "nodes": fw.graph.node_count(), "members": fw.graph.member_count() });
            if cli.out.is_none() {
                return Ok(svg);
            }
            ("plot", value, Some(svg), true)
        }
    };
    let text = serde_json::to_string_pretty(&report).map_err(domain)? + "\n";
    if let Some(dir) = &cli.out {
        write_file(dir, &format!("{name}.json"), &text)?;
        if let Some(svg) = &svg {
            write_file(dir, &format!("{name}.svg"), svg)?;
        }
    }
    if ok {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::Domain(format!("{name}: check failed")))
    }
}

fn report_options(cli: &Cli) -> ReportOptions {
    ReportOptions { seed: cli.seed, tol_rel: cli.tol, ..Default::default() }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(domain)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))
}

fn read_framework(path: &Path) -> Result<Framework, CliError> {
    load_framework(&read_input(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn pinned(fw: Framework) -> Result<Framework, CliError> {
    let p = pin_moving_frame(&fw.embedding).map_err(domain)?;
    fw.with_embedding(p).map_err(domain)
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Domain(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

fn framework_svg(fw: &Framework, displacements: Vec<Vec<f64>>, arrow_scale: f64) -> Result<String, CliError> {
    let scene = Scene { framework: Some((&fw.graph, &fw.embedding)), displacements, trajectories: Vec::new() };
    render_svg(&scene, &RenderSpec { arrow_scale, ..Default::default() }).map_err(domain)
}

#[derive(Serialize)]
struct PathOut {
    status: TrackStatus,
    endpoint: Vec<[f64; 2]>,
    residual: f64,
    steps: usize,
}

fn solve(cli: &Cli, input: &Path, budget: u64) -> Result<(Value, Option<String>), CliError> {
    let text = read_input(input)?;
    let lines: Vec<&str> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let (ring, polys) = parse_polys(&lines).map_err(domain)?;
    let n = ring.nvars();
    let mut system = Vec::with_capacity(polys.len());
    for f in &polys {
        let terms = f
            .terms()
            .map(|(m, c)| {
                let v = c.to_f64().filter(|v| v.is_finite()).ok_or_else(|| domain(format!("coefficient {c} overflows")))?;
                Ok((m.clone(), C64::new(v, 0.0)))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        system.push(MultiPoly::from_terms(n, terms));
    }
    let sys = PolySystem::new(system).map_err(domain)?;
    let mut opts = SolveOptions { seed: cli.seed, path_budget: budget, ..Default::default() };
    opts.tracker.record_trajectory = cli.svg;
    let rep = solve_total_degree_report(&sys, &opts).map_err(domain)?;
    let paths: Vec<PathOut> = rep
        .paths
        .iter()
        .map(|p| PathOut {
            status: p.status,
            endpoint: p.endpoint.iter().map(|z| [z.re, z.im]).collect(),
            residual: p.residual,
            steps: p.steps,
        })
        .collect();
    let value = json!({
        "variables": ring.vars(),
        "equations": polys.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "seed": cli.seed,
        "path_count": rep.path_count as u64,
        "gamma": [rep.gamma.re, rep.gamma.im],
        "converged": rep.count(TrackStatus::Converged),
        "paths": paths,
    });
    let svg = if cli.svg {
        let trajectories = rep
            .paths
            .iter()
            .filter(|p| p.is_converged())
            .map(|p| {
                let mut pts: Vec<[f64; 2]> =
                    p.trajectory.iter().flatten().map(|q| [q.x[0].re, q.x[0].im]).collect();
                pts.push([p.endpoint[0].re, p.endpoint[0].im]);
                pts
            })
            .collect();
        let scene = Scene { trajectories, ..Default::default() };
        Some(render_svg(&scene, &RenderSpec::default()).map_err(domain)?)
    } else {
        None
    };
    Ok((value, svg))
}

fn verify_ideals(which: IdealSet, order: MonomialOrder) -> Result<Value, CliError> {
    let mut out = serde_json::Map::new();
    let mut pass = true;
    if matches!(which, IdealSet::All | IdealSet::Slingshot) {
        let s = slingshot().map_err(domain)?;
        let minors = symbolic_minors(&s.matrix, s.matrix.shape().0).map_err(domain)?;
        let shown = displayed_slingshot_minor(&s.ring).map_err(domain)?;
        let neg = -&shown;
        let found = minors.nonzero().any(|m| m.value == shown || m.value == neg);
        let ideal = s.ideal().map_err(domain)?;
        let mut records = Vec::new();
        for (k, p) in slingshot_primes(&s.ring).map_err(domain)?.iter().enumerate() {
            let c = verify_containment(&ideal, p, order).map_err(domain)?;
            records.push(VerificationRecord::new("slingshot", k + 1, ideal.len(), &c));
        }
        pass &= found && records.iter().all(|r| r.pass);
        out.insert(
            "slingshot".into(),
            json!({
                "variables": s.ring.vars(),
                "minor_size": minors.size,
                "minors": minors.len(),
                "nonzero_minors": minors.nonzero_count(),
                "distinct_nonzero_minors": minors.distinct_nonzero_count(),
                "displayed_minor_found": found,
                "generators": ideal.len(),
                "primes": records,
            }),
        );
    }
    if matches!(which, IdealSet::All | IdealSet::Adjacent) {
        let ring = two_row_ring(5).map_err(domain)?;
        let adj = adjacent_minors(&ring, 5).map_err(domain)?;
        let mut records = Vec::new();
        for (k, p) in adjacent_primes(&ring).map_err(domain)?.iter().enumerate() {
            let c = verify_containment(&adj, p, order).map_err(domain)?;
            records.push(VerificationRecord::new("adjacent_2x5", k + 1, adj.len(), &c));
        }
        pass &= records.iter().all(|r| r.pass);
        out.insert(
            "adjacent_2x5".into(),
            json!({
                "generators": adj.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "primes": records,
            }),
        );
    }
    out.insert("order".into(), to_value(&order)?);
    out.insert("pass".into(), Value::Bool(pass));
    Ok(Value::Object(out))
}
