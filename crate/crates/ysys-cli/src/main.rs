use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use serde_json::{json, Value};
use ysys::geometry::build;
use ysys::render::render_at;
use ysys::schedule::{prepare, run_y, verify_schedule, StepChecks};
use ysys::seeds::{initial_tropical, Float64Positive, Semifield};
use ysys::verify::{self, Mode, RunConfig};
use ysys::{build_table, ContinuedFractionTable, Error, InputSequence, Report, SystemKind};

#[derive(Parser)]
#[command(name = "ysys", version, about = "Polygon realizations of RSG and SG Y-systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued-fraction table.
    Cf {
        #[command(flatten)]
        input: Input,
        /// Write JSON to PATH, or to stdout when PATH is omitted.
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        json: Option<Option<PathBuf>>,
    },
    /// Initial labeled triangulation.
    Triangulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "rsg")]
        system: Kind,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        json: Option<Option<PathBuf>>,
    },
    /// Run the mutation schedule and check its laws.
    Run {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        /// Value arithmetic of the dumped trajectory.
        #[arg(long, value_enum, default_value = "rational")]
        semifield: SemifieldArg,
        /// Write every Y-variable of the window as JSON.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Verify identities.
    Verify {
        #[arg(value_enum)]
        what: What,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Number of random initializations.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Draw the triangulation at time `u`.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "rsg")]
        system: Kind,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        u: i64,
        #[arg(long, value_name = "PATH")]
        svg: PathBuf,
    },
}

#[derive(Args)]
struct Input {
    /// Comma-separated sequence n_1,...,n_F.
    #[arg(long, value_name = "N1,N2,...")]
    n: String,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "rsg")]
    system: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time window LO..HI; defaults to [-2 max p_a, 4r + 2 max p_a].
    #[arg(long, value_name = "LO..HI", allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rsg,
    Sg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemifieldArg {
    Rational,
    Float,
    Tropical,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum What {
    Schedule,
    Ysystem,
    Tsystem,
    Periodicity,
    Dilog,
    Crossratio,
    All,
}

impl From<Kind> for SystemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Rsg => SystemKind::Rsg,
            Kind::Sg => SystemKind::Sg,
        }
    }
}

enum Failure {
    Rejected(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RejectedInput(_) => Failure::Rejected(e.to_string()),
            e => Failure::Check(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn table(input: &Input) -> std::result::Result<ContinuedFractionTable, Failure> {
    let seq = InputSequence::parse(&input.n)?;
    Ok(build_table(&seq))
}

fn window(run: &RunArgs) -> std::result::Result<Option<(i64, i64)>, Failure> {
    let Some(w) = &run.window else {
        return Ok(None);
    };
    let bad = || Failure::Rejected(format!("window must be LO..HI, got {w}"));
    let (lo, hi) = w.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > 0 || hi <= 0 {
        return Err(Failure::Rejected(format!("window {lo}..{hi} must contain 0")));
    }
    Ok(Some((lo, hi)))
}

fn write_json(path: Option<&Path>, v: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(rep: &Report) -> Outcome {
    for c in &rep.checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    first_failure(rep)
}

fn first_failure(rep: &Report) -> Outcome {
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Check(format!("{}: {}", c.name, c.detail))),
    }
}

fn cmd_cf(input: &Input, json: &Option<Option<PathBuf>>) -> Outcome {
    let t = table(input)?;
    let rep = t.to_report();
    match json {
        Some(path) => write_json(path.as_deref(), &serde_json::to_value(&rep).expect("serializable"))?,
        None => {
            let f = t.f();
            println!("n = {:?}", t.sequence());
            println!("p = {:?}", (1..=f).map(|a| t.p(1, a).to_string()).collect::<Vec<_>>());
            println!("q = {:?}", (1..=f).map(|a| t.q(1, a).to_string()).collect::<Vec<_>>());
            println!("r = {:?}", (1..=f + 2).map(|k| t.r(k).to_string()).collect::<Vec<_>>());
            println!("A_F = {}", rep.a_f);
        }
    }
    let ids = t.verify_identities();
    if matches!(json, Some(None)) {
        return first_failure(&ids);
    }
    finish(&ids)
}

fn cmd_triangulate(input: &Input, kind: Kind, svg: &Option<PathBuf>, json: &Option<Option<PathBuf>>) -> Outcome {
    let t = table(input)?;
    let g = build(&t, kind.into())?;
    info!("built {} arcs on a {}-gon", g.len(), g.r);
    if let Some(path) = svg {
        std::fs::write(path, render_at(&t, kind.into(), 0)?)?;
    }
    if let Some(path) = json {
        write_json(path.as_deref(), &serde_json::to_value(&g).expect("serializable"))?;
    }
    g.validate()?;
    let mut rep = Report::new();
    rep.push("triangulation is valid", true, format!("{} arcs on a {}-gon", g.len(), g.r));
    if matches!(json, Some(None)) {
        return first_failure(&rep);
    }
    finish(&rep)
}

fn cmd_run(input: &Input, run: &RunArgs, semifield: SemifieldArg, dump: &Option<PathBuf>, json: &Option<PathBuf>) -> Outcome {
    let t = table(input)?;
    let kind: SystemKind = run.system.into();
    let (lo, hi) = window(run)?.unwrap_or_else(|| ysys::schedule::default_window(&t));
    let geo = prepare(&t, kind, lo, hi, StepChecks::default())?;
    info!("trajectory on [{lo}, {hi}] with {} labels", geo.labels.len());
    let r = t.ri(1);
    let mut rep = Report::new();
    rep.push("reflection and rotation laws", true, format!("u in [{lo}, {hi}]"));
    rep.extend(verify_schedule(&geo, &t, 0, (2 * r).min(hi)));
    if let Some(path) = dump {
        let init = verify::random_rationals(geo.labels.len(), run.seed);
        let values: BTreeMap<String, Value> = match semifield {
            SemifieldArg::Rational => dump_values(&geo, run_y(&geo, init)?, |v| json!(v.0.to_string())),
            SemifieldArg::Float => {
                let init = init.iter().map(|x| Float64Positive(x.to_f64())).collect();
                dump_values(&geo, run_y(&geo, init)?, |v| json!(v.0))
            }
            SemifieldArg::Tropical => dump_values(&geo, run_y(&geo, initial_tropical(geo.b0.clone()).y)?, |v| json!(v.0)),
        };
        debug!("dumping {} values", values.len());
        let out = json!({ "system": kind, "n": t.sequence(), "window": [lo, hi], "seed": run.seed, "values": values });
        write_json(Some(path), &out)?;
    }
    if let Some(path) = json {
        write_json(Some(path), &json!({ "system": kind, "n": t.sequence(), "checks": rep.checks }))?;
    }
    finish(&rep)
}

fn dump_values<S: Semifield>(
    geo: &ysys::schedule::GeometryTrajectory,
    vals: ysys::schedule::ValueTrajectory<S>,
    f: impl Fn(&S) -> Value,
) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    for (a, m, u) in geo.occurrences_in(geo.u_lo, geo.u_hi) {
        if let Some(v) = vals.at(geo.occurs(a, m, u).unwrap(), u) {
            out.insert(format!("Y({a},{m})({u:+06})"), f(v));
        }
    }
    out
}

fn cmd_verify(what: What, input: &Input, run: &RunArgs, mode: ModeArg, seeds: u64, json: &Option<PathBuf>) -> Outcome {
    let t = table(input)?;
    let kind: SystemKind = run.system.into();
    let cfg = RunConfig {
        kind,
        mode: match mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        },
        seed: run.seed,
        seeds,
        window: window(run)?,
    };
    let mut rep = Report::new();
    let mut extra = serde_json::Map::new();
    let want = |w: What| what == w || what == What::All;
    if want(What::Schedule) {
        rep.extend(verify::schedule(&t, &cfg)?);
    }
    if want(What::Ysystem) {
        rep.extend(verify::ysystem(&t, &cfg)?);
    }
    if want(What::Tsystem) {
        rep.extend(verify::tsystem(&t, &cfg)?);
    }
    if want(What::Periodicity) {
        rep.extend(verify::periodicity(&t, &cfg)?);
    }
    if want(What::Dilog) {
        let (r, reports) = verify::dilog(&t, &cfg)?;
        rep.extend(r);
        extra.insert("dilog".into(), serde_json::to_value(&reports).expect("serializable"));
    }
    if what == What::Crossratio || (what == What::All && kind == SystemKind::Rsg) {
        rep.extend(verify::crossratio(&t, &cfg)?);
    }
    if let Some(path) = json {
        let mut out = serde_json::Map::new();
        out.insert("system".into(), json!(kind));
        out.insert("n".into(), json!(t.sequence()));
        out.insert("mode".into(), json!(cfg.mode));
        out.insert("seed".into(), json!(cfg.seed));
        out.insert("passed".into(), json!(rep.all_passed()));
        out.insert("checks".into(), json!(rep.checks));
        out.extend(extra);
        write_json(Some(path), &Value::Object(out))?;
    }
    finish(&rep)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("YSYS_LOG")).init();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Cf { input, json } => cmd_cf(input, json),
        Cmd::Triangulate { input, system, svg, json } => cmd_triangulate(input, *system, svg, json),
        Cmd::Run { input, run, semifield, dump, json } => cmd_run(input, run, *semifield, dump, json),
        Cmd::Verify { what, input, run, mode, seeds, json } => cmd_verify(*what, input, run, *mode, *seeds, json),
        Cmd::Render { input, system, u, svg } => {
            (|| -> Outcome {
                let t = table(input)?;
                std::fs::write(svg, render_at(&t, (*system).into(), *u)?)?;
                Ok(())
            })()
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
