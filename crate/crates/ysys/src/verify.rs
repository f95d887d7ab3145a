//! Verification drivers shared by the command line and the acceptance suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::schedule::{default_window, prepare, run_x, run_y, GeometryTrajectory, StepChecks};
use crate::seeds::{ExactPositiveRational, Float64Positive, Semifield, XField};
use crate::solutions::{cross_ratio_check, dilog_identity_check, random_z, DilogReport};
use crate::tsystems::{generate_t_relations, verify_t, verify_t_periodicity};
use crate::ysystems::{generate_relations, verify_half_period, verify_periodicity, verify_relations};

/// Arithmetic used for a whole trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "rational" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(Error::RejectedInput(format!("unknown mode {s}"))),
        }
    }
}

/// What to run and where.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: SystemKind,
    pub mode: Mode,
    pub seed: u64,
    pub seeds: u64,
    pub window: Option<(i64, i64)>,
}

impl RunConfig {
    pub fn new(kind: SystemKind) -> Self {
        Self { kind, mode: Mode::Exact, seed: 0, seeds: 3, window: None }
    }
}

fn geometry(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<GeometryTrajectory> {
    let (lo, hi) = cfg.window.unwrap_or_else(|| default_window(table));
    if lo > 0 || hi < 0 {
        return Err(Error::RejectedInput(format!("window {lo}..{hi} must contain 0")));
    }
    prepare(table, cfg.kind, lo, hi, StepChecks::default())
}

fn rng(cfg: &RunConfig, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i))
}

fn exact_init(n: usize, rng: &mut ChaCha8Rng) -> Vec<ExactPositiveRational> {
    (0..n).map(|_| ExactPositiveRational::random(rng)).collect()
}

/// Initial values `a/b` with `1 <= a, b <= 50` drawn from `seed`.
pub fn random_rationals(n: usize, seed: u64) -> Vec<ExactPositiveRational> {
    exact_init(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn float_init(n: usize, rng: &mut ChaCha8Rng) -> Vec<Float64Positive> {
    exact_init(n, rng).iter().map(|x| Float64Positive(x.to_f64())).collect()
}

fn y_checks<S: Semifield>(geo: &GeometryTrajectory, table: &ContinuedFractionTable, cfg: &RunConfig, y0: Vec<S>, tag: &str, rep: &mut Report) -> Result<()> {
    let vals = run_y(geo, y0)?;
    let rels = generate_relations(table, cfg.kind)?;
    let out = verify_relations(geo, &vals, &rels);
    let detail = out.failures.first().cloned().unwrap_or_else(|| format!("{} instances", out.checked));
    rep.push(format!("{tag} Y-system relations"), out.passed(), detail);
    Ok(())
}

/// Y-system relations on `cfg.seeds` random initial values.
pub fn ysystem(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<Report> {
    let geo = geometry(table, cfg)?;
    let mut rep = Report::new();
    for i in 0..cfg.seeds {
        let mut g = rng(cfg, i);
        let n = geo.labels.len();
        let tag = format!("seed {}", cfg.seed.wrapping_add(i));
        match cfg.mode {
            Mode::Exact => y_checks(&geo, table, cfg, exact_init(n, &mut g), &tag, &mut rep)?,
            Mode::Float => y_checks(&geo, table, cfg, float_init(n, &mut g), &tag, &mut rep)?,
        }
    }
    Ok(rep)
}

fn per_checks<S: Semifield>(geo: &GeometryTrajectory, table: &ContinuedFractionTable, cfg: &RunConfig, y0: Vec<S>, tag: &str, rep: &mut Report) -> Result<()> {
    let vals = run_y(geo, y0)?;
    let mut sub = verify_periodicity(geo, &vals, table, cfg.kind);
    if cfg.kind == SystemKind::Rsg && table.f() == 1 {
        sub.extend(verify_half_period(geo, &vals, table));
    }
    for c in sub.checks {
        rep.push(format!("{tag} {}", c.name), c.passed, c.detail);
    }
    Ok(())
}

/// Periodicity, minimality, and the puncture-label swap or half-period identity.
pub fn periodicity(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<Report> {
    let geo = geometry(table, cfg)?;
    let mut rep = Report::new();
    for i in 0..cfg.seeds {
        let mut g = rng(cfg, i);
        let n = geo.labels.len();
        let tag = format!("seed {}", cfg.seed.wrapping_add(i));
        match cfg.mode {
            Mode::Exact => per_checks(&geo, table, cfg, exact_init(n, &mut g), &tag, &mut rep)?,
            Mode::Float => per_checks(&geo, table, cfg, float_init(n, &mut g), &tag, &mut rep)?,
        }
    }
    Ok(rep)
}

fn t_checks<F: XField>(geo: &GeometryTrajectory, table: &ContinuedFractionTable, cfg: &RunConfig, x0: Vec<F>, tag: &str, rep: &mut Report) -> Result<()> {
    let vals = run_x(geo, x0)?;
    let rels = generate_t_relations(table, cfg.kind)?;
    let out = verify_t(geo, &vals, table, &rels);
    let detail = out.failures.first().cloned().unwrap_or_else(|| format!("{} instances", out.checked));
    rep.push(format!("{tag} T-system relations"), out.passed(), detail);
    for c in verify_t_periodicity(geo, &vals, table, cfg.kind).checks {
        rep.push(format!("{tag} {}", c.name), c.passed, c.detail);
    }
    Ok(())
}

/// T-system relations and T-periodicity.
pub fn tsystem(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<Report> {
    let geo = geometry(table, cfg)?;
    let mut rep = Report::new();
    for i in 0..cfg.seeds {
        let mut g = rng(cfg, i);
        let n = geo.labels.len();
        let tag = format!("seed {}", cfg.seed.wrapping_add(i));
        match cfg.mode {
            Mode::Exact => t_checks(&geo, table, cfg, exact_init(n, &mut g), &tag, &mut rep)?,
            Mode::Float => t_checks(&geo, table, cfg, float_init(n, &mut g), &tag, &mut rep)?,
        }
    }
    Ok(rep)
}

/// Dilogarithm sums on float trajectories and tropical counts, one report per seed.
pub fn dilog(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<(Report, Vec<DilogReport>)> {
    let geo = geometry(table, cfg)?;
    let mut rep = Report::new();
    let mut all = Vec::new();
    for i in 0..cfg.seeds {
        let mut g = rng(cfg, i);
        let vals = run_y(&geo, float_init(geo.labels.len(), &mut g))?;
        let d = dilog_identity_check(&geo, &vals, table, cfg.kind)?;
        for c in &d.checks.checks {
            rep.push(format!("seed {} {}", cfg.seed.wrapping_add(i), c.name), c.passed, c.detail.clone());
        }
        all.push(d);
    }
    Ok((rep, all))
}

/// Cross-ratio solution for RSG with `cfg.seeds` random vertex coordinates.
pub fn crossratio(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<Report> {
    let cfg = RunConfig { kind: SystemKind::Rsg, ..cfg.clone() };
    let geo = geometry(table, &cfg)?;
    let mut rep = Report::new();
    for i in 0..cfg.seeds {
        let mut g = rng(&cfg, i);
        let z = random_z(geo.gamma(0).r, &mut g);
        for c in cross_ratio_check(&geo, table, &z)?.checks {
            rep.push(format!("seed {} {}", cfg.seed.wrapping_add(i), c.name), c.passed, c.detail);
        }
    }
    Ok(rep)
}

/// Schedule laws over one period; the step laws are enforced while building the trajectory.
pub fn schedule(table: &ContinuedFractionTable, cfg: &RunConfig) -> Result<Report> {
    let (lo, hi) = cfg.window.unwrap_or_else(|| default_window(table));
    let r = table.ri(1);
    let checks = StepChecks { matrix: r <= 200, ..StepChecks::default() };
    let mut rep = Report::new();
    match prepare(table, cfg.kind, lo, hi, checks) {
        Ok(geo) => {
            rep.push("reflection and rotation laws", true, format!("u in [{lo}, {hi}]"));
            rep.extend(crate::schedule::verify_schedule(&geo, table, 0, (2 * r).min(hi)));
        }
        Err(e @ Error::RejectedInput(_)) => return Err(e),
        Err(e) => rep.push("reflection and rotation laws", false, e.to_string()),
    }
    Ok(rep)
}
