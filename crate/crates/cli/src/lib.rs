//! `supra-fixpoint`: verification, solving and certification from the
//! command line, with versioned JSON reports.
//!
//! Exit codes: 0 success, 1 violations / non-convergence / numeric failure,
//! 2 usage or configuration error.

pub mod parse;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use supra_core::constructions::{from_descriptor, Construction, ConstructionKind, ConstructionParams, Descriptor};
use supra_core::discrete::{
    ball, discontinuity_check, lemma_sweep, non_open_witness, verify_inequality_exhaustive, witness_bound, DPoint,
    DISCRETE_PARAMS, NON_OPEN_RADIUS,
};
use supra_core::fixpoint::{
    c_q_constant, chain_bound, esp_all, esp_bound, four_point_expansion, four_point_simplified, invariant_ball_check,
    picard, q_threshold, series_bound, uniqueness_check, verify_contraction, BallOptions, ContractionProblem,
    ContractionReport, Horizon, DEFAULT_Q_CAP,
};
use supra_core::matkowski::{
    check_m, check_mb, Verdict, DEFAULT_GRID, DEFAULT_N_MAX, DEFAULT_N_WINDOW, DEFAULT_VANISH_TOL,
};
use supra_core::space::{check_axioms, estimate_min_params, SampleRng};
use supra_core::{Error, SpaceClass, SpaceParams};

pub const SCHEMA: &str = "supra-fixpoint/1";
/// Violations listed in a report; the full count is always given.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "supra-fixpoint", version, about = "b-suprametric spaces and certified Picard iteration")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Sample-check the axioms of a construction under a space class.
    VerifySpace(VerifySpace),
    /// Run Picard iteration.
    Solve(Solve),
    /// Run Picard iteration and attach the convergence certificate.
    Certify(Certify),
    /// Classify a comparison function.
    PsiCheck(PsiCheck),
    /// Exhaustive report on the discrete example space.
    DemoDiscrete(DemoDiscrete),
    /// Evaluate the closed-form bounds.
    Bounds(Bounds),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    /// quadratic, exp-square, exp-supra, lp, lp-grid, composed-lp,
    /// composed-lp-grid, composed-quadratic, exp-square-of-supra
    #[arg(long, default_value = "quadratic")]
    pub kind: String,
    /// quadratic: `d_m (a d_m + scale)` (default a = scale = 1).
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    /// exp-square exponent (default 1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// exp-supra exponent (default 1).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Lower end of the per-coordinate sampling box (default depends on --kind).
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the per-coordinate sampling box (default depends on --kind).
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassName {
    Semimetric,
    BMetric,
    Suprametric,
    BSuprametric,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifySpace {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: SampleArgs,
    /// Defaults to the construction's declared parameters.
    #[arg(long, value_enum)]
    pub class: Option<ClassName>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Also report the Pareto front of (b, rho) over this many sampled triples.
    #[arg(long, default_value_t = 0)]
    pub estimate: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    /// affine:a,c | const:c | identity | expression in x
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    /// linear:c | rational | sqrt-shift | expression in t
    #[arg(long)]
    pub psi: String,
    /// Start point; comma-separated for vectors and grid functions.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub step_tol: f64,
    /// Further starts (';'-separated) for a uniqueness check.
    #[arg(long, allow_hyphen_values = true)]
    pub starts: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    pub unique_tol: f64,
    /// Sampled pairs for the contraction check (0 skips it).
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Include the full iterate trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Solve {
    #[command(flatten)]
    #[serde(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Certify {
    #[command(flatten)]
    #[serde(flatten)]
    pub solve: SolveArgs,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 50)]
    pub max_m: u64,
    #[arg(long, default_value_t = 1000)]
    pub ball_samples: usize,
    #[arg(long, default_value_t = DEFAULT_Q_CAP)]
    pub q_cap: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PsiCheck {
    /// linear:c | rational | sqrt-shift | expression in t
    #[arg(long)]
    pub psi: String,
    /// Also test the ratio condition for this b.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u64,
    #[arg(long, default_value_t = DEFAULT_N_WINDOW)]
    pub n_window: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DemoDiscrete {
    /// Largest denominator in the exhaustive check.
    #[arg(long = "N", default_value_t = 200)]
    pub n: u64,
    /// Largest denominator when enumerating the ball around 1.
    #[arg(long, default_value_t = 1000)]
    pub ball_n: u64,
    /// Seeded samples for the exponential inequalities.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Bounds {
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Comma-separated leg distances for chain/esp bounds.
    #[arg(long)]
    pub ds: Option<String>,
    /// q for c_q.
    #[arg(long)]
    pub q: Option<u64>,
    /// Four comma-separated legs for the four-point expansion.
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub psi: Option<String>,
    /// First step distance for the series bound (needs --psi).
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub series_p: u64,
    /// Upper index of the series bound; omitted means infinity.
    #[arg(long)]
    pub series_q: Option<u64>,
}

/// Exit code plus the JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Domain(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

type Run = Result<(bool, Value), Failure>;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Overflow(_) => "overflow",
        Error::Infeasible(_) => "infeasible",
        Error::CapExceeded(_) => "cap-exceeded",
        Error::Divergence(_) => "divergence",
        Error::Precondition(_) => "precondition",
        Error::Parse { .. } => "parse",
    }
}

/// Dispatches one command. Identical configurations give identical reports.
pub fn run(config: &RunConfig) -> Outcome {
    let result = match &config.command {
        Command::VerifySpace(c) => verify_space(c),
        Command::Solve(c) => solve(&c.solve),
        Command::Certify(c) => certify(c),
        Command::PsiCheck(c) => psi_check(c),
        Command::DemoDiscrete(c) => demo_discrete(c),
        Command::Bounds(c) => bounds(c),
    };
    let config_json = serde_json::to_value(&config.command).expect("config serializes");
    let command = config_json["command"].clone();
    let (code, status, body) = match result {
        Ok((true, v)) => (0, "ok", ("result", v)),
        Ok((false, v)) => (1, "violations", ("result", v)),
        Err(Failure::Runtime(e)) => (1, "error", ("error", json!({"kind": error_kind(&e), "message": e.to_string()}))),
        Err(Failure::Usage(m)) => (2, "usage-error", ("error", json!({"kind": "usage", "message": m}))),
    };
    let mut report = json!({
        "schema": SCHEMA,
        "command": command,
        "config": config_json,
        "status": status,
    });
    report[body.0] = body.1;
    Outcome { code, report }
}

fn construction(args: &SpaceArgs) -> Result<Construction, Failure> {
    Ok(build_construction(args)?)
}

/// The construction selected by `--kind` and its parameters.
pub fn build_construction(args: &SpaceArgs) -> Result<Construction, Error> {
    let kind = ConstructionKind::from_name(&args.kind)
        .ok_or_else(|| Error::Domain(format!("unknown construction kind '{}'", args.kind)))?;
    // Shape parameters of the scalar constructions default to 1.
    let unit = |v: Option<f64>, k: ConstructionKind| v.or((kind == k).then_some(1.0));
    let params = ConstructionParams {
        a: unit(args.a, ConstructionKind::Quadratic),
        scale: unit(args.scale, ConstructionKind::Quadratic),
        beta: unit(args.beta, ConstructionKind::ExpSquare),
        gamma: unit(args.gamma, ConstructionKind::ExpSupra),
        p: args.p,
        dim: args.dim,
        grid: args.grid,
    };
    from_descriptor(&Descriptor { kind, params, declared: None })
}

/// Default sampling box: wide where the distance grows polynomially,
/// narrow where it grows exponentially.
pub fn sampling_box(c: &Construction, lo: Option<f64>, hi: Option<f64>) -> (f64, f64) {
    let half = match c.kind() {
        ConstructionKind::ExpSquare | ConstructionKind::ExpSupra => 2.0,
        ConstructionKind::ExpSquareOfSupra => 0.5,
        _ => 10.0,
    };
    (lo.unwrap_or(-half), hi.unwrap_or(half))
}

fn truncate_list(v: &mut Value, key: &str) {
    if let Some(list) = v.get_mut(key).and_then(Value::as_array_mut) {
        let n = list.len();
        list.truncate(MAX_LISTED);
        v[format!("{key}_count")] = json!(n);
    }
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn space_class(c: &VerifySpace, declared: Option<SpaceParams>) -> Result<SpaceClass, Failure> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--class needs --{name}")));
    let cls = match c.class {
        None => SpaceClass::from(
            declared.ok_or_else(|| Failure::Usage(format!("{} declares no parameters; pass --class", c.space.kind)))?,
        ),
        Some(ClassName::Semimetric) => SpaceClass::Semimetric,
        Some(ClassName::BMetric) => SpaceClass::BMetric(need(c.b, "b")?),
        Some(ClassName::Suprametric) => SpaceClass::Suprametric(need(c.rho, "rho")?),
        Some(ClassName::BSuprametric) => SpaceClass::BSuprametric(need(c.b, "b")?, need(c.rho, "rho")?),
    };
    cls.validate()?;
    Ok(cls)
}

fn verify_space(c: &VerifySpace) -> Run {
    let cons = construction(&c.space)?;
    let cls = space_class(c, cons.declared)?;
    let (lo, hi) = sampling_box(&cons, c.sampling.lo, c.sampling.hi);
    let sampler = cons.sampler(lo, hi);
    let report =
        check_axioms(&cons.distance, cls, sampler.as_ref(), c.sampling.samples, c.sampling.tol, c.sampling.seed)?;
    let passed = report.passed();
    let mut out = to_json(&report);
    truncate_list(&mut out, "violations");
    truncate_list(&mut out, "semimetric_failures");
    out["descriptor"] = to_json(&cons.descriptor);
    out["box"] = json!([lo, hi]);
    if c.estimate > 0 {
        use rand::SeedableRng;
        let mut rng = SampleRng::seed_from_u64(c.sampling.seed);
        let triples: Vec<_> = (0..c.estimate)
            .map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng), sampler.sample(&mut rng)))
            .collect();
        out["front"] = to_json(&estimate_min_params(&cons.distance, &triples)?);
    }
    Ok((passed, out))
}

fn problem(s: &SolveArgs) -> Result<(ContractionProblem, Construction), Failure> {
    let cons = construction(&s.space)?;
    let params = cons.declared.ok_or_else(|| Failure::Usage(format!("{} declares no parameters", s.space.kind)))?;
    let map = parse::parse_map(&s.map)?;
    let psi = parse::parse_psi(&s.psi)?;
    let x0 = parse::parse_point(&s.x0, &cons)?;
    Ok((ContractionProblem::new(cons.distance.clone(), params, map, psi, x0), cons))
}

type Solved = (bool, Value, ContractionProblem, Option<ContractionReport>);

fn solve_inner(s: &SolveArgs) -> Result<Solved, Failure> {
    let (problem, cons) = problem(s)?;
    let mut ok = true;
    let mut out = json!({});
    let contraction = if s.pairs > 0 {
        let (lo, hi) = sampling_box(&cons, s.lo, s.hi);
        let r = verify_contraction(&problem, cons.sampler(lo, hi).as_ref(), s.pairs, 1e-12, s.seed)?;
        ok &= r.passed();
        let mut v = to_json(&r);
        truncate_list(&mut v, "violations");
        v["box"] = json!([lo, hi]);
        out["contraction"] = v;
        Some(r)
    } else {
        None
    };
    let result = picard(&problem, s.max_iter, s.step_tol)?;
    ok &= result.converged;
    for (k, v) in to_json(&result).as_object().expect("object") {
        out[k] = v.clone();
    }
    if s.trace {
        out["trace"] = to_json(&result.trace);
    }
    if let Some(starts) = &s.starts {
        let mut points = vec![problem.x0.clone()];
        for src in starts.split(';').filter(|t| !t.trim().is_empty()) {
            points.push(parse::parse_point(src, &cons)?);
        }
        let u = uniqueness_check(&problem, &points, s.unique_tol, s.max_iter, s.step_tol)?;
        ok &= u.passed();
        out["uniqueness"] = to_json(&u);
    }
    Ok((ok, out, problem, contraction))
}

fn solve(s: &SolveArgs) -> Run {
    let (ok, out, _, _) = solve_inner(s)?;
    Ok((ok, out))
}

fn certify(c: &Certify) -> Run {
    let (mut ok, mut out, problem, contraction) = solve_inner(&c.solve)?;
    let mut cert = q_threshold(&problem.psi, problem.params, c.epsilon, c.q_cap)?;
    let iterations = out["iterations"].as_u64().unwrap_or(0);
    let d0 = problem.distance.distance(&problem.x0, &problem.map.apply(&problem.x0)?)?;
    match series_bound(problem.params, &problem.psi, d0, iterations, Horizon::Infinite) {
        Ok(tail) => cert.series_tail = Some(tail),
        Err(e) => {
            ok = false;
            out["series_error"] = json!({"kind": error_kind(&e), "message": e.to_string()});
        }
    }
    out["certificate"] = to_json(&cert);
    match contraction {
        Some(v) if v.passed() => {
            let opts = BallOptions { samples: c.ball_samples, seed: c.solve.seed, q_cap: c.q_cap };
            let ball = invariant_ball_check(&problem, &v, c.epsilon, c.max_m, opts)?;
            ok &= ball.passed();
            let mut bv = to_json(&ball);
            truncate_list(&mut bv, "escapes");
            out["invariant_ball"] = bv;
        }
        Some(_) => out["invariant_ball"] = json!({"refused": "contraction check failed"}),
        None => out["invariant_ball"] = json!({"refused": "contraction check skipped (--pairs 0)"}),
    }
    Ok((ok, out))
}

fn psi_check(c: &PsiCheck) -> Run {
    let psi = parse::parse_psi(&c.psi)?;
    let report = match c.b {
        Some(b) => check_mb(&psi, b, &DEFAULT_GRID, c.n_window)?,
        None => check_m(&psi, &DEFAULT_GRID, c.n_max, DEFAULT_VANISH_TOL)?,
    };
    let ok = report.in_m && report.verdict_mb != Some(Verdict::NonMember);
    Ok((ok, to_json(&report)))
}

fn demo_discrete(c: &DemoDiscrete) -> Run {
    let exhaustive = verify_inequality_exhaustive(c.n)?;
    let b1 = ball(DPoint::One, NON_OPEN_RADIUS, c.ball_n)?;
    let ball_ok = b1 == [DPoint::Zero, DPoint::One];
    let witnesses = (0..=24)
        .map(|k| {
            let r = 10f64.powf(-6.0 + k as f64 * 0.25);
            let w = non_open_witness(r, witness_bound(r))?;
            Ok(json!({"r": r, "witness": w}))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let witnesses_ok = witnesses.iter().all(|w| !w["witness"].is_null());
    let disc = discontinuity_check(1_000_000)?;
    let disc_ok = disc.limit_at_0 < 1e-6 && disc.limit_at_1 == 0.25 && disc.d_1_0 == 0.2;
    let lemma = lemma_sweep(c.samples, &[DISCRETE_PARAMS.b], c.seed)?;
    let lemma_ok = lemma.failures.is_empty();
    let ok = exhaustive.passed() && ball_ok && witnesses_ok && disc_ok && lemma_ok;
    let mut ex = to_json(&exhaustive);
    truncate_list(&mut ex, "violations");
    let mut lm = to_json(&lemma);
    truncate_list(&mut lm, "failures");
    Ok((
        ok,
        json!({
            "params": DISCRETE_PARAMS,
            "exhaustive": ex,
            "ball": {"center": DPoint::One, "radius": NON_OPEN_RADIUS, "n_max": c.ball_n, "points": b1, "ok": ball_ok},
            "non_open_witnesses": {"ok": witnesses_ok, "radii": witnesses},
            "discontinuity": {"n": 1_000_000, "values": disc, "ok": disc_ok},
            "lemma": {"b": DISCRETE_PARAMS.b, "sweep": lm, "ok": lemma_ok},
        }),
    ))
}

fn list(src: &str, what: &str) -> Result<Vec<f64>, Failure> {
    src.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad number '{s}' in --{what}"))))
        .collect()
}

fn bounds(c: &Bounds) -> Run {
    let params = SpaceParams::new(c.b, c.rho)?;
    let mut out = json!({"params": params});
    let mut ok = true;
    if let Some(ds) = &c.ds {
        let ds = list(ds, "ds")?;
        out["chain_bound"] = json!(chain_bound(params, &ds)?);
        out["esp_bound"] = json!(esp_bound(params, &ds)?);
        out["esp"] = json!(esp_all(&ds)[1..]);
    }
    if let Some(q) = c.q {
        out["c_q"] = json!(c_q_constant(params, q)?);
    }
    if let Some(u) = &c.u {
        let u: [f64; 4] = list(u, "u")?.try_into().map_err(|_| Failure::Usage("--u takes 4 values".into()))?;
        out["four_point_expansion"] = json!(four_point_expansion(params, u[0], u[1], u[2], u[3]));
    }
    if let Some(eps) = c.epsilon {
        out["four_point_simplified"] = json!(four_point_simplified(params, eps));
    }
    if let Some(src) = &c.psi {
        let psi = parse::parse_psi(src)?;
        if let Some(eps) = c.epsilon {
            out["certificate"] = to_json(&q_threshold(&psi, params, eps, DEFAULT_Q_CAP)?);
        }
        if let Some(d0) = c.d0 {
            let horizon = c.series_q.map_or(Horizon::Infinite, Horizon::Finite);
            match series_bound(params, &psi, d0, c.series_p, horizon) {
                Ok(v) => out["series_bound"] = json!(v),
                Err(e @ Error::Divergence(_)) => {
                    ok = false;
                    out["series_error"] = json!({"kind": error_kind(&e), "message": e.to_string()});
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((ok, out))
}

/// Renders the report as pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
