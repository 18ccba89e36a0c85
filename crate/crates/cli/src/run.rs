use serde::Serialize;
use serde_json::json;

use nilskew::complexity::{default_l, greedy_cover, subpoly_trend, Grid};
use nilskew::config::Built;
use nilskew::heisenberg::{HeisElt, PhasePoint};
use nilskew::numtheory::{check_best_approx, classify_index_sets, mobius_sieve};
use nilskew::oracle;
use nilskew::rigidity::mobius_correlation;
use nilskew::rigidity::decay_experiment;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Artifact;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Cf,
    Orbit,
    OracleCheck,
    RigidityDecay,
    Correlate,
    Complexity,
}

fn point(s: [f64; 4]) -> PhasePoint<f64> {
    PhasePoint::new(s[0], HeisElt::new(s[1], s[2], s[3]))
}

pub fn run(kind: Kind, cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    match kind {
        Kind::Cf => cf(cfg),
        Kind::Orbit => orbit(cfg),
        Kind::OracleCheck => oracle_check(cfg),
        Kind::RigidityDecay => rigidity_decay(cfg),
        Kind::Correlate => correlate(cfg),
        Kind::Complexity => complexity(cfg),
    }
}

fn system_meta(cfg: &ExperimentConfig, built: &Built) -> serde_json::Value {
    json!({
        "alpha": cfg.system.alpha,
        "alpha_value": built.system.alpha().value(),
        "theta": built.sets.theta,
        "B": built.sets.b,
        "seed": cfg.seed,
    })
}

#[derive(Serialize)]
struct CfRow {
    k: usize,
    a_k: String,
    l_k: String,
    q_k: String,
    dist: f64,
    lower_ok: bool,
    upper_ok: bool,
    best_ok: bool,
    in_qprime: bool,
    in_qdoubleprime: bool,
    in_qb: bool,
}

fn cf(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let mut spec = cfg.system.clone();
    spec.depth = Some(cfg.cf.k_max + 1);
    let rn = spec.rotation()?;
    let (theta, b) = spec.parameters();
    let sets = classify_index_sets(&rn, theta, b)?;
    let last = if rn.is_terminated() { rn.depth() } else { rn.depth() - 1 };
    let rows = (1..=cfg.cf.k_max.min(last))
        .map(|k| {
            let r = check_best_approx(&rn, k)?;
            Ok(CfRow {
                k,
                a_k: rn.a(k).to_string(),
                l_k: rn.l(k).to_string(),
                q_k: r.q_k,
                dist: r.dist,
                lower_ok: r.lower_ok,
                upper_ok: r.upper_ok,
                best_ok: r.best_ok,
                in_qprime: sets.qprime.contains(&k),
                in_qdoubleprime: sets.qdoubleprime.contains(&k),
                in_qb: sets.qb.iter().any(|e| e.ell == k),
            })
        })
        .collect::<nilskew::Result<Vec<_>>>()?;
    let meta = json!({ "alpha": cfg.system.alpha, "alpha_value": rn.value(), "theta": theta, "B": b });
    Artifact::new("cf", meta, &rows)
}

#[derive(Serialize)]
struct OrbitRow {
    n: u64,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

fn orbit(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let built = cfg.system.build()?;
    let sys = &built.system;
    let p0 = point(cfg.orbit.start);
    let mut rows = Vec::new();
    let mut n = 0;
    while n <= cfg.orbit.n {
        let p = if n == 0 { p0.clone() } else { sys.iterate(&p0, n)? };
        let g = p.p.rep();
        rows.push(OrbitRow { n, t: p.t, x: g.x, y: g.y, z: g.z });
        n += cfg.orbit.stride;
    }
    Artifact::new("orbit", system_meta(cfg, &built), &rows)
}

fn oracle_check(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let results = oracle::run_all(cfg.seed)?;
    for r in &results {
        eprintln!(
            "{:<24} {:>6} cases  max_err {:<10.3e} tol {:<8.1e} {}",
            r.name,
            r.cases,
            r.max_err,
            r.tol,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    Artifact::new("oracle-check", json!({ "seed": cfg.seed, "failed": failed }), &results)
}

fn rigidity_decay(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let built = cfg.system.build()?;
    let rows = decay_experiment(&built.system, &built.sets, cfg.rigidity.grid)?;
    let mut meta = system_meta(cfg, &built);
    meta["qdoubleprime"] = json!(built.sets.qdoubleprime);
    meta["window_limited"] = json!(built.sets.window_limited);
    Artifact::new("rigidity-decay", meta, &rows)
}

#[derive(Serialize)]
struct CorrelationRow {
    n: u64,
    re: f64,
    im: f64,
    abs: f64,
    mertens_over_n: f64,
}

fn correlate(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let built = cfg.system.build()?;
    let p = &cfg.correlate;
    let limit = usize::try_from(p.n).map_err(|_| CliError::Config("correlate.n too large".into()))?;
    let table = mobius_sieve(limit)?;
    let report = mobius_correlation(&built.system, &p.observable, &point(p.start), p.n, &cfg.checkpoints(), &table)?;
    let rows: Vec<CorrelationRow> = report
        .checkpoints
        .iter()
        .map(|c| CorrelationRow {
            n: c.n,
            re: c.re,
            im: c.im,
            abs: c.abs,
            mertens_over_n: table.mertens(c.n as usize) as f64 / c.n as f64,
        })
        .collect();
    let mut meta = system_meta(cfg, &built);
    meta["observable"] = json!(report.observable);
    meta["base"] = json!(report.base);
    Artifact::new("correlate", meta, &rows)
}

#[derive(Serialize)]
struct ComplexityRow {
    k: usize,
    q_k: String,
    n_k: f64,
    grid_count: f64,
    s_n_upper: f64,
    ratio: f64,
    tau: f64,
    #[serde(rename = "B")]
    b: f64,
}

#[derive(Serialize)]
struct CoverRow {
    n: u64,
    centers: usize,
    covered_fraction: f64,
    exhausted: bool,
}

fn complexity(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let built = cfg.system.build()?;
    let p = &cfg.complexity;
    let l = p.l.unwrap_or_else(|| default_l(p.eps, &built.system));
    let table = subpoly_trend(built.system.alpha(), &p.ks, p.eps, l, p.tau)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    let rn = built.system.alpha();
    for r in &table.rows {
        let exact = rn.q_u64(r.k).and_then(|q| Grid::new(p.eps, l, q).and_then(|g| g.count()).ok());
        let count = exact.map_or(r.grid_count, |c| c as f64);
        rows.push(ComplexityRow {
            k: r.k,
            q_k: rn.q(r.k).to_string(),
            n_k: r.ln_n_k.exp(),
            grid_count: count,
            s_n_upper: count,
            ratio: r.ratio,
            tau: r.tau,
            b: r.b,
        });
    }
    let covers = p
        .cover_n
        .iter()
        .map(|&n| {
            let c = greedy_cover(&built.system, n, p.cover_eps, p.cover_samples, p.region, usize::MAX, cfg.seed)?;
            Ok(CoverRow { n, centers: c.centers, covered_fraction: c.covered_fraction, exhausted: c.exhausted })
        })
        .collect::<nilskew::Result<Vec<_>>>()?;
    let mut meta = system_meta(cfg, &built);
    meta["eps"] = json!(p.eps);
    meta["L"] = json!(l);
    meta["L_margin"] = json!(nilskew::complexity::L_MARGIN);
    meta["decreasing"] = json!(table.decreasing);
    meta["slope"] = json!(table.slope);
    meta["cover"] = serde_json::to_value(&covers).map_err(|e| CliError::Io(e.to_string()))?;
    Artifact::new("complexity", meta, &rows)
}
