//! `pmbox`: one JSON report per run on stdout, a short summary on stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 guard refusal.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use pmbox::classical::{self, FacetEnumeration};
use pmbox::infobound;
use pmbox::quantum::{self, format::ProtocolFile, NoiseKind, Protocol};
use pmbox::reference;
use pmbox::scenario::{builtin_inequality, rational_from_f64, Inequality, Scenario};
use pmbox::seesaw::{self, SeesawConfig};
use pmbox::{Error, Result};

#[derive(Parser, Serialize)]
#[command(name = "pmbox", version, about = "Prepare-and-measure polytopes, protocols and see-saw search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Deterministic strategies and distinct vertices of a classical polytope.
    Vertices(VerticesArgs),
    /// Exact classical bound of an inequality.
    Bound(IneqArgs),
    /// Facet classes of a classical polytope.
    Facets(FacetsArgs),
    /// Checks that an inequality is a facet.
    VerifyFacet(VerifyArgs),
    /// Evaluates a protocol on an inequality.
    Eval(EvalArgs),
    /// See-saw search over protocols at fixed dimensions.
    Seesaw(SeesawArgs),
    /// Critical visibility of a protocol under noise.
    Noise(NoiseArgs),
    /// Information-restricted bound of the facet family.
    Info(InfoArgs),
}

#[derive(Args, Serialize)]
struct ScenarioArgs {
    /// Message alphabet size.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    nb: usize,
}

#[derive(Args, Serialize)]
struct VerticesArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Write the vertex set (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct IneqArgs {
    /// Built-in inequality name (`S1`, `T45-8`, `SD(2,3,3)`, `Sn(5)`, ...).
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    /// Inequality file (JSON).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FacetsArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Write one canonical inequality per line (JSON lines) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Built-in name; `Sn` together with `--n` selects the facet family.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Replace the bound before verifying.
    #[arg(long)]
    bound: Option<f64>,
}

#[derive(Args, Serialize)]
struct ProtocolArgs {
    /// Protocol file (JSON) or built-in protocol name.
    #[arg(long)]
    protocol: String,
    /// Inequality name or file; defaults to the one a built-in protocol targets.
    #[arg(long)]
    inequality: Option<String>,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Write the protocol in file format here.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SeesawArgs {
    /// Inequality name or file.
    #[arg(long)]
    inequality: String,
    #[arg(long, default_value_t = 2)]
    dima: usize,
    #[arg(long, default_value_t = 2)]
    dimb: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_sweeps: usize,
    /// Stop a restart once a sweep improves by less than this.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Qubit messages instead of classical bits.
    #[arg(long)]
    qc: bool,
    /// Read-out outcomes for qubit messages.
    #[arg(long, default_value_t = 3)]
    readout_outcomes: usize,
    /// Hold the shared state fixed (`phi+`, `max-entangled`).
    #[arg(long, conflicts_with = "qc")]
    fixed_state: Option<String>,
    /// Worker threads (default: PMBOX_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the result file (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// `depolarizing` or `dephasing`.
    #[arg(long)]
    kind: NoiseKind,
}

#[derive(Args, Serialize)]
struct InfoArgs {
    #[arg(long)]
    n: usize,
    /// Sample this many random one-bit ensembles and count violations.
    #[arg(long, default_value_t = 0)]
    check_random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    argv: Vec<String>,
    inputs: Value,
    results: Value,
    elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    version: &'static str,
}

struct Outcome {
    results: Value,
    summary: String,
    seed: Option<u64>,
}

fn outcome(results: Value, summary: String) -> Outcome {
    Outcome { results, summary, seed: None }
}

fn load_inequality(spec: &str) -> Result<Inequality> {
    match builtin_inequality(spec) {
        Ok((_, ineq)) => Ok(ineq),
        Err(_) if Path::new(spec).is_file() => Inequality::from_json(&std::fs::read_to_string(spec)?),
        Err(e) => Err(e),
    }
}

fn ineq_from_args(builtin: &Option<String>, file: &Option<PathBuf>) -> Result<Inequality> {
    match (builtin, file) {
        (Some(name), _) => Ok(builtin_inequality(name)?.1),
        (None, Some(path)) => Inequality::from_json(&std::fs::read_to_string(path)?),
        (None, None) => Err(Error::InvalidArgument("need --builtin or --file".into())),
    }
}

/// Returns the protocol and, for built-ins, its name.
fn load_protocol(spec: &str) -> Result<(Protocol, Option<&'static str>)> {
    if let Some(name) = quantum::builtin_protocol_names().into_iter().find(|n| *n == spec) {
        return Ok((quantum::builtin_protocol(name)?, Some(name)));
    }
    if Path::new(spec).is_file() {
        return Ok((Protocol::from_json(&std::fs::read_to_string(spec)?)?, None));
    }
    Err(Error::UnknownName(spec.to_string()))
}

fn protocol_and_inequality(a: &ProtocolArgs) -> Result<(Protocol, Option<&'static str>, Inequality)> {
    let (p, builtin) = load_protocol(&a.protocol)?;
    let ineq = match (&a.inequality, builtin) {
        (Some(spec), _) => load_inequality(spec)?,
        (None, Some(name)) => builtin_inequality(quantum::target_inequality(name)?)?.1,
        (None, None) => return Err(Error::InvalidArgument("--inequality is required for protocol files".into())),
    };
    Ok((p, builtin, ineq))
}

fn with_target(value: f64, target: Option<reference::Target>) -> Value {
    match target {
        Some(t) => json!({ "value": value, "target": t, "within_target": t.accepts(value) }),
        None => json!({ "value": value }),
    }
}

fn scenario_of(a: &ScenarioArgs) -> Result<Scenario> {
    Scenario::new(a.d, a.nx, a.nb)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_vertices(a: &VerticesArgs) -> Result<Outcome> {
    let s = scenario_of(&a.scenario)?;
    let strategies = classical::enumerate_strategies(&s).len();
    let vs = classical::enumerate_vertices(&s);
    let dim = classical::polytope_dimension(&s);
    if let Some(path) = &a.out {
        write_file(path, &serde_json::to_string(&vs)?)?;
    }
    Ok(outcome(
        json!({
            "scenario": s,
            "strategies": strategies,
            "vertices": vs.vertices.len(),
            "polytope_dimension": dim,
            "behavior_dimension": s.behavior_dimension(),
            "vertex_file": a.out,
        }),
        format!("{s}: {strategies} strategies, {} distinct vertices, dimension {dim}", vs.vertices.len()),
    ))
}

fn cmd_bound(a: &IneqArgs) -> Result<Outcome> {
    let ineq = ineq_from_args(&a.builtin, &a.file)?;
    let bound = classical::classical_bound(&ineq, &ineq.scenario)?;
    let matches = bound == ineq.bound;
    Ok(outcome(
        json!({
            "inequality": ineq.name,
            "scenario": ineq.scenario,
            "bound": bound.to_string(),
            "bound_value": bound.to_f64(),
            "stated_bound": ineq.bound.to_string(),
            "matches_stated": matches,
        }),
        format!("{}: classical bound {bound} (stated {}){}", ineq.name, ineq.bound, if matches { "" } else { " MISMATCH" }),
    ))
}

#[derive(Serialize)]
struct FacetLine<'a> {
    name: &'a str,
    coeffs: &'a [Vec<i64>],
    bound: i64,
    orbit_size: usize,
}

fn class_name(names: &std::collections::BTreeMap<classical::FacetForm, String>, e: &FacetEnumeration, k: usize) -> String {
    let c = &e.classes[k];
    names.get(&c.form).cloned().unwrap_or_else(|| c.inequality.name.clone())
}

fn cmd_facets(a: &FacetsArgs) -> Result<Outcome> {
    let s = scenario_of(&a.scenario)?;
    let e = classical::enumerate_facets(&s)?;
    let names = classical::registry_names(&s);
    let classes: Vec<Value> = e
        .classes
        .iter()
        .enumerate()
        .map(|(k, c)| {
            json!({
                "name": class_name(&names, &e, k),
                "coeffs": c.form.coeffs,
                "bound": c.form.bound,
                "orbit_size": c.orbit_size,
                "lifted": c.lifted,
                "discrimination": c.discrimination,
            })
        })
        .collect();
    let pick = |f: &dyn Fn(&classical::FacetClass) -> bool| -> Vec<String> {
        (0..e.classes.len()).filter(|&k| f(&e.classes[k])).map(|k| class_name(&names, &e, k)).collect()
    };
    let nontrivial = pick(&|c| !c.discrimination);
    let new = pick(&|c| !c.discrimination && !c.lifted);
    if let Some(path) = &a.out {
        let mut text = String::new();
        for (k, c) in e.classes.iter().enumerate() {
            let line = FacetLine {
                name: &class_name(&names, &e, k),
                coeffs: &c.form.coeffs,
                bound: c.form.bound,
                orbit_size: c.orbit_size,
            };
            text.push_str(&serde_json::to_string(&line)?);
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    let summary = format!(
        "{s}: {} facets ({} positivity), {} classes, {} non-trivial, new: [{}]",
        e.total_facets,
        e.trivial_facets,
        e.classes.len(),
        nontrivial.len(),
        new.join(", ")
    );
    Ok(outcome(
        json!({
            "scenario": s,
            "vertex_count": e.vertex_count,
            "dimension": e.dimension,
            "total_facets": e.total_facets,
            "trivial_facets": e.trivial_facets,
            "class_count": e.classes.len(),
            "nontrivial_classes": nontrivial,
            "new_classes": new,
            "classes": classes,
            "facet_file": a.out,
        }),
        summary,
    ))
}

fn cmd_verify_facet(a: &VerifyArgs) -> Result<Outcome> {
    let mut family_n = None;
    let mut ineq = match (a.builtin.as_deref(), a.n) {
        (Some("Sn"), Some(n)) => {
            family_n = Some(n);
            pmbox::scenario::facet_family(n)?
        }
        (Some("Sn"), None) => return Err(Error::InvalidArgument("`Sn` needs --n".into())),
        _ => ineq_from_args(&a.builtin, &a.file)?,
    };
    if let Some(b) = a.bound {
        ineq = ineq.with_bound(rational_from_f64(b)?);
    }
    let r = classical::verify_facet(&ineq, &ineq.scenario)?;
    let mut results = json!({ "inequality": ineq.name, "scenario": ineq.scenario, "report": r });
    if let (Some(n), None) = (family_n, a.bound) {
        results["expected_saturating"] = json!(reference::facet_family_saturating(n));
    }
    Ok(outcome(
        results,
        format!(
            "{}: valid {}, tight {}, facet {}, {} saturating, affine rank {} of {}",
            ineq.name, r.is_valid, r.is_tight, r.is_facet, r.saturating_count, r.affine_rank, r.polytope_dimension
        ),
    ))
}

fn cmd_eval(a: &EvalArgs) -> Result<Outcome> {
    let (p, builtin, ineq) = protocol_and_inequality(&a.protocol)?;
    let beh = p.eval()?;
    let score = pmbox::scenario::evaluate(&ineq, &beh)?;
    let target = builtin
        .filter(|n| quantum::target_inequality(n).ok() == Some(ineq.name.as_str()))
        .and_then(reference::protocol_value);
    if let Some(path) = &a.export {
        write_file(path, &p.to_json())?;
    }
    Ok(outcome(
        json!({
            "protocol": a.protocol.protocol,
            "type": p.kind(),
            "inequality": ineq.name,
            "score": with_target(score, target),
            "bound": ineq.bound_f64(),
            "violation": score - ineq.bound_f64(),
            "behavior": beh.p,
            "export": a.export,
        }),
        format!("{} on {}: {score:.12} (bound {})", a.protocol.protocol, ineq.name, ineq.bound),
    ))
}

fn cmd_seesaw(a: &SeesawArgs) -> Result<Outcome> {
    let ineq = load_inequality(&a.inequality)?;
    let cfg = SeesawConfig {
        dim_a: a.dima,
        dim_b: a.dimb,
        restarts: a.restarts,
        max_sweeps: a.max_sweeps,
        tol: a.tol,
        seed: a.seed,
        readout_outcomes: a.readout_outcomes,
        threads: a.threads,
        ..SeesawConfig::default()
    };
    let res = match (&a.fixed_state, a.qc) {
        (_, true) => seesaw::qc::seesaw_qc(&ineq, &cfg)?,
        (Some(name), false) => seesaw::seesaw_cc_fixed_state(&ineq, &seesaw::named_state(name, a.dima, a.dimb)?, &cfg)?,
        (None, false) => seesaw::seesaw_cc(&ineq, &cfg)?,
    };
    let target = reference::seesaw_value(&ineq.name, a.dima, a.dimb, a.qc, a.fixed_state.as_deref());
    let payload = json!({
        "inequality": ineq.name,
        "dims": [a.dima, a.dimb],
        "best_value": res.best_value,
        "restart_values": res.restart_values,
        "protocol": ProtocolFile::from(&res.best_protocol),
        "seed": a.seed,
    });
    if let Some(path) = &a.out {
        write_file(path, &serde_json::to_string(&payload)?)?;
    }
    let results = json!({
        "inequality": ineq.name,
        "dims": [a.dima, a.dimb],
        "messages": if a.qc { "qubit" } else { "bit" },
        "best": with_target(res.best_value, target),
        "classical_bound": ineq.bound_f64(),
        "restart_values": res.restart_values,
        "trace": res.trace,
        "protocol": ProtocolFile::from(&res.best_protocol),
        "result_file": a.out,
    });
    Ok(Outcome {
        summary: format!(
            "{} dims {}x{} ({} messages): best {:.6} over {} restarts",
            ineq.name,
            a.dima,
            a.dimb,
            if a.qc { "qubit" } else { "bit" },
            res.best_value,
            a.restarts
        ),
        results,
        seed: Some(a.seed),
    })
}

fn cmd_noise(a: &NoiseArgs) -> Result<Outcome> {
    let (p, builtin, ineq) = protocol_and_inequality(&a.protocol)?;
    let t = quantum::noise_threshold(&p, &ineq, a.kind)?;
    let target = builtin.and_then(|n| reference::noise_threshold(n, a.kind));
    Ok(outcome(
        json!({
            "protocol": a.protocol.protocol,
            "inequality": ineq.name,
            "kind": a.kind,
            "visibility": with_target(t.visibility, target),
            "score_at_one": t.score_at_one,
            "score_at_zero": t.score_at_zero,
            "monotone": t.monotone,
            "bisection_tolerance": quantum::THRESHOLD_TOL,
        }),
        format!(
            "{} on {} under {} noise: violated for v > {:.9}{}",
            a.protocol.protocol,
            ineq.name,
            format!("{:?}", a.kind).to_lowercase(),
            t.visibility,
            if t.monotone { "" } else { " (score not monotone in v)" }
        ),
    ))
}

fn cmd_info(a: &InfoArgs) -> Result<Outcome> {
    let bound = infobound::info_bound_value(a.n)?;
    let e = infobound::achieving_ensemble(a.n)?;
    let achieved = infobound::facet_value(&e, a.n)?;
    let bits = infobound::accessible_info_bits(&e);
    let mut results = json!({
        "n": a.n,
        "bound": bound,
        "achieved": with_target(achieved, Some(reference::Target::within(bound, 1e-12))),
        "achieving_info_bits": with_target(bits, Some(reference::Target::within(1.0, 1e-12))),
        "guessing_probability": infobound::guessing_probability(&e),
        "classical_bound": 1.0,
    });
    let mut summary = format!("n = {}: one-bit bound {bound:.12}, achieved {achieved:.12} with {bits:.12} bits", a.n);
    if a.check_random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let mut violations = 0usize;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..a.check_random {
            let e = infobound::random_one_bit_ensemble(&mut rng, a.n)?;
            if !infobound::check_info_inequality(&e, a.n)? {
                violations += 1;
            }
            worst = worst.max(infobound::facet_value(&e, a.n)?);
        }
        results["random_check"] = json!({ "samples": a.check_random, "violations": violations, "largest_value": worst });
        summary.push_str(&format!("; {violations} violations in {} random ensembles", a.check_random));
    }
    Ok(Outcome { results, summary, seed: (a.check_random > 0).then_some(a.seed) })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::GuardExceeded(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, run) = match &cli.command {
        Command::Vertices(a) => ("vertices", cmd_vertices(a)),
        Command::Bound(a) => ("bound", cmd_bound(a)),
        Command::Facets(a) => ("facets", cmd_facets(a)),
        Command::VerifyFacet(a) => ("verify-facet", cmd_verify_facet(a)),
        Command::Eval(a) => ("eval", cmd_eval(a)),
        Command::Seesaw(a) => ("seesaw", cmd_seesaw(a)),
        Command::Noise(a) => ("noise", cmd_noise(a)),
        Command::Info(a) => ("info", cmd_info(a)),
    };
    match run {
        Ok(out) => {
            let inputs = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
            let report = RunReport {
                command: name,
                argv: std::env::args().collect(),
                inputs: inputs.get(name).cloned().unwrap_or(inputs),
                results: out.results,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                seed: out.seed,
                version: env!("CARGO_PKG_VERSION"),
            };
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            eprintln!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pmbox {name}: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
