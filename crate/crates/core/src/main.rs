use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use timed_ni::constraint::{parse_rat, Valuation};
use timed_ni::format::{parse_grid, parse_model, AnalysisDoc, Model, ResultDocument};
use timed_ni::noninterf::{check_noninterf, sample_and_verify, synth_noninterf, NiMode, Verdict};
use timed_ni::oracle::{replay, ConcreteRun};
use timed_ni::pta::Network;
use timed_ni::reach::{
    ef_synth_with_progress, reachable_locations, safety_synth, AnalysisResult, ConcreteOptions,
    ReachOptions,
};
use timed_ni::{Error, Result};

/// `println!` that stays quiet when stdout is gone (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Environment variable that caps the number of explored states.
const STATE_BUDGET_VAR: &str = "TNI_STATE_BUDGET";

#[derive(Parser)]
#[command(
    name = "timed-ni",
    version,
    about = "Parametric timed model checking and timed non-interference",
    after_help = "Exit codes: 0 success, 1 property violated or unreachable, \
                  2 incomplete result, 3 usage, 4 parse, 5 model, 6 resource limit, 7 I/O, 8 JSON."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Location reachability at a fixed parameter valuation.
    Reach(ReachArgs),
    /// Parameter synthesis: reachability (ef) or safety.
    Synth(SynthArgs),
    /// n-location-non-interference.
    #[command(subcommand)]
    Noninterf(NiCommand),
    /// Compares a stored result with concrete checks over a grid.
    VerifySample(VerifyArgs),
    /// Replays a concrete run and reports where it ends.
    Replay(ReplayArgs),
}

#[derive(Subcommand)]
enum NiCommand {
    /// Decides non-interference at one valuation.
    Check(CheckArgs),
    /// Synthesizes the parameter and `n` valuations that ensure it.
    Synth(NiSynthArgs),
}

#[derive(Args)]
struct Output {
    /// Write the JSON result document here (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct Limits {
    /// Maximal number of discrete transitions to explore.
    #[arg(long, value_name = "N")]
    depth_limit: Option<usize>,
    /// Stop after this many seconds with an incomplete result.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Keep exploring states whose parameters are already in the result.
    #[arg(long)]
    no_coverage_pruning: bool,
    /// Print one line per finished depth layer on stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct ReachArgs {
    model: PathBuf,
    #[arg(long)]
    target: String,
    /// Parameter values, e.g. `p=9/10,q=2`.
    #[arg(long, default_value = "")]
    valuation: String,
    #[arg(long, value_name = "N")]
    depth_limit: Option<usize>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Ef,
    Safety,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    model: PathBuf,
    #[arg(long)]
    target: String,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct CheckArgs {
    model: PathBuf,
    #[arg(long, default_value = "")]
    valuation: String,
    /// Minimal spacing between high actions.
    #[arg(long)]
    n: String,
    /// Judge only these location vectors instead of the whole reachable set.
    #[arg(long, value_name = "LOCS")]
    bad: Option<String>,
    #[arg(long, value_name = "N")]
    depth_limit: Option<usize>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Agreement,
    Bad,
}

#[derive(Args)]
struct NiSynthArgs {
    model: PathBuf,
    #[arg(long, value_enum, default_value = "agreement")]
    mode: ModeArg,
    /// Location vectors that must stay unreachable (with `--mode bad`).
    #[arg(long, value_name = "LOCS")]
    bad: Option<String>,
    /// Name of the attacker-spacing parameter.
    #[arg(long, default_value = "n")]
    n_name: String,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct VerifyArgs {
    model: PathBuf,
    /// A result document written by `synth` or `noninterf synth`.
    #[arg(long, value_name = "FILE")]
    result: PathBuf,
    /// Sample grid, e.g. `p=0:4:1/4,n=0:4:1/4`.
    #[arg(long)]
    grid: String,
    #[arg(long, value_name = "N")]
    depth_limit: Option<usize>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct ReplayArgs {
    model: PathBuf,
    /// JSON list of `{"delay": "9/10", "edge": "0.0"}` steps.
    #[arg(long, value_name = "FILE")]
    run: PathBuf,
    #[arg(long, default_value = "")]
    valuation: String,
    #[command(flatten)]
    out: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) => 3,
        Error::Parse { .. } => 4,
        Error::Model(_) => 5,
        Error::Resource(_) => 6,
        Error::Io(_) => 7,
        Error::Json(_) => 8,
    }
}

fn run(command: Command) -> Result<u8> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match command {
        Command::Reach(a) => reach(a, argv),
        Command::Synth(a) => synth(a, argv),
        Command::Noninterf(NiCommand::Check(a)) => check(a, argv),
        Command::Noninterf(NiCommand::Synth(a)) => ni_synth(a, argv),
        Command::VerifySample(a) => verify(a, argv),
        Command::Replay(a) => replay_cmd(a, argv),
    }
}

fn load(path: &Path) -> Result<(String, Model)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let model = parse_model(&text)?;
    if let Some(d) = model.diagnostics.first() {
        for d in &model.diagnostics {
            eprintln!("{}: {d}", path.display());
        }
        return Err(Error::Model(format!(
            "{} has {} problem(s), first: {d}",
            path.display(),
            model.diagnostics.len()
        )));
    }
    Ok((text, model))
}

fn state_budget() -> Result<Option<usize>> {
    match std::env::var(STATE_BUDGET_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("{STATE_BUDGET_VAR}=`{s}` is not a count"))),
        Err(_) => Ok(None),
    }
}

fn concrete_opts(depth_limit: Option<usize>) -> Result<ConcreteOptions> {
    Ok(ConcreteOptions {
        depth_limit,
        state_budget: state_budget()?,
    })
}

fn reach_opts(l: &Limits) -> Result<ReachOptions> {
    let time_limit = match l.time_limit {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(Error::Usage(format!("--time-limit {s} must be positive")))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(ReachOptions {
        depth_limit: l.depth_limit,
        coverage_pruning: !l.no_coverage_pruning,
        state_budget: state_budget()?,
        time_limit,
        ..Default::default()
    })
}

/// Parses `--valuation` and rejects names that are not parameters of `net`.
fn parameter_valuation(net: &Network, text: &str) -> Result<Valuation> {
    let v = Valuation::parse(text)?;
    let ctx = net.context();
    for (name, _) in v.iter() {
        if !ctx.parameters().iter().any(|p| ctx.var(*p).name == name) {
            return Err(Error::Usage(format!("`{name}` is not a parameter of the model")));
        }
    }
    Ok(v)
}

fn emit(out: &Output, doc: &ResultDocument) -> Result<()> {
    match &out.json {
        None => Ok(()),
        Some(p) if p.as_os_str() == "-" => {
            let _ = std::io::Write::write_all(&mut std::io::stdout(), doc.to_json().as_bytes());
            Ok(())
        }
        Some(p) => std::fs::write(p, doc.to_json()).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        }),
    }
}

fn json_to_stdout(out: &Output) -> bool {
    out.json.as_ref().is_some_and(|p| p.as_os_str() == "-")
}

fn status_line(r: &AnalysisResult) -> Option<String> {
    if r.complete {
        return None;
    }
    let why = if r.timed_out {
        "time limit".to_string()
    } else {
        format!("depth limit reached at depth {}", r.max_depth_reached)
    };
    let approx = if r.over_approximation {
        ", over-approximation"
    } else {
        ", under-approximation"
    };
    Some(format!(
        "incomplete ({why}, {} states{approx})",
        r.states_explored
    ))
}

fn analysis_exit(r: &AnalysisResult) -> u8 {
    if r.complete {
        0
    } else {
        2
    }
}

fn reach(a: ReachArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let val = parameter_valuation(net, &a.valuation)?;
    let target = net.parse_target(&a.target)?;
    let inst = net.instantiate(&val)?;
    let r = reachable_locations(&inst, &concrete_opts(a.depth_limit)?)?;
    let reachable = r.locations.iter().any(|l| target.matches(l));
    let mut doc = ResultDocument::new(argv, &text);
    doc.outcome = json!({
        "target": a.target,
        "valuation": val.to_string(),
        "reachable": reachable,
        "complete": r.complete,
        "states": r.states,
        "locations": r.names(net),
    });
    if !json_to_stdout(&a.out) {
        say!(
            "{}",
            match (reachable, r.complete) {
                (true, _) => "reachable",
                (false, true) => "unreachable",
                (false, false) => "unknown (depth limit reached)",
            }
        );
    }
    emit(&a.out, &doc)?;
    Ok(match (reachable, r.complete) {
        (true, _) => 0,
        (false, true) => 1,
        (false, false) => 2,
    })
}

fn print_analysis(out: &Output, r: &AnalysisResult) {
    if json_to_stdout(out) {
        return;
    }
    say!("{}", r.constraint);
    if let Some(s) = status_line(r) {
        eprintln!("{s}");
    }
}

fn progress_printer(on: bool) -> impl FnMut(&timed_ni::reach::Progress) {
    move |p| {
        if on {
            eprintln!(
                "depth {}: frontier {}, {} disjuncts",
                p.depth, p.frontier, p.disjuncts
            );
        }
    }
}

fn synth(a: SynthArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let target = net.parse_target(&a.target)?;
    let opts = reach_opts(&a.limits)?;
    let mut progress = progress_printer(a.limits.progress);
    let r = match a.kind {
        SynthKind::Ef => ef_synth_with_progress(net, &target, &opts, &mut progress)?,
        SynthKind::Safety => safety_synth(net, &target, &opts)?,
    };
    let mut doc = ResultDocument::new(argv, &text);
    doc.analysis = Some(AnalysisDoc::new(&r));
    doc.outcome = json!({
        "kind": match a.kind { SynthKind::Ef => "ef", SynthKind::Safety => "safety" },
        "target": a.target,
    });
    print_analysis(&a.out, &r);
    emit(&a.out, &doc)?;
    Ok(analysis_exit(&r))
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "YES",
        Verdict::No => "NO",
        Verdict::Unknown => "UNKNOWN",
    }
}

fn check(a: CheckArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let val = parameter_valuation(net, &a.valuation)?;
    let n = parse_rat(&a.n)?;
    let mode = match &a.bad {
        Some(b) => NiMode::Bad(net.parse_target(b)?),
        None => NiMode::Agreement,
    };
    let report = check_noninterf(net, &val, &n, &concrete_opts(a.depth_limit)?)?;
    let verdict = report.verdict_in(&mode);
    let names = |it: &mut dyn Iterator<Item = &Vec<usize>>| -> Vec<String> {
        it.map(|l| net.loc_name(l)).collect()
    };
    let extra = names(&mut report.extra().into_iter());
    let mut doc = ResultDocument::new(argv, &text);
    doc.outcome = json!({
        "verdict": verdict,
        "valuation": val.to_string(),
        "n": a.n,
        "bad": a.bad,
        "restricted": names(&mut report.restricted.iter()),
        "full": names(&mut report.full.iter()),
        "attacker_only": extra,
        "restricted_complete": report.restricted_complete,
        "full_complete": report.full_complete,
    });
    if !json_to_stdout(&a.out) {
        say!("{}", verdict_word(verdict));
        match &mode {
            NiMode::Agreement => {
                for l in &extra {
                    say!("  reachable only with the attacker: {l}");
                }
            }
            NiMode::Bad(t) => {
                for l in report.full.iter().filter(|l| t.matches(l)) {
                    say!("  bad and reachable: {}", net.loc_name(l));
                }
            }
        }
    }
    emit(&a.out, &doc)?;
    Ok(match verdict {
        Verdict::Yes => 0,
        Verdict::No => 1,
        Verdict::Unknown => 2,
    })
}

fn ni_synth(a: NiSynthArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let mode = match (a.mode, &a.bad) {
        (ModeArg::Bad, Some(b)) => NiMode::Bad(net.parse_target(b)?),
        (ModeArg::Bad, None) => return Err(Error::Usage("--mode bad needs --bad".into())),
        (ModeArg::Agreement, Some(_)) => {
            return Err(Error::Usage("--bad only applies to --mode bad".into()))
        }
        (ModeArg::Agreement, None) => NiMode::Agreement,
    };
    let r = synth_noninterf(net, &mode, &a.n_name, &reach_opts(&a.limits)?)?;
    let mut doc = ResultDocument::new(argv, &text);
    doc.analysis = Some(AnalysisDoc::new(&r));
    doc.outcome = json!({
        "kind": "noninterf",
        "mode": match a.mode { ModeArg::Agreement => "agreement", ModeArg::Bad => "bad" },
        "bad": a.bad,
        "n_name": a.n_name,
    });
    print_analysis(&a.out, &r);
    emit(&a.out, &doc)?;
    Ok(analysis_exit(&r))
}

fn outcome_str<'a>(doc: &'a ResultDocument, key: &str) -> Option<&'a str> {
    doc.outcome.get(key).and_then(|v| v.as_str())
}

fn verify(a: VerifyArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let stored = ResultDocument::from_json(&std::fs::read_to_string(&a.result).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", a.result.display())))
    })?)?;
    if stored.model_sha256 != timed_ni::format::sha256_hex(text.as_bytes()) {
        eprintln!("warning: {} was computed for a different model file", a.result.display());
    }
    let analysis = stored
        .analysis
        .as_ref()
        .ok_or_else(|| Error::Usage("the result document carries no constraint".into()))?;
    let constraint = analysis.constraint_set()?;
    let samples = parse_grid(&a.grid)?;
    let opts = concrete_opts(a.depth_limit)?;
    let report = match outcome_str(&stored, "kind") {
        Some("noninterf") => {
            let n_name = outcome_str(&stored, "n_name").unwrap_or("n");
            let mode = match outcome_str(&stored, "bad") {
                Some(b) => NiMode::Bad(net.parse_target(b)?),
                None => NiMode::Agreement,
            };
            sample_and_verify(net, &mode, &constraint, n_name, &samples, &opts)?
        }
        Some(kind @ ("ef" | "safety")) => {
            let target = net.parse_target(outcome_str(&stored, "target").unwrap_or_default())?;
            reach_samples(net, kind == "safety", &target, &constraint, &samples, &opts)?
        }
        _ => return Err(Error::Usage("unrecognized result document".into())),
    };
    let mut doc = ResultDocument::new(argv, &text);
    doc.outcome = serde_json::to_value(&report)?;
    if !json_to_stdout(&a.out) {
        say!(
            "{} agreements, {} disagreements, {} unknown",
            report.agreements,
            report.disagreements.len(),
            report.unknowns.len()
        );
        for d in &report.disagreements {
            let side = if d.inside { "inside" } else { "outside" };
            say!("  disagreement at {}: {side}, concrete check {:?}", d.valuation, d.verdict);
        }
    }
    emit(&a.out, &doc)?;
    Ok(if !report.disagreements.is_empty() {
        if analysis.complete {
            1
        } else {
            2
        }
    } else if !report.unknowns.is_empty() {
        2
    } else {
        0
    })
}

/// Membership in an `ef`/`safety` result against concrete reachability.
fn reach_samples(
    net: &Network,
    safety: bool,
    target: &timed_ni::pta::Target,
    constraint: &timed_ni::constraint::ConstraintSet,
    samples: &[Valuation],
    opts: &ConcreteOptions,
) -> Result<timed_ni::noninterf::SampleReport> {
    use timed_ni::noninterf::{SampleOutcome, SampleReport};
    let mut report = SampleReport::default();
    for v in samples {
        let inside = constraint.satisfies(v)?;
        let r = reachable_locations(&net.instantiate(v)?, opts)?;
        let hit = r.locations.iter().any(|l| target.matches(l));
        // "yes" means the valuation belongs in the exact answer
        let verdict = match (hit, r.complete) {
            (true, _) => if safety { Verdict::No } else { Verdict::Yes },
            (false, true) => if safety { Verdict::Yes } else { Verdict::No },
            (false, false) => Verdict::Unknown,
        };
        let outcome = SampleOutcome {
            valuation: v.to_string(),
            inside,
            verdict,
        };
        match verdict {
            Verdict::Unknown => report.unknowns.push(outcome),
            Verdict::Yes if inside => report.agreements += 1,
            Verdict::No if !inside => report.agreements += 1,
            _ => report.disagreements.push(outcome),
        }
    }
    Ok(report)
}

fn replay_cmd(a: ReplayArgs, argv: Vec<String>) -> Result<u8> {
    let (text, model) = load(&a.model)?;
    let net = &model.network;
    let val = parameter_valuation(net, &a.valuation)?;
    let run_text = std::fs::read_to_string(&a.run).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", a.run.display())))
    })?;
    let run = ConcreteRun::from_json(&run_text)?;
    let inst = net.instantiate(&val)?;
    let r = replay(&inst, &run)?;
    let last = inst.loc_name(r.last_locations());
    let mut doc = ResultDocument::new(argv, &text);
    doc.outcome = json!({
        "legal": r.is_legal(),
        "failure": r.failure,
        "steps_replayed": r.states.len() - 1,
        "final_locations": last,
    });
    if !json_to_stdout(&a.out) {
        match &r.failure {
            None => say!("legal, ends in {last}"),
            Some(f) => say!("illegal after {} steps: {f}", r.states.len() - 1),
        }
    }
    emit(&a.out, &doc)?;
    Ok(if r.is_legal() { 0 } else { 1 })
}
