//! The `shellcore` command line.
//!
//! Exit codes: 0 when every verdict matches, 1 on a verdict mismatch, 2 on
//! an input error (unreadable or malformed files, bad flags, universes too
//! small for the system).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::completeness::{complete_core, complete_shell, CompletenessError, FnSet};
use crate::kripke::{StateSet, TransitionSystem, DEFAULT_SUBSET_CAP};
use crate::lattice::parse_lat;
use crate::mucalc::{is_branchable, is_ltl_det, parse_formula, state_sem, trace_sem, Formula};
use crate::report::{Format, Report};
use crate::shells::{
    core_next, core_reversal, rho_forall, shell_for_ops, witness_f_shell, witness_neg_shell, Op,
    ShellError, WitnessReport, DEFAULT_MEMBER_CAP, MAX_RADIUS,
};
use crate::suite::{run_criterion, SuiteConfig, SuiteError, CRITERIA};
use crate::traces::{Bounds, Model, DEFAULT_SLACK};

#[derive(Parser, Debug)]
#[command(
    name = "shellcore",
    version,
    about = "Completeness of abstract domains and of universal model checking"
)]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Trace bounds `L,B,O,I`: loop length, middle length, offset, interior presents.
    /// Defaults to 2,4,3,3 with the loop length raised to fit each system.
    #[arg(long, global = true, value_parser = parse_bounds)]
    bounds: Option<Bounds>,
    /// Presents beyond the interior kept to make shifts exact there.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(1..))]
    slack: Option<i64>,
    /// Past depth of the shift abstractions (default: 2*O + 1 + L).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Largest state count for subset enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_SUBSET_CAP)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Totalize a system and report which trace closures are complete for it.
    Analyze {
        system: PathBuf,
        /// Also compute the complete shell for these operators (union, neg, next, prev, rev, F).
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
    },
    /// Compare trace and state semantics of a formula on a system.
    Check {
        system: PathBuf,
        #[arg(
            long,
            conflicts_with = "formula_file",
            required_unless_present = "formula_file"
        )]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Exit with 1 unless the branchability verdict is this one.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Compute a complete shell or core on a finite lattice.
    Shellcore {
        lattice: PathBuf,
        /// Functions to be complete for (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        function: Vec<String>,
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Finite-window witnesses for operators without a complete shell.
    Witness {
        #[arg(value_enum)]
        operator: WitnessOp,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(2..=MAX_RADIUS))]
        window: i64,
    },
    /// Run every worked example and finite check.
    #[command(name = "paper-examples")]
    Examples {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(2..=MAX_RADIUS))]
        window: i64,
        /// Run only these criteria (comma separated numbers).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Branchable,
    NotBranchable,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Shell,
    Core,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WitnessOp {
    Neg,
    #[value(name = "F")]
    Eventually,
}

fn parse_bounds(text: &str) -> Result<Bounds, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [l, b, o, i] = parts[..] else {
        return Err("expected four comma-separated numbers L,B,O,I".into());
    };
    let num = |s: &str, what: &str| {
        s.parse::<i64>()
            .map_err(|_| format!("{what} `{s}` is not an integer"))
    };
    let (l, b, o, i) = (
        num(l, "loop length")?,
        num(b, "middle length")?,
        num(o, "offset")?,
        num(i, "interior")?,
    );
    if l < 1 || b < 0 || o < 0 || i < 0 {
        return Err("the loop length must be positive and the other bounds non-negative".into());
    }
    Ok(Bounds {
        loop_len: l as usize,
        middle_len: b as usize,
        offset: o,
        present: i,
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Suite(#[from] SuiteError),
}

fn input(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// What a command printed and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses arguments (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                CliOutput {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let format = match cli.common.format {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    };
    match execute(&cli) {
        Ok((report, ok)) => CliOutput {
            stdout: report.render(format),
            stderr: String::new(),
            code: if ok { 0 } else { 1 },
        },
        Err(e) => CliOutput {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 2,
        },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn config(common: &Common, window: i64) -> SuiteConfig {
    let mut cfg = SuiteConfig {
        slack: common.slack.unwrap_or(DEFAULT_SLACK),
        past_depth: common.depth,
        cap: common.cap,
        window,
        ..SuiteConfig::default()
    };
    if let Some(bounds) = common.bounds {
        cfg.bounds = bounds;
        cfg.fit_loops = false;
    }
    cfg
}

fn execute(cli: &Cli) -> Result<(Report, bool), CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Analyze { system, ops } => analyze(common, system, ops),
        Command::Check {
            system,
            formula,
            formula_file,
            expect,
        } => {
            let text = match (formula, formula_file) {
                (Some(f), _) => f.clone(),
                (None, Some(path)) => read(path)?,
                (None, None) => {
                    return Err(CliError::Input("give --formula or --formula-file".into()))
                }
            };
            check(common, system, text.trim(), *expect)
        }
        Command::Shellcore {
            lattice,
            function,
            domain,
            mode,
        } => shellcore(lattice, function, domain, *mode),
        Command::Witness { operator, window } => Ok(witness(*operator, *window)),
        Command::Examples { window, only } => examples(&config(common, *window), only),
    }
}

fn load_system(path: &Path) -> Result<(TransitionSystem, Vec<usize>), CliError> {
    let ts = TransitionSystem::parse(&read(path)?).map_err(input)?;
    let totalized = ts.totalize();
    Ok((totalized.system, totalized.added_loops))
}

/// `{∅, {1,2}}`-style rendering of a list of state sets.
fn show_sets(ts: &TransitionSystem, sets: &[StateSet]) -> String {
    let parts: Vec<String> = sets.iter().map(|&s| show_states(ts, s)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn show_states(ts: &TransitionSystem, s: StateSet) -> String {
    if s.is_empty() {
        "∅".to_string()
    } else {
        ts.show_set(s)
    }
}

fn universe_line(report: &mut Report, model: &Model) {
    let u = model.universe();
    let inner = model.traces().intersection(&u.interior()).count();
    report
        .line(format!(
            "universe: bounds {} slack {}, {} traces, {} interior model traces",
            u.bounds(),
            u.slack(),
            u.len(),
            inner
        ))
        .field("bounds", u.bounds().to_string())
        .field("slack", u.slack())
        .field("traces", u.len())
        .field("interior_model_traces", inner);
}

fn totalization_line(report: &mut Report, ts: &TransitionSystem, added: &[usize]) {
    let names: Vec<String> = added.iter().map(|&s| ts.name(s).to_string()).collect();
    if names.is_empty() {
        report.line("totalized: already total");
    } else {
        report.line(format!(
            "totalized: added self-loops at {}",
            names.join(", ")
        ));
    }
    report.field("added_self_loops", names);
}

fn analyze(common: &Common, path: &Path, ops: &[String]) -> Result<(Report, bool), CliError> {
    let (ts, added) = load_system(path)?;
    let name = file_name(path);
    let cfg = config(common, 8);
    let mut r = Report::new("analyze", name.clone());
    r.line(format!(
        "system: {name} ({} states, {} edges)",
        ts.size(),
        ts.edges().count()
    ));
    totalization_line(&mut r, &ts, &added);
    let model = cfg.model(&name, &ts)?;
    universe_line(&mut r, &model);
    let hypothesis = model.check_hypothesis();
    r.line(format!(
        "hypothesis: holds ({} interior model traces per state at least)",
        hypothesis.counts.iter().map(|c| c.1).min().unwrap_or(0)
    ));
    r.verdict(
        "hypothesis",
        hypothesis.passed(),
        hypothesis.failures.join("; "),
    );

    let injective = ts.is_injective();
    let symmetric = ts.is_symmetric();
    let yes = |b: bool| if b { "yes" } else { "no" };
    let complete = |b: bool| if b { "complete" } else { "incomplete" };
    r.line(format!(
        "injective: {} ⇒ ρ∀ {} for next-time",
        yes(injective),
        complete(injective)
    ));
    r.line(format!(
        "symmetric: {} ⇒ ρ∀ {} for reversal",
        yes(symmetric),
        complete(symmetric)
    ));
    r.verdict("injective", injective, "")
        .verdict("symmetric", symmetric, "");

    let kept = ts.core_next_states(cfg.cap).map_err(input)?;
    r.line(format!("core_next states: {}", show_sets(&ts, &kept)));
    r.field(
        "core_next_states",
        kept.iter()
            .map(|&s| show_states(&ts, s))
            .collect::<Vec<_>>(),
    );
    let full = 1usize << ts.size();
    let depth = cfg.depth_for(model.universe().bounds());
    let mut ok = true;
    let describe = |count: usize| {
        if count == full {
            format!("ρ∀ itself ({count} sets)")
        } else if count == 2 {
            "trivial {∅, M}".to_string()
        } else if count == 1 {
            "trivial {∅}".to_string()
        } else {
            format!("{count} of {full} sets")
        }
    };
    match core_next(&model, cfg.cap, depth) {
        Ok(core) => {
            let n = core.members(DEFAULT_MEMBER_CAP).map_err(input)?.len();
            r.line(format!("core for next-time: {}", describe(n)));
            r.field("core_next_size", n);
            if (n == full) != injective {
                ok = false;
                r.line("mismatch: next-time core and injectivity disagree");
            }
        }
        Err(e @ ShellError::CrossCheck(_)) => {
            ok = false;
            r.line(format!("core for next-time: {e}"));
        }
        Err(e) => return Err(input(e)),
    }
    let rev = core_reversal(&model).map_err(input)?;
    let rev_size = rev.members(DEFAULT_MEMBER_CAP).map_err(input)?.len();
    let rev_full = rev == rho_forall(&model);
    r.line(format!("core for reversal: {}", describe(rev_size)));
    r.field("core_reversal_size", rev_size);
    if rev_full != symmetric {
        ok = false;
        r.line("mismatch: reversal core and symmetry disagree");
    }

    if !ops.is_empty() {
        let set: BTreeSet<Op> = ops
            .iter()
            .map(|o| Op::parse(o).ok_or_else(|| CliError::Input(format!("unknown operator `{o}`"))))
            .collect::<Result<_, _>>()?;
        let names: Vec<&str> = set.iter().map(|o| o.name()).collect();
        let label = format!("shell for {{{}}}", names.join(","));
        match shell_for_ops(&model, &set, depth) {
            Ok(shell) => {
                let size = shell
                    .size(DEFAULT_MEMBER_CAP)
                    .map_or("too many to count".into(), |s| format!("{s} sets"));
                r.line(format!(
                    "{label}: {} irreducibles, {size}",
                    shell.irreducibles().len()
                ));
                r.verdict("shell", true, label);
            }
            Err(e) => {
                r.line(format!("{label}: {e}"));
                r.verdict("shell", false, e.to_string());
            }
        }
    }
    Ok((r, ok && hypothesis.passed()))
}

fn check(
    common: &Common,
    path: &Path,
    text: &str,
    expect: Option<Expect>,
) -> Result<(Report, bool), CliError> {
    let (ts, added) = load_system(path)?;
    let name = file_name(path);
    let phi: Formula = parse_formula(text).map_err(input)?;
    let model = config(common, 8).model(&name, &ts)?;
    let mut r = Report::new("check", name.clone());
    r.line(format!("system: {name}; formula: {phi}"))
        .field("formula", phi.to_string());
    totalization_line(&mut r, &ts, &added);
    universe_line(&mut r, &model);
    let sem = trace_sem(&phi, &model).map_err(input)?;
    let inner = model.traces().intersection(&model.universe().interior());
    let satisfied = sem.intersection(&inner).count();
    r.line(format!(
        "trace semantics: {} of {} traces; {} of {} interior model traces",
        sem.count(),
        model.universe().len(),
        satisfied,
        inner.count()
    ))
    .field("trace_sem_size", sem.count())
    .field("interior_model_traces_satisfying", satisfied);
    let b = is_branchable(&phi, &model).map_err(input)?;
    let state = state_sem(&phi, &model).map_err(input)?;
    debug_assert_eq!(state, b.state);
    r.line(format!("α∀ = {}", show_states(&ts, b.abstracted)))
        .line(format!("state = {}", show_states(&ts, b.state)))
        .field("alpha_forall", ts.show_set(b.abstracted))
        .field("state_sem", ts.show_set(b.state));
    let branchable = b.branchable();
    let witnesses: Vec<String> = b
        .difference()
        .iter()
        .map(|s| format!("state {}: all its model traces satisfy the formula, yet the state semantics excludes it", ts.name(s)))
        .collect();
    r.line(format!(
        "branchable: {}",
        if branchable { "YES" } else { "NO" }
    ));
    for w in &witnesses {
        r.line(format!("  witness: {w}"));
    }
    r.verdict("branchable", branchable, witnesses.join("; "));
    let det = is_ltl_det(&phi);
    r.line(format!(
        "deterministic fragment: {}",
        if det { "yes" } else { "no" }
    ));
    r.verdict("ltl_det", det, "");
    let ok = match expect {
        None => true,
        Some(e) => (e == Expect::Branchable) == branchable,
    };
    if !ok {
        r.line("mismatch: branchability differs from --expect");
    }
    Ok((r, ok))
}

fn shellcore(
    path: &Path,
    functions: &[String],
    domain: &str,
    mode: Mode,
) -> Result<(Report, bool), CliError> {
    let file = parse_lat(&read(path)?).map_err(input)?;
    let lat = &file.lattice;
    let rho = file
        .domain(domain)
        .ok_or_else(|| CliError::Input(format!("unknown domain `{domain}`")))?;
    let fs = functions
        .iter()
        .map(|f| {
            file.function(f)
                .cloned()
                .ok_or_else(|| CliError::Input(format!("unknown function `{f}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for f in &fs {
        lat.check_monotone(f, crate::lattice::DEFAULT_CHECK_CAP)
            .map_err(input)?;
    }
    let fs = FnSet::new(lat, fs).map_err(input)?;
    let mut r = Report::new("shellcore", file_name(path));
    r.line(format!("domain {domain}: {}", rho.show()));
    r.line(format!("functions: {}", functions.join(", ")));
    let result = match mode {
        Mode::Shell => complete_shell(rho, &fs),
        Mode::Core => complete_core(rho, &fs),
    };
    let report = match result {
        Ok(report) => report,
        Err(e @ CompletenessError::Unverified(..)) => {
            r.line(format!("error: {e}"));
            r.verdict("complete", false, e.to_string());
            return Ok((r, false));
        }
        Err(e) => return Err(input(e)),
    };
    for line in report.log() {
        r.line(line);
    }
    let named = file
        .domain_named(&report.result)
        .map(str::to_string)
        .unwrap_or_else(|| report.result.show());
    let show =
        |xs: BTreeSet<crate::lattice::Elem>| xs.iter().map(|&x| lat.show(x)).collect::<Vec<_>>();
    let (removed, added) = (show(report.removed()), show(report.added()));
    if report.rounds.is_empty() {
        r.line(format!("already complete; result = {named}"));
    } else if !removed.is_empty() {
        r.line(format!(
            "result = {named} (removed: {})",
            removed.join(", ")
        ));
    } else {
        r.line(format!("result = {named} (added: {})", added.join(", ")));
    }
    r.line(format!("fixpoints: {}", report.result.show()));
    r.field(
        "mode",
        match mode {
            Mode::Shell => "shell",
            Mode::Core => "core",
        },
    )
    .field("result", named)
    .field("rounds", report.rounds.len())
    .field("removed", removed)
    .field("added", added)
    .field(
        "fixpoints",
        report
            .result
            .fixpoints()
            .iter()
            .map(|&x| lat.show(x))
            .collect::<Vec<_>>(),
    );
    r.verdict("complete", true, "");
    Ok((r, true))
}

fn witness(op: WitnessOp, window: i64) -> (Report, bool) {
    let report: WitnessReport = match op {
        WitnessOp::Neg => witness_neg_shell(window),
        WitnessOp::Eventually => witness_f_shell(window),
    };
    let mut r = Report::new("witness", report.operator);
    r.line(format!(
        "operator {} on the window [-{window}, {window}] of the one-state system",
        report.operator
    ));
    for c in &report.closures {
        r.line(verdict_line(c, window));
    }
    r.line(format!("join of these closures: {}", report.show_join()));
    r.line(verdict_line(&report.forall, window).replacen("forall", "universal closure", 1));
    let sets: Vec<String> = report.join.iter().map(|s| s.show(window)).collect();
    r.field("window", window)
        .field("join", sets)
        .field("closures", report.closures.len());
    for c in &report.closures {
        r.verdict(&c.closure, c.complete, witness_detail(c, window));
    }
    r.verdict(
        "forall",
        report.forall.complete,
        witness_detail(&report.forall, window),
    );
    let ok = report.all_complete() && !report.forall.complete;
    if !ok {
        r.line("mismatch: some closure of the family is incomplete on this window");
    }
    (r, ok)
}

fn witness_detail(c: &crate::shells::ClosureVerdict, window: i64) -> String {
    c.witness.map_or(String::new(), |(x, direct, through)| {
        format!(
            "at {}: {} versus {}",
            x.show(window),
            direct.show(window),
            through.show(window)
        )
    })
}

fn verdict_line(c: &crate::shells::ClosureVerdict, window: i64) -> String {
    if c.complete {
        format!("{}: complete", c.closure)
    } else {
        format!("{}: incomplete {}", c.closure, witness_detail(c, window))
    }
}

fn examples(cfg: &SuiteConfig, only: &[u8]) -> Result<(Report, bool), CliError> {
    let ids: Vec<u8> = if only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(CliError::Input(format!("no criterion {bad}")));
    }
    let mut r = Report::new("paper-examples", "fixtures");
    let mut ok = true;
    for id in ids {
        let result = run_criterion(id, cfg)?;
        ok &= result.passed;
        r.line(result.to_string());
        r.verdict(&format!("criterion {id}"), result.passed, result.detail);
    }
    let failed = r.record.verdicts.iter().filter(|v| !v.holds).count();
    r.line(format!(
        "{} of {} criteria pass",
        r.record.verdicts.len() - failed,
        r.record.verdicts.len()
    ));
    r.field("failed", failed);
    Ok((r, ok))
}
