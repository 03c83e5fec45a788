//! The worked examples and finite checks, runnable from the command line
//! (`paper-examples`) and from the acceptance tests.

mod agree;
mod det;
mod lattices;

pub use agree::{agreement_sweep, AgreementStats};
pub use det::{first_unbranchable, ltl_det_sweep, DetStats};
pub use lattices::{all_closures, lattice_sweep, random_monotone, small_lattices, LatticeStats};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::completeness::{
    complete_core, complete_shell, find_incompleteness, is_complete, max_preimages, FnSet,
};
use crate::fixtures;
use crate::kripke::{total_systems_up_to, StateSet, TransitionSystem, DEFAULT_SUBSET_CAP};
use crate::mucalc::{is_branchable, parse_formula, state_sem, trace_sem, Formula};
use crate::shells::{
    alpha_bidirectional, check_complete, core_negation, core_next, core_reversal, core_union,
    default_past_depth, gamma_bidirectional, rho_forall, sample_sets, shell_all, shell_for_ops,
    shell_union, witness_f_shell, witness_neg_shell, Op, ShellError, ShiftedProjections,
    TwoSidedSequence, WindowSet, DEFAULT_MEMBER_CAP,
};
use crate::traces::{Bounds, Model, PathScope, TraceError, TraceSet, DEFAULT_SLACK};

/// Bounds for the reversal sweep over all small systems: large enough for
/// every state of a three-state system to carry interior traces, small
/// enough to enumerate 273 universes quickly.
pub const REVERSAL_SWEEP_BOUNDS: Bounds = Bounds {
    loop_len: 3,
    middle_len: 2,
    offset: 1,
    present: 1,
};
pub const REVERSAL_SWEEP_SLACK: i64 = 3;

/// Word bounds for the deterministic-fragment sweep.
pub const DET_PREFIX: usize = 4;
pub const DET_LOOP: usize = 4;
/// Random draws per system for the constant closures; each draw adds three
/// sets, so every system sees over a thousand random sets.
pub const RANDOM_SAMPLES: usize = 334;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("universe too small for fixture {fixture}: {reason}")]
    UniverseTooSmall { fixture: String, reason: String },
    #[error("fixture {fixture}: {message}")]
    Fixture { fixture: String, message: String },
    /// An engine refused a computation; the criterion fails.
    #[error("{0}")]
    Engine(String),
}

fn engine(e: impl fmt::Display) -> SuiteError {
    SuiteError::Engine(e.to_string())
}

fn fixture_error(fixture: &str) -> impl Fn(&dyn fmt::Display) -> SuiteError + '_ {
    move |e| SuiteError::Fixture {
        fixture: fixture.into(),
        message: e.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub bounds: Bounds,
    /// Raise the loop bound (and the slack with it) per fixture until every
    /// state lies on a model path. Off when bounds were given explicitly.
    pub fit_loops: bool,
    pub slack: i64,
    /// Past depth of the sequence abstractions; derived from the bounds when unset.
    pub past_depth: Option<usize>,
    pub cap: usize,
    /// Radius of the witness window.
    pub window: i64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bounds: Bounds::default(),
            fit_loops: true,
            slack: DEFAULT_SLACK,
            past_depth: None,
            cap: DEFAULT_SUBSET_CAP,
            window: 8,
        }
    }
}

impl SuiteConfig {
    /// Bounds and slack used for `ts`.
    pub fn bounds_for(&self, ts: &TransitionSystem) -> (Bounds, i64) {
        let mut bounds = self.bounds;
        let mut slack = self.slack;
        if self.fit_loops {
            if let Some(needed) = ts.covering_loop_len() {
                bounds.loop_len = bounds.loop_len.max(needed);
            }
            slack = slack.max(bounds.offset + bounds.loop_len as i64 - bounds.present);
        }
        (bounds, slack)
    }

    pub fn depth_for(&self, bounds: Bounds) -> usize {
        self.past_depth
            .unwrap_or_else(|| default_past_depth(bounds))
    }

    /// The model of a fixture, rejecting universes where some state has too
    /// few traces or the model is not shift-closed on the interior.
    pub fn model(&self, fixture: &str, ts: &TransitionSystem) -> Result<Model, SuiteError> {
        let (bounds, slack) = self.bounds_for(ts);
        let too_small = |reason: String| SuiteError::UniverseTooSmall {
            fixture: fixture.into(),
            reason,
        };
        let model = Model::build(ts, bounds, slack, PathScope::Model).map_err(|e| match e {
            TraceError::NotTotal => fixture_error(fixture)(&e),
            other => too_small(format!("{other} (bounds {bounds}, slack {slack})")),
        })?;
        let report = model.check_hypothesis();
        if !report.passed() {
            return Err(too_small(format!(
                "{} (bounds {bounds}, slack {slack})",
                report.failures.join("; ")
            )));
        }
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "pass" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "two-state example, G p | F G q"),
    (2, "squaring core of Sign+"),
    (3, "Sign for addition and multiplication"),
    (4, "next-time core full iff injective"),
    (5, "reversal core full iff symmetric"),
    (6, "traffic lights"),
    (7, "next of previous, two-sided abstraction"),
    (8, "constant shells and cores"),
    (9, "witness windows for negation and F"),
    (10, "deterministic fragment is branchable"),
    (11, "trace engines agree"),
    (12, "shells and cores are extremal on small lattices"),
];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn system(name: &str, text: &str) -> Result<TransitionSystem, SuiteError> {
    fixtures::system(text).map_err(|e| fixture_error(name)(&e))
}

fn formula(name: &str, text: &str) -> Result<Formula, SuiteError> {
    parse_formula(text.trim()).map_err(|e| fixture_error(name)(&e))
}

fn first_example(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let ts = system("two_state.ts", fixtures::TWO_STATE)?;
    let m = cfg.model("two_state.ts", &ts)?;
    let phi = formula("first.ltl", fixtures::FIRST_FORMULA)?;
    let inner = m.traces().intersection(&m.universe().interior());
    let sem = trace_sem(&phi, &m).map_err(engine)?;
    let covers = sem.intersection(&inner) == inner;
    let b = is_branchable(&phi, &m).map_err(engine)?;
    let passed =
        covers && b.abstracted == ts.all() && b.state == StateSet::singleton(1) && !b.branchable();
    Ok(Outcome::new(
        passed,
        format!(
            "model traces satisfy it: {}; alpha = {}; state = {}; branchable: {}",
            yes_no(covers),
            ts.show_set(b.abstracted),
            ts.show_set(b.state),
            yes_no(b.branchable())
        ),
    ))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn sign_plus_core() -> Result<Outcome, SuiteError> {
    let name = "sign_plus.lat";
    let file = fixtures::lattice(fixtures::SIGN_PLUS).map_err(|e| fixture_error(name)(&e))?;
    let missing = |what: &str| SuiteError::Fixture {
        fixture: name.into(),
        message: format!("missing {what}"),
    };
    let rho = file
        .domain("Sign+")
        .ok_or_else(|| missing("domain Sign+"))?;
    let sq = file.function("sq").ok_or_else(|| missing("function sq"))?;
    let lat = &file.lattice;
    let report = complete_core(rho, &FnSet::single(lat, sq.clone())).map_err(engine)?;
    let result = file.domain_named(&report.result).unwrap_or("(unnamed)");
    let interval = lat.parse_elem("[0,9]").map_err(engine)?;
    let preimage = max_preimages(lat, sq, interval);
    let expected_preimage = vec![lat.parse_elem("[-3,3]").map_err(engine)?];
    let passed = result == "Sign"
        && report.removed() == BTreeSet::from([interval])
        && preimage == expected_preimage;
    let shown: Vec<String> = preimage.iter().map(|&x| lat.show(x)).collect();
    let removed: Vec<String> = report.removed().iter().map(|&x| lat.show(x)).collect();
    Ok(Outcome::new(
        passed,
        format!(
            "result = {result}; removed [{}]; max preimage of [0,9] is {}",
            removed.join(", "),
            shown.join(", ")
        ),
    ))
}

fn sign_arithmetic() -> Result<Outcome, SuiteError> {
    let name = "sign.lat";
    let file = fixtures::lattice(fixtures::SIGN).map_err(|e| fixture_error(name)(&e))?;
    let missing = |what: &str| SuiteError::Fixture {
        fixture: name.into(),
        message: format!("missing {what}"),
    };
    let rho = file.domain("Sign").ok_or_else(|| missing("domain Sign"))?;
    let add = file
        .function("add")
        .ok_or_else(|| missing("function add"))?;
    let mult = file
        .function("mult")
        .ok_or_else(|| missing("function mult"))?;
    let lat = &file.lattice;
    let witness =
        find_incompleteness(rho, add, crate::completeness::DEFAULT_TUPLE_CAP).map_err(engine)?;
    let expected = vec![
        lat.parse_elem("{-1}").map_err(engine)?,
        lat.parse_elem("{1}").map_err(engine)?,
    ];
    let mult_complete = is_complete(rho, mult).map_err(engine)?;
    let shell = complete_shell(rho, &FnSet::single(lat, mult.clone())).map_err(engine)?;
    let direct = rho.apply(add.apply(lat, &expected));
    let through = rho.apply(add.apply(lat, &[rho.apply(expected[0]), rho.apply(expected[1])]));
    let classic = direct != through;
    let passed = witness.is_some() && classic && mult_complete && shell.rounds.is_empty();
    let add_text = witness.map_or("complete".to_string(), |w| {
        format!("incomplete, first found at {}", w.describe(lat))
    });
    Ok(Outcome::new(
        passed,
        format!(
            "add: {add_text}; at ({{-1}}, {{1}}): {} versus {}; mult: {}",
            lat.show(direct),
            lat.show(through),
            if mult_complete {
                "complete"
            } else {
                "incomplete"
            }
        ),
    ))
}

fn injective_sweep(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let mut systems = 0;
    let mut mismatches = Vec::new();
    for ts in total_systems_up_to(3) {
        systems += 1;
        let full = ts.core_next_states(cfg.cap).map_err(engine)?.len() == 1 << ts.size();
        if full != ts.is_injective() {
            mismatches.push(ts.to_text().replace('\n', "; "));
        }
    }
    Ok(Outcome::new(
        mismatches.is_empty(),
        format!(
            "{systems} systems, {} mismatches{}",
            mismatches.len(),
            first_of(&mismatches)
        ),
    ))
}

fn first_of(items: &[String]) -> String {
    items
        .first()
        .map_or(String::new(), |s| format!(" (first: {s})"))
}

fn symmetric_sweep() -> Result<Outcome, SuiteError> {
    let mut systems = 0;
    let mut mismatches = Vec::new();
    for ts in total_systems_up_to(3) {
        systems += 1;
        let name = format!("system #{systems}");
        let m = Model::build(
            &ts,
            REVERSAL_SWEEP_BOUNDS,
            REVERSAL_SWEEP_SLACK,
            PathScope::Model,
        )
        .map_err(|e| SuiteError::UniverseTooSmall {
            fixture: name.clone(),
            reason: e.to_string(),
        })?;
        let full = core_reversal(&m).map_err(engine)? == rho_forall(&m);
        if full != ts.is_symmetric() {
            mismatches.push(ts.to_text().replace('\n', "; "));
        }
    }
    Ok(Outcome::new(
        mismatches.is_empty(),
        format!(
            "{systems} systems at bounds {REVERSAL_SWEEP_BOUNDS}, {} mismatches{}",
            mismatches.len(),
            first_of(&mismatches)
        ),
    ))
}

fn member_count(rho: Result<crate::shells::TraceUco, ShellError>) -> Result<usize, SuiteError> {
    Ok(rho
        .map_err(engine)?
        .members(DEFAULT_MEMBER_CAP)
        .map_err(engine)?
        .len())
}

fn traffic_lights(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let light = system("traffic_light.ts", fixtures::TRAFFIC_LIGHT)?;
    let abstract_light = system(
        "traffic_light_abstract.ts",
        fixtures::TRAFFIC_LIGHT_ABSTRACT,
    )?;
    let lm = cfg.model("traffic_light.ts", &light)?;
    let am = cfg.model("traffic_light_abstract.ts", &abstract_light)?;
    let depth = |m: &Model| cfg.depth_for(m.universe().bounds());
    let light_next = member_count(core_next(&lm, cfg.cap, depth(&lm)))?;
    let light_rev = member_count(core_reversal(&lm))?;
    let abs_next = member_count(core_next(&am, cfg.cap, depth(&am)))?;
    let abs_rev = core_reversal(&am).map_err(engine)?;
    let abs_rev_full = abs_rev == rho_forall(&am);
    let passed = light.is_injective()
        && light_next == 8
        && light_rev == 1
        && !abstract_light.is_injective()
        && abs_next == 2
        && abs_rev_full;
    Ok(Outcome::new(
        passed,
        format!(
            "light: next core {light_next} sets, reversal core {light_rev}; \
             abstract: next core {abs_next} sets, reversal core full: {}",
            yes_no(abs_rev_full)
        ),
    ))
}

fn next_of_previous(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let ts = system("two_state.ts", fixtures::TWO_STATE)?;
    let m = cfg.model("two_state.ts", &ts)?;
    let u = m.universe();
    let inner = u.interior();
    let written = formula("next_prev.ltl", fixtures::NEXT_PREV_FORMULA)?;
    let phi = Formula::atom("p").prev().next();
    let sem = trace_sem(&phi, &m).map_err(engine)?;
    let same_meaning = trace_sem(&written, &m)
        .map_err(engine)?
        .intersection(&inner)
        == sem.intersection(&inner);
    let state = state_sem(&phi, &m).map_err(engine)?;
    let alpha = m.alpha_forall(&sem);

    let proj = ShiftedProjections::new(&m, cfg.depth_for(u.bounds()));
    let p = trace_sem(&Formula::atom("p"), &m).map_err(engine)?;
    let p_state = ts.label("p").unwrap_or(StateSet::EMPTY);
    let threshold = |x: &TraceSet| {
        let table = alpha_bidirectional(&proj, x);
        let from = table.range().find(|&z| table.at(z) == p_state);
        let clean = from.is_some_and(|k| {
            table
                .range()
                .all(|z| table.at(z) == if z >= k { p_state } else { StateSet::EMPTY })
        });
        from.filter(|_| clean)
    };
    let table_p = threshold(&p);
    let table_prev = threshold(&u.prev(&p));

    // stepwise abstract evaluation of next(prev(p))
    let two_sided = |x: &TraceSet| alpha_bidirectional(&proj, x);
    let step =
        |a: TwoSidedSequence, op: Op| two_sided(&op.apply(&m, &gamma_bidirectional(&m, &proj, &a)));
    let stepwise = step(step(two_sided(&p), Op::Prev), Op::Next);
    let bidirectional_exact = stepwise == two_sided(&sem);
    let forall = |s: StateSet, op: Op| m.alpha_forall(&op.apply(&m, &m.gamma_forall(s)));
    let forall_stepwise = forall(forall(m.alpha_forall(&p), Op::Prev), Op::Next);
    let passed = same_meaning
        && state.is_empty()
        && alpha == p_state
        && table_p == Some(0)
        && table_prev == Some(-1)
        && bidirectional_exact
        && stepwise.at(0) == alpha
        && forall_stepwise != alpha;
    let show_threshold = |t: Option<i64>| t.map_or("none".to_string(), |k| k.to_string());
    Ok(Outcome::new(
        passed,
        format!(
            "state = {}; alpha = {}; threshold for p {}, after prev {}; two-sided stepwise gives {}, \
             universal stepwise gives {}",
            ts.show_set(state),
            ts.show_set(alpha),
            show_threshold(table_p),
            show_threshold(table_prev),
            ts.show_set(stepwise.at(0)),
            ts.show_set(forall_stepwise)
        ),
    ))
}

fn constant_closures(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let mut problems = Vec::new();
    let mut checked = 0;
    for (name, text) in fixtures::SYSTEMS {
        let ts = system(name, text)?;
        if !ts.is_total() {
            continue;
        }
        let m = cfg.model(name, &ts)?;
        let u = m.universe();
        let sample = sample_sets(&m, &rho_forall(&m), RANDOM_SAMPLES);
        let reach = m.traces().union(&u.reverse(m.traces()));
        let (cu, cn, su, sa) = (
            core_union(&m),
            core_negation(&m),
            shell_union(&m),
            shell_all(&m),
        );
        for x in &sample {
            checked += 1;
            if !cu.same(&cu.apply(x), &u.empty()) || !cn.same(&cn.apply(x), &u.empty()) {
                problems.push(format!("{name}: a core keeps part of a set"));
            }
            if !su.same(&su.apply(x), &x.intersection(m.traces()))
                || !sa.same(&sa.apply(x), &x.intersection(&reach))
            {
                problems.push(format!("{name}: a shell is not restriction"));
            }
        }
        let complete = [
            (&cu, Op::Union),
            (&cn, Op::Negation),
            (&su, Op::Union),
            (&sa, Op::Union),
            (&sa, Op::Reverse),
        ];
        for (rho, op) in complete {
            if let Some(w) = check_complete(&m, rho, op, &sample) {
                problems.push(format!("{name}: incomplete for {op}: {w}"));
            }
        }
        for op in [Op::Negation, Op::Eventually] {
            if !matches!(
                shell_for_ops(&m, &BTreeSet::from([op]), 1),
                Err(ShellError::NoShell { .. })
            ) {
                problems.push(format!("{name}: a shell for {op} was reported"));
            }
        }
    }
    Ok(Outcome::new(
        problems.is_empty(),
        format!(
            "{checked} sets over {} systems, {} problems{}",
            fixtures::SYSTEMS.len() - 1,
            problems.len(),
            first_of(&problems)
        ),
    ))
}

fn witness_windows(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    if !(2..=crate::shells::MAX_RADIUS).contains(&cfg.window) {
        return Err(SuiteError::Engine(format!(
            "window radius {} outside [2, {}]",
            cfg.window,
            crate::shells::MAX_RADIUS
        )));
    }
    let w = cfg.window;
    let full = WindowSet(crate::shells::Window::new(w).full());
    let neg = witness_neg_shell(w);
    let f = witness_f_shell(w);
    let top = WindowSet(1 << (2 * w));
    let neg_ok = neg.all_complete() && neg.join == vec![WindowSet(0), full] && !neg.forall.complete;
    let f_ok = f.all_complete() && f.join == vec![WindowSet(0), top, full] && !f.forall.complete;
    let describe = |r: &crate::shells::WitnessReport| -> String {
        match r.closures.iter().find(|c| !c.complete) {
            None => format!(
                "all {} closures complete, join {}",
                r.closures.len(),
                r.show_join()
            ),
            Some(c) => {
                let (x, direct, through) = c.witness.expect("incomplete closures carry a witness");
                format!(
                    "closure {} incomplete at {}: {} versus {}",
                    c.closure,
                    x.show(w),
                    direct.show(w),
                    through.show(w)
                )
            }
        }
    };
    Ok(Outcome::new(
        neg_ok && f_ok,
        format!("window {w}; neg: {}; F: {}", describe(&neg), describe(&f)),
    ))
}

fn deterministic_fragment() -> Result<Outcome, SuiteError> {
    let stats = ltl_det_sweep(3, 3, DET_PREFIX, DET_LOOP);
    let first = stats
        .failures
        .first()
        .map(|(ts, phi)| format!("{phi} on {}", ts.replace('\n', "; ")));
    Ok(Outcome::new(
        stats.failures.is_empty(),
        format!(
            "{} systems, {} formulas in {} classes up to depth 3, {} not branchable{}",
            stats.systems,
            stats.candidates,
            stats.classes,
            stats.failures.len(),
            first.map_or(String::new(), |f| format!(" (first: {f})"))
        ),
    ))
}

fn engine_agreement(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let ts = system("two_state.ts", fixtures::TWO_STATE)?;
    let m = cfg.model("two_state.ts", &ts)?;
    let stats = agreement_sweep(&m, &["p", "q"], 3).map_err(engine)?;
    Ok(Outcome::new(
        stats.mismatches.is_empty(),
        format!(
            "{} formulas in {} classes up to depth 3 on {} traces, {} mismatches{}",
            stats.candidates,
            stats.classes,
            stats.traces,
            stats.mismatches.len(),
            first_of(&stats.mismatches)
        ),
    ))
}

fn lattice_extremality() -> Result<Outcome, SuiteError> {
    let stats = lattice_sweep(6, 4, 0x1a77);
    Ok(Outcome::new(
        stats.failures.is_empty(),
        format!(
            "{} lattices, {} maps, {} closure/map pairs, {} failures{}",
            stats.lattices,
            stats.functions,
            stats.cases,
            stats.failures.len(),
            first_of(&stats.failures)
        ),
    ))
}

/// Runs one criterion. Engine failures count as a failed criterion; a
/// universe that cannot hold a fixture is an input error.
pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CriterionResult, SuiteError> {
    let (_, title) = *CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .ok_or_else(|| SuiteError::Engine(format!("no criterion {id}")))?;
    let outcome = match id {
        1 => first_example(cfg),
        2 => sign_plus_core(),
        3 => sign_arithmetic(),
        4 => injective_sweep(cfg),
        5 => symmetric_sweep(),
        6 => traffic_lights(cfg),
        7 => next_of_previous(cfg),
        8 => constant_closures(cfg),
        9 => witness_windows(cfg),
        10 => deterministic_fragment(),
        11 => engine_agreement(cfg),
        _ => lattice_extremality(),
    };
    let outcome = match outcome {
        Err(SuiteError::Engine(message)) => Outcome::new(false, format!("error: {message}")),
        other => other?,
    };
    Ok(CriterionResult {
        id,
        title,
        passed: outcome.passed,
        detail: outcome.detail,
    })
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CriterionResult>, SuiteError> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loops_are_fitted_per_fixture() {
        let cfg = SuiteConfig::default();
        let light = fixtures::system(fixtures::TRAFFIC_LIGHT).unwrap();
        let (bounds, slack) = cfg.bounds_for(&light);
        assert_eq!(bounds.loop_len, 3);
        assert!(slack >= DEFAULT_SLACK);
        let fixed = SuiteConfig {
            fit_loops: false,
            ..cfg
        };
        let err = fixed.model("traffic_light.ts", &light).unwrap_err();
        assert!(
            err.to_string()
                .starts_with("universe too small for fixture traffic_light.ts"),
            "{err}"
        );
    }

    #[test]
    fn quick_criteria() {
        let cfg = SuiteConfig::default();
        for id in [1, 2, 3, 6, 7] {
            let r = run_criterion(id, &cfg).unwrap();
            assert!(r.passed, "{r}");
        }
    }
}
