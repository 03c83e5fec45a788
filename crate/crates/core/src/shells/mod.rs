//! Complete cores and shells of the universal checking closure on trace
//! sets, the past and two-sided sequence abstractions that refine it for
//! next-time, and finite-window witnesses for the operators without shells.

mod past;
mod uco;
mod witness;

pub use past::{
    alpha_bidirectional, alpha_next, default_past_depth, gamma_bidirectional, gamma_next,
    shell_next, shell_next_apply, PastSequence, ShiftedProjections, TwoSidedSequence,
};
pub use uco::{Family, TraceUco, DEFAULT_MEMBER_CAP};
pub use witness::{
    witness_f_shell, witness_neg_shell, ClosureVerdict, Window, WindowClosure, WindowSet,
    WitnessReport, MAX_RADIUS,
};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::kripke::{KripkeError, StateSet};
use crate::traces::{Model, TraceSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShellError {
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("closure family has more than {0} members")]
    TooLarge(usize),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("the complete shell for {op} does not exist; see `witness {witness}`")]
    NoShell { op: Op, witness: &'static str },
    #[error("no construction for the operator set {0}")]
    Unsupported(String),
    #[error("result is not complete for {op}: {detail}")]
    Incomplete { op: Op, detail: String },
}

/// Connectives a closure can be asked to be complete for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Union,
    Negation,
    Next,
    Prev,
    Reverse,
    Eventually,
}

impl Op {
    pub const ALL: [Op; 6] = [
        Op::Union,
        Op::Negation,
        Op::Next,
        Op::Prev,
        Op::Reverse,
        Op::Eventually,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Union => "union",
            Op::Negation => "neg",
            Op::Next => "next",
            Op::Prev => "prev",
            Op::Reverse => "rev",
            Op::Eventually => "F",
        }
    }

    pub fn parse(text: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == text)
    }

    /// The operator on trace sets (identity for union, which is binary).
    pub fn apply(self, model: &Model, x: &TraceSet) -> TraceSet {
        let u = model.universe();
        match self {
            Op::Union => x.clone(),
            Op::Negation => x.complement(),
            Op::Next => u.next(x),
            Op::Prev => u.prev(x),
            Op::Reverse => u.reverse(x),
            Op::Eventually => u.until(&u.full(), x, true),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The universal checking closure as a trace closure.
pub fn rho_forall(model: &Model) -> TraceUco {
    let gens = (0..model.system().size())
        .map(|s| model.projection(s).clone())
        .collect();
    observed(model, gens)
}

/// A generated family compared on the interior of the model's universe.
fn observed(model: &Model, gens: Vec<TraceSet>) -> TraceUco {
    let u = model.universe();
    TraceUco::observed_on(u.clone(), gens, u.interior())
}

/// Complete core for next-time: the concretizations of the state sets
/// without confluent escapes, cross-checked against the stability of
/// their past shifts under the universal closure.
pub fn core_next(model: &Model, cap: usize, depth: usize) -> Result<TraceUco, ShellError> {
    let ts = model.system();
    let kept = ts.core_next_states(cap)?;
    for set in ts.subsets(cap)? {
        let stable = past_shifts_stable(model, set, depth);
        if stable != kept.contains(&set) {
            return Err(ShellError::CrossCheck(format!(
                "state set {} is {} under past shifts but {} by confluence",
                ts.show_set(set),
                if stable { "stable" } else { "unstable" },
                if kept.contains(&set) {
                    "kept"
                } else {
                    "dropped"
                }
            )));
        }
    }
    let gens = kept.iter().map(|&s| model.gamma_forall(s)).collect();
    let core = observed(model, gens);
    // every union of kept sets is again kept, so the generators are the family
    if core.members(DEFAULT_MEMBER_CAP)?.len() != kept.len() {
        return Err(ShellError::CrossCheck(
            "kept state sets are not closed under union".into(),
        ));
    }
    Ok(core)
}

/// Whether `prev^k(gamma(set))` is a union of interior projections for all `k <= depth`.
pub fn past_shifts_stable(model: &Model, set: StateSet, depth: usize) -> bool {
    let u = model.universe();
    let mut z = model.traces().intersection(&u.sigma(set));
    for _ in 0..=depth {
        let split = (0..model.system().size()).any(|s| {
            let p = model.interior_projection(s);
            !p.is_subset(&z) && !p.intersection(&z).is_empty()
        });
        if split {
            return false;
        }
        z = u.prev(&z);
    }
    true
}

pub fn core_reversal(model: &Model) -> Result<TraceUco, ShellError> {
    let rho = rho_forall(model);
    let u = model.universe();
    let kept = rho
        .members(DEFAULT_MEMBER_CAP)?
        .into_iter()
        .filter(|y| rho.is_fixpoint(&u.reverse(y)))
        .collect();
    Ok(observed(model, kept))
}

pub fn shell_reversal(model: &Model) -> TraceUco {
    rho_forall(model).meet(&rho_forall(&model.reversed()))
}

/// The pair abstraction behind the reversal shell.
pub fn alpha_reversal(model: &Model, x: &TraceSet) -> (StateSet, StateSet) {
    (model.alpha_forall(x), model.reversed().alpha_forall(x))
}

pub fn gamma_reversal(model: &Model, pair: (StateSet, StateSet)) -> TraceSet {
    model
        .gamma_forall(pair.0)
        .union(&model.reversed().gamma_forall(pair.1))
}

/// The closure that maps everything to the empty set.
pub fn core_union(model: &Model) -> TraceUco {
    observed(model, Vec::new())
}

pub fn core_negation(model: &Model) -> TraceUco {
    core_union(model)
}

pub fn shell_union(model: &Model) -> TraceUco {
    let u = model.universe();
    TraceUco::powerset_observed_on(u.clone(), model.traces().clone(), u.interior())
}

pub fn shell_all(model: &Model) -> TraceUco {
    let u = model.universe();
    TraceUco::powerset_observed_on(
        u.clone(),
        model.traces().union(&u.reverse(model.traces())),
        u.interior(),
    )
}

/// Candidate sets for completeness checks: every member of small
/// families, all state literals, the model, and seeded random sets.
///
/// Random sets decide membership from the states in a window around the
/// present, so they do not depend on where the universe is cut off and
/// one-step shifts of them stay exact on the interior. Each comes with its
/// complement and its restriction to the model.
pub fn sample_sets(model: &Model, family: &TraceUco, random: usize) -> Vec<TraceSet> {
    let u = model.universe();
    let mut out: Vec<TraceSet> = family.members(DEFAULT_MEMBER_CAP).unwrap_or_default();
    out.extend((0..1u64 << model.system().size()).map(|s| u.sigma(StateSet(s))));
    out.push(model.traces().clone());
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..random {
        let density: f64 = rng.random_range(0.05..0.95);
        let radius: i64 = rng.random_range(0..=2);
        let mut verdicts: HashMap<_, bool> = HashMap::new();
        let mut x = u.empty();
        for t in 0..u.len() {
            let at = u.present(t);
            let key = u.path(t).window(at - radius, at + radius + 1);
            if *verdicts
                .entry(key)
                .or_insert_with(|| rng.random_bool(density))
            {
                x.insert(t);
            }
        }
        out.push(x.intersection(model.traces()));
        out.push(x.complement());
        out.push(x);
    }
    out
}

/// Checks `rho(op(rho(X))) = rho(op(X))`, returning a counterexample
/// description.
///
/// The time shifts and reversal are bijections on unbounded traces, and for
/// those completeness holds exactly when the inverse sends every fixpoint to
/// a fixpoint. That is decided on the generators, where one shift stays
/// exact on the interior. The other operators are checked on `sample`
/// (pairwise for union).
pub fn check_complete(
    model: &Model,
    rho: &TraceUco,
    op: Op,
    sample: &[TraceSet],
) -> Option<String> {
    let u = model.universe();
    let inverse = |x: &TraceSet| match op {
        Op::Next => Some(u.prev(x)),
        Op::Prev => Some(u.next(x)),
        Op::Reverse => Some(u.reverse(x)),
        _ => None,
    };
    if inverse(&u.empty()).is_some() {
        let gens = match rho.family() {
            Family::Powerset(base) => vec![base.clone()],
            Family::Generated(_) => rho.irreducibles(),
        };
        return gens.iter().find_map(|g| {
            let back = inverse(g).expect("bijective operator");
            (!rho.is_fixpoint(&back)).then(|| {
                format!(
                    "a generator of {} traces pulls back to a non-fixpoint of {} traces",
                    g.count(),
                    back.count()
                )
            })
        });
    }
    if op == Op::Union {
        for (i, x) in sample.iter().enumerate() {
            for y in &sample[i..] {
                let lhs = rho.apply(&rho.apply(x).union(&rho.apply(y)));
                if !rho.same(&lhs, &rho.apply(&x.union(y))) {
                    return Some(format!("sets of sizes {} and {}", x.count(), y.count()));
                }
            }
        }
        return None;
    }
    sample.iter().find_map(|x| {
        let direct = rho.apply(&op.apply(model, x));
        let through = rho.apply(&op.apply(model, &rho.apply(x)));
        (!rho.same(&direct, &through)).then(|| {
            format!(
                "a set of {} traces: {} versus {} traces",
                x.count(),
                direct.count(),
                through.count()
            )
        })
    })
}

/// The complete shell for a set of connectives, where it exists.
pub fn shell_for_ops(
    model: &Model,
    ops: &BTreeSet<Op>,
    depth: usize,
) -> Result<TraceUco, ShellError> {
    let has = |op| ops.contains(&op);
    let shell = if has(Op::Union) {
        if has(Op::Reverse) {
            shell_all(model)
        } else {
            shell_union(model)
        }
    } else if let Some(&op) = ops
        .iter()
        .find(|op| matches!(op, Op::Negation | Op::Eventually))
    {
        let witness = if op == Op::Negation { "neg" } else { "F" };
        return Err(ShellError::NoShell { op, witness });
    } else {
        let parts: Vec<TraceUco> = ops
            .iter()
            .map(|op| match op {
                Op::Next => shell_next(model, depth),
                Op::Prev => shell_next(&model.reversed(), depth).reversed(),
                _ => shell_reversal(model),
            })
            .collect();
        parts.iter().fold(rho_forall(model), |acc, p| acc.meet(p))
    };
    let sample = sample_sets(model, &shell, 24);
    for &op in ops {
        if let Some(detail) = check_complete(model, &shell, op, &sample) {
            let names: Vec<&str> = ops.iter().map(|o| o.name()).collect();
            return Err(if ops.len() > 1 && !has(Op::Union) {
                ShellError::Unsupported(names.join(","))
            } else {
                ShellError::Incomplete { op, detail }
            });
        }
    }
    Ok(shell)
}
