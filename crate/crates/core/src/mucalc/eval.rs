use std::collections::BTreeSet;

use crate::kripke::TransitionSystem;
use crate::traces::{BiLassoTrace, Lasso, Path};

use super::{Formula, FormulaError};

pub(crate) fn resolve_edges(
    edges: &[(String, String)],
    ts: &TransitionSystem,
) -> Result<BTreeSet<(usize, usize)>, FormulaError> {
    let state = |n: &String| {
        ts.state(n)
            .ok_or_else(|| FormulaError::UnknownState(n.clone()))
    };
    edges
        .iter()
        .map(|(a, b)| Ok((state(a)?, state(b)?)))
        .collect()
}

/// Solves `Y(n) = b(n) | (a(n) & Y(n + 1))` on a lasso, least or greatest.
pub(crate) fn until_sequence(a: &Lasso<bool>, b: &Lasso<bool>, least: bool) -> Lasso<bool> {
    let ab = a.zip_with(b, |x, y| (x, y));
    let step = |n: i64, next: bool| {
        let (x, y) = ab.at(n);
        y || (x && next)
    };
    let pw = ab.right.len();
    let mut cycle = vec![!least; pw];
    for _ in 0..2 {
        for j in (0..pw).rev() {
            cycle[j] = step(ab.end() + j as i64, cycle[(j + 1) % pw]);
        }
    }
    // one left period below the offset the values repeat with the left loop
    let pu = ab.left.len() as i64;
    let from = ab.offset - 2 * pu;
    let mut values = vec![false; (ab.end() - from) as usize];
    let mut next = cycle[0];
    for n in (from..ab.end()).rev() {
        next = step(n, next);
        values[(n - from) as usize] = next;
    }
    let split = pu as usize;
    Lasso::new(
        values[..split].to_vec(),
        values[split..].to_vec(),
        cycle,
        from + pu,
    )
}

/// The truth value of `phi` at every time of `path`.
pub fn eval_sequence(
    phi: &Formula,
    path: &Path,
    ts: &TransitionSystem,
) -> Result<Lasso<bool>, FormulaError> {
    use Formula::*;
    let rec = |f: &Formula| eval_sequence(f, path, ts);
    Ok(match phi {
        True => Lasso::constant(true),
        False => Lasso::constant(false),
        Sigma(atom) => {
            let states = atom.resolve(ts)?;
            path.map(|s| states.contains(s as usize))
        }
        Pi(edges) => {
            let edges = resolve_edges(edges, ts)?;
            path.zip_with(&path.shifted(1), |a, b| {
                edges.contains(&(a as usize, b as usize))
            })
        }
        Var(_) | Mu(..) | Nu(..) => return Err(FormulaError::Unsupported("a raw fixpoint")),
        All(_) => return Err(FormulaError::Unsupported("the model quantifier")),
        Not(a) => rec(a)?.map(|x| !x),
        Or(a, b) => rec(a)?.zip_with(&rec(b)?, |x, y| x || y),
        And(a, b) => rec(a)?.zip_with(&rec(b)?, |x, y| x && y),
        Implies(a, b) => rec(a)?.zip_with(&rec(b)?, |x, y| !x || y),
        Next(a) => rec(a)?.shifted(1),
        Prev(a) => rec(a)?.shifted(-1),
        Reverse(a) => eval_sequence(a, &path.reversed(), ts)?.reversed(),
        Eventually(a) => until_sequence(&Lasso::constant(true), &rec(a)?, true),
        Always(a) => until_sequence(&rec(a)?, &Lasso::constant(false), false),
        Until(a, b) => until_sequence(&rec(a)?, &rec(b)?, true),
        WeakUntil(a, b) => until_sequence(&rec(a)?, &rec(b)?, false),
        Once(a) => eval_sequence(
            &a.as_ref().clone().reverse().eventually().reverse(),
            path,
            ts,
        )?,
        Historically(a) => {
            eval_sequence(&a.as_ref().clone().reverse().always().reverse(), path, ts)?
        }
    })
}

/// Exact truth of a fixpoint-free formula at a trace.
pub fn eval_on_trace(
    phi: &Formula,
    trace: &BiLassoTrace,
    ts: &TransitionSystem,
) -> Result<bool, FormulaError> {
    Ok(eval_sequence(phi, &trace.path, ts)?.at(trace.present))
}
