use crate::kripke::{StateSet, TransitionSystem};
use crate::traces::{Bounds, Model, TraceSet};

use super::eval::resolve_edges;
use super::{Formula, FormulaError};

struct TraceEval<'a> {
    model: &'a Model,
    env: Vec<(String, TraceSet)>,
}

impl TraceEval<'_> {
    fn lookup(&self, var: &str) -> Result<TraceSet, FormulaError> {
        self.env
            .iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|(_, x)| x.clone())
            .ok_or_else(|| FormulaError::Unbound(var.to_string()))
    }

    fn fixpoint(
        &mut self,
        var: &str,
        body: &Formula,
        least: bool,
    ) -> Result<TraceSet, FormulaError> {
        let u = self.model.universe();
        let mut current = if least { u.empty() } else { u.full() };
        loop {
            self.env.push((var.to_string(), current.clone()));
            let next = self.eval(body);
            self.env.pop();
            let next = next?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    fn eval(&mut self, phi: &Formula) -> Result<TraceSet, FormulaError> {
        use Formula::*;
        let u = self.model.universe().clone();
        let ts = self.model.system();
        Ok(match phi {
            True => u.full(),
            False => u.empty(),
            Sigma(atom) => u.sigma(atom.resolve(ts)?),
            Pi(edges) => {
                let edges = resolve_edges(edges, ts)?;
                u.pi(|a, b| edges.contains(&(a, b)))
            }
            Var(v) => self.lookup(v)?,
            Not(a) => self.eval(a)?.complement(),
            Or(a, b) => self.eval(a)?.union(&self.eval(b)?),
            And(a, b) => self.eval(a)?.intersection(&self.eval(b)?),
            Implies(a, b) => self.eval(a)?.complement().union(&self.eval(b)?),
            Next(a) => u.next(&self.eval(a)?),
            Prev(a) => u.prev(&self.eval(a)?),
            Reverse(a) => u.reverse(&self.eval(a)?),
            Mu(v, body) => self.fixpoint(v, body, true)?,
            Nu(v, body) => self.fixpoint(v, body, false)?,
            All(a) => self.model.guard(&self.eval(a)?),
            Eventually(a) => u.until(&u.full(), &self.eval(a)?, true),
            Always(a) => u.until(&self.eval(a)?, &u.empty(), false),
            Until(a, b) => u.until(&self.eval(a)?, &self.eval(b)?, true),
            WeakUntil(a, b) => u.until(&self.eval(a)?, &self.eval(b)?, false),
            Once(a) => u.reverse(&u.until(&u.full(), &u.reverse(&self.eval(a)?), true)),
            Historically(a) => u.reverse(&u.until(&u.reverse(&self.eval(a)?), &u.empty(), false)),
        })
    }
}

/// The set of universe traces satisfying a closed formula.
pub fn trace_sem(phi: &Formula, model: &Model) -> Result<TraceSet, FormulaError> {
    TraceEval {
        model,
        env: Vec::new(),
    }
    .eval(phi)
}

struct StateEval<'a> {
    ts: &'a TransitionSystem,
    /// States whose interior model traces coincide with those of the reversed model.
    reversible: StateSet,
    env: Vec<(String, StateSet)>,
}

impl StateEval<'_> {
    fn fixpoint(
        &mut self,
        start: StateSet,
        step: impl Fn(&mut Self, StateSet) -> Result<StateSet, FormulaError>,
    ) -> Result<StateSet, FormulaError> {
        let mut current = start;
        loop {
            let next = step(self, current)?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    fn until(&mut self, a: StateSet, b: StateSet, least: bool) -> Result<StateSet, FormulaError> {
        let start = if least {
            StateSet::EMPTY
        } else {
            self.ts.all()
        };
        self.fixpoint(start, |me, y| {
            Ok(b.union(a.intersection(me.ts.pre_tilde(y))))
        })
    }

    fn eval(&mut self, phi: &Formula) -> Result<StateSet, FormulaError> {
        use Formula::*;
        let ts = self.ts;
        let all = ts.all();
        let rev = self.reversible;
        Ok(match phi {
            True => all,
            False => StateSet::EMPTY,
            Sigma(atom) => atom.resolve(ts)?,
            Pi(edges) => {
                let edges = resolve_edges(edges, ts)?;
                (0..ts.size())
                    .filter(|&s| ts.successors(s).iter().all(|n| edges.contains(&(s, n))))
                    .collect()
            }
            Var(v) => self
                .env
                .iter()
                .rev()
                .find(|(x, _)| x == v)
                .map(|(_, s)| *s)
                .ok_or_else(|| FormulaError::Unbound(v.clone()))?,
            Not(a) => ts.complement(self.eval(a)?),
            Or(a, b) => self.eval(a)?.union(self.eval(b)?),
            And(a, b) => self.eval(a)?.intersection(self.eval(b)?),
            Implies(a, b) => ts.complement(self.eval(a)?).union(self.eval(b)?),
            Next(a) => ts.pre_tilde(self.eval(a)?),
            Prev(a) => rev.intersection(ts.pre_tilde(rev.intersection(self.eval(a)?))),
            Reverse(a) => rev.intersection(self.eval(a)?),
            Mu(v, body) | Nu(v, body) => {
                let start = if matches!(phi, Mu(..)) {
                    StateSet::EMPTY
                } else {
                    all
                };
                self.fixpoint(start, |me, y| {
                    me.env.push((v.clone(), y));
                    let next = me.eval(body);
                    me.env.pop();
                    next
                })?
            }
            All(a) => self.eval(a)?,
            Eventually(a) => {
                let b = self.eval(a)?;
                self.until(all, b, true)?
            }
            Always(a) => {
                let a = self.eval(a)?;
                self.until(a, StateSet::EMPTY, false)?
            }
            Until(a, b) | WeakUntil(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.until(a, b, matches!(phi, Until(..)))?
            }
            Once(a) => {
                let b = rev.intersection(self.eval(a)?);
                rev.intersection(self.until(all, b, true)?)
            }
            Historically(a) => {
                let a = rev.intersection(self.eval(a)?);
                rev.intersection(self.until(a, StateSet::EMPTY, false)?)
            }
        })
    }
}

/// States whose interior model traces equal those of the reversed model.
pub(crate) fn reversible_states(model: &Model) -> StateSet {
    let u = model.universe();
    let reversed = u.reverse(model.traces());
    (0..model.system().size())
        .filter(|&s| {
            u.project(&reversed, s).intersection(&u.interior()) == *model.interior_projection(s)
        })
        .collect()
}

/// The abstract semantics on sets of states, built from the best correct
/// approximations of each connective.
pub fn state_sem(phi: &Formula, model: &Model) -> Result<StateSet, FormulaError> {
    StateEval {
        ts: model.system(),
        reversible: reversible_states(model),
        env: Vec::new(),
    }
    .eval(phi)
}

/// State semantics of a formula without past or reversal operators, which
/// needs no trace universe.
pub fn state_sem_future(phi: &Formula, ts: &TransitionSystem) -> Result<StateSet, FormulaError> {
    if !phi.is_future() {
        return Err(FormulaError::Unsupported(
            "past and reversal operators need a trace universe",
        ));
    }
    StateEval {
        ts,
        reversible: StateSet::EMPTY,
        env: Vec::new(),
    }
    .eval(phi)
}

/// Both sides of the branchability comparison, with the universe they refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branchability {
    /// Universal abstraction of the trace semantics.
    pub abstracted: StateSet,
    /// State semantics.
    pub state: StateSet,
    pub bounds: Bounds,
    pub slack: i64,
}

impl Branchability {
    pub fn branchable(&self) -> bool {
        self.abstracted == self.state
    }

    /// States only the abstraction of the trace semantics contains.
    pub fn difference(&self) -> StateSet {
        self.abstracted.minus(self.state)
    }
}

pub fn is_branchable(phi: &Formula, model: &Model) -> Result<Branchability, FormulaError> {
    let abstracted = model.alpha_forall(&trace_sem(phi, model)?);
    let state = state_sem(phi, model)?;
    if !state.is_subset(abstracted) {
        let ts = model.system();
        return Err(FormulaError::Soundness {
            state: ts.show_set(state),
            abstracted: ts.show_set(abstracted),
        });
    }
    let u = model.universe();
    Ok(Branchability {
        abstracted,
        state,
        bounds: u.bounds(),
        slack: u.slack(),
    })
}
