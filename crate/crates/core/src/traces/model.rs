use std::sync::Arc;

use crate::kripke::{StateSet, TransitionSystem};

use super::universe::{Bounds, PathScope, TraceSet, TraceUniverse};
use super::TraceError;

/// The model traces of a total system inside a universe, with the
/// projections and abstractions built on them.
#[derive(Clone, Debug)]
pub struct Model {
    universe: Arc<TraceUniverse>,
    system: TransitionSystem,
    traces: TraceSet,
    projections: Vec<TraceSet>,
    inner: Vec<TraceSet>,
}

impl Model {
    pub fn new(universe: Arc<TraceUniverse>, system: TransitionSystem) -> Result<Self, TraceError> {
        if !system.is_total() {
            return Err(TraceError::NotTotal);
        }
        let traces = universe.following(&system);
        if traces.is_empty() {
            return Err(TraceError::NoModelPaths(universe.bounds().loop_len));
        }
        let projections: Vec<TraceSet> = (0..system.size())
            .map(|s| universe.project(&traces, s))
            .collect();
        let interior = universe.interior();
        let inner = projections
            .iter()
            .map(|p| p.intersection(&interior))
            .collect();
        Ok(Model {
            universe,
            system,
            traces,
            projections,
            inner,
        })
    }

    /// Builds a universe for `system` and its model in one go.
    pub fn build(
        system: &TransitionSystem,
        bounds: Bounds,
        slack: i64,
        scope: PathScope,
    ) -> Result<Self, TraceError> {
        let universe = TraceUniverse::new(system, bounds, slack, scope)?;
        Self::new(universe, system.clone())
    }

    /// The model of the reversed system, which is the time reversal of this one.
    pub fn reversed(&self) -> Model {
        Model::new(self.universe.clone(), self.system.reversed()).expect("reversal keeps totality")
    }

    pub fn universe(&self) -> &Arc<TraceUniverse> {
        &self.universe
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.system
    }

    pub fn traces(&self) -> &TraceSet {
        &self.traces
    }

    /// Model traces whose present state is `s`.
    pub fn projection(&self, s: usize) -> &TraceSet {
        &self.projections[s]
    }

    /// Interior model traces whose present state is `s`.
    pub fn interior_projection(&self, s: usize) -> &TraceSet {
        &self.inner[s]
    }

    /// Model traces (at every represented present) with state in `states`.
    pub fn gamma_forall(&self, states: StateSet) -> TraceSet {
        states.iter().fold(self.universe.empty(), |acc, s| {
            acc.union(&self.projections[s])
        })
    }

    /// States whose interior model traces all lie in `x`. Only the interior
    /// is consulted, where sets computed in the universe are exact.
    pub fn alpha_forall(&self, x: &TraceSet) -> StateSet {
        (0..self.system.size())
            .filter(|&s| self.inner[s].is_subset(x))
            .collect()
    }

    /// The model-guarded universal quantifier.
    pub fn guard(&self, x: &TraceSet) -> TraceSet {
        self.rho_forall(x)
    }

    pub fn rho_forall(&self, x: &TraceSet) -> TraceSet {
        self.gamma_forall(self.alpha_forall(x))
    }

    pub fn alpha_exists(&self, x: &TraceSet) -> StateSet {
        self.system.complement(self.alpha_forall(&x.complement()))
    }

    pub fn gamma_exists(&self, states: StateSet) -> TraceSet {
        self.gamma_forall(self.system.complement(states))
            .complement()
    }

    pub fn rho_exists(&self, x: &TraceSet) -> TraceSet {
        self.rho_forall(&x.complement()).complement()
    }

    /// `{ <j,tau> in M : tau(j - k) = sigma(i - k) }` for the trace `t = <i,sigma>`.
    pub fn past_projection(&self, t: usize, k: i64) -> TraceSet {
        let u = &self.universe;
        let target = u.path(t).at(u.present(t) - k);
        let matches = u.filter(|r| u.path(r).at(u.present(r) - k) == target);
        matches.intersection(&self.traces)
    }

    /// Nondegeneracy of the model inside the universe: every state carries at
    /// least two interior model traces, and shifting or reversing leaves the
    /// interior part of the model (and of its reversal) unchanged.
    pub fn check_hypothesis(&self) -> HypothesisReport {
        let u = &self.universe;
        let inner = u.interior();
        let m = self.traces.intersection(&inner);
        let counts: Vec<(String, usize)> = (0..self.system.size())
            .map(|s| {
                (
                    self.system.name(s).to_string(),
                    self.projections[s].intersection(&inner).count(),
                )
            })
            .collect();
        let mut failures: Vec<String> = counts
            .iter()
            .filter(|(_, c)| *c < 2)
            .map(|(s, c)| format!("state {s} has {c} interior model trace(s)"))
            .collect();
        let reversed = u.reverse(&self.traces);
        let checks = [
            ("next of the model", u.next(&self.traces), &self.traces),
            ("previous of the model", u.prev(&self.traces), &self.traces),
            ("next of the reversed model", u.next(&reversed), &reversed),
            (
                "previous of the reversed model",
                u.prev(&reversed),
                &reversed,
            ),
        ];
        for (what, got, expected) in checks {
            if got.intersection(&inner) != expected.intersection(&inner) {
                failures.push(format!("{what} differs from it on the interior"));
            }
        }
        if self.reversed().traces != reversed {
            failures.push("reversed system's model differs from the reversed model".into());
        }
        HypothesisReport {
            interior_model_traces: m.count(),
            counts,
            failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub interior_model_traces: usize,
    /// Interior model traces per state.
    pub counts: Vec<(String, usize)>,
    pub failures: Vec<String>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}
