use std::fmt;

use crate::kripke::{StateSet, TransitionSystem};
use crate::traces::{Bounds, Model, TraceSet};

use super::uco::TraceUco;

/// Past depth covering every distinct past projection of the catalog:
/// the offset range plus one loop period.
pub fn default_past_depth(bounds: Bounds) -> usize {
    (2 * bounds.offset + 1) as usize + bounds.loop_len
}

/// Model traces grouped by the state `z` steps from the present, for `z`
/// in `[-depth, depth]`. Abstraction only looks at the interior parts.
pub struct ShiftedProjections {
    depth: usize,
    /// `sets[z + depth][s]`
    sets: Vec<Vec<TraceSet>>,
    inner: Vec<Vec<TraceSet>>,
    observed: TraceSet,
}

impl ShiftedProjections {
    pub fn new(model: &Model, depth: usize) -> Self {
        let u = model.universe();
        let observed = u.interior();
        let n = model.system().size();
        let d = depth as i64;
        let sets: Vec<Vec<TraceSet>> = (-d..=d)
            .map(|z| {
                let mut row = vec![u.empty(); n];
                for t in model.traces().iter() {
                    row[u.path(t).at(u.present(t) + z) as usize].insert(t);
                }
                row
            })
            .collect();
        let inner = sets
            .iter()
            .map(|row| row.iter().map(|x| x.intersection(&observed)).collect())
            .collect();
        ShiftedProjections {
            depth,
            sets,
            inner,
            observed,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Model traces whose state `z` steps away is `s`.
    pub fn at(&self, z: i64, s: usize) -> &TraceSet {
        &self.sets[(z + self.depth as i64) as usize][s]
    }

    pub fn observed(&self) -> &TraceSet {
        &self.observed
    }

    fn alpha(&self, x: &TraceSet, z: i64) -> StateSet {
        let row = &self.inner[(z + self.depth as i64) as usize];
        (0..row.len()).filter(|&s| row[s].is_subset(x)).collect()
    }

    fn gamma(&self, z: i64, states: StateSet, acc: TraceSet) -> TraceSet {
        states.iter().fold(acc, |acc, s| acc.union(self.at(z, s)))
    }
}

/// `values[k]` abstracts the state `k` steps in the past.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PastSequence {
    pub values: Vec<StateSet>,
}

impl PastSequence {
    pub fn at(&self, z: i64) -> StateSet {
        self.values[(-z) as usize]
    }

    pub fn show(&self, ts: &TransitionSystem) -> String {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, s)| format!("{}:{}", -(k as i64), ts.show_set(*s)))
            .collect();
        parts.join(" ")
    }
}

/// `values[z + depth]` abstracts the state `z` steps away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedSequence {
    pub depth: usize,
    pub values: Vec<StateSet>,
}

impl TwoSidedSequence {
    pub fn at(&self, z: i64) -> StateSet {
        self.values[(z + self.depth as i64) as usize]
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.depth as i64)..=self.depth as i64
    }
}

impl fmt::Display for TwoSidedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .range()
            .map(|z| format!("{z}:{:b}", self.at(z).0))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn alpha_next(proj: &ShiftedProjections, x: &TraceSet) -> PastSequence {
    PastSequence {
        values: (0..=proj.depth() as i64)
            .map(|k| proj.alpha(x, -k))
            .collect(),
    }
}

pub fn gamma_next(model: &Model, proj: &ShiftedProjections, seq: &PastSequence) -> TraceSet {
    seq.values
        .iter()
        .enumerate()
        .fold(model.universe().empty(), |acc, (k, &s)| {
            proj.gamma(-(k as i64), s, acc)
        })
}

/// Model traces some of whose past projections lie inside `x`.
pub fn shell_next_apply(model: &Model, proj: &ShiftedProjections, x: &TraceSet) -> TraceSet {
    gamma_next(model, proj, &alpha_next(proj, x))
}

/// The next-time shell as a family: unions of past shifts of the
/// universal concretizations.
pub fn shell_next(model: &Model, depth: usize) -> TraceUco {
    let proj = ShiftedProjections::new(model, depth);
    let n = model.system().size();
    let gens = (0..=depth as i64)
        .flat_map(|k| (0..n).map(move |s| (k, s)))
        .map(|(k, s)| proj.at(-k, s).clone());
    TraceUco::observed_on(
        model.universe().clone(),
        gens.collect(),
        proj.observed().clone(),
    )
}

pub fn alpha_bidirectional(proj: &ShiftedProjections, x: &TraceSet) -> TwoSidedSequence {
    let d = proj.depth() as i64;
    TwoSidedSequence {
        depth: proj.depth(),
        values: (-d..=d).map(|z| proj.alpha(x, z)).collect(),
    }
}

pub fn gamma_bidirectional(
    model: &Model,
    proj: &ShiftedProjections,
    seq: &TwoSidedSequence,
) -> TraceSet {
    seq.range().fold(model.universe().empty(), |acc, z| {
        proj.gamma(z, seq.at(z), acc)
    })
}
