//! Finite transition systems, the state transformers and the structural
//! predicates that decide next-time and reversal completeness.
//!
//! Text format (`.ts`):
//!
//! ```text
//! state 1
//! state 2
//! edge 1 1
//! edge 1 2
//! label p 1
//! ```
//!
//! `#` starts a comment. Edges and labels may only mention declared states.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::error::ParseError;

/// Systems are limited to 64 states so that state sets fit a machine word.
pub const MAX_STATES: usize = 64;
/// Default limit on the number of states whose subsets are enumerated.
pub const DEFAULT_SUBSET_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("a system needs at least one state")]
    Empty,
    #[error("{0} states exceed the limit of {MAX_STATES}")]
    TooManyStates(usize),
    #[error("subset enumeration over {states} states exceeds the cap of {cap}")]
    SubsetCap { states: usize, cap: usize },
}

/// A set of states, as a bitmask over state indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn singleton(s: usize) -> Self {
        StateSet(1 << s)
    }

    pub fn contains(self, s: usize) -> bool {
        self.0 & (1 << s) != 0
    }

    pub fn insert(&mut self, s: usize) {
        self.0 |= 1 << s;
    }

    pub fn union(self, o: StateSet) -> StateSet {
        StateSet(self.0 | o.0)
    }

    pub fn intersection(self, o: StateSet) -> StateSet {
        StateSet(self.0 & o.0)
    }

    pub fn minus(self, o: StateSet) -> StateSet {
        StateSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: StateSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            (mask != 0).then(|| {
                let s = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                s
            })
        })
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = StateSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

/// Witness for the path-confluence property: `q` inside, `r` outside, both
/// reaching `t` in exactly `k` steps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ConfluenceWitness {
    pub inside: usize,
    pub outside: usize,
    pub target: usize,
    pub steps: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionSystem {
    names: Vec<String>,
    succ: Vec<StateSet>,
    labels: BTreeMap<String, StateSet>,
}

/// Result of [`TransitionSystem::totalize`].
#[derive(Clone, Debug)]
pub struct Totalized {
    pub system: TransitionSystem,
    /// States that received a self-loop.
    pub added_loops: Vec<usize>,
}

impl TransitionSystem {
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, KripkeError> {
        if names.is_empty() {
            return Err(KripkeError::Empty);
        }
        if names.len() > MAX_STATES {
            return Err(KripkeError::TooManyStates(names.len()));
        }
        let mut succ = vec![StateSet::EMPTY; names.len()];
        for &(a, b) in edges {
            if a >= names.len() || b >= names.len() {
                return Err(KripkeError::UnknownState(format!("#{}", a.max(b))));
            }
            succ[a].insert(b);
        }
        Ok(TransitionSystem {
            names,
            succ,
            labels: BTreeMap::new(),
        })
    }

    /// States named `1..=n`.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Result<Self, KripkeError> {
        Self::new((1..=n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn with_label(mut self, prop: impl Into<String>, states: StateSet) -> Self {
        self.labels
            .insert(prop.into(), states.intersection(self.all()));
        self
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn all(&self) -> StateSet {
        StateSet(if self.size() == 64 {
            u64::MAX
        } else {
            (1u64 << self.size()) - 1
        })
    }

    pub fn labels(&self) -> &BTreeMap<String, StateSet> {
        &self.labels
    }

    pub fn label(&self, prop: &str) -> Option<StateSet> {
        self.labels.get(prop).copied()
    }

    pub fn successors(&self, s: usize) -> StateSet {
        self.succ[s]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    pub fn predecessors(&self, s: usize) -> StateSet {
        (0..self.size()).filter(|&a| self.has_edge(a, s)).collect()
    }

    pub fn complement(&self, y: StateSet) -> StateSet {
        self.all().minus(y)
    }

    /// Every state has a successor and a predecessor.
    pub fn is_total(&self) -> bool {
        (0..self.size()).all(|s| !self.successors(s).is_empty() && !self.predecessors(s).is_empty())
    }

    /// Adds a self-loop exactly on states lacking a predecessor or a successor.
    pub fn totalize(&self) -> Totalized {
        let added_loops: Vec<usize> = (0..self.size())
            .filter(|&s| self.successors(s).is_empty() || self.predecessors(s).is_empty())
            .collect();
        let mut system = self.clone();
        for &s in &added_loops {
            system.succ[s].insert(s);
        }
        Totalized {
            system,
            added_loops,
        }
    }

    pub fn reversed(&self) -> TransitionSystem {
        let succ = (0..self.size()).map(|s| self.predecessors(s)).collect();
        TransitionSystem {
            names: self.names.clone(),
            succ,
            labels: self.labels.clone(),
        }
    }

    /// States with some successor in `y`.
    pub fn pre(&self, y: StateSet) -> StateSet {
        (0..self.size())
            .filter(|&s| !self.successors(s).intersection(y).is_empty())
            .collect()
    }

    /// States with some predecessor in `y`.
    pub fn post(&self, y: StateSet) -> StateSet {
        y.iter()
            .fold(StateSet::EMPTY, |acc, s| acc.union(self.successors(s)))
    }

    /// States all of whose successors are in `y`.
    pub fn pre_tilde(&self, y: StateSet) -> StateSet {
        self.complement(self.pre(self.complement(y)))
    }

    /// States all of whose predecessors are in `y`.
    pub fn post_tilde(&self, y: StateSet) -> StateSet {
        self.complement(self.post(self.complement(y)))
    }

    /// No state has two distinct predecessors.
    pub fn is_injective(&self) -> bool {
        (0..self.size()).all(|s| self.predecessors(s).len() <= 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(a, b)| self.has_edge(b, a))
    }

    /// Smallest loop length `l` such that every state lies on an infinite
    /// path whose both ends wind around cycles of length at most `l`. `None`
    /// when some state has no such path.
    pub fn covering_loop_len(&self) -> Option<usize> {
        let n = self.size();
        let reach = |from: usize, step: &dyn Fn(usize) -> StateSet| -> Vec<Option<usize>> {
            let mut dist = vec![None; n];
            let mut queue = VecDeque::from([(from, 0usize)]);
            while let Some((s, d)) = queue.pop_front() {
                for t in step(s).iter() {
                    if dist[t].is_none() {
                        dist[t] = Some(d + 1);
                        queue.push_back((t, d + 1));
                    }
                }
            }
            dist
        };
        let forward: Vec<Vec<Option<usize>>> =
            (0..n).map(|s| reach(s, &|x| self.successors(x))).collect();
        let girth: Vec<Option<usize>> = (0..n).map(|s| forward[s][s]).collect();
        let reaches = |a: usize, b: usize| a == b || forward[a][b].is_some();
        (0..n)
            .map(|s| {
                let ahead = (0..n)
                    .filter(|&t| reaches(s, t))
                    .filter_map(|t| girth[t])
                    .min()?;
                let behind = (0..n)
                    .filter(|&t| reaches(t, s))
                    .filter_map(|t| girth[t])
                    .min()?;
                Some(ahead.max(behind))
            })
            .try_fold(1, |acc, l| l.map(|l| acc.max(l)))
    }

    /// Searches for a state inside `set` and one outside that reach a common
    /// state in the same positive number of steps. Breadth-first over pairs
    /// stepping together, so the reported `steps` is minimal.
    pub fn confluence(&self, set: StateSet) -> Option<ConfluenceWitness> {
        let n = self.size();
        let mut origin: Vec<Option<(usize, usize)>> = vec![None; n * n];
        let mut queue = VecDeque::new();
        for q in set.iter() {
            for r in self.complement(set).iter() {
                origin[q * n + r] = Some((q, r));
                queue.push_back((q, r, 0usize));
            }
        }
        while let Some((a, b, depth)) = queue.pop_front() {
            let (q, r) = origin[a * n + b].expect("queued pairs have an origin");
            for a2 in self.successors(a).iter() {
                for b2 in self.successors(b).iter() {
                    if a2 == b2 {
                        return Some(ConfluenceWitness {
                            inside: q,
                            outside: r,
                            target: a2,
                            steps: depth + 1,
                        });
                    }
                    let slot = &mut origin[a2 * n + b2];
                    if slot.is_none() {
                        *slot = Some((q, r));
                        queue.push_back((a2, b2, depth + 1));
                    }
                }
            }
        }
        None
    }

    pub fn p_arrow(&self, set: StateSet) -> bool {
        self.confluence(set).is_some()
    }

    /// All subsets, in increasing bitmask order, subject to the cap.
    pub fn subsets(&self, cap: usize) -> Result<impl Iterator<Item = StateSet>, KripkeError> {
        if self.size() > cap {
            return Err(KripkeError::SubsetCap {
                states: self.size(),
                cap,
            });
        }
        Ok((0..1u64 << self.size()).map(StateSet))
    }

    /// State sets whose universal concretization survives in the next-time core.
    pub fn core_next_states(&self, cap: usize) -> Result<Vec<StateSet>, KripkeError> {
        Ok(self.subsets(cap)?.filter(|&s| !self.p_arrow(s)).collect())
    }

    /// Parses `{a,b}` (state names) or a label name.
    pub fn parse_state_set(&self, text: &str) -> Result<StateSet, KripkeError> {
        if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            return inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|name| {
                    self.state(name)
                        .ok_or_else(|| KripkeError::UnknownState(name.to_string()))
                })
                .collect();
        }
        self.label(text)
            .ok_or_else(|| KripkeError::UnknownLabel(text.to_string()))
    }

    pub fn show_set(&self, s: StateSet) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Canonical `.ts` rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            out += &format!("state {n}\n");
        }
        for (a, b) in self.edges() {
            out += &format!("edge {} {}\n", self.names[a], self.names[b]);
        }
        for (p, s) in &self.labels {
            let names: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
            out += &format!("label {p} {}\n", names.join(" "));
        }
        out
    }

    /// Parses the `.ts` format.
    pub fn parse(text: &str) -> Result<Self, KripkeError> {
        let mut names: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let mut labels: Vec<(usize, String, Vec<String>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let words: Vec<&str> = raw
                .split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .collect();
            match words.as_slice() {
                [] => {}
                ["state", id] => {
                    if names.iter().any(|n| n == id) {
                        return Err(
                            ParseError::new(line, format!("state `{id}` declared twice")).into(),
                        );
                    }
                    names.push(id.to_string());
                }
                ["edge", a, b] => edges.push((line, a.to_string(), b.to_string())),
                ["label", prop, ids @ ..] => labels.push((
                    line,
                    prop.to_string(),
                    ids.iter().map(|s| s.to_string()).collect(),
                )),
                [directive, ..] => {
                    let msg = match *directive {
                        "state" => "expected `state <id>`".to_string(),
                        "edge" => "expected `edge <a> <b>`".to_string(),
                        other => format!("unknown directive `{other}`"),
                    };
                    return Err(ParseError::new(line, msg).into());
                }
            }
        }
        if names.is_empty() {
            return Err(ParseError::new(0, "no states declared").into());
        }
        let index = |line: usize, name: &str| -> Result<usize, KripkeError> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ParseError::new(line, format!("unknown state `{name}`")).into())
        };
        let pairs = edges
            .iter()
            .map(|(line, a, b)| Ok((index(*line, a)?, index(*line, b)?)))
            .collect::<Result<Vec<_>, KripkeError>>()?;
        let mut ts = TransitionSystem::new(names.clone(), &pairs)?;
        for (line, prop, ids) in labels {
            let set = ids
                .iter()
                .map(|id| index(line, id))
                .collect::<Result<StateSet, _>>()?;
            let entry = ts.labels.entry(prop).or_default();
            *entry = entry.union(set);
        }
        Ok(ts)
    }
}

impl fmt::Display for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Every total system with exactly `n` states (numbered `1..=n`), in
/// increasing order of the edge bitmask.
pub fn total_systems(n: usize) -> impl Iterator<Item = TransitionSystem> {
    assert!(
        n >= 1 && n * n < 64,
        "enumeration is meant for tiny systems"
    );
    (0u64..1 << (n * n)).filter_map(move |mask| {
        let edges: Vec<(usize, usize)> = (0..n * n)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| (b / n, b % n))
            .collect();
        let ts = TransitionSystem::numbered(n, &edges).ok()?;
        ts.is_total().then_some(ts)
    })
}

/// Every total system with between 1 and `max` states.
pub fn total_systems_up_to(max: usize) -> impl Iterator<Item = TransitionSystem> {
    (1..=max).flat_map(total_systems)
}
