use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::kripke::{StateSet, TransitionSystem};

use super::lasso::{primitive_len, Lasso};
use super::{BiLassoTrace, TraceError};

/// Size limits of the represented traces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Bounds {
    /// Longest loop on either side.
    pub loop_len: usize,
    /// Longest middle word.
    pub middle_len: usize,
    /// Middles start at or after `-offset` and end at or before `offset + 1`.
    pub offset: i64,
    /// Interior presents lie in `[-present, present]`.
    pub present: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            loop_len: 2,
            middle_len: 4,
            offset: 3,
            present: 3,
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.loop_len, self.middle_len, self.offset, self.present
        )
    }
}

pub const DEFAULT_SLACK: i64 = 4;

/// Which paths the universe contains.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathScope {
    /// Every path within bounds over the alphabet.
    All,
    /// Paths following the system's edges forwards or backwards. Every
    /// operator except the model quantifier acts path by path, and the
    /// quantifier only inspects model traces, so this is exact for model
    /// traces while keeping the universe small.
    Model,
}

/// A path over state indices.
pub type Path = Lasso<u8>;

/// Canonical paths over `alphabet` letters within `bounds`.
fn catalog(alphabet: usize, bounds: Bounds) -> Arc<Vec<Path>> {
    type Key = (usize, Bounds);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<Path>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache
        .lock()
        .expect("catalog cache")
        .get(&(alphabet, bounds))
    {
        return c.clone();
    }
    let built = Arc::new(build_catalog(alphabet, bounds));
    cache
        .lock()
        .expect("catalog cache")
        .insert((alphabet, bounds), built.clone());
    built
}

fn words(alphabet: usize, len: usize) -> Vec<Vec<u8>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|w| {
                (0..alphabet as u8).map(move |c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect()
    })
}

/// Both the end of left periodicity and the start of right periodicity must
/// lie in `[-offset, offset + 1]`; reversal swaps the two (reflected), so the
/// catalog is closed under it.
fn within(p: &Path, b: Bounds) -> bool {
    let window = -b.offset..=b.offset + 1;
    p.left.len() <= b.loop_len
        && p.right.len() <= b.loop_len
        && p.middle.len() <= b.middle_len
        && (p.is_periodic() || (window.contains(&p.left_extent()) && window.contains(&p.end())))
}

fn build_catalog(alphabet: usize, b: Bounds) -> Vec<Path> {
    let loops: Vec<Vec<u8>> = (1..=b.loop_len)
        .flat_map(|n| words(alphabet, n))
        .filter(|w| primitive_len(w) == w.len())
        .collect();
    let mut out = BTreeSet::new();
    for m in 0..=b.middle_len {
        let middles = words(alphabet, m);
        for offset in -b.offset..=(b.offset + 1 - m as i64) {
            for u in &loops {
                for w in &loops {
                    for v in &middles {
                        let p = Lasso::raw(u.clone(), v.clone(), w.clone(), offset).canonical();
                        if within(&p, b) {
                            out.insert(p);
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Whether every step of `path` is an edge of `ts`.
pub fn follows(ts: &TransitionSystem, path: &Path) -> bool {
    let from = path.offset - path.left.len() as i64 - 1;
    let to = path.end() + path.right.len() as i64;
    (from..=to).all(|n| ts.has_edge(path.at(n) as usize, path.at(n + 1) as usize))
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A finite set of pointed bi-lasso traces, closed under reversal.
///
/// Presents range over `[-h, h]` with `h = present bound + slack`. The
/// successor of a trace at `h` wraps back by one right-loop period (and the
/// predecessor at `-h` forward by one left-loop period): the wrapped trace
/// has the same future (resp. past) since the slack covers the middle.
pub struct TraceUniverse {
    id: u64,
    names: Vec<String>,
    bounds: Bounds,
    slack: i64,
    horizon: i64,
    paths: Vec<Path>,
    path_index: HashMap<Path, usize>,
    succ: Vec<u32>,
    pred: Vec<u32>,
    rev: Vec<u32>,
    state: Vec<u8>,
    next_state: Vec<u8>,
}

impl fmt::Debug for TraceUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TraceUniverse({} paths, {} traces, bounds {})",
            self.paths.len(),
            self.len(),
            self.bounds
        )
    }
}

impl TraceUniverse {
    /// Largest number of traces a universe may hold.
    pub const MAX_TRACES: usize = 1 << 26;

    pub fn new(
        ts: &TransitionSystem,
        bounds: Bounds,
        slack: i64,
        scope: PathScope,
    ) -> Result<Arc<Self>, TraceError> {
        if slack < 1 || bounds.present + slack < bounds.offset + bounds.loop_len as i64 {
            return Err(TraceError::SlackTooSmall {
                slack,
                needed: (bounds.offset + bounds.loop_len as i64 - bounds.present).max(1),
            });
        }
        if bounds.loop_len == 0 || bounds.offset < 0 || bounds.present < 0 {
            return Err(TraceError::BadBounds(bounds.to_string()));
        }
        if ts.size() > u8::MAX as usize {
            return Err(TraceError::AlphabetTooLarge(ts.size()));
        }
        let all = catalog(ts.size(), bounds);
        let paths: Vec<Path> = match scope {
            PathScope::All => all.as_ref().clone(),
            PathScope::Model => {
                let rev = ts.reversed();
                all.iter()
                    .filter(|p| follows(ts, p) || follows(&rev, p))
                    .cloned()
                    .collect()
            }
        };
        let horizon = bounds.present + slack;
        let width = (2 * horizon + 1) as usize;
        let total = paths.len() * width;
        if total > Self::MAX_TRACES {
            return Err(TraceError::TooLarge(total));
        }
        let path_index: HashMap<Path, usize> = paths
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut succ = Vec::with_capacity(total);
        let mut pred = Vec::with_capacity(total);
        let mut rev = Vec::with_capacity(total);
        let mut state = Vec::with_capacity(total);
        let mut next_state = Vec::with_capacity(total);
        for (pid, p) in paths.iter().enumerate() {
            let rid = *path_index
                .get(&p.reversed())
                .ok_or(TraceError::NotReversalClosed)?;
            let base = (pid * width) as i64 + horizon;
            for present in -horizon..=horizon {
                let next = if present < horizon {
                    present + 1
                } else {
                    horizon + 1 - p.right.len() as i64
                };
                let prev = if present > -horizon {
                    present - 1
                } else {
                    -horizon - 1 + p.left.len() as i64
                };
                succ.push((base + next) as u32);
                pred.push((base + prev) as u32);
                rev.push(((rid * width) as i64 + horizon - present) as u32);
                state.push(p.at(present));
                next_state.push(p.at(present + 1));
            }
        }
        Ok(Arc::new(TraceUniverse {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            names: ts.names().to_vec(),
            bounds,
            slack,
            horizon,
            paths,
            path_index,
            succ,
            pred,
            rev,
            state,
            next_state,
        }))
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn slack(&self) -> i64 {
        self.slack
    }

    /// Largest represented present.
    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    fn width(&self) -> usize {
        (2 * self.horizon + 1) as usize
    }

    pub fn path_id(&self, t: usize) -> usize {
        t / self.width()
    }

    pub fn present(&self, t: usize) -> i64 {
        (t % self.width()) as i64 - self.horizon
    }

    pub fn path(&self, t: usize) -> &Path {
        &self.paths[self.path_id(t)]
    }

    pub fn trace(&self, t: usize) -> BiLassoTrace {
        BiLassoTrace {
            path: self.path(t).clone(),
            present: self.present(t),
        }
    }

    pub fn index_of(&self, t: &BiLassoTrace) -> Option<usize> {
        if t.present.abs() > self.horizon {
            return None;
        }
        let pid = *self.path_index.get(&t.path.canonical())?;
        Some(pid * self.width() + (t.present + self.horizon) as usize)
    }

    /// Present state.
    pub fn state(&self, t: usize) -> usize {
        self.state[t] as usize
    }

    /// State one step after the present.
    pub fn next_state(&self, t: usize) -> usize {
        self.next_state[t] as usize
    }

    pub fn succ(&self, t: usize) -> usize {
        self.succ[t] as usize
    }

    pub fn pred(&self, t: usize) -> usize {
        self.pred[t] as usize
    }

    pub fn rev(&self, t: usize) -> usize {
        self.rev[t] as usize
    }

    pub fn empty(&self) -> TraceSet {
        TraceSet {
            universe: self.id,
            len: self.len(),
            bits: vec![0; self.len().div_ceil(64)],
        }
    }

    pub fn full(&self) -> TraceSet {
        self.empty().complement()
    }

    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> TraceSet {
        let mut s = self.empty();
        for t in (0..self.len()).filter(|&t| keep(t)) {
            s.insert(t);
        }
        s
    }

    /// Traces with present in `[-present bound, present bound]`.
    pub fn interior(&self) -> TraceSet {
        let b = self.bounds.present;
        self.filter(|t| self.present(t).abs() <= b)
    }

    fn map_back(&self, x: &TraceSet, step: &[u32]) -> TraceSet {
        self.check(x);
        self.filter(|t| x.contains(step[t] as usize))
    }

    /// Traces whose successor lies in `x` (next-time).
    pub fn next(&self, x: &TraceSet) -> TraceSet {
        self.map_back(x, &self.succ)
    }

    /// Traces whose predecessor lies in `x` (previous-time).
    pub fn prev(&self, x: &TraceSet) -> TraceSet {
        self.map_back(x, &self.pred)
    }

    pub fn reverse(&self, x: &TraceSet) -> TraceSet {
        self.map_back(x, &self.rev)
    }

    /// Traces whose present state is in `states`.
    pub fn sigma(&self, states: StateSet) -> TraceSet {
        self.filter(|t| states.contains(self.state(t)))
    }

    /// Traces whose present step `(state, next state)` satisfies `edge`.
    pub fn pi(&self, edge: impl Fn(usize, usize) -> bool) -> TraceSet {
        self.filter(|t| edge(self.state(t), self.next_state(t)))
    }

    /// Traces whose whole path follows `ts`.
    pub fn following(&self, ts: &TransitionSystem) -> TraceSet {
        let ok: Vec<bool> = self.paths.iter().map(|p| follows(ts, p)).collect();
        self.filter(|t| ok[self.path_id(t)])
    }

    /// Members of `x` whose present state is `s`.
    pub fn project(&self, x: &TraceSet, s: usize) -> TraceSet {
        x.intersection(&self.sigma(StateSet::singleton(s)))
    }

    /// `{t in n : n restricted to the present state of t is inside x}`.
    pub fn forall(&self, n: &TraceSet, x: &TraceSet) -> TraceSet {
        let mut out = self.empty();
        for s in 0..self.names.len() {
            let part = self.project(n, s);
            if part.is_subset(x) {
                out = out.union(&part);
            }
        }
        out
    }

    /// Least (`least = true`) or greatest solution of `Y = b | (a & next Y)`,
    /// by two backward sweeps over each right loop and one over the rest.
    pub fn until(&self, a: &TraceSet, b: &TraceSet, least: bool) -> TraceSet {
        self.check(a);
        self.check(b);
        let width = self.width();
        let h = self.horizon;
        let mut out = self.empty();
        let mut val = vec![false; width];
        for (pid, p) in self.paths.iter().enumerate() {
            let base = pid * width;
            let idx = |present: i64| (present + h) as usize;
            let start = h + 1 - p.right.len() as i64;
            let step = |present: i64, val: &[bool]| {
                let t = base + idx(present);
                let next = if present < h { present + 1 } else { start };
                b.contains(t) || (a.contains(t) && val[idx(next)])
            };
            val.iter_mut().for_each(|v| *v = !least);
            for _ in 0..2 {
                for present in (start..=h).rev() {
                    val[idx(present)] = step(present, &val);
                }
            }
            for present in (-h..start).rev() {
                val[idx(present)] = step(present, &val);
            }
            for (k, &v) in val.iter().enumerate() {
                if v {
                    out.insert(base + k);
                }
            }
        }
        out
    }

    /// Adds every trace agreeing with a member on the present and the future.
    pub fn fd_closure(&self, x: &TraceSet) -> TraceSet {
        let keys: Vec<FutureKey> = (0..self.len()).map(|t| self.future_key(t)).collect();
        let hit: std::collections::HashSet<&FutureKey> = x.iter().map(|t| &keys[t]).collect();
        self.filter(|t| hit.contains(&keys[t]))
    }

    /// Adds every trace agreeing with a member on the present and the past.
    pub fn bd_closure(&self, x: &TraceSet) -> TraceSet {
        self.reverse(&self.fd_closure(&self.reverse(x)))
    }

    fn future_key(&self, t: usize) -> FutureKey {
        let p = self.path(t);
        let i = self.present(t);
        let pw = p.right.len() as i64;
        let start = if p.is_periodic() { i } else { i.max(p.end()) };
        let prefix = p.window(i, start);
        let cycle = p.window(start, start + pw);
        (i, prefix, cycle)
    }

    pub fn check(&self, x: &TraceSet) {
        assert_eq!(x.universe, self.id, "trace set from another universe");
    }

    pub fn show_trace(&self, t: usize) -> String {
        self.trace(t).show(&self.names)
    }

    pub fn show_set(&self, x: &TraceSet) -> String {
        let parts: Vec<String> = x.iter().map(|t| self.show_trace(t)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

type FutureKey = (i64, Vec<u8>, Vec<u8>);

/// A subset of a [`TraceUniverse`], as a bitset over trace indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TraceSet {
    universe: u64,
    len: usize,
    bits: Vec<u64>,
}

impl TraceSet {
    pub fn contains(&self, t: usize) -> bool {
        self.bits[t / 64] & (1 << (t % 64)) != 0
    }

    pub fn insert(&mut self, t: usize) {
        self.bits[t / 64] |= 1 << (t % 64);
    }

    pub fn remove(&mut self, t: usize) {
        self.bits[t / 64] &= !(1 << (t % 64));
    }

    fn zip(&self, o: &TraceSet, f: impl Fn(u64, u64) -> u64) -> TraceSet {
        assert_eq!(
            self.universe, o.universe,
            "trace sets from different universes"
        );
        let bits = self
            .bits
            .iter()
            .zip(&o.bits)
            .map(|(&a, &b)| f(a, b))
            .collect();
        TraceSet {
            universe: self.universe,
            len: self.len,
            bits,
        }
    }

    pub fn union(&self, o: &TraceSet) -> TraceSet {
        self.zip(o, |a, b| a | b)
    }

    pub fn intersection(&self, o: &TraceSet) -> TraceSet {
        self.zip(o, |a, b| a & b)
    }

    pub fn difference(&self, o: &TraceSet) -> TraceSet {
        self.zip(o, |a, b| a & !b)
    }

    pub fn complement(&self) -> TraceSet {
        let mut bits: Vec<u64> = self.bits.iter().map(|&w| !w).collect();
        if !self.len.is_multiple_of(64) {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        TraceSet {
            universe: self.universe,
            len: self.len,
            bits,
        }
    }

    pub fn is_subset(&self, o: &TraceSet) -> bool {
        assert_eq!(
            self.universe, o.universe,
            "trace sets from different universes"
        );
        self.bits.iter().zip(&o.bits).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }
}
