//! Branchability of the deterministic fragment, by enumerating its formulas
//! up to a syntax depth on every small system.
//!
//! Formulas are grouped by their meaning on the future words of the system
//! paired with their state semantics; one representative per group is kept
//! and extended. A formula is branchable when the universal abstraction of
//! its word set equals its state semantics.

use std::collections::HashMap;

use crate::kripke::{total_systems_up_to, StateSet, TransitionSystem};
use crate::mucalc::{is_ltl_det, Formula, FutureWords, WordSet};

type Key = (WordSet, StateSet);

#[derive(Clone, Debug, Default)]
pub struct DetStats {
    pub systems: usize,
    pub candidates: usize,
    pub classes: usize,
    /// `(system, formula)` for each system with a non-branchable formula.
    pub failures: Vec<(String, String)>,
}

fn state_until(ts: &TransitionSystem, a: StateSet, b: StateSet, least: bool) -> StateSet {
    let mut y = if least { StateSet::EMPTY } else { ts.all() };
    loop {
        let next = b.union(a.intersection(ts.pre_tilde(y)));
        if next == y {
            return y;
        }
        y = next;
    }
}

fn states_formula(ts: &TransitionSystem, s: StateSet) -> Formula {
    Formula::states(s.iter().map(|i| ts.name(i).to_string()))
}

struct Sweep<'a> {
    ts: &'a TransitionSystem,
    words: &'a FutureWords,
    levels: Vec<Vec<(Key, Formula)>>,
    seen: HashMap<Key, usize>,
    candidates: usize,
    bad: Option<Formula>,
}

impl Sweep<'_> {
    fn add(&mut self, depth: usize, key: Key, phi: impl FnOnce() -> Formula) {
        self.candidates += 1;
        let fresh = !self.seen.contains_key(&key);
        let bad = self.bad.is_none() && self.words.alpha_forall(&key.0) != key.1;
        if !fresh && !bad {
            return;
        }
        let phi = phi();
        debug_assert!(phi.depth() <= depth && is_ltl_det(&phi), "{phi}");
        if bad {
            self.bad = Some(phi.clone());
        }
        if fresh {
            self.seen.insert(key.clone(), depth);
            self.levels[depth].push((key, phi));
        }
    }

    fn below(&self, depth: usize) -> Vec<(Key, Formula)> {
        self.levels[..depth].iter().flatten().cloned().collect()
    }

    fn level(&mut self, d: usize) {
        let (ts, fw) = (self.ts, self.words);
        let below = self.below(d);
        let previous = self.levels[d - 1].clone();
        for ((wa, sa), fa) in &previous {
            self.add(d, (fw.next(wa), ts.pre_tilde(*sa)), || fa.clone().next());
            self.add(
                d,
                (
                    fw.until(wa, &fw.empty(), false),
                    state_until(ts, *sa, StateSet::EMPTY, false),
                ),
                || fa.clone().weak_until(Formula::False),
            );
            for ((wb, sb), fb) in &below {
                self.add(d, (wa.intersection(wb), sa.intersection(*sb)), || {
                    fa.clone().and(fb.clone())
                });
            }
        }
        // guarded disjunctions and untils: (S & a) op (!S & b), with either
        // conjunct left out when it is true
        let inner = if d >= 2 {
            self.below(d - 1)
        } else {
            Vec::new()
        };
        for mask in 0..1u64 << ts.size() {
            let s = StateSet(mask);
            let ns = ts.complement(s);
            let (ws, wns) = (fw.sigma(s), fw.sigma(ns));
            let guard = states_formula(ts, s);
            let mut left: HashMap<Key, Formula> = HashMap::from([((ws.clone(), s), guard.clone())]);
            let mut right: HashMap<Key, Formula> = HashMap::new();
            if d >= 2 {
                right.insert((wns.clone(), ns), guard.clone().not());
                for ((w, st), f) in &inner {
                    left.entry((w.intersection(&ws), st.intersection(s)))
                        .or_insert_with(|| guard.clone().and(f.clone()));
                }
            }
            if d >= 3 {
                for ((w, st), f) in &inner {
                    right
                        .entry((w.intersection(&wns), st.intersection(ns)))
                        .or_insert_with(|| guard.clone().not().and(f.clone()));
                }
            }
            for ((wa, sa), fa) in &left {
                for ((wb, sb), fb) in &right {
                    self.add(d, (wa.union(wb), sa.union(*sb)), || {
                        fa.clone().or(fb.clone())
                    });
                    self.add(
                        d,
                        (fw.until(wa, wb, true), state_until(ts, *sa, *sb, true)),
                        || fa.clone().until(fb.clone()),
                    );
                    self.add(
                        d,
                        (fw.until(wa, wb, false), state_until(ts, *sa, *sb, false)),
                        || fa.clone().weak_until(fb.clone()),
                    );
                }
            }
        }
    }
}

/// A deterministic formula of depth at most `max_depth` that is not
/// branchable on `ts`, judged on `words`. Also returns the candidate and
/// class counts.
pub fn first_unbranchable(
    ts: &TransitionSystem,
    words: &FutureWords,
    max_depth: usize,
) -> (Option<Formula>, usize, usize) {
    let mut sweep = Sweep {
        ts,
        words,
        levels: vec![Vec::new(); max_depth + 1],
        seen: HashMap::new(),
        candidates: 0,
        bad: None,
    };
    for mask in 0..1u64 << ts.size() {
        let s = StateSet(mask);
        sweep.add(0, (words.sigma(s), s), || states_formula(ts, s));
    }
    for d in 1..=max_depth {
        sweep.level(d);
    }
    (sweep.bad, sweep.candidates, sweep.seen.len())
}

/// Runs [`first_unbranchable`] on every total system with up to `max_states` states.
pub fn ltl_det_sweep(
    max_states: usize,
    max_depth: usize,
    prefix: usize,
    loop_len: usize,
) -> DetStats {
    let mut stats = DetStats::default();
    for ts in total_systems_up_to(max_states) {
        let words = FutureWords::new(&ts, prefix, loop_len).expect("enumerated systems are total");
        let (bad, candidates, classes) = first_unbranchable(&ts, &words, max_depth);
        stats.systems += 1;
        stats.candidates += candidates;
        stats.classes += classes;
        if let Some(phi) = bad {
            stats.failures.push((ts.to_text(), phi.to_string()));
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mucalc::state_sem_future;

    #[test]
    fn representatives_match_their_keys() {
        let ts = TransitionSystem::numbered(2, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        let words = FutureWords::new(&ts, 3, 3).unwrap();
        let mut sweep = Sweep {
            ts: &ts,
            words: &words,
            levels: vec![Vec::new(); 3],
            seen: HashMap::new(),
            candidates: 0,
            bad: None,
        };
        for mask in 0..4 {
            sweep.add(0, (words.sigma(StateSet(mask)), StateSet(mask)), || {
                states_formula(&ts, StateSet(mask))
            });
        }
        sweep.level(1);
        sweep.level(2);
        for ((w, s), phi) in sweep.levels.iter().flatten() {
            assert!(is_ltl_det(phi), "{phi}");
            assert_eq!(words.eval(phi).unwrap(), *w, "{phi}");
            assert_eq!(state_sem_future(phi, &ts).unwrap(), *s, "{phi}");
        }
    }

    #[test]
    fn two_state_systems_are_clean() {
        let stats = ltl_det_sweep(2, 2, 3, 3);
        assert!(stats.systems > 1);
        assert!(stats.failures.is_empty(), "{:?}", stats.failures);
    }
}
