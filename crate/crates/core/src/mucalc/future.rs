//! Future-only formulas evaluated on one-sided ultimately periodic words.
//!
//! A formula without past or reversal operators only sees the path from the
//! present on, so its trace semantics restricted to the model is determined
//! by its truth on the words `u w w w ...` that follow the system. The word
//! set here is closed under taking tails, which makes next-time exact.

use std::collections::HashMap;

use crate::kripke::{StateSet, TransitionSystem};

use super::{Formula, FormulaError};

/// A set of words, as a bitset over `FutureWords` indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordSet(Vec<u64>);

impl WordSet {
    pub fn contains(&self, w: usize) -> bool {
        self.0[w / 64] >> (w % 64) & 1 == 1
    }

    fn insert(&mut self, w: usize) {
        self.0[w / 64] |= 1 << (w % 64);
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn union(&self, o: &WordSet) -> WordSet {
        WordSet(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    pub fn intersection(&self, o: &WordSet) -> WordSet {
        WordSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_subset(&self, o: &WordSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

/// Canonical ultimately periodic words of a total system: prefix length at
/// most `prefix`, primitive loop of length at most `loop_len`.
#[derive(Clone, Debug)]
pub struct FutureWords {
    system: TransitionSystem,
    words: Vec<(Vec<u8>, Vec<u8>)>,
    tail: Vec<u32>,
    /// `by_state[s]`: words starting in `s`.
    by_state: Vec<WordSet>,
}

fn canonical(mut prefix: Vec<u8>, mut cycle: Vec<u8>) -> (Vec<u8>, Vec<u8>) {
    let period = crate::traces::primitive_len(&cycle);
    cycle.truncate(period);
    while prefix.last().is_some_and(|&p| Some(&p) == cycle.last()) {
        prefix.pop();
        cycle.rotate_right(1);
    }
    (prefix, cycle)
}

impl FutureWords {
    pub fn new(
        system: &TransitionSystem,
        prefix: usize,
        loop_len: usize,
    ) -> Result<Self, FormulaError> {
        if !system.is_total() {
            return Err(FormulaError::Unsupported(
                "future words need a total system",
            ));
        }
        let n = system.size();
        let walks = |len: usize| -> Vec<Vec<u8>> {
            let mut out: Vec<Vec<u8>> = vec![Vec::new()];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| {
                        let next: Vec<usize> = match w.last() {
                            None => (0..n).collect(),
                            Some(&last) => system.successors(last as usize).iter().collect(),
                        };
                        next.into_iter().map(move |s| {
                            let mut v = w.clone();
                            v.push(s as u8);
                            v
                        })
                    })
                    .collect();
            }
            out
        };
        let mut index: HashMap<(Vec<u8>, Vec<u8>), usize> = HashMap::new();
        let mut words = Vec::new();
        for l in 1..=loop_len {
            for cycle in walks(l) {
                if !system.has_edge(cycle[l - 1] as usize, cycle[0] as usize) {
                    continue;
                }
                for p in 0..=prefix {
                    for head in walks(p) {
                        if head
                            .last()
                            .is_some_and(|&h| !system.has_edge(h as usize, cycle[0] as usize))
                        {
                            continue;
                        }
                        let word = canonical(head, cycle.clone());
                        if !index.contains_key(&word) {
                            index.insert(word.clone(), words.len());
                            words.push(word);
                        }
                    }
                }
            }
        }
        let tail = words
            .iter()
            .map(|(u, w)| {
                let next = match u.split_first() {
                    Some((_, rest)) => (rest.to_vec(), w.clone()),
                    None => {
                        let mut w = w.clone();
                        w.rotate_left(1);
                        (Vec::new(), w)
                    }
                };
                index[&next] as u32
            })
            .collect();
        let mut this = FutureWords {
            system: system.clone(),
            words,
            tail,
            by_state: Vec::new(),
        };
        this.by_state = (0..n)
            .map(|s| this.filter(|i| this.first(i) == s))
            .collect();
        Ok(this)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.system
    }

    fn first(&self, i: usize) -> usize {
        let (u, w) = &self.words[i];
        u.first().unwrap_or(&w[0]).to_owned() as usize
    }

    pub fn show_word(&self, i: usize) -> String {
        let names = |v: &[u8]| {
            v.iter()
                .map(|&s| self.system.name(s as usize))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let (u, w) = &self.words[i];
        if u.is_empty() {
            format!("({})^", names(w))
        } else {
            format!("{} ({})^", names(u), names(w))
        }
    }

    fn filter(&self, keep: impl Fn(usize) -> bool) -> WordSet {
        let mut s = self.empty();
        for i in (0..self.len()).filter(|&i| keep(i)) {
            s.insert(i);
        }
        s
    }

    pub fn empty(&self) -> WordSet {
        WordSet(vec![0; self.len().div_ceil(64)])
    }

    pub fn full(&self) -> WordSet {
        self.filter(|_| true)
    }

    pub fn complement(&self, x: &WordSet) -> WordSet {
        let mut out = WordSet(x.0.iter().map(|b| !b).collect());
        if !self.len().is_multiple_of(64) {
            *out.0.last_mut().expect("nonempty") &= (1u64 << (self.len() % 64)) - 1;
        }
        out
    }

    /// Words starting in one of `states`.
    pub fn sigma(&self, states: StateSet) -> WordSet {
        states
            .iter()
            .fold(self.empty(), |acc, s| acc.union(&self.by_state[s]))
    }

    pub fn next(&self, x: &WordSet) -> WordSet {
        self.filter(|i| x.contains(self.tail[i] as usize))
    }

    pub fn until(&self, a: &WordSet, b: &WordSet, least: bool) -> WordSet {
        let mut y = if least { self.empty() } else { self.full() };
        loop {
            let next = b.union(&a.intersection(&self.next(&y)));
            if next == y {
                return y;
            }
            y = next;
        }
    }

    /// States all of whose words lie in `x`.
    pub fn alpha_forall(&self, x: &WordSet) -> StateSet {
        (0..self.system.size())
            .filter(|&s| self.by_state[s].is_subset(x))
            .collect()
    }

    /// The words satisfying a closed future-only formula.
    pub fn eval(&self, phi: &Formula) -> Result<WordSet, FormulaError> {
        use Formula::*;
        Ok(match phi {
            True => self.full(),
            False => self.empty(),
            Sigma(atom) => self.sigma(atom.resolve(&self.system)?),
            Not(a) => self.complement(&self.eval(a)?),
            Or(a, b) => self.eval(a)?.union(&self.eval(b)?),
            And(a, b) => self.eval(a)?.intersection(&self.eval(b)?),
            Implies(a, b) => self.complement(&self.eval(a)?).union(&self.eval(b)?),
            Next(a) => self.next(&self.eval(a)?),
            Until(a, b) => self.until(&self.eval(a)?, &self.eval(b)?, true),
            WeakUntil(a, b) => self.until(&self.eval(a)?, &self.eval(b)?, false),
            Eventually(a) => self.until(&self.full(), &self.eval(a)?, true),
            Always(a) => self.until(&self.eval(a)?, &self.empty(), false),
            _ => {
                return Err(FormulaError::Unsupported(
                    "only future operators are evaluated on words",
                ))
            }
        })
    }
}
