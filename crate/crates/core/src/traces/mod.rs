//! Pointed bi-infinite traces in lasso form, bounded trace universes, the
//! trace transformers and the universal/existential checking abstractions.

mod lasso;
mod model;
mod universe;

pub use lasso::{lcm, primitive_len, Lasso};
pub use model::{HypothesisReport, Model};
pub use universe::{follows, Bounds, Path, PathScope, TraceSet, TraceUniverse, DEFAULT_SLACK};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("slack {slack} is too small for these bounds (need at least {needed})")]
    SlackTooSmall { slack: i64, needed: i64 },
    #[error("invalid bounds {0}")]
    BadBounds(String),
    #[error("{0} states are too many for trace paths")]
    AlphabetTooLarge(usize),
    #[error("universe would hold {0} traces, above the limit")]
    TooLarge(usize),
    #[error("path catalog is not closed under reversal")]
    NotReversalClosed,
    #[error("the transition system must be total")]
    NotTotal,
    #[error("no path of the system fits the bounds (loops of length up to {0})")]
    NoModelPaths(usize),
    #[error("bad trace literal `{0}`: expected `^(u) v (w)^ @offset !present`")]
    Literal(String),
    #[error("unknown state `{0}` in trace literal")]
    UnknownState(String),
}

/// A trace: a bi-infinite path with a distinguished present time.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BiLassoTrace {
    pub path: Path,
    pub present: i64,
}

fn show_word(w: &[u8], names: &[String]) -> String {
    let compact = names.iter().all(|n| n.chars().count() == 1);
    let parts: Vec<&str> = w.iter().map(|&s| names[s as usize].as_str()).collect();
    parts.join(if compact { "" } else { " " })
}

fn parse_word(text: &str, names: &[String]) -> Result<Vec<u8>, TraceError> {
    let lookup = |name: &str| -> Result<u8, TraceError> {
        names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u8)
            .ok_or_else(|| TraceError::UnknownState(name.to_string()))
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    match tokens.as_slice() {
        [single] if lookup(single).is_err() => {
            single.chars().map(|c| lookup(&c.to_string())).collect()
        }
        _ => tokens.into_iter().map(lookup).collect(),
    }
}

impl BiLassoTrace {
    pub fn new(path: Path, present: i64) -> Self {
        BiLassoTrace {
            path: path.canonical(),
            present,
        }
    }

    pub fn state(&self) -> u8 {
        self.path.at(self.present)
    }

    /// `^(u) v (w)^ @offset !present`, with state names concatenated when
    /// all are single characters.
    pub fn show(&self, names: &[String]) -> String {
        let p = &self.path;
        let middle = if p.middle.is_empty() {
            String::new()
        } else {
            format!("{} ", show_word(&p.middle, names))
        };
        format!(
            "^({}) {middle}({})^ @{} !{}",
            show_word(&p.left, names),
            show_word(&p.right, names),
            p.offset,
            self.present
        )
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Self, TraceError> {
        let bad = || TraceError::Literal(text.to_string());
        let rest = text.trim().strip_prefix("^(").ok_or_else(bad)?;
        let (left, rest) = rest.split_once(')').ok_or_else(bad)?;
        let (middle, rest) = rest.split_once('(').ok_or_else(bad)?;
        let (right, rest) = rest.split_once(")^").ok_or_else(bad)?;
        let mut offset = None;
        let mut present = None;
        for tok in rest.split_whitespace() {
            if let Some(o) = tok.strip_prefix('@') {
                offset = Some(o.parse::<i64>().map_err(|_| bad())?);
            } else if let Some(i) = tok.strip_prefix('!') {
                present = Some(i.parse::<i64>().map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        let (left, right) = (parse_word(left, names)?, parse_word(right, names)?);
        if left.is_empty() || right.is_empty() {
            return Err(bad());
        }
        let path = Lasso::raw(
            left,
            parse_word(middle, names)?,
            right,
            offset.ok_or_else(bad)?,
        );
        Ok(BiLassoTrace::new(path, present.ok_or_else(bad)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{StateSet, TransitionSystem};

    fn names() -> Vec<String> {
        vec!["1".into(), "2".into()]
    }

    fn first() -> TransitionSystem {
        TransitionSystem::numbered(2, &[(0, 0), (0, 1), (1, 1)])
            .unwrap()
            .with_label("p", StateSet(0b01))
            .with_label("q", StateSet(0b10))
    }

    #[test]
    fn literal_round_trip() {
        let t = BiLassoTrace::parse("^(1) 12 (2)^ @0 !1", &names()).unwrap();
        assert_eq!(t.show(&names()), "^(1) (2)^ @1 !1");
        assert_eq!(BiLassoTrace::parse(&t.show(&names()), &names()).unwrap(), t);
        let long = vec!["red".to_string(), "go".to_string()];
        let u = BiLassoTrace::parse("^(red) go red (go)^ @-1 !0", &long).unwrap();
        assert_eq!(BiLassoTrace::parse(&u.show(&long), &long).unwrap(), u);
        assert!(BiLassoTrace::parse("^(1) (3)^ @0 !0", &names()).is_err());
        assert!(BiLassoTrace::parse("(1) (2) @0", &names()).is_err());
    }

    #[test]
    fn next_prev_and_reverse_on_members() {
        let ts = first();
        let u = TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::All).unwrap();
        let t = u
            .index_of(&BiLassoTrace::parse("^(1) (2)^ @1 !0", &names()).unwrap())
            .unwrap();
        let mut x = u.empty();
        x.insert(t);
        let nx = u.next(&x);
        assert_eq!(u.show_set(&nx), "{^(1) (2)^ @1 !-1}");
        assert_eq!(u.prev(&nx), x);
        assert!(u.next(&u.empty()).is_empty());
        assert_eq!(u.reverse(&u.reverse(&x)), x);
        assert_eq!(u.show_set(&u.reverse(&x)), "{^(2) (1)^ @0 !0}");
    }

    #[test]
    fn shifts_are_inverse_on_the_interior() {
        let ts = first();
        let u = TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::All).unwrap();
        let inner = u.interior();
        for s in [StateSet(1), StateSet(2)] {
            let x = u.sigma(s).intersection(&inner);
            assert_eq!(u.next(&u.prev(&x)).intersection(&inner), x);
            assert_eq!(u.prev(&u.next(&x)).intersection(&inner), x);
        }
        // boolean structure is preserved everywhere
        let a = u.sigma(StateSet(1));
        let b = u.pi(|s, n| s == n);
        assert_eq!(u.next(&a.union(&b)), u.next(&a).union(&u.next(&b)));
        assert_eq!(
            u.next(&a.intersection(&b)),
            u.next(&a).intersection(&u.next(&b))
        );
        assert_eq!(u.next(&a.complement()), u.next(&a).complement());
    }

    #[test]
    fn universe_shape() {
        let ts = first();
        let u = TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::All).unwrap();
        assert_eq!(u.sigma(StateSet(0b11)), u.full());
        assert!(u.sigma(StateSet(0)).is_empty());
        let m = u.following(&ts);
        assert!(m.is_subset(&u.pi(|a, b| ts.has_edge(a, b))));
        let err = TraceUniverse::new(&ts, Bounds::default(), 1, PathScope::All).unwrap_err();
        assert!(matches!(err, TraceError::SlackTooSmall { .. }));
    }

    #[test]
    fn model_scope_matches_full_scope_on_model_traces() {
        let ts = first();
        let full =
            TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::All).unwrap();
        let small =
            TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::Model).unwrap();
        assert!(small.len() < full.len());
        let count = |u: &TraceUniverse| u.following(&ts).count();
        assert_eq!(count(&full), count(&small));
    }

    #[test]
    fn model_traces_for_a_single_loop() {
        let ts = TransitionSystem::numbered(1, &[(0, 0)]).unwrap();
        let b = Bounds {
            loop_len: 1,
            middle_len: 0,
            offset: 0,
            present: 2,
        };
        let u = TraceUniverse::new(&ts, b, 1, PathScope::All).unwrap();
        assert_eq!(u.following(&ts).intersection(&u.interior()).count(), 5);
    }

    #[test]
    fn model_traces_count_of_the_two_state_system() {
        // paths: constant 1, constant 2, and one switch per position of the
        // first 2 with the middle fitting the bounds
        let ts = first();
        let b = Bounds {
            loop_len: 1,
            middle_len: 2,
            offset: 2,
            present: 2,
        };
        let u = TraceUniverse::new(&ts, b, 2, PathScope::All).unwrap();
        let paths: Vec<&Path> = u.paths().iter().filter(|p| follows(&ts, p)).collect();
        // the switch sits at the start of the right loop: end in [-2, 3]
        let expected = 2 + (-2..=3).count();
        assert_eq!(paths.len(), expected);
        let width = (2 * u.horizon() + 1) as usize;
        assert_eq!(u.following(&ts).count(), expected * width);
        assert_eq!(
            u.following(&ts).intersection(&u.interior()).count(),
            expected * 5
        );
    }

    #[test]
    fn closures() {
        let ts = first();
        let u = TraceUniverse::new(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::All).unwrap();
        assert_eq!(u.fd_closure(&u.full()), u.full());
        assert!(u.fd_closure(&u.empty()).is_empty());
        let c1 = u
            .index_of(&BiLassoTrace::parse("^(1) (1)^ @0 !0", &names()).unwrap())
            .unwrap();
        let mut x = u.empty();
        x.insert(c1);
        let fd = u.fd_closure(&x);
        for t in 0..u.len() {
            let future_ones = u.present(t) == 0 && (0..12).all(|k| u.path(t).at(k) == 0);
            assert_eq!(fd.contains(t), future_ones, "{}", u.show_trace(t));
        }
        assert_eq!(u.bd_closure(&x), u.reverse(&u.fd_closure(&u.reverse(&x))));
    }

    #[test]
    fn wrapped_steps_keep_the_future_and_the_past() {
        let ts = TransitionSystem::numbered(3, &[]).unwrap();
        let b = Bounds {
            loop_len: 2,
            middle_len: 2,
            offset: 1,
            present: 1,
        };
        let u = TraceUniverse::new(&ts, b, 2, PathScope::All).unwrap();
        for t in 0..u.len() {
            let (p, i) = (u.path(t), u.present(t));
            let (s, j) = (u.succ(t), u.present(u.succ(t)));
            assert_eq!(u.path_id(s), u.path_id(t));
            assert!(
                (0..20).all(|k| p.at(j + k) == p.at(i + 1 + k)),
                "{}",
                u.show_trace(t)
            );
            let (r, j) = (u.pred(t), u.present(u.pred(t)));
            assert!(
                (0..20).all(|k| p.at(j - k) == p.at(i - 1 - k)),
                "{}",
                u.show_trace(r)
            );
            assert_eq!(u.rev(u.rev(t)), t);
        }
    }
}
