//! Agreement of the two trace engines: truth sequences along each path of
//! the universe versus operators on trace sets.
//!
//! Formulas are built bottom-up and grouped by their value in both engines;
//! one representative per group is extended. Each candidate is compared on
//! the interior model traces, and every representative is re-evaluated by
//! the formula-level entry points.

use std::collections::{HashMap, HashSet};

use crate::mucalc::{eval_sequence, trace_sem, Formula, FormulaError};
use crate::traces::{Lasso, Model, TraceSet, TraceUniverse};

#[derive(Clone, Debug, Default)]
pub struct AgreementStats {
    pub candidates: usize,
    pub classes: usize,
    /// Interior model traces each candidate is compared on.
    pub traces: usize,
    pub representatives_checked: usize,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Copy)]
enum Unary {
    Not,
    Next,
    Prev,
    Reverse,
    Eventually,
    Always,
    Once,
    Historically,
}

#[derive(Clone, Copy)]
enum Binary {
    Or,
    And,
    Implies,
    Until,
    WeakUntil,
}

const UNARY: [Unary; 8] = [
    Unary::Not,
    Unary::Next,
    Unary::Prev,
    Unary::Reverse,
    Unary::Eventually,
    Unary::Always,
    Unary::Once,
    Unary::Historically,
];
const BINARY: [Binary; 5] = [
    Binary::Or,
    Binary::And,
    Binary::Implies,
    Binary::Until,
    Binary::WeakUntil,
];

#[derive(Clone)]
struct Value {
    /// Truth along each universe path, by path index.
    seqs: Vec<Lasso<bool>>,
    set: TraceSet,
}

type Pointwise = dyn Fn(&Lasso<bool>, &Lasso<bool>) -> Lasso<bool>;

struct Engines<'a> {
    u: &'a TraceUniverse,
    /// Index of each path's reversal.
    reversal: Vec<usize>,
}

fn until(a: &Lasso<bool>, b: &Lasso<bool>, least: bool) -> Lasso<bool> {
    crate::mucalc::until_sequence(a, b, least)
}

impl Engines<'_> {
    fn reverse_seqs(&self, seqs: &[Lasso<bool>]) -> Vec<Lasso<bool>> {
        self.reversal.iter().map(|&r| seqs[r].reversed()).collect()
    }

    fn unary(&self, op: Unary, v: &Value) -> Value {
        let u = self.u;
        let each = |f: &dyn Fn(&Lasso<bool>) -> Lasso<bool>, seqs: &[Lasso<bool>]| {
            seqs.iter().map(f).collect::<Vec<_>>()
        };
        let t = Lasso::constant(true);
        let f = Lasso::constant(false);
        let eventually = |seqs: &[Lasso<bool>]| each(&|s| until(&t, s, true), seqs);
        let always = |seqs: &[Lasso<bool>]| each(&|s| until(s, &f, false), seqs);
        let f_set = |x: &TraceSet| u.until(&u.full(), x, true);
        let g_set = |x: &TraceSet| u.until(x, &u.empty(), false);
        match op {
            Unary::Not => Value {
                seqs: each(&|s| s.map(|b| !b), &v.seqs),
                set: v.set.complement(),
            },
            Unary::Next => Value {
                seqs: each(&|s| s.shifted(1), &v.seqs),
                set: u.next(&v.set),
            },
            Unary::Prev => Value {
                seqs: each(&|s| s.shifted(-1), &v.seqs),
                set: u.prev(&v.set),
            },
            Unary::Reverse => Value {
                seqs: self.reverse_seqs(&v.seqs),
                set: u.reverse(&v.set),
            },
            Unary::Eventually => Value {
                seqs: eventually(&v.seqs),
                set: f_set(&v.set),
            },
            Unary::Always => Value {
                seqs: always(&v.seqs),
                set: g_set(&v.set),
            },
            Unary::Once => Value {
                seqs: self.reverse_seqs(&eventually(&self.reverse_seqs(&v.seqs))),
                set: u.reverse(&f_set(&u.reverse(&v.set))),
            },
            Unary::Historically => Value {
                seqs: self.reverse_seqs(&always(&self.reverse_seqs(&v.seqs))),
                set: u.reverse(&g_set(&u.reverse(&v.set))),
            },
        }
    }

    fn binary(&self, op: Binary, a: &Value, b: &Value) -> Value {
        let u = self.u;
        let zip = |f: &Pointwise| -> Vec<Lasso<bool>> {
            a.seqs.iter().zip(&b.seqs).map(|(x, y)| f(x, y)).collect()
        };
        match op {
            Binary::Or => Value {
                seqs: zip(&|x, y| x.zip_with(y, |p, q| p || q)),
                set: a.set.union(&b.set),
            },
            Binary::And => Value {
                seqs: zip(&|x, y| x.zip_with(y, |p, q| p && q)),
                set: a.set.intersection(&b.set),
            },
            Binary::Implies => Value {
                seqs: zip(&|x, y| x.zip_with(y, |p, q| !p || q)),
                set: a.set.complement().union(&b.set),
            },
            Binary::Until => Value {
                seqs: zip(&|x, y| until(x, y, true)),
                set: u.until(&a.set, &b.set, true),
            },
            Binary::WeakUntil => Value {
                seqs: zip(&|x, y| until(x, y, false)),
                set: u.until(&a.set, &b.set, false),
            },
        }
    }
}

fn build(
    op_unary: Option<Unary>,
    op_binary: Option<Binary>,
    a: &Formula,
    b: Option<&Formula>,
) -> Formula {
    let a = a.clone();
    match (op_unary, op_binary, b) {
        (Some(op), _, _) => match op {
            Unary::Not => a.not(),
            Unary::Next => a.next(),
            Unary::Prev => a.prev(),
            Unary::Reverse => a.reverse(),
            Unary::Eventually => a.eventually(),
            Unary::Always => a.always(),
            Unary::Once => a.once(),
            Unary::Historically => a.historically(),
        },
        (None, Some(op), Some(b)) => {
            let b = b.clone();
            match op {
                Binary::Or => a.or(b),
                Binary::And => a.and(b),
                Binary::Implies => a.implies(b),
                Binary::Until => a.until(b),
                Binary::WeakUntil => a.weak_until(b),
            }
        }
        _ => unreachable!("an operator and its operands"),
    }
}

struct Sweep<'a> {
    engines: Engines<'a>,
    model: &'a Model,
    /// Interior model traces as `(trace, path, present)`.
    probes: Vec<(usize, usize, i64)>,
    probe_set: TraceSet,
    levels: Vec<Vec<(Value, Formula)>>,
    seen: HashSet<(Vec<Lasso<bool>>, TraceSet)>,
    stats: AgreementStats,
}

impl Sweep<'_> {
    fn compare(&mut self, v: &Value, phi: impl Fn() -> Formula) {
        let u = self.engines.u;
        if let Some(&(t, _, _)) = self
            .probes
            .iter()
            .find(|&&(t, pid, present)| v.seqs[pid].at(present) != v.set.contains(t))
        {
            if self.stats.mismatches.len() < 10 {
                self.stats
                    .mismatches
                    .push(format!("{} at {}", phi(), u.show_trace(t)));
            }
        }
    }

    /// Records a candidate; `keep` is false on the last level, whose
    /// values are never extended.
    fn add(
        &mut self,
        depth: usize,
        v: Value,
        keep: bool,
        phi: impl Fn() -> Formula,
    ) -> Result<(), FormulaError> {
        self.stats.candidates += 1;
        self.compare(&v, &phi);
        let key = (v.seqs.clone(), v.set.clone());
        if !self.seen.insert(key) {
            return Ok(());
        }
        self.stats.classes += 1;
        let phi = phi();
        self.check_representative(&v, &phi)?;
        if keep {
            self.levels[depth].push((v, phi));
        }
        Ok(())
    }

    fn check_representative(&mut self, v: &Value, phi: &Formula) -> Result<(), FormulaError> {
        let u = self.engines.u;
        let ts = self.model.system();
        self.stats.representatives_checked += 1;
        let set = trace_sem(phi, self.model)?;
        let mut problems = Vec::new();
        if set.intersection(&self.probe_set) != v.set.intersection(&self.probe_set) {
            problems.push("trace semantics");
        }
        for (pid, path) in u.paths().iter().enumerate() {
            if eval_sequence(phi, path, ts)? != v.seqs[pid] {
                problems.push("path sequence");
                break;
            }
        }
        if !problems.is_empty() && self.stats.mismatches.len() < 10 {
            self.stats.mismatches.push(format!(
                "{phi}: {} differ from the composed value",
                problems.join(" and ")
            ));
        }
        Ok(())
    }
}

/// Compares both engines on every fixpoint-free formula over the atoms
/// `true`, `false` and the given propositions, up to syntax depth
/// `max_depth`, using past, future and reversal operators.
pub fn agreement_sweep(
    model: &Model,
    atoms: &[&str],
    max_depth: usize,
) -> Result<AgreementStats, FormulaError> {
    let u = model.universe();
    let ts = model.system();
    let index: HashMap<_, usize> = u
        .paths()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let reversal = u.paths().iter().map(|p| index[&p.reversed()]).collect();
    let probe_set = model.traces().intersection(&u.interior());
    let probes: Vec<(usize, usize, i64)> = probe_set
        .iter()
        .map(|t| (t, u.path_id(t), u.present(t)))
        .collect();
    let mut sweep = Sweep {
        engines: Engines { u, reversal },
        model,
        stats: AgreementStats {
            traces: probes.len(),
            ..Default::default()
        },
        probes,
        probe_set,
        levels: vec![Vec::new(); max_depth + 1],
        seen: HashSet::new(),
    };
    let constant = |b: bool| Value {
        seqs: vec![Lasso::constant(b); u.paths().len()],
        set: if b { u.full() } else { u.empty() },
    };
    sweep.add(0, constant(true), true, || Formula::True)?;
    sweep.add(0, constant(false), true, || Formula::False)?;
    for name in atoms {
        let phi = Formula::atom(name);
        let states = match &phi {
            Formula::Sigma(atom) => atom.resolve(ts)?,
            _ => unreachable!("atoms are state formulas"),
        };
        let v = Value {
            seqs: u
                .paths()
                .iter()
                .map(|p| p.map(|s| states.contains(s as usize)))
                .collect(),
            set: u.sigma(states),
        };
        sweep.add(0, v, true, || phi.clone())?;
    }
    for d in 1..=max_depth {
        let keep = d < max_depth;
        let previous = sweep.levels[d - 1].clone();
        let below: Vec<(Value, Formula)> = sweep.levels[..d].iter().flatten().cloned().collect();
        let lower: Vec<(Value, Formula)> =
            sweep.levels[..d - 1].iter().flatten().cloned().collect();
        for (a, fa) in &previous {
            for op in UNARY {
                let v = sweep.engines.unary(op, a);
                sweep.add(d, v, keep, || build(Some(op), None, fa, None))?;
            }
            for (b, fb) in &below {
                for op in BINARY {
                    let v = sweep.engines.binary(op, a, b);
                    sweep.add(d, v, keep, || build(None, Some(op), fa, Some(fb)))?;
                }
            }
        }
        // the other operand order for non-commutative operators
        for (a, fa) in &lower {
            for (b, fb) in &previous {
                for op in [Binary::Implies, Binary::Until, Binary::WeakUntil] {
                    let v = sweep.engines.binary(op, a, b);
                    sweep.add(d, v, keep, || build(None, Some(op), fa, Some(fb)))?;
                }
            }
        }
    }
    Ok(sweep.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{StateSet, TransitionSystem};
    use crate::traces::{Bounds, PathScope, DEFAULT_SLACK};

    #[test]
    fn depth_two_on_the_first_example() {
        let ts = TransitionSystem::numbered(2, &[(0, 0), (0, 1), (1, 1)])
            .unwrap()
            .with_label("p", StateSet(0b01))
            .with_label("q", StateSet(0b10));
        let model = Model::build(&ts, Bounds::default(), DEFAULT_SLACK, PathScope::Model).unwrap();
        let stats = agreement_sweep(&model, &["p", "q"], 2).unwrap();
        assert!(stats.mismatches.is_empty(), "{:?}", stats.mismatches);
        assert!(stats.classes > 20 && stats.representatives_checked == stats.classes);
    }
}
