//! Reversible mu-calculus formulas: concrete syntax, the set semantics on
//! trace universes, an exact per-trace evaluator, the abstract state
//! semantics and the branchability checks built on them.

mod det;
mod eval;
mod future;
mod parse;
mod sem;

pub use det::is_ltl_det;
pub(crate) use eval::until_sequence;
pub use eval::{eval_on_trace, eval_sequence};
pub use future::{FutureWords, WordSet};
pub use parse::parse_formula;
pub use sem::{is_branchable, state_sem, state_sem_future, trace_sem, Branchability};

use std::fmt;

use thiserror::Error;

use crate::kripke::{StateSet, TransitionSystem};
use crate::traces::TraceError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("variable {var} occurs under an odd number of negations in its fixpoint body (column {column})")]
    NonMonotone { var: String, column: usize },
    #[error("unknown label or state `{0}`")]
    UnknownAtom(String),
    #[error("unknown state `{0}` in a literal")]
    UnknownState(String),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("{0} is not supported by the per-trace evaluator")]
    Unsupported(&'static str),
    #[error("soundness violated: state semantics {state} is not below the abstraction {abstracted} of the trace semantics")]
    Soundness { state: String, abstracted: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// A state-set literal: a label of the system, a state name, or explicit states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Name(String),
    States(Vec<String>),
}

impl Atom {
    pub fn resolve(&self, ts: &TransitionSystem) -> Result<StateSet, FormulaError> {
        match self {
            Atom::Name(n) => ts
                .label(n)
                .or_else(|| ts.state(n).map(StateSet::singleton))
                .ok_or_else(|| FormulaError::UnknownAtom(n.clone())),
            Atom::States(names) => names
                .iter()
                .map(|n| {
                    ts.state(n)
                        .ok_or_else(|| FormulaError::UnknownState(n.clone()))
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// Traces whose present state lies in the atom's states.
    Sigma(Atom),
    /// Traces whose present step is one of the listed edges.
    Pi(Vec<(String, String)>),
    Var(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Prev(Box<Formula>),
    Reverse(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
    /// Universal quantification over the model traces sharing the present state.
    All(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    Once(Box<Formula>),
    Historically(Box<Formula>),
}

macro_rules! unary {
    ($($fn_name:ident => $variant:ident),* $(,)?) => {
        $(#[allow(clippy::should_implement_trait)]
        pub fn $fn_name(self) -> Formula { Formula::$variant(Box::new(self)) })*
    };
}

macro_rules! binary {
    ($($fn_name:ident => $variant:ident),* $(,)?) => {
        $(pub fn $fn_name(self, other: Formula) -> Formula { Formula::$variant(Box::new(self), Box::new(other)) })*
    };
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Sigma(Atom::Name(name.to_string()))
    }

    pub fn states<S: ToString>(names: impl IntoIterator<Item = S>) -> Formula {
        Formula::Sigma(Atom::States(
            names.into_iter().map(|s| s.to_string()).collect(),
        ))
    }

    pub fn mu(var: &str, body: Formula) -> Formula {
        Formula::Mu(var.to_string(), Box::new(body))
    }

    pub fn nu(var: &str, body: Formula) -> Formula {
        Formula::Nu(var.to_string(), Box::new(body))
    }

    unary! {
        not => Not, next => Next, prev => Prev, reverse => Reverse, all => All,
        eventually => Eventually, always => Always, once => Once, historically => Historically,
    }

    binary! { or => Or, and => And, implies => Implies, until => Until, weak_until => WeakUntil }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Sigma(_) | Pi(_) | Var(_) => vec![],
            Not(a)
            | Next(a)
            | Prev(a)
            | Reverse(a)
            | Mu(_, a)
            | Nu(_, a)
            | All(a)
            | Eventually(a)
            | Always(a)
            | Once(a)
            | Historically(a) => vec![a],
            Or(a, b) | And(a, b) | Implies(a, b) | Until(a, b) | WeakUntil(a, b) => vec![a, b],
        }
    }

    /// Nesting depth of connectives; literals have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// No raw `mu`/`nu`, variables or model guard.
    pub fn is_fixpoint_free(&self) -> bool {
        !matches!(
            self,
            Formula::Mu(..) | Formula::Nu(..) | Formula::Var(_) | Formula::All(_)
        ) && self.children().iter().all(|c| c.is_fixpoint_free())
    }

    /// Only present and future operators: no past, reversal, `pi`,
    /// fixpoints or model guard.
    pub fn is_future(&self) -> bool {
        use Formula::*;
        !matches!(
            self,
            Prev(_)
                | Reverse(_)
                | Once(_)
                | Historically(_)
                | Pi(_)
                | Mu(..)
                | Nu(..)
                | Var(_)
                | All(_)
        ) && self.children().iter().all(|c| c.is_future())
    }

    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Implies(..) => 1,
            Or(..) => 2,
            And(..) => 3,
            Until(..) | WeakUntil(..) => 4,
            Mu(..) | Nu(..) => 0,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        use Formula::*;
        let prec = self.precedence();
        let paren = prec < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            True => write!(f, "true")?,
            False => write!(f, "false")?,
            Sigma(Atom::Name(n)) => write!(f, "{n}")?,
            Sigma(Atom::States(s)) => write!(f, "[S:{{{}}}]", s.join(","))?,
            Pi(edges) => {
                let parts: Vec<String> = edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
                write!(f, "[T:{}]", parts.join(","))?
            }
            Var(v) => write!(f, "{v}")?,
            Mu(v, body) | Nu(v, body) => {
                write!(
                    f,
                    "{} {v}. ",
                    if matches!(self, Mu(..)) { "mu" } else { "nu" }
                )?;
                body.fmt_at(f, 0)?
            }
            Implies(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_at(f, 1)?
            }
            Or(a, b) | And(a, b) => {
                a.fmt_at(f, prec)?;
                write!(f, " {} ", if prec == 2 { "|" } else { "&" })?;
                b.fmt_at(f, prec + 1)?
            }
            Until(a, b) | WeakUntil(a, b) => {
                a.fmt_at(f, 5)?;
                write!(f, " {} ", if matches!(self, Until(..)) { "U" } else { "W" })?;
                b.fmt_at(f, 4)?
            }
            Not(a) | Next(a) | Prev(a) | Reverse(a) | All(a) | Eventually(a) | Always(a)
            | Once(a) | Historically(a) => {
                let op = match self {
                    Not(_) => "!",
                    Next(_) => "()",
                    Prev(_) => "(-)",
                    Reverse(_) => "rev ",
                    All(_) => "A ",
                    Eventually(_) => "F ",
                    Always(_) => "G ",
                    Once(_) => "F- ",
                    _ => "G- ",
                };
                write!(f, "{op}")?;
                a.fmt_at(f, 5)?
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
