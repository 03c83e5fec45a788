//! The one-state system's traces are its present times, so closures on its
//! trace sets are closures on subsets of a window `[-w, w]` of integers.

use std::fmt;

/// A subset of the window `[-w, w]`, bit `i + w` standing for `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowSet(pub u64);

/// Largest supported window radius.
pub const MAX_RADIUS: i64 = 12;

impl WindowSet {
    pub fn show(self, radius: i64) -> String {
        let items: Vec<String> = (-radius..=radius)
            .filter(|&i| self.0 >> (i + radius) & 1 == 1)
            .map(|i| i.to_string())
            .collect();
        format!("{{{}}}", items.join(","))
    }
}

/// A closure on the window's subsets (ordered by reverse inclusion).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowClosure {
    /// Everything but the window goes to its intersection with `mask`.
    KeepWithin {
        name: &'static str,
        mask: u64,
        at: i64,
    },
    /// Fixes only the empty set and the window.
    Forall,
}

#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub radius: i64,
}

impl Window {
    pub fn new(radius: i64) -> Self {
        assert!(
            (2..=MAX_RADIUS).contains(&radius),
            "window radius must lie in [2, {MAX_RADIUS}]"
        );
        Window { radius }
    }

    pub fn full(self) -> u64 {
        (1u64 << (2 * self.radius + 1)) - 1
    }

    fn bit(self, i: i64) -> u64 {
        1 << (i + self.radius)
    }

    pub fn filter(self, keep: impl Fn(i64) -> bool) -> u64 {
        (-self.radius..=self.radius)
            .filter(|&i| keep(i))
            .fold(0, |acc, i| acc | self.bit(i))
    }

    pub fn negate(self, x: u64) -> u64 {
        self.full() & !x
    }

    /// `{i : some j >= i lies in x}`
    pub fn eventually(self, x: u64) -> u64 {
        if x == 0 {
            return 0;
        }
        let top = 63 - x.leading_zeros() as i64 - self.radius;
        self.filter(|i| i <= top)
    }

    pub fn apply(self, rho: WindowClosure, x: u64) -> u64 {
        match rho {
            _ if x == self.full() => x,
            WindowClosure::KeepWithin { mask, .. } => x & mask,
            WindowClosure::Forall => 0,
        }
    }

    pub fn evens(self) -> WindowClosure {
        WindowClosure::KeepWithin {
            name: "even",
            mask: self.filter(|i| i.rem_euclid(2) == 0),
            at: 0,
        }
    }

    pub fn odds(self) -> WindowClosure {
        WindowClosure::KeepWithin {
            name: "odd",
            mask: self.filter(|i| i.rem_euclid(2) == 1),
            at: 0,
        }
    }

    /// Keeps the part from `k` on.
    pub fn from(self, k: i64) -> WindowClosure {
        WindowClosure::KeepWithin {
            name: "from",
            mask: self.filter(|i| i >= k),
            at: k,
        }
    }

    pub fn fixpoints(self, rho: WindowClosure) -> Vec<u64> {
        (0..=self.full())
            .filter(|&x| self.apply(rho, x) == x)
            .collect()
    }

    /// Smallest set (in numeric order) with `rho(f(rho(X))) != rho(f(X))`.
    pub fn incompleteness(self, rho: WindowClosure, f: impl Fn(u64) -> u64) -> Option<u64> {
        (0..=self.full()).find(|&x| self.apply(rho, f(self.apply(rho, x))) != self.apply(rho, f(x)))
    }
}

impl fmt::Display for WindowClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowClosure::KeepWithin {
                name: "from", at, ..
            } => write!(f, "from[{at}]"),
            WindowClosure::KeepWithin { name, .. } => write!(f, "{name}"),
            WindowClosure::Forall => write!(f, "forall"),
        }
    }
}

/// One closure's completeness verdict for the operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub closure: String,
    pub complete: bool,
    /// `(X, rho(f(X)), rho(f(rho(X))))` when incomplete.
    pub witness: Option<(WindowSet, WindowSet, WindowSet)>,
}

/// Result of checking the proof's closure families on a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub operator: &'static str,
    pub radius: i64,
    /// Verdicts for the closures the proof combines.
    pub closures: Vec<ClosureVerdict>,
    /// Fixpoints common to all of them (their join).
    pub join: Vec<WindowSet>,
    /// Verdict for the universal closure itself.
    pub forall: ClosureVerdict,
}

impl WitnessReport {
    pub fn all_complete(&self) -> bool {
        self.closures.iter().all(|c| c.complete)
    }

    pub fn show_join(&self) -> String {
        let parts: Vec<String> = self.join.iter().map(|s| s.show(self.radius)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn verdict(w: Window, rho: WindowClosure, f: impl Fn(u64) -> u64 + Copy) -> ClosureVerdict {
    let witness = w.incompleteness(rho, f).map(|x| {
        (
            WindowSet(x),
            WindowSet(w.apply(rho, f(x))),
            WindowSet(w.apply(rho, f(w.apply(rho, x)))),
        )
    });
    ClosureVerdict {
        closure: rho.to_string(),
        complete: witness.is_none(),
        witness,
    }
}

fn report(
    w: Window,
    operator: &'static str,
    closures: &[WindowClosure],
    f: impl Fn(u64) -> u64 + Copy,
) -> WitnessReport {
    let mut join = w.fixpoints(closures[0]);
    for &rho in &closures[1..] {
        join.retain(|&x| w.apply(rho, x) == x);
    }
    let mut join: Vec<WindowSet> = join.into_iter().map(WindowSet).collect();
    join.sort_by_key(|s| (s.0.count_ones(), s.0));
    WitnessReport {
        operator,
        radius: w.radius,
        closures: closures.iter().map(|&rho| verdict(w, rho, f)).collect(),
        join,
        forall: verdict(w, WindowClosure::Forall, f),
    }
}

/// Even and odd closures against windowed negation.
pub fn witness_neg_shell(radius: i64) -> WitnessReport {
    let w = Window::new(radius);
    report(w, "neg", &[w.evens(), w.odds()], move |x| w.negate(x))
}

/// The closures keeping `[k, w]`, for every `k` in the window, against windowed F.
pub fn witness_f_shell(radius: i64) -> WitnessReport {
    let w = Window::new(radius);
    let closures: Vec<WindowClosure> = (-radius..=radius).map(|k| w.from(k)).collect();
    report(w, "F", &closures, move |x| w.eventually(x))
}
