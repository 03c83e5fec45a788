//! Finite complete lattices, upper closure operators, monotone functions
//! and the fixpoint/adjoint engines built on them.

mod format;
mod func;
mod uco;

pub use format::{parse_lat, LatFile};
pub use func::MonotoneFn;
pub use uco::{moore_closure, Uco};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Upper bound on explicit lattice size; meet/join tables are quadratic.
pub const MAX_EXPLICIT_ELEMENTS: usize = 1024;
/// Upper bound on powerset items (elements are bitmasks).
pub const MAX_POWERSET_ITEMS: usize = 30;
/// Default budget for exhaustive monotonicity/additivity comparisons.
pub const DEFAULT_CHECK_CAP: u64 = 1 << 16;

/// An element of a finite lattice. For explicit lattices it is an index,
/// for powerset lattices a bitmask over the item list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Elem(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("closures live on different carriers")]
    CarrierMismatch,
    #[error("family is not meet-closed: meet of {a} and {b} is missing")]
    NotMeetClosed { a: String, b: String },
    #[error("function `{name}` is not monotone: {detail}")]
    NotMonotone { name: String, detail: String },
    #[error("function `{name}` is not additive: f({a} join {b}) differs from f({a}) join f({b})")]
    NotAdditive { name: String, a: String, b: String },
    #[error("function `{name}` does not preserve the bottom element")]
    NotStrict { name: String },
    #[error("{what} exceeds the enumeration cap of {cap}")]
    CapExceeded { what: String, cap: u64 },
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("function `{name}` is only defined on powerset carriers")]
    NeedsPowerset { name: String },
}

/// Order used by a powerset lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetOrder {
    Subset,
    Superset,
}

impl fmt::Display for SetOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetOrder::Subset => write!(f, "subset"),
            SetOrder::Superset => write!(f, "superset"),
        }
    }
}

/// A finite complete lattice given by an explicit order relation.
#[derive(Debug, Clone)]
pub struct ExplicitLattice {
    names: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<u32>>,
    join: Vec<Vec<u32>>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    rank: Vec<usize>,
    top: usize,
    bottom: usize,
}

impl ExplicitLattice {
    /// Builds a lattice from element names and (covering) pairs `a <= b`;
    /// reflexive-transitive closure is taken here.
    #[allow(clippy::needless_range_loop)] // adjacency matrices read best indexed
    pub fn new(names: Vec<String>, pairs: &[(String, String)]) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::NotALattice("no elements".into()));
        }
        if n > MAX_EXPLICIT_ELEMENTS {
            return Err(LatticeError::CapExceeded {
                what: format!("explicit lattice with {n} elements"),
                cap: MAX_EXPLICIT_ELEMENTS as u64,
            });
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(LatticeError::NotALattice(format!(
                    "duplicate element `{name}`"
                )));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            let ia = *index
                .get(a)
                .ok_or_else(|| LatticeError::UnknownElement(a.clone()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| LatticeError::UnknownElement(b.clone()))?;
            leq[ia][ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(LatticeError::NotALattice(format!(
                        "`{}` and `{}` are mutually below each other",
                        names[i], names[j]
                    )));
                }
            }
        }
        let glb = |i: usize, j: usize| -> Option<usize> {
            let lower: Vec<usize> = (0..n).filter(|&k| leq[k][i] && leq[k][j]).collect();
            lower
                .iter()
                .copied()
                .find(|&m| lower.iter().all(|&k| leq[k][m]))
        };
        let lub = |i: usize, j: usize| -> Option<usize> {
            let upper: Vec<usize> = (0..n).filter(|&k| leq[i][k] && leq[j][k]).collect();
            upper
                .iter()
                .copied()
                .find(|&m| upper.iter().all(|&k| leq[m][k]))
        };
        let mut meet = vec![vec![0u32; n]; n];
        let mut join = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in i..n {
                let m = glb(i, j).ok_or_else(|| {
                    LatticeError::NotALattice(format!(
                        "no meet for `{}` and `{}`",
                        names[i], names[j]
                    ))
                })?;
                let l = lub(i, j).ok_or_else(|| {
                    LatticeError::NotALattice(format!(
                        "no join for `{}` and `{}`",
                        names[i], names[j]
                    ))
                })?;
                meet[i][j] = m as u32;
                meet[j][i] = m as u32;
                join[i][j] = l as u32;
                join[j][i] = l as u32;
            }
        }
        let top = (0..n).fold(0, |acc, k| join[acc][k] as usize);
        let bottom = (0..n).fold(0, |acc, k| meet[acc][k] as usize);
        let covers = |i: usize, j: usize| {
            i != j && leq[i][j] && !(0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j])
        };
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if covers(i, j) {
                    upper[i].push(j);
                    lower[j].push(i);
                }
            }
        }
        // longest chain from bottom, by increasing size of the down-set
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (0..n).filter(|&k| leq[k][i]).count());
        let mut rank = vec![0usize; n];
        for &i in &order {
            rank[i] = lower[i].iter().map(|&k| rank[k] + 1).max().unwrap_or(0);
        }
        Ok(ExplicitLattice {
            names,
            index,
            leq,
            meet,
            join,
            upper,
            lower,
            rank,
            top,
            bottom,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// The powerset of a finite item list, ordered by inclusion or reverse inclusion.
#[derive(Debug, Clone)]
pub struct PowersetLattice {
    items: Vec<String>,
    item_index: HashMap<String, usize>,
    order: SetOrder,
    full: u64,
}

impl PowersetLattice {
    pub fn new(items: Vec<String>, order: SetOrder) -> Result<Self, LatticeError> {
        if items.len() > MAX_POWERSET_ITEMS {
            return Err(LatticeError::CapExceeded {
                what: format!("powerset over {} items", items.len()),
                cap: MAX_POWERSET_ITEMS as u64,
            });
        }
        let mut item_index = HashMap::new();
        for (i, it) in items.iter().enumerate() {
            if item_index.insert(it.clone(), i).is_some() {
                return Err(LatticeError::NotALattice(format!("duplicate item `{it}`")));
            }
        }
        let full = if items.is_empty() {
            0
        } else {
            u64::MAX >> (64 - items.len())
        };
        Ok(PowersetLattice {
            items,
            item_index,
            order,
            full,
        })
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn order(&self) -> SetOrder {
        self.order
    }

    pub fn item(&self, name: &str) -> Option<usize> {
        self.item_index.get(name).copied()
    }

    /// The element holding exactly the named items.
    pub fn set_of<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        items: I,
    ) -> Result<Elem, LatticeError> {
        let mut mask = 0u64;
        for it in items {
            let i = self
                .item(it)
                .ok_or_else(|| LatticeError::UnknownElement(it.to_string()))?;
            mask |= 1 << i;
        }
        Ok(Elem(mask))
    }

    pub fn full(&self) -> Elem {
        Elem(self.full)
    }
}

/// A finite complete lattice: either explicit or a powerset.
#[derive(Debug, Clone)]
pub struct Lattice {
    kind: LatticeKind,
    aliases: HashMap<Elem, String>,
}

#[derive(Debug, Clone)]
enum LatticeKind {
    Explicit(ExplicitLattice),
    Powerset(PowersetLattice),
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (LatticeKind::Explicit(a), LatticeKind::Explicit(b)) => {
                a.names == b.names && a.leq == b.leq
            }
            (LatticeKind::Powerset(a), LatticeKind::Powerset(b)) => {
                a.items == b.items && a.order == b.order
            }
            _ => false,
        }
    }
}

impl Lattice {
    pub fn explicit(names: Vec<String>, pairs: &[(String, String)]) -> Result<Self, LatticeError> {
        Ok(Lattice {
            kind: LatticeKind::Explicit(ExplicitLattice::new(names, pairs)?),
            aliases: HashMap::new(),
        })
    }

    pub fn powerset(items: Vec<String>, order: SetOrder) -> Result<Self, LatticeError> {
        Ok(Lattice {
            kind: LatticeKind::Powerset(PowersetLattice::new(items, order)?),
            aliases: HashMap::new(),
        })
    }

    /// Registers a display name for an element.
    pub fn add_alias(&mut self, e: Elem, name: impl Into<String>) {
        self.aliases.insert(e, name.into());
    }

    pub fn as_powerset(&self) -> Option<&PowersetLattice> {
        match &self.kind {
            LatticeKind::Powerset(p) => Some(p),
            LatticeKind::Explicit(_) => None,
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitLattice> {
        match &self.kind {
            LatticeKind::Explicit(e) => Some(e),
            LatticeKind::Powerset(_) => None,
        }
    }

    pub fn size(&self) -> u64 {
        match &self.kind {
            LatticeKind::Explicit(e) => e.names.len() as u64,
            LatticeKind::Powerset(p) => 1u64 << p.items.len(),
        }
    }

    pub fn contains(&self, x: Elem) -> bool {
        match &self.kind {
            LatticeKind::Explicit(e) => (x.0 as usize) < e.names.len(),
            LatticeKind::Powerset(p) => x.0 & !p.full == 0,
        }
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        match &self.kind {
            LatticeKind::Explicit(e) => e.leq[a.0 as usize][b.0 as usize],
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => a.0 & !b.0 == 0,
                SetOrder::Superset => b.0 & !a.0 == 0,
            },
        }
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        match &self.kind {
            LatticeKind::Explicit(e) => Elem(e.meet[a.0 as usize][b.0 as usize] as u64),
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => Elem(a.0 & b.0),
                SetOrder::Superset => Elem(a.0 | b.0),
            },
        }
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        match &self.kind {
            LatticeKind::Explicit(e) => Elem(e.join[a.0 as usize][b.0 as usize] as u64),
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => Elem(a.0 | b.0),
                SetOrder::Superset => Elem(a.0 & b.0),
            },
        }
    }

    pub fn top(&self) -> Elem {
        match &self.kind {
            LatticeKind::Explicit(e) => Elem(e.top as u64),
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => Elem(p.full),
                SetOrder::Superset => Elem(0),
            },
        }
    }

    pub fn bottom(&self) -> Elem {
        match &self.kind {
            LatticeKind::Explicit(e) => Elem(e.bottom as u64),
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => Elem(0),
                SetOrder::Superset => Elem(p.full),
            },
        }
    }

    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        xs.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }

    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        xs.into_iter()
            .fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    /// All elements, in index (explicit) or bitmask (powerset) order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size()).map(Elem)
    }

    /// Height of an element above bottom.
    pub fn rank(&self, x: Elem) -> usize {
        match &self.kind {
            LatticeKind::Explicit(e) => e.rank[x.0 as usize],
            LatticeKind::Powerset(p) => match p.order {
                SetOrder::Subset => x.0.count_ones() as usize,
                SetOrder::Superset => p.items.len() - x.0.count_ones() as usize,
            },
        }
    }

    /// Elements ordered by rank with bottom moved to the end: counterexample
    /// searches report witnesses built from atoms before degenerate ones.
    pub fn witness_order(&self) -> Vec<Elem> {
        let bottom = self.bottom();
        let mut xs: Vec<Elem> = self.elements().filter(|&x| x != bottom).collect();
        xs.sort_by_key(|&x| (self.rank(x), x));
        xs.push(bottom);
        xs
    }

    pub fn upper_covers(&self, x: Elem) -> Vec<Elem> {
        match &self.kind {
            LatticeKind::Explicit(e) => e.upper[x.0 as usize]
                .iter()
                .map(|&i| Elem(i as u64))
                .collect(),
            LatticeKind::Powerset(p) => {
                let bits = (0..p.items.len()).map(|i| 1u64 << i);
                match p.order {
                    SetOrder::Subset => bits
                        .filter(|b| x.0 & b == 0)
                        .map(|b| Elem(x.0 | b))
                        .collect(),
                    SetOrder::Superset => bits
                        .filter(|b| x.0 & b != 0)
                        .map(|b| Elem(x.0 & !b))
                        .collect(),
                }
            }
        }
    }

    pub fn lower_covers(&self, x: Elem) -> Vec<Elem> {
        match &self.kind {
            LatticeKind::Explicit(e) => e.lower[x.0 as usize]
                .iter()
                .map(|&i| Elem(i as u64))
                .collect(),
            LatticeKind::Powerset(p) => {
                let bits = (0..p.items.len()).map(|i| 1u64 << i);
                match p.order {
                    SetOrder::Subset => bits
                        .filter(|b| x.0 & b != 0)
                        .map(|b| Elem(x.0 & !b))
                        .collect(),
                    SetOrder::Superset => bits
                        .filter(|b| x.0 & b == 0)
                        .map(|b| Elem(x.0 | b))
                        .collect(),
                }
            }
        }
    }

    /// Maximal elements of a down-closed set given by its membership test.
    pub fn maximal_in_downset<F: Fn(Elem) -> bool>(&self, member: F) -> Vec<Elem> {
        self.elements()
            .filter(|&x| member(x) && self.upper_covers(x).into_iter().all(|y| !member(y)))
            .collect()
    }

    /// Maximal elements of an arbitrary finite set.
    pub fn maximal(&self, xs: &[Elem]) -> Vec<Elem> {
        let mut out: Vec<Elem> = xs
            .iter()
            .copied()
            .filter(|&x| !xs.iter().any(|&y| self.lt(x, y)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Looks an element up by alias, explicit name or `{item,...}` literal.
    pub fn parse_elem(&self, text: &str) -> Result<Elem, LatticeError> {
        if let Some((e, _)) = self.aliases.iter().find(|(_, name)| name.as_str() == text) {
            return Ok(*e);
        }
        match &self.kind {
            LatticeKind::Explicit(e) => e
                .index
                .get(text)
                .map(|&i| Elem(i as u64))
                .ok_or_else(|| LatticeError::UnknownElement(text.to_string())),
            LatticeKind::Powerset(p) => {
                let inner = text
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| LatticeError::UnknownElement(text.to_string()))?;
                p.set_of(inner.split(',').map(str::trim).filter(|s| !s.is_empty()))
            }
        }
    }

    /// Display form: alias if registered, otherwise the name or set literal.
    pub fn show(&self, x: Elem) -> String {
        if let Some(a) = self.aliases.get(&x) {
            return a.clone();
        }
        self.show_raw(x)
    }

    pub fn show_raw(&self, x: Elem) -> String {
        match &self.kind {
            LatticeKind::Explicit(e) => e.names[x.0 as usize].clone(),
            LatticeKind::Powerset(p) => {
                let items: Vec<&str> = (0..p.items.len())
                    .filter(|i| x.0 & (1 << i) != 0)
                    .map(|i| p.items[i].as_str())
                    .collect();
                format!("{{{}}}", items.join(","))
            }
        }
    }

    /// Exhaustively checks that `f` is monotone in every argument.
    pub fn check_monotone(&self, f: &MonotoneFn, cap: u64) -> Result<(), LatticeError> {
        if f.monotone_by_construction() {
            return Ok(());
        }
        let n = self.size();
        let covers: u64 = self
            .elements()
            .map(|x| self.upper_covers(x).len() as u64)
            .sum();
        let work = covers.saturating_mul(n.saturating_pow(f.arity().saturating_sub(1) as u32));
        if work > cap {
            return Err(LatticeError::CapExceeded {
                what: format!("monotonicity check of `{}`", f.name()),
                cap,
            });
        }
        let tuples = self.tuples(f.arity());
        for args in &tuples {
            for pos in 0..args.len() {
                for up in self.upper_covers(args[pos]) {
                    let mut bigger = args.clone();
                    bigger[pos] = up;
                    let (lo, hi) = (f.apply(self, args), f.apply(self, &bigger));
                    if !self.leq(lo, hi) {
                        return Err(LatticeError::NotMonotone {
                            name: f.name().to_string(),
                            detail: format!(
                                "argument {} raised from {} to {} maps {} to {}",
                                pos + 1,
                                self.show(args[pos]),
                                self.show(up),
                                self.show(lo),
                                self.show(hi)
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// All argument tuples of the given arity, in witness order.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<Elem>> {
        let order = self.witness_order();
        let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    order.iter().map(move |&x| {
                        let mut t = prefix.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Least fixpoint by ascending iteration from bottom.
    pub fn lfp(&self, f: &MonotoneFn) -> Result<Elem, LatticeError> {
        self.iterate(f, self.bottom(), true)
    }

    /// Greatest fixpoint by descending iteration from top.
    pub fn gfp(&self, f: &MonotoneFn) -> Result<Elem, LatticeError> {
        self.iterate(f, self.top(), false)
    }

    fn iterate(&self, f: &MonotoneFn, start: Elem, ascending: bool) -> Result<Elem, LatticeError> {
        if f.arity() != 1 {
            return Err(LatticeError::Arity {
                name: f.name().to_string(),
                expected: 1,
                got: f.arity(),
            });
        }
        let mut x = start;
        loop {
            let y = f.apply(self, &[x]);
            if y == x {
                return Ok(x);
            }
            let progressing = if ascending {
                self.leq(x, y)
            } else {
                self.leq(y, x)
            };
            if !progressing {
                return Err(LatticeError::NotMonotone {
                    name: f.name().to_string(),
                    detail: format!("iteration moved from {} to {}", self.show(x), self.show(y)),
                });
            }
            x = y;
        }
    }

    /// The right adjoint `y -> join{x : f(x) <= y}` of an additive unary `f`.
    pub fn right_adjoint(&self, f: &MonotoneFn, cap: u64) -> Result<MonotoneFn, LatticeError> {
        if f.arity() != 1 {
            return Err(LatticeError::Arity {
                name: f.name().to_string(),
                expected: 1,
                got: f.arity(),
            });
        }
        if let Some(adj) = f.lifted_adjoint(self) {
            return Ok(adj);
        }
        self.check_additive(f, cap)?;
        let xs: Vec<Elem> = self.elements().collect();
        let images: Vec<Elem> = xs.iter().map(|&x| f.apply(self, &[x])).collect();
        let table = self
            .elements()
            .map(|y| {
                let best = xs
                    .iter()
                    .zip(&images)
                    .filter(|(_, &fx)| self.leq(fx, y))
                    .fold(self.bottom(), |acc, (&x, _)| self.join(acc, x));
                (vec![y], best)
            })
            .collect();
        Ok(MonotoneFn::table(format!("{}^r", f.name()), 1, table))
    }

    /// Checks that a unary `f` preserves bottom and binary joins.
    pub fn check_additive(&self, f: &MonotoneFn, cap: u64) -> Result<(), LatticeError> {
        if f.additive_by_construction(self) {
            return Ok(());
        }
        let n = self.size();
        if n.saturating_mul(n) > cap {
            return Err(LatticeError::CapExceeded {
                what: format!("additivity check of `{}`", f.name()),
                cap,
            });
        }
        if f.apply(self, &[self.bottom()]) != self.bottom() {
            return Err(LatticeError::NotStrict {
                name: f.name().to_string(),
            });
        }
        for a in self.elements() {
            for b in self.elements().filter(|&b| b > a) {
                let lhs = f.apply(self, &[self.join(a, b)]);
                let rhs = self.join(f.apply(self, &[a]), f.apply(self, &[b]));
                if lhs != rhs {
                    return Err(LatticeError::NotAdditive {
                        name: f.name().to_string(),
                        a: self.show(a),
                        b: self.show(b),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Lattice {
        let names = ["bot", "a", "b", "top"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let pairs: Vec<(String, String)> = [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        Lattice::explicit(names, &pairs).unwrap()
    }

    #[test]
    fn explicit_meets_and_joins() {
        let l = diamond();
        let a = l.parse_elem("a").unwrap();
        let b = l.parse_elem("b").unwrap();
        assert_eq!(l.show(l.meet(a, b)), "bot");
        assert_eq!(l.show(l.join(a, b)), "top");
        assert_eq!(l.show(l.top()), "top");
        assert_eq!(l.show(l.bottom()), "bot");
        assert_eq!(l.rank(l.top()), 2);
        assert_eq!(l.upper_covers(a), vec![l.top()]);
    }

    #[test]
    fn rejects_posets_without_meets() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        // two minimal elements and two maximal ones, fully connected: no meet of the tops
        let pairs: Vec<(String, String)> = [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        assert!(matches!(
            Lattice::explicit(names, &pairs),
            Err(LatticeError::NotALattice(_))
        ));
    }

    #[test]
    fn rejects_cycles() {
        let names: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let pairs = vec![
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
        ];
        assert!(Lattice::explicit(names, &pairs).is_err());
    }

    #[test]
    fn powerset_orders() {
        let items: Vec<String> = ["1", "2"].iter().map(|s| s.to_string()).collect();
        let sub = Lattice::powerset(items.clone(), SetOrder::Subset).unwrap();
        let sup = Lattice::powerset(items, SetOrder::Superset).unwrap();
        let one = sub.parse_elem("{1}").unwrap();
        assert!(sub.leq(sub.bottom(), one));
        assert!(sup.leq(sup.parse_elem("{1,2}").unwrap(), one));
        assert_eq!(sub.top(), sup.bottom());
        assert_eq!(sub.show(sub.top()), "{1,2}");
        assert_eq!(sup.witness_order().last(), Some(&sup.bottom()));
    }

    #[test]
    fn lfp_and_gfp_of_simple_maps() {
        let l = diamond();
        let a = l.parse_elem("a").unwrap();
        let id = MonotoneFn::identity();
        assert_eq!(l.lfp(&id).unwrap(), l.bottom());
        assert_eq!(l.gfp(&id).unwrap(), l.top());
        let join_a = MonotoneFn::native("join_a", 1, move |lat, xs| lat.join(xs[0], a));
        assert_eq!(l.lfp(&join_a).unwrap(), a);
    }

    #[test]
    fn lfp_reports_non_monotone_steps() {
        let l = diamond();
        let a = l.parse_elem("a").unwrap();
        let b = l.parse_elem("b").unwrap();
        let flip = MonotoneFn::native("flip", 1, move |_, xs| if xs[0] == a { b } else { a });
        assert!(matches!(
            l.lfp(&flip),
            Err(LatticeError::NotMonotone { .. })
        ));
    }

    #[test]
    fn right_adjoint_of_identity_is_identity() {
        let l = diamond();
        let adj = l
            .right_adjoint(&MonotoneFn::identity(), DEFAULT_CHECK_CAP)
            .unwrap();
        for x in l.elements() {
            assert_eq!(adj.apply(&l, &[x]), x);
        }
    }

    #[test]
    fn right_adjoint_rejects_non_additive() {
        let l = diamond();
        let top = l.top();
        let bot = l.bottom();
        // maps a and b to bottom but their join to top
        let f = MonotoneFn::native(
            "pinch",
            1,
            move |_, xs| if xs[0] == top { top } else { bot },
        );
        assert!(matches!(
            l.right_adjoint(&f, DEFAULT_CHECK_CAP),
            Err(LatticeError::NotAdditive { .. })
        ));
    }

    #[test]
    fn maximal_in_downset_matches_pairwise_maximal() {
        let l =
            Lattice::powerset((0..4).map(|i| i.to_string()).collect(), SetOrder::Subset).unwrap();
        let member = |x: Elem| x.0 & 0b1001 == 0 || x.0 == 0b0001;
        let all: Vec<Elem> = l.elements().filter(|&x| member(x)).collect();
        assert_eq!(l.maximal_in_downset(member), l.maximal(&all));
    }

    use proptest::prelude::*;

    fn p4() -> Lattice {
        Lattice::powerset((0..4).map(|i| i.to_string()).collect(), SetOrder::Subset).unwrap()
    }

    /// A monotone map built as `x -> join of seeds[y] over y <= x`.
    fn monotone_from(seeds: Vec<u64>) -> MonotoneFn {
        MonotoneFn::native("m", 1, move |lat, xs| {
            lat.elements()
                .filter(|&y| lat.leq(y, xs[0]))
                .fold(lat.bottom(), |acc, y| {
                    lat.join(acc, Elem(seeds[y.0 as usize]))
                })
        })
    }

    fn lifted_from(images: Vec<u64>) -> MonotoneFn {
        MonotoneFn::lifted("g", 1, 4, images)
    }

    #[test]
    fn adjoint_of_cyclic_shift_is_the_inverse_shift() {
        // traces of a one-state system with present time taken modulo 5, ordered by reverse inclusion
        let items: Vec<String> = (0..5).map(|i| format!("t{i}")).collect();
        let lat = Lattice::powerset(items, SetOrder::Superset).unwrap();
        let shift = |d: usize| {
            MonotoneFn::native(format!("shift{d}"), 1, move |_, xs| {
                let mut out = 0u64;
                for i in 0..5 {
                    if xs[0].0 & (1 << i) != 0 {
                        out |= 1 << ((i + d) % 5);
                    }
                }
                Elem(out)
            })
        };
        let next = shift(4);
        let prev = shift(1);
        let adj = lat.right_adjoint(&next, DEFAULT_CHECK_CAP).unwrap();
        for y in lat.elements() {
            assert_eq!(adj.apply(&lat, &[y]), prev.apply(&lat, &[y]));
        }
    }

    proptest! {
        #[test]
        fn fixpoints_match_exhaustive_search(seeds in proptest::collection::vec(0u64..16, 16)) {
            let lat = p4();
            let f = monotone_from(seeds);
            lat.check_monotone(&f, DEFAULT_CHECK_CAP).unwrap();
            let pre: Vec<Elem> = lat.elements().filter(|&x| lat.leq(f.apply(&lat, &[x]), x)).collect();
            let post: Vec<Elem> = lat.elements().filter(|&x| lat.leq(x, f.apply(&lat, &[x]))).collect();
            prop_assert_eq!(lat.lfp(&f).unwrap(), lat.meet_all(pre));
            prop_assert_eq!(lat.gfp(&f).unwrap(), lat.join_all(post));
        }

        #[test]
        fn adjunction_round_trips(images in proptest::collection::vec(0u64..16, 4)) {
            let lat = p4();
            let f = lifted_from(images);
            let fr = lat.right_adjoint(&f, DEFAULT_CHECK_CAP).unwrap();
            for x in lat.elements() {
                for y in lat.elements() {
                    prop_assert_eq!(lat.leq(f.apply(&lat, &[x]), y), lat.leq(x, fr.apply(&lat, &[y])));
                }
                let fx = f.apply(&lat, &[x]);
                prop_assert_eq!(f.apply(&lat, &[fr.apply(&lat, &[fx])]), fx);
                let frx = fr.apply(&lat, &[x]);
                prop_assert_eq!(fr.apply(&lat, &[f.apply(&lat, &[frx])]), frx);
            }
        }
    }
}
