use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::traces::{TraceSet, TraceUniverse};

use super::ShellError;

/// Enumeration limit for union-closed families.
pub const DEFAULT_MEMBER_CAP: usize = 1 << 12;

/// A union-closed family of trace sets, presented lazily.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// All unions of the generators (the empty union included).
    Generated(Vec<TraceSet>),
    /// Every subset of the base set.
    Powerset(TraceSet),
}

/// An upper closure on trace sets ordered by reverse inclusion, given by
/// its fixpoints: `apply(X)` is the largest fixpoint inside `X`.
///
/// Sets are compared on the `observed` region only. Generators keep their
/// traces outside it, so that shifting a member by one step stays exact on
/// the region.
#[derive(Clone)]
pub struct TraceUco {
    universe: Arc<TraceUniverse>,
    family: Family,
    observed: TraceSet,
}

impl fmt::Debug for TraceUco {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Generated(g) => write!(f, "TraceUco({} generators)", g.len()),
            Family::Powerset(b) => write!(f, "TraceUco(all subsets of {} traces)", b.count()),
        }
    }
}

impl PartialEq for TraceUco {
    fn eq(&self, other: &Self) -> bool {
        match (&self.family, &other.family) {
            (Family::Powerset(a), Family::Powerset(b)) => a == b,
            _ => self.irreducibles() == other.irreducibles(),
        }
    }
}

impl TraceUco {
    pub fn generated(universe: Arc<TraceUniverse>, generators: Vec<TraceSet>) -> Self {
        let observed = universe.full();
        Self::observed_on(universe, generators, observed)
    }

    /// Generated family whose sets are compared on `observed` only.
    pub fn observed_on(
        universe: Arc<TraceUniverse>,
        generators: Vec<TraceSet>,
        observed: TraceSet,
    ) -> Self {
        let mut seen = HashSet::new();
        let gens = generators
            .into_iter()
            .filter(|g| !g.intersection(&observed).is_empty() && seen.insert(g.clone()))
            .collect();
        TraceUco {
            universe,
            family: Family::Generated(gens),
            observed,
        }
    }

    pub fn powerset(universe: Arc<TraceUniverse>, base: TraceSet) -> Self {
        let observed = universe.full();
        TraceUco {
            universe,
            family: Family::Powerset(base),
            observed,
        }
    }

    pub fn powerset_observed_on(
        universe: Arc<TraceUniverse>,
        base: TraceSet,
        observed: TraceSet,
    ) -> Self {
        TraceUco {
            universe,
            family: Family::Powerset(base),
            observed,
        }
    }

    pub fn observed(&self) -> &TraceSet {
        &self.observed
    }

    /// Equality of two sets as seen by this closure.
    pub fn same(&self, a: &TraceSet, b: &TraceSet) -> bool {
        a.intersection(&self.observed) == b.intersection(&self.observed)
    }

    pub fn universe(&self) -> &Arc<TraceUniverse> {
        &self.universe
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn apply(&self, x: &TraceSet) -> TraceSet {
        match &self.family {
            Family::Powerset(base) => x.intersection(base),
            Family::Generated(gens) => gens
                .iter()
                .filter(|g| g.intersection(&self.observed).is_subset(x))
                .fold(self.universe.empty(), |acc, g| acc.union(g)),
        }
    }

    pub fn is_fixpoint(&self, x: &TraceSet) -> bool {
        self.same(&self.apply(x), x)
    }

    /// Generators that are not unions of smaller generators, sorted.
    pub fn irreducibles(&self) -> Vec<TraceSet> {
        let gens: Vec<TraceSet> = match &self.family {
            Family::Generated(g) => g.clone(),
            Family::Powerset(base) => base
                .iter()
                .map(|t| {
                    let mut s = self.universe.empty();
                    s.insert(t);
                    s
                })
                .collect(),
        };
        let mut out: Vec<TraceSet> = gens
            .iter()
            .filter(|g| {
                let below = gens
                    .iter()
                    .filter(|h| h != g && h.is_subset(g))
                    .fold(self.universe.empty(), |acc, h| acc.union(h));
                below != **g
            })
            .cloned()
            .collect();
        out.sort_by_key(|s| (s.count(), s.iter().collect::<Vec<_>>()));
        out
    }

    /// All fixpoints, smallest first, or an error past `cap`.
    pub fn members(&self, cap: usize) -> Result<Vec<TraceSet>, ShellError> {
        let gens = self.irreducibles();
        if !matches!(self.family, Family::Generated(_)) && gens.len() > 20 {
            return Err(ShellError::TooLarge(cap));
        }
        if gens.len() < usize::BITS as usize && (1usize << gens.len()) <= cap {
            let mut all: HashSet<TraceSet> = HashSet::new();
            for mask in 0..1usize << gens.len() {
                let set = (0..gens.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(self.universe.empty(), |acc, i| acc.union(&gens[i]));
                all.insert(set);
            }
            return Ok(sorted(all));
        }
        let mut all: HashSet<TraceSet> = HashSet::from([self.universe.empty()]);
        let mut frontier = vec![self.universe.empty()];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.union(g);
                if all.insert(y.clone()) {
                    if all.len() > cap {
                        return Err(ShellError::TooLarge(cap));
                    }
                    frontier.push(y);
                }
            }
        }
        Ok(sorted(all))
    }

    /// Member count when it fits in a `u128`.
    pub fn size(&self, cap: usize) -> Option<u128> {
        match &self.family {
            Family::Powerset(base) => (base.count() < 128).then(|| 1u128 << base.count()),
            Family::Generated(_) => self.members(cap).ok().map(|m| m.len() as u128),
        }
    }

    /// The more abstract closure whose fixpoints are common to both.
    pub fn join(&self, other: &TraceUco, cap: usize) -> Result<TraceUco, ShellError> {
        if let (Family::Powerset(a), Family::Powerset(b)) = (&self.family, &other.family) {
            return Ok(self.with_family(Family::Powerset(a.intersection(b))));
        }
        let (small, large) = if matches!(self.family, Family::Generated(_)) {
            (self, other)
        } else {
            (other, self)
        };
        let kept = small
            .members(cap)?
            .into_iter()
            .filter(|y| large.is_fixpoint(y))
            .collect();
        Ok(TraceUco::observed_on(
            self.universe.clone(),
            kept,
            self.observed.clone(),
        ))
    }

    /// The more concrete closure generated by the fixpoints of both.
    pub fn meet(&self, other: &TraceUco) -> TraceUco {
        match (&self.family, &other.family) {
            (Family::Powerset(a), Family::Powerset(b)) => {
                self.with_family(Family::Powerset(a.union(b)))
            }
            _ => {
                let mut gens = self.irreducibles();
                gens.extend(other.irreducibles());
                TraceUco::observed_on(self.universe.clone(), gens, self.observed.clone())
            }
        }
    }

    /// Conjugate by time reversal.
    pub fn reversed(&self) -> TraceUco {
        let u = &self.universe;
        let observed = u.reverse(&self.observed);
        match &self.family {
            Family::Powerset(base) => {
                TraceUco::powerset_observed_on(u.clone(), u.reverse(base), observed)
            }
            Family::Generated(g) => TraceUco::observed_on(
                u.clone(),
                g.iter().map(|x| u.reverse(x)).collect(),
                observed,
            ),
        }
    }

    fn with_family(&self, family: Family) -> TraceUco {
        TraceUco {
            universe: self.universe.clone(),
            family,
            observed: self.observed.clone(),
        }
    }

    /// Whether every fixpoint of `other` is a fixpoint of `self`.
    pub fn refines(&self, other: &TraceUco) -> bool {
        other.irreducibles().iter().all(|g| self.is_fixpoint(g))
    }
}

fn sorted(all: HashSet<TraceSet>) -> Vec<TraceSet> {
    let mut v: Vec<TraceSet> = all.into_iter().collect();
    v.sort_by_key(|s| (s.count(), s.iter().collect::<Vec<_>>()));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::TransitionSystem;
    use crate::traces::{Bounds, PathScope};
    use proptest::prelude::*;

    fn universe() -> Arc<TraceUniverse> {
        let ts = TransitionSystem::numbered(1, &[(0, 0)]).unwrap();
        TraceUniverse::new(
            &ts,
            Bounds {
                loop_len: 1,
                middle_len: 0,
                offset: 0,
                present: 2,
            },
            1,
            PathScope::All,
        )
        .unwrap()
    }

    fn set(u: &TraceUniverse, bits: u8) -> TraceSet {
        u.filter(|t| bits >> t & 1 == 1)
    }

    proptest! {
        #[test]
        fn generated_families_are_union_closed(gens in proptest::collection::vec(0u8..128, 0..5), x in 0u8..128) {
            let u = universe();
            prop_assert_eq!(u.len(), 7);
            let rho = TraceUco::generated(u.clone(), gens.iter().map(|&g| set(&u, g)).collect());
            let members = rho.members(1 << 10).unwrap();
            prop_assert!(members.contains(&u.empty()));
            for a in &members {
                for b in &members {
                    prop_assert!(members.contains(&a.union(b)));
                }
            }
            let x = set(&u, x);
            let image = rho.apply(&x);
            prop_assert!(image.is_subset(&x));
            prop_assert!(members.contains(&image));
            prop_assert_eq!(rho.apply(&image), image.clone());
            // largest member inside x
            prop_assert!(members.iter().filter(|m| m.is_subset(&x)).all(|m| m.is_subset(&image)));
        }

        #[test]
        fn join_and_meet_bracket_both(a in proptest::collection::vec(0u8..128, 0..4), b in proptest::collection::vec(0u8..128, 0..4)) {
            let u = universe();
            let ra = TraceUco::generated(u.clone(), a.iter().map(|&g| set(&u, g)).collect());
            let rb = TraceUco::generated(u.clone(), b.iter().map(|&g| set(&u, g)).collect());
            let join = ra.join(&rb, 1 << 10).unwrap();
            let meet = ra.meet(&rb);
            prop_assert!(ra.refines(&join) && rb.refines(&join));
            prop_assert!(meet.refines(&ra) && meet.refines(&rb));
            let ma = ra.members(1 << 10).unwrap();
            let common: Vec<TraceSet> = ma.into_iter().filter(|m| rb.is_fixpoint(m)).collect();
            prop_assert_eq!(join.members(1 << 10).unwrap(), common);
        }
    }

    #[test]
    fn powerset_families() {
        let u = universe();
        let base = set(&u, 0b0110);
        let rho = TraceUco::powerset(u.clone(), base.clone());
        assert_eq!(rho.apply(&u.full()), base);
        assert_eq!(rho.size(16), Some(4));
        assert_eq!(rho.members(16).unwrap().len(), 4);
        let other = TraceUco::powerset(u.clone(), set(&u, 0b1100));
        assert_eq!(
            rho.join(&other, 16).unwrap(),
            TraceUco::powerset(u.clone(), set(&u, 0b0100))
        );
        assert_eq!(
            rho.meet(&other),
            TraceUco::powerset(u.clone(), set(&u, 0b1110))
        );
        assert_eq!(rho.reversed().reversed(), rho);
    }
}
