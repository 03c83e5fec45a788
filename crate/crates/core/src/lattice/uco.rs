use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Elem, Lattice, LatticeError};

/// Least meet-closed superset of `family` (always contains top).
pub fn moore_closure(family: &BTreeSet<Elem>, lat: &Lattice) -> BTreeSet<Elem> {
    let mut closed: BTreeSet<Elem> = family.clone();
    closed.insert(lat.top());
    let mut frontier: Vec<Elem> = closed.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        let current: Vec<Elem> = closed.iter().copied().collect();
        for y in current {
            let m = lat.meet(x, y);
            if closed.insert(m) {
                frontier.push(m);
            }
        }
    }
    closed
}

/// An upper closure operator, represented by its meet-closed set of fixpoints.
#[derive(Debug, Clone)]
pub struct Uco {
    lattice: Arc<Lattice>,
    fixpoints: BTreeSet<Elem>,
}

impl PartialEq for Uco {
    fn eq(&self, other: &Self) -> bool {
        self.fixpoints == other.fixpoints && same_carrier(&self.lattice, &other.lattice)
    }
}

fn same_carrier(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Uco {
    /// Validates that `fixpoints` is meet-closed.
    pub fn new(lattice: Arc<Lattice>, fixpoints: BTreeSet<Elem>) -> Result<Self, LatticeError> {
        if !fixpoints.contains(&lattice.top()) {
            let top = lattice.show(lattice.top());
            return Err(LatticeError::NotMeetClosed {
                a: "(empty meet)".into(),
                b: top,
            });
        }
        for &a in &fixpoints {
            for &b in fixpoints.range(a..) {
                if !fixpoints.contains(&lattice.meet(a, b)) {
                    return Err(LatticeError::NotMeetClosed {
                        a: lattice.show(a),
                        b: lattice.show(b),
                    });
                }
            }
        }
        Ok(Uco { lattice, fixpoints })
    }

    /// The closure whose fixpoints are the Moore closure of `generators`.
    pub fn generated(lattice: Arc<Lattice>, generators: &BTreeSet<Elem>) -> Self {
        let fixpoints = moore_closure(generators, &lattice);
        Uco { lattice, fixpoints }
    }

    pub fn identity(lattice: Arc<Lattice>) -> Self {
        let fixpoints = lattice.elements().collect();
        Uco { lattice, fixpoints }
    }

    /// The most abstract closure, mapping everything to top.
    pub fn top(lattice: Arc<Lattice>) -> Self {
        let fixpoints = BTreeSet::from([lattice.top()]);
        Uco { lattice, fixpoints }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn fixpoints(&self) -> &BTreeSet<Elem> {
        &self.fixpoints
    }

    pub fn is_fixpoint(&self, x: Elem) -> bool {
        self.fixpoints.contains(&x)
    }

    /// Least fixpoint above `x`.
    pub fn apply(&self, x: Elem) -> Elem {
        let lat = &self.lattice;
        self.fixpoints
            .iter()
            .filter(|&&y| lat.leq(x, y))
            .fold(lat.top(), |acc, &y| lat.meet(acc, y))
    }

    /// Least upper bound in the closure lattice: common fixpoints.
    pub fn join(&self, other: &Uco) -> Result<Uco, LatticeError> {
        self.check_carrier(other)?;
        let fixpoints = self
            .fixpoints
            .intersection(&other.fixpoints)
            .copied()
            .collect();
        Ok(Uco {
            lattice: self.lattice.clone(),
            fixpoints,
        })
    }

    /// Greatest lower bound (reduced product): Moore closure of the union.
    pub fn meet(&self, other: &Uco) -> Result<Uco, LatticeError> {
        self.check_carrier(other)?;
        let union = self.fixpoints.union(&other.fixpoints).copied().collect();
        Ok(Uco::generated(self.lattice.clone(), &union))
    }

    /// `self` is at least as precise as `other`.
    pub fn refines(&self, other: &Uco) -> bool {
        other.fixpoints.is_subset(&self.fixpoints)
    }

    pub fn show(&self) -> String {
        let parts: Vec<String> = self
            .fixpoints
            .iter()
            .map(|&x| self.lattice.show(x))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn check_carrier(&self, other: &Uco) -> Result<(), LatticeError> {
        if same_carrier(&self.lattice, &other.lattice) {
            Ok(())
        } else {
            Err(LatticeError::CarrierMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SetOrder;
    use proptest::prelude::*;

    fn p12() -> Arc<Lattice> {
        Arc::new(Lattice::powerset(vec!["1".into(), "2".into()], SetOrder::Subset).unwrap())
    }

    fn small_ints(n: i64) -> Arc<Lattice> {
        Arc::new(
            Lattice::powerset((-n..=n).map(|v| v.to_string()).collect(), SetOrder::Subset).unwrap(),
        )
    }

    fn range(lat: &Lattice, lo: i64, hi: i64) -> Elem {
        let items: Vec<String> = (lo..=hi).map(|v| v.to_string()).collect();
        lat.as_powerset()
            .unwrap()
            .set_of(items.iter().map(String::as_str))
            .unwrap()
    }

    #[test]
    fn moore_of_empty_family_is_top() {
        let lat = p12();
        assert_eq!(
            moore_closure(&BTreeSet::new(), &lat),
            BTreeSet::from([lat.top()])
        );
    }

    #[test]
    fn moore_adds_pairwise_meets() {
        let lat = p12();
        let fam = BTreeSet::from([
            lat.parse_elem("{1}").unwrap(),
            lat.parse_elem("{2}").unwrap(),
        ]);
        assert_eq!(moore_closure(&fam, &lat).len(), 4);
    }

    #[test]
    fn sign_family_from_half_lines() {
        let lat = small_ints(4);
        let fam = BTreeSet::from([range(&lat, 0, 4), range(&lat, -4, 0)]);
        let sign = moore_closure(&fam, &lat);
        let expected = BTreeSet::from([
            lat.top(),
            range(&lat, 0, 4),
            range(&lat, -4, 0),
            range(&lat, 0, 0),
        ]);
        assert_eq!(sign, expected);
        let rho = Uco::new(lat.clone(), sign).unwrap();
        assert_eq!(
            rho.apply(lat.parse_elem("{2,3}").unwrap()),
            range(&lat, 0, 4)
        );
    }

    #[test]
    fn meet_of_sign_with_interval_closure() {
        let lat = small_ints(10);
        let sign = Uco::generated(
            lat.clone(),
            &BTreeSet::from([range(&lat, 0, 10), range(&lat, -10, 0)]),
        );
        let nine = Uco::generated(lat.clone(), &BTreeSet::from([range(&lat, 0, 9)]));
        let both = sign.meet(&nine).unwrap();
        assert!(both.is_fixpoint(range(&lat, 0, 9)));
        assert!(both.is_fixpoint(range(&lat, 0, 0)));
        assert_eq!(both.fixpoints().len(), 5);
        assert_eq!(both.apply(range(&lat, 0, 3)), range(&lat, 0, 9));
        assert!(both.refines(&sign) && both.refines(&nine));
        assert_eq!(sign.join(&sign).unwrap(), sign);
    }

    #[test]
    fn new_rejects_families_that_are_not_meet_closed() {
        let lat = p12();
        let fam = BTreeSet::from([
            lat.top(),
            lat.parse_elem("{1}").unwrap(),
            lat.parse_elem("{2}").unwrap(),
        ]);
        assert!(matches!(
            Uco::new(lat, fam),
            Err(LatticeError::NotMeetClosed { .. })
        ));
    }

    #[test]
    fn carrier_mismatch_is_reported() {
        let a = Uco::top(p12());
        let b = Uco::top(small_ints(1));
        assert_eq!(a.join(&b), Err(LatticeError::CarrierMismatch));
    }

    fn family_strategy() -> impl Strategy<Value = BTreeSet<Elem>> {
        proptest::collection::btree_set((0u64..32).prop_map(Elem), 0..6)
    }

    proptest! {
        #[test]
        fn generated_closures_are_closure_operators(gens in family_strategy()) {
            let lat = Arc::new(Lattice::powerset((0..5).map(|i| i.to_string()).collect(), SetOrder::Subset).unwrap());
            let rho = Uco::generated(lat.clone(), &gens);
            for x in lat.elements() {
                let rx = rho.apply(x);
                prop_assert!(lat.leq(x, rx));
                prop_assert_eq!(rho.apply(rx), rx);
                for y in lat.upper_covers(x) {
                    prop_assert!(lat.leq(rx, rho.apply(y)));
                }
            }
        }

        #[test]
        fn closure_order_matches_pointwise_order(a in family_strategy(), b in family_strategy()) {
            let lat = Arc::new(Lattice::powerset((0..5).map(|i| i.to_string()).collect(), SetOrder::Subset).unwrap());
            let ra = Uco::generated(lat.clone(), &a);
            let rb = Uco::generated(lat.clone(), &b);
            let pointwise = lat.elements().all(|x| lat.leq(ra.apply(x), rb.apply(x)));
            prop_assert_eq!(ra.refines(&rb), pointwise);
            let j = ra.join(&rb).unwrap();
            let m = ra.meet(&rb).unwrap();
            for x in lat.elements() {
                prop_assert!(lat.leq(lat.join(ra.apply(x), rb.apply(x)), j.apply(x)));
                prop_assert_eq!(j.apply(x), j.apply(lat.join(ra.apply(x), rb.apply(x))));
                prop_assert!(lat.leq(m.apply(x), lat.meet(ra.apply(x), rb.apply(x))));
            }
        }

        #[test]
        fn closure_of_join_depends_only_on_closed_parts(gens in family_strategy(), xs in proptest::collection::vec(0u64..32, 0..4)) {
            let lat = Arc::new(Lattice::powerset((0..5).map(|i| i.to_string()).collect(), SetOrder::Subset).unwrap());
            let rho = Uco::generated(lat.clone(), &gens);
            let xs: Vec<Elem> = xs.into_iter().map(Elem).collect();
            let direct = rho.apply(lat.join_all(xs.iter().copied()));
            let via = rho.apply(lat.join_all(xs.iter().map(|&x| rho.apply(x))));
            prop_assert_eq!(direct, via);
        }
    }
}
