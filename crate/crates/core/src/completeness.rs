//! Completeness of closures for monotone functions, the preimage transformers
//! and the complete shell/core iterations on finite lattices.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{moore_closure, Elem, Lattice, LatticeError, MonotoneFn, Uco};

/// Budget on argument tuples visited by a single completeness check.
pub const DEFAULT_TUPLE_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletenessError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("a function set needs at least one function")]
    EmptyFnSet,
    #[error("not complete: {0}")]
    Incomplete(String),
    #[error("{side} fixpoints differ: abstract iteration gives {abstract_value}, closing the concrete one gives {closed_concrete}")]
    FixpointMismatch {
        side: &'static str,
        abstract_value: String,
        closed_concrete: String,
    },
    #[error("{0} iteration converged to a closure that fails the completeness re-check: {1}")]
    Unverified(Direction, String),
}

/// An argument tuple on which `rho . f` and `rho . f . rho` disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub function: String,
    pub args: Vec<Elem>,
    /// `rho(f(args))`
    pub concrete: Elem,
    /// `rho(f(rho(args)))`
    pub abstracted: Elem,
}

impl Witness {
    pub fn describe(&self, lat: &Lattice) -> String {
        let args: Vec<String> = self.args.iter().map(|&a| lat.show(a)).collect();
        format!(
            "{}({}): closure of the concrete result is {}, but the abstract result is {}",
            self.function,
            args.join(", "),
            lat.show(self.concrete),
            lat.show(self.abstracted)
        )
    }
}

/// A nonempty set of functions on one carrier. Completeness of an n-ary
/// function is checked on whole tuples; the transformers use its unary
/// family, obtained by currying all other arguments over every element.
#[derive(Debug, Clone)]
pub struct FnSet {
    functions: Vec<MonotoneFn>,
    unary: Vec<MonotoneFn>,
}

impl FnSet {
    pub fn new(lat: &Lattice, functions: Vec<MonotoneFn>) -> Result<Self, CompletenessError> {
        if functions.is_empty() {
            return Err(CompletenessError::EmptyFnSet);
        }
        let unary = functions.iter().flat_map(|f| f.unary_family(lat)).collect();
        Ok(FnSet { functions, unary })
    }

    pub fn single(lat: &Lattice, f: MonotoneFn) -> Self {
        Self::new(lat, vec![f]).expect("one function")
    }

    pub fn functions(&self) -> &[MonotoneFn] {
        &self.functions
    }

    pub fn unary(&self) -> &[MonotoneFn] {
        &self.unary
    }

    pub fn names(&self) -> Vec<&str> {
        self.functions.iter().map(MonotoneFn::name).collect()
    }
}

/// First tuple (in witness order) violating `rho(f(x)) = rho(f(rho(x)))`.
pub fn find_incompleteness(
    rho: &Uco,
    f: &MonotoneFn,
    cap: u64,
) -> Result<Option<Witness>, CompletenessError> {
    let lat = rho.lattice();
    let count = lat.size().checked_pow(f.arity() as u32).unwrap_or(u64::MAX);
    if count > cap {
        return Err(LatticeError::CapExceeded {
            what: format!("completeness check of `{}`", f.name()),
            cap,
        }
        .into());
    }
    let check = |args: Vec<Elem>| -> Option<Witness> {
        let closed: Vec<Elem> = args.iter().map(|&a| rho.apply(a)).collect();
        let concrete = rho.apply(f.apply(lat, &args));
        let abstracted = rho.apply(f.apply(lat, &closed));
        (concrete != abstracted).then(|| Witness {
            function: f.name().to_string(),
            args,
            concrete,
            abstracted,
        })
    };
    if f.arity() == 1 {
        return Ok(lat.witness_order().into_iter().find_map(|x| check(vec![x])));
    }
    Ok(lat.tuples(f.arity()).into_iter().find_map(check))
}

pub fn is_complete(rho: &Uco, f: &MonotoneFn) -> Result<bool, CompletenessError> {
    Ok(find_incompleteness(rho, f, DEFAULT_TUPLE_CAP)?.is_none())
}

/// First witness over all functions of the set.
pub fn find_incompleteness_set(
    rho: &Uco,
    fs: &FnSet,
    cap: u64,
) -> Result<Option<Witness>, CompletenessError> {
    for f in fs.functions() {
        if let Some(w) = find_incompleteness(rho, f, cap)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Maximal `x` with `f(x) <= y`, for unary `f`. Uses the right adjoint when
/// `f` is additive by construction.
pub fn max_preimages(lat: &Lattice, f: &MonotoneFn, y: Elem) -> Vec<Elem> {
    if let Ok(adj) = lat.right_adjoint(f, 0) {
        return vec![adj.apply(lat, &[y])];
    }
    max_preimages_generic(lat, f, y)
}

/// Filter-and-maximize version of [`max_preimages`], valid for any monotone `f`.
pub fn max_preimages_generic(lat: &Lattice, f: &MonotoneFn, y: Elem) -> Vec<Elem> {
    lat.maximal_in_downset(|x| lat.leq(f.apply(lat, &[x]), y))
}

/// Elements `y` all of whose maximal preimages (under every function) are in `eta`.
pub fn l_transform(eta: &Uco, fs: &FnSet) -> BTreeSet<Elem> {
    let lat = eta.lattice();
    lat.elements()
        .filter(|&y| preimages_inside(eta, fs, y).is_ok())
        .collect()
}

/// Closure generated by all maximal preimages of fixpoints of `eta`.
pub fn r_transform(eta: &Uco, fs: &FnSet) -> Uco {
    let lat = eta.lattice();
    let mut gens = BTreeSet::new();
    for &y in eta.fixpoints() {
        for f in fs.unary() {
            gens.extend(max_preimages(lat, f, y));
        }
    }
    Uco::generated(lat.clone(), &gens)
}

/// `Err` carries the first offending preimage.
fn preimages_inside(eta: &Uco, fs: &FnSet, y: Elem) -> Result<(), Preimage> {
    let lat = eta.lattice();
    for f in fs.unary() {
        let maxima = max_preimages(lat, f, y);
        if maxima.iter().any(|&x| !eta.is_fixpoint(x)) {
            return Err(Preimage {
                function: f.name().to_string(),
                target: y,
                maxima,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Shell,
    Core,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Shell => write!(f, "shell"),
            Direction::Core => write!(f, "core"),
        }
    }
}

/// The maximal elements below `target` under `function`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    pub function: String,
    pub target: Elem,
    pub maxima: Vec<Elem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Round {
    pub added: Vec<Elem>,
    pub removed: Vec<Elem>,
    /// For a core: why each removed element went. For a shell: the preimages
    /// that contributed new generators.
    pub preimages: Vec<Preimage>,
}

#[derive(Debug, Clone)]
pub struct ShellCoreReport {
    pub direction: Direction,
    pub functions: Vec<String>,
    pub input: Uco,
    pub result: Uco,
    pub rounds: Vec<Round>,
}

impl ShellCoreReport {
    pub fn lattice(&self) -> &Arc<Lattice> {
        self.input.lattice()
    }

    /// All elements removed over the whole run.
    pub fn removed(&self) -> BTreeSet<Elem> {
        self.rounds
            .iter()
            .flat_map(|r| r.removed.iter().copied())
            .collect()
    }

    pub fn added(&self) -> BTreeSet<Elem> {
        self.rounds
            .iter()
            .flat_map(|r| r.added.iter().copied())
            .collect()
    }

    /// Human-readable iteration log.
    pub fn log(&self) -> Vec<String> {
        let lat = self.lattice();
        let show = |xs: &[Elem]| -> String {
            let parts: Vec<String> = xs.iter().map(|&x| lat.show(x)).collect();
            format!("{{{}}}", parts.join(", "))
        };
        let mut out = Vec::new();
        for (i, round) in self.rounds.iter().enumerate() {
            let n = i + 1;
            for p in &round.preimages {
                out.push(format!(
                    "round {n}: max preimage of {} under {} is {}",
                    lat.show(p.target),
                    p.function,
                    show(&p.maxima)
                ));
            }
            if !round.removed.is_empty() {
                out.push(format!("round {n}: removed {}", show(&round.removed)));
            }
            if !round.added.is_empty() {
                out.push(format!("round {n}: added {}", show(&round.added)));
            }
        }
        out
    }
}

/// Greatest closure below `rho` complete for every function of `fs`.
pub fn complete_shell(rho: &Uco, fs: &FnSet) -> Result<ShellCoreReport, CompletenessError> {
    let lat = rho.lattice().clone();
    let mut eta = rho.clone();
    let mut rounds = Vec::new();
    loop {
        let mut gens: BTreeSet<Elem> = eta.fixpoints().clone();
        let mut preimages = Vec::new();
        for &y in eta.fixpoints() {
            for f in fs.unary() {
                let maxima = max_preimages(&lat, f, y);
                if maxima.iter().any(|x| !eta.is_fixpoint(*x)) {
                    preimages.push(Preimage {
                        function: f.name().to_string(),
                        target: y,
                        maxima: maxima.clone(),
                    });
                }
                gens.extend(maxima);
            }
        }
        let next = moore_closure(&gens, &lat);
        let added: Vec<Elem> = next.difference(eta.fixpoints()).copied().collect();
        if added.is_empty() {
            break;
        }
        rounds.push(Round {
            added,
            removed: Vec::new(),
            preimages,
        });
        eta = Uco::new(lat.clone(), next)?;
    }
    finish(Direction::Shell, rho, fs, eta, rounds)
}

/// Least closure above `rho` complete for every function of `fs`.
pub fn complete_core(rho: &Uco, fs: &FnSet) -> Result<ShellCoreReport, CompletenessError> {
    let lat = rho.lattice().clone();
    let mut eta = rho.clone();
    let mut rounds = Vec::new();
    loop {
        let mut kept = BTreeSet::new();
        let mut round = Round::default();
        for &y in eta.fixpoints() {
            match preimages_inside(&eta, fs, y) {
                Ok(()) => {
                    kept.insert(y);
                }
                Err(p) => {
                    round.removed.push(y);
                    round.preimages.push(p);
                }
            }
        }
        if round.removed.is_empty() {
            break;
        }
        rounds.push(round);
        eta = Uco::new(lat.clone(), kept)?;
    }
    finish(Direction::Core, rho, fs, eta, rounds)
}

fn finish(
    direction: Direction,
    rho: &Uco,
    fs: &FnSet,
    result: Uco,
    rounds: Vec<Round>,
) -> Result<ShellCoreReport, CompletenessError> {
    if let Some(w) = find_incompleteness_set(&result, fs, DEFAULT_TUPLE_CAP)? {
        return Err(CompletenessError::Unverified(
            direction,
            w.describe(rho.lattice()),
        ));
    }
    Ok(ShellCoreReport {
        direction,
        functions: fs.names().into_iter().map(String::from).collect(),
        input: rho.clone(),
        result,
        rounds,
    })
}

/// Values on both sides of the fixpoint transfer equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixpointTransfer {
    pub lfp: Elem,
    pub gfp: Elem,
}

/// Checks `lfp(rho . f) = rho(lfp f)` and the `gfp` analogue for a unary `f`
/// that `rho` is complete for.
pub fn check_fixpoint_transfer(
    rho: &Uco,
    f: &MonotoneFn,
) -> Result<FixpointTransfer, CompletenessError> {
    let lat = rho.lattice();
    if let Some(w) = find_incompleteness(rho, f, DEFAULT_TUPLE_CAP)? {
        return Err(CompletenessError::Incomplete(w.describe(lat)));
    }
    let closure = {
        let rho = rho.clone();
        MonotoneFn::native("rho", 1, move |_, xs| rho.apply(xs[0]))
    };
    let abstract_fn = f.then(closure);
    let sides = [
        ("least", lat.lfp(&abstract_fn)?, rho.apply(lat.lfp(f)?)),
        ("greatest", lat.gfp(&abstract_fn)?, rho.apply(lat.gfp(f)?)),
    ];
    for (side, abs, conc) in sides {
        if abs != conc {
            return Err(CompletenessError::FixpointMismatch {
                side,
                abstract_value: lat.show(abs),
                closed_concrete: lat.show(conc),
            });
        }
    }
    Ok(FixpointTransfer {
        lfp: sides[0].1,
        gfp: sides[1].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{parse_lat, SetOrder};
    use proptest::prelude::*;

    /// Bounded integers with item order 0, -1, 1, -2, 2, ...
    fn int_items(n: i64) -> Vec<i64> {
        let mut v = vec![0];
        for k in 1..=n {
            v.push(-k);
            v.push(k);
        }
        v
    }

    fn int_lattice(n: i64) -> (Arc<Lattice>, Vec<i64>) {
        let vals = int_items(n);
        let lat =
            Lattice::powerset(vals.iter().map(i64::to_string).collect(), SetOrder::Subset).unwrap();
        (Arc::new(lat), vals)
    }

    fn interval(vals: &[i64], lo: i64, hi: i64) -> Elem {
        Elem(
            vals.iter()
                .enumerate()
                .filter(|(_, &v)| lo <= v && v <= hi)
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }

    fn lift1(vals: &[i64], name: &str, f: impl Fn(i64) -> i64) -> MonotoneFn {
        let pos = |v: i64| vals.iter().position(|&w| w == v).unwrap();
        MonotoneFn::lifted(
            name,
            1,
            vals.len(),
            vals.iter().map(|&v| 1u64 << pos(f(v))).collect(),
        )
    }

    fn lift2(vals: &[i64], name: &str, f: impl Fn(i64, i64) -> i64) -> MonotoneFn {
        let n = vals.len();
        let pos = |v: i64| vals.iter().position(|&w| w == v).unwrap();
        let images = (0..n * n)
            .map(|t| 1u64 << pos(f(vals[t / n], vals[t % n])))
            .collect();
        MonotoneFn::lifted(name, 2, n, images)
    }

    fn sign(lat: &Arc<Lattice>, vals: &[i64], n: i64) -> Uco {
        let gens = BTreeSet::from([interval(vals, 0, n), interval(vals, -n, 0)]);
        Uco::generated(lat.clone(), &gens)
    }

    #[test]
    fn identity_closure_is_complete_for_anything() {
        let (lat, vals) = int_lattice(2);
        let f = lift1(&vals, "neg", |v| -v);
        assert!(is_complete(&Uco::identity(lat), &f).unwrap());
    }

    #[test]
    fn sign_addition_witness_and_multiplication() {
        let n = 4;
        let (lat, vals) = int_lattice(n);
        let rho = sign(&lat, &vals, n);
        let add = lift2(&vals, "add", |a, b| (a + b).clamp(-n, n));
        let w = find_incompleteness(&rho, &add, DEFAULT_TUPLE_CAP)
            .unwrap()
            .unwrap();
        assert_eq!(
            w.args,
            vec![
                lat.parse_elem("{-1}").unwrap(),
                lat.parse_elem("{1}").unwrap()
            ]
        );
        assert_eq!(w.concrete, interval(&vals, 0, 0));
        assert_eq!(w.abstracted, lat.top());
        let mul = lift2(&vals, "mul", |a, b| (a * b).clamp(-n, n));
        assert!(is_complete(&rho, &mul).unwrap());
    }

    fn sign_plus(n: i64) -> (Arc<Lattice>, Vec<i64>, Uco, MonotoneFn) {
        let (lat, vals) = int_lattice(n);
        let gens = BTreeSet::from([
            interval(&vals, 0, n),
            interval(&vals, -n, 0),
            interval(&vals, 0, 9),
        ]);
        let rho = Uco::generated(lat.clone(), &gens);
        let sq = lift1(&vals, "sq", |v| (v * v).min(n));
        (lat, vals, rho, sq)
    }

    #[test]
    fn sign_plus_square_preimage_and_core() {
        let (lat, vals, rho, sq) = sign_plus(10);
        let fs = FnSet::single(&lat, sq.clone());
        let nine = interval(&vals, 0, 9);
        let three = interval(&vals, -3, 3);
        assert_eq!(max_preimages(&lat, &sq, nine), vec![three]);
        assert!(r_transform(&rho, &fs).is_fixpoint(three));
        assert!(!l_transform(&rho, &fs).contains(&nine));

        let core = complete_core(&rho, &fs).unwrap();
        assert_eq!(core.result, sign(&lat, &vals, 10));
        assert_eq!(core.removed(), BTreeSet::from([nine]));
        let p = &core.rounds[0].preimages[0];
        assert_eq!((p.target, p.maxima.clone()), (nine, vec![three]));
        assert!(core.log().iter().any(|l| l.contains("removed")));
        assert!(!core.result.refines(&rho) && rho.refines(&core.result));
    }

    #[test]
    fn sign_plus_square_shell() {
        let (lat, vals, rho, sq) = sign_plus(10);
        let shell = complete_shell(&rho, &FnSet::single(&lat, sq)).unwrap();
        let i = |lo, hi| interval(&vals, lo, hi);
        let expected = BTreeSet::from([i(-3, 3), i(0, 3), i(-3, 0), i(-1, 1), i(0, 1), i(-1, 0)]);
        assert_eq!(shell.added(), expected);
        assert!(shell.result.refines(&rho));
    }

    #[test]
    fn shell_of_complete_closure_is_itself() {
        let n = 3;
        let (lat, vals) = int_lattice(n);
        let rho = sign(&lat, &vals, n);
        let mul = lift2(&vals, "mul", |a, b| (a * b).clamp(-n, n));
        let fs = FnSet::single(&lat, mul);
        assert_eq!(complete_shell(&rho, &fs).unwrap().result, rho);
        assert_eq!(complete_core(&rho, &fs).unwrap().result, rho);
    }

    #[test]
    fn top_closure_is_fixed_by_identity_transform() {
        let (lat, _) = int_lattice(1);
        let top = Uco::top(lat.clone());
        assert_eq!(
            r_transform(&top, &FnSet::single(&lat, MonotoneFn::identity())),
            top
        );
    }

    #[test]
    fn fixpoint_transfer() {
        let n = 3;
        let (lat, vals) = int_lattice(n);
        let rho = sign(&lat, &vals, n);
        let dbl = lift1(&vals, "dbl", |v| (2 * v).clamp(-n, n));
        let t = check_fixpoint_transfer(&rho, &dbl).unwrap();
        assert_eq!(t.lfp, rho.apply(lat.bottom()));
        let inc = lift1(&vals, "inc", |v| (v + 1).clamp(-n, n));
        assert!(matches!(
            check_fixpoint_transfer(&rho, &inc),
            Err(CompletenessError::Incomplete(_))
        ));
    }

    #[test]
    fn fnset_must_be_nonempty() {
        let (lat, _) = int_lattice(1);
        assert_eq!(
            FnSet::new(&lat, vec![]).unwrap_err(),
            CompletenessError::EmptyFnSet
        );
    }

    #[test]
    fn explicit_lattice_from_file() {
        let file = parse_lat(
            "element bot\nelement a\nelement b\nelement top\n\
             leq bot a\nleq bot b\nleq a top\nleq b top\n\
             fn swap 1\nbot -> bot\na -> b\nb -> a\ntop -> top\n\
             domain onlya a\n",
        )
        .unwrap();
        let rho = file.domain("onlya").unwrap();
        let swap = file.function("swap").unwrap();
        let fs = FnSet::single(&file.lattice, swap.clone());
        assert!(!is_complete(rho, swap).unwrap());
        let shell = complete_shell(rho, &fs).unwrap();
        assert_eq!(shell.result.fixpoints().len(), 4);
        let core = complete_core(rho, &fs).unwrap();
        assert_eq!(core.result, Uco::top(file.lattice.clone()));
    }

    // -- exhaustive oracles on a small powerset ---------------------------------

    fn p3() -> Arc<Lattice> {
        Arc::new(
            Lattice::powerset(vec!["a".into(), "b".into(), "c".into()], SetOrder::Subset).unwrap(),
        )
    }

    fn meet_closed_families(lat: &Arc<Lattice>) -> Vec<Uco> {
        let n = lat.size();
        (0u64..1 << n)
            .filter_map(|mask| {
                let fam: BTreeSet<Elem> =
                    (0..n).filter(|i| mask & (1 << i) != 0).map(Elem).collect();
                Uco::new(lat.clone(), fam).ok()
            })
            .collect()
    }

    fn monotone_from(seeds: Vec<u64>) -> MonotoneFn {
        MonotoneFn::native("m", 1, move |lat, xs| {
            lat.elements()
                .filter(|&y| lat.leq(y, xs[0]))
                .fold(lat.bottom(), |acc, y| {
                    lat.join(acc, Elem(seeds[y.0 as usize]))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn shell_and_core_match_exhaustive_search(
            seeds in proptest::collection::vec(0u64..8, 8),
            gens in proptest::collection::btree_set((0u64..8).prop_map(Elem), 0..4),
        ) {
            let lat = p3();
            let f = monotone_from(seeds);
            let rho = Uco::generated(lat.clone(), &gens);
            let fs = FnSet::single(&lat, f.clone());
            let complete: Vec<Uco> = meet_closed_families(&lat)
                .into_iter()
                .filter(|u| is_complete(u, &f).unwrap())
                .collect();
            let below: Vec<&Uco> = complete.iter().filter(|u| u.refines(&rho)).collect();
            let best_below = below.iter().find(|u| below.iter().all(|v| v.refines(u))).unwrap();
            prop_assert_eq!(&complete_shell(&rho, &fs).unwrap().result, *best_below);
            let above: Vec<&Uco> = complete.iter().filter(|u| rho.refines(u)).collect();
            let best_above = above.iter().find(|u| above.iter().all(|v| u.refines(v))).unwrap();
            prop_assert_eq!(&complete_core(&rho, &fs).unwrap().result, *best_above);
        }

        #[test]
        fn completeness_equivalences(
            seeds in proptest::collection::vec(0u64..8, 8),
            gens in proptest::collection::btree_set((0u64..8).prop_map(Elem), 0..4),
        ) {
            let lat = p3();
            let f = monotone_from(seeds);
            let rho = Uco::generated(lat.clone(), &gens);
            let fs = FnSet::single(&lat, f.clone());
            let complete = is_complete(&rho, &f).unwrap();
            let l = l_transform(&rho, &fs);
            prop_assert_eq!(complete, rho.fixpoints().iter().all(|y| l.contains(y)));
            prop_assert_eq!(complete, rho.refines(&r_transform(&rho, &fs)));
            // completeness for f implies completeness for its powers
            if complete {
                for k in 1..=4 {
                    prop_assert!(is_complete(&rho, &f.power(k)).unwrap());
                }
            }
        }

        #[test]
        fn adjoint_path_agrees_with_generic_path(images in proptest::collection::vec(0u64..8, 3), y in 0u64..8) {
            let lat = p3();
            let f = MonotoneFn::lifted("g", 1, 3, images);
            prop_assert_eq!(max_preimages(&lat, &f, Elem(y)), max_preimages_generic(&lat, &f, Elem(y)));
        }
    }
}
