use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{Elem, Lattice, SetOrder};

type NativeFn = Arc<dyn Fn(&Lattice, &[Elem]) -> Elem + Send + Sync>;

/// A function on a finite lattice of fixed arity. Constants have arity 0.
#[derive(Clone)]
pub struct MonotoneFn {
    name: String,
    arity: usize,
    kind: FnKind,
}

#[derive(Clone)]
enum FnKind {
    Table(Arc<HashMap<Vec<Elem>, Elem>>),
    /// Set-lifted item function on a powerset: `f(X1..Xn)` is the union of the
    /// images of all item tuples drawn from `X1 x .. x Xn`.
    Lifted {
        items: usize,
        images: Arc<Vec<u64>>,
    },
    Native(NativeFn),
}

impl fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            FnKind::Table(_) => "table",
            FnKind::Lifted { .. } => "lifted",
            FnKind::Native(_) => "native",
        };
        write!(f, "MonotoneFn({}/{}, {kind})", self.name, self.arity)
    }
}

impl MonotoneFn {
    pub fn table(name: impl Into<String>, arity: usize, table: HashMap<Vec<Elem>, Elem>) -> Self {
        MonotoneFn {
            name: name.into(),
            arity,
            kind: FnKind::Table(Arc::new(table)),
        }
    }

    /// `images[t]` is the item mask produced by the item tuple whose mixed-radix
    /// index (first argument most significant) is `t`.
    pub fn lifted(name: impl Into<String>, arity: usize, items: usize, images: Vec<u64>) -> Self {
        debug_assert_eq!(images.len(), items.pow(arity as u32));
        MonotoneFn {
            name: name.into(),
            arity,
            kind: FnKind::Lifted {
                items,
                images: Arc::new(images),
            },
        }
    }

    pub fn native<F>(name: impl Into<String>, arity: usize, f: F) -> Self
    where
        F: Fn(&Lattice, &[Elem]) -> Elem + Send + Sync + 'static,
    {
        MonotoneFn {
            name: name.into(),
            arity,
            kind: FnKind::Native(Arc::new(f)),
        }
    }

    pub fn identity() -> Self {
        Self::native("id", 1, |_, xs| xs[0])
    }

    pub fn constant(name: impl Into<String>, value: Elem) -> Self {
        Self::native(name, 0, move |_, _| value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn apply(&self, lat: &Lattice, args: &[Elem]) -> Elem {
        debug_assert_eq!(args.len(), self.arity, "arity of {}", self.name);
        match &self.kind {
            FnKind::Table(t) => *t
                .get(args)
                .unwrap_or_else(|| panic!("table of `{}` is not total", self.name)),
            FnKind::Native(f) => f(lat, args),
            FnKind::Lifted { items, images } => {
                let mut out = 0u64;
                lifted_union(*items, images, args, 0, 0, &mut out);
                Elem(out)
            }
        }
    }

    pub(crate) fn monotone_by_construction(&self) -> bool {
        matches!(self.kind, FnKind::Lifted { .. })
    }

    /// Lifted unary functions preserve unions, hence all joins of the subset order.
    pub(crate) fn additive_by_construction(&self, lat: &Lattice) -> bool {
        self.arity == 1
            && matches!(self.kind, FnKind::Lifted { .. })
            && lat
                .as_powerset()
                .is_some_and(|p| p.order() == SetOrder::Subset)
    }

    /// Closed-form right adjoint for lifted unary functions on a subset-ordered
    /// powerset: an item belongs to `f^r(Y)` iff its image lies within `Y`.
    pub(crate) fn lifted_adjoint(&self, lat: &Lattice) -> Option<MonotoneFn> {
        if !self.additive_by_construction(lat) {
            return None;
        }
        let FnKind::Lifted { items, images } = &self.kind else {
            return None;
        };
        let (items, images) = (*items, images.clone());
        Some(MonotoneFn::native(
            format!("{}^r", self.name),
            1,
            move |_, ys| {
                let y = ys[0].0;
                let mut out = 0u64;
                for (i, &img) in images.iter().enumerate().take(items) {
                    if img & !y == 0 {
                        out |= 1 << i;
                    }
                }
                Elem(out)
            },
        ))
    }

    /// Fixes every argument except `position` to the given values.
    pub fn curry(&self, position: usize, fixed: &[Elem]) -> MonotoneFn {
        assert!(position < self.arity && fixed.len() + 1 == self.arity);
        let shown = |lat: Option<&Lattice>| -> String {
            let parts: Vec<String> = fixed
                .iter()
                .map(|e| lat.map_or_else(|| format!("#{}", e.0), |l| l.show(*e)))
                .collect();
            parts.join(",")
        };
        let name = format!("{}[{}@{}]", self.name, shown(None), position + 1);
        if let FnKind::Lifted { items, images } = &self.kind {
            // union over the fixed arguments' items keeps the result lifted
            let n = *items;
            let mut out = vec![0u64; n];
            for (x, slot) in out.iter_mut().enumerate() {
                let mut args: Vec<Elem> = fixed.to_vec();
                args.insert(position, Elem(1 << x));
                let mut acc = 0u64;
                lifted_union(n, images, &args, 0, 0, &mut acc);
                *slot = acc;
            }
            return MonotoneFn::lifted(name, 1, n, out);
        }
        let base = self.clone();
        let fixed = fixed.to_vec();
        MonotoneFn::native(name, 1, move |lat, xs| {
            let mut args = fixed.clone();
            args.insert(position, xs[0]);
            base.apply(lat, &args)
        })
    }

    /// Unary functions obtained by currying all but one argument over every element.
    pub fn unary_family(&self, lat: &Lattice) -> Vec<MonotoneFn> {
        if self.arity <= 1 {
            return vec![self.clone()];
        }
        let others = lat.tuples(self.arity - 1);
        (0..self.arity)
            .flat_map(|pos| others.iter().map(move |fixed| self.curry(pos, fixed)))
            .collect()
    }

    /// `n`-fold composition of a unary function.
    pub fn power(&self, n: usize) -> MonotoneFn {
        assert_eq!(self.arity, 1);
        let base = self.clone();
        MonotoneFn::native(format!("{}^{n}", self.name), 1, move |lat, xs| {
            (0..n).fold(xs[0], |x, _| base.apply(lat, &[x]))
        })
    }

    /// `outer . self` for unary functions.
    pub fn then(&self, outer: MonotoneFn) -> MonotoneFn {
        assert_eq!(self.arity, 1);
        let inner = self.clone();
        MonotoneFn::native(
            format!("{}.{}", outer.name, self.name),
            1,
            move |lat, xs| {
                let y = inner.apply(lat, xs);
                outer.apply(lat, &[y])
            },
        )
    }
}

fn lifted_union(
    items: usize,
    images: &[u64],
    args: &[Elem],
    pos: usize,
    index: usize,
    out: &mut u64,
) {
    if pos == args.len() {
        *out |= images[index];
        return;
    }
    let mut mask = args[pos].0;
    while mask != 0 {
        let bit = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        lifted_union(items, images, args, pos + 1, index * items + bit, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(n: i64) -> (Lattice, Vec<i64>) {
        let vals: Vec<i64> = (-n..=n).collect();
        let lat = Lattice::powerset(
            vals.iter().map(|v| v.to_string()).collect(),
            SetOrder::Subset,
        )
        .unwrap();
        (lat, vals)
    }

    fn lift_unary(vals: &[i64], f: impl Fn(i64) -> i64) -> MonotoneFn {
        let pos = |v: i64| vals.iter().position(|&w| w == v).unwrap();
        let images = vals.iter().map(|&v| 1u64 << pos(f(v))).collect();
        MonotoneFn::lifted("f", 1, vals.len(), images)
    }

    #[test]
    fn lifted_function_maps_setwise() {
        let (lat, vals) = ints(3);
        let neg = lift_unary(&vals, |v| -v);
        let x = lat.parse_elem("{1,2}").unwrap();
        assert_eq!(lat.show(neg.apply(&lat, &[x])), "{-2,-1}");
        assert_eq!(neg.apply(&lat, &[lat.bottom()]), lat.bottom());
    }

    #[test]
    fn lifted_adjoint_matches_brute_force() {
        let (lat, vals) = ints(2);
        let sq = lift_unary(&vals, |v| (v * v).min(2));
        let fast = lat.right_adjoint(&sq, u64::MAX).unwrap();
        for y in lat.elements() {
            let slow = lat
                .elements()
                .filter(|&x| lat.leq(sq.apply(&lat, &[x]), y))
                .fold(lat.bottom(), |a, x| lat.join(a, x));
            assert_eq!(fast.apply(&lat, &[y]), slow);
        }
    }

    #[test]
    fn curried_lifted_binary_stays_lifted() {
        let (lat, vals) = ints(2);
        let n = vals.len();
        let images: Vec<u64> = (0..n * n)
            .map(|t| {
                let s = (vals[t / n] + vals[t % n]).clamp(-2, 2);
                1u64 << vals.iter().position(|&w| w == s).unwrap()
            })
            .collect();
        let add = MonotoneFn::lifted("add", 2, n, images);
        let one = lat.parse_elem("{1}").unwrap();
        let plus_one = add.curry(1, &[one]);
        assert!(plus_one.monotone_by_construction());
        let x = lat.parse_elem("{-1,0}").unwrap();
        assert_eq!(lat.show(plus_one.apply(&lat, &[x])), "{0,1}");
        assert_eq!(add.unary_family(&lat).len(), 2 * lat.size() as usize);
    }
}
