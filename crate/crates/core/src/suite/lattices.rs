//! Shells and cores on every small lattice, compared with brute force over
//! all closures of the carrier.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::completeness::{complete_core, complete_shell, is_complete, FnSet};
use crate::lattice::{Elem, Lattice, MonotoneFn, Uco};

/// Strict orders on `k` labelled points, as bitmasks over ordered pairs
/// `(i, j)` at bit `i * k + j`, one per isomorphism class.
fn strict_orders(k: usize) -> Vec<u32> {
    let below = |m: u32, i: usize, j: usize| m >> (i * k + j) & 1 == 1;
    let is_order = |m: u32| {
        (0..k).all(|i| !below(m, i, i))
            && (0..k).all(|i| (0..k).all(|j| !(below(m, i, j) && below(m, j, i))))
            && (0..k).all(|i| {
                (0..k)
                    .all(|j| (0..k).all(|l| !(below(m, i, j) && below(m, j, l)) || below(m, i, l)))
            })
    };
    let perms = permutations(k);
    let relabel = |m: u32, p: &[usize]| {
        (0..k * k)
            .filter(|b| m >> b & 1 == 1)
            .fold(0u32, |acc, b| acc | 1 << (p[b / k] * k + p[b % k]))
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in 0..1u32 << (k * k) {
        if !is_order(m) {
            continue;
        }
        let canonical = perms.iter().map(|p| relabel(m, p)).min().unwrap_or(m);
        if seen.insert(canonical) {
            out.push(canonical);
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    permutations(k - 1)
        .into_iter()
        .flat_map(|p| {
            (0..k).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                q
            })
        })
        .collect()
}

/// Every lattice with `1..=max` elements up to isomorphism. Element `0` is
/// bottom and the last element is top.
pub fn small_lattices(max: usize) -> Vec<Arc<Lattice>> {
    let mut out = Vec::new();
    for n in 1..=max {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        if n <= 2 {
            let pairs = if n == 2 {
                vec![(names[0].clone(), names[1].clone())]
            } else {
                Vec::new()
            };
            out.push(Arc::new(
                Lattice::explicit(names, &pairs).expect("chains are lattices"),
            ));
            continue;
        }
        let k = n - 2;
        for order in strict_orders(k) {
            let mut pairs: Vec<(String, String)> = (1..n)
                .map(|i| (names[0].clone(), names[i].clone()))
                .collect();
            pairs.extend((1..n - 1).map(|i| (names[i].clone(), names[n - 1].clone())));
            for b in (0..k * k).filter(|b| order >> b & 1 == 1) {
                pairs.push((names[1 + b / k].clone(), names[1 + b % k].clone()));
            }
            if let Ok(lat) = Lattice::explicit(names.clone(), &pairs) {
                out.push(Arc::new(lat));
            }
        }
    }
    out
}

/// All closures of a small carrier.
pub fn all_closures(lat: &Arc<Lattice>) -> Vec<Uco> {
    let elems: Vec<Elem> = lat.elements().collect();
    (0..1u64 << elems.len())
        .filter_map(|mask| {
            let fixpoints: BTreeSet<Elem> = (0..elems.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| elems[i])
                .collect();
            Uco::new(lat.clone(), fixpoints).ok()
        })
        .collect()
}

/// A random monotone map: elements in rank order each pick an image above
/// the images of everything below them.
pub fn random_monotone(lat: &Lattice, rng: &mut StdRng, name: &str) -> MonotoneFn {
    let mut order: Vec<Elem> = lat.elements().collect();
    order.sort_by_key(|&x| (lat.rank(x), x));
    let mut image: HashMap<Elem, Elem> = HashMap::new();
    for &x in &order {
        let floor = lat.join_all(order.iter().filter(|&&y| lat.lt(y, x)).map(|y| image[y]));
        let above: Vec<Elem> = lat.elements().filter(|&y| lat.leq(floor, y)).collect();
        image.insert(x, above[rng.random_range(0..above.len())]);
    }
    MonotoneFn::table(
        name,
        1,
        image.into_iter().map(|(x, y)| (vec![x], y)).collect(),
    )
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeStats {
    pub lattices: usize,
    pub functions: usize,
    /// `(closure, function)` pairs whose shell and core were checked.
    pub cases: usize,
    pub failures: Vec<String>,
}

/// Compares the computed shell and core of every closure of every lattice
/// with at most `max_size` elements against the extremal complete closures
/// found by enumeration, for `per_lattice` random monotone maps each.
pub fn lattice_sweep(max_size: usize, per_lattice: usize, seed: u64) -> LatticeStats {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut stats = LatticeStats::default();
    for lat in small_lattices(max_size) {
        stats.lattices += 1;
        let closures = all_closures(&lat);
        for i in 0..per_lattice {
            let f = random_monotone(&lat, &mut rng, &format!("f{i}"));
            stats.functions += 1;
            let complete: Vec<&Uco> = closures
                .iter()
                .filter(|c| is_complete(c, &f).unwrap_or(false))
                .collect();
            let fs = FnSet::single(&lat, f.clone());
            for rho in &closures {
                stats.cases += 1;
                let fix = rho.fixpoints();
                let describe =
                    |what: &str| format!("{what} of {} for {:?} on {}", rho.show(), f, lat.size());
                match complete_shell(rho, &fs) {
                    Ok(r) => {
                        let best = r.result.fixpoints();
                        let ok = complete.iter().any(|c| c.fixpoints() == best)
                            && fix.is_subset(best)
                            && complete
                                .iter()
                                .filter(|c| fix.is_subset(c.fixpoints()))
                                .all(|c| best.is_subset(c.fixpoints()));
                        if !ok {
                            stats.failures.push(describe("shell"));
                        }
                    }
                    Err(e) => stats.failures.push(format!("{}: {e}", describe("shell"))),
                }
                match complete_core(rho, &fs) {
                    Ok(r) => {
                        let best = r.result.fixpoints();
                        let ok = complete.iter().any(|c| c.fixpoints() == best)
                            && best.is_subset(fix)
                            && complete
                                .iter()
                                .filter(|c| c.fixpoints().is_subset(fix))
                                .all(|c| c.fixpoints().is_subset(best));
                        if !ok {
                            stats.failures.push(describe("core"));
                        }
                    }
                    Err(e) => stats.failures.push(format!("{}: {e}", describe("core"))),
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        // 1, 1, 1, 2, 5, 15 lattices with 1..=6 elements
        let sizes: Vec<u64> = small_lattices(6).iter().map(|l| l.size()).collect();
        let count = |n| sizes.iter().filter(|&&s| s == n).count();
        assert_eq!(
            (1..=6).map(count).collect::<Vec<_>>(),
            vec![1, 1, 1, 2, 5, 15]
        );
    }

    #[test]
    fn random_maps_are_monotone() {
        let mut rng = StdRng::seed_from_u64(3);
        for lat in small_lattices(5) {
            let f = random_monotone(&lat, &mut rng, "f");
            assert!(lat.check_monotone(&f, 1 << 10).is_ok());
        }
    }

    #[test]
    fn four_element_sweep() {
        let stats = lattice_sweep(4, 3, 11);
        assert_eq!(stats.lattices, 5);
        assert!(stats.failures.is_empty(), "{:?}", stats.failures);
    }
}
