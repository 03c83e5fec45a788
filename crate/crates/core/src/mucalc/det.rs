use super::Formula;

/// `true` counts as the literal of the full state set and `false` as its negation.
fn literal(f: &Formula) -> Option<(bool, &Formula)> {
    match f {
        Formula::Sigma(_) => Some((true, f)),
        Formula::True => Some((true, &Formula::True)),
        Formula::False => Some((false, &Formula::True)),
        Formula::Not(a) if matches!(**a, Formula::Sigma(_)) => Some((false, a)),
        _ => None,
    }
}

/// Splits `guard & rest` (either order; a lone literal has rest `true`)
/// into the guard literal and the remaining conjunct.
fn guarded(f: &Formula) -> Vec<((bool, &Formula), &Formula)> {
    let mut out = vec![((true, &Formula::True), f)];
    if let Some(lit) = literal(f) {
        out.push((lit, &Formula::True));
    }
    if let Formula::And(a, b) = f {
        if let Some(lit) = literal(a) {
            out.push((lit, &**b));
        }
        if let Some(lit) = literal(b) {
            out.push((lit, &**a));
        }
    }
    out
}

/// The pair `(sigma_S & left, !sigma_S & right)` with complementary guards.
fn complementary(a: &Formula, b: &Formula) -> bool {
    guarded(a).iter().any(|&((pos_a, atom_a), rest_a)| {
        pos_a
            && guarded(b).iter().any(|&((pos_b, atom_b), rest_b)| {
                !pos_b && atom_a == atom_b && is_ltl_det(rest_a) && is_ltl_det(rest_b)
            })
    })
}

/// Syntactic membership in the deterministic fragment shared by linear and
/// universal branching time logic, with the temporal sugar expanded:
/// `F a = true U a`, `G a = a W false`.
pub fn is_ltl_det(phi: &Formula) -> bool {
    use Formula::*;
    if literal(phi).is_some() {
        return true;
    }
    match phi {
        And(a, b) => is_ltl_det(a) && is_ltl_det(b),
        Or(a, b) => complementary(a, b) || complementary(b, a),
        Next(a) => is_ltl_det(a),
        Until(a, b) | WeakUntil(a, b) => complementary(a, b),
        Eventually(a) => complementary(&True, a),
        Always(a) => complementary(a, &False),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mucalc::parse_formula;

    fn det(text: &str) -> bool {
        is_ltl_det(&parse_formula(text).unwrap())
    }

    #[test]
    fn grammar_examples() {
        assert!(det("[S:{1,2}]"));
        assert!(det("![S:{1,2}]"));
        assert!(det("([S:{1}] & ()[S:{2}]) | (![S:{1}] & [S:{2}])"));
        assert!(!det("G p | F G q"));
        assert!(det("G p"));
        assert!(det("p U (!p & ()q)"));
        assert!(det("p W !p"));
        assert!(!det("p U q"));
        assert!(!det("F p"));
        assert!(det("()(p & q)"));
        assert!(!det("p | q"));
        assert!(!det("(-)p"));
        assert!(!det("!!p"));
    }
}
