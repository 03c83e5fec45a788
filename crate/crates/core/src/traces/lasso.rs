use std::fmt::Debug;

/// A doubly ultimately periodic bi-infinite sequence.
///
/// Position `n` holds `left[(n - offset) mod |left|]` for `n < offset`,
/// `middle[n - offset]` inside the middle, and the right loop cycled after it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Lasso<T> {
    pub left: Vec<T>,
    pub middle: Vec<T>,
    pub right: Vec<T>,
    pub offset: i64,
}

/// Length of the shortest word whose repetition gives `w`.
pub fn primitive_len<T: PartialEq>(w: &[T]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl<T: Copy + Eq + Debug> Lasso<T> {
    /// Builds and canonicalizes. Panics on an empty loop.
    pub fn new(left: Vec<T>, middle: Vec<T>, right: Vec<T>, offset: i64) -> Self {
        Self::raw(left, middle, right, offset).canonical()
    }

    /// Builds without canonicalizing.
    pub fn raw(left: Vec<T>, middle: Vec<T>, right: Vec<T>, offset: i64) -> Self {
        assert!(
            !left.is_empty() && !right.is_empty(),
            "lasso loops must be nonempty"
        );
        Lasso {
            left,
            middle,
            right,
            offset,
        }
    }

    pub fn constant(value: T) -> Self {
        Lasso {
            left: vec![value],
            middle: Vec::new(),
            right: vec![value],
            offset: 0,
        }
    }

    /// First position of the right loop.
    pub fn end(&self) -> i64 {
        self.offset + self.middle.len() as i64
    }

    pub fn at(&self, n: i64) -> T {
        if n < self.offset {
            self.left[(n - self.offset).rem_euclid(self.left.len() as i64) as usize]
        } else if n < self.end() {
            self.middle[(n - self.offset) as usize]
        } else {
            self.right[(n - self.end()).rem_euclid(self.right.len() as i64) as usize]
        }
    }

    /// Globally periodic (only meaningful on canonical forms).
    pub fn is_periodic(&self) -> bool {
        self.middle.is_empty() && self.left == self.right
    }

    /// First position where the left loop stops predicting the sequence. On
    /// a canonical form this is the offset unless a middle character was
    /// absorbed into the right loop although it also fits the left one.
    pub fn left_extent(&self) -> i64 {
        let pu = self.left.len() as i64;
        let limit = self.end() + pu + self.right.len() as i64;
        let mut head = self.offset;
        while head < limit && self.at(head) == self.at(head - pu) {
            head += 1;
        }
        head
    }

    /// The values at positions `from..to`.
    pub fn window(&self, from: i64, to: i64) -> Vec<T> {
        (from..to).map(|n| self.at(n)).collect()
    }

    /// Minimal loops, minimal middle; a character that could join either
    /// loop goes to the right one. Globally periodic sequences get an empty
    /// middle and offset 0.
    pub fn canonical(&self) -> Self {
        let pu = primitive_len(&self.left);
        let pw = primitive_len(&self.right);
        let end = self.end();
        let floor = self.offset - (pu + pw) as i64;
        let mut tail = end;
        while tail > floor && self.at(tail - 1) == self.at(tail - 1 + pw as i64) {
            tail -= 1;
        }
        if tail <= floor {
            // agreement over pu + pw positions forces a common period
            let word = self.window(0, pw as i64);
            return Lasso {
                left: word.clone(),
                middle: Vec::new(),
                right: word,
                offset: 0,
            };
        }
        let mut head = self.offset.min(tail);
        while head < tail && self.at(head) == self.at(head - pu as i64) {
            head += 1;
        }
        Lasso {
            left: self.window(head - pu as i64, head),
            middle: self.window(head, tail),
            right: self.window(tail, tail + pw as i64),
            offset: head,
        }
    }

    /// Time reversal `n -> -n`, canonicalized.
    pub fn reversed(&self) -> Self {
        let rev = |w: &[T]| w.iter().rev().copied().collect::<Vec<T>>();
        Lasso {
            left: rev(&self.right),
            middle: rev(&self.middle),
            right: rev(&self.left),
            offset: 1 - self.end(),
        }
        .canonical()
    }

    /// The sequence `n -> self(n + by)`, canonicalized.
    pub fn shifted(&self, by: i64) -> Self {
        Lasso {
            offset: self.offset - by,
            ..self.clone()
        }
        .canonical()
    }

    pub fn map<U: Copy + Eq + Debug>(&self, f: impl Fn(T) -> U) -> Lasso<U> {
        Lasso {
            left: self.left.iter().map(|&x| f(x)).collect(),
            middle: self.middle.iter().map(|&x| f(x)).collect(),
            right: self.right.iter().map(|&x| f(x)).collect(),
            offset: self.offset,
        }
        .canonical()
    }

    /// Pointwise combination of two lassos.
    pub fn zip_with<U, V>(&self, other: &Lasso<U>, f: impl Fn(T, U) -> V) -> Lasso<V>
    where
        U: Copy + Eq + Debug,
        V: Copy + Eq + Debug,
    {
        let start = self.offset.min(other.offset);
        let stop = self.end().max(other.end());
        let pl = lcm(self.left.len(), other.left.len()) as i64;
        let pr = lcm(self.right.len(), other.right.len()) as i64;
        let at = |n: i64| f(self.at(n), other.at(n));
        Lasso {
            left: (start - pl..start).map(at).collect(),
            middle: (start..stop).map(at).collect(),
            right: (stop..stop + pr).map(at).collect(),
            offset: start,
        }
        .canonical()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(u: &str, v: &str, w: &str, o: i64) -> Lasso<u8> {
        Lasso::raw(
            u.bytes().collect(),
            v.bytes().collect(),
            w.bytes().collect(),
            o,
        )
    }

    #[test]
    fn minimal_loops() {
        assert_eq!(l("11", "", "22", 0).canonical(), l("1", "", "2", 0));
    }

    #[test]
    fn equal_paths_share_a_form() {
        assert_eq!(
            l("1", "12", "2", 0).canonical(),
            l("1", "2", "2", 1).canonical()
        );
        assert_eq!(l("1", "12", "2", 0).canonical(), l("1", "", "2", 1));
        // one more 1 moves the switch
        assert_ne!(
            l("1", "12", "2", 0).canonical(),
            l("1", "1", "2", 1).canonical()
        );
    }

    #[test]
    fn periodic_forms() {
        let raw = l("12", "1212", "12", -3);
        let a = raw.canonical();
        assert!(a.is_periodic());
        assert_eq!((a.left.len(), a.offset), (2, 0));
        assert_eq!(a.window(-10, 10), raw.window(-10, 10));
        assert!(!l("12", "1212", "21", -3).canonical().is_periodic());
    }

    #[test]
    fn absorbs_into_the_right_loop_first() {
        // the middle "1" fits both the left loop and the right loop "21"
        let c = l("1", "1", "21", 0).canonical();
        assert_eq!(c, l("1", "", "12", 0));
    }

    #[test]
    fn reversal_of_a_switch() {
        let r = l("1", "", "2", 1).reversed();
        assert_eq!(r, l("2", "", "1", 0));
        assert_eq!(r.reversed(), l("1", "", "2", 1));
    }

    fn word() -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..3, 1..4)
    }

    fn lasso() -> impl Strategy<Value = Lasso<u8>> {
        (
            word(),
            proptest::collection::vec(0u8..3, 0..4),
            word(),
            -4i64..4,
        )
            .prop_map(|(u, v, w, o)| Lasso::raw(u, v, w, o))
    }

    proptest! {
        #[test]
        fn canonical_preserves_the_sequence(a in lasso()) {
            let c = a.canonical();
            prop_assert_eq!(c.window(-30, 30), a.window(-30, 30));
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(c.left.len(), primitive_len(&c.left));
            prop_assert_eq!(c.right.len(), primitive_len(&c.right));
        }

        #[test]
        fn canonical_forms_decide_equality(a in lasso(), b in lasso()) {
            let same = a.window(-40, 40) == b.window(-40, 40);
            prop_assert_eq!(same, a.canonical() == b.canonical());
        }

        #[test]
        fn reversal_and_shift(a in lasso(), by in -5i64..5) {
            let r = a.reversed();
            for n in -20..20 {
                prop_assert_eq!(r.at(n), a.at(-n));
                prop_assert_eq!(a.shifted(by).at(n), a.at(n + by));
            }
            prop_assert_eq!(r.reversed(), a.canonical());
        }

        #[test]
        fn zip_is_pointwise(a in lasso(), b in lasso()) {
            let z = a.zip_with(&b, |x, y| x == y);
            for n in -30..30 {
                prop_assert_eq!(z.at(n), a.at(n) == b.at(n));
            }
        }
    }
}
