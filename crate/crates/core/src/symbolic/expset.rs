//! Eventually periodic subsets of ℕ, used as exponent sets of geometric chains.

use std::collections::BTreeSet;

use num_integer::Integer;

use super::{SymbolicError, MAX_PERIOD};

/// `e ∈ E` iff `e ∈ head` (for `e < start`) or `pattern[(e - start) % period]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct ExpSet {
    head: BTreeSet<u64>,
    start: u64,
    pattern: Vec<bool>,
}

impl ExpSet {
    pub(crate) fn empty() -> Self {
        ExpSet {
            head: BTreeSet::new(),
            start: 0,
            pattern: vec![false],
        }
    }

    /// `{first + step·n : n ≥ 0}`.
    pub(crate) fn progression(first: u64, step: u64) -> Self {
        assert!(step >= 1);
        let mut pattern = vec![false; step as usize];
        pattern[0] = true;
        ExpSet {
            head: BTreeSet::new(),
            start: first,
            pattern,
        }
    }

    /// Builds the set from its membership on `[0, start + period)`.
    pub(crate) fn from_membership(start: u64, period: u64, member: impl Fn(u64) -> bool) -> Self {
        let head = (0..start).filter(|&e| member(e)).collect();
        let pattern = (0..period).map(|i| member(start + i)).collect();
        ExpSet {
            head,
            start,
            pattern,
        }
    }

    pub(crate) fn period(&self) -> u64 {
        self.pattern.len() as u64
    }

    pub(crate) fn start(&self) -> u64 {
        self.start
    }

    pub(crate) fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub(crate) fn head(&self) -> &BTreeSet<u64> {
        &self.head
    }

    pub(crate) fn contains(&self, e: u64) -> bool {
        if e < self.start {
            self.head.contains(&e)
        } else {
            self.pattern[((e - self.start) % self.period()) as usize]
        }
    }

    pub(crate) fn is_infinite(&self) -> bool {
        self.pattern.iter().any(|&b| b)
    }

    /// Number of members, `None` when infinite.
    pub(crate) fn finite_len(&self) -> Option<usize> {
        if self.is_infinite() {
            None
        } else {
            Some(self.head.len())
        }
    }

    fn combine(
        &self,
        other: &ExpSet,
        f: impl Fn(bool, bool) -> bool,
    ) -> Result<ExpSet, SymbolicError> {
        let start = self.start.max(other.start);
        let period = self.period().lcm(&other.period());
        if period > MAX_PERIOD {
            return Err(SymbolicError::PeriodTooLarge(period as u128, MAX_PERIOD));
        }
        Ok(ExpSet::from_membership(start, period, |e| {
            f(self.contains(e), other.contains(e))
        }))
    }

    pub(crate) fn union(&self, other: &ExpSet) -> Result<ExpSet, SymbolicError> {
        self.combine(other, |a, b| a || b)
    }

    pub(crate) fn intersect(&self, other: &ExpSet) -> Result<ExpSet, SymbolicError> {
        self.combine(other, |a, b| a && b)
    }

    pub(crate) fn difference(&self, other: &ExpSet) -> Result<ExpSet, SymbolicError> {
        self.combine(other, |a, b| a && !b)
    }

    /// `{e + v : e ∈ E}`.
    pub(crate) fn shift_up(&self, v: u64) -> ExpSet {
        ExpSet {
            head: self.head.iter().map(|e| e + v).collect(),
            start: self.start + v,
            pattern: self.pattern.clone(),
        }
    }

    pub(crate) fn insert(&mut self, e: u64) {
        if self.contains(e) {
            return;
        }
        if e >= self.start {
            // push the periodic region past `e`, keeping the pattern phase
            let p = self.period();
            let steps = (e + 1 - self.start).div_ceil(p);
            let new_start = self.start + steps * p;
            for x in self.start..new_start {
                if self.contains(x) {
                    self.head.insert(x);
                }
            }
            self.start = new_start;
        }
        self.head.insert(e);
    }

    /// Minimal period, then minimal start.
    pub(crate) fn canonical(mut self) -> ExpSet {
        let period = self.pattern.len();
        for p in 1..=period {
            if period.is_multiple_of(p)
                && (0..period).all(|i| self.pattern[i] == self.pattern[i % p])
            {
                self.pattern.truncate(p);
                break;
            }
        }
        let p = self.pattern.len();
        while self.start > 0 {
            let e = self.start - 1;
            let expected = self.pattern[p - 1];
            if self.head.contains(&e) != expected {
                break;
            }
            self.head.remove(&e);
            self.start = e;
            self.pattern.rotate_right(1);
        }
        self
    }

    /// The periodic region only; members below `start` are dropped.
    pub(crate) fn tail(&self) -> ExpSet {
        ExpSet {
            head: BTreeSet::new(),
            start: self.start,
            pattern: self.pattern.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(e: &ExpSet, n: u64) -> Vec<u64> {
        (0..n).filter(|&x| e.contains(x)).collect()
    }

    #[test]
    fn progression_membership() {
        let e = ExpSet::progression(3, 2);
        assert_eq!(brute(&e, 12), vec![3, 5, 7, 9, 11]);
        assert!(e.is_infinite());
        assert!(!ExpSet::empty().is_infinite());
    }

    #[test]
    fn canonical_lowers_start_and_period() {
        let e = ExpSet::progression(4, 1)
            .union(&ExpSet::progression(0, 2))
            .unwrap()
            .canonical();
        // {0,2} ∪ {4,5,6,...}
        assert_eq!(e.start(), 4);
        assert_eq!(e.period(), 1);
        assert_eq!(e.head().iter().copied().collect::<Vec<_>>(), vec![0, 2]);
        let f = ExpSet::progression(0, 2)
            .union(&ExpSet::progression(2, 2))
            .unwrap()
            .canonical();
        assert_eq!((f.start(), f.period()), (0, 2));
    }

    #[test]
    fn insert_inside_periodic_region() {
        let mut e = ExpSet::progression(0, 3);
        e.insert(4);
        assert_eq!(brute(&e, 13), vec![0, 3, 4, 6, 9, 12]);
        let c = e.canonical();
        assert_eq!(brute(&c, 13), vec![0, 3, 4, 6, 9, 12]);
    }

    fn arb_expset() -> impl Strategy<Value = ExpSet> {
        proptest::collection::vec((0u64..20, 1u64..6), 0..4).prop_flat_map(|progs| {
            proptest::collection::btree_set(0u64..25, 0..5).prop_map(move |extra| {
                let mut e = ExpSet::empty();
                for &(a, b) in &progs {
                    e = e.union(&ExpSet::progression(a, b)).unwrap();
                }
                for x in &extra {
                    e.insert(*x);
                }
                e
            })
        })
    }

    proptest! {
        #[test]
        fn canonical_preserves_membership_and_is_idempotent(e in arb_expset()) {
            let c = e.clone().canonical();
            prop_assert_eq!(brute(&e, 200), brute(&c, 200));
            prop_assert_eq!(c.clone().canonical(), c);
        }

        #[test]
        fn set_operations_are_pointwise(a in arb_expset(), b in arb_expset()) {
            let u = a.union(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            let d = a.difference(&b).unwrap();
            for x in 0..200 {
                prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
                prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
                prop_assert_eq!(d.contains(x), a.contains(x) && !b.contains(x));
            }
        }

        #[test]
        fn equal_sets_have_equal_canonical_forms(a in arb_expset(), b in arb_expset()) {
            let ab = a.union(&b).unwrap().canonical();
            let ba = b.union(&a).unwrap().canonical();
            prop_assert_eq!(ab, ba);
        }
    }
}
