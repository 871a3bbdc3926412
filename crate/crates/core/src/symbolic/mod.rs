//! Exact, canonical subsets of ℤ built from finite sets, geometric terms
//! `{c·bⁿ + d : n ≥ n₀}` and two-sided progressions `{c·n + d : n ∈ ℤ}`.
//!
//! Internally a set is held as three disjoint-ish components:
//!
//! * a periodic part `P` (residue pattern modulo a minimal modulus),
//! * geometric chains keyed by `(c', d)` with `b₀ ∤ c'`, each carrying the
//!   eventually periodic set of exponents `e` with `c'·b₀^e + d` in the set,
//! * a finite remainder.
//!
//! The canonical form is a function of the denoted set alone: `P` is the union
//! of all progressions inside the set, a chain is kept iff infinitely many of
//! its points lie outside `P` (and then holds exactly those beyond its minimal
//! periodicity threshold), and the finite part is whatever is left. Equality of
//! canonical forms is therefore equality of sets.

mod chain;
mod expset;
mod json;
mod periodic;
mod spectrum;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use chain::{base_exponent, pow, ChainKey};
use expset::ExpSet;
use periodic::Periodic;

pub use json::big_to_json;
pub use periodic::ApTerm;
pub use spectrum::{ClassShift, ShiftSpectrum};

/// Largest residue modulus the periodic part may use.
pub const MAX_MODULUS: u64 = 1 << 20;
/// Largest exponent period a chain may use.
pub const MAX_PERIOD: u64 = 1 << 20;
pub const DEFAULT_BASE: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("session base must be at least 2, got {0}")]
    InvalidSessionBase(u32),
    #[error("geometric base {base} is not a positive power of the session base {session}")]
    BaseNotPower { base: BigInt, session: u32 },
    #[error("sets use different session bases ({0} and {1})")]
    BaseMismatch(u32, u32),
    #[error("geometric coefficient must be nonzero")]
    ZeroCoefficient,
    #[error("progression modulus must be positive, got {0}")]
    InvalidModulus(BigInt),
    #[error("start index must be nonnegative, got {0}")]
    InvalidStart(BigInt),
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("period {0} exceeds the supported limit {1}")]
    PeriodTooLarge(u128, u64),
    #[error("malformed set JSON: {0}")]
    Json(String),
}

/// `{coeff·baseⁿ + offset : n ≥ start}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeoTerm {
    pub base: BigInt,
    pub coeff: BigInt,
    pub offset: BigInt,
    pub start: u64,
}

impl fmt::Display for GeoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "geo({},{},{},{})",
            self.base, self.coeff, self.offset, self.start
        )
    }
}

/// Unnormalized union of components, fed to [`normalize`].
#[derive(Default)]
struct Loose {
    finite: Vec<BigInt>,
    chains: Vec<(ChainKey, ExpSet)>,
    periodic: Vec<Periodic>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicSet {
    base: u32,
    finite: BTreeSet<BigInt>,
    chains: BTreeMap<ChainKey, ExpSet>,
    periodic: Periodic,
}

fn check_base(base: u32) -> Result<(), SymbolicError> {
    if base < 2 {
        Err(SymbolicError::InvalidSessionBase(base))
    } else {
        Ok(())
    }
}

impl SymbolicSet {
    pub fn empty(base: u32) -> Result<Self, SymbolicError> {
        check_base(base)?;
        Ok(SymbolicSet {
            base,
            finite: BTreeSet::new(),
            chains: BTreeMap::new(),
            periodic: Periodic::empty(),
        })
    }

    pub fn finite<I, T>(base: u32, items: I) -> Result<Self, SymbolicError>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut s = SymbolicSet::empty(base)?;
        s.finite = items.into_iter().map(Into::into).collect();
        Ok(s)
    }

    /// `{c·bⁿ + d : n ≥ n0}` where `b` must be a positive power of the session base.
    pub fn geo(
        base: u32,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
        n0: u64,
    ) -> Result<Self, SymbolicError> {
        check_base(base)?;
        let term = GeoTerm {
            base: b.into(),
            coeff: c.into(),
            offset: d.into(),
            start: n0,
        };
        let loose = Loose {
            chains: vec![geo_chain(base, &term)?],
            ..Loose::default()
        };
        normalize(base, loose)
    }

    /// `{c·n + d : n ∈ ℤ}`.
    pub fn ap(
        base: u32,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, SymbolicError> {
        check_base(base)?;
        let term = ApTerm::new(c, d)?;
        let loose = Loose {
            periodic: vec![Periodic::from_ap(&term)?],
            ..Loose::default()
        };
        normalize(base, loose)
    }

    /// The union of the given components.
    pub fn from_terms(
        base: u32,
        finite: impl IntoIterator<Item = BigInt>,
        geos: &[GeoTerm],
        aps: &[ApTerm],
    ) -> Result<Self, SymbolicError> {
        check_base(base)?;
        let mut loose = Loose {
            finite: finite.into_iter().collect(),
            ..Loose::default()
        };
        for g in geos {
            loose.chains.push(geo_chain(base, g)?);
        }
        for a in aps {
            loose.periodic.push(Periodic::from_ap(a)?);
        }
        normalize(base, loose)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn finite_part(&self) -> &BTreeSet<BigInt> {
        &self.finite
    }

    /// Geometric components in canonical form (`start` is always 0).
    pub fn geo_terms(&self) -> Vec<GeoTerm> {
        let mut out = Vec::new();
        for (key, tail) in &self.chains {
            let p = tail.period();
            for (i, &on) in tail.pattern().iter().enumerate() {
                if on {
                    let e = tail.start() + i as u64;
                    out.push(GeoTerm {
                        base: pow(self.base, p),
                        coeff: &key.coeff * pow(self.base, e),
                        offset: key.offset.clone(),
                        start: 0,
                    });
                }
            }
        }
        out
    }

    /// Periodic components as the inclusion-maximal progressions inside the set.
    pub fn ap_terms(&self) -> Vec<ApTerm> {
        if self.periodic.is_empty() {
            Vec::new()
        } else {
            self.periodic.maximal_aps()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.chains.is_empty() && self.periodic.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.chains.is_empty() && self.periodic.is_empty()
    }

    /// Number of elements of a finite set.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.finite.len())
    }

    /// Contains a two-sided progression.
    pub fn has_periodic_part(&self) -> bool {
        !self.periodic.is_empty()
    }

    /// Number of geometric chains (distinct normalized `(c', d)` keys).
    pub fn chain_count(&self) -> usize {
        self.chains.len()
    }

    pub fn member(&self, x: &BigInt) -> bool {
        self.finite.contains(x) || self.periodic.contains(x) || self.on_chain(x)
    }

    fn on_chain(&self, x: &BigInt) -> bool {
        self.chains
            .iter()
            .any(|(k, t)| k.exponent_of(self.base, x).is_some_and(|e| t.contains(e)))
    }

    pub fn translate(&self, g: &BigInt) -> SymbolicSet {
        SymbolicSet {
            base: self.base,
            finite: self.finite.iter().map(|x| x + g).collect(),
            chains: self
                .chains
                .iter()
                .map(|(k, t)| (k.translated(g), t.clone()))
                .collect(),
            periodic: self.periodic.translate(g),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Result<SymbolicSet, SymbolicError> {
        if k.is_zero() {
            return Err(SymbolicError::ZeroScale);
        }
        let mut loose = Loose {
            finite: self.finite.iter().map(|x| x * k).collect(),
            periodic: vec![self.periodic.scale(k)?],
            ..Loose::default()
        };
        for (key, tail) in &self.chains {
            let (nk, v) = ChainKey::normalized(&key.coeff * k, &key.offset * k, self.base);
            loose.chains.push((nk, tail.shift_up(v)));
        }
        normalize(self.base, loose)
    }

    fn same_base(&self, other: &SymbolicSet) -> Result<(), SymbolicError> {
        if self.base != other.base {
            Err(SymbolicError::BaseMismatch(self.base, other.base))
        } else {
            Ok(())
        }
    }

    fn to_loose(&self, loose: &mut Loose) {
        loose.finite.extend(self.finite.iter().cloned());
        loose
            .chains
            .extend(self.chains.iter().map(|(k, t)| (k.clone(), t.clone())));
        loose.periodic.push(self.periodic.clone());
    }

    pub fn union(&self, other: &SymbolicSet) -> Result<SymbolicSet, SymbolicError> {
        self.same_base(other)?;
        let mut loose = Loose::default();
        self.to_loose(&mut loose);
        other.to_loose(&mut loose);
        normalize(self.base, loose)
    }

    pub fn intersect(&self, other: &SymbolicSet) -> Result<SymbolicSet, SymbolicError> {
        self.same_base(other)?;
        let base = self.base;
        let mut loose = Loose::default();
        loose
            .finite
            .extend(self.finite.iter().filter(|x| other.member(x)).cloned());
        loose
            .finite
            .extend(other.finite.iter().filter(|x| self.member(x)).cloned());
        loose
            .periodic
            .push(self.periodic.intersect(&other.periodic)?);
        for (a, b) in [(self, other), (other, self)] {
            if b.periodic.is_empty() {
                continue;
            }
            for (key, tail) in &a.chains {
                let hits = b.periodic.exponent_hits(key, base);
                loose.chains.push((key.clone(), tail.intersect(&hits)?));
            }
        }
        for (k1, t1) in &self.chains {
            for (k2, t2) in &other.chains {
                if k1 == k2 {
                    loose.chains.push((k1.clone(), t1.intersect(t2)?));
                } else {
                    for (e, f) in k1.cross_points(k2, base) {
                        if t1.contains(e) && t2.contains(f) {
                            loose.finite.push(k1.point(base, e));
                        }
                    }
                }
            }
        }
        normalize(base, loose)
    }

    /// `A ∩ (g + A)`.
    pub fn shift_child(&self, g: &BigInt) -> Result<SymbolicSet, SymbolicError> {
        self.intersect(&self.translate(g))
    }

    /// `A ∩ [lo, hi]` by direct evaluation of the canonical terms.
    pub fn enumerate_window(&self, lo: &BigInt, hi: &BigInt) -> BTreeSet<BigInt> {
        if lo > hi {
            return BTreeSet::new();
        }
        let mut out: BTreeSet<BigInt> = self
            .finite
            .range(lo.clone()..=hi.clone())
            .cloned()
            .collect();
        for term in self.geo_terms() {
            let reach = (lo - &term.offset).abs().max((hi - &term.offset).abs());
            let mut scaled = &term.coeff * num_traits::pow(term.base.clone(), term.start as usize);
            while scaled.abs() <= reach {
                let x = &scaled + &term.offset;
                if &x >= lo && &x <= hi {
                    out.insert(x);
                }
                scaled *= &term.base;
            }
        }
        for term in self.ap_terms() {
            let first = lo + (&term.residue - lo).mod_floor(&term.modulus);
            let mut x = first;
            while &x <= hi {
                out.insert(x.clone());
                x += &term.modulus;
            }
        }
        out
    }

    /// The translation-invariant part of the memo key: the set translated so
    /// that an equivariantly chosen anchor sits at 0. Returns `(normal, anchor)`
    /// with `self == normal.translate(anchor)`.
    pub fn translation_normal_form(&self) -> (SymbolicSet, BigInt) {
        let anchor = if let Some(k) = self.chains.keys().next() {
            k.offset.clone()
        } else if let Some(x) = self.finite.iter().next() {
            x.clone()
        } else if !self.periodic.is_empty() {
            // the residue whose removal gives the lexicographically least pattern
            let p = &self.periodic;
            let rot = |r: u64| -> Vec<u64> {
                let mut v: Vec<u64> = p
                    .residues()
                    .map(|x| (x + p.modulus() - r) % p.modulus())
                    .collect();
                v.sort_unstable();
                v
            };
            let best = p.residues().min_by_key(|&r| rot(r)).expect("nonempty");
            BigInt::from(best)
        } else {
            BigInt::zero()
        };
        (self.translate(&-&anchor), anchor)
    }

    /// Short human summary for dumps.
    pub fn summary(&self, max_len: usize) -> String {
        let s = self.to_string();
        if s.chars().count() <= max_len {
            s
        } else {
            let cut: String = s.chars().take(max_len).collect();
            format!("{cut}…")
        }
    }
}

fn geo_chain(base: u32, term: &GeoTerm) -> Result<(ChainKey, ExpSet), SymbolicError> {
    let j = base_exponent(&term.base, base).ok_or_else(|| SymbolicError::BaseNotPower {
        base: term.base.clone(),
        session: base,
    })?;
    if term.coeff.is_zero() {
        return Err(SymbolicError::ZeroCoefficient);
    }
    let (key, v) = ChainKey::normalized(term.coeff.clone(), term.offset.clone(), base);
    Ok((key, ExpSet::progression(v + j * term.start, j)))
}

fn normalize(base: u32, loose: Loose) -> Result<SymbolicSet, SymbolicError> {
    let mut periodic = Periodic::empty();
    for p in &loose.periodic {
        periodic = periodic.union(p)?;
    }

    let mut grouped: BTreeMap<ChainKey, ExpSet> = BTreeMap::new();
    for (k, e) in loose.chains {
        match grouped.get_mut(&k) {
            Some(cur) => *cur = cur.union(&e)?,
            None => {
                grouped.insert(k, e);
            }
        }
    }

    // every exponent whose point is in the set, from any component
    let mut full = grouped.clone();
    for (k, exps) in full.iter_mut() {
        for x in &loose.finite {
            if let Some(e) = k.exponent_of(base, x) {
                exps.insert(e);
            }
        }
        for (k2, e2) in &grouped {
            if k2 == k {
                continue;
            }
            for (e, f) in k.cross_points(k2, base) {
                if e2.contains(f) {
                    exps.insert(e);
                }
            }
        }
        if !periodic.is_empty() {
            *exps = exps.difference(&periodic.exponent_hits(k, base))?;
        }
    }

    let mut candidates: BTreeSet<BigInt> = loose
        .finite
        .into_iter()
        .filter(|x| !periodic.contains(x))
        .collect();
    let mut chains = BTreeMap::new();
    for (k, exps) in full {
        let exps = exps.canonical();
        for &e in exps.head() {
            candidates.insert(k.point(base, e));
        }
        if exps.is_infinite() {
            chains.insert(k, exps.tail());
        }
    }

    let finite = candidates
        .into_iter()
        .filter(|x| {
            !chains.iter().any(|(k, t): (&ChainKey, &ExpSet)| {
                k.exponent_of(base, x).is_some_and(|e| t.contains(e))
            })
        })
        .collect();

    Ok(SymbolicSet {
        base,
        finite,
        chains,
        periodic,
    })
}

impl fmt::Display for SymbolicSet {
    /// Prints the canonical form in the expression syntax accepted by the CLI.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.finite.is_empty() {
            let items: Vec<String> = self.finite.iter().map(|x| x.to_string()).collect();
            parts.push(format!("{{{}}}", items.join(",")));
        }
        parts.extend(self.geo_terms().iter().map(|g| g.to_string()));
        parts.extend(self.ap_terms().iter().map(|a| a.to_string()));
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", parts.join(" | "))
        }
    }
}

/// Integer helper used by callers that build windows.
pub fn to_i128(x: &BigInt) -> Option<i128> {
    x.to_i128()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn geo(b: i64, c: i64, d: i64, n0: u64) -> SymbolicSet {
        SymbolicSet::geo(2, b, c, d, n0).unwrap()
    }

    fn ap(c: i64, d: i64) -> SymbolicSet {
        SymbolicSet::ap(2, c, d).unwrap()
    }

    fn fin(items: &[i64]) -> SymbolicSet {
        SymbolicSet::finite(2, items.iter().copied()).unwrap()
    }

    fn window(s: &SymbolicSet, lo: i64, hi: i64) -> Vec<i64> {
        s.enumerate_window(&int(lo), &int(hi))
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn membership_examples() {
        assert!(geo(2, 1, 0, 0).member(&int(8)));
        assert!(!geo(2, 1, 0, 0).member(&int(6)));
        assert!(ap(2, 0).member(&int(-4)));
        assert!(!ap(2, 0).member(&int(-3)));
    }

    #[test]
    fn translate_examples() {
        let a = geo(2, 1, 0, 0);
        assert_eq!(a.translate(&int(1)), geo(2, 1, 1, 0));
        assert_eq!(a.translate(&int(0)), a);
        assert_eq!(a.translate(&int(5)).translate(&int(-5)), a);
    }

    #[test]
    fn scale_examples() {
        let a = geo(2, 1, 0, 0);
        assert_eq!(a.scale(&int(3)).unwrap(), geo(2, 3, 0, 0));
        assert_eq!(a.scale(&int(1)).unwrap(), a);
        assert_eq!(ap(2, 0).scale(&int(2)).unwrap(), ap(4, 0));
        assert_eq!(a.scale(&int(0)), Err(SymbolicError::ZeroScale));
    }

    #[test]
    fn union_examples() {
        let u = geo(2, 3, 0, 0).union(&geo(2, 3, 1, 0)).unwrap();
        assert_eq!(u.geo_terms().len(), 2);
        assert_eq!(u.to_string(), "geo(2,3,0,0) | geo(2,3,1,0)");
        let a = geo(2, 5, -3, 2).union(&fin(&[1, 2])).unwrap();
        assert_eq!(a.union(&a).unwrap(), a);
        assert_eq!(a.union(&SymbolicSet::empty(2).unwrap()).unwrap(), a);
    }

    #[test]
    fn powers_of_two_meet_their_unit_translate_in_two() {
        let a = geo(2, 1, 0, 0);
        let i = a.intersect(&a.translate(&int(1))).unwrap();
        assert_eq!(i, fin(&[2]));
        assert!(i.is_finite());
    }

    #[test]
    fn intersect_examples() {
        assert!(ap(2, 0).intersect(&ap(4, 1)).unwrap().is_empty());
        let g = geo(2, 3, 0, 0);
        assert_eq!(g.intersect(&g).unwrap(), g);
        // even powers of two are exactly those ≡ 1 (mod 3)
        let even = geo(2, 1, 0, 0).intersect(&ap(3, 1)).unwrap();
        assert_eq!(even, geo(4, 1, 0, 0));
    }

    #[test]
    fn mixed_bases_are_reconciled() {
        let a = geo(4, 1, 0, 0).union(&geo(4, 2, 0, 0)).unwrap();
        assert_eq!(a, geo(2, 1, 0, 0));
        let b = geo(8, 1, 0, 0).intersect(&geo(4, 1, 0, 0)).unwrap();
        assert_eq!(b, geo(64, 1, 0, 0));
        assert_eq!(window(&b, 0, 5000), vec![1, 64, 4096]);
    }

    #[test]
    fn base_mismatch_and_validation() {
        let a = SymbolicSet::geo(3, 3, 1, 0, 0).unwrap();
        let b = geo(2, 1, 0, 0);
        assert_eq!(a.union(&b), Err(SymbolicError::BaseMismatch(3, 2)));
        assert!(matches!(
            SymbolicSet::geo(2, 6, 1, 0, 0),
            Err(SymbolicError::BaseNotPower { .. })
        ));
        assert_eq!(
            SymbolicSet::geo(2, 2, 0, 0, 0),
            Err(SymbolicError::ZeroCoefficient)
        );
        assert!(SymbolicSet::empty(1).is_err());
    }

    #[test]
    fn finite_points_are_absorbed_into_chains() {
        // {1} ∪ {2ⁿ : n ≥ 1} is the whole chain of powers of two
        let a = fin(&[1]).union(&geo(2, 1, 0, 1)).unwrap();
        assert_eq!(a, geo(2, 1, 0, 0));
        assert!(a.finite_part().is_empty());
        // a missing point stays missing: {2ⁿ : n ≠ 1} = {1} ∪ {2ⁿ : n ≥ 2}
        let b = fin(&[1]).union(&geo(2, 1, 0, 2)).unwrap();
        assert_eq!(b.finite_part().len(), 1);
    }

    #[test]
    fn cross_chain_points_do_not_break_canonicality() {
        // 2 = 2^0 + 1 lies on both chains
        let whole = geo(2, 1, 0, 0).union(&geo(2, 1, 1, 0)).unwrap();
        let pieces = fin(&[1])
            .union(&geo(2, 4, 0, 0))
            .unwrap()
            .union(&geo(2, 1, 1, 0))
            .unwrap();
        assert_eq!(whole, pieces);
    }

    #[test]
    fn chains_inside_progressions_disappear() {
        let a = geo(2, 2, 0, 0).union(&ap(2, 0)).unwrap();
        assert_eq!(a, ap(2, 0));
        let b = geo(2, 1, 0, 0).union(&ap(2, 0)).unwrap();
        assert_eq!(b.to_string(), "{1} | ap(2,0)");
        let c = ap(2, 0).union(&ap(2, 1)).unwrap();
        assert_eq!(c, ap(1, 0));
    }

    #[test]
    fn finiteness() {
        assert!(fin(&[1, 5, 9]).is_finite());
        assert!(!geo(2, 1, 0, 0).is_finite());
        assert!(!ap(3, 2).is_finite());
    }

    #[test]
    fn window_examples() {
        assert_eq!(window(&geo(2, 1, 0, 0), 0, 10), vec![1, 2, 4, 8]);
        assert_eq!(window(&ap(3, 1), 0, 10), vec![1, 4, 7, 10]);
        assert!(window(&SymbolicSet::empty(2).unwrap(), -5, 5).is_empty());
        assert_eq!(window(&geo(2, -3, 1, 0), -30, 0), vec![-23, -11, -5, -2]);
    }

    #[test]
    fn periodic_normal_form_is_translation_invariant() {
        let a = ap(3, 0).union(&ap(3, 1)).unwrap();
        let (n0, _) = a.translation_normal_form();
        for g in -7..7 {
            assert_eq!(a.translate(&int(g)).translation_normal_form().0, n0);
        }
    }

    #[test]
    fn normal_form_is_translation_invariant() {
        let a = geo(2, 3, 0, 0)
            .union(&geo(2, 3, 7, 0))
            .unwrap()
            .union(&fin(&[-4]))
            .unwrap();
        let (n1, o1) = a.translation_normal_form();
        let (n2, o2) = a.translate(&int(123)).translation_normal_form();
        assert_eq!(n1, n2);
        assert_eq!(&o2 - &o1, int(123));
        assert_eq!(n1.translate(&o1), a);
    }

    #[test]
    fn display_of_empty_and_finite() {
        assert_eq!(SymbolicSet::empty(2).unwrap().to_string(), "{}");
        assert_eq!(fin(&[3, -1]).to_string(), "{-1,3}");
    }
}
