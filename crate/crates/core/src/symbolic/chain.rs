//! Geometric chains `coeff·b^e + offset` over the session base `b`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Identifies a geometric chain. `coeff` is never divisible by the session
/// base, which makes the key a unique name for the sequence of points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct ChainKey {
    pub(crate) coeff: BigInt,
    pub(crate) offset: BigInt,
}

impl ChainKey {
    /// Splits `coeff` into `c'·b^v` with `b ∤ c'`; returns the key and `v`.
    pub(crate) fn normalized(coeff: BigInt, offset: BigInt, base: u32) -> (ChainKey, u64) {
        assert!(!coeff.is_zero());
        let b = BigInt::from(base);
        let mut c = coeff;
        let mut v = 0u64;
        loop {
            let (q, r) = c.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            c = q;
            v += 1;
        }
        (ChainKey { coeff: c, offset }, v)
    }

    pub(crate) fn point(&self, base: u32, e: u64) -> BigInt {
        &self.coeff * pow(base, e) + &self.offset
    }

    pub(crate) fn translated(&self, g: &BigInt) -> ChainKey {
        ChainKey {
            coeff: self.coeff.clone(),
            offset: &self.offset + g,
        }
    }

    /// The exponent `e` with `point(e) == x`, if any.
    pub(crate) fn exponent_of(&self, base: u32, x: &BigInt) -> Option<u64> {
        let y = x - &self.offset;
        let (q, r) = y.div_rem(&self.coeff);
        if !r.is_zero() {
            return None;
        }
        log_exact(&q, base)
    }

    /// All `(e, f)` with `self.point(e) == other.point(f)`, for distinct keys.
    ///
    /// With `Δ = d₂ − d₁ ≠ 0` and `e ≥ f` the equation reads `b^f(c₁b^t − c₂) = Δ`,
    /// so `b^f | Δ`; symmetrically for `f > e`. Equal offsets admit no solution
    /// because neither coefficient is divisible by `b`.
    pub(crate) fn cross_points(&self, other: &ChainKey, base: u32) -> Vec<(u64, u64)> {
        debug_assert!(self != other);
        let delta = &other.offset - &self.offset;
        let mut out = Vec::new();
        if delta.is_zero() {
            return out;
        }
        let b = BigInt::from(base);
        let mut scaled = delta.clone();
        let mut k = 0u64;
        loop {
            // e >= f = k: c₁ b^t = c₂ + Δ/b^k
            if let Some(t) = quotient_log(&(&other.coeff + &scaled), &self.coeff, base) {
                out.push((k + t, k));
            }
            // f > e = k: c₂ b^t = c₁ − Δ/b^k with t >= 1
            if let Some(t) = quotient_log(&(&self.coeff - &scaled), &other.coeff, base) {
                if t >= 1 {
                    out.push((k, k + t));
                }
            }
            let (q, r) = scaled.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            scaled = q;
            k += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Upper bound on the number of cross points with a distinct key, computed
    /// from the b-adic valuation of the offset difference alone.
    pub(crate) fn cross_point_bound(&self, other: &ChainKey, base: u32) -> usize {
        let delta = &other.offset - &self.offset;
        if delta.is_zero() {
            return 0;
        }
        let b = BigInt::from(base);
        let mut v = 0usize;
        let mut rest = delta;
        loop {
            let (q, r) = rest.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            rest = q;
            v += 1;
        }
        2 * (v + 1)
    }
}

impl fmt::Display for ChainKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·b^e{:+}", self.coeff, self.offset)
    }
}

pub(crate) fn pow(base: u32, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

/// `e` with `q == b^e`.
pub(crate) fn log_exact(q: &BigInt, base: u32) -> Option<u64> {
    if !q.is_positive() {
        return None;
    }
    let b = BigInt::from(base);
    let mut rest = q.clone();
    let mut e = 0u64;
    while !rest.is_one() {
        let (nq, r) = rest.div_rem(&b);
        if !r.is_zero() {
            return None;
        }
        rest = nq;
        e += 1;
    }
    Some(e)
}

/// `t` with `num == den·b^t`.
fn quotient_log(num: &BigInt, den: &BigInt, base: u32) -> Option<u64> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return None;
    }
    log_exact(&q, base)
}

/// Exponent with `base^e == b`, when `b` is a power of `base` with `e >= 1`.
pub(crate) fn base_exponent(b: &BigInt, base: u32) -> Option<u64> {
    log_exact(b, base).filter(|&e| e >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(c: i64, d: i64) -> ChainKey {
        ChainKey {
            coeff: BigInt::from(c),
            offset: BigInt::from(d),
        }
    }

    fn brute_cross(a: &ChainKey, b: &ChainKey, base: u32, n: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for e in 0..n {
            for f in 0..n {
                if a.point(base, e) == b.point(base, f) {
                    out.push((e, f));
                }
            }
        }
        out
    }

    #[test]
    fn normalization_strips_base_factors() {
        let (k, v) = ChainKey::normalized(BigInt::from(12), BigInt::from(5), 2);
        assert_eq!((k, v), (key(3, 5), 2));
        let (k, v) = ChainKey::normalized(BigInt::from(-8), BigInt::zero(), 2);
        assert_eq!((k, v), (key(-1, 0), 3));
        let (k, v) = ChainKey::normalized(BigInt::from(18), BigInt::zero(), 3);
        assert_eq!((k, v), (key(2, 0), 2));
    }

    #[test]
    fn powers_of_two_meet_their_unit_translate_once() {
        // 2^e = 2^f + 1 only at (1, 0)
        assert_eq!(key(1, 0).cross_points(&key(1, 1), 2), vec![(1, 0)]);
        assert_eq!(brute_cross(&key(1, 0), &key(1, 1), 2, 64), vec![(1, 0)]);
    }

    #[test]
    fn cross_points_match_brute_force() {
        for base in [2u32, 3, 4, 6] {
            for c1 in [-5i64, -3, -1, 1, 3, 5, 7] {
                for c2 in [-3i64, -1, 1, 5] {
                    for d in -40i64..=40 {
                        let a = key(c1, 0);
                        let b = key(c2, d);
                        if a == b || (c1 % base as i64 == 0) || (c2 % base as i64 == 0) {
                            continue;
                        }
                        let fast = a.cross_points(&b, base);
                        let slow = brute_cross(&a, &b, base, 24);
                        assert_eq!(fast, slow, "base {base} {a} vs {b}");
                        assert!(fast.len() <= a.cross_point_bound(&b, base));
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_lookup() {
        let k = key(3, 1);
        assert_eq!(k.exponent_of(2, &BigInt::from(25)), Some(3));
        assert_eq!(k.exponent_of(2, &BigInt::from(4)), Some(0));
        assert_eq!(k.exponent_of(2, &BigInt::from(10)), None);
        assert_eq!(key(-1, 0).exponent_of(2, &BigInt::from(-16)), Some(4));
        assert_eq!(base_exponent(&BigInt::from(8), 2), Some(3));
        assert_eq!(base_exponent(&BigInt::from(1), 2), None);
        assert_eq!(base_exponent(&BigInt::from(6), 2), None);
    }
}
