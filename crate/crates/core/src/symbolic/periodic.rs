//! Periodic subsets of ℤ: finite unions of two-sided arithmetic progressions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::chain::ChainKey;
use super::expset::ExpSet;
use super::{SymbolicError, MAX_MODULUS};

/// `{modulus·n + residue : n ∈ ℤ}` with `0 <= residue < modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApTerm {
    pub modulus: BigInt,
    pub residue: BigInt,
}

impl ApTerm {
    pub fn new(
        modulus: impl Into<BigInt>,
        residue: impl Into<BigInt>,
    ) -> Result<Self, SymbolicError> {
        let modulus = modulus.into();
        if !modulus.is_positive() {
            return Err(SymbolicError::InvalidModulus(modulus));
        }
        let residue = residue.into().mod_floor(&modulus);
        Ok(ApTerm { modulus, residue })
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        x.mod_floor(&self.modulus) == self.residue
    }

    /// Intersection by the Chinese remainder theorem (moduli need not be coprime).
    pub fn intersect(&self, other: &ApTerm) -> Option<ApTerm> {
        let g = self.modulus.gcd(&other.modulus);
        let diff = &other.residue - &self.residue;
        if !(&diff % &g).is_zero() {
            return None;
        }
        let lcm = &self.modulus / &g * &other.modulus;
        // self.residue + self.modulus·t ≡ other.residue (mod other.modulus)
        let m1 = &self.modulus / &g;
        let m2 = &other.modulus / &g;
        let t = if m2.is_one() {
            BigInt::zero()
        } else {
            let inv = mod_inverse(&m1.mod_floor(&m2), &m2).expect("coprime after dividing by gcd");
            (&diff / &g * inv).mod_floor(&m2)
        };
        let x = &self.residue + &self.modulus * t;
        Some(ApTerm {
            residue: x.mod_floor(&lcm),
            modulus: lcm,
        })
    }
}

impl fmt::Display for ApTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ap({},{})", self.modulus, self.residue)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// A periodic subset of ℤ stored as its residue pattern modulo a minimal modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Periodic {
    modulus: u64,
    residues: Vec<bool>,
}

impl Periodic {
    pub(crate) fn empty() -> Self {
        Periodic {
            modulus: 1,
            residues: vec![false],
        }
    }

    pub(crate) fn from_ap(ap: &ApTerm) -> Result<Self, SymbolicError> {
        let m = ap
            .modulus
            .to_u64()
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or(SymbolicError::PeriodTooLarge(u128::MAX, MAX_MODULUS))?;
        let r = ap.residue.to_u64().expect("residue below modulus");
        let mut residues = vec![false; m as usize];
        residues[r as usize] = true;
        Ok(Periodic {
            modulus: m,
            residues,
        }
        .canonical())
    }

    pub(crate) fn modulus(&self) -> u64 {
        self.modulus
    }

    pub(crate) fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        self.residues
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64)
    }

    pub(crate) fn is_empty(&self) -> bool {
        !self.residues.iter().any(|&b| b)
    }

    pub(crate) fn residue_of(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.modulus))
            .to_u64()
            .expect("reduced residue fits")
    }

    pub(crate) fn contains(&self, x: &BigInt) -> bool {
        self.residues[self.residue_of(x) as usize]
    }

    fn combine(
        &self,
        other: &Periodic,
        f: impl Fn(bool, bool) -> bool,
    ) -> Result<Periodic, SymbolicError> {
        let m = self.modulus.lcm(&other.modulus);
        if m > MAX_MODULUS {
            return Err(SymbolicError::PeriodTooLarge(m as u128, MAX_MODULUS));
        }
        let residues = (0..m)
            .map(|x| {
                f(
                    self.residues[(x % self.modulus) as usize],
                    other.residues[(x % other.modulus) as usize],
                )
            })
            .collect();
        Ok(Periodic {
            modulus: m,
            residues,
        }
        .canonical())
    }

    pub(crate) fn union(&self, other: &Periodic) -> Result<Periodic, SymbolicError> {
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        self.combine(other, |a, b| a || b)
    }

    pub(crate) fn intersect(&self, other: &Periodic) -> Result<Periodic, SymbolicError> {
        if self.is_empty() || other.is_empty() {
            return Ok(Periodic::empty());
        }
        self.combine(other, |a, b| a && b)
    }

    pub(crate) fn translate(&self, g: &BigInt) -> Periodic {
        let m = self.modulus;
        let shift = self.residue_of(g);
        let mut residues = vec![false; m as usize];
        for r in self.residues() {
            residues[((r + shift) % m) as usize] = true;
        }
        Periodic {
            modulus: m,
            residues,
        }
    }

    pub(crate) fn scale(&self, k: &BigInt) -> Result<Periodic, SymbolicError> {
        if self.is_empty() {
            return Ok(Periodic::empty());
        }
        let big_m = BigInt::from(self.modulus) * k.abs();
        let m = big_m
            .to_u64()
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| {
                SymbolicError::PeriodTooLarge(big_m.to_u128().unwrap_or(u128::MAX), MAX_MODULUS)
            })?;
        let mut residues = vec![false; m as usize];
        for r in self.residues() {
            let v = (k * BigInt::from(r)).mod_floor(&big_m);
            residues[v.to_usize().expect("below modulus")] = true;
        }
        Ok(Periodic {
            modulus: m,
            residues,
        }
        .canonical())
    }

    pub(crate) fn canonical(self) -> Periodic {
        if self.is_empty() {
            return Periodic::empty();
        }
        let m = self.modulus;
        for p in 1..=m {
            if m.is_multiple_of(p)
                && (0..m).all(|x| self.residues[x as usize] == self.residues[(x % p) as usize])
            {
                return Periodic {
                    modulus: p,
                    residues: self.residues[..p as usize].to_vec(),
                };
            }
        }
        unreachable!("p = m always qualifies")
    }

    /// All progressions contained in the set that are maximal under inclusion.
    pub(crate) fn maximal_aps(&self) -> Vec<ApTerm> {
        let m = self.modulus;
        let mut found: Vec<(u64, u64)> = Vec::new();
        let divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
        for &d in &divisors {
            for r in 0..d {
                let inside = (0..m / d).all(|j| self.residues[(r + j * d) as usize]);
                if !inside {
                    continue;
                }
                // contained in a coarser progression already found?
                let covered = found.iter().any(|&(d2, r2)| d % d2 == 0 && r % d2 == r2);
                if !covered {
                    found.push((d, r));
                }
            }
        }
        found
            .into_iter()
            .map(|(d, r)| ApTerm {
                modulus: BigInt::from(d),
                residue: BigInt::from(r),
            })
            .collect()
    }

    /// Exponents `e` with `key.point(e) ∈ self`.
    pub(crate) fn exponent_hits(&self, key: &ChainKey, base: u32) -> ExpSet {
        if self.is_empty() {
            return ExpSet::empty();
        }
        let (pre, period, powers) = power_residues(base as u64, self.modulus);
        let c = self.residue_of(&key.coeff) as u128;
        let d = self.residue_of(&key.offset) as u128;
        let m = self.modulus as u128;
        let member = |e: u64| {
            let idx = if e < pre { e } else { pre + (e - pre) % period };
            let v = (c * powers[idx as usize] as u128 + d) % m;
            self.residues[v as usize]
        };
        ExpSet::from_membership(pre, period, member).canonical()
    }

    /// Residues mod `modulus` visited infinitely often by the points of a chain tail.
    pub(crate) fn recurring_residues(&self, key: &ChainKey, tail: &ExpSet, base: u32) -> Vec<u64> {
        let (pre, period, powers) = power_residues(base as u64, self.modulus);
        let c = self.residue_of(&key.coeff) as u128;
        let d = self.residue_of(&key.offset) as u128;
        let m = self.modulus as u128;
        let start = pre.max(tail.start());
        let window = period.lcm(&tail.period());
        let mut out: Vec<u64> = (start..start + window)
            .filter(|&e| tail.contains(e))
            .map(|e| {
                let idx = pre + (e - pre) % period;
                ((c * powers[idx as usize] as u128 + d) % m) as u64
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `b^e mod m` for `e` in `[0, pre + period)`: the sequence is periodic from `pre` on.
fn power_residues(b: u64, m: u64) -> (u64, u64, Vec<u64>) {
    let mut seen = std::collections::HashMap::new();
    let mut powers = Vec::new();
    let mut cur = 1 % m;
    loop {
        if let Some(&first) = seen.get(&cur) {
            let pre = first as u64;
            let period = powers.len() as u64 - pre;
            return (pre, period, powers);
        }
        seen.insert(cur, powers.len());
        powers.push(cur);
        cur = ((cur as u128 * b as u128) % m as u128) as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(c: i64, d: i64) -> ApTerm {
        ApTerm::new(c, d).unwrap()
    }

    #[test]
    fn crt_examples() {
        assert_eq!(ap(2, 0).intersect(&ap(4, 1)), None);
        assert_eq!(ap(3, 1).intersect(&ap(5, 2)), Some(ap(15, 7)));
        assert_eq!(ap(4, 2).intersect(&ap(6, 0)), Some(ap(12, 6)));
        assert_eq!(ap(1, 0).intersect(&ap(7, 3)), Some(ap(7, 3)));
    }

    #[test]
    fn crt_agrees_with_residue_patterns() {
        for c1 in 1..13i64 {
            for d1 in 0..c1 {
                for c2 in 1..13i64 {
                    for d2 in 0..c2 {
                        let a = ap(c1, d1);
                        let b = ap(c2, d2);
                        let via_crt = a
                            .intersect(&b)
                            .map(|t| Periodic::from_ap(&t).unwrap())
                            .unwrap_or_else(Periodic::empty);
                        let via_residues = Periodic::from_ap(&a)
                            .unwrap()
                            .intersect(&Periodic::from_ap(&b).unwrap())
                            .unwrap();
                        assert_eq!(via_crt, via_residues, "{a} & {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn residue_reduction_on_construction() {
        assert_eq!(ap(5, 7), ap(5, 2));
        assert_eq!(ap(5, -1), ap(5, 4));
        assert!(ApTerm::new(0, 0).is_err());
        assert!(ApTerm::new(-3, 0).is_err());
    }

    #[test]
    fn canonical_modulus_is_minimal() {
        let p = Periodic::from_ap(&ap(2, 0))
            .unwrap()
            .union(&Periodic::from_ap(&ap(2, 1)).unwrap())
            .unwrap();
        assert_eq!(p, Periodic::from_ap(&ap(1, 0)).unwrap());
        let q = Periodic::from_ap(&ap(4, 0))
            .unwrap()
            .union(&Periodic::from_ap(&ap(4, 2)).unwrap())
            .unwrap();
        assert_eq!(q, Periodic::from_ap(&ap(2, 0)).unwrap());
    }

    #[test]
    fn maximal_progressions() {
        let p = Periodic::from_ap(&ap(2, 0))
            .unwrap()
            .union(&Periodic::from_ap(&ap(3, 0)).unwrap())
            .unwrap();
        assert_eq!(p.maximal_aps(), vec![ap(2, 0), ap(3, 0)]);
        assert_eq!(
            Periodic::from_ap(&ap(6, 5)).unwrap().maximal_aps(),
            vec![ap(6, 5)]
        );
    }

    #[test]
    fn scaling_progressions() {
        let p = Periodic::from_ap(&ap(2, 0))
            .unwrap()
            .scale(&BigInt::from(2))
            .unwrap();
        assert_eq!(p, Periodic::from_ap(&ap(4, 0)).unwrap());
        let q = Periodic::from_ap(&ap(3, 1))
            .unwrap()
            .scale(&BigInt::from(-2))
            .unwrap();
        assert_eq!(q, Periodic::from_ap(&ap(6, 4)).unwrap());
    }

    #[test]
    fn power_residue_cycle() {
        // 2^e mod 12: 1,2,4,8,4,8,... preperiod 2, period 2
        let (pre, period, powers) = power_residues(2, 12);
        assert_eq!((pre, period), (2, 2));
        assert_eq!(powers, vec![1, 2, 4, 8]);
        let (pre, period, _) = power_residues(2, 1);
        assert_eq!((pre, period), (0, 1));
    }
}
