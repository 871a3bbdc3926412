//! The shifts `g ≠ 0` for which `A ∩ (g + A)` can be infinite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{ApTerm, SymbolicError, SymbolicSet};

/// A residue class of shifts sharing one representative child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassShift {
    pub class: ApTerm,
    pub representative: BigInt,
    pub child: SymbolicSet,
}

/// `D(A)` split into explicitly listed shifts and residue classes. Every
/// nonzero shift outside both yields a finite child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpectrum {
    pub explicit: BTreeMap<BigInt, SymbolicSet>,
    pub classes: Vec<ClassShift>,
}

impl ShiftSpectrum {
    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.classes.is_empty()
    }

    /// Whether `g` lies in a listed shift or class.
    pub fn covers(&self, g: &BigInt) -> bool {
        self.explicit.contains_key(g) || self.classes.iter().any(|c| c.class.contains(g))
    }
}

impl SymbolicSet {
    /// Shifts `d₁ − d₂` between chains with equal coefficients whose tails meet infinitely.
    pub fn explicit_shifts(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for (k1, t1) in &self.chains {
            for (k2, t2) in &self.chains {
                if k1.coeff != k2.coeff || k1.offset == k2.offset {
                    continue;
                }
                let infinite = t1.intersect(t2).map(|t| t.is_infinite()).unwrap_or(true);
                if infinite {
                    out.push(&k1.offset - &k2.offset);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Residues `r` modulo the periodic modulus for which the periodic part
    /// produces an infinite child, paired with a nonzero representative (the
    /// class of 0 first, represented by the modulus).
    pub fn class_shifts(&self) -> Vec<(ApTerm, BigInt)> {
        let p = &self.periodic;
        if p.is_empty() {
            return Vec::new();
        }
        let m = p.modulus();
        let mut hit = vec![false; m as usize];
        for a in p.residues() {
            for b in p.residues() {
                hit[((a + m - b) % m) as usize] = true;
            }
        }
        for (key, tail) in &self.chains {
            for rho in p.recurring_residues(key, tail, self.base) {
                for a in p.residues() {
                    // chain ∩ (P + r) and (chain + r) ∩ P
                    hit[((rho + m - a) % m) as usize] = true;
                    hit[((a + m - rho) % m) as usize] = true;
                }
            }
        }
        hit.iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(r, _)| {
                let r = r as u64;
                let class = ApTerm::new(m, r).expect("positive modulus");
                let rep = if r == 0 {
                    BigInt::from(m)
                } else {
                    BigInt::from(r)
                };
                (class, rep)
            })
            .collect()
    }

    pub fn shift_spectrum(&self) -> Result<ShiftSpectrum, SymbolicError> {
        let mut explicit = BTreeMap::new();
        for g in self.explicit_shifts() {
            let child = self.shift_child(&g)?;
            explicit.insert(g, child);
        }
        let mut classes = Vec::new();
        for (class, representative) in self.class_shifts() {
            let child = self.shift_child(&representative)?;
            classes.push(ClassShift {
                class,
                representative,
                child,
            });
        }
        Ok(ShiftSpectrum { explicit, classes })
    }

    /// An upper bound on `|A ∩ (g + A)|`, or `None` when the intersection is infinite.
    pub fn child_size_bound(&self, g: &BigInt) -> Option<usize> {
        let base = self.base;
        let p = &self.periodic;
        let shifted_p = p.translate(g);
        if !p.is_empty() && !p.intersect(&shifted_p).ok()?.is_empty() {
            return None;
        }
        let mut total = 2 * self.finite.len();
        for (k1, t1) in &self.chains {
            for (k2, t2) in &self.chains {
                let k2g = k2.translated(g);
                if *k1 == k2g {
                    total += t1.intersect(t2).ok()?.finite_len()?;
                } else {
                    total += k1.cross_point_bound(&k2g, base);
                }
            }
            if !p.is_empty() {
                total += t1
                    .intersect(&shifted_p.exponent_hits(k1, base))
                    .ok()?
                    .finite_len()?;
                let moved = k1.translated(g);
                total += t1
                    .intersect(&p.exponent_hits(&moved, base))
                    .ok()?
                    .finite_len()?;
            }
        }
        Some(total)
    }

    /// True when `g ≠ 0` and `A ∩ (g + A)` is infinite.
    pub fn in_spectrum(&self, g: &BigInt) -> bool {
        !g.is_zero() && self.child_size_bound(g).is_none()
    }
}
