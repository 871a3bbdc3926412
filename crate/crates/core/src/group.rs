//! Ambient groups and the injective endomorphisms used by the constructions.
//!
//! All supported groups are abelian and written additively: `Integers` is ℤ,
//! `CyclicMod(n)` is ℤ/n and `BooleanPower(d)` is (ℤ/2)^d with XOR as the law.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Largest supported exponent for `BooleanPower`; elements are packed in a `u64`.
pub const MAX_BOOLEAN_DIM: u32 = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to {group}")]
    ForeignElement {
        group: GroupDescriptor,
        element: String,
    },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("{0} is infinite and cannot be enumerated")]
    Infinite(GroupDescriptor),
    #[error("endomorphisms act on the integers only, got element {0}")]
    NotIntegers(String),
    #[error("scale factor must be nonzero")]
    ZeroScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupDescriptor {
    Integers,
    CyclicMod(u64),
    BooleanPower(u32),
}

impl GroupDescriptor {
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        if n < 2 {
            return Err(GroupError::InvalidGroup(format!("Z/{n} needs n >= 2")));
        }
        Ok(GroupDescriptor::CyclicMod(n))
    }

    pub fn boolean(d: u32) -> Result<Self, GroupError> {
        if d == 0 || d > MAX_BOOLEAN_DIM {
            return Err(GroupError::InvalidGroup(format!(
                "(Z/2)^{d} needs 1 <= d <= {MAX_BOOLEAN_DIM}"
            )));
        }
        Ok(GroupDescriptor::BooleanPower(d))
    }

    /// Number of elements, `None` for ℤ.
    pub fn order(&self) -> Option<u64> {
        match *self {
            GroupDescriptor::Integers => None,
            GroupDescriptor::CyclicMod(n) => Some(n),
            GroupDescriptor::BooleanPower(d) => Some(1u64 << d),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            GroupDescriptor::Integers => GroupElement::Integer(BigInt::zero()),
            GroupDescriptor::CyclicMod(_) => GroupElement::Residue(0),
            GroupDescriptor::BooleanPower(_) => GroupElement::Bits(0),
        }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        match (*self, a) {
            (GroupDescriptor::Integers, GroupElement::Integer(_)) => true,
            (GroupDescriptor::CyclicMod(n), GroupElement::Residue(v)) => *v < n,
            (GroupDescriptor::BooleanPower(d), GroupElement::Bits(v)) => *v >> d == 0,
            _ => false,
        }
    }

    fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(GroupError::ForeignElement {
                group: *self,
                element: a.to_string(),
            })
        }
    }

    /// The group law.
    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (*self, a, b) {
            (GroupDescriptor::Integers, GroupElement::Integer(x), GroupElement::Integer(y)) => {
                GroupElement::Integer(x + y)
            }
            (GroupDescriptor::CyclicMod(n), GroupElement::Residue(x), GroupElement::Residue(y)) => {
                GroupElement::Residue(((*x as u128 + *y as u128) % n as u128) as u64)
            }
            (GroupDescriptor::BooleanPower(_), GroupElement::Bits(x), GroupElement::Bits(y)) => {
                GroupElement::Bits(x ^ y)
            }
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(match (*self, a) {
            (GroupDescriptor::Integers, GroupElement::Integer(x)) => GroupElement::Integer(-x),
            (GroupDescriptor::CyclicMod(n), GroupElement::Residue(x)) => {
                GroupElement::Residue((n - x) % n)
            }
            (GroupDescriptor::BooleanPower(_), GroupElement::Bits(x)) => GroupElement::Bits(*x),
            _ => unreachable!("membership checked above"),
        })
    }

    /// All elements in numeric order (bit-vectors ordered lexicographically,
    /// most significant bit first).
    pub fn enumerate(&self) -> Result<Vec<GroupElement>, GroupError> {
        match *self {
            GroupDescriptor::Integers => Err(GroupError::Infinite(*self)),
            GroupDescriptor::CyclicMod(n) => Ok((0..n).map(GroupElement::Residue).collect()),
            GroupDescriptor::BooleanPower(d) => {
                Ok((0..(1u64 << d)).map(GroupElement::Bits).collect())
            }
        }
    }

    /// Position of `a` in [`GroupDescriptor::enumerate`] order.
    pub fn index_of(&self, a: &GroupElement) -> Result<usize, GroupError> {
        self.check(a)?;
        match a {
            GroupElement::Residue(v) | GroupElement::Bits(v) => Ok(*v as usize),
            GroupElement::Integer(_) => Err(GroupError::Infinite(*self)),
        }
    }

    /// Renders an element in the group's native notation.
    pub fn format_element(&self, a: &GroupElement) -> String {
        match (*self, a) {
            (GroupDescriptor::BooleanPower(d), GroupElement::Bits(v)) => {
                format!("{:0width$b}", v, width = d as usize)
            }
            _ => a.to_string(),
        }
    }

    /// Short name used on the command line: `z`, `z5`, `b3`.
    pub fn short_name(&self) -> String {
        match *self {
            GroupDescriptor::Integers => "z".to_string(),
            GroupDescriptor::CyclicMod(n) => format!("z{n}"),
            GroupDescriptor::BooleanPower(d) => format!("b{d}"),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupDescriptor::Integers => write!(f, "Z"),
            GroupDescriptor::CyclicMod(n) => write!(f, "Z/{n}"),
            GroupDescriptor::BooleanPower(d) => write!(f, "(Z/2)^{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Integer(BigInt),
    Residue(u64),
    Bits(u64),
}

impl GroupElement {
    pub fn int(v: impl Into<BigInt>) -> Self {
        GroupElement::Integer(v.into())
    }

    /// Parses a bit string such as `101` into a `BooleanPower` element.
    pub fn parse_bits(s: &str) -> Option<Self> {
        if s.is_empty() || s.len() > MAX_BOOLEAN_DIM as usize {
            return None;
        }
        u64::from_str_radix(s, 2).ok().map(GroupElement::Bits)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Integer(v) => write!(f, "{v}"),
            GroupElement::Residue(v) => write!(f, "{v}"),
            GroupElement::Bits(v) => write!(f, "0b{v:b}"),
        }
    }
}

/// An injective endomorphism of ℤ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Endomorphism {
    ScaleBy(BigInt),
}

impl Endomorphism {
    pub fn scale_by(k: impl Into<BigInt>) -> Result<Self, GroupError> {
        let k = k.into();
        if k.is_zero() {
            return Err(GroupError::ZeroScale);
        }
        Ok(Endomorphism::ScaleBy(k))
    }

    pub fn factor(&self) -> &BigInt {
        match self {
            Endomorphism::ScaleBy(k) => k,
        }
    }

    pub fn apply(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        match a {
            GroupElement::Integer(x) => Ok(GroupElement::Integer(self.factor() * x)),
            _ => Err(GroupError::NotIntegers(a.to_string())),
        }
    }

    /// `apply` iterated `n` times.
    pub fn apply_iter(&self, a: &GroupElement, n: u32) -> Result<GroupElement, GroupError> {
        let mut cur = a.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `|k| >= 2`, i.e. the images kⁿℤ shrink to {0}.
    pub fn is_expanding(&self) -> bool {
        self.factor().abs() > BigInt::from(1)
    }

    /// Least `n` with `x ∉ kⁿℤ`. `None` when no such `n` exists (x = 0 or
    /// the map is not expanding).
    pub fn escape_depth(&self, x: &BigInt) -> Option<u32> {
        if x.is_zero() || !self.is_expanding() {
            return None;
        }
        let k = self.factor().abs();
        let mut rest = x.abs();
        let mut n = 0u32;
        loop {
            let (q, r) = rest.div_rem(&k);
            n += 1;
            if !r.is_zero() {
                return Some(n);
            }
            rest = q;
        }
    }

    /// Membership of `x` in the image kⁿℤ.
    pub fn in_iterated_image(&self, x: &BigInt, n: u32) -> bool {
        let kn = num_traits::pow(self.factor().abs(), n as usize);
        (x % kn).is_zero()
    }
}
