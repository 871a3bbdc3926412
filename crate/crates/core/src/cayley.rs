//! Bitmask subsets of a small finite group, with translation through the group law.

use crate::group::{GroupDescriptor, GroupError};

/// Largest group order representable by a `u64` mask.
pub const MAX_MASK_ORDER: u64 = 64;

/// Addition table of a finite group, indexed in enumeration order.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    group: GroupDescriptor,
    n: usize,
    sum: Vec<u8>,
}

impl CayleyTable {
    pub fn new(group: GroupDescriptor) -> Result<Self, GroupError> {
        let order = group.order().ok_or(GroupError::Infinite(group))?;
        if order > MAX_MASK_ORDER {
            return Err(GroupError::InvalidGroup(format!(
                "{group} has {order} elements; subsets are limited to {MAX_MASK_ORDER}"
            )));
        }
        let elems = group.enumerate()?;
        let n = elems.len();
        let mut sum = vec![0u8; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                sum[i * n + j] = group.index_of(&group.op(a, b)?)? as u8;
            }
        }
        Ok(CayleyTable { group, n, sum })
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Mask of the whole group.
    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn add(&self, g: usize, x: usize) -> usize {
        self.sum[g * self.n + x] as usize
    }

    /// `g + A`.
    pub fn translate(&self, mask: u64, g: usize) -> u64 {
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1u64 << self.add(g, i);
        }
        out
    }

    /// A subset in the group's notation, e.g. `{0,3}` or `{001,110}`.
    pub fn format(&self, mask: u64) -> String {
        let elems = self.group.enumerate().expect("finite group");
        let items: Vec<String> = (0..self.n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.group.format_element(&elems[i]))
            .collect();
        format!("{{{}}}", items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_translation() {
        let t = CayleyTable::new(GroupDescriptor::CyclicMod(5)).unwrap();
        assert_eq!(t.translate(0b00011, 4), 0b10001);
        assert_eq!(t.format(0b01001), "{0,3}");
    }

    #[test]
    fn boolean_translation_is_an_involution() {
        let t = CayleyTable::new(GroupDescriptor::BooleanPower(3)).unwrap();
        for mask in 0..256u64 {
            for g in 0..8 {
                assert_eq!(t.translate(t.translate(mask, g), g), mask);
            }
        }
        assert_eq!(t.format(0b10), "{001}");
    }

    #[test]
    fn oversized_or_infinite_groups_are_rejected() {
        assert!(CayleyTable::new(GroupDescriptor::Integers).is_err());
        assert!(CayleyTable::new(GroupDescriptor::BooleanPower(7)).is_err());
        assert!(CayleyTable::new(GroupDescriptor::BooleanPower(6)).is_ok());
    }
}
