use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use super::{Branching, EngineError, ShiftUniverse};
use crate::cayley::CayleyTable;
use crate::group::{GroupDescriptor, GroupElement};
use crate::ideal::IdealSpec;
use crate::symbolic::{big_to_json, SymbolicSet};

/// Symbolic subsets of ℤ over the ideal of finite sets.
#[derive(Clone, Debug)]
pub struct IntegerUniverse;

impl ShiftUniverse for IntegerUniverse {
    type Set = SymbolicSet;
    type Shift = BigInt;

    fn in_ideal(&self, set: &SymbolicSet) -> bool {
        set.is_finite()
    }

    fn branching(&self, set: &SymbolicSet) -> Result<Branching<BigInt>, EngineError> {
        let mut shifts: Vec<BigInt> = set.class_shifts().into_iter().map(|(_, g)| g).collect();
        for g in set.explicit_shifts() {
            if !shifts.contains(&g) {
                shifts.push(g);
            }
        }
        Ok(Branching {
            shifts,
            complete: !set.has_periodic_part(),
        })
    }

    fn child(&self, set: &SymbolicSet, g: &BigInt) -> Result<SymbolicSet, EngineError> {
        Ok(set.shift_child(g)?)
    }

    fn translate(&self, set: &SymbolicSet, t: &BigInt) -> SymbolicSet {
        set.translate(t)
    }

    fn normalize(&self, set: &SymbolicSet) -> (SymbolicSet, BigInt) {
        set.translation_normal_form()
    }

    fn difference(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn is_identity(&self, g: &BigInt) -> bool {
        g.is_zero()
    }

    fn format_set(&self, set: &SymbolicSet, max_len: usize) -> String {
        set.summary(max_len)
    }

    fn format_shift(&self, g: &BigInt) -> String {
        g.to_string()
    }

    fn shift_json(&self, g: &BigInt) -> Value {
        big_to_json(g)
    }
}

/// Bitmask subsets of a finite group over `SizeAtMost(t)`, branching over every
/// non-identity shift.
#[derive(Clone, Debug)]
pub struct FiniteGroupUniverse {
    table: CayleyTable,
    ideal: IdealSpec,
    inverse: Vec<usize>,
    elements: Vec<GroupElement>,
}

impl FiniteGroupUniverse {
    pub fn new(group: GroupDescriptor, t: u64) -> Result<Self, EngineError> {
        let table = CayleyTable::new(group)?;
        let n = table.order();
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table.add(g, h) == 0)
                    .expect("groups have inverses")
            })
            .collect();
        Ok(FiniteGroupUniverse {
            elements: group.enumerate()?,
            table,
            ideal: IdealSpec::SizeAtMost(t),
            inverse,
        })
    }

    pub fn table(&self) -> &CayleyTable {
        &self.table
    }

    pub fn ideal(&self) -> IdealSpec {
        self.ideal
    }
}

impl ShiftUniverse for FiniteGroupUniverse {
    type Set = u64;
    type Shift = usize;

    fn in_ideal(&self, set: &u64) -> bool {
        self.ideal.contains_mask(*set)
    }

    fn branching(&self, _set: &u64) -> Result<Branching<usize>, EngineError> {
        Ok(Branching {
            shifts: (1..self.table.order()).collect(),
            complete: true,
        })
    }

    fn child(&self, set: &u64, g: &usize) -> Result<u64, EngineError> {
        Ok(set & self.table.translate(*set, *g))
    }

    fn translate(&self, set: &u64, t: &usize) -> u64 {
        self.table.translate(*set, *t)
    }

    fn normalize(&self, set: &u64) -> (u64, usize) {
        let (normal, g) = (0..self.table.order())
            .map(|g| (self.table.translate(*set, g), g))
            .min()
            .expect("nonempty group");
        (normal, self.inverse[g])
    }

    fn difference(&self, a: &usize, b: &usize) -> usize {
        self.table.add(*a, self.inverse[*b])
    }

    fn is_identity(&self, g: &usize) -> bool {
        *g == 0
    }

    fn format_set(&self, set: &u64, _max_len: usize) -> String {
        self.table.format(*set)
    }

    fn format_shift(&self, g: &usize) -> String {
        self.table.group().format_element(&self.elements[*g])
    }

    fn shift_json(&self, g: &usize) -> Value {
        match self.table.group() {
            GroupDescriptor::BooleanPower(_) => json!(self.format_shift(g)),
            _ => json!(g),
        }
    }
}
