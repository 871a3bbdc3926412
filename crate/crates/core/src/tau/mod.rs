//! Derived sets, τ-trees and exact level classification.
//!
//! The engine is generic over a [`ShiftUniverse`]: symbolic subsets of ℤ with
//! spectrum-restricted branching, or bitmask subsets of a finite group with
//! full branching.

mod engine;
mod tree;
mod universe;

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::group::GroupError;
use crate::symbolic::SymbolicError;

pub use engine::Engine;
pub use tree::{TauTreeDump, TreeNode, TreeRank};
pub use universe::{FiniteGroupUniverse, IntegerUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("shift sequences must not contain the identity (position {0})")]
    ZeroShift(usize),
    #[error("the shift cover is incomplete and no certificate was found")]
    Incomplete,
    #[error("witness index {0} exceeds path length {1}")]
    BadWitness(usize, usize),
}

/// Sufficient shifts for one node: when `complete`, every shift outside the
/// list gives a child in 𝓕.
#[derive(Clone, Debug)]
pub struct Branching<G> {
    pub shifts: Vec<G>,
    pub complete: bool,
}

/// The ambient universe of the engine.
pub trait ShiftUniverse: Sync {
    type Set: Clone + Eq + std::hash::Hash + Send + Sync + fmt::Debug;
    type Shift: Clone + Eq + std::hash::Hash + Send + Sync + fmt::Debug;

    fn in_ideal(&self, set: &Self::Set) -> bool;
    fn branching(&self, set: &Self::Set) -> Result<Branching<Self::Shift>, EngineError>;
    /// `A ∩ (g + A)`.
    fn child(&self, set: &Self::Set, g: &Self::Shift) -> Result<Self::Set, EngineError>;
    fn translate(&self, set: &Self::Set, t: &Self::Shift) -> Self::Set;
    /// `(N, t)` with `set = t + N` and `N` equal for all translates of `set`.
    fn normalize(&self, set: &Self::Set) -> (Self::Set, Self::Shift);
    /// `a − b`.
    fn difference(&self, a: &Self::Shift, b: &Self::Shift) -> Self::Shift;
    fn is_identity(&self, g: &Self::Shift) -> bool;
    fn format_set(&self, set: &Self::Set, max_len: usize) -> String;
    fn format_shift(&self, g: &Self::Shift) -> String;
    fn shift_json(&self, g: &Self::Shift) -> Value;
}

/// Exploration limits for one classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 32,
            max_nodes: 100_000,
        }
    }
}

/// `A_{path⌢repeat_shift} = translation + A_{path[..ancestor_index]}`, where
/// the ancestor is not in 𝓕. Repeating the segment gives an infinite branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleWitness<G> {
    pub path: Vec<G>,
    pub ancestor_index: usize,
    pub repeat_shift: G,
    pub translation: G,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelVerdict<G> {
    ExactLevel(u32),
    NotInTauStar(CycleWitness<G>),
    Unknown {
        nodes: usize,
        depth: usize,
        level_lower_bound: u32,
    },
}

impl<G> LevelVerdict<G> {
    pub fn level(&self) -> Option<u32> {
        match self {
            LevelVerdict::ExactLevel(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_not_in_tau_star(&self) -> bool {
        matches!(self, LevelVerdict::NotInTauStar(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, LevelVerdict::Unknown { .. })
    }
}

impl<U: ShiftUniverse> Engine<U> {
    pub fn witness_json(&self, w: &CycleWitness<U::Shift>) -> Value {
        let u = self.universe();
        json!({
            "path": w.path.iter().map(|g| u.shift_json(g)).collect::<Vec<_>>(),
            "ancestor_index": w.ancestor_index,
            "repeat_shift": u.shift_json(&w.repeat_shift),
            "translation": u.shift_json(&w.translation),
        })
    }

    pub fn format_witness(&self, w: &CycleWitness<U::Shift>) -> String {
        let u = self.universe();
        let path: Vec<String> = w.path.iter().map(|g| u.format_shift(g)).collect();
        format!(
            "path=({}) ancestor={} repeat_shift={} translation={}",
            path.join(","),
            w.ancestor_index,
            u.format_shift(&w.repeat_shift),
            u.format_shift(&w.translation)
        )
    }

    pub fn verdict_json(&self, v: &LevelVerdict<U::Shift>) -> Value {
        match v {
            LevelVerdict::ExactLevel(n) => json!({"verdict": "ExactLevel", "level": n}),
            LevelVerdict::NotInTauStar(w) => {
                json!({"verdict": "NotInTauStar", "witness": self.witness_json(w)})
            }
            LevelVerdict::Unknown {
                nodes,
                depth,
                level_lower_bound,
            } => json!({
                "verdict": "Unknown",
                "nodes": nodes,
                "depth": depth,
                "level_lower_bound": level_lower_bound,
            }),
        }
    }

    pub fn format_verdict(&self, v: &LevelVerdict<U::Shift>) -> String {
        match v {
            LevelVerdict::ExactLevel(n) => format!("ExactLevel {n}"),
            LevelVerdict::NotInTauStar(w) => format!("NotInTauStar {}", self.format_witness(w)),
            LevelVerdict::Unknown {
                nodes,
                depth,
                level_lower_bound,
            } => format!("Unknown (nodes={nodes}, depth={depth}, level>={level_lower_bound})"),
        }
    }
}
