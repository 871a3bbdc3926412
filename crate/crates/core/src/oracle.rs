//! Exhaustive levels of every subset of a small finite group by a least
//! fixpoint over the subset lattice.
//!
//! This module deliberately shares no code with the τ-engine or the Cayley
//! tables: translations come from byte-indexed lookup tables built directly
//! from the group law.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::group::GroupDescriptor;
use crate::tau::{Budget, Engine, EngineError, FiniteGroupUniverse, LevelVerdict, TreeRank};

/// Largest group order the oracle accepts (`2^|G| <= 2^24`).
pub const MAX_ORACLE_ORDER: u64 = 24;

/// Level encoding of sets outside the thin-completion.
pub const BOTTOM: i8 = -1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{group} has {order} elements; the oracle needs 2^|G| <= 2^{MAX_ORACLE_ORDER}")]
    TooLarge { group: GroupDescriptor, order: u64 },
    #[error("the oracle needs a finite group, got {0}")]
    Infinite(GroupDescriptor),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Translation by lookup: `tables[g][byte][value]` is the image of the bits
/// `value << 8·byte` under `x ↦ g + x`.
struct Translator {
    n: usize,
    bytes: usize,
    tables: Vec<Vec<[u32; 256]>>,
}

impl Translator {
    fn new(group: GroupDescriptor) -> Self {
        let n = group.order().expect("finite") as usize;
        let add = |g: usize, x: usize| -> usize {
            match group {
                GroupDescriptor::CyclicMod(m) => (g + x) % m as usize,
                GroupDescriptor::BooleanPower(_) => g ^ x,
                GroupDescriptor::Integers => unreachable!(),
            }
        };
        let bytes = n.div_ceil(8);
        let tables = (0..n)
            .map(|g| {
                (0..bytes)
                    .map(|b| {
                        let mut t = [0u32; 256];
                        for (v, slot) in t.iter_mut().enumerate() {
                            for bit in 0..8 {
                                let x = 8 * b + bit;
                                if v >> bit & 1 == 1 && x < n {
                                    *slot |= 1 << add(g, x);
                                }
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        Translator { n, bytes, tables }
    }

    fn translate(&self, mask: u32, g: usize) -> u32 {
        let t = &self.tables[g];
        (0..self.bytes).fold(0, |acc, b| acc | t[b][(mask >> (8 * b) & 0xff) as usize])
    }
}

/// Level of every subset, indexed by bitmask; [`BOTTOM`] marks `⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    pub group: GroupDescriptor,
    pub t: u64,
    pub levels: Vec<i8>,
    /// Number of fixpoint rounds that marked at least one set.
    pub rounds: u32,
}

fn check_group(group: GroupDescriptor) -> Result<usize, OracleError> {
    let order = group.order().ok_or(OracleError::Infinite(group))?;
    if order > MAX_ORACLE_ORDER {
        return Err(OracleError::TooLarge { group, order });
    }
    Ok(order as usize)
}

/// Round `r + 1` marks every unmarked set whose children were all marked by
/// round `r`, at one more than their largest level.
pub fn build_table(group: GroupDescriptor, t: u64) -> Result<OracleTable, OracleError> {
    let n = check_group(group)?;
    let tr = Translator::new(group);
    let size = 1usize << n;
    let mut levels: Vec<i8> = (0..size)
        .map(|m| {
            if (m as u32).count_ones() as u64 <= t {
                0
            } else {
                BOTTOM
            }
        })
        .collect();
    let mut rounds = 0;
    loop {
        let frozen = &levels;
        let next: Vec<i8> = (0..size)
            .into_par_iter()
            .map(|m| {
                if frozen[m] != BOTTOM {
                    return frozen[m];
                }
                let a = m as u32;
                let mut best = 0i8;
                for g in 1..tr.n {
                    let c = a & tr.translate(a, g);
                    match frozen[c as usize] {
                        BOTTOM => return BOTTOM,
                        l => best = best.max(l),
                    }
                }
                best + 1
            })
            .collect();
        if next == levels {
            break;
        }
        levels = next;
        rounds += 1;
    }
    Ok(OracleTable {
        group,
        t,
        levels,
        rounds,
    })
}

/// Independent recursion: children are subsets, so the only cycles are
/// self-loops `A ∩ (g + A) = A`.
pub fn recursive_levels(group: GroupDescriptor, t: u64) -> Result<Vec<i8>, OracleError> {
    let n = check_group(group)?;
    let tr = Translator::new(group);
    let mut memo: Vec<Option<i8>> = vec![None; 1 << n];
    fn go(a: u32, t: u64, tr: &Translator, memo: &mut [Option<i8>]) -> i8 {
        if let Some(l) = memo[a as usize] {
            return l;
        }
        let l = if a.count_ones() as u64 <= t {
            0
        } else {
            let mut best = 0i8;
            let mut bottom = false;
            for g in 1..tr.n {
                let c = a & tr.translate(a, g);
                if c.count_ones() as u64 <= t {
                    continue;
                }
                if c == a {
                    bottom = true;
                    break;
                }
                match go(c, t, tr, memo) {
                    BOTTOM => {
                        bottom = true;
                        break;
                    }
                    l => best = best.max(l),
                }
            }
            if bottom {
                BOTTOM
            } else {
                best + 1
            }
        };
        memo[a as usize] = Some(l);
        l
    }
    Ok((0..1u32 << n).map(|a| go(a, t, &tr, &mut memo)).collect())
}

impl OracleTable {
    pub fn level(&self, mask: u32) -> Option<u32> {
        match self.levels[mask as usize] {
            BOTTOM => None,
            l => Some(l as u32),
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset_bitmask,level\n");
        for (m, l) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "{m},{l}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.short_name(),
            "order": self.group.order(),
            "ideal": {"size_at_most": self.t},
            "rounds": self.rounds,
            "levels": self.levels,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub subset: String,
    pub mask: u32,
    pub oracle: i8,
    pub engine: String,
    pub rank: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub group: GroupDescriptor,
    pub t: u64,
    pub subsets: usize,
    pub level_mismatches: Vec<Mismatch>,
    /// Subsets where the tree rank disagrees with the engine level.
    pub rank_mismatches: Vec<Mismatch>,
    pub witness_failures: Vec<Mismatch>,
    /// Subsets the engine could not classify within its budget.
    pub unknown: usize,
}

impl CrossCheckReport {
    pub fn agrees(&self) -> bool {
        self.level_mismatches.is_empty()
            && self.rank_mismatches.is_empty()
            && self.witness_failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[Mismatch]| -> Vec<Value> {
            v.iter()
                .map(|m| json!({"mask": m.mask, "subset": m.subset, "oracle": m.oracle, "engine": m.engine, "rank": m.rank}))
                .collect()
        };
        json!({
            "group": self.group.short_name(),
            "t": self.t,
            "subsets": self.subsets,
            "agrees": self.agrees(),
            "level_mismatches": list(&self.level_mismatches),
            "rank_mismatches": list(&self.rank_mismatches),
            "witness_failures": list(&self.witness_failures),
            "unknown": self.unknown,
        })
    }
}

/// Runs the engine with full branching on every subset and compares levels,
/// tree ranks and cycle witnesses against the table. Subsets the engine
/// leaves unclassified are counted, not compared.
pub fn cross_check(table: &OracleTable, budget: Budget) -> Result<CrossCheckReport, OracleError> {
    let universe = FiniteGroupUniverse::new(table.group, table.t)?;
    let engine = Engine::new(universe, budget);
    let mut report = CrossCheckReport {
        group: table.group,
        t: table.t,
        subsets: table.len(),
        level_mismatches: Vec::new(),
        rank_mismatches: Vec::new(),
        witness_failures: Vec::new(),
        unknown: 0,
    };
    for (m, &oracle) in table.levels.iter().enumerate() {
        let mask = m as u64;
        let verdict = engine.exact_level(&mask)?;
        let rank = engine.tree_rank(&mask)?;
        let mismatch = || Mismatch {
            subset: engine.universe().table().format(mask),
            mask: m as u32,
            oracle,
            engine: engine.format_verdict(&verdict),
            rank: format!("{rank:?}"),
        };
        if verdict.is_unknown() || rank == TreeRank::Unknown {
            report.unknown += 1;
            continue;
        }
        let level_ok = match (&verdict, oracle) {
            (LevelVerdict::ExactLevel(n), l) => l >= 0 && *n == l as u32,
            (LevelVerdict::NotInTauStar(_), l) => l == BOTTOM,
            (LevelVerdict::Unknown { .. }, _) => false,
        };
        if !level_ok {
            report.level_mismatches.push(mismatch());
        }
        let rank_ok = match (&verdict, rank) {
            (LevelVerdict::ExactLevel(n), TreeRank::Rank(r)) => *n == r,
            (LevelVerdict::NotInTauStar(_), TreeRank::NotWellFounded) => true,
            _ => false,
        };
        if !rank_ok {
            report.rank_mismatches.push(mismatch());
        }
        if let LevelVerdict::NotInTauStar(w) = &verdict {
            if !engine.replay(&mask, w)? {
                report.witness_failures.push(mismatch());
            }
        }
    }
    Ok(report)
}

/// A thin `A` (level at most 1) and `x ≠ e` with `A ∪ (x + A)` not thin, first
/// in (mask, x) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonAdditivityWitness {
    pub set: u32,
    pub shift: usize,
    pub union: u32,
    pub union_level: i8,
    pub set_text: String,
    pub shift_text: String,
    pub union_text: String,
}

pub fn boolean_non_additivity_witness(
    d: u32,
    t: u64,
) -> Result<Option<NonAdditivityWitness>, OracleError> {
    let group = GroupDescriptor::boolean(d).map_err(|e| OracleError::Engine(e.into()))?;
    let table = build_table(group, t)?;
    let tr = Translator::new(group);
    let thin = |l: i8| l == 0 || l == 1;
    let fmt = |mask: u32| -> String {
        let items: Vec<String> = (0..tr.n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| format!("{:0w$b}", i, w = d as usize))
            .collect();
        format!("{{{}}}", items.join(","))
    };
    for a in 0..table.len() as u32 {
        if !thin(table.levels[a as usize]) {
            continue;
        }
        for x in 1..tr.n {
            let u = a | tr.translate(a, x);
            if !thin(table.levels[u as usize]) {
                return Ok(Some(NonAdditivityWitness {
                    set: a,
                    shift: x,
                    union: u,
                    union_level: table.levels[u as usize],
                    set_text: fmt(a),
                    shift_text: format!("{:0w$b}", x, w = d as usize),
                    union_text: fmt(u),
                }));
            }
        }
    }
    Ok(None)
}

/// `(A ∪ (x + A)) ∩ (x + (A ∪ (x + A))) = A ∪ (x + A)` for every `A` and
/// `x ≠ e` in (ℤ/2)^d. Returns the number of checked pairs, or the first
/// failing `(A, x)`.
pub fn boolean_union_identity(d: u32) -> Result<Result<u64, (u32, usize)>, OracleError> {
    let group = GroupDescriptor::boolean(d).map_err(|e| OracleError::Engine(e.into()))?;
    let n = check_group(group)?;
    let tr = Translator::new(group);
    let mut checked = 0u64;
    for a in 0..1u32 << n {
        for x in 1..n {
            let u = a | tr.translate(a, x);
            if u & tr.translate(u, x) != u {
                return Ok(Err((a, x)));
            }
            checked += 1;
        }
    }
    Ok(Ok(checked))
}
