//! Cubic image sizes, the functions `c(n)` and `c(n, k)`, union level bounds,
//! and the escalation and finite-stage limit constructions on ℤ.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::symbolic::{SymbolicError, SymbolicSet};
use crate::tau::{Engine, EngineError, IntegerUniverse, LevelVerdict};

/// Largest number of sorted positive vectors [`cubic_image_min`] will visit.
pub const MAX_SEARCH_VECTORS: u128 = 50_000_000;
/// Largest `m·B` (the span of subset sums) the search accepts.
pub const MAX_SUM_SPAN: u64 = 1 << 24;
/// Largest bit length of an intermediate value in `c(n, k)`.
pub const MAX_CNK_BITS: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("m and the entry bound must be at least 1 (got m={m}, bound={bound})")]
    InvalidArguments { m: u64, bound: u64 },
    #[error("search over m={m}, bound={bound} exceeds the configured limit")]
    Explosion { m: u64, bound: u64 },
    #[error("c({0}) is not available and no fallback was allowed")]
    MissingC(BigInt),
    #[error("c(n, k) leaves the representable range (an intermediate argument exceeds 2^{MAX_CNK_BITS})")]
    Astronomical,
    #[error("escalation needs a set at a finite level >= 1, got {0}")]
    Precondition(String),
    #[error("the limit construction needs an expanding scale factor, got {0}")]
    NotExpanding(BigInt),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicSearchResult {
    pub m: u64,
    pub entry_bound: u64,
    pub min_image_size: usize,
    pub argmin: Vec<i64>,
    pub vectors_searched: u64,
}

/// Number of distinct subset sums of `g`.
pub fn image_size(g: &[i64]) -> usize {
    let mut sums: HashSet<i128> = HashSet::from([0]);
    for &x in g {
        let next: Vec<i128> = sums.iter().map(|s| s + x as i128).collect();
        sums.extend(next);
    }
    sums.len()
}

fn binomial(n: u64, k: u64) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    r
}

/// Subset sums of nonnegative values as a bitset.
#[derive(Clone)]
struct SumSet {
    words: Vec<u64>,
}

impl SumSet {
    fn zero(span: usize) -> Self {
        let mut words = vec![0u64; span / 64 + 1];
        words[0] = 1;
        SumSet { words }
    }

    /// `S ∪ (S + g)`.
    fn add(&self, g: usize) -> SumSet {
        let mut words = self.words.clone();
        let (ws, bs) = (g / 64, g % 64);
        for i in (0..self.words.len()).rev() {
            let src = self.words[i];
            if src == 0 {
                continue;
            }
            let j = i + ws;
            if j < words.len() {
                words[j] |= src << bs;
            }
            if bs > 0 && j + 1 < words.len() {
                words[j + 1] |= src >> (64 - bs);
            }
        }
        SumSet { words }
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Exhaustive minimum of the image size over `([−B, B] ∖ {0})^m`.
///
/// Negating an entry translates the image and permuting entries fixes it, so
/// only nondecreasing vectors of positive entries are visited. Every new entry
/// adds at least one sum (the new maximum), which bounds partial vectors
/// from below.
pub fn cubic_image_min(m: u64, entry_bound: u64) -> Result<CubicSearchResult, BoundsError> {
    if m == 0 || entry_bound == 0 {
        return Err(BoundsError::InvalidArguments {
            m,
            bound: entry_bound,
        });
    }
    let count = binomial(entry_bound + m - 1, m);
    let span = m.saturating_mul(entry_bound);
    if count > MAX_SEARCH_VECTORS || span > MAX_SUM_SPAN {
        return Err(BoundsError::Explosion {
            m,
            bound: entry_bound,
        });
    }
    let best = AtomicUsize::new(usize::MAX);
    let searched = AtomicUsize::new(0);
    let results: Vec<(usize, Vec<i64>)> = (1..=entry_bound)
        .into_par_iter()
        .filter_map(|first| {
            let mut prefix = vec![first as i64];
            let sums = SumSet::zero(span as usize).add(first as usize);
            let mut local: Option<(usize, Vec<i64>)> = None;
            descend(
                m as usize,
                entry_bound,
                &mut prefix,
                &sums,
                &best,
                &searched,
                &mut local,
            );
            local
        })
        .collect();
    let (min_image_size, argmin) = results.into_iter().min().expect("at least one vector");
    Ok(CubicSearchResult {
        m,
        entry_bound,
        min_image_size,
        argmin,
        vectors_searched: searched.load(Ordering::Relaxed) as u64,
    })
}

fn descend(
    m: usize,
    bound: u64,
    prefix: &mut Vec<i64>,
    sums: &SumSet,
    best: &AtomicUsize,
    searched: &AtomicUsize,
    local: &mut Option<(usize, Vec<i64>)>,
) {
    let size = sums.len();
    if size + (m - prefix.len()) > best.load(Ordering::Relaxed) {
        return;
    }
    if prefix.len() == m {
        searched.fetch_add(1, Ordering::Relaxed);
        best.fetch_min(size, Ordering::Relaxed);
        let cand = (size, prefix.clone());
        if local.as_ref().is_none_or(|l| cand < *l) {
            *local = Some(cand);
        }
        return;
    }
    let last = *prefix.last().expect("nonempty prefix") as u64;
    for x in last..=bound {
        prefix.push(x as i64);
        let next = sums.add(x as usize);
        descend(m, bound, prefix, &next, best, searched, local);
        prefix.pop();
    }
}

/// The same minimum by visiting every vector, for cross-checking the reductions.
pub fn cubic_image_min_brute(m: u64, entry_bound: u64) -> Result<CubicSearchResult, BoundsError> {
    if m == 0 || entry_bound == 0 {
        return Err(BoundsError::InvalidArguments {
            m,
            bound: entry_bound,
        });
    }
    let values: Vec<i64> = (-(entry_bound as i64)..=entry_bound as i64)
        .filter(|&x| x != 0)
        .collect();
    let total = (values.len() as u128)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    if total > 20_000_000 {
        return Err(BoundsError::Explosion {
            m,
            bound: entry_bound,
        });
    }
    let mut best: Option<(usize, Vec<i64>)> = None;
    let mut idx = vec![0usize; m as usize];
    loop {
        let g: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
        let s = image_size(&g);
        if best.as_ref().is_none_or(|b| s < b.0) {
            best = Some((s, g));
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let (min_image_size, argmin) = best.expect("visited");
                return Ok(CubicSearchResult {
                    m,
                    entry_bound,
                    min_image_size,
                    argmin,
                    vectors_searched: total as u64,
                });
            }
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `c(n)` found by search over entries bounded by `entry_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CResult {
    pub n: u64,
    pub value: u64,
    pub entry_bound: u64,
    pub lower: u64,
    pub quadratic_upper: u64,
}

impl CResult {
    pub fn within_interval(&self) -> bool {
        self.lower <= self.value && self.value <= self.quadratic_upper
    }
}

pub fn quadratic_c_bound(n: u64) -> u64 {
    (n - 1) * (n - 1) + 1
}

/// Least `m` with every searched cubic image larger than `n`.
pub fn c_of_n(n: u64, entry_bound: u64) -> Result<CResult, BoundsError> {
    if n == 0 {
        return Err(BoundsError::InvalidArguments {
            m: 0,
            bound: entry_bound,
        });
    }
    let upper = quadratic_c_bound(n).max(n);
    for m in 1..=upper + 1 {
        if cubic_image_min(m, entry_bound)?.min_image_size as u64 > n {
            return Ok(CResult {
                n,
                value: m,
                entry_bound,
                lower: n,
                quadratic_upper: quadratic_c_bound(n),
            });
        }
    }
    unreachable!("an m-vector always has at least m + 1 subset sums")
}

/// Where values of `c(n)` come from.
#[derive(Clone, Debug)]
pub enum CSource {
    /// `c(n) = n`: positive entries sorted increasingly give the chain of
    /// `m + 1` distinct partial sums, and equal entries attain it.
    Exact,
    /// Searched values, with `(n − 1)² + 1` in place of missing entries when
    /// `fallback` is set.
    Table {
        values: BTreeMap<u64, u64>,
        fallback: bool,
    },
}

impl CSource {
    fn c(&self, n: &BigInt, fell_back: &mut bool) -> Result<BigInt, BoundsError> {
        match self {
            CSource::Exact => Ok(n.clone()),
            CSource::Table { values, fallback } => {
                if let Some(v) = n.to_u64().and_then(|k| values.get(&k)) {
                    return Ok(BigInt::from(*v));
                }
                if *fallback {
                    *fell_back = true;
                    let m = n - 1;
                    Ok(&m * &m + 1)
                } else {
                    Err(BoundsError::MissingC(n.clone()))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnkValue {
    pub value: BigInt,
    pub used_fallback: bool,
}

/// `n^(2^c)`, refusing results beyond [`MAX_CNK_BITS`] bits.
fn tower_arg(n: &BigInt, c: &BigInt) -> Result<BigInt, BoundsError> {
    let e = c
        .to_u32()
        .filter(|&e| e < 64)
        .ok_or(BoundsError::Astronomical)?;
    let exp = 1u64 << e;
    if n.bits().saturating_mul(exp) > MAX_CNK_BITS {
        return Err(BoundsError::Astronomical);
    }
    Ok(num_traits::pow(n.clone(), exp as usize))
}

/// `c(n, 0) = 0`, `c(n, k + 1) = c(n) − 1 + c(n^(2^c(n)), k)`.
pub fn c_nk(n: u64, k: u32, source: &CSource) -> Result<CnkValue, BoundsError> {
    cnk_impl(n, k, source, BigInt::one())
}

/// The same recursion without the `− 1`: `c'(n, k + 1) = c(n) + c'(n^(2^c(n)), k)`.
/// This is the bound that holds when `τ^k(𝓕)` is read as "every derived set
/// of length `k` lies in 𝓕".
pub fn c_nk_corrected(n: u64, k: u32, source: &CSource) -> Result<CnkValue, BoundsError> {
    cnk_impl(n, k, source, BigInt::zero())
}

fn cnk_impl(n: u64, k: u32, source: &CSource, minus: BigInt) -> Result<CnkValue, BoundsError> {
    let mut fell_back = false;
    let mut total = BigInt::zero();
    let mut arg = BigInt::from(n);
    for step in 0..k {
        let c = source.c(&arg, &mut fell_back)?;
        total += &c - &minus;
        if step + 1 < k {
            arg = tower_arg(&arg, &c)?;
        }
    }
    Ok(CnkValue {
        value: total,
        used_fallback: fell_back,
    })
}

/// Searched `c(n)`, the interval `[n, (n − 1)² + 1]`, and `c(n, k)` for small arguments.
#[derive(Clone, Debug)]
pub struct CTable {
    pub entry_bound: u64,
    pub c_searched: BTreeMap<u64, u64>,
    pub c_exact: BTreeMap<u64, u64>,
    pub c_quadratic_bound: BTreeMap<u64, u64>,
    pub c_nk: BTreeMap<(u64, u32), Option<CnkValue>>,
}

impl CTable {
    pub fn build(n_max: u64, k_max: u32, entry_bound: u64) -> Result<CTable, BoundsError> {
        let mut c_searched = BTreeMap::new();
        let mut c_exact = BTreeMap::new();
        let mut c_quadratic_bound = BTreeMap::new();
        for n in 1..=n_max {
            c_searched.insert(n, c_of_n(n, entry_bound)?.value);
            c_exact.insert(n, n);
            c_quadratic_bound.insert(n, quadratic_c_bound(n));
        }
        let mut c_nk_map = BTreeMap::new();
        for n in 1..=n_max {
            for k in 0..=k_max {
                let v = match c_nk(n, k, &CSource::Exact) {
                    Ok(v) => Some(v),
                    Err(BoundsError::Astronomical) => None,
                    Err(e) => return Err(e),
                };
                c_nk_map.insert((n, k), v);
            }
        }
        Ok(CTable {
            entry_bound,
            c_searched,
            c_exact,
            c_quadratic_bound,
            c_nk: c_nk_map,
        })
    }

    /// `n,c_searched,c_exact,c_quadratic_bound` rows, then `n,k,c_nk` rows
    /// (empty when astronomically large).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_searched,c_exact,c_quadratic_bound\n");
        for (n, c) in &self.c_searched {
            let _ = writeln!(
                out,
                "{n},{c},{},{}",
                self.c_exact[n], self.c_quadratic_bound[n]
            );
        }
        out.push_str("\nn,k,c_nk\n");
        for ((n, k), v) in &self.c_nk {
            let cell = v.as_ref().map(|v| v.value.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{n},{k},{cell}");
        }
        out
    }
}

/// `3A ∪ (3A + 1)`; raises a finite level `α >= 1` to `α + 1`.
pub fn escalate(
    engine: &Engine<IntegerUniverse>,
    a: &SymbolicSet,
) -> Result<SymbolicSet, BoundsError> {
    match engine.exact_level(a)? {
        LevelVerdict::ExactLevel(n) if n >= 1 => {}
        other => return Err(BoundsError::Precondition(engine.format_verdict(&other))),
    }
    Ok(escalate_unchecked(a)?)
}

pub fn escalate_unchecked(a: &SymbolicSet) -> Result<SymbolicSet, SymbolicError> {
    let h = a.scale(&BigInt::from(3))?;
    h.union(&h.translate(&BigInt::one()))
}

/// `⋃ k^(i+1)·A_i` over the stages.
pub fn limit_set(
    base: u32,
    stages: &[(SymbolicSet, u32)],
    k: &BigInt,
) -> Result<SymbolicSet, BoundsError> {
    if k.magnitude() <= &One::one() {
        return Err(BoundsError::NotExpanding(k.clone()));
    }
    let mut out = SymbolicSet::empty(base)?;
    let mut factor = k.clone();
    for (a, _) in stages {
        out = out.union(&a.scale(&factor)?)?;
        factor *= k;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct UnionReport {
    pub level_a: u32,
    pub level_b: u32,
    pub union_verdict: LevelVerdict<BigInt>,
    pub k: u32,
    pub tower_bound: BigInt,
    pub corrected_bound: BigInt,
    /// The union is in τ* (a finite level).
    pub additive: CheckStatus,
    pub within_tower_bound: CheckStatus,
    pub within_corrected_bound: CheckStatus,
}

/// Classifies `A ∪ B` and compares its level with `c(2, k)` for
/// `k = max(level A, level B)`.
pub fn union_level_check(
    engine: &Engine<IntegerUniverse>,
    a: &SymbolicSet,
    b: &SymbolicSet,
) -> Result<UnionReport, BoundsError> {
    let level = |s: &SymbolicSet| -> Result<u32, BoundsError> {
        match engine.exact_level(s)? {
            LevelVerdict::ExactLevel(n) => Ok(n),
            other => Err(BoundsError::Precondition(engine.format_verdict(&other))),
        }
    };
    let (level_a, level_b) = (level(a)?, level(b)?);
    let k = level_a.max(level_b);
    let tower_bound = c_nk(2, k, &CSource::Exact)?.value;
    let corrected_bound = c_nk_corrected(2, k, &CSource::Exact)?.value;
    let union = a.union(b)?;
    let union_verdict = engine.exact_level(&union)?;
    let compare = |bound: &BigInt| match &union_verdict {
        LevelVerdict::ExactLevel(n) if BigInt::from(*n) <= *bound => CheckStatus::Pass,
        LevelVerdict::ExactLevel(n) => {
            CheckStatus::Fail(format!("level {n} exceeds bound {bound}"))
        }
        LevelVerdict::NotInTauStar(_) => {
            CheckStatus::Fail("union is not in the thin-completion".into())
        }
        LevelVerdict::Unknown { .. } => {
            CheckStatus::Inconclusive("union classification ran out of budget".into())
        }
    };
    let additive = match &union_verdict {
        LevelVerdict::ExactLevel(_) => CheckStatus::Pass,
        LevelVerdict::NotInTauStar(_) => {
            CheckStatus::Fail("union is not in the thin-completion".into())
        }
        LevelVerdict::Unknown { .. } => {
            CheckStatus::Inconclusive("union classification ran out of budget".into())
        }
    };
    Ok(UnionReport {
        level_a,
        level_b,
        k,
        within_tower_bound: compare(&tower_bound),
        within_corrected_bound: compare(&corrected_bound),
        tower_bound,
        corrected_bound,
        additive,
        union_verdict,
    })
}
