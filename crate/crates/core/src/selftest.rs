//! The acceptance suite: eight criteria, each reported as PASS, FAIL or
//! INCONCLUSIVE (the engine ran out of budget before reaching a verdict).

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, CheckStatus};
use crate::group::GroupDescriptor;
use crate::oracle;
use crate::sample;
use crate::symbolic::SymbolicSet;
use crate::tau::{Budget, Engine, IntegerUniverse, LevelVerdict, TreeRank};

#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestConfig {
    pub seed: u64,
    pub budget: Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {}",
            self.id, self.status, self.name, self.detail
        )
    }
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    /// One line per criterion and a summary; with `timing`, a final line of
    /// elapsed times (the only nondeterministic output).
    pub fn render(&self, timing: bool) -> String {
        let mut out = format!("selftest seed={}\n", self.seed);
        for r in &self.results {
            out.push_str(&r.line());
            out.push('\n');
        }
        let count = |s: Status| self.results.iter().filter(|r| r.status == s).count();
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} inconclusive\n",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Inconclusive)
        ));
        if timing {
            let parts: Vec<String> = self
                .results
                .iter()
                .map(|r| format!("{}={:.2}s", r.id, r.elapsed.as_secs_f64()))
                .collect();
            out.push_str(&format!("timing: {}\n", parts.join(" ")));
        }
        out
    }
}

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

pub fn run_all(cfg: &SelftestConfig) -> SelftestReport {
    SelftestReport {
        seed: cfg.seed,
        results: CRITERIA.iter().map(|&id| run_criterion(id, cfg)).collect(),
    }
}

pub fn run_criterion(id: u8, cfg: &SelftestConfig) -> CriterionResult {
    let start = Instant::now();
    let (name, (status, detail)) = match id {
        1 => ("oracle equivalence", oracle_equivalence(cfg)),
        2 => ("hierarchy strictness", hierarchy_strictness(cfg)),
        3 => ("non-membership certification", non_membership(cfg)),
        4 => ("cubic image bound", cubic_bound(cfg)),
        5 => ("torsion-free additivity", additivity(cfg)),
        6 => ("boolean non-additivity", boolean_non_additivity()),
        7 => ("invariance", invariance(cfg)),
        8 => ("symbolic algebra soundness", algebra_soundness(cfg)),
        _ => (
            "unknown criterion",
            (Status::Fail, format!("no criterion {id}")),
        ),
    };
    CriterionResult {
        id,
        name,
        status,
        detail,
        elapsed: start.elapsed(),
    }
}

fn rng_for(cfg: &SelftestConfig, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ id)
}

fn engine(cfg: &SelftestConfig) -> Engine<IntegerUniverse> {
    Engine::new(IntegerUniverse, cfg.budget)
}

fn oracle_equivalence(cfg: &SelftestConfig) -> (Status, String) {
    let start = Instant::now();
    let groups = [
        GroupDescriptor::CyclicMod(3),
        GroupDescriptor::CyclicMod(5),
        GroupDescriptor::CyclicMod(7),
        GroupDescriptor::BooleanPower(2),
        GroupDescriptor::BooleanPower(3),
    ];
    let (mut subsets, mut mismatches, mut unknown, mut recursion) =
        (0usize, Vec::new(), 0usize, 0usize);
    for g in groups {
        for t in 0..=2 {
            let table = match oracle::build_table(g, t) {
                Ok(table) => table,
                Err(e) => return (Status::Fail, format!("{g}: {e}")),
            };
            match oracle::recursive_levels(g, t) {
                Ok(levels) if levels == table.levels => {}
                Ok(_) => recursion += 1,
                Err(e) => return (Status::Fail, format!("{g}: {e}")),
            }
            let report = match oracle::cross_check(&table, cfg.budget) {
                Ok(r) => r,
                Err(e) => return (Status::Fail, format!("{g}: {e}")),
            };
            subsets += report.subsets;
            unknown += report.unknown;
            for m in report
                .level_mismatches
                .iter()
                .chain(&report.rank_mismatches)
                .chain(&report.witness_failures)
            {
                mismatches.push(format!(
                    "{} t={t} {}: oracle {} engine {} rank {}",
                    g, m.subset, m.oracle, m.engine, m.rank
                ));
            }
        }
    }
    let slow = start.elapsed() > Duration::from_secs(60);
    let detail = format!(
        "15 tables, {subsets} subsets, {} mismatches, {recursion} fixpoint/recursion disagreements, {unknown} unclassified{}{}",
        mismatches.len(),
        if slow { ", runtime over 60 s" } else { "" },
        mismatches.first().map(|m| format!(" (first: {m})")).unwrap_or_default()
    );
    let status = if !mismatches.is_empty() || recursion > 0 || slow {
        Status::Fail
    } else if unknown > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    (status, detail)
}

fn hierarchy_strictness(cfg: &SelftestConfig) -> (Status, String) {
    let mut a = SymbolicSet::geo(2, 2, 1, 0, 0).expect("valid");
    let mut found = Vec::new();
    let mut status = Status::Pass;
    for expected in 1..=5u32 {
        let e = engine(cfg);
        let start = Instant::now();
        let verdict = match e.exact_level(&a) {
            Ok(v) => v,
            Err(err) => return (Status::Fail, format!("level {expected}: {err}")),
        };
        let slow = start.elapsed() > Duration::from_secs(120);
        match &verdict {
            LevelVerdict::ExactLevel(n) if *n == expected && !slow => found.push(n.to_string()),
            LevelVerdict::ExactLevel(n) => {
                status = Status::Fail;
                found.push(if slow {
                    format!("{n} (over 120 s)")
                } else {
                    format!("{n} (expected {expected})")
                });
            }
            LevelVerdict::Unknown { .. } => {
                if status == Status::Pass {
                    status = Status::Inconclusive;
                }
                found.push("unknown".into());
            }
            LevelVerdict::NotInTauStar(_) => {
                status = Status::Fail;
                found.push("not in tau*".into());
            }
        }
        a = match bounds::escalate_unchecked(&a) {
            Ok(next) => next,
            Err(err) => return (Status::Fail, err.to_string()),
        };
    }
    (
        status,
        format!(
            "levels of the first five escalation iterates: {}",
            found.join(", ")
        ),
    )
}

fn non_membership(cfg: &SelftestConfig) -> (Status, String) {
    let e = engine(cfg);
    let mut parts = Vec::new();
    let mut status = Status::Pass;
    for (text, set) in [
        ("ap(2,0)", SymbolicSet::ap(2, 2, 0).expect("valid")),
        ("ap(1,0)", SymbolicSet::ap(2, 1, 0).expect("valid")),
    ] {
        match e.exact_level(&set) {
            Ok(LevelVerdict::NotInTauStar(w)) => match e.replay(&set, &w) {
                Ok(true) => parts.push(format!(
                    "{text} NotInTauStar {} replayed",
                    e.format_witness(&w)
                )),
                _ => {
                    status = Status::Fail;
                    parts.push(format!("{text} witness does not replay"));
                }
            },
            Ok(LevelVerdict::Unknown { .. }) => {
                if status == Status::Pass {
                    status = Status::Inconclusive;
                }
                parts.push(format!("{text} unknown"));
            }
            Ok(v) => {
                status = Status::Fail;
                parts.push(format!("{text} {}", e.format_verdict(&v)));
            }
            Err(err) => {
                status = Status::Fail;
                parts.push(format!("{text} error {err}"));
            }
        }
    }
    (status, parts.join("; "))
}

fn cubic_bound(cfg: &SelftestConfig) -> (Status, String) {
    let mut violations = Vec::new();
    let mut exhaustive = Vec::new();
    for n in 2..=4u64 {
        let m = bounds::quadratic_c_bound(n);
        match bounds::cubic_image_min(m, 3) {
            Ok(r) => {
                exhaustive.push(format!("n={n} m={m} min={}", r.min_image_size));
                if r.min_image_size as u64 <= n {
                    violations.push(format!("n={n}: {:?}", r.argmin));
                }
            }
            Err(e) => return (Status::Fail, e.to_string()),
        }
    }
    let mut rng = rng_for(cfg, 4);
    for i in 0..10_000 {
        let n = 2 + (i % 3) as u64;
        let m = bounds::quadratic_c_bound(n) as usize;
        let g: Vec<i64> = (0..m)
            .map(|_| loop {
                let x = rng.gen_range(-1_000_000i64..=1_000_000);
                if x != 0 {
                    break x;
                }
            })
            .collect();
        if bounds::image_size(&g) as u64 <= n {
            violations.push(format!("n={n}: {g:?}"));
        }
    }
    let mut cs = Vec::new();
    for n in 1..=5 {
        match bounds::c_of_n(n, 3) {
            Ok(c) => {
                if !c.within_interval() {
                    violations.push(format!(
                        "c({n})={} outside [{}, {}]",
                        c.value, c.lower, c.quadratic_upper
                    ));
                }
                cs.push(format!("c({n})={}", c.value));
            }
            Err(e) => return (Status::Fail, e.to_string()),
        }
    }
    let status = if violations.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    (
        status,
        format!(
            "exhaustive over [-3,3]: {}; 10000 random vectors; searched {}; {} violations",
            exhaustive.join(", "),
            cs.join(" "),
            violations.len()
        ),
    )
}

/// A random chain set classified at a level of at most 2.
fn leveled_set(e: &Engine<IntegerUniverse>, rng: &mut ChaCha8Rng) -> Option<(SymbolicSet, u32)> {
    for _ in 0..100 {
        let a = sample::chain_set(rng);
        let a = if rng.gen_bool(0.2) {
            let h = a.scale(&BigInt::from(3)).ok()?;
            match e.exact_level(&h) {
                Ok(LevelVerdict::ExactLevel(n)) if n >= 1 => bounds::escalate_unchecked(&h).ok()?,
                _ => h,
            }
        } else {
            a
        };
        if let Ok(LevelVerdict::ExactLevel(n)) = e.exact_level(&a) {
            if n <= 2 {
                return Some((a, n));
            }
        }
    }
    None
}

fn additivity(cfg: &SelftestConfig) -> (Status, String) {
    let e = engine(cfg);
    let mut rng = rng_for(cfg, 5);
    let (mut pairs, mut finite, mut outside, mut unknown) = (0, 0, 0, 0);
    let (mut tower_over, mut corrected_over) = (0, 0);
    let mut example = None;
    let mut unsampled = 0;
    while pairs < 200 {
        let (Some((a, _)), Some((b, _))) = (leveled_set(&e, &mut rng), leveled_set(&e, &mut rng))
        else {
            unsampled += 1;
            if unsampled > 50 {
                break;
            }
            continue;
        };
        pairs += 1;
        let r = match bounds::union_level_check(&e, &a, &b) {
            Ok(r) => r,
            Err(_) => {
                unknown += 1;
                continue;
            }
        };
        match r.additive {
            CheckStatus::Pass => finite += 1,
            CheckStatus::Fail(_) => outside += 1,
            CheckStatus::Inconclusive(_) => unknown += 1,
        }
        if let CheckStatus::Fail(_) = r.within_tower_bound {
            tower_over += 1;
            if example.is_none() {
                example = Some(format!(
                    "{a} (level {}) with {b} (level {}): union level {:?}, c(2,{})={}",
                    r.level_a,
                    r.level_b,
                    r.union_verdict.level(),
                    r.k,
                    r.tower_bound
                ));
            }
        }
        if let CheckStatus::Fail(_) = r.within_corrected_bound {
            corrected_over += 1;
        }
    }
    let status = if outside > 0 || tower_over > 0 {
        Status::Fail
    } else if unknown > 0 || pairs < 200 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let mut detail = format!(
        "{pairs} pairs: {finite} unions at a finite level, {outside} outside tau*, {unknown} unclassified; \
         c(2,k) bound exceeded in {tower_over} pairs; c(n)+c(N,k) bound exceeded in {corrected_over}"
    );
    if let Some(x) = example {
        detail.push_str(&format!(" (first excess: {x})"));
    }
    (status, detail)
}

fn boolean_non_additivity() -> (Status, String) {
    let w = match oracle::boolean_non_additivity_witness(3, 1) {
        Ok(Some(w)) => w,
        Ok(None) => return (Status::Fail, "no witness in (Z/2)^3 with t=1".into()),
        Err(e) => return (Status::Fail, e.to_string()),
    };
    let mut checked = 0;
    for d in 1..=4 {
        match oracle::boolean_union_identity(d) {
            Ok(Ok(n)) => checked += n,
            Ok(Err((a, x))) => {
                return (
                    Status::Fail,
                    format!("identity fails in (Z/2)^{d} at A={a:#b}, x={x}"),
                )
            }
            Err(e) => return (Status::Fail, e.to_string()),
        }
    }
    (
        Status::Pass,
        format!(
            "witness A={} x={} with A|(x+A)={} not thin; union identity holds on {checked} pairs for d<=4",
            w.set_text, w.shift_text, w.union_text
        ),
    )
}

#[derive(PartialEq, Eq)]
enum Kind {
    Level(u32),
    Outside,
    Unknown,
}

fn kind(v: &LevelVerdict<BigInt>) -> Kind {
    match v {
        LevelVerdict::ExactLevel(n) => Kind::Level(*n),
        LevelVerdict::NotInTauStar(_) => Kind::Outside,
        LevelVerdict::Unknown { .. } => Kind::Unknown,
    }
}

fn invariance(cfg: &SelftestConfig) -> (Status, String) {
    let e = engine(cfg);
    let mut rng = rng_for(cfg, 7);
    let (mut violations, mut unknown) = (Vec::new(), 0);
    let compare = |what: &str, a: &SymbolicSet, b: &SymbolicSet| -> Result<(), Option<String>> {
        let (Ok(va), Ok(vb)) = (e.exact_level(a), e.exact_level(b)) else {
            return Err(None);
        };
        let (ka, kb) = (kind(&va), kind(&vb));
        if ka == Kind::Unknown || kb == Kind::Unknown {
            Err(None)
        } else if ka != kb {
            Err(Some(format!(
                "{what} of {a}: {} vs {}",
                e.format_verdict(&va),
                e.format_verdict(&vb)
            )))
        } else {
            Ok(())
        }
    };
    let mut tally = |r: Result<(), Option<String>>| match r {
        Ok(()) => {}
        Err(None) => unknown += 1,
        Err(Some(v)) => violations.push(v),
    };
    for _ in 0..100 {
        let a = sample::mixed_set(&mut rng);
        let g = sample::nonzero(&mut rng, 1 << 20);
        tally(compare("translation", &a, &a.translate(&g)));
    }
    for _ in 0..100 {
        let a = sample::mixed_set(&mut rng);
        for k in [2, 3, 5] {
            match a.scale(&BigInt::from(k)) {
                Ok(s) => tally(compare("scaling", &a, &s)),
                Err(_) => tally(Err(None)),
            }
        }
    }
    let status = if !violations.is_empty() {
        Status::Fail
    } else if unknown > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let mut detail = format!(
        "100 translated and 100x3 scaled sets: {} violations, {unknown} unclassified",
        violations.len()
    );
    if let Some(v) = violations.first() {
        detail.push_str(&format!(" (first: {v})"));
    }
    (status, detail)
}

/// Random window inside `[-2^30, 2^30]`; narrow when progressions make
/// windows dense.
fn window(rng: &mut ChaCha8Rng, dense: bool) -> (BigInt, BigInt) {
    let limit = 1i64 << 30;
    if dense {
        let w = rng.gen_range(0..=4096);
        let lo = rng.gen_range(-limit..=limit - w);
        (BigInt::from(lo), BigInt::from(lo + w))
    } else if rng.gen_bool(0.5) {
        (BigInt::from(-limit), BigInt::from(limit))
    } else {
        let a = rng.gen_range(-limit..=limit);
        let b = rng.gen_range(-limit..=limit);
        (BigInt::from(a.min(b)), BigInt::from(a.max(b)))
    }
}

fn algebra_soundness(cfg: &SelftestConfig) -> (Status, String) {
    let mut rng = rng_for(cfg, 8);
    let mut violations = Vec::new();
    for i in 0..10_000 {
        let a = sample::mixed_set(&mut rng);
        let b = sample::mixed_set(&mut rng);
        let op = i % 4;
        let dense = a.has_periodic_part() || (op >= 2 && b.has_periodic_part());
        let (lo, hi) = window(&mut rng, dense);
        let (descr, result, expected) = match op {
            0 => {
                let g = sample::nonzero(&mut rng, 1 << 20);
                let r = a.translate(&g);
                let exp: BTreeSet<BigInt> = a
                    .enumerate_window(&(&lo - &g), &(&hi - &g))
                    .into_iter()
                    .map(|x| x + &g)
                    .collect();
                (format!("{a} + {g}"), Ok(r), exp)
            }
            1 => {
                let k = sample::nonzero(&mut rng, 7);
                let (l, h) = if k.is_positive() {
                    (&lo, &hi)
                } else {
                    (&hi, &lo)
                };
                let lo_a = l.div_ceil(&k);
                let hi_a = h.div_floor(&k);
                let exp = a
                    .enumerate_window(&lo_a, &hi_a)
                    .into_iter()
                    .map(|x| x * &k)
                    .collect();
                (format!("{k} * {a}"), a.scale(&k), exp)
            }
            2 => {
                let exp = a
                    .enumerate_window(&lo, &hi)
                    .union(&b.enumerate_window(&lo, &hi))
                    .cloned()
                    .collect();
                (format!("{a} | {b}"), a.union(&b), exp)
            }
            _ => {
                let wa = a.enumerate_window(&lo, &hi);
                let exp = wa
                    .intersection(&b.enumerate_window(&lo, &hi))
                    .cloned()
                    .collect();
                (format!("{a} & {b}"), a.intersect(&b), exp)
            }
        };
        match result {
            Ok(r) if r.enumerate_window(&lo, &hi) == expected => {}
            Ok(_) => violations.push(format!("{descr} on [{lo}, {hi}]")),
            Err(e) => violations.push(format!("{descr}: {e}")),
        }
    }

    let e = Engine::new(IntegerUniverse, Budget::default());
    let mut closed_form = 0;
    for _ in 0..100 {
        let a = sample::mixed_set(&mut rng);
        let len = rng.gen_range(0..=4);
        let spectrum = a.explicit_shifts();
        let path: Vec<BigInt> = (0..len)
            .map(|_| {
                if !spectrum.is_empty() && rng.gen_bool(0.6) {
                    spectrum[rng.gen_range(0..spectrum.len())].clone()
                } else {
                    sample::nonzero(&mut rng, 24)
                }
            })
            .collect();
        let (lo, hi) = window(&mut rng, a.has_periodic_part());
        let incremental = match e.derived_set(&a, &path) {
            Ok(d) => d.enumerate_window(&lo, &hi),
            Err(err) => {
                violations.push(format!("derived set of {a}: {err}"));
                continue;
            }
        };
        if incremental != closed_form_window(&a, &path, &lo, &hi) {
            violations.push(format!("closed form of {a} along {path:?}"));
        }
        closed_form += 1;
    }
    let status = if violations.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    let mut detail = format!(
        "10000 window checks, {closed_form} incremental/closed-form checks, {} violations",
        violations.len()
    );
    if let Some(v) = violations.first() {
        detail.push_str(&format!(" (first: {v})"));
    }
    (status, detail)
}

/// `⋂ over k ∈ {0,1}^n of (k·s + A)` restricted to `[lo, hi]`.
pub fn closed_form_window(
    a: &SymbolicSet,
    path: &[BigInt],
    lo: &BigInt,
    hi: &BigInt,
) -> BTreeSet<BigInt> {
    let mut result: Option<BTreeSet<BigInt>> = None;
    for bits in 0u32..1 << path.len() {
        let t: BigInt = path
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(BigInt::zero(), |acc, (_, g)| acc + g);
        let w: BTreeSet<BigInt> = a
            .enumerate_window(&(lo - &t), &(hi - &t))
            .into_iter()
            .map(|x| x + &t)
            .collect();
        result = Some(match result {
            None => w,
            Some(r) => r.intersection(&w).cloned().collect(),
        });
    }
    result.unwrap_or_default()
}

/// `exact_level` and `tree_rank` agree on `a`, treating budget exhaustion as agreement.
pub fn rank_matches_level(e: &Engine<IntegerUniverse>, a: &SymbolicSet) -> bool {
    match (e.exact_level(a), e.tree_rank(a)) {
        (Ok(LevelVerdict::ExactLevel(n)), Ok(TreeRank::Rank(r))) => n == r,
        (Ok(LevelVerdict::NotInTauStar(_)), Ok(TreeRank::NotWellFounded)) => true,
        (Ok(LevelVerdict::Unknown { .. }), _) | (_, Ok(TreeRank::Unknown)) => true,
        _ => false,
    }
}
