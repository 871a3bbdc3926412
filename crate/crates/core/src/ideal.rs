//! Base families 𝓕: finite subsets of ℤ, and size-threshold families on finite groups.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cayley::CayleyTable;
use crate::group::{GroupDescriptor, GroupError};
use crate::symbolic::SymbolicSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("{ideal} does not apply to {what}")]
    Mismatch { ideal: IdealSpec, what: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealSpec {
    /// All finite subsets of ℤ.
    FiniteSets,
    /// Subsets of a finite group with at most `t` elements.
    SizeAtMost(u64),
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealSpec::FiniteSets => write!(f, "finite sets"),
            IdealSpec::SizeAtMost(t) => write!(f, "sets of size at most {t}"),
        }
    }
}

/// A set in one of the two supported representations.
#[derive(Debug, Clone, Copy)]
pub enum SetRef<'a> {
    Symbolic(&'a SymbolicSet),
    Finite { group: GroupDescriptor, mask: u64 },
}

impl IdealSpec {
    pub fn contains(&self, set: SetRef<'_>) -> Result<bool, IdealError> {
        match (self, set) {
            (IdealSpec::FiniteSets, SetRef::Symbolic(a)) => Ok(a.is_finite()),
            (IdealSpec::SizeAtMost(t), SetRef::Finite { group, .. }) if !group.is_finite() => {
                Err(IdealError::Mismatch {
                    ideal: IdealSpec::SizeAtMost(*t),
                    what: group.to_string(),
                })
            }
            (IdealSpec::SizeAtMost(t), SetRef::Finite { mask, .. }) => {
                Ok(mask.count_ones() as u64 <= *t)
            }
            (ideal, SetRef::Symbolic(_)) => Err(IdealError::Mismatch {
                ideal: *ideal,
                what: "symbolic subsets of Z".into(),
            }),
            (ideal, SetRef::Finite { group, .. }) => Err(IdealError::Mismatch {
                ideal: *ideal,
                what: format!("subsets of {group}"),
            }),
        }
    }

    /// Membership for bitmask subsets, where only the size matters.
    pub fn contains_mask(&self, mask: u64) -> bool {
        match self {
            IdealSpec::SizeAtMost(t) => mask.count_ones() as u64 <= *t,
            IdealSpec::FiniteSets => true,
        }
    }

    /// Property-tests the three axioms on `samples` random members.
    pub fn check_axioms(
        &self,
        group: GroupDescriptor,
        samples: usize,
        seed: u64,
    ) -> Result<AxiomReport, IdealError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match (self, group) {
            (IdealSpec::FiniteSets, GroupDescriptor::Integers) => {
                Ok(check_finite_sets(samples, &mut rng))
            }
            (IdealSpec::SizeAtMost(t), g) if g.is_finite() => {
                let table = CayleyTable::new(g)?;
                Ok(check_size_at_most(*t, &table, samples, &mut rng))
            }
            (ideal, g) => Err(IdealError::Mismatch {
                ideal: *ideal,
                what: g.to_string(),
            }),
        }
    }
}

/// Outcome of one axiom: `counterexample` is set exactly when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomOutcome {
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl AxiomOutcome {
    fn new() -> Self {
        AxiomOutcome {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(&mut self, why: impl FnOnce() -> String) {
        if self.holds {
            self.holds = false;
            self.counterexample = Some(why());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub samples: usize,
    pub left_invariant: AxiomOutcome,
    pub lower: AxiomOutcome,
    pub additive: AxiomOutcome,
}

impl AxiomReport {
    pub fn is_ideal(&self) -> bool {
        self.left_invariant.holds && self.lower.holds && self.additive.holds
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, o) in [
            ("left-invariant", &self.left_invariant),
            ("lower", &self.lower),
            ("additive", &self.additive),
        ] {
            match &o.counterexample {
                None => writeln!(f, "{name}: ok")?,
                Some(w) => writeln!(f, "{name}: fails ({w})")?,
            }
        }
        Ok(())
    }
}

fn random_finite(rng: &mut ChaCha8Rng) -> SymbolicSet {
    let n = rng.gen_range(0..8);
    SymbolicSet::finite(
        2,
        (0..n).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))),
    )
    .expect("base 2")
}

fn check_finite_sets(samples: usize, rng: &mut ChaCha8Rng) -> AxiomReport {
    let ideal = IdealSpec::FiniteSets;
    let member = |s: &SymbolicSet| ideal.contains(SetRef::Symbolic(s)).expect("symbolic");
    let mut report = AxiomReport {
        samples,
        left_invariant: AxiomOutcome::new(),
        lower: AxiomOutcome::new(),
        additive: AxiomOutcome::new(),
    };
    for _ in 0..samples {
        let a = random_finite(rng);
        let b = random_finite(rng);
        let g = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
        let moved = a.translate(&g);
        if !member(&moved) {
            report.left_invariant.fail(|| format!("{g} + {a}"));
        }
        let sub: Vec<BigInt> = a
            .finite_part()
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        let sub = SymbolicSet::finite(2, sub).expect("base 2");
        if !member(&sub) {
            report.lower.fail(|| format!("{sub} inside {a}"));
        }
        let u = a.union(&b).expect("same base");
        if !member(&u) {
            report.additive.fail(|| format!("{a} | {b}"));
        }
    }
    report
}

fn random_member(t: u64, n: usize, rng: &mut ChaCha8Rng) -> u64 {
    let size = rng.gen_range(0..=t.min(n as u64));
    let mut mask = 0u64;
    while (mask.count_ones() as u64) < size {
        mask |= 1 << rng.gen_range(0..n);
    }
    mask
}

fn check_size_at_most(
    t: u64,
    table: &CayleyTable,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> AxiomReport {
    let ideal = IdealSpec::SizeAtMost(t);
    let n = table.order();
    let mut report = AxiomReport {
        samples,
        left_invariant: AxiomOutcome::new(),
        lower: AxiomOutcome::new(),
        additive: AxiomOutcome::new(),
    };
    for _ in 0..samples {
        let a = random_member(t, n, rng);
        let b = random_member(t, n, rng);
        let g = rng.gen_range(0..n);
        if !ideal.contains_mask(table.translate(a, g)) {
            report
                .left_invariant
                .fail(|| format!("translate of {}", table.format(a)));
        }
        let sub = a & rng.gen::<u64>();
        if !ideal.contains_mask(sub) {
            report
                .lower
                .fail(|| format!("{} inside {}", table.format(sub), table.format(a)));
        }
        if !ideal.contains_mask(a | b) {
            report.additive.fail(|| {
                format!(
                    "{} | {} = {}",
                    table.format(a),
                    table.format(b),
                    table.format(a | b)
                )
            });
        }
    }
    report
}
