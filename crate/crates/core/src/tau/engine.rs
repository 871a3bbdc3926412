use dashmap::DashMap;

use super::{Budget, CycleWitness, EngineError, LevelVerdict, ShiftUniverse};

#[derive(Clone, Debug)]
enum Memo<G> {
    Level(u32),
    /// Witness relative to the memoized set; valid for every translate.
    Outside(CycleWitness<G>),
}

enum Outcome<G> {
    Level(u32),
    Outside(CycleWitness<G>),
    Unknown(u32),
}

struct Search<'a, U: ShiftUniverse> {
    engine: &'a Engine<U>,
    nodes: usize,
    deepest: usize,
    /// Normal forms and offsets of the sets on the current path.
    ancestors: Vec<(U::Set, U::Shift)>,
    shifts: Vec<U::Shift>,
}

/// Level classifier with a translation-normalized memo shared across calls.
pub struct Engine<U: ShiftUniverse> {
    universe: U,
    budget: Budget,
    memo: DashMap<U::Set, Memo<U::Shift>>,
    pub(super) rank_memo: DashMap<U::Set, u32>,
}

impl<U: ShiftUniverse> Engine<U> {
    pub fn new(universe: U, budget: Budget) -> Self {
        Engine {
            universe,
            budget,
            memo: DashMap::new(),
            rank_memo: DashMap::new(),
        }
    }

    pub fn universe(&self) -> &U {
        &self.universe
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// `A_s`, computed incrementally by `A_{s⌢g} = A_s ∩ (g + A_s)`.
    pub fn derived_set(&self, set: &U::Set, path: &[U::Shift]) -> Result<U::Set, EngineError> {
        let mut cur = set.clone();
        for (i, g) in path.iter().enumerate() {
            if self.universe.is_identity(g) {
                return Err(EngineError::ZeroShift(i));
            }
            cur = self.universe.child(&cur, g)?;
        }
        Ok(cur)
    }

    /// Every distinct-translate intersection lies in 𝓕.
    pub fn is_thin(&self, set: &U::Set) -> Result<bool, EngineError> {
        if self.universe.in_ideal(set) {
            return Ok(true);
        }
        let b = self.universe.branching(set)?;
        for g in &b.shifts {
            if !self.universe.in_ideal(&self.universe.child(set, g)?) {
                return Ok(false);
            }
        }
        if b.complete {
            Ok(true)
        } else {
            Err(EngineError::Incomplete)
        }
    }

    /// `A ∈ τⁿ(𝓕)`, by direct recursion on `n`.
    pub fn level_at_most(&self, set: &U::Set, n: u32) -> Result<bool, EngineError> {
        if self.universe.in_ideal(set) {
            return Ok(true);
        }
        if n == 0 {
            return Ok(false);
        }
        let b = self.universe.branching(set)?;
        for g in &b.shifts {
            let child = self.universe.child(set, g)?;
            if !self.level_at_most(&child, n - 1)? {
                return Ok(false);
            }
        }
        if b.complete {
            Ok(true)
        } else {
            Err(EngineError::Incomplete)
        }
    }

    pub fn exact_level(&self, set: &U::Set) -> Result<LevelVerdict<U::Shift>, EngineError> {
        let mut search = Search {
            engine: self,
            nodes: 0,
            deepest: 0,
            ancestors: Vec::new(),
            shifts: Vec::new(),
        };
        Ok(match search.visit(set)? {
            Outcome::Level(n) => LevelVerdict::ExactLevel(n),
            Outcome::Outside(w) => LevelVerdict::NotInTauStar(w),
            Outcome::Unknown(lb) => LevelVerdict::Unknown {
                nodes: search.nodes,
                depth: search.deepest,
                level_lower_bound: lb,
            },
        })
    }

    /// Recomputes both sides of a witness and checks the translate equality.
    pub fn replay(&self, set: &U::Set, w: &CycleWitness<U::Shift>) -> Result<bool, EngineError> {
        if w.ancestor_index > w.path.len() {
            return Err(EngineError::BadWitness(w.ancestor_index, w.path.len()));
        }
        let ancestor = self.derived_set(set, &w.path[..w.ancestor_index])?;
        let mut full = w.path.clone();
        full.push(w.repeat_shift.clone());
        let end = self.derived_set(set, &full)?;
        Ok(!self.universe.in_ideal(&ancestor)
            && end == self.universe.translate(&ancestor, &w.translation))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

impl<U: ShiftUniverse> Search<'_, U> {
    fn visit(&mut self, set: &U::Set) -> Result<Outcome<U::Shift>, EngineError> {
        let u = &self.engine.universe;
        if u.in_ideal(set) {
            return Ok(Outcome::Level(0));
        }
        let (normal, offset) = u.normalize(set);
        if let Some(m) = self.engine.memo.get(&normal) {
            return Ok(match m.value() {
                Memo::Level(n) => Outcome::Level(*n),
                Memo::Outside(w) => Outcome::Outside(w.clone()),
            });
        }
        let depth = self.ancestors.len();
        self.deepest = self.deepest.max(depth);
        if depth >= self.engine.budget.max_depth || self.nodes >= self.engine.budget.max_nodes {
            return Ok(Outcome::Unknown(1));
        }
        self.nodes += 1;

        let branching = u.branching(set)?;
        self.ancestors.push((normal.clone(), offset.clone()));
        let result = self.visit_children(set, &branching.shifts);
        self.ancestors.pop();
        let result = match result? {
            Outcome::Level(n) if !branching.complete => Outcome::Unknown(n),
            other => other,
        };
        match &result {
            Outcome::Level(n) => {
                self.engine.memo.insert(normal, Memo::Level(*n));
            }
            Outcome::Outside(w) => {
                self.engine.memo.insert(normal, Memo::Outside(w.clone()));
            }
            Outcome::Unknown(_) => {}
        }
        Ok(result)
    }

    /// The outcome of the node on top of the ancestor stack.
    fn visit_children(
        &mut self,
        set: &U::Set,
        shifts: &[U::Shift],
    ) -> Result<Outcome<U::Shift>, EngineError> {
        let u = &self.engine.universe;
        let mut best = 0u32;
        let mut unknown = false;
        for g in shifts {
            let child = u.child(set, g)?;
            if u.in_ideal(&child) {
                continue;
            }
            let (cn, co) = u.normalize(&child);
            if let Some(i) = self.ancestors.iter().position(|(n, _)| *n == cn) {
                let translation = u.difference(&co, &self.ancestors[i].1);
                return Ok(Outcome::Outside(self.local_cycle(
                    i,
                    g.clone(),
                    translation,
                )));
            }
            self.shifts.push(g.clone());
            let out = self.visit(&child);
            self.shifts.pop();
            match out? {
                Outcome::Level(n) => best = best.max(n),
                Outcome::Outside(w) => {
                    let mut path = vec![g.clone()];
                    path.extend(w.path);
                    return Ok(Outcome::Outside(CycleWitness {
                        path,
                        ancestor_index: w.ancestor_index + 1,
                        repeat_shift: w.repeat_shift,
                        translation: w.translation,
                    }));
                }
                Outcome::Unknown(lb) => {
                    unknown = true;
                    best = best.max(lb);
                }
            }
        }
        Ok(if unknown {
            Outcome::Unknown(best + 1)
        } else {
            Outcome::Level(best + 1)
        })
    }

    /// The current node's child under `g` equals `t + ` the ancestor at depth
    /// `i`. Rewrites that cycle as a witness relative to the current node: the
    /// sequence `g` followed by the shifts from depth `i` back down to here
    /// returns to a translate of the current node.
    fn local_cycle(&self, i: usize, g: U::Shift, translation: U::Shift) -> CycleWitness<U::Shift> {
        let here = self.ancestors.len() - 1;
        let mut word = vec![g];
        word.extend(self.shifts[i..here].iter().cloned());
        let repeat_shift = word.pop().expect("nonempty");
        CycleWitness {
            path: word,
            ancestor_index: 0,
            repeat_shift,
            translation,
        }
    }
}
