//! Enumeration and pricing of joint schedules.
//!
//! Both searches walk assignments in lexicographic order, with "unassigned"
//! before every schedule and schedules in ascending index order. Runs of
//! consecutive resources with equal allowed sets only take nondecreasing
//! choices; a lexicographically smallest assignment for any coverage
//! column always has that shape, so nothing is lost.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::game_model::{JointSchedule, SecurityGame, Target};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("more than {cap} distinct joint-schedule columns; use column generation")]
    TooLarge { cap: usize },
}

// choice codes: 0 = unassigned, s + 1 = schedule s
fn choices(game: &SecurityGame, r: usize) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(0).chain(game.resources()[r].iter().map(|&s| s + 1))
}

fn symmetric_runs(game: &SecurityGame) -> Vec<bool> {
    let res = game.resources();
    (0..res.len()).map(|r| r > 0 && res[r] == res[r - 1]).collect()
}

fn decode(codes: &[usize]) -> Vec<Option<usize>> {
    codes.iter().map(|&c| c.checked_sub(1)).collect()
}

struct Enumerator<'g> {
    game: &'g SecurityGame,
    symmetric: Vec<bool>,
    cap: usize,
    codes: Vec<usize>,
    visited: HashSet<(usize, FixedBitSet, usize)>,
    seen: HashMap<FixedBitSet, ()>,
    out: Vec<JointSchedule>,
}

impl Enumerator<'_> {
    fn visit(&mut self, r: usize, column: FixedBitSet, floor: usize) -> Result<(), ScheduleError> {
        let floor = if r < self.symmetric.len() && self.symmetric[r] {
            floor
        } else {
            0
        };
        // the same remaining subtree from an equal state was explored
        // earlier with a smaller prefix
        if !self.visited.insert((r, column.clone(), floor)) {
            return Ok(());
        }
        if r == self.game.num_resources() {
            if self.seen.insert(column.clone(), ()).is_none() {
                if self.out.len() == self.cap {
                    return Err(ScheduleError::TooLarge { cap: self.cap });
                }
                self.out.push(JointSchedule::from_parts(decode(&self.codes), column));
            }
            return Ok(());
        }
        let options: Vec<usize> = choices(self.game, r).filter(|&c| c >= floor).collect();
        for code in options {
            let mut next = column.clone();
            if code > 0 {
                next.union_with(self.game.schedule_set(code - 1));
            }
            self.codes.push(code);
            let result = self.visit(r + 1, next, code);
            self.codes.pop();
            result?;
        }
        Ok(())
    }
}

/// Every distinct coverage column, each with its lexicographically smallest
/// assignment, in order of that assignment. The empty joint schedule comes
/// first.
pub fn enumerate(game: &SecurityGame, cap: usize) -> Result<Vec<JointSchedule>, ScheduleError> {
    let mut e = Enumerator {
        game,
        symmetric: symmetric_runs(game),
        cap,
        codes: Vec::with_capacity(game.num_resources()),
        visited: HashSet::new(),
        seen: HashMap::new(),
        out: Vec::new(),
    };
    e.visit(0, FixedBitSet::with_capacity(game.n()), 0)?;
    Ok(e.out)
}

struct Pricer<'g> {
    game: &'g SecurityGame,
    symmetric: Vec<bool>,
    weights: &'g [Rational],
    // admissible bound on what resources r.. can still add
    suffix: Vec<Rational>,
    codes: Vec<usize>,
    best_value: Rational,
    best_codes: Vec<usize>,
}

impl Pricer<'_> {
    fn visit(&mut self, r: usize, column: &FixedBitSet, value: Rational, positive_left: Rational, floor: usize) {
        if r == self.game.num_resources() {
            if value > self.best_value {
                self.best_value = value;
                self.best_codes = self.codes.clone();
            }
            return;
        }
        let room = if self.suffix[r] < positive_left {
            &self.suffix[r]
        } else {
            &positive_left
        };
        if &value + room <= self.best_value {
            return;
        }
        let floor = if self.symmetric[r] { floor } else { 0 };
        let options: Vec<usize> = choices(self.game, r).filter(|&c| c >= floor).collect();
        for code in options {
            if code == 0 {
                self.codes.push(0);
                self.visit(r + 1, column, value.clone(), positive_left.clone(), 0);
                self.codes.pop();
                continue;
            }
            let set = self.game.schedule_set(code - 1);
            let mut gain = Rational::zero();
            let mut positive = Rational::zero();
            for t in set.ones() {
                if column.contains(t) {
                    continue;
                }
                let w = &self.weights[t];
                if w.is_zero() {
                    continue;
                }
                gain += w;
                if w.is_positive() {
                    positive += w;
                }
            }
            let mut next = column.clone();
            next.union_with(set);
            self.codes.push(code);
            self.visit(r + 1, &next, &value + &gain, &positive_left - &positive, code);
            self.codes.pop();
        }
    }
}

/// The joint schedule maximizing `Σ_{t covered} weights[t] - simplex_dual`,
/// found by exact depth-first branch and bound. Among optimal assignments
/// the lexicographically smallest is returned.
pub fn price(game: &SecurityGame, weights: &[Rational], simplex_dual: &Rational) -> (JointSchedule, Rational) {
    assert_eq!(weights.len(), game.n(), "one weight per target");
    let positive_gain = |s: usize| -> Rational {
        game.schedule_set(s)
            .ones()
            .map(|t| &weights[t])
            .filter(|w| w.is_positive())
            .sum()
    };
    let schedule_gain: Vec<Rational> = (0..game.schedules().len()).map(positive_gain).collect();
    let mut suffix = vec![Rational::zero(); game.num_resources() + 1];
    for r in (0..game.num_resources()).rev() {
        let best = game.resources()[r]
            .iter()
            .map(|&s| &schedule_gain[s])
            .max()
            .cloned()
            .unwrap_or_default();
        suffix[r] = &suffix[r + 1] + &best;
    }
    let positive_total: Rational = weights.iter().filter(|w| w.is_positive()).sum();
    let mut p = Pricer {
        game,
        symmetric: symmetric_runs(game),
        weights,
        suffix,
        codes: Vec::with_capacity(game.num_resources()),
        best_value: Rational::zero(),
        best_codes: vec![0; game.num_resources()],
    };
    p.visit(
        0,
        &FixedBitSet::with_capacity(game.n()),
        Rational::zero(),
        positive_total,
        0,
    );
    let js = JointSchedule::new(game, decode(&p.best_codes)).expect("pricing respects allowed sets");
    (js, &p.best_value - simplex_dual)
}

/// Starting columns for column generation: the empty joint schedule and,
/// for every coverable target, the first resource on the lowest-index
/// schedule containing it. Distinct columns only.
pub fn greedy_columns(game: &SecurityGame) -> Vec<JointSchedule> {
    let mut out = vec![JointSchedule::empty(game)];
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(out[0].column().clone());
    for t in 0..game.n() {
        let pick = game.resources().iter().enumerate().find_map(|(r, allowed)| {
            allowed
                .iter()
                .find(|&&s| game.schedule_set(s).contains(t))
                .map(|&s| (r, s))
        });
        if let Some((r, s)) = pick {
            let mut assignment = vec![None; game.num_resources()];
            assignment[r] = Some(s);
            let js = JointSchedule::new(game, assignment).expect("allowed schedule");
            if seen.insert(js.column().clone()) {
                out.push(js);
            }
        }
    }
    out
}

/// Targets covered by a column, as a convenience for tests and reports.
pub fn covered_targets(js: &JointSchedule) -> Vec<Target> {
    js.column().ones().collect()
}
