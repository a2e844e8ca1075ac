//! Brute-force checks for the LP machinery on small games. Deterministic
//! grid scans over the joint-schedule simplex.

use crate::equilibria::{EquilibriumError, Solver};
use crate::game_model::{
    attack_set, coverage_of, tie_break_values, JointSchedule, MixedStrategy, SecurityGame, Target,
};
use crate::joint_schedules::{enumerate, ScheduleError};
use crate::rational::Rational;

/// Largest number of grid points a scan may visit.
pub const GRID_LIMIT: u128 = 2_000_000;
const COLUMN_LIMIT: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error(transparent)]
    Schedules(#[from] ScheduleError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

// Calls `visit` with every vector of `parts` nonnegative integers summing to
// `total`, in lexicographic order.
fn compositions(total: usize, parts: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(left: usize, slot: usize, parts: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if slot + 1 == parts {
            cur.push(left);
            visit(cur);
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(left - k, slot + 1, parts, cur, visit);
            cur.pop();
        }
    }
    go(total, 0, parts, &mut Vec::with_capacity(parts), visit)
}

fn grid(game: &SecurityGame, denominator: usize) -> Result<(Vec<JointSchedule>, usize), OracleError> {
    let columns = enumerate(game, COLUMN_LIMIT)?;
    let j = columns.len() as u128;
    let points = binomial(denominator as u128 + j - 1, j - 1);
    if points > GRID_LIMIT {
        return Err(OracleError::GridTooLarge {
            points,
            limit: GRID_LIMIT,
        });
    }
    Ok((columns, denominator))
}

fn strategy(columns: &[JointSchedule], weights: &[usize], denominator: usize) -> MixedStrategy {
    let support = columns
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0)
        .map(|(js, &w)| (js.clone(), Rational::new(w as i64, denominator as i64)))
        .collect();
    MixedStrategy::from_support_unchecked(support)
}

/// Whether some grid strategy with the given denominator makes `t` the
/// unique best response. `true` is a proof; `false` only means no grid
/// point works.
pub fn inducible_brute(game: &SecurityGame, t: Target, denominator: usize) -> Result<bool, OracleError> {
    let (columns, d) = grid(game, denominator)?;
    let mut found = false;
    compositions(d, columns.len(), &mut |w| {
        if found {
            return;
        }
        let x = strategy(&columns, w, d);
        let c = coverage_of(game, &x).expect("grid strategies are valid");
        found = attack_set(game, &c) == [t];
    });
    Ok(found)
}

/// Best non-degenerate utility guarantee over the grid; a lower bound on
/// the ISE guarantee. `None` when every grid point is degenerate.
pub fn ise_brute(
    game: &SecurityGame,
    solver: &Solver<'_>,
    denominator: usize,
) -> Result<Option<Rational>, OracleError> {
    let (columns, d) = grid(game, denominator)?;
    let mut best: Option<Rational> = None;
    compositions(d, columns.len(), &mut |w| {
        let x = strategy(&columns, w, d);
        let c = coverage_of(game, &x).expect("grid strategies are valid");
        let report = solver.guarantee_at(&c);
        if !report.degenerate && best.as_ref().is_none_or(|b| report.value > *b) {
            best = Some(report.value);
        }
    });
    Ok(best)
}

/// Largest weak tie-break value among strategies obtained from `x` by
/// moving `radius·m/samples` (m = 1..=samples) of probability from one
/// support column to another column, `x` itself included.
pub fn guarantee_by_perturbation(
    game: &SecurityGame,
    x: &MixedStrategy,
    radius: &Rational,
    samples: usize,
) -> Result<Rational, OracleError> {
    let weak = |s: &MixedStrategy| -> Rational {
        let c = coverage_of(game, s).expect("perturbed strategies are valid");
        tie_break_values(game, &c).weak
    };
    let mut best = weak(x);
    if radius.is_zero() || samples == 0 {
        return Ok(best);
    }
    let mut targets: Vec<JointSchedule> = x.support().iter().map(|(j, _)| j.clone()).collect();
    for js in enumerate(game, COLUMN_LIMIT)? {
        if !targets.iter().any(|t| t.column() == js.column()) {
            targets.push(js);
        }
    }
    for (from, p) in x.support() {
        for to in &targets {
            if to == from {
                continue;
            }
            for m in 1..=samples {
                let delta = radius * &Rational::new(m as i64, samples as i64);
                if delta > *p {
                    break;
                }
                let mut support: Vec<(JointSchedule, Rational)> = x.support().to_vec();
                for entry in &mut support {
                    if entry.0 == *from {
                        entry.1 -= &delta;
                    }
                }
                match support.iter_mut().find(|e| e.0 == *to) {
                    Some(entry) => entry.1 += &delta,
                    None => support.push((to.clone(), delta.clone())),
                }
                support.retain(|e| !e.1.is_zero());
                let v = weak(&MixedStrategy::from_support_unchecked(support));
                if v > best {
                    best = v;
                }
            }
        }
    }
    Ok(best)
}
