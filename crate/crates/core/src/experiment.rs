//! Per-trial measurements behind the experiment command.

use std::time::Instant;

use crate::equilibria::{EquilibriumError, Solver, SolverConfig};
use crate::game_model::SecurityGame;
use crate::instances::{random_game, GeneratorConfig, InstanceError};
use crate::rational::Rational;
use crate::rng::derive;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

/// Instance seed of trial `trial` under the run seed.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive(seed, trial as u64)
}

pub fn trial_game(cfg: &GeneratorConfig, trial: usize) -> Result<(u64, SecurityGame), InstanceError> {
    let seed = trial_seed(cfg.seed, trial);
    Ok((seed, random_game(&cfg.with_seed(seed))?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducibilityRow {
    pub inducible_targets: usize,
    pub inducible_elements: usize,
    pub elements: usize,
    /// Percentage of targets that are inducible.
    pub percentage: Rational,
}

pub fn inducibility_row(game: &SecurityGame, config: &SolverConfig) -> Result<InducibilityRow, EquilibriumError> {
    let solver = Solver::new(game, config.clone())?;
    let partition = solver.inducible_elements();
    let inducible_elements = partition.inducible().len();
    let inducible_targets = partition
        .elements()
        .iter()
        .filter(|e| e.targets.len() == 1 && e.inducible == Some(true))
        .count();
    Ok(InducibilityRow {
        inducible_targets,
        inducible_elements,
        elements: partition.len(),
        percentage: Rational::new(100 * inducible_targets as i64, game.n() as i64),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OveroptRow {
    /// SSE value under favourable tie-breaking.
    pub sse_u: Rational,
    /// Guarantee of the SSE strategy.
    pub sse_g: Rational,
    /// ISE guarantee.
    pub ise_g: Rational,
    pub overoptimistic: bool,
    pub suboptimal: bool,
    pub degenerate: bool,
}

pub fn overopt_row(game: &SecurityGame, config: &SolverConfig) -> Result<OveroptRow, EquilibriumError> {
    let solver = Solver::new(game, config.clone())?;
    let s = solver.sse()?;
    let i = solver.ise()?;
    if !(s.guarantee <= i.guarantee && i.guarantee <= s.optimistic_value) {
        return Err(EquilibriumError::Internal(format!(
            "guarantees out of order: SSE {} / ISE {} / SSE value {}",
            s.guarantee, i.guarantee, s.optimistic_value
        )));
    }
    Ok(OveroptRow {
        overoptimistic: s.optimistic_value > s.guarantee,
        suboptimal: s.guarantee < i.guarantee,
        degenerate: s.degenerate,
        sse_u: s.optimistic_value,
        sse_g: s.guarantee,
        ise_g: i.guarantee,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalabilityRow {
    pub sse_ms: f64,
    pub ise_ms: f64,
    pub sse_u: Rational,
    pub ise_g: Rational,
}

/// Wall-clock of one SSE and one ISE solve, each with a fresh solver.
pub fn scalability_row(game: &SecurityGame, config: &SolverConfig) -> Result<ScalabilityRow, EquilibriumError> {
    let start = Instant::now();
    let s = Solver::new(game, config.clone())?.sse()?;
    let sse_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    let i = Solver::new(game, config.clone())?.ise()?;
    let ise_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ScalabilityRow {
        sse_ms,
        ise_ms,
        sse_u: s.optimistic_value,
        ise_g: i.guarantee,
    })
}

/// Exact mean; zero for an empty slice.
pub fn mean(values: &[Rational]) -> Rational {
    if values.is_empty() {
        return Rational::zero();
    }
    let total: Rational = values.iter().sum();
    total / Rational::from_integer(values.len() as i64)
}

/// Share of true flags, in percent.
pub fn percentage(flags: &[bool]) -> Rational {
    if flags.is_empty() {
        return Rational::zero();
    }
    Rational::new(100 * flags.iter().filter(|&&f| f).count() as i64, flags.len() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::example2_game;
    use crate::rational::q;

    #[test]
    fn example2_rows() {
        let g = example2_game();
        let row = overopt_row(&g, &SolverConfig::default()).unwrap();
        assert_eq!(
            (row.sse_u.clone(), row.sse_g.clone(), row.ise_g.clone()),
            (q(50, 1), q(0, 1), q(123, 14))
        );
        assert!(row.overoptimistic && row.suboptimal);
        assert_eq!(row.ise_g.to_decimal(6), "8.78571");
        let ind = inducibility_row(&g, &SolverConfig::default()).unwrap();
        assert_eq!(ind.inducible_targets, 3);
        assert_eq!(ind.percentage, q(75, 1));
    }

    #[test]
    fn aggregates() {
        assert_eq!(mean(&[q(1, 1), q(2, 1)]), q(3, 2));
        assert_eq!(mean(&[]), Rational::zero());
        assert_eq!(percentage(&[true, false, false, false]), q(25, 1));
    }

    #[test]
    fn trial_games_are_reproducible() {
        let cfg = GeneratorConfig::new(7, 6, 3, 2, 1);
        assert_eq!(trial_game(&cfg, 4).unwrap(), trial_game(&cfg, 4).unwrap());
        assert_ne!(trial_game(&cfg, 4).unwrap().0, trial_game(&cfg, 5).unwrap().0);
    }
}
