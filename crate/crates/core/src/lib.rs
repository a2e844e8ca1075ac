//! Exact solvers for Stackelberg security games with scheduling
//! constraints: strong Stackelberg equilibria, utility guarantees,
//! inducible targets and elements, and inducible Stackelberg equilibria.
//!
//! All arithmetic in the solvers is exact ([`Rational`]); floats only
//! appear when rendering decimals for reports.

pub mod coverage_lp;
pub mod equilibria;
pub mod experiment;
pub mod game_model;
pub mod instances;
pub mod joint_schedules;
pub mod lp_exact;
pub mod oracle;
pub mod rational;
pub mod rng;

pub use equilibria::{Concept, EquilibriumError, EquilibriumResult, GuaranteeReport, SolveMode, Solver, SolverConfig};
pub use game_model::{
    attack_set, attacker_utility, coverage_of, defender_utility, element_attack_set, element_partition,
    element_utilities, identical, ssas_check, tie_break_values, CoverageVector, Element, ElementPartition, GameError,
    JointSchedule, MixedStrategy, SecurityGame, Target, TargetPayoffs, TieBreak,
};
pub use instances::{example2_game, random_game, random_ssas_game, GeneratorConfig, InstanceError};
pub use lp_exact::{Bounds, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, Simplex};
pub use rational::Rational;
