//! Equilibria, inducibility and utility guarantees.
//!
//! Every LP here ranges over mixed strategies and is phrased through
//! [`CoverageProgram`]. Two exact shortcuts keep the per-target LPs small:
//!
//! * The attacker floor `v* = min_x max_t U_a(x,t)`. A target whose
//!   uncovered attacker payoff is below `v*` is never attacked. For a target
//!   `t` that is attacked, `U_a(x,t) ≥ v*` holds, so rows against targets
//!   whose uncovered payoff does not exceed `v*` are implied and dropped.
//! * The floor row also caps `c_t`, which bounds each target's LP value.
//!   Targets are visited best bound first and skipped once the bound cannot
//!   beat the incumbent, so the result is the same as solving all of them.
//!
//! Among optimal strategies of the winning LP the one with the largest
//! total coverage is reported.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::coverage_lp::{CoverageProgram, CoverageRow, CoverageSolution};
use crate::game_model::{
    attack_set, coverage_of, defender_utility, element_attack_set, element_partition, element_utilities,
    tie_break_values, CoverageVector, ElementPartition, GameError, JointSchedule, MixedStrategy, SecurityGame, Target,
    TargetPayoffs,
};
use crate::joint_schedules::{enumerate, greedy_columns, ScheduleError};
use crate::lp_exact::{Bounds, Relation};
use crate::rational::Rational;

/// How LP columns are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveMode {
    /// Enumerate when the distinct columns fit under the cap, otherwise
    /// generate them.
    #[default]
    Auto,
    Enumerate,
    ColumnGeneration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub mode: SolveMode,
    pub enumeration_cap: usize,
    /// Largest number of decimal digits allowed in the reduction's scaling
    /// factor.
    pub digit_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolveMode::Auto,
            enumeration_cap: 10_000,
            digit_budget: 10_000,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: SolveMode) -> Self {
        SolverConfig {
            mode,
            ..Default::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Schedules(#[from] ScheduleError),
    #[error("target {target} out of range for {n} targets")]
    TargetOutOfRange { target: Target, n: usize },
    #[error("targets {0} and {1} are identical; this computation needs distinct targets")]
    IdenticalTargets(Target, Target),
    #[error("the reduction needs integer payoffs")]
    NonIntegerPayoffs,
    #[error("the reduction's scaling factor has {digits} digits, above the budget of {budget}")]
    DigitBudget { digits: usize, budget: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Concept {
    Sse,
    Ise,
}

impl Concept {
    pub fn name(self) -> &'static str {
        match self {
            Concept::Sse => "SSE",
            Concept::Ise => "ISE",
        }
    }
}

/// The best worst-case value reachable near a strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteeReport {
    pub value: Rational,
    pub witness_element: Option<usize>,
    /// No element of the attack set is inducible; `value` is then the weak
    /// tie-break value.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumResult {
    pub concept: Concept,
    pub strategy: MixedStrategy,
    pub coverage: CoverageVector,
    pub attacked_target: Target,
    pub attacked_element: usize,
    /// Defender utility under the concept's response rule.
    pub optimistic_value: Rational,
    pub guarantee: Rational,
    pub degenerate: bool,
}

/// Inducibility of one element with a strategy making it the attack set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inducibility {
    pub inducible: bool,
    pub witness: Option<MixedStrategy>,
}

struct Floor {
    value: Rational,
    support: Vec<JointSchedule>,
}

/// Solver for one game. Inducibility results are cached, so one solver
/// should serve all questions about a game.
pub struct Solver<'g> {
    game: &'g SecurityGame,
    config: SolverConfig,
    partition: ElementPartition,
    columns: Option<Vec<JointSchedule>>,
    floor: OnceLock<Floor>,
    inducible: Vec<OnceLock<Inducibility>>,
}

fn delta_att(p: &TargetPayoffs) -> Rational {
    &p.att_unc - &p.att_cov
}

fn delta_def(p: &TargetPayoffs) -> Rational {
    &p.def_cov - &p.def_unc
}

// (value, index) ordering: larger value first, then smaller index
fn better(value: &Rational, index: usize, best: &Option<(Rational, usize)>) -> bool {
    match best {
        None => true,
        Some((v, i)) => match value.cmp(v) {
            Ordering::Greater => true,
            Ordering::Equal => index < *i,
            Ordering::Less => false,
        },
    }
}

impl<'g> Solver<'g> {
    pub fn new(game: &'g SecurityGame, config: SolverConfig) -> Result<Self, EquilibriumError> {
        let columns = match config.mode {
            SolveMode::Enumerate => Some(enumerate(game, config.enumeration_cap)?),
            SolveMode::Auto => enumerate(game, config.enumeration_cap).ok(),
            SolveMode::ColumnGeneration => None,
        };
        let partition = element_partition(game);
        let inducible = (0..partition.len()).map(|_| OnceLock::new()).collect();
        Ok(Solver {
            game,
            config,
            partition,
            columns,
            floor: OnceLock::new(),
            inducible,
        })
    }

    pub fn game(&self) -> &SecurityGame {
        self.game
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Elements without inducibility flags.
    pub fn partition(&self) -> &ElementPartition {
        &self.partition
    }

    /// True when LPs run over the full column enumeration.
    pub fn enumerates(&self) -> bool {
        self.columns.is_some()
    }

    fn check_target(&self, t: Target) -> Result<(), EquilibriumError> {
        if t < self.game.n() {
            Ok(())
        } else {
            Err(EquilibriumError::TargetOutOfRange {
                target: t,
                n: self.game.n(),
            })
        }
    }

    fn run(&self, program: &CoverageProgram, stop: Option<&dyn Fn(&Rational) -> bool>) -> CoverageSolution {
        match &self.columns {
            Some(columns) => program.solve_with_columns(self.game, columns),
            None => {
                let mut pool = greedy_columns(self.game);
                if let Some(floor) = self.floor.get() {
                    for js in &floor.support {
                        if !pool.iter().any(|p| p.column() == js.column()) {
                            pool.push(js.clone());
                        }
                    }
                }
                program.solve_generating(self.game, &mut pool, stop)
            }
        }
    }

    fn floor_data(&self) -> &Floor {
        self.floor.get_or_init(|| {
            // max -v  s.t.  v - U_a(c,t) ≥ 0 for all t, v free
            let rows = (0..self.game.n())
                .map(|t| {
                    let p = self.game.payoff(t);
                    CoverageRow {
                        targets: vec![(t, delta_att(p))],
                        extras: vec![Rational::one()],
                        relation: Relation::Ge,
                        rhs: p.att_unc.clone(),
                    }
                })
                .collect();
            let program = CoverageProgram {
                objective: Vec::new(),
                extra_objective: vec![-Rational::one()],
                extra_bounds: vec![Bounds::free()],
                constant: Rational::zero(),
                rows,
            };
            let sol = self.run(&program, None);
            assert!(sol.is_optimal(), "the attacker floor LP is feasible and bounded");
            Floor {
                value: -sol.objective,
                support: sol
                    .strategy
                    .expect("optimal")
                    .support()
                    .iter()
                    .map(|(j, _)| j.clone())
                    .collect(),
            }
        })
    }

    /// `min_x max_t U_a(x,t)`: no strategy holds the attacker below it.
    pub fn attacker_floor(&self) -> &Rational {
        &self.floor_data().value
    }

    fn reachable(&self, t: Target) -> bool {
        self.game.payoff(t).att_unc >= *self.attacker_floor()
    }

    // largest coverage of t compatible with t being attacked
    fn coverage_cap(&self, t: Target) -> Rational {
        let p = self.game.payoff(t);
        let cap = (&p.att_unc - self.attacker_floor()) / delta_att(p);
        cap.min(Rational::one())
    }

    fn floor_row(&self, t: Target, extras: usize) -> CoverageRow {
        let p = self.game.payoff(t);
        CoverageRow {
            targets: vec![(t, -delta_att(p))],
            extras: vec![Rational::zero(); extras],
            relation: Relation::Ge,
            rhs: self.attacker_floor() - &p.att_unc,
        }
    }

    /// Rows `U_a(t) ≥ U_a(t') + gap·u` against the representatives of the
    /// other elements, keeping only rivals that are not implied by the
    /// floor row. `strict` keeps rivals whose uncovered payoff equals the
    /// floor.
    fn rival_rows(&self, element: usize, gap: bool, strict: bool) -> Vec<CoverageRow> {
        let t = self.partition.element(element).representative();
        let p = self.game.payoff(t);
        let floor = self.attacker_floor();
        let mut rows = Vec::new();
        for (e, other) in self.partition.elements().iter().enumerate() {
            if e == element {
                continue;
            }
            let r = other.representative();
            let q = self.game.payoff(r);
            let keep = if strict {
                q.att_unc >= *floor
            } else {
                q.att_unc > *floor
            };
            if !keep {
                continue;
            }
            rows.push(CoverageRow {
                targets: vec![(t, -delta_att(p)), (r, delta_att(q))],
                extras: if gap { vec![-Rational::one()] } else { Vec::new() },
                relation: Relation::Ge,
                rhs: &q.att_unc - &p.att_unc,
            });
        }
        rows.push(self.floor_row(t, usize::from(gap)));
        rows
    }

    fn sse_program(&self, t: Target) -> CoverageProgram {
        let p = self.game.payoff(t);
        CoverageProgram {
            objective: vec![(t, delta_def(p))],
            extra_objective: Vec::new(),
            extra_bounds: Vec::new(),
            constant: p.def_unc.clone(),
            rows: self.rival_rows(self.partition.element_of(t), false, false),
        }
    }

    fn gap_program(&self, element: usize, strict: bool) -> CoverageProgram {
        CoverageProgram {
            objective: Vec::new(),
            extra_objective: vec![Rational::one()],
            extra_bounds: vec![Bounds::at_most(Rational::one())],
            constant: Rational::zero(),
            rows: self.rival_rows(element, true, strict),
        }
    }

    fn ise_program(&self, element: usize) -> CoverageProgram {
        let mut rows = self.rival_rows(element, false, false);
        for row in &mut rows {
            row.extras.push(Rational::zero());
        }
        for &t in &self.partition.element(element).targets {
            let p = self.game.payoff(t);
            rows.push(CoverageRow {
                targets: vec![(t, -delta_def(p))],
                extras: vec![Rational::one()],
                relation: Relation::Le,
                rhs: p.def_unc.clone(),
            });
        }
        CoverageProgram {
            objective: Vec::new(),
            extra_objective: vec![Rational::one()],
            extra_bounds: vec![Bounds::free()],
            constant: Rational::zero(),
            rows,
        }
    }

    /// Whether some strategy makes exactly this element the attack set.
    pub fn element_inducibility(&self, element: usize) -> &Inducibility {
        self.inducible[element].get_or_init(|| {
            let t = self.partition.element(element).representative();
            if !self.reachable(t) {
                return Inducibility {
                    inducible: false,
                    witness: None,
                };
            }
            let positive = |u: &Rational| u.is_positive();
            let sol = self.run(&self.gap_program(element, true), Some(&positive));
            let inducible = sol.is_optimal() && sol.objective.is_positive();
            Inducibility {
                inducible,
                witness: if inducible { sol.strategy } else { None },
            }
        })
    }

    /// Whether `t` can be made the attacker's unique best response, with a
    /// witness strategy when it can.
    pub fn inducible_target(&self, t: Target) -> Result<(bool, Option<MixedStrategy>), EquilibriumError> {
        self.check_target(t)?;
        let e = self.partition.element_of(t);
        if self.partition.element(e).targets.len() > 1 {
            return Ok((false, None));
        }
        let ind = self.element_inducibility(e);
        Ok((ind.inducible, ind.witness.clone()))
    }

    /// The element partition with every inducibility flag filled in.
    pub fn inducible_elements(&self) -> ElementPartition {
        let mut partition = self.partition.clone();
        for e in 0..partition.len() {
            partition.set_inducible(e, self.element_inducibility(e).inducible);
        }
        partition
    }

    /// Whether `t` can be in the attack set at all.
    pub fn feasible_target(&self, t: Target) -> Result<bool, EquilibriumError> {
        self.check_target(t)?;
        if !self.reachable(t) {
            return Ok(false);
        }
        let nonnegative = |u: &Rational| !u.is_negative();
        let sol = self.run(
            &self.gap_program(self.partition.element_of(t), false),
            Some(&nonnegative),
        );
        Ok(sol.is_optimal() && !sol.objective.is_negative())
    }

    /// Feasibility decided by an SSE of the game with defender payoffs that
    /// favour `t` over every other target.
    pub fn feasible_target_via_sse(&self, t: Target) -> Result<bool, EquilibriumError> {
        self.check_target(t)?;
        let r = Rational::from_integer;
        let payoffs = self
            .game
            .payoffs()
            .iter()
            .enumerate()
            .map(|(u, p)| {
                let (cov, unc) = if u == t { (r(4), r(3)) } else { (r(2), r(1)) };
                TargetPayoffs::new(cov, unc, p.att_cov.clone(), p.att_unc.clone())
            })
            .collect();
        let modified = self.game.with_payoffs(payoffs)?;
        let solver = Solver::new(&modified, self.config.clone())?;
        let (_, coverage, _, _) = solver.sse_core()?;
        Ok(attack_set(&modified, &coverage).contains(&t))
    }

    /// Value of the best inducible element the attacker may hit at `c`.
    pub fn guarantee_at(&self, c: &CoverageVector) -> GuaranteeReport {
        let mut candidates: Vec<(Rational, usize)> = element_attack_set(self.game, &self.partition, c)
            .into_iter()
            .map(|e| (element_utilities(self.game, c, self.partition.element(e)).0, e))
            .collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (value, e) in candidates {
            if self.element_inducibility(e).inducible {
                return GuaranteeReport {
                    value,
                    witness_element: Some(e),
                    degenerate: false,
                };
            }
        }
        GuaranteeReport {
            value: tie_break_values(self.game, c).weak,
            witness_element: None,
            degenerate: true,
        }
    }

    pub fn utility_guarantee(&self, x: &MixedStrategy) -> Result<GuaranteeReport, EquilibriumError> {
        Ok(self.guarantee_at(&coverage_of(self.game, x)?))
    }

    fn refine(
        &self,
        program: &CoverageProgram,
        value: &Rational,
    ) -> Result<(MixedStrategy, CoverageVector), EquilibriumError> {
        let sol = self.run(&program.refined(value, self.game.n()), None);
        match (sol.strategy, sol.coverage) {
            (Some(x), Some(c)) if sol.status == crate::lp_exact::LpStatus::Optimal => Ok((x, c)),
            _ => Err(EquilibriumError::Internal("refinement of an optimal LP failed".into())),
        }
    }

    // strategy, coverage, attacked target and value, without the guarantee
    fn sse_core(&self) -> Result<(MixedStrategy, CoverageVector, Target, Rational), EquilibriumError> {
        let mut order: Vec<(Rational, Target)> = (0..self.game.n())
            .filter(|&t| self.reachable(t))
            .map(|t| (self.game.payoff(t).defender_at(&self.coverage_cap(t)), t))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(Rational, Target)> = None;
        for (bound, t) in order {
            if !better(&bound, t, &best) {
                if best.as_ref().is_some_and(|(v, _)| bound < *v) {
                    break;
                }
                continue;
            }
            let sol = self.run(&self.sse_program(t), None);
            if sol.is_optimal() && better(&sol.objective, t, &best) {
                best = Some((sol.objective, t));
            }
        }
        let (value, t) = best.ok_or_else(|| EquilibriumError::Internal("no target can be attacked".into()))?;
        let (x, c) = self.refine(&self.sse_program(t), &value)?;
        Ok((x, c, t, value))
    }

    /// Strong Stackelberg equilibrium: the best LP over targets the attacker
    /// can be made to prefer, ties to the lowest target.
    pub fn sse(&self) -> Result<EquilibriumResult, EquilibriumError> {
        let (strategy, coverage, t, value) = self.sse_core()?;
        let gamma = attack_set(self.game, &coverage);
        if !gamma.contains(&t) || defender_utility(self.game, &coverage, t) != value {
            return Err(EquilibriumError::Internal(format!(
                "target {t} is not attacked at the SSE strategy"
            )));
        }
        let g = self.guarantee_at(&coverage);
        Ok(EquilibriumResult {
            concept: Concept::Sse,
            strategy,
            coverage,
            attacked_target: t,
            attacked_element: self.partition.element_of(t),
            optimistic_value: value,
            guarantee: g.value,
            degenerate: g.degenerate,
        })
    }

    /// Inducible Stackelberg equilibrium: the best guarantee over inducible
    /// elements, ties to the lowest element.
    pub fn ise(&self) -> Result<EquilibriumResult, EquilibriumError> {
        let mut order: Vec<(Rational, usize)> = Vec::new();
        for (e, element) in self.partition.elements().iter().enumerate() {
            if !self.reachable(element.representative()) {
                continue;
            }
            let cap = self.coverage_cap(element.representative());
            let bound = element
                .targets
                .iter()
                .map(|&t| self.game.payoff(t).defender_at(&cap))
                .min()
                .expect("elements are nonempty");
            order.push((bound, e));
        }
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(Rational, usize)> = None;
        for (bound, e) in order {
            if !better(&bound, e, &best) {
                if best.as_ref().is_some_and(|(v, _)| bound < *v) {
                    break;
                }
                continue;
            }
            let sol = self.run(&self.ise_program(e), None);
            if sol.is_optimal() && better(&sol.objective, e, &best) && self.element_inducibility(e).inducible {
                best = Some((sol.objective, e));
            }
        }
        let (value, e) = best.ok_or_else(|| EquilibriumError::Internal("no inducible element exists".into()))?;
        let (strategy, coverage) = self.refine(&self.ise_program(e), &value)?;
        let g = self.guarantee_at(&coverage);
        if g.degenerate || g.value != value {
            return Err(EquilibriumError::Internal(format!(
                "ISE value {value} differs from the guarantee {} of its strategy",
                g.value
            )));
        }
        let attacked_target = self.weakest_member(e, &coverage);
        Ok(EquilibriumResult {
            concept: Concept::Ise,
            strategy,
            coverage,
            attacked_target,
            attacked_element: e,
            optimistic_value: value.clone(),
            guarantee: value,
            degenerate: false,
        })
    }

    fn weakest_member(&self, e: usize, c: &CoverageVector) -> Target {
        let mut best: Option<(Rational, Target)> = None;
        for &t in &self.partition.element(e).targets {
            let u = defender_utility(self.game, c, t);
            if best.as_ref().is_none_or(|(v, _)| u < *v) {
                best = Some((u, t));
            }
        }
        best.expect("elements are nonempty").1
    }

    /// ISE through an SSE of the game restricted to inducible targets.
    pub fn ise_via_restricted_game(&self) -> Result<EquilibriumResult, EquilibriumError> {
        if let Some(e) = self.partition.elements().iter().find(|e| e.targets.len() > 1) {
            return Err(EquilibriumError::IdenticalTargets(e.targets[0], e.targets[1]));
        }
        let kept: Vec<Target> = (0..self.game.n())
            .filter(|&t| self.element_inducibility(self.partition.element_of(t)).inducible)
            .collect();
        if kept.is_empty() {
            return Err(EquilibriumError::Internal("no inducible target".into()));
        }
        let mut new_index = vec![None; self.game.n()];
        for (i, &t) in kept.iter().enumerate() {
            new_index[t] = Some(i);
        }
        // restricted schedules, first occurrence wins
        let mut restricted: Vec<Vec<Target>> = Vec::new();
        let mut image: Vec<Option<usize>> = Vec::with_capacity(self.game.schedules().len());
        for s in self.game.schedules() {
            let cut: Vec<Target> = s.iter().filter_map(|&t| new_index[t]).collect();
            if cut.is_empty() {
                image.push(None);
                continue;
            }
            match restricted.iter().position(|r| *r == cut) {
                Some(i) => image.push(Some(i)),
                None => {
                    image.push(Some(restricted.len()));
                    restricted.push(cut);
                }
            }
        }
        let resources: Vec<Vec<usize>> = self
            .game
            .resources()
            .iter()
            .map(|allowed| allowed.iter().filter_map(|&s| image[s]).collect())
            .collect();
        let payoffs = kept.iter().map(|&t| self.game.payoff(t).clone()).collect();
        let sub = SecurityGame::new(payoffs, restricted, resources)?;
        let sub_solver = Solver::new(&sub, self.config.clone())?;
        let (sub_strategy, _, _, _) = sub_solver.sse_core()?;

        let mut support = Vec::with_capacity(sub_strategy.support().len());
        for (js, p) in sub_strategy.support() {
            let assignment = js
                .assignment()
                .iter()
                .enumerate()
                .map(|(r, choice)| {
                    choice.map(|s2| {
                        *self.game.resources()[r]
                            .iter()
                            .find(|&&s| image[s] == Some(s2))
                            .expect("every restricted schedule has a preimage")
                    })
                })
                .collect();
            support.push((JointSchedule::new(self.game, assignment)?, p.clone()));
        }
        let strategy = MixedStrategy::new(self.game, support)?;
        let coverage = coverage_of(self.game, &strategy)?;
        let g = self.guarantee_at(&coverage);
        let e = g
            .witness_element
            .ok_or_else(|| EquilibriumError::Internal("restricted SSE strategy has no inducible response".into()))?;
        Ok(EquilibriumResult {
            concept: Concept::Ise,
            attacked_target: self.weakest_member(e, &coverage),
            attacked_element: e,
            strategy,
            coverage,
            optimistic_value: g.value.clone(),
            guarantee: g.value,
            degenerate: false,
        })
    }

    /// Inducibility of `t` decided through feasibility in a game with
    /// rescaled attacker payoffs, where `t` loses one unit.
    pub fn inducibility_via_reduction(&self, t: Target) -> Result<bool, EquilibriumError> {
        self.check_target(t)?;
        if !self.game.has_integer_payoffs() {
            return Err(EquilibriumError::NonIntegerPayoffs);
        }
        if let Some(e) = self.partition.elements().iter().find(|e| e.targets.len() > 1) {
            return Err(EquilibriumError::IdenticalTargets(e.targets[0], e.targets[1]));
        }
        let n = self.game.n();
        let m0 = self
            .game
            .payoffs()
            .iter()
            .flat_map(|p| [&p.def_cov, &p.def_unc, &p.att_cov, &p.att_unc])
            .map(|v| v.numer().abs())
            .max()
            .unwrap_or_default()
            .max(BigInt::one());
        let m2 = m2_bound(n, &m0);
        let scale = BigInt::from(n + 1) * &m2 * &m2;
        let digits = scale.to_string().len();
        if digits > self.config.digit_budget {
            return Err(EquilibriumError::DigitBudget {
                digits,
                budget: self.config.digit_budget,
            });
        }
        let k = Rational::from_bigint(scale);
        let payoffs = self
            .game
            .payoffs()
            .iter()
            .enumerate()
            .map(|(u, p)| {
                let shift = if u == t { Rational::one() } else { Rational::zero() };
                TargetPayoffs::new(
                    p.def_cov.clone(),
                    p.def_unc.clone(),
                    &(&p.att_cov * &k) - &shift,
                    &(&p.att_unc * &k) - &shift,
                )
            })
            .collect();
        let transformed = self.game.with_payoffs(payoffs)?;
        Solver::new(&transformed, self.config.clone())?.feasible_target_via_sse(t)
    }

    /// Whether the SSE claims more than its strategy guarantees.
    pub fn sse_overoptimistic(&self) -> Result<bool, EquilibriumError> {
        let s = self.sse()?;
        Ok(s.optimistic_value > s.guarantee)
    }

    /// Whether the SSE strategy guarantees less than the ISE.
    pub fn sse_suboptimal(&self) -> Result<bool, EquilibriumError> {
        Ok(self.sse()?.guarantee < self.ise()?.guarantee)
    }
}

/// `(n² M₀)^n`.
pub fn m1_bound(n: usize, m0: &BigInt) -> BigInt {
    num_traits::pow(BigInt::from(n * n) * m0, n)
}

/// `2 (n+1) (n² M₀)^{n²}`.
pub fn m2_bound(n: usize, m0: &BigInt) -> BigInt {
    BigInt::from(2 * (n + 1)) * num_traits::pow(BigInt::from(n * n) * m0, n * n)
}

pub fn sse(game: &SecurityGame) -> Result<EquilibriumResult, EquilibriumError> {
    Solver::new(game, SolverConfig::default())?.sse()
}

pub fn ise(game: &SecurityGame) -> Result<EquilibriumResult, EquilibriumError> {
    Solver::new(game, SolverConfig::default())?.ise()
}

pub fn utility_guarantee(game: &SecurityGame, x: &MixedStrategy) -> Result<GuaranteeReport, EquilibriumError> {
    Solver::new(game, SolverConfig::default())?.utility_guarantee(x)
}

pub fn inducible_target(game: &SecurityGame, t: Target) -> Result<(bool, Option<MixedStrategy>), EquilibriumError> {
    Solver::new(game, SolverConfig::default())?.inducible_target(t)
}

pub fn inducible_elements(game: &SecurityGame) -> Result<ElementPartition, EquilibriumError> {
    Ok(Solver::new(game, SolverConfig::default())?.inducible_elements())
}

fn exact(v: &Rational) -> Value {
    json!({ "exact": v.to_string(), "decimal": v.to_decimal(6) })
}

/// `{"support": [{"assignment": [schedule or null, ...], "probability": "p/q"}]}`
pub fn strategy_to_json(x: &MixedStrategy) -> Value {
    let support: Vec<Value> = x
        .support()
        .iter()
        .map(|(js, p)| {
            json!({
                "assignment": js.assignment(),
                "probability": p.to_string(),
                "decimal": p.to_decimal(6),
            })
        })
        .collect();
    json!({ "support": support })
}

/// Reads the format of [`strategy_to_json`]; a whole result object with a
/// `strategy` field is accepted too.
pub fn strategy_from_json(game: &SecurityGame, value: &Value) -> Result<MixedStrategy, GameError> {
    let bad = |m: &str| GameError::InvalidStrategy(m.to_string());
    let value = value.get("strategy").unwrap_or(value);
    let support = value
        .get("support")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing support array"))?;
    let mut entries = Vec::with_capacity(support.len());
    for entry in support {
        let assignment: Vec<Option<usize>> =
            serde_json::from_value(entry.get("assignment").cloned().unwrap_or(Value::Null))
                .map_err(|e| bad(&format!("bad assignment: {e}")))?;
        let p: Rational = serde_json::from_value(entry.get("probability").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(&format!("bad probability: {e}")))?;
        entries.push((JointSchedule::new(game, assignment)?, p));
    }
    MixedStrategy::new(game, entries)
}

impl EquilibriumResult {
    /// Report object; targets are numbered from 1.
    pub fn to_json(&self, partition: &ElementPartition) -> Value {
        let element: Vec<usize> = partition
            .element(self.attacked_element)
            .targets
            .iter()
            .map(|t| t + 1)
            .collect();
        json!({
            "concept": self.concept.name(),
            "strategy": strategy_to_json(&self.strategy),
            "coverage": self.coverage.0.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "attacked_target": self.attacked_target + 1,
            "attacked_element": element,
            "optimistic_value": exact(&self.optimistic_value),
            "guarantee": exact(&self.guarantee),
            "degenerate": self.degenerate,
        })
    }
}

impl GuaranteeReport {
    pub fn to_json(&self, partition: &ElementPartition) -> Value {
        let witness = self
            .witness_element
            .map(|e| partition.element(e).targets.iter().map(|t| t + 1).collect::<Vec<_>>());
        json!({
            "guarantee": exact(&self.value),
            "witness_element": witness,
            "degenerate": self.degenerate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example2_game, random_game, GeneratorConfig};
    use crate::rational::q;
    use proptest::prelude::*;

    fn single_target() -> SecurityGame {
        let p = TargetPayoffs::new(q(3, 1), q(-1, 1), q(-2, 1), q(5, 1));
        SecurityGame::homogeneous(vec![p], vec![vec![0]], 1).unwrap()
    }

    fn probabilities(x: &MixedStrategy) -> Vec<(Vec<Option<usize>>, Rational)> {
        x.support()
            .iter()
            .map(|(j, p)| (j.assignment().to_vec(), p.clone()))
            .collect()
    }

    #[test]
    fn example2_sse() {
        let g = example2_game();
        let s = sse(&g).unwrap();
        assert_eq!(
            probabilities(&s.strategy),
            vec![(vec![Some(0)], q(1, 2)), (vec![Some(1)], q(1, 2))]
        );
        assert_eq!(s.attacked_target, 1);
        assert_eq!(s.optimistic_value, q(50, 1));
        assert_eq!(s.guarantee, q(0, 1));
    }

    #[test]
    fn example2_ise() {
        let g = example2_game();
        let s = ise(&g).unwrap();
        assert_eq!(
            probabilities(&s.strategy),
            vec![(vec![Some(0)], q(9, 14)), (vec![Some(1)], q(5, 14))]
        );
        assert_eq!(s.attacked_target, 3);
        assert_eq!(s.guarantee, q(123, 14));
    }

    #[test]
    fn example2_inducibility() {
        let g = example2_game();
        let solver = Solver::new(&g, SolverConfig::default()).unwrap();
        let flags: Vec<bool> = (0..4).map(|t| solver.inducible_target(t).unwrap().0).collect();
        assert_eq!(flags, vec![true, false, true, true]);
        let (_, witness) = solver.inducible_target(3).unwrap();
        let c = coverage_of(&g, &witness.unwrap()).unwrap();
        assert_eq!(attack_set(&g, &c), vec![3]);
        assert!(solver.feasible_target(1).unwrap());
        assert!(solver.feasible_target_via_sse(1).unwrap());
        assert_eq!(solver.attacker_floor(), &q(-2, 7));
    }

    #[test]
    fn example2_guarantees() {
        let g = example2_game();
        let solver = Solver::new(&g, SolverConfig::default()).unwrap();
        let s = solver.sse().unwrap();
        let report = solver.utility_guarantee(&s.strategy).unwrap();
        assert_eq!(report.value, q(0, 1));
        assert_eq!(report.witness_element, Some(0));
        let i = solver.ise().unwrap();
        let report = solver.utility_guarantee(&i.strategy).unwrap();
        assert_eq!(report.value, q(123, 14));
        assert_eq!(report.witness_element, Some(3));
        assert!(solver.sse_overoptimistic().unwrap());
        assert!(solver.sse_suboptimal().unwrap());
    }

    #[test]
    fn example2_restricted_and_reduction() {
        let g = example2_game();
        let solver = Solver::new(&g, SolverConfig::default()).unwrap();
        assert_eq!(solver.ise_via_restricted_game().unwrap().guarantee, q(123, 14));
        assert!(!solver.inducibility_via_reduction(1).unwrap());
        assert!(solver.inducibility_via_reduction(3).unwrap());
    }

    #[test]
    fn single_target_game() {
        let g = single_target();
        let solver = Solver::new(&g, SolverConfig::default()).unwrap();
        let s = solver.sse().unwrap();
        assert_eq!(s.optimistic_value, q(3, 1));
        assert_eq!(s.coverage.0, vec![Rational::one()]);
        assert_eq!(solver.ise().unwrap().guarantee, q(3, 1));
        assert!(solver.inducible_target(0).unwrap().0);
        assert!(!solver.sse_overoptimistic().unwrap());
        assert!(!solver.sse_suboptimal().unwrap());
        let report = solver
            .utility_guarantee(&MixedStrategy::pure(JointSchedule::empty(&g)))
            .unwrap();
        assert_eq!(report.value, q(-1, 1));
    }

    #[test]
    fn one_element_for_everything() {
        let p = TargetPayoffs::new(q(1, 1), q(0, 1), q(-1, 1), q(1, 1));
        let g = SecurityGame::homogeneous(vec![p.clone(), p], vec![vec![0, 1]], 1).unwrap();
        let solver = Solver::new(&g, SolverConfig::default()).unwrap();
        let flags = solver.inducible_elements();
        assert_eq!(flags.len(), 1);
        assert_eq!(flags.element(0).inducible, Some(true));
        assert!(!solver.inducible_target(0).unwrap().0);
        assert!(matches!(
            solver.ise_via_restricted_game(),
            Err(EquilibriumError::IdenticalTargets(0, 1))
        ));
    }

    #[test]
    fn bounds() {
        assert_eq!(m2_bound(1, &BigInt::from(1)), BigInt::from(4));
        assert_eq!(m2_bound(2, &BigInt::from(5)), BigInt::from(960_000));
        let big = m2_bound(4, &BigInt::from(5));
        assert_eq!(big, BigInt::from(10) * num_traits::pow(BigInt::from(80), 16));
        let log10 = (10f64).log10() + 16.0 * 80f64.log10();
        assert_eq!(big.to_string().len(), log10.floor() as usize + 1);
        assert_eq!(m1_bound(2, &BigInt::from(5)), BigInt::from(400));
    }

    #[test]
    fn digit_budget_guard() {
        let g = example2_game();
        let config = SolverConfig {
            digit_budget: 10,
            ..Default::default()
        };
        let solver = Solver::new(&g, config).unwrap();
        assert!(matches!(
            solver.inducibility_via_reduction(0),
            Err(EquilibriumError::DigitBudget { .. })
        ));
    }

    #[test]
    fn strategy_json_round_trip() {
        let g = example2_game();
        let s = sse(&g).unwrap();
        let v = s.to_json(&element_partition(&g));
        assert_eq!(v["attacked_target"], 2);
        assert_eq!(v["optimistic_value"]["exact"], "50");
        assert_eq!(strategy_from_json(&g, &v).unwrap(), s.strategy);
        let bad = json!({"support": [{"assignment": [0], "probability": "1/2"}]});
        assert!(strategy_from_json(&g, &bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn solver_modes_agree(seed in any::<u64>(), n in 2usize..7, s in 1usize..4, r in 1usize..3) {
            let l = n.div_ceil(s).min(n);
            let g = random_game(&GeneratorConfig::new(seed, n, s, l, r)).unwrap();
            let a = Solver::new(&g, SolverConfig::with_mode(SolveMode::Enumerate)).unwrap();
            let b = Solver::new(&g, SolverConfig::with_mode(SolveMode::ColumnGeneration)).unwrap();
            prop_assert_eq!(a.sse().unwrap().optimistic_value, b.sse().unwrap().optimistic_value);
            prop_assert_eq!(a.ise().unwrap().guarantee, b.ise().unwrap().guarantee);
            for t in 0..n {
                prop_assert_eq!(a.inducible_target(t).unwrap().0, b.inducible_target(t).unwrap().0);
                prop_assert_eq!(a.feasible_target(t).unwrap(), b.feasible_target(t).unwrap());
            }
        }

        #[test]
        fn witnesses_induce_exactly(seed in any::<u64>(), n in 2usize..7, s in 1usize..4) {
            let l = n.div_ceil(s).min(n);
            let g = random_game(&GeneratorConfig::new(seed, n, s, l, 1)).unwrap();
            let solver = Solver::new(&g, SolverConfig::default()).unwrap();
            for e in 0..solver.partition().len() {
                let ind = solver.element_inducibility(e).clone();
                if let Some(x) = ind.witness {
                    let c = coverage_of(&g, &x).unwrap();
                    prop_assert_eq!(attack_set(&g, &c), solver.partition().element(e).targets.clone());
                }
                let t = solver.partition().element(e).representative();
                if ind.inducible {
                    prop_assert!(solver.feasible_target(t).unwrap());
                }
            }
        }
    }
}
