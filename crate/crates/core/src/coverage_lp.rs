//! Linear programs over mixed strategies written in terms of coverage.
//!
//! Every LP the equilibrium code needs has the form
//!
//! ```text
//! maximize   Σ_t o_t c_t + Σ_k d_k y_k + constant
//! subject to Σ_t a_it c_t + Σ_k b_ik y_k  (≤ | ≥)  rhs_i
//!            c = P x,  Σ_j x_j = 1,  x ≥ 0
//! ```
//!
//! with a few extra scalar variables `y`. A joint-schedule column then
//! enters row `i` with `Σ_{t covered} a_it`, so its reduced cost is
//! `Σ_{t covered} w_t - dual(Σx = 1)` with `w_t = o_t - Σ_i dual_i a_it`,
//! which is exactly what [`price`] maximizes.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::game_model::{coverage_unchecked, CoverageVector, JointSchedule, MixedStrategy, SecurityGame, Target};
use crate::joint_schedules::price;
use crate::lp_exact::{Bounds, LinearProgram, LpStatus, Relation, Sense, Simplex};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageRow {
    pub targets: Vec<(Target, Rational)>,
    /// One entry per extra variable.
    pub extras: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoverageProgram {
    pub objective: Vec<(Target, Rational)>,
    pub extra_objective: Vec<Rational>,
    pub extra_bounds: Vec<Bounds>,
    pub constant: Rational,
    pub rows: Vec<CoverageRow>,
}

#[derive(Clone, Debug)]
pub struct CoverageSolution {
    pub status: LpStatus,
    /// Includes the constant term.
    pub objective: Rational,
    pub strategy: Option<MixedStrategy>,
    pub coverage: Option<CoverageVector>,
    pub extras: Vec<Rational>,
    /// Columns held by the master when it stopped.
    pub columns: usize,
}

impl CoverageSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl CoverageProgram {
    pub fn num_extras(&self) -> usize {
        self.extra_objective.len()
    }

    fn column_entries(&self, column: &FixedBitSet) -> (Rational, Vec<Rational>) {
        let sum = |coeffs: &[(Target, Rational)]| -> Rational {
            coeffs.iter().filter(|(t, _)| column.contains(*t)).map(|(_, a)| a).sum()
        };
        let mut entries: Vec<Rational> = self.rows.iter().map(|r| sum(&r.targets)).collect();
        entries.push(Rational::one());
        (sum(&self.objective), entries)
    }

    fn build(&self, columns: &[JointSchedule]) -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for (d, b) in self.extra_objective.iter().zip(&self.extra_bounds) {
            lp.add_variable(d.clone(), b.clone()).expect("valid bounds");
        }
        for row in &self.rows {
            lp.add_row(row.extras.clone(), row.relation, row.rhs.clone())
                .expect("one entry per extra variable");
        }
        lp.add_row(vec![Rational::zero(); self.num_extras()], Relation::Eq, Rational::one())
            .expect("convexity row");
        for js in columns {
            let (obj, entries) = self.column_entries(js.column());
            lp.add_column(obj, entries).expect("one entry per row");
        }
        lp
    }

    /// Same rows; maximize total coverage over `n` targets among solutions
    /// whose objective is at least `value`.
    pub fn refined(&self, value: &Rational, n: usize) -> CoverageProgram {
        let mut rows = self.rows.clone();
        rows.push(CoverageRow {
            targets: self.objective.clone(),
            extras: self.extra_objective.clone(),
            relation: Relation::Ge,
            rhs: value - &self.constant,
        });
        CoverageProgram {
            objective: (0..n).map(|t| (t, Rational::one())).collect(),
            extra_objective: vec![Rational::zero(); self.num_extras()],
            extra_bounds: self.extra_bounds.clone(),
            constant: Rational::zero(),
            rows,
        }
    }

    /// Maximize a common slack `g ≤ 1` on every inequality row; the program
    /// is feasible over a column set iff the optimum there is nonnegative.
    fn gap(&self) -> CoverageProgram {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut extras = r.extras.clone();
                extras.push(match r.relation {
                    Relation::Ge => -Rational::one(),
                    Relation::Le => Rational::one(),
                    Relation::Eq => Rational::zero(),
                });
                CoverageRow { extras, ..r.clone() }
            })
            .collect();
        let mut extra_objective = vec![Rational::zero(); self.num_extras()];
        extra_objective.push(Rational::one());
        let mut extra_bounds = self.extra_bounds.clone();
        extra_bounds.push(Bounds::at_most(Rational::one()));
        CoverageProgram {
            objective: Vec::new(),
            extra_objective,
            extra_bounds,
            constant: Rational::zero(),
            rows,
        }
    }

    fn extract(
        &self,
        game: &SecurityGame,
        columns: &[JointSchedule],
        status: LpStatus,
        values: &[Rational],
        objective: &Rational,
    ) -> CoverageSolution {
        if status != LpStatus::Optimal {
            return CoverageSolution {
                status,
                objective: Rational::zero(),
                strategy: None,
                coverage: None,
                extras: Vec::new(),
                columns: columns.len(),
            };
        }
        let k = self.num_extras();
        let mut support: Vec<(JointSchedule, Rational)> = columns
            .iter()
            .zip(&values[k..])
            .filter(|(_, p)| !p.is_zero())
            .map(|(js, p)| (js.clone(), p.clone()))
            .collect();
        support.sort();
        let strategy = MixedStrategy::from_support_unchecked(support);
        let coverage = coverage_unchecked(game.n(), &strategy);
        CoverageSolution {
            status,
            objective: objective + &self.constant,
            strategy: Some(strategy),
            coverage: Some(coverage),
            extras: values[..k].to_vec(),
            columns: columns.len(),
        }
    }

    /// Solves over a fixed column set.
    pub fn solve_with_columns(&self, game: &SecurityGame, columns: &[JointSchedule]) -> CoverageSolution {
        let lp = self.build(columns);
        let sol = lp.solve().expect("well-formed program");
        self.extract(game, columns, sol.status, &sol.values, &sol.objective)
    }

    /// Column generation from `pool`, which collects every column added.
    /// `stop` is checked on each optimal restricted master value (constant
    /// included); returning true ends the search early with that master's
    /// solution.
    pub fn solve_generating(
        &self,
        game: &SecurityGame,
        pool: &mut Vec<JointSchedule>,
        stop: Option<&dyn Fn(&Rational) -> bool>,
    ) -> CoverageSolution {
        let mut known: HashSet<FixedBitSet> = pool.iter().map(|js| js.column().clone()).collect();
        let mut simplex = Simplex::new(self.build(pool)).expect("well-formed program");
        let conv_row = self.rows.len();
        loop {
            let sol = simplex.solve();
            match sol.status {
                LpStatus::Unbounded => return self.extract(game, pool, sol.status, &sol.values, &sol.objective),
                LpStatus::Infeasible => {
                    let nonnegative = |g: &Rational| !g.is_negative();
                    let phase = self.gap().solve_generating(game, pool, Some(&nonnegative));
                    if !phase.is_optimal() || phase.objective.is_negative() {
                        return self.extract(game, pool, LpStatus::Infeasible, &[], &Rational::zero());
                    }
                    known = pool.iter().map(|js| js.column().clone()).collect();
                    simplex = Simplex::new(self.build(pool)).expect("well-formed program");
                    continue;
                }
                LpStatus::Optimal => {}
            }
            let value = &sol.objective + &self.constant;
            if stop.is_some_and(|f| f(&value)) {
                return self.extract(game, pool, sol.status, &sol.values, &sol.objective);
            }
            let mut weights = vec![Rational::zero(); game.n()];
            for (t, o) in &self.objective {
                weights[*t] += o;
            }
            for (row, y) in self.rows.iter().zip(&sol.duals) {
                if y.is_zero() {
                    continue;
                }
                for (t, a) in &row.targets {
                    weights[*t] -= y * a;
                }
            }
            let (js, reduced) = price(game, &weights, &sol.duals[conv_row]);
            if !reduced.is_positive() || !known.insert(js.column().clone()) {
                debug_assert!(
                    !reduced.is_positive(),
                    "priced an existing column at positive reduced cost"
                );
                return self.extract(game, pool, sol.status, &sol.values, &sol.objective);
            }
            let (obj, entries) = self.column_entries(js.column());
            simplex.add_column(obj, entries).expect("one entry per row");
            pool.push(js);
        }
    }
}
