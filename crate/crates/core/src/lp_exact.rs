//! Exact linear programming.
//!
//! A dense-tableau primal simplex over [`Rational`] with Bland's rule
//! (lowest-index entering column, lowest-index leaving basic variable), so
//! runs are deterministic and terminate without perturbation. Rows may be
//! `<=`, `>=` or `=`; variables may carry finite or infinite lower and
//! upper bounds.
//!
//! [`Simplex`] keeps its tableau between calls so that columns can be
//! appended to an optimal basis and the solve resumed, which is what the
//! column-generation master needs.

use std::cmp::Ordering;

use crate::rational::Rational;

pub type VarId = usize;
pub type RowId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Variable bounds; `None` means unbounded in that direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn nonnegative() -> Self {
        Bounds {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        Bounds {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn at_most(upper: Rational) -> Self {
        Bounds {
            lower: None,
            upper: Some(upper),
        }
    }

    fn contains(&self, v: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| v >= l) && self.upper.as_ref().is_none_or(|u| v <= u)
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::nonnegative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("expected {expected} coefficients, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(VarId),
    #[error("columns can only be appended after an optimal solve")]
    NotWarm,
}

/// A linear program in general form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    rows: Vec<Row>,
    bounds: Vec<Bounds>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            rows: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    /// Adds a variable with zero coefficients in all existing rows.
    pub fn add_variable(&mut self, objective: Rational, bounds: Bounds) -> Result<VarId, LpError> {
        if let (Some(l), Some(u)) = (&bounds.lower, &bounds.upper) {
            if l > u {
                return Err(LpError::EmptyBounds(self.objective.len()));
            }
        }
        self.objective.push(objective);
        self.bounds.push(bounds);
        for row in &mut self.rows {
            row.coeffs.push(Rational::zero());
        }
        Ok(self.objective.len() - 1)
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<RowId, LpError> {
        if coeffs.len() != self.num_vars() {
            return Err(LpError::LengthMismatch {
                expected: self.num_vars(),
                found: coeffs.len(),
            });
        }
        self.rows.push(Row { coeffs, relation, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Adds a nonnegative variable with the given entry in every row.
    pub fn add_column(&mut self, objective: Rational, coeffs: Vec<Rational>) -> Result<VarId, LpError> {
        if coeffs.len() != self.rows.len() {
            return Err(LpError::LengthMismatch {
                expected: self.rows.len(),
                found: coeffs.len(),
            });
        }
        self.objective.push(objective);
        self.bounds.push(Bounds::nonnegative());
        for (row, a) in self.rows.iter_mut().zip(coeffs) {
            row.coeffs.push(a);
        }
        Ok(self.objective.len() - 1)
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let mut simplex = Simplex::new(self.clone())?;
        Ok(simplex.solve())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. Values, duals and objective are meaningful only when
/// the status is [`LpStatus::Optimal`].
///
/// Duals follow the convention `objective = Σ_i dual_i · rhs_i` plus the
/// bound terms of variables resting at finite bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<Rational>,
    pub duals: Vec<Rational>,
    pub objective: Rational,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("status is {0:?}, not optimal")]
    NotOptimal(LpStatus),
    #[error("row {0} violated")]
    PrimalRow(RowId),
    #[error("variable {0} outside its bounds")]
    PrimalBound(VarId),
    #[error("dual of row {0} has the wrong sign")]
    DualSign(RowId),
    #[error("reduced cost of variable {0} has the wrong sign")]
    ReducedCost(VarId),
    #[error("complementary slackness fails on row {0}")]
    Slackness(RowId),
    #[error("primal objective {primal} differs from dual objective {dual}")]
    Duality { primal: Rational, dual: Rational },
}

impl LpSolution {
    /// Exact optimality certificate: primal feasibility, dual feasibility,
    /// complementary slackness and equal primal and dual objectives.
    pub fn certify(&self, lp: &LinearProgram) -> Result<(), CertificateError> {
        if self.status != LpStatus::Optimal {
            return Err(CertificateError::NotOptimal(self.status));
        }
        let x = &self.values;
        let y = &self.duals;
        // in a maximization, a "≤" row has a nonnegative dual
        let flip = lp.sense == Sense::Minimize;
        for (i, row) in lp.rows.iter().enumerate() {
            let act = row.activity(x);
            let ok = match row.relation {
                Relation::Le => act <= row.rhs,
                Relation::Ge => act >= row.rhs,
                Relation::Eq => act == row.rhs,
            };
            if !ok {
                return Err(CertificateError::PrimalRow(i));
            }
            let sign = y[i].signum();
            let sign_ok = match (row.relation, flip) {
                (Relation::Eq, _) => true,
                (Relation::Le, false) | (Relation::Ge, true) => sign != Ordering::Less,
                (Relation::Ge, false) | (Relation::Le, true) => sign != Ordering::Greater,
            };
            if !sign_ok {
                return Err(CertificateError::DualSign(i));
            }
            if !y[i].is_zero() && act != row.rhs {
                return Err(CertificateError::Slackness(i));
            }
        }
        let mut dual_obj: Rational = lp.rows.iter().zip(y).map(|(r, yi)| yi * &r.rhs).sum();
        for (j, b) in lp.bounds.iter().enumerate() {
            if !b.contains(&x[j]) {
                return Err(CertificateError::PrimalBound(j));
            }
            let mut d = lp.objective[j].clone();
            for (i, row) in lp.rows.iter().enumerate() {
                if !row.coeffs[j].is_zero() && !y[i].is_zero() {
                    d -= &row.coeffs[j] * &y[i];
                }
            }
            if d.is_zero() {
                continue;
            }
            let at_lower = b.lower.as_ref() == Some(&x[j]);
            let at_upper = b.upper.as_ref() == Some(&x[j]);
            let improving_up = (d.is_positive()) != flip;
            // moving x_j in the improving direction must be blocked by a bound
            let ok = if improving_up { at_upper } else { at_lower };
            if !ok {
                return Err(CertificateError::ReducedCost(j));
            }
            dual_obj += &d * &x[j];
        }
        let primal: Rational = lp.objective.iter().zip(x).map(|(c, v)| c * v).sum();
        if primal != dual_obj || primal != self.objective {
            return Err(CertificateError::Duality { primal, dual: dual_obj });
        }
        Ok(())
    }
}

// How an original variable maps onto nonnegative tableau columns.
#[derive(Clone, Debug)]
enum VarMap {
    // x = offset + col
    Shifted { col: usize, offset: Rational },
    // x = offset - col
    Mirrored { col: usize, offset: Rational },
    // x = pos - neg
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Fresh,
    One,
    Two,
    Done(LpStatus),
}

/// Stateful simplex solver supporting warm-started column addition.
#[derive(Clone, Debug)]
pub struct Simplex {
    lp: LinearProgram,
    maps: Vec<VarMap>,
    // internal maximization costs per tableau column
    costs: Vec<Rational>,
    constant: Rational,
    tableau: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    reduced: Vec<Rational>,
    value: Rational,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    forbidden: Vec<bool>,
    artificial: Vec<bool>,
    // column holding the initial identity entry of each row
    identity: Vec<usize>,
    flipped: Vec<bool>,
    phase: Phase,
    trace: Vec<(usize, usize)>,
}

impl Simplex {
    pub fn new(lp: LinearProgram) -> Result<Self, LpError> {
        for (j, b) in lp.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(LpError::EmptyBounds(j));
                }
            }
        }
        let internal_max = |c: &Rational| if lp.sense == Sense::Maximize { c.clone() } else { -c };

        // structural columns
        let mut maps = Vec::with_capacity(lp.num_vars());
        let mut costs = Vec::new();
        let mut constant = Rational::zero();
        // extra rows from finite upper bounds: (col, limit)
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        for (j, b) in lp.bounds.iter().enumerate() {
            let c = internal_max(&lp.objective[j]);
            match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    let col = costs.len();
                    costs.push(c.clone());
                    constant += &c * l;
                    if let Some(u) = upper {
                        bound_rows.push((col, u - l));
                    }
                    maps.push(VarMap::Shifted { col, offset: l.clone() });
                }
                (None, Some(u)) => {
                    let col = costs.len();
                    costs.push(-&c);
                    constant += &c * u;
                    maps.push(VarMap::Mirrored { col, offset: u.clone() });
                }
                (None, None) => {
                    let pos = costs.len();
                    costs.push(c.clone());
                    costs.push(-&c);
                    maps.push(VarMap::Split { pos, neg: pos + 1 });
                }
            }
        }
        let structural = costs.len();

        // internal rows over structural columns
        let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for row in &lp.rows {
            let mut coeffs = vec![Rational::zero(); structural];
            let mut rhs = row.rhs.clone();
            for (j, a) in row.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match &maps[j] {
                    VarMap::Shifted { col, offset } => {
                        coeffs[*col] = a.clone();
                        rhs -= a * offset;
                    }
                    VarMap::Mirrored { col, offset } => {
                        coeffs[*col] = -a;
                        rhs -= a * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] = a.clone();
                        coeffs[*neg] = -a;
                    }
                }
            }
            rows.push((coeffs, row.relation, rhs));
        }
        for (col, limit) in bound_rows {
            let mut coeffs = vec![Rational::zero(); structural];
            coeffs[col] = Rational::one();
            rows.push((coeffs, Relation::Le, limit));
        }

        let m = rows.len();
        let mut flipped = vec![false; m];
        for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
            if rhs.is_negative() {
                flipped[i] = true;
                for a in coeffs.iter_mut() {
                    *a = -&*a;
                }
                *rhs = -&*rhs;
                *rel = match *rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        // slack / surplus columns, then artificials
        let mut aux_cols: Vec<(usize, Rational)> = Vec::new(); // (row, entry)
        for (i, (_, rel, _)) in rows.iter().enumerate() {
            match rel {
                Relation::Le => aux_cols.push((i, Rational::one())),
                Relation::Ge => aux_cols.push((i, -Rational::one())),
                Relation::Eq => {}
            }
        }
        let art_rows: Vec<usize> = (0..m).filter(|&i| rows[i].1 != Relation::Le).collect();
        let ncols = structural + aux_cols.len() + art_rows.len();

        let mut tableau = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (coeffs, _, b) in &rows {
            let mut full = coeffs.clone();
            full.resize(ncols, Rational::zero());
            tableau.push(full);
            rhs.push(b.clone());
        }
        let mut identity = vec![usize::MAX; m];
        for (k, (i, entry)) in aux_cols.iter().enumerate() {
            let col = structural + k;
            tableau[*i][col] = entry.clone();
            if rows[*i].1 == Relation::Le {
                identity[*i] = col;
            }
        }
        let mut artificial = vec![false; ncols];
        for (k, &i) in art_rows.iter().enumerate() {
            let col = structural + aux_cols.len() + k;
            tableau[i][col] = Rational::one();
            identity[i] = col;
            artificial[col] = true;
        }
        costs.resize(ncols, Rational::zero());

        let mut is_basic = vec![false; ncols];
        for &col in &identity {
            is_basic[col] = true;
        }

        Ok(Simplex {
            lp,
            maps,
            costs,
            constant,
            tableau,
            rhs,
            reduced: vec![Rational::zero(); ncols],
            value: Rational::zero(),
            basis: identity.clone(),
            is_basic,
            forbidden: vec![false; ncols],
            artificial,
            identity,
            flipped,
            phase: Phase::Fresh,
            trace: Vec::new(),
        })
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    /// `(row, column)` of every pivot performed so far.
    pub fn pivot_trace(&self) -> &[(usize, usize)] {
        &self.trace
    }

    fn ncols(&self) -> usize {
        self.costs.len()
    }

    fn pivot(&mut self, r: usize, q: usize) {
        self.trace.push((r, q));
        let inv = self.tableau[r][q].recip();
        let nz: Vec<usize> = (0..self.ncols()).filter(|&j| !self.tableau[r][j].is_zero()).collect();
        {
            let row = &mut self.tableau[r];
            for &j in &nz {
                row[j] *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = std::mem::take(&mut self.tableau[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.tableau.len() {
            if i == r {
                continue;
            }
            let f = self.tableau[i][q].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.tableau[i];
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.reduced[j] -= &f * &pivot_row[j];
            }
            self.value += &f * &pivot_rhs;
        }
        self.tableau[r] = pivot_row;
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn load_costs(&mut self, costs: &[Rational]) {
        let n = self.ncols();
        let mut reduced = costs.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, d) in reduced.iter_mut().enumerate().take(n) {
                let a = &self.tableau[i][j];
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }

    // Bland iterations until optimal or unbounded.
    fn iterate(&mut self) -> LpStatus {
        loop {
            let entering =
                (0..self.ncols()).find(|&j| !self.is_basic[j] && !self.forbidden[j] && self.reduced[j].is_positive());
            let Some(q) = entering else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.tableau.len() {
                let a = &self.tableau[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => match ratio.cmp(best) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*r],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None => return LpStatus::Unbounded,
            }
        }
    }

    fn phase_one(&mut self) -> bool {
        self.phase = Phase::One;
        let costs: Vec<Rational> = (0..self.ncols())
            .map(|j| {
                if self.artificial[j] {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        self.load_costs(&costs);
        let status = self.iterate();
        debug_assert_eq!(status, LpStatus::Optimal, "phase one is bounded");
        if self.value.is_negative() {
            return false;
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..self.basis.len() {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            if let Some(q) =
                (0..self.ncols()).find(|&j| !self.artificial[j] && !self.is_basic[j] && !self.tableau[r][j].is_zero())
            {
                self.pivot(r, q);
            }
        }
        for j in 0..self.ncols() {
            if self.artificial[j] {
                self.forbidden[j] = true;
            }
        }
        true
    }

    /// Solves from the current state: a fresh tableau runs both phases, a
    /// warm one resumes phase two.
    pub fn solve(&mut self) -> LpSolution {
        let status = match self.phase {
            Phase::Fresh => {
                if self.phase_one() {
                    self.phase = Phase::Two;
                    let costs = self.costs.clone();
                    self.load_costs(&costs);
                    self.iterate()
                } else {
                    LpStatus::Infeasible
                }
            }
            Phase::Two | Phase::Done(LpStatus::Optimal) | Phase::Done(LpStatus::Unbounded) => self.iterate(),
            Phase::Done(LpStatus::Infeasible) => LpStatus::Infeasible,
            Phase::One => unreachable!("phase one never persists"),
        };
        self.phase = Phase::Done(status);
        let solution = self.extract(status);
        if cfg!(debug_assertions) && status == LpStatus::Optimal {
            if let Err(e) = solution.certify(&self.lp) {
                panic!("simplex produced an uncertified optimum: {e}");
            }
        }
        solution
    }

    fn extract(&self, status: LpStatus) -> LpSolution {
        let n = self.lp.num_vars();
        if status != LpStatus::Optimal {
            return LpSolution {
                status,
                values: vec![Rational::zero(); n],
                duals: vec![Rational::zero(); self.lp.num_rows()],
                objective: Rational::zero(),
                pivots: self.trace.len(),
            };
        }
        let mut col_value = vec![Rational::zero(); self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            col_value[b] = self.rhs[i].clone();
        }
        let values: Vec<Rational> = self
            .maps
            .iter()
            .map(|m| match m {
                VarMap::Shifted { col, offset } => offset + &col_value[*col],
                VarMap::Mirrored { col, offset } => offset - &col_value[*col],
                VarMap::Split { pos, neg } => &col_value[*pos] - &col_value[*neg],
            })
            .collect();
        let sense_sign = self.lp.sense == Sense::Minimize;
        let duals: Vec<Rational> = (0..self.lp.num_rows())
            .map(|i| {
                let mut y = -&self.reduced[self.identity[i]];
                if self.flipped[i] {
                    y = -y;
                }
                if sense_sign {
                    y = -y;
                }
                y
            })
            .collect();
        let objective: Rational = self.lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();
        debug_assert!({
            let internal = &self.value + &self.constant;
            if sense_sign {
                -internal == objective
            } else {
                internal == objective
            }
        });
        LpSolution {
            status,
            values,
            duals,
            objective,
            pivots: self.trace.len(),
        }
    }

    /// Appends a nonnegative column. After an optimal or unbounded solve the
    /// basis is kept and the next [`Simplex::solve`] resumes from it.
    pub fn add_column(&mut self, objective: Rational, coeffs: Vec<Rational>) -> Result<VarId, LpError> {
        let var = self.lp.add_column(objective.clone(), coeffs.clone())?;
        let internal_cost = if self.lp.sense == Sense::Maximize {
            objective
        } else {
            -objective
        };
        let m = self.tableau.len();
        // normalized entry per internal row (bound rows get zero)
        let mut entries = vec![Rational::zero(); m];
        for (i, a) in coeffs.into_iter().enumerate() {
            entries[i] = if self.flipped[i] { -a } else { a };
        }
        let col = self.ncols();
        let warm = matches!(
            self.phase,
            Phase::Two | Phase::Done(LpStatus::Optimal) | Phase::Done(LpStatus::Unbounded)
        );
        if warm {
            // B^-1 a from the identity columns
            let mut column = vec![Rational::zero(); m];
            let mut reduced = internal_cost.clone();
            for (i, a) in entries.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let id = self.identity[i];
                for (k, slot) in column.iter_mut().enumerate() {
                    let t = &self.tableau[k][id];
                    if !t.is_zero() {
                        *slot += a * t;
                    }
                }
                reduced += a * &self.reduced[id];
            }
            for (k, v) in column.into_iter().enumerate() {
                self.tableau[k].push(v);
            }
            self.reduced.push(reduced);
        } else {
            for (k, v) in entries.into_iter().enumerate() {
                self.tableau[k].push(v);
            }
            self.reduced.push(Rational::zero());
        }
        self.costs.push(internal_cost);
        self.is_basic.push(false);
        self.forbidden.push(false);
        self.artificial.push(false);
        self.maps.push(VarMap::Shifted {
            col,
            offset: Rational::zero(),
        });
        if warm {
            // a redundant row still held by an artificial at zero level
            for r in 0..m {
                if self.artificial[self.basis[r]] && !self.tableau[r][col].is_zero() {
                    self.pivot(r, col);
                    break;
                }
            }
        } else if self.phase == Phase::Done(LpStatus::Infeasible) {
            // more columns can restore feasibility; start over
            *self = Simplex::new(self.lp.clone())?;
        }
        Ok(var)
    }
}
