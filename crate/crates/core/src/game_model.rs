//! Security game model: payoffs, schedules, joint schedules, mixed
//! strategies and the attacker's best-response structure.

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Zero-based target index.
pub type Target = usize;

/// Payoffs of one target, from both players' points of view.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetPayoffs {
    /// Defender utility when the attacked target is covered.
    pub def_cov: Rational,
    /// Defender utility when the attacked target is not covered.
    pub def_unc: Rational,
    /// Attacker utility when the attacked target is covered.
    pub att_cov: Rational,
    /// Attacker utility when the attacked target is not covered.
    pub att_unc: Rational,
}

impl TargetPayoffs {
    pub fn new(
        def_cov: impl Into<Rational>,
        def_unc: impl Into<Rational>,
        att_cov: impl Into<Rational>,
        att_unc: impl Into<Rational>,
    ) -> Self {
        TargetPayoffs {
            def_cov: def_cov.into(),
            def_unc: def_unc.into(),
            att_cov: att_cov.into(),
            att_unc: att_unc.into(),
        }
    }

    pub fn defender_at(&self, coverage: &Rational) -> Rational {
        &self.def_unc + coverage * (&self.def_cov - &self.def_unc)
    }

    pub fn attacker_at(&self, coverage: &Rational) -> Rational {
        &self.att_unc + coverage * (&self.att_cov - &self.att_unc)
    }

    /// `att_cov - att_unc`, always negative.
    pub fn attacker_slope(&self) -> Rational {
        &self.att_cov - &self.att_unc
    }

    /// `def_cov - def_unc`, always positive.
    pub fn defender_slope(&self) -> Rational {
        &self.def_cov - &self.def_unc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("a game needs at least one target")]
    NoTargets,
    #[error("target {target}: def_cov ({cov}) must exceed def_unc ({unc})")]
    DefenderPayoffOrder {
        target: Target,
        cov: Rational,
        unc: Rational,
    },
    #[error("target {target}: att_unc ({unc}) must exceed att_cov ({cov})")]
    AttackerPayoffOrder {
        target: Target,
        cov: Rational,
        unc: Rational,
    },
    #[error("schedule {0} is empty")]
    EmptySchedule(usize),
    #[error("schedule {schedule}: target {target} out of range (n = {n})")]
    ScheduleTargetOutOfRange { schedule: usize, target: Target, n: usize },
    #[error("schedule {schedule}: target {target} listed twice")]
    DuplicateTarget { schedule: usize, target: Target },
    #[error("resource {resource}: schedule index {schedule} out of range ({count} schedules)")]
    ScheduleIndexOutOfRange {
        resource: usize,
        schedule: usize,
        count: usize,
    },
    #[error("target {target} out of range (n = {n})")]
    TargetOutOfRange { target: Target, n: usize },
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// A security game with resource assignment constraints.
///
/// Each resource may be assigned to at most one schedule from its allowed
/// set; a schedule covers every target it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecurityGame {
    payoffs: Vec<TargetPayoffs>,
    schedules: Vec<Vec<Target>>,
    schedule_sets: Vec<FixedBitSet>,
    resources: Vec<Vec<usize>>,
}

impl SecurityGame {
    /// Validates and builds a game. Schedule target lists are sorted and
    /// allowed-schedule lists are sorted and deduplicated.
    pub fn new(
        payoffs: Vec<TargetPayoffs>,
        schedules: Vec<Vec<Target>>,
        resources: Vec<Vec<usize>>,
    ) -> Result<Self, GameError> {
        let n = payoffs.len();
        if n == 0 {
            return Err(GameError::NoTargets);
        }
        for (t, p) in payoffs.iter().enumerate() {
            if p.def_cov <= p.def_unc {
                return Err(GameError::DefenderPayoffOrder {
                    target: t,
                    cov: p.def_cov.clone(),
                    unc: p.def_unc.clone(),
                });
            }
            if p.att_unc <= p.att_cov {
                return Err(GameError::AttackerPayoffOrder {
                    target: t,
                    cov: p.att_cov.clone(),
                    unc: p.att_unc.clone(),
                });
            }
        }
        let mut sorted = Vec::with_capacity(schedules.len());
        let mut sets = Vec::with_capacity(schedules.len());
        for (s, targets) in schedules.into_iter().enumerate() {
            if targets.is_empty() {
                return Err(GameError::EmptySchedule(s));
            }
            let mut set = FixedBitSet::with_capacity(n);
            for &t in &targets {
                if t >= n {
                    return Err(GameError::ScheduleTargetOutOfRange {
                        schedule: s,
                        target: t,
                        n,
                    });
                }
                if set.contains(t) {
                    return Err(GameError::DuplicateTarget { schedule: s, target: t });
                }
                set.insert(t);
            }
            sorted.push(set.ones().collect());
            sets.push(set);
        }
        let mut allowed_lists = Vec::with_capacity(resources.len());
        for (r, mut allowed) in resources.into_iter().enumerate() {
            for &s in &allowed {
                if s >= sorted.len() {
                    return Err(GameError::ScheduleIndexOutOfRange {
                        resource: r,
                        schedule: s,
                        count: sorted.len(),
                    });
                }
            }
            allowed.sort_unstable();
            allowed.dedup();
            allowed_lists.push(allowed);
        }
        Ok(SecurityGame {
            payoffs,
            schedules: sorted,
            schedule_sets: sets,
            resources: allowed_lists,
        })
    }

    /// `count` identical resources that may each take any schedule.
    pub fn homogeneous(
        payoffs: Vec<TargetPayoffs>,
        schedules: Vec<Vec<Target>>,
        count: usize,
    ) -> Result<Self, GameError> {
        let all: Vec<usize> = (0..schedules.len()).collect();
        Self::new(payoffs, schedules, vec![all; count])
    }

    pub fn n(&self) -> usize {
        self.payoffs.len()
    }

    pub fn payoffs(&self) -> &[TargetPayoffs] {
        &self.payoffs
    }

    pub fn payoff(&self, t: Target) -> &TargetPayoffs {
        &self.payoffs[t]
    }

    pub fn schedules(&self) -> &[Vec<Target>] {
        &self.schedules
    }

    pub fn schedule_set(&self, s: usize) -> &FixedBitSet {
        &self.schedule_sets[s]
    }

    pub fn resources(&self) -> &[Vec<usize>] {
        &self.resources
    }

    pub fn num_resources(&self) -> usize {
        self.resources.len()
    }

    /// Same schedules and resources with new payoffs.
    pub fn with_payoffs(&self, payoffs: Vec<TargetPayoffs>) -> Result<Self, GameError> {
        Self::new(payoffs, self.schedules.clone(), self.resources.clone())
    }

    /// True if every payoff parameter is an integer.
    pub fn has_integer_payoffs(&self) -> bool {
        self.payoffs.iter().all(|p| {
            p.def_cov.is_integer() && p.def_unc.is_integer() && p.att_cov.is_integer() && p.att_unc.is_integer()
        })
    }

    /// Indices of the schedules containing `t`.
    pub fn schedules_covering(&self, t: Target) -> Vec<usize> {
        (0..self.schedules.len())
            .filter(|&s| self.schedule_sets[s].contains(t))
            .collect()
    }

    /// Whether some resource can be assigned a schedule containing `t`.
    pub fn coverable(&self, t: Target) -> bool {
        self.resources
            .iter()
            .any(|allowed| allowed.iter().any(|&s| self.schedule_sets[s].contains(t)))
    }

    fn check_target(&self, t: Target) -> Result<(), GameError> {
        if t < self.n() {
            Ok(())
        } else {
            Err(GameError::TargetOutOfRange { target: t, n: self.n() })
        }
    }
}

/// A pure defender strategy: each resource takes at most one of its
/// allowed schedules. `column[t]` is set iff some assigned schedule covers
/// `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointSchedule {
    assignment: Vec<Option<usize>>,
    column: FixedBitSet,
}

impl JointSchedule {
    pub fn new(game: &SecurityGame, assignment: Vec<Option<usize>>) -> Result<Self, GameError> {
        if assignment.len() != game.num_resources() {
            return Err(GameError::InvalidStrategy(format!(
                "assignment has {} entries for {} resources",
                assignment.len(),
                game.num_resources()
            )));
        }
        let mut column = FixedBitSet::with_capacity(game.n());
        for (r, choice) in assignment.iter().enumerate() {
            if let Some(s) = *choice {
                if game.resources[r].binary_search(&s).is_err() {
                    return Err(GameError::InvalidStrategy(format!(
                        "resource {r} cannot take schedule {s}"
                    )));
                }
                column.union_with(&game.schedule_sets[s]);
            }
        }
        Ok(JointSchedule { assignment, column })
    }

    /// Every resource unassigned.
    pub fn empty(game: &SecurityGame) -> Self {
        JointSchedule {
            assignment: vec![None; game.num_resources()],
            column: FixedBitSet::with_capacity(game.n()),
        }
    }

    pub(crate) fn from_parts(assignment: Vec<Option<usize>>, column: FixedBitSet) -> Self {
        JointSchedule { assignment, column }
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn column(&self) -> &FixedBitSet {
        &self.column
    }

    pub fn covers(&self, t: Target) -> bool {
        self.column.contains(t)
    }

    /// Covered targets in ascending order.
    pub fn covered(&self) -> Vec<Target> {
        self.column.ones().collect()
    }

    pub fn is_feasible_for(&self, game: &SecurityGame) -> bool {
        JointSchedule::new(game, self.assignment.clone()).is_ok_and(|js| js.column == self.column)
    }
}

impl fmt::Display for JointSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match a {
                Some(s) => write!(f, "s{s}")?,
                None => write!(f, "-")?,
            }
        }
        write!(f, "]")
    }
}

/// Probability distribution over joint schedules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStrategy {
    support: Vec<(JointSchedule, Rational)>,
}

impl MixedStrategy {
    /// Zero-probability entries are dropped and repeated joint schedules
    /// merged; probabilities must be nonnegative and sum to exactly one.
    pub fn new(game: &SecurityGame, entries: Vec<(JointSchedule, Rational)>) -> Result<Self, GameError> {
        let mut support: Vec<(JointSchedule, Rational)> = Vec::with_capacity(entries.len());
        let mut total = Rational::zero();
        for (js, p) in entries {
            if p.is_negative() {
                return Err(GameError::InvalidStrategy(format!("negative probability {p} on {js}")));
            }
            if !js.is_feasible_for(game) {
                return Err(GameError::InvalidStrategy(format!(
                    "joint schedule {js} is not feasible"
                )));
            }
            total += &p;
            if p.is_zero() {
                continue;
            }
            if let Some(entry) = support.iter_mut().find(|(j, _)| *j == js) {
                entry.1 += &p;
            } else {
                support.push((js, p));
            }
        }
        if total != Rational::one() {
            return Err(GameError::InvalidStrategy(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(MixedStrategy { support })
    }

    pub(crate) fn from_support_unchecked(support: Vec<(JointSchedule, Rational)>) -> Self {
        MixedStrategy { support }
    }

    pub fn pure(js: JointSchedule) -> Self {
        MixedStrategy {
            support: vec![(js, Rational::one())],
        }
    }

    pub fn support(&self) -> &[(JointSchedule, Rational)] {
        &self.support
    }

    /// Probability placed on `js` (zero if absent).
    pub fn probability(&self, js: &JointSchedule) -> Rational {
        self.support
            .iter()
            .find(|(j, _)| j == js)
            .map(|(_, p)| p.clone())
            .unwrap_or_default()
    }
}

/// Marginal coverage probability of every target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageVector(pub Vec<Rational>);

impl CoverageVector {
    pub fn zeros(n: usize) -> Self {
        CoverageVector(vec![Rational::zero(); n])
    }

    pub fn get(&self, t: Target) -> &Rational {
        &self.0[t]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `c_t = Σ_j P_jt x_j`.
pub fn coverage_of(game: &SecurityGame, x: &MixedStrategy) -> Result<CoverageVector, GameError> {
    for (js, _) in &x.support {
        if !js.is_feasible_for(game) {
            return Err(GameError::InvalidStrategy(format!(
                "joint schedule {js} is not feasible for this game"
            )));
        }
    }
    Ok(coverage_unchecked(game.n(), x))
}

pub(crate) fn coverage_unchecked(n: usize, x: &MixedStrategy) -> CoverageVector {
    let mut c = CoverageVector::zeros(n);
    for (js, p) in &x.support {
        for t in js.column.ones() {
            c.0[t] += p;
        }
    }
    c
}

pub fn attacker_utility(game: &SecurityGame, c: &CoverageVector, t: Target) -> Rational {
    game.payoffs[t].attacker_at(&c.0[t])
}

pub fn defender_utility(game: &SecurityGame, c: &CoverageVector, t: Target) -> Rational {
    game.payoffs[t].defender_at(&c.0[t])
}

/// Expected attacker utility against a mixed attack `a` (one weight per target).
pub fn attacker_utility_mixed(game: &SecurityGame, c: &CoverageVector, a: &[Rational]) -> Rational {
    a.iter()
        .enumerate()
        .map(|(t, w)| w * attacker_utility(game, c, t))
        .sum()
}

/// Expected defender utility against a mixed attack `a`.
pub fn defender_utility_mixed(game: &SecurityGame, c: &CoverageVector, a: &[Rational]) -> Rational {
    a.iter()
        .enumerate()
        .map(|(t, w)| w * defender_utility(game, c, t))
        .sum()
}

/// Bounds-checked form of [`attacker_utility`].
pub fn attacker_utility_checked(game: &SecurityGame, c: &CoverageVector, t: Target) -> Result<Rational, GameError> {
    game.check_target(t)?;
    Ok(attacker_utility(game, c, t))
}

/// The attacker's best responses, in ascending order. Never empty.
pub fn attack_set(game: &SecurityGame, c: &CoverageVector) -> Vec<Target> {
    let utilities: Vec<Rational> = (0..game.n()).map(|t| attacker_utility(game, c, t)).collect();
    let best = utilities.iter().max().expect("at least one target").clone();
    (0..game.n()).filter(|&t| utilities[t] == best).collect()
}

/// Defender values under favourable and unfavourable tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreak {
    pub strong: Rational,
    pub strong_target: Target,
    pub weak: Rational,
    pub weak_target: Target,
}

/// Strong (`max`) and weak (`min`) defender utility over the attack set;
/// residual ties go to the lowest target index.
pub fn tie_break_values(game: &SecurityGame, c: &CoverageVector) -> TieBreak {
    let gamma = attack_set(game, c);
    let mut strong: Option<(Rational, Target)> = None;
    let mut weak: Option<(Rational, Target)> = None;
    for &t in &gamma {
        let u = defender_utility(game, c, t);
        if strong.as_ref().is_none_or(|(v, _)| u > *v) {
            strong = Some((u.clone(), t));
        }
        if weak.as_ref().is_none_or(|(v, _)| u < *v) {
            weak = Some((u, t));
        }
    }
    let (strong, strong_target) = strong.expect("nonempty attack set");
    let (weak, weak_target) = weak.expect("nonempty attack set");
    TieBreak {
        strong,
        strong_target,
        weak,
        weak_target,
    }
}

/// Whether `t` and `u` give the attacker the same utility under every
/// defender strategy: equal attacker payoffs and the same covering
/// schedules.
pub fn identical(game: &SecurityGame, t: Target, u: Target) -> bool {
    let (a, b) = (&game.payoffs[t], &game.payoffs[u]);
    a.att_cov == b.att_cov
        && a.att_unc == b.att_unc
        && game.schedule_sets.iter().all(|s| s.contains(t) == s.contains(u))
}

/// A maximal class of mutually identical targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    /// Members in ascending order.
    pub targets: Vec<Target>,
    /// Filled in by the inducibility computation.
    pub inducible: Option<bool>,
}

impl Element {
    pub fn representative(&self) -> Target {
        self.targets[0]
    }
}

/// Partition of the targets into elements, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementPartition {
    elements: Vec<Element>,
    element_of: Vec<usize>,
}

impl ElementPartition {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> &Element {
        &self.elements[e]
    }

    pub fn element_of(&self, t: Target) -> usize {
        self.element_of[t]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn set_inducible(&mut self, e: usize, inducible: bool) {
        self.elements[e].inducible = Some(inducible);
    }

    /// Ids of the elements flagged inducible.
    pub fn inducible(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&e| self.elements[e].inducible == Some(true))
            .collect()
    }

    /// True when every element is a single target.
    pub fn all_singletons(&self) -> bool {
        self.elements.iter().all(|e| e.targets.len() == 1)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index becomes the root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

pub fn element_partition(game: &SecurityGame) -> ElementPartition {
    let n = game.n();
    let mut uf = UnionFind::new(n);
    for t in 0..n {
        for u in (t + 1)..n {
            if uf.find(t) != uf.find(u) && identical(game, t, u) {
                uf.union(t, u);
            }
        }
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut root_to_element = vec![usize::MAX; n];
    let mut element_of = Vec::with_capacity(n);
    for t in 0..n {
        let root = uf.find(t);
        if root_to_element[root] == usize::MAX {
            root_to_element[root] = elements.len();
            elements.push(Element {
                targets: Vec::new(),
                inducible: None,
            });
        }
        let e = root_to_element[root];
        elements[e].targets.push(t);
        element_of.push(e);
    }
    ElementPartition { elements, element_of }
}

/// Elements lying entirely inside the attack set, in ascending id order.
pub fn element_attack_set(game: &SecurityGame, partition: &ElementPartition, c: &CoverageVector) -> Vec<usize> {
    let gamma: HashSet<Target> = attack_set(game, c).into_iter().collect();
    (0..partition.len())
        .filter(|&e| partition.elements[e].targets.iter().all(|t| gamma.contains(t)))
        .collect()
}

/// `(min_{t∈e} U_d(c,t), U_a(c,t))` for an element `e`.
pub fn element_utilities(game: &SecurityGame, c: &CoverageVector, element: &Element) -> (Rational, Rational) {
    let def = element
        .targets
        .iter()
        .map(|&t| defender_utility(game, c, t))
        .min()
        .expect("elements are nonempty");
    let att = attacker_utility(game, c, element.representative());
    (def, att)
}

/// Whether every nonempty subset of every schedule is itself a schedule,
/// both in `S` and within each resource's allowed set. The empty schedule
/// is represented by leaving a resource unassigned.
pub fn ssas_check(game: &SecurityGame) -> bool {
    let closed = |family: &[usize]| -> bool {
        let present: HashSet<&FixedBitSet> = family.iter().map(|&s| &game.schedule_sets[s]).collect();
        // single-element removal closure implies closure under all subsets
        family.iter().all(|&s| {
            let set = &game.schedule_sets[s];
            if set.count_ones(..) < 2 {
                return true;
            }
            set.ones().all(|t| {
                let mut smaller = set.clone();
                smaller.set(t, false);
                present.contains(&smaller)
            })
        })
    };
    let everything: Vec<usize> = (0..game.schedules.len()).collect();
    closed(&everything) && game.resources.iter().all(|allowed| closed(allowed))
}
