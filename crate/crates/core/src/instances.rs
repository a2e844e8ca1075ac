//! Instance generators and the game file format.

use std::collections::HashMap;
use std::path::Path;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::game_model::{GameError, SecurityGame, Target, TargetPayoffs};
use crate::rational::Rational;
use crate::rng::SplitMix64;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("subset closure refused for l = {0}; at most 4 targets per schedule")]
    ClosureTooLarge(usize),
    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed game file at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid game: {0}")]
    Game(#[from] GameError),
}

/// Parameters of the random instance protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub num_schedules: usize,
    /// Targets per schedule.
    pub l: usize,
    pub resources: usize,
    /// Inclusive range for `def_cov` and `att_unc`.
    pub reward_range: (i64, i64),
    /// Inclusive range for `def_unc` and `att_cov`.
    pub penalty_range: (i64, i64),
}

impl GeneratorConfig {
    pub fn new(seed: u64, n: usize, num_schedules: usize, l: usize, resources: usize) -> Self {
        GeneratorConfig {
            seed,
            n,
            num_schedules,
            l,
            resources,
            reward_range: (0, 5),
            penalty_range: (-5, 0),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorConfig { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::InvalidConfig(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.num_schedules == 0 {
            return bad("at least one schedule is required".into());
        }
        if self.l == 0 || self.l > self.n {
            return bad(format!("l = {} must lie in 1..={}", self.l, self.n));
        }
        if self.l.saturating_mul(self.num_schedules) < self.n {
            return bad(format!(
                "{} schedules of {} targets cannot cover {} targets",
                self.num_schedules, self.l, self.n
            ));
        }
        let (rlo, rhi) = self.reward_range;
        let (plo, phi) = self.penalty_range;
        if rlo > rhi || plo > phi {
            return bad("payoff ranges must be nonempty".into());
        }
        if rlo < 0 || phi > 0 {
            return bad("rewards must be nonnegative and penalties nonpositive".into());
        }
        if rhi <= plo {
            return bad("ranges leave no strict reward/penalty pair".into());
        }
        Ok(())
    }
}

fn draw_pair(rng: &mut SplitMix64, cfg: &GeneratorConfig) -> (i64, i64) {
    loop {
        let reward = rng.range(cfg.reward_range.0, cfg.reward_range.1);
        let penalty = rng.range(cfg.penalty_range.0, cfg.penalty_range.1);
        if reward > penalty {
            return (reward, penalty);
        }
    }
}

fn random_parts(cfg: &GeneratorConfig) -> Result<(Vec<TargetPayoffs>, Vec<Vec<Target>>), InstanceError> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut payoffs = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let (def_cov, def_unc) = draw_pair(&mut rng, cfg);
        let (att_unc, att_cov) = draw_pair(&mut rng, cfg);
        payoffs.push(TargetPayoffs::new(
            Rational::from_integer(def_cov),
            Rational::from_integer(def_unc),
            Rational::from_integer(att_cov),
            Rational::from_integer(att_unc),
        ));
    }
    // every target lands in some schedule first, then each schedule is
    // topped up to l distinct targets
    let mut order: Vec<Target> = (0..cfg.n).collect();
    rng.shuffle(&mut order);
    let mut sets = vec![FixedBitSet::with_capacity(cfg.n); cfg.num_schedules];
    for (i, &t) in order.iter().enumerate() {
        sets[i % cfg.num_schedules].insert(t);
    }
    for set in &mut sets {
        let mut pool: Vec<Target> = (0..cfg.n).filter(|&t| !set.contains(t)).collect();
        let missing = cfg.l - set.count_ones(..);
        for k in 0..missing {
            let j = k + rng.below((pool.len() - k) as u64) as usize;
            pool.swap(k, j);
            set.insert(pool[k]);
        }
    }
    let schedules = sets.iter().map(|s| s.ones().collect()).collect();
    Ok((payoffs, schedules))
}

/// A random game: integer payoffs drawn uniformly from the configured
/// ranges (redrawn until strict), `num_schedules` schedules of exactly `l`
/// targets covering every target, and homogeneous resources.
pub fn random_game(cfg: &GeneratorConfig) -> Result<SecurityGame, InstanceError> {
    let (payoffs, schedules) = random_parts(cfg)?;
    Ok(SecurityGame::homogeneous(payoffs, schedules, cfg.resources)?)
}

/// Like [`random_game`], with the schedules closed under nonempty subsets.
pub fn random_ssas_game(cfg: &GeneratorConfig) -> Result<SecurityGame, InstanceError> {
    if cfg.l > 4 {
        return Err(InstanceError::ClosureTooLarge(cfg.l));
    }
    let (payoffs, base) = random_parts(cfg)?;
    let mut seen: HashMap<Vec<Target>, ()> = HashMap::new();
    let mut closed = Vec::new();
    for schedule in &base {
        let k = schedule.len();
        for mask in 1u32..(1 << k) {
            let subset: Vec<Target> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| schedule[i]).collect();
            if seen.insert(subset.clone(), ()).is_none() {
                closed.push(subset);
            }
        }
    }
    Ok(SecurityGame::homogeneous(payoffs, closed, cfg.resources)?)
}

/// The four-target, one-resource game in which SSE and ISE disagree.
pub fn example2_game() -> SecurityGame {
    let r = Rational::from_integer;
    let rows = [(1, -1, -1, 1), (100, 0, -2, 2), (2, -2, -3, 3), (30, -3, -8, 4)];
    let payoffs = rows
        .iter()
        .map(|&(dc, du, ac, au)| TargetPayoffs::new(r(dc), r(du), r(ac), r(au)))
        .collect();
    SecurityGame::homogeneous(payoffs, vec![vec![0, 1, 2], vec![3]], 1).expect("fixture is valid")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    n: usize,
    targets: Vec<TargetPayoffs>,
    schedules: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resources: Option<Vec<ResourceFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    homogeneous: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResourceFile {
    allowed: Vec<usize>,
}

fn schema_error(path: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Parses a game from JSON. Repeated schedules are merged into their first
/// occurrence (with a warning) and resource allowed sets renumbered.
pub fn from_json_str(text: &str) -> Result<SecurityGame, InstanceError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: GameFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        schema_error(&path, e.into_inner().to_string())
    })?;
    if file.n != file.targets.len() {
        return Err(schema_error(
            "n",
            format!("n = {} but {} targets are listed", file.n, file.targets.len()),
        ));
    }
    let allowed: Vec<Vec<usize>> = match (file.resources, file.homogeneous) {
        (Some(_), Some(_)) => return Err(schema_error(".", "give either resources or homogeneous, not both")),
        (None, None) => return Err(schema_error(".", "missing resources (or the homogeneous shorthand)")),
        (Some(rs), None) => rs.into_iter().map(|r| r.allowed).collect(),
        (None, Some(k)) => vec![(0..file.schedules.len()).collect(); k],
    };
    let mut first_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut remap = Vec::with_capacity(file.schedules.len());
    let mut schedules = Vec::new();
    for (s, targets) in file.schedules.into_iter().enumerate() {
        let mut key = targets.clone();
        key.sort_unstable();
        match first_of.get(&key) {
            Some(&kept) => {
                log::warn!("schedule {s} repeats schedule {kept}; merged");
                remap.push(remap[kept]);
            }
            None => {
                first_of.insert(key, s);
                remap.push(schedules.len());
                schedules.push(targets);
            }
        }
    }
    let resources = allowed
        .into_iter()
        .enumerate()
        .map(|(r, list)| {
            list.into_iter()
                .map(|s| {
                    remap.get(s).copied().ok_or(GameError::ScheduleIndexOutOfRange {
                        resource: r,
                        schedule: s,
                        count: remap.len(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SecurityGame::new(file.targets, schedules, resources)?)
}

/// Pretty JSON with every resource listed explicitly.
pub fn to_json_string(game: &SecurityGame) -> String {
    let file = GameFile {
        n: game.n(),
        targets: game.payoffs().to_vec(),
        schedules: game.schedules().to_vec(),
        resources: Some(
            game.resources()
                .iter()
                .map(|a| ResourceFile { allowed: a.clone() })
                .collect(),
        ),
        homogeneous: None,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("game serializes");
    text.push('\n');
    text
}

pub fn load(path: impl AsRef<Path>) -> Result<SecurityGame, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json_str(&text)
}

pub fn save(game: &SecurityGame, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(game)).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })
}
