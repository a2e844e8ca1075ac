use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Subcommand;
use serde_json::{json, Value};
use ssg_core::equilibria::{strategy_from_json, strategy_to_json};
use ssg_core::game_model::ssas_check;
use ssg_core::instances::load;
use ssg_core::{Rational, SecurityGame, SolveMode, Solver, SolverConfig};

/// Bad command input other than the game file itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Subcommand)]
pub enum Query {
    /// Strong Stackelberg equilibrium.
    Sse { game: PathBuf },
    /// Inducible Stackelberg equilibrium.
    Ise { game: PathBuf },
    /// Utility guarantee of a strategy file.
    Guarantee {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Inducibility of one target, of every element, or of every target.
    Inducible {
        game: PathBuf,
        /// Target number, counting from 1.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "elements")]
        target: Option<u64>,
        #[arg(long)]
        elements: bool,
    },
    /// Whether every nonempty subset of a schedule is a schedule.
    SsasCheck { game: PathBuf },
    /// Inducibility of a target through the SSE reduction.
    Reduce {
        game: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        target: u64,
    },
}

fn exact(v: &Rational) -> Value {
    json!({ "exact": v.to_string(), "decimal": v.to_decimal(6) })
}

fn target_index(game: &SecurityGame, k: u64) -> Result<usize> {
    let t = k as usize - 1;
    if t >= game.n() {
        return Err(InputError(format!("target {k} out of range; the game has {} targets", game.n())).into());
    }
    Ok(t)
}

fn load_game(path: &Path) -> Result<SecurityGame> {
    Ok(load(path)?)
}

pub fn run(query: Query, mode: SolveMode) -> Result<()> {
    let config = SolverConfig::with_mode(mode);
    let report = match query {
        Query::Sse { game } => {
            let game = load_game(&game)?;
            let solver = Solver::new(&game, config)?;
            solver.sse()?.to_json(solver.partition())
        }
        Query::Ise { game } => {
            let game = load_game(&game)?;
            let solver = Solver::new(&game, config)?;
            solver.ise()?.to_json(solver.partition())
        }
        Query::Guarantee { game, strategy } => {
            let game = load_game(&game)?;
            let text = std::fs::read_to_string(&strategy).with_context(|| format!("reading {}", strategy.display()))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", strategy.display())))?;
            let x = strategy_from_json(&game, &value).with_context(|| format!("strategy {}", strategy.display()))?;
            let solver = Solver::new(&game, config)?;
            let mut report = solver.utility_guarantee(&x)?.to_json(solver.partition());
            report["strategy"] = strategy_to_json(&x);
            report
        }
        Query::Inducible {
            game, target: Some(k), ..
        } => {
            let game = load_game(&game)?;
            let t = target_index(&game, k)?;
            let solver = Solver::new(&game, config)?;
            let (inducible, witness) = solver.inducible_target(t)?;
            json!({
                "target": k,
                "inducible": inducible,
                "witness": witness.as_ref().map(strategy_to_json),
            })
        }
        Query::Inducible {
            game,
            target: None,
            elements,
        } => {
            let game = load_game(&game)?;
            let solver = Solver::new(&game, config)?;
            let partition = solver.inducible_elements();
            if elements {
                let list: Vec<Value> = partition
                    .elements()
                    .iter()
                    .map(|e| {
                        json!({
                            "targets": e.targets.iter().map(|t| t + 1).collect::<Vec<_>>(),
                            "inducible": e.inducible == Some(true),
                        })
                    })
                    .collect();
                let singles = partition
                    .elements()
                    .iter()
                    .filter(|e| e.targets.len() == 1 && e.inducible == Some(true))
                    .count();
                json!({
                    "elements": list,
                    "inducible_elements": partition.inducible().len(),
                    "inducible_targets": singles,
                    "percentage": exact(&Rational::new(100 * singles as i64, game.n() as i64)),
                })
            } else {
                let flags: Vec<Value> = (0..game.n())
                    .map(|t| {
                        let e = partition.element(partition.element_of(t));
                        json!({
                            "target": t + 1,
                            "inducible": e.targets.len() == 1 && e.inducible == Some(true),
                        })
                    })
                    .collect();
                json!({ "targets": flags })
            }
        }
        Query::SsasCheck { game } => {
            let game = load_game(&game)?;
            json!({ "ssas": ssas_check(&game) })
        }
        Query::Reduce { game, target } => {
            let game = load_game(&game)?;
            let t = target_index(&game, target)?;
            let solver = Solver::new(&game, config)?;
            json!({ "target": target, "inducible": solver.inducibility_via_reduction(t)? })
        }
    };
    writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}
