use std::io::Write;

use anyhow::{Context, Result};
use ssg_core::instances::{random_game, random_ssas_game, save, to_json_string, GeneratorConfig};

use crate::GenArgs;

pub fn run(args: &GenArgs) -> Result<()> {
    let g = &args.generator;
    let cfg = GeneratorConfig::new(g.seed, g.n, g.schedules, g.l, g.resources);
    let game = if args.ssas {
        random_ssas_game(&cfg)
    } else {
        random_game(&cfg)
    }
    .context("generating game")?;
    match &args.out {
        Some(path) => save(&game, path)?,
        None => write!(std::io::stdout().lock(), "{}", to_json_string(&game))?,
    }
    Ok(())
}
