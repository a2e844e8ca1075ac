use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use ssg_core::experiment::{inducibility_row, mean, overopt_row, percentage, scalability_row, trial_game, trial_seed};
use ssg_core::instances::{example2_game, GeneratorConfig};
use ssg_core::{Rational, SecurityGame, SolveMode, SolverConfig};

use crate::solve::InputError;
use crate::GeneratorArgs;

const SIG: usize = 6;

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    Inducibility,
    Overopt,
    Scalability,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Fixture {
    Example2,
}

#[derive(Args)]
pub struct Options {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve a fixed game in every trial instead of random ones.
    #[arg(long, value_enum)]
    seed_fixture: Option<Fixture>,
    /// Target counts for the scalability sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
    sizes: Vec<usize>,
}

struct Setting {
    cfg: GeneratorConfig,
    fixture: Option<SecurityGame>,
}

impl Setting {
    fn game(&self, trial: usize) -> Result<(u64, SecurityGame)> {
        match &self.fixture {
            Some(g) => Ok((trial_seed(self.cfg.seed, trial), g.clone())),
            None => Ok(trial_game(&self.cfg, trial)?),
        }
    }

    fn prefix(&self, trial: &str, seed: &str) -> Vec<String> {
        let (n, s, l, r) = match &self.fixture {
            Some(g) => {
                let l = g.schedules().iter().map(Vec::len).max().unwrap_or(0);
                (g.n(), g.schedules().len(), l, g.num_resources())
            }
            None => (self.cfg.n, self.cfg.num_schedules, self.cfg.l, self.cfg.resources),
        };
        vec![
            trial.into(),
            seed.into(),
            n.to_string(),
            s.to_string(),
            l.to_string(),
            r.to_string(),
        ]
    }
}

const PREFIX: [&str; 6] = ["trial", "seed", "n", "num_schedules", "l", "resources"];

fn decimal(v: &Rational) -> String {
    v.to_decimal(SIG)
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

fn ms(v: f64) -> String {
    format!("{v:.3}")
}

fn mean_of(rows: &[Vec<String>], col: usize) -> String {
    let values: Vec<f64> = rows.iter().map(|r| r[col].parse::<f64>().unwrap_or(0.0)).collect();
    ms(values.iter().sum::<f64>() / values.len() as f64)
}

// Runs one trial per index on the pool and returns the rows in trial order.
fn collect<F>(pool: &rayon::ThreadPool, trials: usize, f: F) -> Result<Vec<Vec<String>>>
where
    F: Fn(usize) -> Result<Vec<String>> + Sync,
{
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

fn inducibility(
    pool: &rayon::ThreadPool,
    set: &Setting,
    trials: usize,
    config: &SolverConfig,
) -> Result<Vec<Vec<String>>> {
    let mut stats = Vec::new();
    let rows = collect(pool, trials, |trial| {
        let (seed, game) = set.game(trial)?;
        let row = inducibility_row(&game, config).with_context(|| format!("trial {trial}"))?;
        let mut out = set.prefix(&trial.to_string(), &seed.to_string());
        out.extend([
            row.inducible_targets.to_string(),
            row.inducible_elements.to_string(),
            row.elements.to_string(),
            decimal(&row.percentage),
            row.percentage.to_string(),
        ]);
        Ok(out)
    })?;
    if !rows.is_empty() {
        let pcts: Vec<Rational> = rows.iter().map(|r| r[10].parse().expect("own output")).collect();
        let count = |col: usize| -> Rational {
            let v: Vec<Rational> = rows.iter().map(|r| r[col].parse().expect("own output")).collect();
            mean(&v)
        };
        let mut agg = set.prefix("AGG", "");
        let avg = mean(&pcts);
        agg.extend([
            decimal(&count(6)),
            decimal(&count(7)),
            decimal(&count(8)),
            decimal(&avg),
            avg.to_string(),
        ]);
        stats.push(agg);
    }
    Ok(rows.into_iter().chain(stats).collect())
}

fn overopt(pool: &rayon::ThreadPool, set: &Setting, trials: usize, config: &SolverConfig) -> Result<Vec<Vec<String>>> {
    let results = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|trial| {
                let (seed, game) = set.game(trial)?;
                let row = overopt_row(&game, config).with_context(|| format!("trial {trial}"))?;
                Ok((trial, seed, row))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows: Vec<Vec<String>> = results
        .iter()
        .map(|(trial, seed, row)| {
            let mut out = set.prefix(&trial.to_string(), &seed.to_string());
            out.extend([
                decimal(&row.sse_u),
                decimal(&row.sse_g),
                decimal(&row.ise_g),
                flag(row.overoptimistic),
                flag(row.suboptimal),
                flag(row.degenerate),
            ]);
            out
        })
        .collect();
    if !results.is_empty() {
        let pick = |f: &dyn Fn(&ssg_core::experiment::OveroptRow) -> Rational| -> Rational {
            mean(&results.iter().map(|(_, _, r)| f(r)).collect::<Vec<_>>())
        };
        let share = |f: &dyn Fn(&ssg_core::experiment::OveroptRow) -> bool| -> Rational {
            percentage(&results.iter().map(|(_, _, r)| f(r)).collect::<Vec<_>>())
        };
        let mut agg = set.prefix("AGG", "");
        agg.extend([
            decimal(&pick(&|r| r.sse_u.clone())),
            decimal(&pick(&|r| r.sse_g.clone())),
            decimal(&pick(&|r| r.ise_g.clone())),
            decimal(&share(&|r| r.overoptimistic)),
            decimal(&share(&|r| r.suboptimal)),
            decimal(&share(&|r| r.degenerate)),
        ]);
        rows.push(agg);
    }
    Ok(rows)
}

fn scalability(
    pool: &rayon::ThreadPool,
    set: &Setting,
    trials: usize,
    config: &SolverConfig,
) -> Result<Vec<Vec<String>>> {
    let mut rows = collect(pool, trials, |trial| {
        let (seed, game) = set.game(trial)?;
        let row = scalability_row(&game, config).with_context(|| format!("trial {trial}"))?;
        let mut out = set.prefix(&trial.to_string(), &seed.to_string());
        out.extend([ms(row.sse_ms), ms(row.ise_ms), decimal(&row.sse_u), decimal(&row.ise_g)]);
        Ok(out)
    })?;
    if !rows.is_empty() {
        let mut agg = set.prefix("AGG", "");
        agg.extend([mean_of(&rows, 6), mean_of(&rows, 7), String::new(), String::new()]);
        rows.push(agg);
    }
    Ok(rows)
}

fn header(kind: Kind) -> Vec<&'static str> {
    let tail: &[&str] = match kind {
        Kind::Inducibility => &[
            "inducible_targets",
            "inducible_elements",
            "elements",
            "percentage",
            "percentage_exact",
        ],
        Kind::Overopt => &["sse_u", "sse_g", "ise_g", "overopt", "subopt", "degenerate"],
        Kind::Scalability => &["sse_ms", "ise_ms", "sse_u", "ise_g"],
    };
    PREFIX.iter().chain(tail).copied().collect()
}

pub fn run(kind: Kind, opts: &Options) -> Result<()> {
    let g = &opts.generator;
    let base = GeneratorConfig::new(g.seed, g.n, g.schedules, g.l, g.resources);
    let fixture = opts.seed_fixture.map(|Fixture::Example2| example2_game());
    let settings: Vec<Setting> = match kind {
        Kind::Scalability if fixture.is_none() => opts
            .sizes
            .iter()
            .map(|&n| Setting {
                cfg: GeneratorConfig { n, ..base.clone() },
                fixture: None,
            })
            .collect(),
        _ => vec![Setting { cfg: base, fixture }],
    };
    if settings.is_empty() {
        return Err(InputError("--sizes needs at least one value".into()).into());
    }
    for set in settings.iter().filter(|s| s.fixture.is_none()) {
        set.cfg.validate()?;
    }
    let config = match kind {
        Kind::Scalability => SolverConfig::with_mode(SolveMode::ColumnGeneration),
        _ => SolverConfig::default(),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build()?;

    let mut rows = Vec::new();
    for set in &settings {
        log::info!("running {} trials at n = {}", opts.trials, set.cfg.n);
        rows.extend(match kind {
            Kind::Inducibility => inducibility(&pool, set, opts.trials, &config)?,
            Kind::Overopt => overopt(&pool, set, opts.trials, &config)?,
            Kind::Scalability => scalability(&pool, set, opts.trials, &config)?,
        });
    }

    let sink: Box<dyn Write> = match &opts.out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(header(kind))?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}
