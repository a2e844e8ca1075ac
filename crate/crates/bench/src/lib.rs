//! Shared inputs for the solver benchmarks.

use ssg_core::instances::{random_game, GeneratorConfig};
use ssg_core::lp_exact::{Bounds, LinearProgram, Relation, Sense};
use ssg_core::{Rational, SecurityGame};

/// Random game at the given size; panics on an invalid configuration.
pub fn game(seed: u64, n: usize, schedules: usize, l: usize, resources: usize) -> SecurityGame {
    random_game(&GeneratorConfig::new(seed, n, schedules, l, resources)).expect("valid benchmark config")
}

/// Dense packing LP: maximize the sum of `vars` variables under `rows`
/// rows with small positive coefficients.
pub fn packing_lp(vars: usize, rows: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Maximize);
    for _ in 0..vars {
        lp.add_variable(Rational::one(), Bounds::nonnegative()).expect("bounds");
    }
    for i in 0..rows {
        let coeffs = (0..vars)
            .map(|j| Rational::from_integer(1 + ((i * 7 + j * 3) % 5) as i64))
            .collect();
        lp.add_row(coeffs, Relation::Le, Rational::from_integer(10 + i as i64))
            .expect("row");
    }
    lp
}
