//! Computes PTE, ASP and TTP for a set of inputs and prints the table the
//! `metrics` subcommand shows.

use std::time::Duration;

use hybrid_taf::metrics::{asp_exact, compute, MetricsInput, MetricsTable};

fn main() {
    let input = MetricsInput {
        requirements_met: 4,
        requirements_unmet: 1,
        total_operations: 180,
        scripting_effort: Duration::from_secs(30 * 60),
        total_test_time: Duration::from_secs(9 * 60),
        total_steps: 220,
    };
    let summary = compute(input.clone()).unwrap();
    println!("{}", MetricsTable(&summary));
    println!(
        "\nexact ASP before rounding: {}",
        asp_exact(input.total_operations, input.scripting_effort).unwrap()
    );

    let bad = MetricsInput {
        scripting_effort: Duration::ZERO,
        total_steps: 0,
        ..input
    };
    match compute(bad) {
        Err(errors) => println!("rejected: {errors}"),
        Ok(_) => unreachable!(),
    }
}
