//! Evaluation metrics over a run: automation scripting productivity (ASP),
//! performance test efficiency (PTE) and test time performance (TTP).
//!
//! All arithmetic is exact over rationals built from integer nanoseconds
//! and counts; values are rounded to hundredths only at the end.
//!
//! * ASP = operations / scripting effort in hours
//! * PTE = 100 * met / (met + unmet)
//! * TTP = 100 * test time in minutes / steps. The unit is "% minutes per
//!   step"; lower is faster.

use std::fmt;
use std::time::Duration;

use num_rational::Ratio;
use thiserror::Error;

use crate::decimal::Centi;
use crate::model::RunResult;
use crate::report::RunData;

const NANOS_PER_HOUR: u128 = 3_600_000_000_000;
const NANOS_PER_MINUTE: u128 = 60_000_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    #[error("scripting effort must be positive")]
    ZeroEffort,
    #[error("no requirements: met + unmet is zero")]
    NoRequirements,
    #[error("test run has zero steps")]
    ZeroSteps,
}

/// Every metric that could not be computed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct MetricsErrors(pub Vec<MetricsError>);

/// Requirement counts before and after performance testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Requirements {
    pub met: u64,
    pub unmet: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsInput {
    pub requirements_met: u64,
    pub requirements_unmet: u64,
    pub total_operations: u64,
    pub scripting_effort: Duration,
    pub total_test_time: Duration,
    pub total_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsSummary {
    /// Operations per hour.
    pub asp: Centi,
    /// Percent.
    pub pte: Centi,
    /// Percent minutes per step.
    pub ttp: Centi,
    pub input: MetricsInput,
}

fn nanos(d: Duration) -> u128 {
    d.as_nanos()
}

/// Operations per hour, exact.
pub fn asp_exact(total_operations: u64, effort: Duration) -> Result<Ratio<u128>, MetricsError> {
    if effort.is_zero() {
        return Err(MetricsError::ZeroEffort);
    }
    Ok(Ratio::new(total_operations as u128 * NANOS_PER_HOUR, nanos(effort)))
}

pub fn asp(total_operations: u64, effort: Duration) -> Result<Centi, MetricsError> {
    asp_exact(total_operations, effort).map(Centi::round)
}

pub fn pte_exact(met: u64, unmet: u64) -> Result<Ratio<u128>, MetricsError> {
    let total = met as u128 + unmet as u128;
    if total == 0 {
        return Err(MetricsError::NoRequirements);
    }
    Ok(Ratio::new(100 * met as u128, total))
}

pub fn pte(met: u64, unmet: u64) -> Result<Centi, MetricsError> {
    pte_exact(met, unmet).map(Centi::round)
}

pub fn ttp_exact(total_time: Duration, total_steps: u64) -> Result<Ratio<u128>, MetricsError> {
    if total_steps == 0 {
        return Err(MetricsError::ZeroSteps);
    }
    Ok(Ratio::new(
        100 * nanos(total_time),
        NANOS_PER_MINUTE * total_steps as u128,
    ))
}

pub fn ttp(total_time: Duration, total_steps: u64) -> Result<Centi, MetricsError> {
    ttp_exact(total_time, total_steps).map(Centi::round)
}

/// Computes all three metrics from explicit inputs.
pub fn compute(input: MetricsInput) -> Result<MetricsSummary, MetricsErrors> {
    let pte = pte(input.requirements_met, input.requirements_unmet);
    let asp = asp(input.total_operations, input.scripting_effort);
    let ttp = ttp(input.total_test_time, input.total_steps);
    match (pte, asp, ttp) {
        (Ok(pte), Ok(asp), Ok(ttp)) => Ok(MetricsSummary {
            asp,
            pte,
            ttp,
            input,
        }),
        (pte, asp, ttp) => Err(MetricsErrors(
            [pte.err(), asp.err(), ttp.err()].into_iter().flatten().collect(),
        )),
    }
}

/// ASP from the run's operation tally, TTP from its duration and step
/// count, PTE from the supplied requirement counts.
pub fn summarize(
    run: &RunResult,
    requirements: Requirements,
    scripting_effort: Duration,
) -> Result<MetricsSummary, MetricsErrors> {
    compute(MetricsInput {
        requirements_met: requirements.met,
        requirements_unmet: requirements.unmet,
        total_operations: run.tally.total(),
        scripting_effort,
        total_test_time: Duration::from_millis(run.total_duration_ms),
        total_steps: run.total_steps,
    })
}

/// Same as [`summarize`], from a report's JSON island.
pub fn summarize_run_data(
    data: &RunData,
    requirements: Requirements,
    scripting_effort: Duration,
) -> Result<MetricsSummary, MetricsErrors> {
    compute(MetricsInput {
        requirements_met: requirements.met,
        requirements_unmet: requirements.unmet,
        total_operations: data.tally_total,
        scripting_effort,
        total_test_time: Duration::from_millis(data.summary.total_time_ms),
        total_steps: data.summary.total_steps,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RequirementsError {
    #[error("line {0}: expected MET=<n> or UNMET=<n>")]
    MalformedLine(usize),
    #[error("missing {0}")]
    Missing(&'static str),
}

/// Parses a requirements file of the form `MET=<n>` / `UNMET=<n>`.
pub fn parse_requirements(text: &str) -> Result<Requirements, RequirementsError> {
    let (mut met, mut unmet) = (None, None);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || RequirementsError::MalformedLine(i + 1);
        let (key, value) = line.split_once('=').ok_or_else(bad)?;
        let n: u64 = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "MET" => met = Some(n),
            "UNMET" => unmet = Some(n),
            _ => return Err(bad()),
        }
    }
    Ok(Requirements {
        met: met.ok_or(RequirementsError::Missing("MET"))?,
        unmet: unmet.ok_or(RequirementsError::Missing("UNMET"))?,
    })
}

/// Decimal rendering of an exact ratio with at most four fractional
/// digits, trailing zeros dropped (`1/2` -> `0.5`).
fn short_decimal(r: Ratio<u128>) -> String {
    let scaled = (r * Ratio::from_integer(10_000u128)).round().to_integer();
    let (int, frac) = (scaled / 10_000, scaled % 10_000);
    if frac == 0 {
        int.to_string()
    } else {
        let frac = format!("{frac:04}");
        format!("{int}.{}", frac.trim_end_matches('0'))
    }
}

/// Three-row summary table: each row shows the formula with its inputs.
pub struct MetricsTable<'a>(pub &'a MetricsSummary);

impl fmt::Display for MetricsTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let i = &s.input;
        let hours = short_decimal(Ratio::new(nanos(i.scripting_effort), NANOS_PER_HOUR));
        let minutes = short_decimal(Ratio::new(nanos(i.total_test_time), NANOS_PER_MINUTE));
        writeln!(f, "{:<4} {:<8} Value", "S/N", "Metrics")?;
        writeln!(
            f,
            "{:<4} {:<8} ({} / ({}+{})) * 100 = {}%",
            1, "PTE", i.requirements_met, i.requirements_met, i.requirements_unmet, s.pte
        )?;
        writeln!(
            f,
            "{:<4} {:<8} ({} / {}) = {} operations/hour",
            2, "ASP", i.total_operations, hours, s.asp
        )?;
        write!(
            f,
            "{:<4} {:<8} ({} / {}) * 100 = {}% min/step",
            3, "TTP", minutes, i.total_steps, s.ttp
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: u64 = 60;

    #[test]
    fn reported_values() {
        assert_eq!(pte(4, 1).unwrap().to_string(), "80.00");
        assert_eq!(asp(180, Duration::from_secs(30 * MIN)).unwrap().to_string(), "360.00");
        assert_eq!(ttp(Duration::from_secs(9 * MIN), 220).unwrap().to_string(), "4.09");
    }

    #[test]
    fn edge_values() {
        assert_eq!(asp(0, Duration::from_secs(1)).unwrap(), Centi::ZERO);
        assert_eq!(asp(180, Duration::ZERO), Err(MetricsError::ZeroEffort));
        assert_eq!(pte(7, 0).unwrap(), Centi(10_000));
        assert_eq!(pte(0, 0), Err(MetricsError::NoRequirements));
        assert_eq!(ttp(Duration::ZERO, 220).unwrap(), Centi::ZERO);
        assert_eq!(ttp(Duration::from_secs(9 * MIN), 0), Err(MetricsError::ZeroSteps));
    }

    #[test]
    fn all_errors_surface() {
        let err = compute(MetricsInput {
            requirements_met: 0,
            requirements_unmet: 0,
            total_operations: 0,
            scripting_effort: Duration::ZERO,
            total_test_time: Duration::ZERO,
            total_steps: 0,
        })
        .unwrap_err();
        assert_eq!(
            err.0,
            [MetricsError::NoRequirements, MetricsError::ZeroEffort, MetricsError::ZeroSteps]
        );
    }

    #[test]
    fn requirements_file() {
        assert_eq!(
            parse_requirements("MET=4\nUNMET=1\n").unwrap(),
            Requirements { met: 4, unmet: 1 }
        );
        assert_eq!(parse_requirements("MET=4"), Err(RequirementsError::Missing("UNMET")));
        assert_eq!(parse_requirements("MET=x\nUNMET=1"), Err(RequirementsError::MalformedLine(1)));
    }

    #[test]
    fn table_layout() {
        let s = compute(MetricsInput {
            requirements_met: 4,
            requirements_unmet: 1,
            total_operations: 180,
            scripting_effort: Duration::from_secs(30 * MIN),
            total_test_time: Duration::from_secs(9 * MIN),
            total_steps: 220,
        })
        .unwrap();
        let table = MetricsTable(&s).to_string();
        assert!(table.contains("(4 / (4+1)) * 100 = 80.00%"), "{table}");
        assert!(table.contains("(180 / 0.5) = 360.00 operations/hour"), "{table}");
        assert!(table.contains("(9 / 220) * 100 = 4.09% min/step"), "{table}");
    }
}
