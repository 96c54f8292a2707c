use serde::{Deserialize, Serialize};

use crate::decimal::Centi;
use crate::model::{RunResult, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DashboardSummary {
    pub total_cases: u64,
    pub total_steps: u64,
    pub passed_pct: Centi,
    pub failed_pct: Centi,
    pub skipped_pct: Centi,
    pub fatal_pct: Centi,
    pub total_time_ms: u64,
}

impl DashboardSummary {
    pub fn percentages(&self) -> [Centi; 4] {
        [self.passed_pct, self.failed_pct, self.skipped_pct, self.fatal_pct]
    }

    /// `m:ss`
    pub fn total_time(&self) -> String {
        format_duration_ms(self.total_time_ms)
    }
}

/// Formats milliseconds as `m:ss` (seconds truncated).
pub fn format_duration_ms(ms: u64) -> String {
    let secs = ms / 1000;
    format!("{}:{:02}", secs / 60, secs % 60)
}

/// Splits 100.00 across `counts` in hundredths, proportionally to the
/// counts, so the parts always sum to exactly 100.00. Each part is the
/// exact share rounded down or up by less than one hundredth; leftover
/// hundredths go to the largest remainders, ties to the earlier slot.
pub fn split_percentages<const N: usize>(counts: [u64; N]) -> [Centi; N] {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return [Centi::ZERO; N];
    }
    let total = total as u128;
    let mut parts = [0u64; N];
    let mut remainders = [(0u128, 0usize); N];
    for (i, &c) in counts.iter().enumerate() {
        let scaled = c as u128 * 10_000;
        parts[i] = (scaled / total) as u64;
        remainders[i] = (scaled % total, i);
    }
    let assigned: u64 = parts.iter().sum();
    let mut leftover = 10_000 - assigned;
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (rem, i) in remainders {
        if leftover == 0 {
            break;
        }
        if rem > 0 {
            parts[i] += 1;
            leftover -= 1;
        }
    }
    parts.map(Centi)
}

/// Case-level summary over a run.
pub fn compute_dashboard(run: &RunResult) -> DashboardSummary {
    let counts = [Status::Passed, Status::Failed, Status::Skipped, Status::Fatal]
        .map(|s| run.count(s) as u64);
    let [passed_pct, failed_pct, skipped_pct, fatal_pct] = split_percentages(counts);
    DashboardSummary {
        total_cases: run.cases.len() as u64,
        total_steps: run.total_steps,
        passed_pct,
        failed_pct,
        skipped_pct,
        fatal_pct,
        total_time_ms: run.total_duration_ms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_splits() {
        assert_eq!(split_percentages([20, 0, 0, 0]), [Centi(10000), Centi(0), Centi(0), Centi(0)]);
        assert_eq!(split_percentages([4, 1, 0, 0]), [Centi(8000), Centi(2000), Centi(0), Centi(0)]);
        assert_eq!(split_percentages([0, 0, 0, 0]), [Centi(0); 4]);
    }

    #[test]
    fn thirds_sum_to_hundred() {
        let p = split_percentages([1, 1, 1, 0]);
        assert_eq!(p.iter().map(|c| c.0).sum::<u64>(), 10_000);
        assert_eq!(p, [Centi(3334), Centi(3333), Centi(3333), Centi(0)]);
    }

    #[test]
    fn minutes_seconds() {
        assert_eq!(format_duration_ms(9 * 60 * 1000), "9:00");
        assert_eq!(format_duration_ms(61_999), "1:01");
        assert_eq!(format_duration_ms(0), "0:00");
    }
}
