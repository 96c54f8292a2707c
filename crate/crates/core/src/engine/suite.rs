use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use chrono::Utc;

use super::executor::{execute_step, BrowserContext, DriverSettings};
use super::expand::{case_description, expand_login_case};
use super::EngineError;
use crate::config::TestConfig;
use crate::datasource::{read_cases, DataSourceHandle};
use crate::model::{
    KeywordStep, LocatorConstants, OperationTally, RunResult, Status, StepResult, TestCaseData,
    TestCaseResult,
};
use crate::report::{collect_environment, ReportError, ReportSink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Cases run concurrently, each in its own session. 1 is sequential.
    pub parallelism: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { parallelism: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub result: TestCaseResult,
    /// A command failed because the WebDriver endpoint refused connections.
    pub endpoint_down: bool,
}

fn skipped_step(step: &KeywordStep) -> StepResult {
    StepResult {
        step: step.clone(),
        status: Status::Skipped,
        message: "not run: an earlier step was fatal".into(),
        screenshot: None,
        started_at: Utc::now(),
        duration_ms: 0,
    }
}

/// Runs an arbitrary keyword sequence as one case. Once a step is FATAL
/// the rest are recorded as SKIPPED and any open session is deleted
/// without being logged.
pub fn run_case_steps(
    case_id: &str,
    description: &str,
    steps: &[KeywordStep],
    settings: &DriverSettings,
    reporter: &mut dyn ReportSink,
) -> Result<CaseOutcome, ReportError> {
    let clock = Instant::now();
    reporter.start_case(case_id, description)?;
    let mut ctx = BrowserContext::new(settings.clone());
    let mut results = Vec::with_capacity(steps.len());
    let mut fatal = false;
    for step in steps {
        let result = if fatal {
            let r = skipped_step(step);
            reporter.log_step(&r)?;
            r
        } else {
            execute_step(&mut ctx, step, reporter)?
        };
        fatal |= result.status == Status::Fatal;
        results.push(result);
    }
    ctx.teardown();
    let result = TestCaseResult {
        case_id: case_id.to_string(),
        description: description.to_string(),
        status: Status::fold(results.iter().map(|r| r.status)),
        steps: results,
        duration_ms: clock.elapsed().as_millis() as u64,
    };
    reporter.end_case(&result)?;
    Ok(CaseOutcome {
        result,
        endpoint_down: ctx.endpoint_down(),
    })
}

/// Expands a login row and runs it.
pub fn run_test_case(
    case: &TestCaseData,
    config: &TestConfig,
    locators: &LocatorConstants,
    reporter: &mut dyn ReportSink,
) -> Result<CaseOutcome, EngineError> {
    let steps = expand_login_case(case, config, locators).map_err(|source| EngineError::Expand {
        case_id: case.case_id.clone(),
        source,
    })?;
    Ok(run_case_steps(
        &case.case_id,
        &case_description(case),
        &steps,
        &DriverSettings::from_config(config),
        reporter,
    )?)
}

/// Operation counts over every step that was dispatched. SKIPPED steps
/// and NAVIGATE are not counted.
pub fn count_operations(run: &RunResult) -> OperationTally {
    let mut tally = OperationTally::default();
    for step in run.cases.iter().flat_map(TestCaseResult::executed_steps) {
        tally.record(step.step.keyword());
    }
    tally
}

/// Runs every case from `source` in source order.
pub fn run_suite(
    config: &TestConfig,
    source: &DataSourceHandle,
    locators: &LocatorConstants,
    reporter: &mut dyn ReportSink,
) -> Result<RunResult, EngineError> {
    run_suite_with(config, source, locators, reporter, RunOptions::default())
}

struct Planned {
    case_id: String,
    description: String,
    steps: Vec<KeywordStep>,
}

enum Event {
    Start(String, String),
    Step(StepResult),
    End(TestCaseResult),
}

#[derive(Default)]
struct EventBuffer(Vec<Event>);

impl ReportSink for EventBuffer {
    fn start_case(&mut self, case_id: &str, description: &str) -> Result<(), ReportError> {
        self.0.push(Event::Start(case_id.into(), description.into()));
        Ok(())
    }
    fn log_step(&mut self, result: &StepResult) -> Result<(), ReportError> {
        self.0.push(Event::Step(result.clone()));
        Ok(())
    }
    fn end_case(&mut self, result: &TestCaseResult) -> Result<(), ReportError> {
        self.0.push(Event::End(result.clone()));
        Ok(())
    }
    fn finalize(&mut self, _: &RunResult) -> Result<(), ReportError> {
        Ok(())
    }
}

impl EventBuffer {
    fn replay(self, reporter: &mut dyn ReportSink) -> Result<(), ReportError> {
        for event in self.0 {
            match event {
                Event::Start(id, d) => reporter.start_case(&id, &d)?,
                Event::Step(s) => reporter.log_step(&s)?,
                Event::End(r) => reporter.end_case(&r)?,
            }
        }
        Ok(())
    }
}

fn skip_case(plan: &Planned, reporter: &mut dyn ReportSink) -> Result<TestCaseResult, ReportError> {
    let result = TestCaseResult::skipped(&plan.case_id, &plan.description);
    reporter.start_case(&plan.case_id, &plan.description)?;
    reporter.end_case(&result)?;
    Ok(result)
}

/// Like [`run_suite`], with options. Every row is expanded before any
/// session is opened, so a malformed row fails the run up front. Results
/// and report events are always in source order, whatever the parallelism.
pub fn run_suite_with(
    config: &TestConfig,
    source: &DataSourceHandle,
    locators: &LocatorConstants,
    reporter: &mut dyn ReportSink,
    options: RunOptions,
) -> Result<RunResult, EngineError> {
    let cases = read_cases(source)?;
    let plans = cases
        .iter()
        .map(|case| {
            let steps = expand_login_case(case, config, locators).map_err(|source| {
                EngineError::Expand {
                    case_id: case.case_id.clone(),
                    source,
                }
            })?;
            Ok(Planned {
                case_id: case.case_id.clone(),
                description: case_description(case),
                steps,
            })
        })
        .collect::<Result<Vec<_>, EngineError>>()?;

    let settings = DriverSettings::from_config(config);
    let environment = collect_environment();
    let clock = Instant::now();
    let (results, skipped, down) = if options.parallelism <= 1 {
        run_sequential(&plans, &settings, reporter)?
    } else {
        run_parallel(&plans, &settings, reporter, options.parallelism)?
    };

    let mut run = RunResult {
        total_steps: results.iter().map(|c| c.steps.len() as u64).sum(),
        cases: results,
        total_duration_ms: clock.elapsed().as_millis() as u64,
        tally: OperationTally::default(),
        environment,
        aborted: down.then(|| {
            format!(
                "WebDriver endpoint {} unreachable; {skipped} case(s) not run",
                settings.endpoint
            )
        }),
    };
    run.tally = count_operations(&run);
    reporter.finalize(&run)?;
    Ok(run)
}

fn run_sequential(
    plans: &[Planned],
    settings: &DriverSettings,
    reporter: &mut dyn ReportSink,
) -> Result<(Vec<TestCaseResult>, usize, bool), ReportError> {
    let mut results = Vec::with_capacity(plans.len());
    let mut down = false;
    let mut skipped = 0;
    for plan in plans {
        if down {
            skipped += 1;
            results.push(skip_case(plan, reporter)?);
            continue;
        }
        let outcome = run_case_steps(&plan.case_id, &plan.description, &plan.steps, settings, reporter)?;
        down = outcome.endpoint_down;
        results.push(outcome.result);
    }
    Ok((results, skipped, down))
}

fn run_parallel(
    plans: &[Planned],
    settings: &DriverSettings,
    reporter: &mut dyn ReportSink,
    workers: usize,
) -> Result<(Vec<TestCaseResult>, usize, bool), ReportError> {
    let next = AtomicUsize::new(0);
    let down = AtomicBool::new(false);
    let slots: Vec<Mutex<Option<(CaseOutcome, EventBuffer)>>> =
        plans.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers.min(plans.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= plans.len() || down.load(Ordering::SeqCst) {
                    break;
                }
                let plan = &plans[i];
                let mut buffer = EventBuffer::default();
                let outcome = run_case_steps(&plan.case_id, &plan.description, &plan.steps, settings, &mut buffer)
                    .expect("buffer sink never fails");
                if outcome.endpoint_down {
                    down.store(true, Ordering::SeqCst);
                }
                *slots[i].lock().unwrap() = Some((outcome, buffer));
            });
        }
    });

    let mut results = Vec::with_capacity(plans.len());
    let mut skipped = 0;
    for (plan, slot) in plans.iter().zip(slots) {
        match slot.into_inner().unwrap() {
            Some((outcome, buffer)) => {
                buffer.replay(reporter)?;
                results.push(outcome.result);
            }
            None => {
                skipped += 1;
                results.push(skip_case(plan, reporter)?);
            }
        }
    }
    Ok((results, skipped, down.into_inner()))
}
