//! Property checks shared by the property suite and the acceptance gate.

use std::sync::OnceLock;
use std::time::Duration;

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::{open_file_source, read_cases};
use hybrid_taf::engine::{run_case_steps, run_suite, DriverSettings};
use hybrid_taf::metrics::{asp_exact, pte, pte_exact, ttp_exact};
use hybrid_taf::mock::MockWebDriver;
use hybrid_taf::model::{Keyword, KeywordStep, Locator, OperationTally, Status, TestCaseData};
use hybrid_taf::report::{split_percentages, NullSink};
use hybrid_taf::webdriver::new_session;
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use super::{accounts, file_config, portal};

/// Randomized instances per property.
pub const CASES: u32 = 100;

pub type Outcome = Result<(), String>;

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn shared_mock() -> &'static MockWebDriver {
    static MOCK: OnceLock<MockWebDriver> = OnceLock::new();
    MOCK.get_or_init(portal)
}

fn status() -> impl Strategy<Value = Status> {
    prop_oneof![
        Just(Status::Skipped),
        Just(Status::Passed),
        Just(Status::Failed),
        Just(Status::Fatal)
    ]
}

/// Independent count: one bucket per keyword, NAVIGATE and SKIPPED ignored.
fn oracle_tally(steps: impl IntoIterator<Item = (Keyword, Status)>) -> [u64; 7] {
    let mut t = [0u64; 7];
    for (kw, st) in steps {
        if st == Status::Skipped {
            continue;
        }
        let slot = match kw {
            Keyword::Click => 0,
            Keyword::OpenBrowser => 1,
            Keyword::Input => 2,
            Keyword::CloseBrowser => 3,
            Keyword::Validate => 4,
            Keyword::Screenshot => 5,
            Keyword::Clear => 6,
            Keyword::Navigate => continue,
        };
        t[slot] += 1;
    }
    t
}

fn tally_array(t: &OperationTally) -> [u64; 7] {
    [
        t.clicks,
        t.browsers_opened,
        t.inputs,
        t.browsers_closed,
        t.validations,
        t.screenshots,
        t.fields_cleared,
    ]
}

fn login_row() -> impl Strategy<Value = (usize, bool, bool, bool)> {
    // (account, known user, right password, expect PASS)
    (0usize..5, any::<bool>(), any::<bool>(), any::<bool>())
}

fn keyword_step() -> impl Strategy<Value = KeywordStep> {
    let field = prop_oneof![
        Just("username"),
        Just("password"),
        Just("submit"),
        Just("result"),
        Just("missing")
    ];
    prop_oneof![
        Just(KeywordStep::open_browser()),
        Just(KeywordStep::close_browser()),
        Just(KeywordStep::screenshot()),
        Just(KeywordStep::navigate("http://portal.test/login")),
        field
            .clone()
            .prop_map(|f| KeywordStep::click(Locator::id(f).unwrap())),
        (field.clone(), "[a-z]{0,4}")
            .prop_map(|(f, v)| KeywordStep::input(Locator::id(f).unwrap(), v)),
        field.prop_map(|f| KeywordStep::clear(Locator::id(f).unwrap())),
        prop_oneof![Just("PASS"), Just("FAIL"), Just("")].prop_map(KeywordStep::validate),
    ]
}

pub fn tally_conservation_over_random_suites() -> Outcome {
    runner()
        .run(&prop::collection::vec(login_row(), 1..4), |rows| {
            let mock = shared_mock();
            let accounts = accounts();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("cases.csv");
            let mut w = csv::Writer::from_path(&path).unwrap();
            w.write_record(["case_id", "username", "password", "expected"])
                .unwrap();
            for (i, (acct, known, right, pass)) in rows.iter().enumerate() {
                let (u, p) = &accounts[*acct];
                let user = if *known { u.clone() } else { format!("x{u}") };
                let pw = if *right { p.clone() } else { format!("{p}!") };
                let expected = if *pass { "PASS" } else { "FAIL" };
                w.write_record([format!("TC{i}"), user, pw, expected.to_string()])
                    .unwrap();
            }
            w.flush().unwrap();
            let cfg = parse_config(&file_config(&mock.url())).unwrap();
            let run = run_suite(
                &cfg,
                &open_file_source(&path).unwrap(),
                &cfg.locators,
                &mut NullSink,
            )
            .unwrap();

            let log = run
                .cases
                .iter()
                .flat_map(|c| &c.steps)
                .map(|s| (s.step.keyword(), s.status));
            prop_assert_eq!(tally_array(&run.tally), oracle_tally(log));
            prop_assert_eq!(run.tally.total(), 9 * rows.len() as u64);
            prop_assert_eq!(run.total_steps, 10 * rows.len() as u64);
            for (case, (_, known, right, pass)) in run.cases.iter().zip(&rows) {
                let accepted = *known && *right;
                let want = if accepted == *pass {
                    Status::Passed
                } else {
                    Status::Failed
                };
                prop_assert_eq!(case.status, want);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn tally_conservation_over_random_scripts() -> Outcome {
    runner()
        .run(&prop::collection::vec(keyword_step(), 0..10), |steps| {
            let mock = shared_mock();
            let settings = DriverSettings::new(mock.url(), "mock");
            let outcome = run_case_steps("R", "", &steps, &settings, &mut NullSink).unwrap();
            let result = &outcome.result;
            prop_assert_eq!(result.steps.len(), steps.len());

            let mut tally = OperationTally::default();
            result
                .executed_steps()
                .for_each(|s| tally.record(s.step.keyword()));
            let log = result.steps.iter().map(|s| (s.step.keyword(), s.status));
            prop_assert_eq!(tally_array(&tally), oracle_tally(log));

            // once FATAL, everything after is SKIPPED, and nothing before is
            if let Some(i) = result.steps.iter().position(|s| s.status == Status::Fatal) {
                prop_assert!(result.steps[i + 1..]
                    .iter()
                    .all(|s| s.status == Status::Skipped));
            }
            prop_assert!(result
                .steps
                .iter()
                .take_while(|s| s.status != Status::Fatal)
                .all(|s| s.status != Status::Skipped));
            prop_assert_eq!(
                result.status,
                Status::fold(result.steps.iter().map(|s| s.status))
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn status_fold_algebra() -> Outcome {
    runner()
        .run(
            &(
                prop::collection::vec(status(), 0..12),
                prop::collection::vec(status(), 0..12),
            ),
            |(a, b)| {
                let fa = Status::fold(a.clone());
                let fb = Status::fold(b.clone());
                let joined = Status::fold(a.iter().chain(&b).copied());
                // fold distributes over concatenation with Skipped as identity
                let combine = |x: Status, y: Status| {
                    if x == Status::Skipped {
                        y
                    } else if y == Status::Skipped {
                        x
                    } else {
                        x.max(y)
                    }
                };
                prop_assert_eq!(joined, combine(fa, fb));
                // order does not matter
                let mut rev = a.clone();
                rev.reverse();
                prop_assert_eq!(Status::fold(rev), fa);
                // idempotent and bounded by the inputs
                prop_assert_eq!(Status::fold(a.iter().chain(&a).copied()), fa);
                prop_assert!(fa == Status::Skipped || a.contains(&fa));
                prop_assert_eq!(
                    fa == Status::Skipped,
                    a.iter().all(|s| *s == Status::Skipped)
                );
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn pte_monotonic_and_bounded() -> Outcome {
    runner()
        .run(
            &(0u64..10_000, 0u64..10_000, 1u64..100),
            |(met, unmet, d)| {
                prop_assume!(met + unmet > 0);
                let base = pte_exact(met, unmet).unwrap();
                prop_assert!(pte_exact(met + d, unmet).unwrap() >= base);
                prop_assert!(pte_exact(met, unmet + d).unwrap() <= base);
                prop_assert!(base <= Ratio::from_integer(100));
                prop_assert!(pte(met, unmet).unwrap().hundredths() <= 10_000);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn asp_linear() -> Outcome {
    runner()
        .run(
            &(0u64..1_000_000, 1u64..1_000_000, 1u64..1000),
            |(ops, secs, k)| {
                let e = Duration::from_secs(secs);
                let base = asp_exact(ops, e).unwrap();
                prop_assert_eq!(
                    asp_exact(ops * k, e).unwrap(),
                    base * Ratio::from_integer(k as u128)
                );
                prop_assert_eq!(
                    asp_exact(ops, e * k as u32).unwrap(),
                    base / Ratio::from_integer(k as u128)
                );
                let (a, b) = (ops / 2, ops - ops / 2);
                prop_assert_eq!(asp_exact(a, e).unwrap() + asp_exact(b, e).unwrap(), base);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn ttp_scales() -> Outcome {
    runner()
        .run(
            &(0u64..100_000_000, 1u64..100_000, 1u64..100),
            |(ms, steps, k)| {
                let t = Duration::from_millis(ms);
                let base = ttp_exact(t, steps).unwrap();
                prop_assert_eq!(
                    ttp_exact(t * k as u32, steps).unwrap(),
                    base * Ratio::from_integer(k as u128)
                );
                prop_assert_eq!(
                    ttp_exact(t, steps * k).unwrap(),
                    base / Ratio::from_integer(k as u128)
                );
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn send_keys_and_clear_model() -> Outcome {
    runner()
        .run(
            &prop::collection::vec(prop::option::of("\\PC{0,6}"), 1..12),
            |ops| {
                // Some(text) = send_keys(text), None = clear
                let mock = shared_mock();
                let s = new_session(&mock.url(), "mock").unwrap();
                s.navigate("http://portal.test/login").unwrap();
                let field = s.find_element(&Locator::id("username").unwrap()).unwrap();
                let mut model = String::new();
                for op in &ops {
                    match op {
                        Some(text) => {
                            field.send_keys(text).unwrap();
                            model.push_str(text);
                        }
                        None => {
                            field.clear().unwrap();
                            model.clear();
                        }
                    }
                    prop_assert_eq!(mock.element_value(s.id(), "username"), Some(model.clone()));
                }
                s.delete().unwrap();
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn percentages_sum_to_one_hundred() -> Outcome {
    runner()
        .run(&prop::array::uniform4(0u64..1000), |counts| {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let parts = split_percentages(counts);
            prop_assert_eq!(parts.iter().map(|c| c.hundredths()).sum::<u64>(), 10_000);
            let total: u64 = counts.iter().sum();
            for (c, p) in counts.iter().zip(parts) {
                // within one hundredth of the exact share
                let exact = Ratio::new(*c as u128 * 10_000, total as u128);
                let got = Ratio::from_integer(p.hundredths() as u128);
                let diff = if got > exact {
                    got - exact
                } else {
                    exact - got
                };
                prop_assert!(diff < Ratio::from_integer(1));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn config_round_trip() -> Outcome {
    runner().run(&("[a-z]{1,10}(\\.[a-z]{2,5})?", 1u16.., "(/[a-z0-9]{1,6}){0,3}", prop_oneof![Just("chrome"), Just("firefox"), Just("mock")], proptest::option::of(("[a-z]{1,8}", "[A-Za-z0-9_]{1,8}", "[!-~]([ -~]{0,10}[!-~])?", "[A-Za-z_][A-Za-z0-9_]{0,10}")), 1u64..3600, prop_oneof![Just("id:user"), Just("css:#u"), Just("xpath://*[@id='u']")]), |(host, port, path, browser, db, timeout_s, user_loc)| {
    let mut text = format!(
        "AUT_URL=http://{host}:{port}{path}\nBROWSER_CHOICE={browser}\nWEBDRIVER_URL=http://127.0.0.1:{port}\nREQUEST_TIMEOUT={timeout_s}s\nUSER_ID={user_loc}\n"
    );
    match &db {
        Some((name, user, pass, table)) => text.push_str(&format!(
            "DATA_SOURCE=DATABASE\nMYSQL_URL=db:3306\nMYSQL_DATABASE={name}\nMYSQL_USER={user}\nMYSQL_PASS={pass}\nTABLE_NAME={table}\n"
        )),
        None => text.push_str("DATA_SOURCE=FILE\n"),
    }
    let cfg = parse_config(&text).unwrap();
    prop_assert_eq!(parse_config(&cfg.to_config_string()).unwrap(), cfg.clone());
    if db.is_some() {
        // redaction touches the password line and nothing else
        let plain = cfg.to_config_string();
        let redacted = cfg.redacted();
        let (plain, redacted): (Vec<_>, Vec<_>) = (plain.lines().collect(), redacted.lines().collect());
        prop_assert_eq!(plain.len(), redacted.len());
        for (p, r) in plain.iter().zip(&redacted) {
            if p.starts_with("MYSQL_PASS=") {
                prop_assert_eq!(*r, "MYSQL_PASS=***");
            } else {
                prop_assert_eq!(p, r);
            }
        }
    }
        Ok(())
    })
    .map_err(|e| e.to_string())
}

pub fn csv_round_trip() -> Outcome {
    runner()
        .run(
            &prop::collection::vec(("[^\\x00]{0,8}", "[^\\x00]{0,8}", "PASS|FAIL"), 0..8),
            |rows| {
                let dir = tempfile::tempdir().unwrap();
                let path = dir.path().join("cases.csv");
                let mut w = csv::Writer::from_path(&path).unwrap();
                w.write_record(["case_id", "username", "password", "expected"])
                    .unwrap();
                let mut want = Vec::new();
                for (i, (u, p, e)) in rows.iter().enumerate() {
                    let id = format!("TC{i}");
                    w.write_record([&id, u, p, e]).unwrap();
                    want.push(TestCaseData {
                        case_id: id,
                        fields: vec![
                            ("username".into(), u.clone()),
                            ("password".into(), p.clone()),
                        ],
                        expected: e.clone(),
                    });
                }
                w.flush().unwrap();
                let got = read_cases(&open_file_source(&path).unwrap()).unwrap();
                prop_assert_eq!(got, want);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}
