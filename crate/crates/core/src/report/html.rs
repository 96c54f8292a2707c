use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::dashboard::{compute_dashboard, format_duration_ms, DashboardSummary};
use super::env::EnvironmentInfo;
use super::{HtmlReport, ReportError};
use crate::model::{OperationTally, RunResult, Status};

const ISLAND_OPEN: &str = r#"<script type="application/json" id="run-data">"#;
const ISLAND_CLOSE: &str = "</script>";

/// Machine-readable mirror of a report, embedded as a JSON island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunData {
    pub test_name: String,
    pub description: String,
    pub generated_at: String,
    pub summary: DashboardSummary,
    pub environment: EnvironmentInfo,
    pub tally: OperationTally,
    pub tally_total: u64,
    pub aborted: Option<String>,
    pub cases: Vec<RunDataCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDataCase {
    pub id: String,
    pub description: String,
    pub status: Status,
    pub duration_ms: u64,
    pub steps: Vec<RunDataStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDataStep {
    pub keyword: String,
    pub locator: Option<String>,
    pub value: Option<String>,
    pub status: Status,
    pub message: String,
    pub started_at: String,
    pub duration_ms: u64,
    pub screenshot: bool,
}

/// `report-<UTC timestamp>.html`
pub fn default_report_name(now: DateTime<Utc>) -> String {
    format!("report-{}.html", now.format("%Y%m%dT%H%M%SZ"))
}

fn iso(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn run_data(report: &HtmlReport, run: &RunResult, now: DateTime<Utc>) -> RunData {
    let cases = report
        .logged_cases()
        .iter()
        .map(|c| {
            let result = c.result.as_ref();
            RunDataCase {
                id: c.case_id.clone(),
                description: c.description.clone(),
                status: result.map(|r| r.status).unwrap_or(Status::Skipped),
                duration_ms: result.map(|r| r.duration_ms).unwrap_or(0),
                steps: c
                    .steps
                    .iter()
                    .map(|s| RunDataStep {
                        keyword: s.step.keyword().as_str().to_string(),
                        locator: s.step.locator().map(ToString::to_string),
                        value: s.step.value().map(str::to_string),
                        status: s.status,
                        message: s.message.clone(),
                        started_at: iso(&s.started_at),
                        duration_ms: s.duration_ms,
                        screenshot: s.screenshot.is_some(),
                    })
                    .collect(),
            }
        })
        .collect();
    RunData {
        test_name: report.test_name().to_string(),
        description: report.description().to_string(),
        generated_at: iso(&now),
        summary: compute_dashboard(run),
        environment: run.environment.clone(),
        tally: run.tally,
        tally_total: run.tally.total(),
        aborted: run.aborted.clone(),
        cases,
    }
}

fn island_json(data: &RunData) -> String {
    serde_json::to_string(data)
        .expect("run data serializes")
        .replace('<', "\\u003c")
        .replace('>', "\\u003e")
        .replace('&', "\\u0026")
}

const STYLE: &str = "
body{font-family:system-ui,sans-serif;margin:0;background:#f4f6f8;color:#1d2733}
header{background:#243447;color:#fff;padding:16px 24px}
header h1{margin:0;font-size:20px}
main{padding:16px 24px}
section{background:#fff;border-radius:6px;padding:12px 16px;margin-bottom:16px;box-shadow:0 1px 2px rgba(0,0,0,.08)}
dl{display:grid;grid-template-columns:max-content auto;gap:4px 16px;margin:0}
dt{font-weight:600}
table{border-collapse:collapse;width:100%}
td,th{border-bottom:1px solid #e3e7eb;padding:4px 8px;text-align:left;vertical-align:top}
.PASSED{color:#1e7b34}.FAILED{color:#b3261e}.SKIPPED{color:#7a7a7a}.FATAL{color:#fff;background:#b3261e;padding:0 4px}
nav a{margin-right:12px}
img.shot{max-width:320px;border:1px solid #ccc;image-rendering:pixelated;min-width:32px}
";

pub(super) fn render(report: &HtmlReport, run: &RunResult) -> String {
    render_at(report, run, Utc::now())
}

fn render_at(report: &HtmlReport, run: &RunResult, now: DateTime<Utc>) -> String {
    let data = run_data(report, run, now);
    let d = &data.summary;
    let mut html = String::new();
    let _ = write!(
        html,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<header><h1>{title}</h1><p>{desc}</p><p>Generated {gen}</p></header>\n<main>\n",
        title = escape(&data.test_name),
        desc = escape(&data.description),
        gen = escape(&data.generated_at),
    );

    html.push_str("<section id=\"dashboard\">\n<h2>Dashboard</h2>\n<dl>\n");
    let dash_rows = [
        ("total-cases", "Total test cases", d.total_cases.to_string()),
        ("total-steps", "Total steps", d.total_steps.to_string()),
        ("passed-pct", "Passed", format!("{}%", d.passed_pct)),
        ("failed-pct", "Failed", format!("{}%", d.failed_pct)),
        ("skipped-pct", "Skipped", format!("{}%", d.skipped_pct)),
        ("fatal-pct", "Fatal", format!("{}%", d.fatal_pct)),
        ("total-time", "Total time", format!("{} ({} ms)", d.total_time(), d.total_time_ms)),
    ];
    for (key, label, value) in dash_rows {
        let _ = writeln!(html, "<dt>{label}</dt><dd data-field=\"{key}\">{}</dd>", escape(&value));
    }
    html.push_str("</dl>\n");
    if let Some(reason) = &data.aborted {
        let _ = writeln!(html, "<p class=\"FATAL\">Run aborted: {}</p>", escape(reason));
    }
    html.push_str("<h3>Operations</h3>\n<table>\n");
    for (label, count) in data.tally.rows() {
        let _ = writeln!(html, "<tr><td>{label}</td><td>{count}</td></tr>");
    }
    let _ = writeln!(
        html,
        "<tr><th>Total operations</th><th>{}</th></tr>\n</table>\n</section>",
        data.tally_total
    );

    let env = &data.environment;
    html.push_str("<section id=\"environment\">\n<h2>Environment</h2>\n<dl>\n");
    for (key, label, value) in [
        ("os-name", "OS", &env.os_name),
        ("user-name", "User", &env.user_name),
        ("host-name", "Host name", &env.host_name),
        ("runtime-version", "Runtime", &env.runtime_version),
        ("framework-version", "Framework", &env.framework_version),
    ] {
        let _ = writeln!(html, "<dt>{label}</dt><dd data-field=\"{key}\">{}</dd>", escape(value));
    }
    html.push_str("</dl>\n</section>\n");

    html.push_str("<nav id=\"cases-nav\">\n");
    for (i, case) in data.cases.iter().enumerate() {
        let _ = writeln!(
            html,
            "<a href=\"#case-{n}\" class=\"{st}\">{id}</a>",
            n = i + 1,
            st = case.status,
            id = escape(&case.id)
        );
    }
    html.push_str("</nav>\n");

    for (i, (case, logged)) in data.cases.iter().zip(report.logged_cases()).enumerate() {
        let _ = writeln!(
            html,
            "<section class=\"case\" id=\"case-{n}\" data-case-id=\"{id}\" data-status=\"{st}\">\n<h2>{id} <span class=\"{st}\">{st}</span></h2>\n<p>{desc} &middot; {dur}</p>\n<table>\n<tr><th>#</th><th>Step</th><th>Status</th><th>Message</th><th>Started</th><th>ms</th><th>Screenshot</th></tr>",
            n = i + 1,
            id = escape(&case.id),
            st = case.status,
            desc = escape(&case.description),
            dur = format_duration_ms(case.duration_ms),
        );
        for (j, (step, raw)) in case.steps.iter().zip(&logged.steps).enumerate() {
            let shot = match &raw.screenshot {
                Some(b64) => format!(
                    "<img class=\"shot\" alt=\"screenshot\" src=\"data:image/png;base64,{}\">",
                    escape(b64)
                ),
                None => String::new(),
            };
            let _ = writeln!(
                html,
                "<tr class=\"step\"><td>{n}</td><td>{kw}</td><td class=\"{st}\">{st}</td><td>{msg}</td><td>{ts}</td><td>{ms}</td><td>{shot}</td></tr>",
                n = j + 1,
                kw = escape(&raw.step.to_string()),
                st = step.status,
                msg = escape(&step.message),
                ts = escape(&step.started_at),
                ms = step.duration_ms,
            );
        }
        html.push_str("</table>\n</section>\n");
    }

    let _ = write!(
        html,
        "</main>\n{ISLAND_OPEN}{}{ISLAND_CLOSE}\n</body>\n</html>\n",
        island_json(&data)
    );
    html
}

/// Parses the JSON island back out of a rendered report.
pub fn extract_run_data(html: &str) -> Result<RunData, ReportError> {
    let start = html.find(ISLAND_OPEN).ok_or(ReportError::MissingRunData)? + ISLAND_OPEN.len();
    let len = html[start..]
        .find(ISLAND_CLOSE)
        .ok_or(ReportError::MissingRunData)?;
    serde_json::from_str(&html[start..start + len])
        .map_err(|e| ReportError::MalformedRunData(e.to_string()))
}
