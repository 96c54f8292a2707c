//! Parser-based checks on a rendered report.

use base64::Engine as _;
use hybrid_taf::model::RunResult;
use hybrid_taf::report::{compute_dashboard, RunData};
use scraper::{Html, Selector};

fn sel(s: &str) -> Selector {
    Selector::parse(s).unwrap()
}

fn is_external(reference: &str) -> bool {
    let r = reference.trim().to_ascii_lowercase();
    r.starts_with("http:") || r.starts_with("https:") || r.starts_with("//") || r.starts_with("file:")
}

/// Every `url(...)` argument inside a style text.
fn css_urls(css: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = css;
    while let Some(i) = rest.find("url(") {
        rest = &rest[i + 4..];
        let end = rest.find(')').unwrap_or(rest.len());
        out.push(rest[..end].trim_matches(|c| c == '"' || c == '\'' || c == ' ').to_string());
        rest = &rest[end..];
    }
    out
}

fn decode_png(b64: &str) -> Result<(u32, u32), String> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(b64)
        .map_err(|e| format!("bad base64: {e}"))?;
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| format!("bad PNG header: {e}"))?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or("PNG too large")?];
    let info = reader.next_frame(&mut buf).map_err(|e| format!("bad PNG data: {e}"))?;
    Ok((info.width, info.height))
}

/// Returns every violation found; empty means the report satisfies the
/// contract for `run`.
pub fn check_report(html: &str, run: &RunResult) -> Vec<String> {
    let mut problems = Vec::new();
    let doc = Html::parse_document(html);
    let summary = compute_dashboard(run);

    // self-contained
    for el in doc.select(&sel("[src], [href]")) {
        for attr in ["src", "href"] {
            if let Some(v) = el.value().attr(attr) {
                if is_external(v) {
                    problems.push(format!("external {attr}: {v}"));
                }
                if attr == "href" && !v.starts_with('#') {
                    problems.push(format!("non-fragment link: {v}"));
                }
                if attr == "src" && !v.starts_with("data:") {
                    problems.push(format!("non-inline src: {v}"));
                }
            }
        }
    }
    if doc.select(&sel("link, iframe, object, embed")).next().is_some() {
        problems.push("linked resource element present".into());
    }
    if doc.select(&sel("script[src]")).next().is_some() {
        problems.push("external script".into());
    }
    for style in doc.select(&sel("style")) {
        let css: String = style.text().collect();
        if css.contains("@import") {
            problems.push("@import in style".into());
        }
        for u in css_urls(&css) {
            if !u.starts_with("data:") {
                problems.push(format!("style url: {u}"));
            }
        }
    }
    for el in doc.select(&sel("[style]")) {
        for u in css_urls(el.value().attr("style").unwrap_or("")) {
            if !u.starts_with("data:") {
                problems.push(format!("inline style url: {u}"));
            }
        }
    }

    // dashboard
    let field = |section: &str, name: &str| {
        doc.select(&sel(&format!("section#{section} dd[data-field=\"{name}\"]")))
            .next()
            .map(|e| e.text().collect::<String>())
    };
    let expected_dash = [
        ("total-cases", summary.total_cases.to_string()),
        ("total-steps", summary.total_steps.to_string()),
        ("passed-pct", format!("{}%", summary.passed_pct)),
        ("failed-pct", format!("{}%", summary.failed_pct)),
        ("skipped-pct", format!("{}%", summary.skipped_pct)),
        ("fatal-pct", format!("{}%", summary.fatal_pct)),
    ];
    for (name, want) in expected_dash {
        match field("dashboard", name) {
            Some(got) if got == want => {}
            got => problems.push(format!("dashboard {name}: {got:?} != {want:?}")),
        }
    }
    match field("dashboard", "total-time") {
        Some(t) if t.starts_with(&summary.total_time()) => {}
        got => problems.push(format!("dashboard total-time: {got:?}")),
    }

    // environment
    let env = &run.environment;
    for (name, want) in [
        ("os-name", &env.os_name),
        ("user-name", &env.user_name),
        ("host-name", &env.host_name),
        ("runtime-version", &env.runtime_version),
        ("framework-version", &env.framework_version),
    ] {
        match field("environment", name) {
            Some(got) if &got == want => {}
            got => problems.push(format!("environment {name}: {got:?} != {want:?}")),
        }
    }

    // per-case sections
    let sections: Vec<_> = doc.select(&sel("section.case")).collect();
    if sections.len() != run.cases.len() {
        problems.push(format!("{} case sections for {} cases", sections.len(), run.cases.len()));
    }
    for (section, case) in sections.iter().zip(&run.cases) {
        let v = section.value();
        if v.attr("data-case-id") != Some(case.case_id.as_str()) {
            problems.push(format!("section {:?} for case {}", v.attr("data-case-id"), case.case_id));
        }
        if v.attr("data-status") != Some(case.status.as_str()) {
            problems.push(format!("case {} status attr {:?}", case.case_id, v.attr("data-status")));
        }
        let rows = section.select(&sel("tr.step")).count();
        if rows != case.steps.len() {
            problems.push(format!("case {}: {rows} step rows, {} steps", case.case_id, case.steps.len()));
        }
    }
    let ids: Vec<String> = doc
        .select(&sel("[id]"))
        .filter_map(|e| e.value().attr("id").map(str::to_string))
        .collect();
    for link in doc.select(&sel("nav#cases-nav a")) {
        let target = link.value().attr("href").unwrap_or("").trim_start_matches('#');
        if !ids.iter().any(|i| i == target) {
            problems.push(format!("nav link to missing #{target}"));
        }
    }

    // screenshots
    let shots = run.cases.iter().flat_map(|c| &c.steps).filter(|s| s.screenshot.is_some()).count();
    let imgs: Vec<_> = doc.select(&sel("img")).collect();
    if imgs.len() != shots {
        problems.push(format!("{} images for {shots} screenshots", imgs.len()));
    }
    for img in imgs {
        let src = img.value().attr("src").unwrap_or("");
        match src.strip_prefix("data:image/png;base64,") {
            Some(b64) => {
                if let Err(e) = decode_png(b64) {
                    problems.push(e);
                }
            }
            None => problems.push(format!("image is not an inline PNG: {:.40}", src)),
        }
    }

    // JSON island
    let islands: Vec<_> = doc.select(&sel("script#run-data[type=\"application/json\"]")).collect();
    if islands.len() != 1 {
        problems.push(format!("{} run-data islands", islands.len()));
    } else {
        let text: String = islands[0].text().collect();
        match serde_json::from_str::<RunData>(&text) {
            Err(e) => problems.push(format!("island does not parse: {e}")),
            Ok(data) => {
                if data.summary != summary {
                    problems.push("island summary differs from run".into());
                }
                if data.tally != run.tally || data.tally_total != run.tally.total() {
                    problems.push("island tally differs from run".into());
                }
                let got: Vec<_> = data.cases.iter().map(|c| (c.id.as_str(), c.status)).collect();
                let want: Vec<_> = run.cases.iter().map(|c| (c.case_id.as_str(), c.status)).collect();
                if got != want {
                    problems.push("island cases differ from run".into());
                }
            }
        }
    }
    problems
}
