//! Loads login rows from a CSV file and expands one into keyword steps.

use std::path::Path;

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::{open_file_source, read_cases};
use hybrid_taf::engine::expand_login_case;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/login_cases.csv");
    let source = open_file_source(&path).expect("fixture exists");
    println!("columns: {:?}", source.column_names());

    let cases = read_cases(&source).expect("readable rows");
    for case in cases.iter().take(4) {
        println!("{} {:?}", case.case_id, case.fields);
    }
    println!("... {} rows in total", cases.len());

    let config = parse_config(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\n\
         WEBDRIVER_URL=http://127.0.0.1:4444\nDATA_SOURCE=FILE\n",
    )
    .unwrap();
    let steps = expand_login_case(&cases[0], &config, &config.locators).unwrap();
    println!("\n{} expands to:", cases[0].case_id);
    for step in &steps {
        println!("  {step}");
    }
}
