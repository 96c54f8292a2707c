mod common;

use common::props;

#[test]
fn tally_conservation_over_random_suites() {
    props::tally_conservation_over_random_suites().unwrap();
}

#[test]
fn tally_conservation_over_random_scripts() {
    props::tally_conservation_over_random_scripts().unwrap();
}

#[test]
fn status_fold_algebra() {
    props::status_fold_algebra().unwrap();
}

#[test]
fn pte_monotonic_and_bounded() {
    props::pte_monotonic_and_bounded().unwrap();
}

#[test]
fn asp_linear() {
    props::asp_linear().unwrap();
}

#[test]
fn ttp_scales() {
    props::ttp_scales().unwrap();
}

#[test]
fn send_keys_and_clear_model() {
    props::send_keys_and_clear_model().unwrap();
}

#[test]
fn percentages_sum_to_one_hundred() {
    props::percentages_sum_to_one_hundred().unwrap();
}

#[test]
fn config_round_trip() {
    props::config_round_trip().unwrap();
}

#[test]
fn csv_round_trip() {
    props::csv_round_trip().unwrap();
}
