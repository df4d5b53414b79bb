//! Randomized property suites: reduction determinism and unique decomposition
//! against the brute-force split oracle in all three calculi, substitution
//! laws, printer/parser round trips, context-substitution commutation, purity
//! of delimited terms, and the capture/abort round trip.

use nfbisim_core::selftest::*;
use nfbisim_core::syntax::CalculusId;

const CASES: usize = 1000;
const MAX_SIZE: usize = 12;

#[test]
fn unique_decomposition_lambda() {
    prop_unique_decomposition(CalculusId::Lambda, CASES, MAX_SIZE, 11).unwrap();
}

#[test]
fn unique_decomposition_shift_reset() {
    prop_unique_decomposition(CalculusId::ShiftReset, CASES, MAX_SIZE, 12).unwrap();
}

#[test]
fn unique_decomposition_callcc() {
    prop_unique_decomposition(CalculusId::CallccAbort, CASES, MAX_SIZE, 13).unwrap();
}

#[test]
fn substitution_laws() {
    prop_substitution_laws(CASES, MAX_SIZE, 21).unwrap();
}

#[test]
fn parse_print_round_trips() {
    prop_parse_print_round_trip(CalculusId::Lambda, CASES, MAX_SIZE, 31).unwrap();
    prop_parse_print_round_trip(CalculusId::ShiftReset, CASES, MAX_SIZE, 32).unwrap();
    prop_parse_print_round_trip(CalculusId::CallccAbort, CASES, MAX_SIZE, 33).unwrap();
}

#[test]
fn context_substitution_commutes_with_reduction() {
    prop_ctx_subst_commutes(CASES, MAX_SIZE, 41).unwrap();
}

#[test]
fn pure_terms_and_capture_purity() {
    prop_purity(CASES, MAX_SIZE, 51).unwrap();
}

#[test]
fn capture_abort_round_trip() {
    prop_capture_abort_round_trip(200, 61).unwrap();
}
