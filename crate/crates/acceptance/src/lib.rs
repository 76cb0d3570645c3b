//! Acceptance suite lives in tests/acceptance.rs; see README for how to run it.
