//! Acceptance checks for `teleport-core`. The checks live in
//! `tests/acceptance.rs` and run with `cargo test -p teleport-verify`.
//!
//! This package sorts after the library package, so under the default
//! fail-fast behavior of `cargo test --workspace` every other suite has
//! already run by the time the acceptance binary reports.
