//! Benchmark-only crate; see the `projection` bench target.
