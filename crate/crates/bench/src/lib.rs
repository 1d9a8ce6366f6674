//! Benchmark-only crate; see `benches/thermo.rs`.
