//! Benchmarks for the twinbeam pipeline live in `benches/`.
