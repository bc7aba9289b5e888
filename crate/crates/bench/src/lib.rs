//! Criterion benchmarks for `qnd-core`; see `benches/`.
