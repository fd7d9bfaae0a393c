//! Criterion benchmarks for `macrolab-core`; see `benches/`.
