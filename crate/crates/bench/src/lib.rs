//! Criterion benchmarks for `ramanujan-core`; see `benches/`.
