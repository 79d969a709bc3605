//! Criterion benchmarks for swipt-core live in `benches/`.
