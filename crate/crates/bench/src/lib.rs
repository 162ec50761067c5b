//! Criterion benchmarks for the quadgenus constructions; see `benches/`.
