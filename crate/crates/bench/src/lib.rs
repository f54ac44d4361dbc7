//! Criterion benchmarks for `lcslab`; see `benches/`.
