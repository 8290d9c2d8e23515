//! Criterion benchmarks for the hot paths of `rs-toolkit-core`; see `benches/`.
