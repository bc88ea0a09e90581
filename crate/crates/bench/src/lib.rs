//! Benchmarks for the ergotropic-volume backends; see `benches/`.
