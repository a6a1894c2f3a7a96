//! Benchmarks for the exact circuit-walk engine live in `benches/`.
