//! Benchmarks live in `benches/`; run them with `cargo bench -p e8-bench`.
