//! Benchmarks live in `benches/`; run `cargo bench -p fungal-bench`.
