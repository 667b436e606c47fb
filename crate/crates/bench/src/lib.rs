//! Benchmarks only; see `benches/pipeline.rs`. Run with `cargo bench -p reqexec-bench`.
