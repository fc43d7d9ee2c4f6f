//! Empty library: this crate exists only to host the benchmark
//! targets under `benches/`.
