//! Fixtures shared by the benchmarks.

use remixgraph::{generate, LineageGraph, SynthConfig};

/// A seeded synthetic population of `n` designs.
pub fn population(n: usize, p_multi: f64) -> LineageGraph {
    let mut config = SynthConfig::new(n, 7);
    config.p_multi = p_multi;
    generate(&config).expect("valid synth config")
}
