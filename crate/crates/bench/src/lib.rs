//! Shared fixtures for the engine benchmarks.

use sl2prim::orbits::orbit_representatives;
use sl2prim::{CyclicTriple, Ring};

/// Parses a ring spec known to be valid.
pub fn ring(spec: &str) -> Ring {
    Ring::parse(spec).expect("valid ring spec")
}

/// Orbit representatives over the level ring `o_{r/2}` of an even-length ring.
pub fn representatives(ring: &Ring) -> Vec<CyclicTriple> {
    let level = ring.with_length(ring.r() / 2).expect("level ring");
    orbit_representatives(&level).into_iter().map(|c| c.representative).collect()
}
