//! Exact-arithmetic engine for the equivariant exact sequences of
//! combinatorially presented torus spaces.
//!
//! The crate builds the Chang-Skjelbred, Atiyah-Bredon and
//! Goertsches-Toeben complexes for supported space models (complete
//! simplicial fans, one-skeleton sphere assemblies, single orbits,
//! disjoint unions, and products with a freely acting circle), verifies
//! their exactness degreewise over Q, F_p, Z and Z[1/S], and certifies
//! the isotropy and dimension/depth/Cohen-Macaulay hypotheses that the
//! corresponding theorems require. All arithmetic is exact.

pub mod abseq;
pub mod catalog;
pub mod grmod;
pub mod io;
pub mod lattice;
pub mod poly;
pub mod ring;
pub mod slices;
pub mod spaces;

pub use ring::{make_ring, CoefficientRing, FgModule, PolynomialRingContext};

/// Configure the global worker pool. Results are independent of the
/// thread count; reports must be byte-identical across settings.
pub fn set_parallelism(jobs: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build_global();
}
