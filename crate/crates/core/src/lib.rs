//! Exact counting and statistical analysis of vertex partitions whose
//! induced degrees satisfy residue conditions modulo `q`.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: simple graphs with bit-packed adjacency, seeded `G(n, p)`
//!   sampling and the edge-list text format.
//! * [`gf2`]: word-parallel linear algebra over GF(2) and the parity systems
//!   that count two-part partitions.
//! * [`modq`]: incidence matrices over `(Z/qZ)^k`, subgroup closure, and the
//!   combinatorial-subspace audit.
//! * [`partition`]: the definitional brute-force enumerator of good
//!   partitions, used as ground truth everywhere else.
//! * [`fourier`]: exact cyclotomic arithmetic, degree-residue probabilities
//!   and first moments.
//! * [`dist`]: exact finite-`n` and limiting distributions for `q = 2`.
//! * [`experiment`]: the seeded Monte Carlo harness and its comparisons.

pub mod bits;
pub mod dist;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod gf2;
pub mod graph;
pub mod modq;
pub mod partition;
pub mod pmf;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{Graph, Probability, VertexSet};
pub use partition::{CanonicalPartition, PartitionSpec};
pub use pmf::RationalPmf;
