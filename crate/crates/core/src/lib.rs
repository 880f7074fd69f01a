//! Certification of Hamilton-connectivity from Ore-type degree conditions,
//! the `(n+1)`-closure, an edge-count condition and a signless Laplacian
//! spectral-radius condition, together with the extremal families that
//! escape those conditions and an exact Hamilton-path oracle.

pub mod certifier;
pub mod corpus;
pub mod families;
pub mod graph;
pub mod hamilton;
pub mod io;
pub mod random;
pub mod rational;
pub mod rng;
pub mod spectral;
pub mod transforms;

pub use graph::{EdgeSet, Graph, GraphError};
pub use rational::RationalValue;
pub use spectral::SpectralEstimate;
