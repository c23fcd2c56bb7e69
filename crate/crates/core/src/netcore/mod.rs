//! Signed and binary network containers, panels, and the exact
//! formation/persistence decomposition of a signed transition.

pub(crate) mod bits;
mod decompose;
mod network;

pub use decompose::{decompose, recombine, DyadSet, TransitionDecomposition};
pub use network::{
    all_dyads, densities, dyad_count, BinaryNetwork, Densities, Dyad, DyadState, NetworkPanel,
    NodeSet, Sign, SignAssignment, SignedNetwork,
};
