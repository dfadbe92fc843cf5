//! Secret-key rate regions for two users observing correlated sources and
//! communicating with a base station over a generalized multiple access
//! channel, where each user eavesdrops on the other's key.
//!
//! The crate has five layers:
//!
//! * [`prob`] — dense joint probability tables over named finite alphabets,
//!   with entropies, (conditional) mutual information, Markov-chain tests,
//!   and probability-simplex grid enumeration.
//! * [`models`] — the source triple, the channel law, auxiliary-variable
//!   configurations, and the composition rules producing the joint laws the
//!   rate bounds are evaluated on.
//! * [`regions`] — the achievable (inner) rate region, the explicit outer
//!   bound, and the special-case capacity region, synthesized by simplex
//!   search and 2-D convexification.
//! * [`gaussian`] — closed-form rate region for the scalar Gaussian model
//!   with power-constrained inputs, its feasibility constraints, and the
//!   noise-sweep machinery.
//! * [`sim`] — a desk-scale Monte Carlo implementation of the two-layer
//!   binning + wiretap coding scheme: random codebooks, partition maps,
//!   joint-typicality encoding/decoding, and empirical reliability/leakage
//!   measurement.

pub mod gaussian;
pub mod models;
pub mod prob;
pub mod regions;
pub mod sim;

pub use models::{AuxiliaryConfig, ChannelModel, ModelFile, SourceModel, SpecialCaseReport};
pub use prob::{Axis, CondPMF, JointPMF, ProbError};
pub use regions::{RateCorner, RateRegion};
