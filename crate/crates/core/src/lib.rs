//! Breadth-first and depth-first encodings of random maps and graphs with
//! surplus.
//!
//! The crate has three layers:
//!
//! * exact combinatorics at small size: [`lattice_paths`], [`maps`] and the
//!   enumerators, used as oracles;
//! * samplers for tilted excursion laws and the decorations that turn a tree
//!   into a map or graph ([`samplers`]);
//! * estimators comparing the different routes to the same limit law
//!   ([`estimators`]).
//!
//! [`persistence`] and [`cli`] provide file formats, run manifests and the
//! `surplus-lab` command line.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod samplers;
pub mod lattice_paths;
pub mod local_time;
pub mod maps;
pub mod persistence;
pub mod rng;

pub use error::{Error, Result};
pub use lattice_paths::{LabeledTree, LatticeBridge, LatticeExcursion, PlaneTree};
pub use local_time::{CornerWeights, LocalTimeField};
pub use maps::{AdmissibleCorners, Mode, PermutationPairing, RootedMap};
pub use rng::RngStream;
pub use samplers::WeightedEnsemble;
