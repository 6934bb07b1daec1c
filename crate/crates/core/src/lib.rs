//! Bicyclic and Bass cyclic units in integral group rings, and a decision
//! engine for whether pairs of them generate free groups.
//!
//! The pipeline is: build a [`perm_group::FiniteGroup`], form units in
//! [`group_ring::GroupRingElement`], take the spectrum of the product of
//! their nilpotent parts through the regular representation
//! ([`spectral`]), and classify the eigenvalues ([`freeness`]).
//! [`pingpong`] holds exact cyclotomic linear algebra for checking
//! ping-pong hypotheses on explicit representations.

pub mod cli;
pub mod error;
pub mod freeness;
pub mod group_ring;
pub mod numeric;
pub mod perm_group;
pub mod pingpong;
pub mod poly;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use freeness::{
    classify_point, group_invariant, min_power, pair_verdict, salwa_check, Bound, FreePointKB,
    InvariantMode, InvariantResult, MinPower, PointStatus, Verdict,
};
pub use group_ring::GroupRingElement;
pub use perm_group::{FiniteGroup, Permutation, Subgroup};
pub use spectral::{IntMatrix, Spectrum};
pub use units::{UnitDescriptor, UnitKind, UnitValue};
