//! Multiple-relaxation-time lattice Boltzmann schemes on the D1Q3 and D2Q9
//! lattices, with bounce-back style boundary closures and the tooling to
//! measure where those closures put the wall.
//!
//! Everything runs in lattice units internally (Δx = Δt = λ = 1); physical
//! spacings enter only through [`LatticeSpec`].

pub mod boundary;
pub mod collision;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod scheme;

pub use boundary::{BoundaryClosure, ClosureKind, Face, Topology};
pub use collision::{D2q9Rates, DrivingSpec, EquilibriumParams, RelaxationSettings};
pub use error::{Error, Result};
pub use lattice::{D1q3Basis, GridShape, LatticeSpec, MomentBasis, PopulationField};
pub use scheme::{ChannelConfig, ChannelScheme, DiffusionConfig, DiffusionScheme, Evolve};
