//! Numerical constructions around the parallel transport map of a compact
//! matrix Lie group.
//!
//! * [`lie`]: compact groups `SU(2)`, `SU(3)`, `SO(3)`, their algebras with an
//!   `Ad`-invariant inner product, exponential and logarithm, and root
//!   decompositions relative to a regular torus vector.
//! * [`loops`]: the Hilbert space of algebra-valued paths on `[0, 1]`, its
//!   orthonormal loop basis, group paths and the gauge action.
//! * [`transport`]: the parallel transport map `phi`, its differential and
//!   submersion/equivariance checks.
//! * [`bundle`]: trivial principal bundles over toy surfaces, the pull-back
//!   connection map along a loop, holonomy maps and their homothety.
//! * [`spectra`]: fibre shape operators, regularized traces and
//!   isoparametric probes.
//!
//! Every type is generic over a [`Real`] scalar; the aliases below fix `f64`.

pub mod bundle;
mod error;
pub mod lie;
pub mod loops;
pub mod random;
pub mod records;
mod scalar;
pub mod spectra;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::{lit, to_f64, Real};

pub use lie::{exp_group, log_group, root_decomposition, GroupId};
pub use transport::{solve_transport, Scheme};

pub type AlgebraVector = lie::AlgebraVector<f64>;
pub type GroupElement = lie::GroupElement<f64>;
pub type TorusDecomposition = lie::TorusDecomposition<f64>;
pub type AlgebraLoop = loops::AlgebraLoop<f64>;
pub type GroupPath = loops::GroupPath<f64>;
pub type TransportSolution = transport::TransportSolution<f64>;
pub type BaseLoop = bundle::BaseLoop<f64>;
pub type ConnectionForm = bundle::ConnectionForm<f64>;
pub type LoopFrame = bundle::LoopFrame<f64>;

pub type AlgebraVector32 = lie::AlgebraVector<f32>;
pub type GroupElement32 = lie::GroupElement<f32>;
pub type AlgebraLoop32 = loops::AlgebraLoop<f32>;
