//! Symmetry-preserving observers on matrix Lie groups.
//!
//! The crate builds state estimators whose correction terms respect the
//! symmetry of the plant. Single construction recipe:
//!
//! 1. describe the plant intrinsically ([`systems::InvariantSystem`]): a
//!    body-velocity map, group actions on inputs and outputs, and the output
//!    at the identity;
//! 2. pick a gain ([`observer::ObserverSpec`]), either by pole placement on
//!    the linearized invariant error equation or by the adjoint-transpose
//!    rule for right-equivariant outputs;
//! 3. integrate state and estimate with the group-preserving schemes in
//!    [`integrator`].
//!
//! The error between truth and estimate is the group-valued `x^-1 xhat`
//! (`xhat x^-1` for right symmetry); its flow has a closed form evaluated by
//! [`observer::error_rhs`], independent of the trajectory for
//! right-equivariant outputs and independent of the pose (though not the
//! inputs) whenever the input action is trivial.
//!
//! Fixed conventions, used everywhere including file formats: basis order is
//! (rot-x, rot-y, rot-z) on rotations and (rot, trans-x, trans-y) on planar
//! motions; the scalar product on the algebra is Euclidean in that basis.

pub mod error;
pub mod groups;
pub mod integrator;
pub mod lie;
pub mod models;
pub mod observer;
pub mod systems;
pub mod trajectories;

pub use error::{Error, Result};
