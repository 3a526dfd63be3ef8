//! Linear baseline on the abelian plane: integrator dynamics with a full
//! position measurement. Every observer identity is checkable by hand here,
//! and a deliberately broken variant exercises the negative paths of the
//! equivariance checker.

use nalgebra::{dvector, DVector};

use crate::groups::R2;
use crate::lie::AlgebraVector;
use crate::systems::{ActionSide, InvariantSystem};

/// `dx/dt = u`, `y = x`, with translations acting on the output.
pub fn build_reference_system() -> InvariantSystem<R2> {
    InvariantSystem::new(
        "reference",
        ActionSide::Left,
        2,
        2,
        |u: &DVector<f64>| AlgebraVector::from_slice(&[u[0], u[1]]),
        |_g, u| u.clone(),
        |g: &nalgebra::Vector2<f64>, y| dvector![y[0] + g[0], y[1] + g[1]],
        |_u| dvector![0.0, 0.0],
    )
}

/// Same system with a state-dependent output bias, which destroys
/// equivariance. Negative control for the identity checker.
pub fn build_broken_reference_system() -> InvariantSystem<R2> {
    InvariantSystem::new(
        "reference-broken",
        ActionSide::Left,
        2,
        2,
        |u: &DVector<f64>| AlgebraVector::from_slice(&[u[0], u[1]]),
        |_g, u| u.clone(),
        |g: &nalgebra::Vector2<f64>, y| dvector![y[0] + g[0] + 0.1 * g[0].sin(), y[1] + g[1]],
        |_u| dvector![0.0, 0.0],
    )
}
