//! The non-holonomic car on the planar rigid-motion group.
//!
//! Inputs are the forward speed and the heading rate; the body velocity is
//! `(u2, u1, 0)` in the (rot, trans-x, trans-y) basis. Planar rigid motions
//! of the scene leave the inputs untouched (`psi = id`), so the invariant
//! error flow depends on the inputs but not on the driven trajectory.

use nalgebra::{dvector, DMatrix, DVector};

use crate::error::Result;
use crate::groups::Se2;
use crate::lie::AlgebraVector;
use crate::observer::ObserverSpec;
use crate::systems::{ActionSide, InputSignal, InvariantSystem};

/// Input profiles and gain for the car example.
#[derive(Clone)]
pub struct CarConfig {
    /// Speed (m/s) and heading-rate (rad/s) profiles over time.
    pub input: InputSignal,
    /// Correction gain on the position error, 3 x 2.
    pub gain: Option<DMatrix<f64>>,
}

impl Default for CarConfig {
    fn default() -> Self {
        CarConfig { input: InputSignal::constant(dvector![1.0, 0.0]), gain: None }
    }
}

/// Left-invariant unicycle kinematics with a position measurement.
pub fn build_car_system(_cfg: &CarConfig) -> InvariantSystem<Se2> {
    InvariantSystem::new(
        "car",
        ActionSide::Left,
        2,
        2,
        |u: &DVector<f64>| AlgebraVector::from_slice(&[u[1], u[0], 0.0]),
        |_g, u| u.clone(),
        |g, y| {
            let p = Se2::apply(g, &nalgebra::Vector2::new(y[0], y[1]));
            dvector![p[0], p[1]]
        },
        |_u| dvector![0.0, 0.0],
    )
}

/// Observer from the configured constant gain (zero gain when absent).
pub fn car_observer(cfg: &CarConfig) -> Result<ObserverSpec<Se2>> {
    let sys = build_car_system(cfg);
    match &cfg.gain {
        Some(gain) => ObserverSpec::linear(&sys, gain.clone()),
        None => Ok(ObserverSpec::open_loop(&sys)),
    }
}
