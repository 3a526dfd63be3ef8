//! Magnetic-aided attitude estimation on the rotation group.
//!
//! The body spins with a gyro-measured angular rate; the outputs are the
//! gravity and earth-field directions seen in the body frame,
//! `y = (R^-1 G, R^-1 B)`. Moving the state by right multiplication (a change
//! of body frame) rotates both measured vectors the same way, so the output
//! is right equivariant and the invariant error flow is autonomous.
//!
//! The accelerometer is modeled as measuring `R^-1 G` exactly, i.e. the
//! craft's own acceleration is negligible against gravity.

use nalgebra::{dvector, DMatrix, DVector, Vector3};

use crate::groups::So3;
use crate::lie::{AlgebraVector, LieGroup};
use crate::observer::{design_gain_adjoint, linearize, observability_rank, ObserverSpec};
use crate::systems::{ActionSide, InvariantSystem};

/// Reference vectors, gains and output selection for the attitude example.
#[derive(Clone, Debug)]
pub struct AttitudeConfig {
    /// Gravity vector in the earth frame, m/s^2.
    pub gravity: Vector3<f64>,
    /// Inclination of the earth field above the horizontal plane, degrees.
    pub dip_deg: f64,
    /// Gain on the gravity-direction error.
    pub k_gravity: f64,
    /// Gain on the field-direction error.
    pub k_field: f64,
    /// Drop the accelerometer and measure the field alone (unobservable).
    pub magnetometer_only: bool,
}

impl Default for AttitudeConfig {
    fn default() -> Self {
        AttitudeConfig {
            gravity: Vector3::new(0.0, 0.0, 9.81),
            dip_deg: 60.0,
            k_gravity: 1.0,
            k_field: 1.0,
            magnetometer_only: false,
        }
    }
}

impl AttitudeConfig {
    /// Unit earth-field vector at the configured dip angle.
    pub fn field_vector(&self) -> Vector3<f64> {
        let dip = self.dip_deg.to_radians();
        Vector3::new(dip.cos(), 0.0, dip.sin())
    }

    /// Angle between gravity and field directions, radians.
    pub fn reference_angle(&self) -> f64 {
        let g = self.gravity.normalize();
        let b = self.field_vector();
        g.dot(&b).clamp(-1.0, 1.0).acos()
    }

    /// Reference vectors too close to parallel cannot pin all three axes.
    pub fn references_collinear(&self) -> bool {
        let angle = self.reference_angle();
        angle < 1e-3 || angle > std::f64::consts::PI - 1e-3
    }

    fn skew(v: &Vector3<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0])
    }

    /// Analytic `dh/dx` at the identity: stacked cross-product matrices of
    /// the reference vectors.
    pub fn output_jacobian(&self) -> DMatrix<f64> {
        let b = Self::skew(&self.field_vector());
        if self.magnetometer_only {
            return b;
        }
        let g = Self::skew(&self.gravity);
        let mut out = DMatrix::zeros(6, 3);
        out.view_mut((0, 0), (3, 3)).copy_from(&g);
        out.view_mut((3, 0), (3, 3)).copy_from(&b);
        out
    }
}

fn rotate_blocks(g: &<So3 as LieGroup>::Element, y: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(y.len());
    for block in 0..y.len() / 3 {
        let v = Vector3::new(y[3 * block], y[3 * block + 1], y[3 * block + 2]);
        let r = So3::rotate(g, &v);
        out[3 * block] = r[0];
        out[3 * block + 1] = r[1];
        out[3 * block + 2] = r[2];
    }
    out
}

fn attitude_system_core(cfg: &AttitudeConfig, analytic_jacobian: bool) -> InvariantSystem<So3> {
    let gravity = cfg.gravity;
    let field = cfg.field_vector();
    let output_dim = if cfg.magnetometer_only { 3 } else { 6 };
    let magnetometer_only = cfg.magnetometer_only;

    let sys = InvariantSystem::new(
        "attitude",
        ActionSide::Right,
        3,
        output_dim,
        // gyro input is the body velocity itself
        |u: &DVector<f64>| AlgebraVector::from_slice(&[u[0], u[1], u[2]]),
        // differential of the interior automorphism
        |g, u| {
            let moved = So3::adjoint(g) * DVector::from_row_slice(&[u[0], u[1], u[2]]);
            dvector![moved[0], moved[1], moved[2]]
        },
        // change of body frame rotates every measured vector by g^-1
        |g, y| rotate_blocks(&So3::inverse(g), y),
        move |_u| {
            if magnetometer_only {
                dvector![field[0], field[1], field[2]]
            } else {
                dvector![gravity[0], gravity[1], gravity[2], field[0], field[1], field[2]]
            }
        },
    );
    if analytic_jacobian {
        let jac = cfg.output_jacobian();
        sys.with_output_jacobian(move |_u| jac.clone())
    } else {
        sys
    }
}

/// Left-invariant rigid-body rotation with body-frame vector measurements.
pub fn build_attitude_system(cfg: &AttitudeConfig) -> InvariantSystem<So3> {
    attitude_system_core(cfg, true)
}

/// Same system with the output Jacobian left to central differences; used to
/// cross-check the analytic form.
pub fn build_attitude_system_numeric(cfg: &AttitudeConfig) -> InvariantSystem<So3> {
    attitude_system_core(cfg, false)
}

/// Adjoint-transpose observer with per-sensor weights `k_gravity`, `k_field`.
pub fn default_attitude_observer(cfg: &AttitudeConfig) -> crate::error::Result<ObserverSpec<So3>> {
    let sys = build_attitude_system(cfg);
    let weights: Vec<f64> = if cfg.magnetometer_only {
        vec![cfg.k_field; 3]
    } else {
        let mut w = vec![cfg.k_gravity; 3];
        w.extend_from_slice(&[cfg.k_field; 3]);
        w
    };
    design_gain_adjoint(&sys, &weights)
}

/// Observability of the linearized attitude pair.
#[derive(Clone, Debug)]
pub struct ObservabilityReport {
    pub rank: usize,
    pub state_dim: usize,
    pub observable: bool,
    /// Reference vectors nearly parallel: the report is downgraded even if
    /// the numerical rank looks full.
    pub collinear_references: bool,
}

pub fn attitude_observability(cfg: &AttitudeConfig) -> ObservabilityReport {
    let sys = build_attitude_system(cfg);
    let pair = linearize(&sys, None, &dvector![0.0, 0.0, 0.0]);
    let rank = observability_rank(&pair.a, &pair.c);
    let collinear = !cfg.magnetometer_only && cfg.references_collinear();
    ObservabilityReport {
        rank,
        state_dim: 3,
        observable: rank == 3 && !collinear,
        collinear_references: collinear,
    }
}
