//! Fully wired example systems: attitude estimation on rotations, the
//! non-holonomic car on planar rigid motions, and a linear baseline.

mod attitude;
mod car;
mod reference;

pub use attitude::{
    attitude_observability, build_attitude_system, build_attitude_system_numeric,
    default_attitude_observer, AttitudeConfig, ObservabilityReport,
};
pub use car::{build_car_system, car_observer, CarConfig};
pub use reference::{build_broken_reference_system, build_reference_system};
