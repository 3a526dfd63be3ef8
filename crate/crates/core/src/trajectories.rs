//! Permanent trajectories: motions along which the invariant input is
//! constant, generalizing equilibrium points.
//!
//! Given a constant invariant input `ubar`, the motion is a translated
//! one-parameter subgroup driven by `wbar = f_e(ubar)`. The translation sits
//! on the side opposite to the symmetry: left-symmetric systems move along
//! `x0 * exp(t wbar)`, right-equivariant ones along `exp(t wbar) * x0`, which
//! is exactly what keeps `I(x(t), u(t))` pinned at `ubar` in both cases.

use nalgebra::DVector;

use crate::lie::{AlgebraVector, LieGroup};
use crate::systems::{ActionSide, InputSignal, InvariantSystem};

/// A trajectory with constant invariant input.
pub struct PermanentTrajectory<G: LieGroup> {
    sys: InvariantSystem<G>,
    x0: G::Element,
    ubar: DVector<f64>,
    wbar: AlgebraVector<G>,
    duration: f64,
}

impl<G: LieGroup> Clone for PermanentTrajectory<G> {
    fn clone(&self) -> Self {
        PermanentTrajectory {
            sys: self.sys.clone(),
            x0: self.x0.clone(),
            ubar: self.ubar.clone(),
            wbar: self.wbar.clone(),
            duration: self.duration,
        }
    }
}

impl<G: LieGroup> PermanentTrajectory<G> {
    pub fn new(sys: &InvariantSystem<G>, x0: G::Element, ubar: DVector<f64>, duration: f64) -> Self {
        let wbar = sys.body_velocity_map(&ubar);
        PermanentTrajectory { sys: sys.clone(), x0, ubar, wbar, duration }
    }

    pub fn invariant_input(&self) -> &DVector<f64> {
        &self.ubar
    }

    /// The constant algebra velocity `f_e(ubar)`.
    pub fn velocity(&self) -> &AlgebraVector<G> {
        &self.wbar
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn initial_state(&self) -> &G::Element {
        &self.x0
    }

    /// State at time `t`.
    pub fn state_at(&self, t: f64) -> G::Element {
        let flow = G::exp(&self.wbar.scale(t));
        match self.sys.side() {
            ActionSide::Left => G::compose(&self.x0, &flow),
            ActionSide::Right => G::compose(&flow, &self.x0),
        }
    }

    /// The input that keeps the trajectory permanent: `psi_{x(t)}(ubar)`.
    pub fn input_at(&self, t: f64) -> DVector<f64> {
        self.sys.input_action(&self.state_at(t), &self.ubar)
    }

    /// The whole required input as a signal for the integrator.
    pub fn input_signal(&self) -> InputSignal {
        let traj = self.clone();
        InputSignal::from_fn(self.ubar.len(), move |t| traj.input_at(t))
    }
}

/// Verdict of a permanence check.
#[derive(Clone, Debug)]
pub struct PermanenceReport {
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl PermanenceReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

/// Default absolute tolerance on the drift of the invariant input.
pub const PERMANENCE_TOLERANCE: f64 = 1e-8;

/// Checks whether sampled states and inputs keep the invariant input
/// constant: reports the worst drift of `I(x(t), u(t))` from its initial
/// value.
pub fn is_permanent<G: LieGroup>(
    sys: &InvariantSystem<G>,
    times: &[f64],
    states: &[G::Element],
    input: &InputSignal,
    tolerance: f64,
) -> PermanenceReport {
    assert_eq!(times.len(), states.len(), "times and states must align");
    let mut reference: Option<DVector<f64>> = None;
    let mut max_deviation: f64 = 0.0;
    for (t, x) in times.iter().zip(states) {
        let inv = sys.invariant_input(x, &input.eval(*t));
        match &reference {
            None => reference = Some(inv),
            Some(first) => max_deviation = max_deviation.max((inv - first).norm()),
        }
    }
    PermanenceReport { max_deviation, tolerance }
}
