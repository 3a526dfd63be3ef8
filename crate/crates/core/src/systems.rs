//! Intrinsic descriptions of invariant systems.
//!
//! A system is specified by the minimal data that the symmetry determines it
//! from: the body-velocity map `f_e` (the vector field at the identity), the
//! input action `psi`, the output action `rho`, and the output at the
//! identity `h_e`. The full dynamics and output map are reconstructed from
//! these, so the defining invariance identities hold by construction and the
//! randomized checker below only guards against ill-formed actions.
//!
//! Two variants exist:
//!
//! * [`ActionSide::Left`]: state transforms by left multiplication,
//!   `psi`/`rho` are left actions, and the dynamics satisfy
//!   `f(g x, psi_g(u)) = DL_g f(x, u)`.
//! * [`ActionSide::Right`]: left-invariant dynamics driven by a body
//!   velocity, with a right-equivariant output `h(x g) = rho_g(h(x))`. The
//!   input is acted on by the differential of the interior automorphism,
//!   which is exactly [`LieGroup::adjoint`].

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::{sample_element, AlgebraVector, LieGroup};

/// Which side the symmetry acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionSide {
    Left,
    Right,
}

type VelocityFn<G> = Arc<dyn Fn(&DVector<f64>) -> AlgebraVector<G> + Send + Sync>;
type ActionFn<G> =
    Arc<dyn Fn(&<G as LieGroup>::Element, &DVector<f64>) -> DVector<f64> + Send + Sync>;
type OutputFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&DVector<f64>) -> nalgebra::DMatrix<f64> + Send + Sync>;

/// An invariant system on the group `G`, described intrinsically.
pub struct InvariantSystem<G: LieGroup> {
    name: String,
    side: ActionSide,
    input_dim: usize,
    output_dim: usize,
    body_velocity: VelocityFn<G>,
    input_action: ActionFn<G>,
    output_action: ActionFn<G>,
    output_at_identity: OutputFn,
    output_jacobian: Option<JacobianFn>,
    velocity_jacobian: Option<JacobianFn>,
    input_action_jacobian: Option<JacobianFn>,
}

impl<G: LieGroup> Clone for InvariantSystem<G> {
    fn clone(&self) -> Self {
        InvariantSystem {
            name: self.name.clone(),
            side: self.side,
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            body_velocity: self.body_velocity.clone(),
            input_action: self.input_action.clone(),
            output_action: self.output_action.clone(),
            output_at_identity: self.output_at_identity.clone(),
            output_jacobian: self.output_jacobian.clone(),
            velocity_jacobian: self.velocity_jacobian.clone(),
            input_action_jacobian: self.input_action_jacobian.clone(),
        }
    }
}

impl<G: LieGroup> InvariantSystem<G> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        side: ActionSide,
        input_dim: usize,
        output_dim: usize,
        body_velocity: impl Fn(&DVector<f64>) -> AlgebraVector<G> + Send + Sync + 'static,
        input_action: impl Fn(&G::Element, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        output_action: impl Fn(&G::Element, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        output_at_identity: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        InvariantSystem {
            name: name.into(),
            side,
            input_dim,
            output_dim,
            body_velocity: Arc::new(body_velocity),
            input_action: Arc::new(input_action),
            output_action: Arc::new(output_action),
            output_at_identity: Arc::new(output_at_identity),
            output_jacobian: None,
            velocity_jacobian: None,
            input_action_jacobian: None,
        }
    }

    /// Registers an analytic `dh/dx(e, u)` used instead of central differences.
    pub fn with_output_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> nalgebra::DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.output_jacobian = Some(Arc::new(jac));
        self
    }

    /// Registers an analytic `df_e/du`.
    pub fn with_velocity_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> nalgebra::DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.velocity_jacobian = Some(Arc::new(jac));
        self
    }

    /// Registers an analytic `dpsi/dg(e, u)`.
    pub fn with_input_action_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> nalgebra::DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.input_action_jacobian = Some(Arc::new(jac));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn side(&self) -> ActionSide {
        self.side
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn body_velocity_map(&self, u: &DVector<f64>) -> AlgebraVector<G> {
        (self.body_velocity)(u)
    }

    pub fn input_action(&self, g: &G::Element, u: &DVector<f64>) -> DVector<f64> {
        (self.input_action)(g, u)
    }

    pub fn output_action(&self, g: &G::Element, y: &DVector<f64>) -> DVector<f64> {
        (self.output_action)(g, y)
    }

    pub fn output_at_identity(&self, u: &DVector<f64>) -> DVector<f64> {
        (self.output_at_identity)(u)
    }

    pub(crate) fn output_jacobian_override(&self) -> Option<&JacobianFn> {
        self.output_jacobian.as_ref()
    }

    pub(crate) fn velocity_jacobian_override(&self) -> Option<&JacobianFn> {
        self.velocity_jacobian.as_ref()
    }

    pub(crate) fn input_action_jacobian_override(&self) -> Option<&JacobianFn> {
        self.input_action_jacobian.as_ref()
    }

    /// The complete invariant of the pair `(x, u)`: `psi_{x^-1}(u)`.
    ///
    /// Unchanged when `(x, u)` is moved by the group on the matching side.
    pub fn invariant_input(&self, x: &G::Element, u: &DVector<f64>) -> DVector<f64> {
        self.input_action(&G::inverse(x), u)
    }

    /// Left-trivialized (body-frame) velocity of the state flow at `(x, u)`.
    ///
    /// Left systems evaluate `f_e` on the invariant input; right systems are
    /// driven directly by the body velocity and are independent of `x`.
    pub fn body_velocity_at(&self, x: &G::Element, u: &DVector<f64>) -> AlgebraVector<G> {
        match self.side {
            ActionSide::Left => self.body_velocity_map(&self.invariant_input(x, u)),
            ActionSide::Right => self.body_velocity_map(u),
        }
    }

    /// The reconstructed output map `h(x, u)`.
    pub fn output(&self, x: &G::Element, u: &DVector<f64>) -> DVector<f64> {
        match self.side {
            ActionSide::Left => {
                let h_e = self.output_at_identity(&self.invariant_input(x, u));
                self.output_action(x, &h_e)
            }
            ActionSide::Right => {
                let h_e = self.output_at_identity(u);
                self.output_action(x, &h_e)
            }
        }
    }

    /// Measured output moved into the estimate's frame minus the predicted
    /// output; the quantity every observer correction consumes.
    pub fn output_error(&self, xhat: &G::Element, u: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let moved = self.output_action(&G::inverse(xhat), y);
        let predicted = match self.side {
            ActionSide::Left => self.output_at_identity(&self.invariant_input(xhat, u)),
            ActionSide::Right => self.output_at_identity(u),
        };
        moved - predicted
    }

    /// Runs the randomized identity suite on `samples` random triples.
    pub fn check_equivariance(&self, samples: usize, seed: u64) -> EquivarianceReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = 1e-8;
        let mut psi_comp: f64 = 0.0;
        let mut rho_comp: f64 = 0.0;
        let mut psi_id: f64 = 0.0;
        let mut rho_id: f64 = 0.0;
        let mut invariant: f64 = 0.0;
        let mut velocity: f64 = 0.0;
        let mut equivariance: f64 = 0.0;

        for _ in 0..samples {
            let g1 = sample_element::<G, _>(&mut rng, 1.2);
            let g2 = sample_element::<G, _>(&mut rng, 1.2);
            let x = sample_element::<G, _>(&mut rng, 1.2);
            let u = DVector::from_fn(self.input_dim, |_, _| rng.random_range(-1.5..1.5));
            let y_probe = DVector::from_fn(self.output_dim, |_, _| rng.random_range(-1.5..1.5));

            // action composition law, on the side the system declares
            let nested_psi = self.input_action(&g2, &self.input_action(&g1, &u));
            let nested_rho = self.output_action(&g2, &self.output_action(&g1, &y_probe));
            let (joint_psi, joint_rho) = match self.side {
                ActionSide::Left => (
                    self.input_action(&G::compose(&g2, &g1), &u),
                    self.output_action(&G::compose(&g2, &g1), &y_probe),
                ),
                ActionSide::Right => (
                    self.input_action(&G::compose(&g1, &g2), &u),
                    self.output_action(&G::compose(&g1, &g2), &y_probe),
                ),
            };
            psi_comp = psi_comp.max((nested_psi - joint_psi).norm());
            rho_comp = rho_comp.max((nested_rho - joint_rho).norm());

            let e = G::identity();
            psi_id = psi_id.max((self.input_action(&e, &u) - &u).norm());
            rho_id = rho_id.max((self.output_action(&e, &y_probe) - &y_probe).norm());

            // moved state/input pair on the declared side
            let (moved_x, moved_u) = match self.side {
                ActionSide::Left => (G::compose(&g1, &x), self.input_action(&g1, &u)),
                ActionSide::Right => (G::compose(&x, &g1), self.input_action(&g1, &u)),
            };

            invariant = invariant
                .max((self.invariant_input(&moved_x, &moved_u) - self.invariant_input(&x, &u)).norm());

            // body velocity is untouched by left translation; right
            // translation (a change of body frame) moves it through psi_g
            let v_moved = self.body_velocity_at(&moved_x, &moved_u);
            let v_expected = match self.side {
                ActionSide::Left => self.body_velocity_at(&x, &u),
                ActionSide::Right => AlgebraVector::new(
                    self.input_action(&g1, self.body_velocity_at(&x, &u).coords()),
                ),
            };
            velocity = velocity.max((&v_moved - &v_expected).norm());

            let h_moved = self.output(&moved_x, &moved_u);
            let h_acted = self.output_action(&g1, &self.output(&x, &u));
            equivariance = equivariance.max((h_moved - h_acted).norm());
        }

        EquivarianceReport {
            system: self.name.clone(),
            samples,
            checks: vec![
                IdentityCheck::new("input-action-composition", psi_comp, tol),
                IdentityCheck::new("output-action-composition", rho_comp, tol),
                IdentityCheck::new("input-action-identity", psi_id, tol),
                IdentityCheck::new("output-action-identity", rho_id, tol),
                IdentityCheck::new("invariant-input-translation", invariant, tol),
                IdentityCheck::new("body-velocity-translation", velocity, tol),
                IdentityCheck::new("output-equivariance", equivariance, tol),
            ],
        }
    }
}

/// One identity of the equivariance suite with its worst observed deviation.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn new(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        IdentityCheck { name, max_deviation, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

/// Result of [`InvariantSystem::check_equivariance`].
#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    pub system: String,
    pub samples: usize,
    pub checks: Vec<IdentityCheck>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    /// Names of the identities that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }

    pub fn push(&mut self, check: IdentityCheck) {
        self.checks.push(check);
    }
}

/// Interpolation rule for sampled inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    ZeroOrderHold,
    Linear,
}

#[derive(Clone)]
enum SignalRepr {
    Constant(DVector<f64>),
    Samples { times: Vec<f64>, values: Vec<DVector<f64>>, interp: Interpolation },
    Closure(Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>),
}

/// A piecewise-smooth input signal `t -> u(t)`.
#[derive(Clone)]
pub struct InputSignal {
    dim: usize,
    repr: SignalRepr,
}

impl InputSignal {
    pub fn constant(u: DVector<f64>) -> Self {
        InputSignal { dim: u.len(), repr: SignalRepr::Constant(u) }
    }

    /// Sampled signal; timestamps must be strictly increasing. The default
    /// interpolation is zero-order hold, matching sampled sensor semantics.
    pub fn from_samples(
        times: Vec<f64>,
        values: Vec<DVector<f64>>,
        interp: Interpolation,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::invalid("input samples need equal, nonzero counts of times and values"));
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(Error::NonMonotonicSamples { index: i });
            }
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::invalid("input samples must all have the same dimension"));
        }
        if values.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("input samples must be finite"));
        }
        Ok(InputSignal { dim, repr: SignalRepr::Samples { times, values, interp } })
    }

    pub fn from_fn(dim: usize, f: impl Fn(f64) -> DVector<f64> + Send + Sync + 'static) -> Self {
        InputSignal { dim, repr: SignalRepr::Closure(Arc::new(f)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match &self.repr {
            SignalRepr::Constant(u) => u.clone(),
            SignalRepr::Closure(f) => f(t),
            SignalRepr::Samples { times, values, interp } => {
                if t <= times[0] {
                    return values[0].clone();
                }
                if t >= *times.last().unwrap() {
                    return values.last().unwrap().clone();
                }
                let idx = match times.binary_search_by(|probe| probe.partial_cmp(&t).unwrap()) {
                    Ok(i) => return values[i].clone(),
                    Err(i) => i, // first index with times[idx] > t
                };
                match interp {
                    Interpolation::ZeroOrderHold => values[idx - 1].clone(),
                    Interpolation::Linear => {
                        let (t0, t1) = (times[idx - 1], times[idx]);
                        let alpha = (t - t0) / (t1 - t0);
                        &values[idx - 1] * (1.0 - alpha) + &values[idx] * alpha
                    }
                }
            }
        }
    }
}
