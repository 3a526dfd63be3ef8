//! Invariant pre-observers, their error dynamics, linearization and gain
//! design.
//!
//! An observer is described by a gain matrix `gain` (optionally replaced by a
//! nonlinear hook) acting on the *invariant output error*
//!
//! ```text
//! delta = rho_{xhat^-1}(y) - h_e(invariant input at xhat)
//! ```
//!
//! which vanishes whenever the measurement matches the prediction, so every
//! spec built here is a pre-observer: feeding it the true output reproduces
//! the plain dynamics exactly.
//!
//! Sign convention: the correction added to the flow is `gain * delta`. The
//! feedback matrix reported by [`linearize`] is `L = -gain`, so the
//! linearized error equation reads `dxi/dt = (A + L C) xi` and pole placement
//! for `A + L C` is performed on that matrix. [`ObserverSpec::from_output_feedback`]
//! converts a designed `L` back into a correction gain.
//!
//! The correction is applied on the side dictated by the symmetry: left
//! systems translate it by `DL_xhat`, right-equivariant systems by
//! `DR_xhat`. [`GroupRhs`] carries both pieces so the integrator can respect
//! the sides.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, LieGroup};
use crate::systems::{ActionSide, InvariantSystem};

/// Step used by all central-difference Jacobians, in exponential coordinates.
pub const JACOBIAN_STEP: f64 = 1e-6;

type HookFn<G> =
    Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> AlgebraVector<G> + Send + Sync>;

/// Gain schedule of an invariant pre-observer.
pub struct ObserverSpec<G: LieGroup> {
    side: ActionSide,
    gain: DMatrix<f64>,
    hook: Option<HookFn<G>>,
}

impl<G: LieGroup> Clone for ObserverSpec<G> {
    fn clone(&self) -> Self {
        ObserverSpec { side: self.side, gain: self.gain.clone(), hook: self.hook.clone() }
    }
}

impl<G: LieGroup> ObserverSpec<G> {
    /// Constant-gain observer; `gain` maps the invariant output error to an
    /// algebra-valued correction and must be `n x p`.
    pub fn linear(sys: &InvariantSystem<G>, gain: DMatrix<f64>) -> Result<Self> {
        if gain.nrows() != G::DIM || gain.ncols() != sys.output_dim() {
            return Err(Error::invalid(format!(
                "gain must be {} x {}, got {} x {}",
                G::DIM,
                sys.output_dim(),
                gain.nrows(),
                gain.ncols()
            )));
        }
        Ok(ObserverSpec { side: sys.side(), gain, hook: None })
    }

    /// Observer with zero correction: a copy of the open-loop system.
    pub fn open_loop(sys: &InvariantSystem<G>) -> Self {
        ObserverSpec {
            side: sys.side(),
            gain: DMatrix::zeros(G::DIM, sys.output_dim()),
            hook: None,
        }
    }

    /// Builds the spec from a feedback matrix `L` designed for the
    /// linearized pair, i.e. with closed loop `A + L C`.
    pub fn from_output_feedback(sys: &InvariantSystem<G>, feedback: DMatrix<f64>) -> Result<Self> {
        Self::linear(sys, -feedback)
    }

    /// Replaces the linear form with a nonlinear correction. The hook
    /// receives the invariant input and the invariant output error and must
    /// vanish when the error does.
    pub fn with_hook(
        mut self,
        hook: impl Fn(&DVector<f64>, &DVector<f64>) -> AlgebraVector<G> + Send + Sync + 'static,
    ) -> Self {
        self.hook = Some(Arc::new(hook));
        self
    }

    pub fn side(&self) -> ActionSide {
        self.side
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.gain
    }

    /// Feedback matrix of the linearized error equation, `L = -gain`.
    pub fn output_feedback(&self) -> DMatrix<f64> {
        -&self.gain
    }

    /// Correction consumed by the flow, in algebra coordinates.
    pub fn correction(&self, invariant_input: &DVector<f64>, output_error: &DVector<f64>) -> AlgebraVector<G> {
        match &self.hook {
            Some(hook) => hook(invariant_input, output_error),
            None => AlgebraVector::new(&self.gain * output_error),
        }
    }
}

/// A tangent value split into a left-translated and a right-translated
/// algebra piece: `dx/dt = DL_x(left) + DR_x(right)`.
#[derive(Debug)]
pub struct GroupRhs<G: LieGroup> {
    pub left: AlgebraVector<G>,
    pub right: Option<AlgebraVector<G>>,
}

impl<G: LieGroup> Clone for GroupRhs<G> {
    fn clone(&self) -> Self {
        GroupRhs { left: self.left.clone(), right: self.right.clone() }
    }
}

impl<G: LieGroup> GroupRhs<G> {
    pub fn left_only(left: AlgebraVector<G>) -> Self {
        GroupRhs { left, right: None }
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.as_ref().is_none_or(|r| r.is_finite())
    }

    /// Everything expressed through left translation at the point `at`:
    /// `DR_x(zeta) = DL_x(adjoint(x) zeta)`.
    pub fn combined_left(&self, at: &G::Element) -> AlgebraVector<G> {
        match &self.right {
            None => self.left.clone(),
            Some(r) => &self.left + &r.map(&G::adjoint(at)),
        }
    }
}

/// Right-hand side of the observer flow at the estimate `xhat`, given the
/// input `u` and the measured output `y`.
pub fn observer_rhs<G: LieGroup>(
    sys: &InvariantSystem<G>,
    spec: &ObserverSpec<G>,
    xhat: &G::Element,
    u: &DVector<f64>,
    y: &DVector<f64>,
) -> GroupRhs<G> {
    debug_assert_eq!(spec.side(), sys.side(), "observer and system sides must match");
    let delta = sys.output_error(xhat, u, y);
    match sys.side() {
        ActionSide::Left => {
            let invariant = sys.invariant_input(xhat, u);
            let correction = spec.correction(&invariant, &delta);
            GroupRhs::left_only(&sys.body_velocity_map(&invariant) + &correction)
        }
        ActionSide::Right => {
            let invariant = sys.invariant_input(xhat, u);
            let correction = spec.correction(&invariant, &delta);
            GroupRhs { left: sys.body_velocity_map(u), right: Some(correction) }
        }
    }
}

/// The group-valued state error: `x^-1 xhat` for left symmetry, `xhat x^-1`
/// for right symmetry. Unchanged by a common translation on the matching side.
pub fn invariant_error<G: LieGroup>(
    x: &G::Element,
    xhat: &G::Element,
    side: ActionSide,
) -> G::Element {
    match side {
        ActionSide::Left => G::compose(&G::inverse(x), xhat),
        ActionSide::Right => G::compose(xhat, &G::inverse(x)),
    }
}

/// Closed-form right-hand side of the invariant error flow at `eta`.
///
/// Left systems couple to the trajectory only through the invariant input
/// `i_true = psi_{x^-1}(u)`; right systems ignore `i_true` entirely and the
/// flow is autonomous.
pub fn error_rhs<G: LieGroup>(
    sys: &InvariantSystem<G>,
    spec: &ObserverSpec<G>,
    eta: &G::Element,
    i_true: &DVector<f64>,
) -> GroupRhs<G> {
    let eta_inv = G::inverse(eta);
    match sys.side() {
        ActionSide::Left => {
            let i_hat = sys.input_action(&eta_inv, i_true);
            // what the observer sees: rho_{xhat^-1}(y) = h(eta^-1, i_hat)
            let seen = sys.output(&eta_inv, &i_hat);
            let delta = seen - sys.output_at_identity(&i_hat);
            let correction = spec.correction(&i_hat, &delta);
            GroupRhs {
                left: &sys.body_velocity_map(&i_hat) + &correction,
                right: Some(-&sys.body_velocity_map(i_true)),
            }
        }
        ActionSide::Right => {
            let zero_u = DVector::zeros(sys.input_dim());
            let seen = sys.output(&eta_inv, &zero_u);
            let delta = seen - sys.output_at_identity(&zero_u);
            let correction = spec.correction(&zero_u, &delta);
            GroupRhs { left: AlgebraVector::zeros(), right: Some(correction) }
        }
    }
}

/// The matrices of the linearized error equation in exponential coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedPair {
    /// Drift of the open-loop error flow.
    pub a: DMatrix<f64>,
    /// Output sensitivity `dh/dx` at the identity.
    pub c: DMatrix<f64>,
    /// Feedback matrix, present when a spec was supplied; closed loop is
    /// `A + L C`.
    pub feedback: Option<DMatrix<f64>>,
}

impl LinearizedPair {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn with_feedback(mut self, feedback: DMatrix<f64>) -> Self {
        self.feedback = Some(feedback);
        self
    }

    /// `A + L C`, or `A` alone when no feedback is attached.
    pub fn closed_loop(&self) -> DMatrix<f64> {
        match &self.feedback {
            Some(l) => &self.a + l * &self.c,
            None => self.a.clone(),
        }
    }
}

fn jacobian_velocity<G: LieGroup>(sys: &InvariantSystem<G>, ubar: &DVector<f64>) -> DMatrix<f64> {
    if let Some(jac) = sys.velocity_jacobian_override() {
        return jac(ubar);
    }
    let m = sys.input_dim();
    let mut out = DMatrix::zeros(G::DIM, m);
    for j in 0..m {
        let mut up = ubar.clone();
        let mut dn = ubar.clone();
        up[j] += JACOBIAN_STEP;
        dn[j] -= JACOBIAN_STEP;
        let col = (&sys.body_velocity_map(&up) - &sys.body_velocity_map(&dn))
            .scale(0.5 / JACOBIAN_STEP);
        out.column_mut(j).copy_from(col.coords());
    }
    out
}

fn jacobian_input_action<G: LieGroup>(sys: &InvariantSystem<G>, ubar: &DVector<f64>) -> DMatrix<f64> {
    if let Some(jac) = sys.input_action_jacobian_override() {
        return jac(ubar);
    }
    let mut out = DMatrix::zeros(sys.input_dim(), G::DIM);
    for j in 0..G::DIM {
        let w = AlgebraVector::<G>::basis(j);
        let plus = sys.input_action(&G::exp(&w.scale(JACOBIAN_STEP)), ubar);
        let minus = sys.input_action(&G::exp(&w.scale(-JACOBIAN_STEP)), ubar);
        out.column_mut(j).copy_from(&((plus - minus) / (2.0 * JACOBIAN_STEP)));
    }
    out
}

/// `dh/dx` at the identity in exponential coordinates, with the input held
/// at `ubar`.
pub fn output_jacobian<G: LieGroup>(sys: &InvariantSystem<G>, ubar: &DVector<f64>) -> DMatrix<f64> {
    if let Some(jac) = sys.output_jacobian_override() {
        return jac(ubar);
    }
    let mut out = DMatrix::zeros(sys.output_dim(), G::DIM);
    for j in 0..G::DIM {
        let w = AlgebraVector::<G>::basis(j);
        let plus = sys.output(&G::exp(&w.scale(JACOBIAN_STEP)), ubar);
        let minus = sys.output(&G::exp(&w.scale(-JACOBIAN_STEP)), ubar);
        out.column_mut(j).copy_from(&((plus - minus) / (2.0 * JACOBIAN_STEP)));
    }
    out
}

/// Linearized error equation around the invariant input `ubar`.
///
/// For left systems `A` combines the structure-constant bracket with the
/// input-channel term `df_e/du * dpsi/dg`; for right-equivariant systems the
/// open-loop error flow is stationary and `A = 0` identically.
pub fn linearize<G: LieGroup>(
    sys: &InvariantSystem<G>,
    spec: Option<&ObserverSpec<G>>,
    ubar: &DVector<f64>,
) -> LinearizedPair {
    let n = G::DIM;
    let a = match sys.side() {
        ActionSide::Right => DMatrix::zeros(n, n),
        ActionSide::Left => {
            let constants = G::structure_constants();
            let fbar = sys.body_velocity_map(ubar);
            let bracket = constants.bracket_matrix(fbar.coords());
            let dfu = jacobian_velocity(sys, ubar);
            let dpsi = jacobian_input_action(sys, ubar);
            bracket - dfu * dpsi
        }
    };
    let c = output_jacobian(sys, ubar);
    LinearizedPair { a, c, feedback: spec.map(|s| s.output_feedback()) }
}

/// Observability matrix `[C; CA; ...; CA^(n-1)]`.
pub fn observability_matrix(a: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let p = c.nrows();
    let mut stacked = DMatrix::zeros(n * p, n);
    let mut block = c.clone();
    for k in 0..n {
        stacked.view_mut((k * p, 0), (p, n)).copy_from(&block);
        block = &block * a;
    }
    stacked
}

/// Numerical rank of the observability matrix.
pub fn observability_rank(a: &DMatrix<f64>, c: &DMatrix<f64>) -> usize {
    let obs = observability_matrix(a, c);
    let svd = obs.svd(false, false);
    let max = svd.singular_values.max();
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|s| **s > 1e-10 * max).count()
}

/// Builds the real block-diagonal matrix carrying the requested spectrum.
fn real_spectrum_blocks(poles: &[Complex<f64>]) -> Result<DMatrix<f64>> {
    let n = poles.len();
    let mut f = DMatrix::zeros(n, n);
    let mut used = vec![false; n];
    let mut row = 0;
    for i in 0..n {
        if used[i] {
            continue;
        }
        if poles[i].im.abs() < 1e-12 {
            f[(row, row)] = poles[i].re;
            used[i] = true;
            row += 1;
        } else {
            let conj = poles[i].conj();
            let partner = (0..n)
                .find(|&j| !used[j] && j != i && (poles[j] - conj).norm() < 1e-9)
                .ok_or_else(|| {
                    Error::invalid(format!("pole list not closed under conjugation: {}", poles[i]))
                })?;
            f[(row, row)] = poles[i].re;
            f[(row, row + 1)] = poles[i].im.abs();
            f[(row + 1, row)] = -poles[i].im.abs();
            f[(row + 1, row + 1)] = poles[i].re;
            used[i] = true;
            used[partner] = true;
            row += 2;
        }
    }
    Ok(f)
}

/// Largest distance when greedily matching two spectra.
fn spectrum_distance(requested: &[Complex<f64>], actual: &[Complex<f64>]) -> f64 {
    let mut used = vec![false; actual.len()];
    let mut worst: f64 = 0.0;
    for r in requested {
        let mut best = f64::INFINITY;
        let mut best_idx = usize::MAX;
        for (j, a) in actual.iter().enumerate() {
            if !used[j] && (r - a).norm() < best {
                best = (r - a).norm();
                best_idx = j;
            }
        }
        if best_idx == usize::MAX {
            return f64::INFINITY;
        }
        used[best_idx] = true;
        worst = worst.max(best);
    }
    worst
}

/// Designs a feedback matrix `L` such that `A + L C` carries the requested
/// poles (one per state dimension, closed under conjugation).
///
/// Synthesis goes through the Sylvester equation `X A - F X = W C` for a
/// randomized `W`: when `X` is invertible, `L = -X^-1 W` conjugates
/// `A + L C` to `F`. The result is verified against the requested spectrum
/// and the draw is retried on degenerate `X`.
pub fn design_gain_pole(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    poles: &[Complex<f64>],
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let p = c.nrows();
    if a.ncols() != n || c.ncols() != n {
        return Err(Error::invalid("linearized pair has inconsistent dimensions"));
    }
    if poles.len() != n {
        return Err(Error::invalid(format!("need {n} poles, got {}", poles.len())));
    }
    let rank = observability_rank(a, c);
    if rank < n {
        return Err(Error::NotObservable { rank, dim: n });
    }
    let f = real_spectrum_blocks(poles)?;

    let eye = DMatrix::<f64>::identity(n, n);
    // vec(XA) - vec(FX) = (A^T kron I - I kron F) vec(X), column-major
    let sylvester = a.transpose().kronecker(&eye) - eye.kronecker(&f);
    let lu = sylvester.lu();

    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_77e5);
    for _ in 0..16 {
        let w = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
        let rhs_mat = &w * c;
        let rhs = DVector::from_iterator(n * n, rhs_mat.iter().copied());
        let Some(x_vec) = lu.solve(&rhs) else {
            return Err(Error::invalid(
                "pole placement failed: a requested pole coincides with an eigenvalue of A",
            ));
        };
        let x = DMatrix::from_iterator(n, n, x_vec.iter().copied());
        let Some(x_inv) = x.clone().try_inverse() else {
            continue;
        };
        let gain = -(&x_inv * &w);
        let closed = a + &gain * c;
        let achieved: Vec<Complex<f64>> = closed.complex_eigenvalues().iter().copied().collect();
        if spectrum_distance(poles, &achieved) < 1e-6 {
            return Ok(gain);
        }
    }
    Err(Error::invalid("pole placement failed: no well-conditioned similarity found"))
}

/// Adjoint-transpose gain design for right-equivariant outputs.
///
/// `weights` is either a single scalar or one entry per output component,
/// all nonnegative; the correction is `Dh(e)^T diag(weights) * delta` and the
/// linearized closed loop `-Dh^T diag(weights) Dh` is symmetric negative
/// semidefinite, definite exactly when `Dh(e)` has full column rank.
pub fn design_gain_adjoint<G: LieGroup>(
    sys: &InvariantSystem<G>,
    weights: &[f64],
) -> Result<ObserverSpec<G>> {
    if sys.side() != ActionSide::Right {
        return Err(Error::invalid(
            "adjoint-transpose design needs a right-equivariant output",
        ));
    }
    let p = sys.output_dim();
    let diag: DVector<f64> = match weights.len() {
        1 => DVector::from_element(p, weights[0]),
        l if l == p => DVector::from_row_slice(weights),
        l => {
            return Err(Error::invalid(format!(
                "weights must be scalar or one per output ({p}), got {l}"
            )))
        }
    };
    if diag.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid("weights must be nonnegative and finite"));
    }
    let dh = output_jacobian(sys, &DVector::zeros(sys.input_dim()));
    let gain = dh.transpose() * DMatrix::from_diagonal(&diag);
    ObserverSpec::linear(sys, gain)
}

/// Definiteness of the symmetric part of the closed loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definiteness {
    NegativeDefinite,
    NegativeSemidefinite,
    Indefinite,
}

/// Spectral summary of a linearized pair.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real_part: f64,
    pub symmetric_part_eigenvalues: Vec<f64>,
    pub symmetric_part: Definiteness,
}

/// Eigenvalues of `A + L C` and the definiteness of its symmetric part in
/// the Euclidean product of the fixed basis.
pub fn stability_check(pair: &LinearizedPair) -> StabilityReport {
    let m = pair.closed_loop();
    let eigenvalues: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    let max_real_part = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let sym = (&m + m.transpose()) * 0.5;
    let mut sym_eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    sym_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let largest = *sym_eigs.last().unwrap();
    let scale = sym_eigs.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    let symmetric_part = if largest < -1e-10 * scale {
        Definiteness::NegativeDefinite
    } else if largest < 1e-10 * scale {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::Indefinite
    };
    StabilityReport { eigenvalues, max_real_part, symmetric_part_eigenvalues: sym_eigs, symmetric_part }
}

/// Matrix exponential by scaling and squaring of the power series.
pub fn mat_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut acc = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) / k as f64;
        acc += &term;
        if term.norm() <= 1e-18 * acc.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}
