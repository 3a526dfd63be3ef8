//! Group-structure-preserving integration of state, observer and error flows.
//!
//! Both methods advance elements by exponentials only, so trajectories never
//! leave the group. The Lie-Euler step applies the two pieces of a
//! [`GroupRhs`] on their own sides,
//!
//! ```text
//! x <- exp(dt * right) * x * exp(dt * left)
//! ```
//!
//! while the fourth-order Munthe-Kaas scheme first rewrites everything
//! through left translation (`DR_x(zeta) = DL_x(adjoint(x) zeta)`) and then
//! integrates the stage equation `dTheta/dt = dexpinv_Theta(xi)` with the
//! classical Runge-Kutta tableau, truncating `dexpinv` after the double
//! bracket (enough for order four).

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, LieGroup};
use crate::observer::{error_rhs, invariant_error, observer_rhs, GroupRhs, ObserverSpec};
use crate::systems::{InputSignal, InvariantSystem};

/// Integration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    LieEuler,
    Rkmk4,
}

/// Step configuration.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub renormalize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { method: Method::Rkmk4, dt: 1e-3, renormalize: true }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("step size must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Additive Gaussian output noise, redrawn once per step and held across the
/// stages of that step (sampled-sensor semantics).
#[derive(Clone, Debug)]
pub struct NoiseConfig {
    /// Standard deviation per output component, or a single broadcast value.
    pub std: DVector<f64>,
    pub seed: u64,
}

fn dexpinv_left<G: LieGroup>(theta: &AlgebraVector<G>, w: &AlgebraVector<G>) -> AlgebraVector<G> {
    let b1 = G::bracket(theta, w);
    let b2 = G::bracket(theta, &b1);
    &(w + &b1.scale(0.5)) + &b2.scale(1.0 / 12.0)
}

/// Advances all components one step of `cfg.dt`. The right-hand side sees
/// every component at each stage, so coupled flows (truth plus observer)
/// stay stage-consistent.
pub fn step<G, F>(t: f64, states: &[G::Element], rhs: &F, cfg: &IntegratorConfig) -> Result<Vec<G::Element>>
where
    G: LieGroup,
    F: Fn(f64, &[G::Element]) -> Result<Vec<GroupRhs<G>>>,
{
    let dt = cfg.dt;
    let finish = |x: G::Element| if cfg.renormalize { G::canonicalize(&x) } else { x };

    match cfg.method {
        Method::LieEuler => {
            let ks = eval(t, states, rhs)?;
            Ok(states
                .iter()
                .zip(&ks)
                .map(|(x, k)| {
                    let mut next = G::compose(x, &G::exp(&k.left.scale(dt)));
                    if let Some(r) = &k.right {
                        next = G::compose(&G::exp(&r.scale(dt)), &next);
                    }
                    finish(next)
                })
                .collect())
        }
        Method::Rkmk4 => {
            let combined = |t: f64, thetas: &[AlgebraVector<G>]| -> Result<Vec<AlgebraVector<G>>> {
                let moved: Vec<G::Element> = states
                    .iter()
                    .zip(thetas)
                    .map(|(x, th)| G::compose(x, &G::exp(th)))
                    .collect();
                let ks = eval(t, &moved, rhs)?;
                Ok(moved
                    .iter()
                    .zip(&ks)
                    .zip(thetas)
                    .map(|((x, k), th)| dexpinv_left::<G>(th, &k.combined_left(x)))
                    .collect())
            };

            let zero: Vec<AlgebraVector<G>> = states.iter().map(|_| AlgebraVector::zeros()).collect();
            let k1 = combined(t, &zero)?;
            let th2: Vec<_> = k1.iter().map(|k| k.scale(0.5 * dt)).collect();
            let k2 = combined(t + 0.5 * dt, &th2)?;
            let th3: Vec<_> = k2.iter().map(|k| k.scale(0.5 * dt)).collect();
            let k3 = combined(t + 0.5 * dt, &th3)?;
            let th4: Vec<_> = k3.iter().map(|k| k.scale(dt)).collect();
            let k4 = combined(t + dt, &th4)?;

            Ok(states
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let theta = (&(&k1[i] + &k2[i].scale(2.0)) + &(&k3[i].scale(2.0) + &k4[i]))
                        .scale(dt / 6.0);
                    finish(G::compose(x, &G::exp(&theta)))
                })
                .collect())
        }
    }
}

fn eval<G, F>(t: f64, states: &[G::Element], rhs: &F) -> Result<Vec<GroupRhs<G>>>
where
    G: LieGroup,
    F: Fn(f64, &[G::Element]) -> Result<Vec<GroupRhs<G>>>,
{
    let ks = rhs(t, states)?;
    debug_assert_eq!(ks.len(), states.len());
    if ks.iter().any(|k| !k.is_finite()) {
        return Err(Error::StepRejected { t });
    }
    Ok(ks)
}

/// Time series of a joint truth/observer simulation.
#[derive(Clone, Debug)]
pub struct ObserverRun<G: LieGroup> {
    pub times: Vec<f64>,
    pub truth: Vec<G::Element>,
    pub estimate: Vec<G::Element>,
    /// Exponential coordinates of the invariant error at each sample.
    pub error_log: Vec<AlgebraVector<G>>,
    /// Measured output (with noise when configured).
    pub measured: Vec<DVector<f64>>,
    /// Output predicted at the estimate.
    pub predicted: Vec<DVector<f64>>,
}

impl<G: LieGroup> ObserverRun<G> {
    pub fn error_norms(&self) -> Vec<f64> {
        self.error_log.iter().map(AlgebraVector::norm).collect()
    }

    pub fn final_error_norm(&self) -> f64 {
        self.error_log.last().map(AlgebraVector::norm).unwrap_or(0.0)
    }
}

fn noise_draw(
    rng: &mut Option<(ChaCha8Rng, DVector<f64>)>,
    dim: usize,
) -> DVector<f64> {
    match rng {
        None => DVector::zeros(dim),
        Some((rng, std)) => {
            let unit = Normal::new(0.0, 1.0).expect("unit normal");
            DVector::from_fn(dim, |i, _| {
                let s = if std.len() == 1 { std[0] } else { std[i] };
                s * unit.sample(rng)
            })
        }
    }
}

/// Integrates the true state and the observer together.
///
/// The measurement fed to the observer is evaluated at the truth's stage
/// values, plus (when configured) a Gaussian draw held constant within each
/// step. Fails if the invariant error leaves the exponential chart.
#[allow(clippy::too_many_arguments)]
pub fn simulate_observer<G: LieGroup>(
    sys: &InvariantSystem<G>,
    spec: &ObserverSpec<G>,
    x0: &G::Element,
    xhat0: &G::Element,
    input: &InputSignal,
    duration: f64,
    cfg: &IntegratorConfig,
    noise: Option<&NoiseConfig>,
) -> Result<ObserverRun<G>> {
    cfg.validate()?;
    let steps = (duration / cfg.dt).round() as usize;
    let p = sys.output_dim();
    let mut noise_state = noise.map(|n| (ChaCha8Rng::seed_from_u64(n.seed), n.std.clone()));

    let mut run = ObserverRun {
        times: Vec::with_capacity(steps + 1),
        truth: Vec::with_capacity(steps + 1),
        estimate: Vec::with_capacity(steps + 1),
        error_log: Vec::with_capacity(steps + 1),
        measured: Vec::with_capacity(steps + 1),
        predicted: Vec::with_capacity(steps + 1),
    };

    let mut pair = vec![x0.clone(), xhat0.clone()];
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let u = input.eval(t);
        let held_noise = noise_draw(&mut noise_state, p);
        let y = sys.output(&pair[0], &u) + &held_noise;

        run.times.push(t);
        run.truth.push(pair[0].clone());
        run.estimate.push(pair[1].clone());
        run.error_log.push(G::log(&invariant_error::<G>(&pair[0], &pair[1], sys.side()))?);
        run.measured.push(y);
        run.predicted.push(sys.output(&pair[1], &u));

        if k == steps {
            break;
        }
        let rhs = |t: f64, s: &[G::Element]| -> Result<Vec<GroupRhs<G>>> {
            let u = input.eval(t);
            let y = sys.output(&s[0], &u) + &held_noise;
            Ok(vec![
                GroupRhs::left_only(sys.body_velocity_at(&s[0], &u)),
                observer_rhs(sys, spec, &s[1], &u, &y),
            ])
        };
        pair = step(t, &pair, &rhs, cfg)?;
    }
    Ok(run)
}

/// Integrates the state flow alone.
pub fn simulate_open_loop<G: LieGroup>(
    sys: &InvariantSystem<G>,
    x0: &G::Element,
    input: &InputSignal,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<G::Element>)> {
    cfg.validate()?;
    let steps = (duration / cfg.dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = vec![x0.clone()];
    let rhs = |t: f64, s: &[G::Element]| -> Result<Vec<GroupRhs<G>>> {
        let u = input.eval(t);
        Ok(vec![GroupRhs::left_only(sys.body_velocity_at(&s[0], &u))])
    };
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        times.push(t);
        states.push(x[0].clone());
        if k < steps {
            x = step(t, &x, &rhs, cfg)?;
        }
    }
    Ok((times, states))
}

/// Integrates the closed-form error flow directly. `invariant_input` is the
/// invariant of the true trajectory, `t -> psi_{x(t)^-1}(u(t))`; right
/// systems ignore it.
pub fn simulate_error_flow<G: LieGroup>(
    sys: &InvariantSystem<G>,
    spec: &ObserverSpec<G>,
    eta0: &G::Element,
    invariant_input: &InputSignal,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<G::Element>)> {
    cfg.validate()?;
    let steps = (duration / cfg.dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut etas = Vec::with_capacity(steps + 1);
    let mut eta = vec![eta0.clone()];
    let rhs = |t: f64, s: &[G::Element]| -> Result<Vec<GroupRhs<G>>> {
        Ok(vec![error_rhs(sys, spec, &s[0], &invariant_input.eval(t))])
    };
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        times.push(t);
        etas.push(eta[0].clone());
        if k < steps {
            eta = step(t, &eta, &rhs, cfg)?;
        }
    }
    Ok((times, etas))
}

/// Least-squares slope of `ln(values)` against time, skipping nonpositive
/// samples. Returns `None` when fewer than two usable samples remain.
pub fn fit_log_decay(times: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|(t, _)| t).sum();
    let sv: f64 = pts.iter().map(|(_, v)| v).sum();
    let stt: f64 = pts.iter().map(|(t, _)| t * t).sum();
    let stv: f64 = pts.iter().map(|(t, v)| t * v).sum();
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * stv - st * sv) / denom)
}
