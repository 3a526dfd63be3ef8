//! Planar rigid motions, stored as a heading angle and a translation.
//!
//! Basis order: (rot, trans-x, trans-y). The heading is wrapped to
//! `(-pi, pi]` whenever an element is canonicalized (every composition does
//! so); wrapping never changes the group element.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, LieGroup, CUT_LOCUS_MARGIN, SMALL_ANGLE};

/// Marker type for the planar rigid-motion group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Se2;

/// Heading angle plus planar translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Se2Element {
    pub theta: f64,
    pub trans: Vector2<f64>,
}

impl Se2Element {
    pub fn new(theta: f64, tx: f64, ty: f64) -> Self {
        Se2Element { theta, trans: Vector2::new(tx, ty) }
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = theta % two_pi;
    if a > std::f64::consts::PI {
        a -= two_pi;
    } else if a <= -std::f64::consts::PI {
        a += two_pi;
    }
    a
}

fn rot2(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `V(theta) = (1/theta) [[sin, -(1-cos)], [1-cos, sin]]`, the translation
/// factor of the exponential, with a series fallback for small angles.
fn v_matrix(theta: f64) -> Matrix2<f64> {
    let (a, b) = if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, theta / 2.0 - theta * t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta)
    };
    Matrix2::new(a, -b, b, a)
}

/// Closed-form inverse of `V(theta)`.
fn v_matrix_inv(theta: f64) -> Matrix2<f64> {
    let half = 0.5 * theta;
    let a = if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 - t2 / 12.0 - t2 * t2 / 720.0
    } else {
        half * half.cos() / half.sin()
    };
    Matrix2::new(a, half, -half, a)
}

impl Se2 {
    pub fn from_parts(theta: f64, trans: Vector2<f64>) -> Se2Element {
        Se2Element { theta: wrap_angle(theta), trans }
    }

    /// Rigid action on a point of the plane: `R(theta) p + t`.
    pub fn apply(g: &Se2Element, p: &Vector2<f64>) -> Vector2<f64> {
        rot2(g.theta) * p + g.trans
    }

    /// Closed-form matrix of the conjugation action used by [`LieGroup::adjoint`],
    /// for the element given by `(theta, t)` acting from the inside.
    fn conjugation_matrix(theta: f64, trans: &Vector2<f64>) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, trans[1], c, -s, -trans[0], s, c],
        )
    }
}

impl LieGroup for Se2 {
    const DIM: usize = 3;
    const NAME: &'static str = "se2";

    type Element = Se2Element;

    fn identity() -> Se2Element {
        Se2Element::new(0.0, 0.0, 0.0)
    }

    fn compose(a: &Se2Element, b: &Se2Element) -> Se2Element {
        Se2::from_parts(a.theta + b.theta, a.trans + rot2(a.theta) * b.trans)
    }

    fn inverse(g: &Se2Element) -> Se2Element {
        Se2::from_parts(-g.theta, -(rot2(-g.theta) * g.trans))
    }

    fn exp(xi: &AlgebraVector<Self>) -> Se2Element {
        let omega = xi.coords()[0];
        let v = Vector2::new(xi.coords()[1], xi.coords()[2]);
        Se2::from_parts(omega, v_matrix(omega) * v)
    }

    fn log(g: &Se2Element) -> Result<AlgebraVector<Self>> {
        let theta = wrap_angle(g.theta);
        if theta.abs() > std::f64::consts::PI - CUT_LOCUS_MARGIN {
            return Err(Error::AtCutLocus { angle: theta.abs(), margin: CUT_LOCUS_MARGIN });
        }
        let v = v_matrix_inv(theta) * g.trans;
        Ok(AlgebraVector::from_slice(&[theta, v[0], v[1]]))
    }

    fn bracket(a: &AlgebraVector<Self>, b: &AlgebraVector<Self>) -> AlgebraVector<Self> {
        // [(w1, v1), (w2, v2)] = (0, w1 J v2 - w2 J v1), J the quarter turn
        let (w1, x1, y1) = (a.coords()[0], a.coords()[1], a.coords()[2]);
        let (w2, x2, y2) = (b.coords()[0], b.coords()[1], b.coords()[2]);
        AlgebraVector::from_slice(&[0.0, -w1 * y2 + w2 * y1, w1 * x2 - w2 * x1])
    }

    fn adjoint(g: &Se2Element) -> DMatrix<f64> {
        let inv = Se2::inverse(g);
        Se2::conjugation_matrix(inv.theta, &inv.trans)
    }

    fn canonicalize(g: &Se2Element) -> Se2Element {
        Se2::from_parts(g.theta, g.trans)
    }

    fn matrix_generators() -> Vec<DMatrix<f64>> {
        let gen = |a: [f64; 9]| DMatrix::from_row_slice(3, 3, &a);
        vec![
            gen([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            gen([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            gen([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ]
    }

    fn to_matrix(g: &Se2Element) -> DMatrix<f64> {
        let r = rot2(g.theta);
        DMatrix::from_row_slice(
            3,
            3,
            &[
                r[(0, 0)],
                r[(0, 1)],
                g.trans[0],
                r[(1, 0)],
                r[(1, 1)],
                g.trans[1],
                0.0,
                0.0,
                1.0,
            ],
        )
    }

    fn param_names() -> Vec<&'static str> {
        vec!["theta", "tx", "ty"]
    }

    fn params(g: &Se2Element) -> Vec<f64> {
        vec![g.theta, g.trans[0], g.trans[1]]
    }

    fn from_params(p: &[f64]) -> Result<Se2Element> {
        if p.len() != 3 {
            return Err(Error::invalid(format!("se2 takes 3 parameters, got {}", p.len())));
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("se2 parameters must be finite"));
        }
        Ok(Se2::from_parts(p[0], Vector2::new(p[1], p[2])))
    }
}

/// Small-angle-safe distance between two elements, used by tests: wrapped
/// heading difference plus translation difference.
pub fn se2_distance(a: &Se2Element, b: &Se2Element) -> f64 {
    wrap_angle(a.theta - b.theta).abs() + (a.trans - b.trans).norm()
}
