//! Rotations of three-space, stored as unit quaternions.
//!
//! Basis order: (rot-x, rot-y, rot-z). The quaternion is renormalized after
//! every composition; the sign ambiguity of the double cover is resolved only
//! at comparison time (see [`So3::canonical`]), never mid-trajectory, so that
//! integrated flows stay continuous.

use nalgebra::{DMatrix, DVector, Matrix3, Quaternion, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, LieGroup, CUT_LOCUS_MARGIN, SMALL_ANGLE};

/// Marker type for the rotation group; elements are unit quaternions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct So3;

pub type So3Element = UnitQuaternion<f64>;

impl So3 {
    /// Rotation about the z axis.
    pub fn rot_z(angle: f64) -> So3Element {
        So3::exp(&AlgebraVector::from_slice(&[0.0, 0.0, angle]))
    }

    /// Flips the quaternion sign so the scalar part is nonnegative.
    /// Comparison helper only; both signs denote the same rotation.
    pub fn canonical(g: &So3Element) -> So3Element {
        if g.w < 0.0 {
            UnitQuaternion::new_unchecked(Quaternion::new(-g.w, -g.i, -g.j, -g.k))
        } else {
            *g
        }
    }

    /// Rotates `v` by `g`; an isometry of three-space.
    pub fn rotate(g: &So3Element, v: &Vector3<f64>) -> Vector3<f64> {
        g.transform_vector(v)
    }

    pub fn rotation_matrix(g: &So3Element) -> Matrix3<f64> {
        g.to_rotation_matrix().into_inner()
    }
}

fn renormalize(q: Quaternion<f64>) -> So3Element {
    UnitQuaternion::new_normalize(q)
}

impl LieGroup for So3 {
    const DIM: usize = 3;
    const NAME: &'static str = "so3";

    type Element = So3Element;

    fn identity() -> So3Element {
        UnitQuaternion::identity()
    }

    fn compose(a: &So3Element, b: &So3Element) -> So3Element {
        renormalize(a.into_inner() * b.into_inner())
    }

    fn inverse(g: &So3Element) -> So3Element {
        g.conjugate()
    }

    fn exp(xi: &AlgebraVector<Self>) -> So3Element {
        let v = Vector3::new(xi.coords()[0], xi.coords()[1], xi.coords()[2]);
        let angle = v.norm();
        // half-angle quaternion; sinc series keeps full precision near zero
        let (w, im) = if angle < SMALL_ANGLE {
            let a2 = angle * angle;
            (1.0 - a2 / 8.0 + a2 * a2 / 384.0, 0.5 - a2 / 48.0 + a2 * a2 / 3840.0)
        } else {
            ((0.5 * angle).cos(), (0.5 * angle).sin() / angle)
        };
        UnitQuaternion::new_normalize(Quaternion::from_parts(w, v * im))
    }

    fn log(g: &So3Element) -> Result<AlgebraVector<Self>> {
        // principal branch: work with the representative of nonnegative scalar part
        let q = So3::canonical(g);
        let s = q.vector().norm();
        let w = q.w;
        let angle = 2.0 * s.atan2(w);
        if angle > std::f64::consts::PI - CUT_LOCUS_MARGIN {
            return Err(Error::AtCutLocus { angle, margin: CUT_LOCUS_MARGIN });
        }
        let factor = if s < SMALL_ANGLE {
            // atan2(s, w)/s expanded around s = 0 (w close to 1 here)
            2.0 / w * (1.0 - s * s / (3.0 * w * w))
        } else {
            angle / s
        };
        Ok(AlgebraVector::new(DVector::from_column_slice(
            (q.vector() * factor).as_slice(),
        )))
    }

    fn bracket(a: &AlgebraVector<Self>, b: &AlgebraVector<Self>) -> AlgebraVector<Self> {
        let x = a.coords();
        let y = b.coords();
        AlgebraVector::from_slice(&[
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ])
    }

    fn adjoint(g: &So3Element) -> DMatrix<f64> {
        // g^-1 hat(xi) g = hat(R^T xi)
        let r = So3::rotation_matrix(g);
        DMatrix::from_fn(3, 3, |i, j| r[(j, i)])
    }

    fn canonicalize(g: &So3Element) -> So3Element {
        renormalize(g.into_inner())
    }

    fn matrix_generators() -> Vec<DMatrix<f64>> {
        let gen = |a: [f64; 9]| DMatrix::from_row_slice(3, 3, &a);
        vec![
            gen([0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
            gen([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
            gen([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ]
    }

    fn to_matrix(g: &So3Element) -> DMatrix<f64> {
        let r = So3::rotation_matrix(g);
        DMatrix::from_fn(3, 3, |i, j| r[(i, j)])
    }

    fn param_names() -> Vec<&'static str> {
        vec!["qw", "qx", "qy", "qz"]
    }

    fn params(g: &So3Element) -> Vec<f64> {
        vec![g.w, g.i, g.j, g.k]
    }

    fn from_params(p: &[f64]) -> Result<So3Element> {
        if p.len() != 4 {
            return Err(Error::invalid(format!("so3 takes 4 parameters, got {}", p.len())));
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("so3 parameters must be finite"));
        }
        let q = Quaternion::new(p[0], p[1], p[2], p[3]);
        if q.norm() < 1e-9 {
            return Err(Error::invalid("so3 quaternion parameters have near-zero norm"));
        }
        Ok(renormalize(q))
    }
}
