//! The abelian plane, used as a reference group for tests and as the state
//! space of the linear baseline system.

use nalgebra::{DMatrix, Vector2};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, LieGroup};

/// Marker type for the translation group of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct R2;

pub type R2Element = Vector2<f64>;

impl LieGroup for R2 {
    const DIM: usize = 2;
    const NAME: &'static str = "r2";

    type Element = R2Element;

    fn identity() -> R2Element {
        Vector2::zeros()
    }

    fn compose(a: &R2Element, b: &R2Element) -> R2Element {
        a + b
    }

    fn inverse(g: &R2Element) -> R2Element {
        -g
    }

    fn exp(xi: &AlgebraVector<Self>) -> R2Element {
        Vector2::new(xi.coords()[0], xi.coords()[1])
    }

    fn log(g: &R2Element) -> Result<AlgebraVector<Self>> {
        Ok(AlgebraVector::from_slice(&[g[0], g[1]]))
    }

    fn bracket(_a: &AlgebraVector<Self>, _b: &AlgebraVector<Self>) -> AlgebraVector<Self> {
        AlgebraVector::zeros()
    }

    fn adjoint(_g: &R2Element) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }

    fn canonicalize(g: &R2Element) -> R2Element {
        *g
    }

    fn matrix_generators() -> Vec<DMatrix<f64>> {
        // homogeneous representation: translations as upper-right entries
        let gen = |a: [f64; 9]| DMatrix::from_row_slice(3, 3, &a);
        vec![
            gen([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            gen([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ]
    }

    fn to_matrix(g: &R2Element) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, g[0], 0.0, 1.0, g[1], 0.0, 0.0, 1.0])
    }

    fn param_names() -> Vec<&'static str> {
        vec!["x", "y"]
    }

    fn params(g: &R2Element) -> Vec<f64> {
        vec![g[0], g[1]]
    }

    fn from_params(p: &[f64]) -> Result<R2Element> {
        if p.len() != 2 {
            return Err(Error::invalid(format!("r2 takes 2 parameters, got {}", p.len())));
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("r2 parameters must be finite"));
        }
        Ok(Vector2::new(p[0], p[1]))
    }
}
