//! Group-agnostic Lie algebra and Lie group primitives.
//!
//! Every group implements the [`LieGroup`] trait against a fixed basis
//! `W_1, ..., W_n` of its Lie algebra. All coordinate-level quantities in the
//! crate (algebra vectors, structure constants, gain matrices, CSV columns)
//! are expressed in that basis and never change meaning at runtime. The
//! scalar product on the algebra is the Euclidean product in the fixed basis.
//!
//! Conventions:
//!
//! * `exp`/`log` use the exponential chart around the identity; `log` returns
//!   the principal branch and fails with [`Error::AtCutLocus`] when the
//!   rotation angle comes within `CUT_LOCUS_MARGIN` of `pi`.
//! * `adjoint(g)` is the matrix of the algebra action
//!   `xi -> d/deps log(g^-1 exp(eps xi) g)` at `eps = 0`, i.e. the
//!   differential of the interior automorphism. It composes as a right
//!   action: `adjoint(g1 * g2) = adjoint(g2) * adjoint(g1)`.

use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Angular margin below `pi` at which `log` refuses to pick a branch.
pub const CUT_LOCUS_MARGIN: f64 = 1e-6;

/// Threshold under which sinc-type factors switch to series expansions.
pub const SMALL_ANGLE: f64 = 1e-4;

/// A finite-dimensional matrix Lie group with a fixed algebra basis.
pub trait LieGroup: Sized + Send + Sync + 'static {
    /// Dimension of the group (and of its Lie algebra).
    const DIM: usize;
    /// Short name used in reports and CSV headers.
    const NAME: &'static str;

    /// Concrete storage for a group element.
    type Element: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static;

    fn identity() -> Self::Element;

    /// Group product `a * b`.
    fn compose(a: &Self::Element, b: &Self::Element) -> Self::Element;

    fn inverse(g: &Self::Element) -> Self::Element;

    /// Exponential map in the fixed basis, closed form per group.
    fn exp(xi: &AlgebraVector<Self>) -> Self::Element;

    /// Principal-branch logarithm. Fails near the cut locus.
    fn log(g: &Self::Element) -> Result<AlgebraVector<Self>>;

    /// Lie bracket in basis coordinates (closed form per group; agrees with
    /// the matrix commutator of the generator representation).
    fn bracket(a: &AlgebraVector<Self>, b: &AlgebraVector<Self>) -> AlgebraVector<Self>;

    /// Matrix of the algebra action `xi -> coords(g^-1 exp(xi) g)'(0)`.
    fn adjoint(g: &Self::Element) -> DMatrix<f64>;

    /// Restore the canonical representation (unit quaternion norm, wrapped
    /// heading angle). Must not change the group element it denotes.
    fn canonicalize(g: &Self::Element) -> Self::Element;

    /// Basis generators in a faithful matrix representation.
    fn matrix_generators() -> Vec<DMatrix<f64>>;

    /// The element in the same matrix representation as the generators.
    fn to_matrix(g: &Self::Element) -> DMatrix<f64>;

    /// Names of the stored parameters (CSV headers).
    fn param_names() -> Vec<&'static str>;

    /// Stored parameters of the element, in `param_names` order.
    fn params(g: &Self::Element) -> Vec<f64>;

    /// Rebuild an element from stored parameters.
    fn from_params(p: &[f64]) -> Result<Self::Element>;

    /// Structure constants of the fixed basis, computed from the matrix
    /// generators.
    fn structure_constants() -> StructureConstants {
        Basis::standard::<Self>()
            .structure_constants()
            .expect("standard basis generators are linearly independent")
    }
}

/// Coordinates of a Lie algebra element in the fixed basis of `G`.
#[derive(PartialEq)]
pub struct AlgebraVector<G: LieGroup> {
    coords: DVector<f64>,
    _group: PhantomData<fn() -> G>,
}

impl<G: LieGroup> Clone for AlgebraVector<G> {
    fn clone(&self) -> Self {
        AlgebraVector { coords: self.coords.clone(), _group: PhantomData }
    }
}

impl<G: LieGroup> std::fmt::Debug for AlgebraVector<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AlgebraVector<{}>({:?})", G::NAME, self.coords.as_slice())
    }
}

impl<G: LieGroup> AlgebraVector<G> {
    /// Wraps coordinates; the length must equal the group dimension.
    pub fn new(coords: DVector<f64>) -> Self {
        assert_eq!(
            coords.len(),
            G::DIM,
            "algebra vector for {} needs {} coordinates, got {}",
            G::NAME,
            G::DIM,
            coords.len()
        );
        AlgebraVector { coords, _group: PhantomData }
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Self::new(DVector::from_row_slice(coords))
    }

    pub fn zeros() -> Self {
        Self::new(DVector::zeros(G::DIM))
    }

    /// `i`-th basis vector.
    pub fn basis(i: usize) -> Self {
        let mut v = DVector::zeros(G::DIM);
        v[i] = 1.0;
        Self::new(v)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(&self.coords * s)
    }

    /// Image under a linear map given as an `n x n` matrix.
    pub fn map(&self, m: &DMatrix<f64>) -> Self {
        Self::new(m * &self.coords)
    }
}

impl<G: LieGroup> Add for &AlgebraVector<G> {
    type Output = AlgebraVector<G>;
    fn add(self, rhs: Self) -> AlgebraVector<G> {
        AlgebraVector::new(&self.coords + &rhs.coords)
    }
}

impl<G: LieGroup> Sub for &AlgebraVector<G> {
    type Output = AlgebraVector<G>;
    fn sub(self, rhs: Self) -> AlgebraVector<G> {
        AlgebraVector::new(&self.coords - &rhs.coords)
    }
}

impl<G: LieGroup> Neg for &AlgebraVector<G> {
    type Output = AlgebraVector<G>;
    fn neg(self) -> AlgebraVector<G> {
        AlgebraVector::new(-&self.coords)
    }
}

impl<G: LieGroup> Mul<f64> for &AlgebraVector<G> {
    type Output = AlgebraVector<G>;
    fn mul(self, s: f64) -> AlgebraVector<G> {
        self.scale(s)
    }
}

/// A set of algebra generators in a faithful matrix representation.
///
/// The standard basis of each group is fixed once (rotation generators
/// first, translations after) and all coordinates in the crate refer to it.
#[derive(Clone, Debug)]
pub struct Basis {
    generators: Vec<DMatrix<f64>>,
}

impl Basis {
    /// Standard basis of `G`.
    pub fn standard<G: LieGroup>() -> Self {
        Basis { generators: G::matrix_generators() }
    }

    pub fn new(generators: Vec<DMatrix<f64>>) -> Self {
        assert!(!generators.is_empty(), "basis needs at least one generator");
        let shape = generators[0].shape();
        assert!(
            generators.iter().all(|g| g.shape() == shape),
            "all generators must share one matrix shape"
        );
        Basis { generators }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// Matrix of the algebra element with the given coordinates.
    pub fn matrix_of(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.generators[0].nrows(), self.generators[0].ncols());
        for (c, w) in coords.iter().zip(&self.generators) {
            m += w * *c;
        }
        m
    }

    /// Each generator flattened into a column, columns side by side.
    fn vectorized(&self) -> DMatrix<f64> {
        let rows = self.generators[0].nrows() * self.generators[0].ncols();
        let mut m = DMatrix::zeros(rows, self.dim());
        for (j, w) in self.generators.iter().enumerate() {
            for (i, v) in w.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Coordinates of a matrix lying in the span of the generators.
    fn coords_of(&self, m: &DMatrix<f64>, svd: &nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>) -> DVector<f64> {
        let flat = DVector::from_iterator(m.nrows() * m.ncols(), m.iter().copied());
        svd.solve(&flat, 1e-12).expect("least-squares solve on vectorized basis")
    }

    /// Structure constants `C[i][j][k]` with `[W_i, W_j] = sum_k C[i][j][k] W_k`.
    ///
    /// Commutators are computed in the matrix representation and re-expressed
    /// in basis coordinates. Antisymmetry in `(i, j)` holds exactly because
    /// only the `i < j` half is computed.
    pub fn structure_constants(&self) -> Result<StructureConstants> {
        let n = self.dim();
        let vec = self.vectorized();
        let svd = vec.clone().svd(true, true);
        let rank = svd.rank(1e-10);
        if rank < n {
            return Err(Error::SingularBasis { rank, dim: n });
        }
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = &self.generators[i] * &self.generators[j]
                    - &self.generators[j] * &self.generators[i];
                let coords = self.coords_of(&comm, &svd);
                for k in 0..n {
                    c[(i * n + j) * n + k] = coords[k];
                    c[(j * n + i) * n + k] = -coords[k];
                }
            }
        }
        Ok(StructureConstants { dim: n, c })
    }
}

/// Structure constants of a Lie algebra in a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `C[i][j][k]`, the `W_k` coefficient of `[W_i, W_j]`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Largest violation of `C[i][j][k] = -C[j][i][k]`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest violation of the Jacobi identity on basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut sum = 0.0;
                        for m in 0..n {
                            sum += self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        worst = worst.max(sum.abs());
                    }
                }
            }
        }
        worst
    }

    /// Matrix of `ad_xi : zeta -> [xi, zeta]`.
    pub fn ad_matrix(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for j in 0..n {
                    v += self.get(j, k, i) * xi[j];
                }
                m[(i, k)] = v;
            }
        }
        m
    }

    /// Matrix of `xi -> [xi, f]` for fixed `f`; the drift block of the
    /// linearized error equation.
    pub fn bracket_matrix(&self, f: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += self.get(j, k, i) * f[k];
                }
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Central-difference evaluation of the `adjoint` action, used as an
/// implementation-independent cross-check: only `compose`, `inverse`, `exp`
/// and `log` enter.
pub fn adjoint_central_difference<G: LieGroup>(g: &G::Element, step: f64) -> DMatrix<f64> {
    let n = G::DIM;
    let ginv = G::inverse(g);
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let w = AlgebraVector::<G>::basis(j);
        let plus = G::compose(&G::compose(&ginv, &G::exp(&w.scale(step))), g);
        let minus = G::compose(&G::compose(&ginv, &G::exp(&w.scale(-step))), g);
        let dp = G::log(&plus).expect("probe stays near identity");
        let dm = G::log(&minus).expect("probe stays near identity");
        let col = (&dp - &dm).scale(0.5 / step);
        for i in 0..n {
            m[(i, j)] = col.coords()[i];
        }
    }
    m
}

/// Uniform random algebra vector with coordinates in `[-scale, scale]`.
pub fn sample_algebra<G: LieGroup, R: Rng>(rng: &mut R, scale: f64) -> AlgebraVector<G> {
    let coords = DVector::from_fn(G::DIM, |_, _| rng.random_range(-scale..scale));
    AlgebraVector::new(coords)
}

/// Random group element `exp(xi)` with `xi` sampled by [`sample_algebra`].
pub fn sample_element<G: LieGroup, R: Rng>(rng: &mut R, scale: f64) -> G::Element {
    G::exp(&sample_algebra::<G, R>(rng, scale))
}
