//! Linear maps between block-diagonal matrix algebras `(+)_v M_{m_v}`,
//! stored as matrices on the column-major vectorization of the blocks.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector, C, ONE};

/// Block sizes of a block-diagonal algebra, with vectorization offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpace {
    sizes: Vec<usize>,
    vec_offsets: Vec<usize>,
    full_offsets: Vec<usize>,
}

impl BlockSpace {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut vec_offsets = Vec::with_capacity(sizes.len() + 1);
        let mut full_offsets = Vec::with_capacity(sizes.len() + 1);
        let (mut a, mut b) = (0, 0);
        for &m in &sizes {
            vec_offsets.push(a);
            full_offsets.push(b);
            a += m * m;
            b += m;
        }
        vec_offsets.push(a);
        full_offsets.push(b);
        Self {
            sizes,
            vec_offsets,
            full_offsets,
        }
    }

    /// The full matrix algebra `M_n` as a single block.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Dimension of the vectorization, `sum m_v^2`.
    pub fn dim(&self) -> usize {
        *self.vec_offsets.last().unwrap()
    }

    /// Size of the ambient full matrices, `sum m_v`.
    pub fn full_dim(&self) -> usize {
        *self.full_offsets.last().unwrap()
    }

    pub fn full_offset(&self, v: usize) -> usize {
        self.full_offsets[v]
    }

    pub fn vectorize(&self, x: &CommutantElement) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (v, b) in x.blocks.iter().enumerate() {
            let off = self.vec_offsets[v];
            for (i, z) in b.iter().enumerate() {
                out[off + i] = *z;
            }
        }
        out
    }

    pub fn unvectorize(&self, x: &Vector) -> CommutantElement {
        let blocks = self
            .sizes
            .iter()
            .enumerate()
            .map(|(v, &m)| {
                let off = self.vec_offsets[v];
                Mat::from_iterator(m, m, x.iter().skip(off).take(m * m).copied())
            })
            .collect();
        CommutantElement { blocks }
    }

    /// The matrix unit `e_{ij}` in block `v`.
    pub fn unit(&self, v: usize, i: usize, j: usize) -> CommutantElement {
        let mut x = CommutantElement::zero(self);
        x.blocks[v][(i, j)] = ONE;
        x
    }
}

/// An element of a block-diagonal algebra; for a representation with
/// multiplicities `m_v` this is the commutant `sigma(M)'`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutantElement {
    pub blocks: Vec<Mat>,
}

impl CommutantElement {
    pub fn new(blocks: Vec<Mat>) -> Self {
        Self { blocks }
    }

    pub fn zero(space: &BlockSpace) -> Self {
        Self {
            blocks: space.sizes().iter().map(|&m| Mat::zeros(m, m)).collect(),
        }
    }

    pub fn identity(space: &BlockSpace) -> Self {
        Self {
            blocks: space.sizes().iter().map(|&m| Mat::identity(m, m)).collect(),
        }
    }

    pub fn space(&self) -> BlockSpace {
        BlockSpace::new(self.blocks.iter().map(|b| b.nrows()).collect())
    }

    /// Reads the diagonal blocks of a full matrix, rejecting off-block mass.
    pub fn from_full(space: &BlockSpace, m: &Mat, tol: f64) -> Result<Self> {
        let n = space.full_dim();
        if m.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                what: "commutant element".into(),
                expected: (n, n),
                found: m.shape(),
            });
        }
        let x = Self {
            blocks: (0..space.num_blocks())
                .map(|v| {
                    let s = space.sizes()[v];
                    let o = space.full_offset(v);
                    m.view((o, o), (s, s)).into_owned()
                })
                .collect(),
        };
        let residual = linalg::max_abs(&(m - x.to_full()));
        if residual > tol {
            return Err(Error::Precondition(format!(
                "matrix is not block diagonal (off-block residual {residual:.3e})"
            )));
        }
        Ok(x)
    }

    pub fn to_full(&self) -> Mat {
        linalg::block_diag(&self.blocks)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, s: C) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    /// Operator norm: the largest block norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part (`+inf` if empty).
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::min_eigenvalue(&linalg::hermitian_part(b)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn psd_sqrt(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(linalg::psd_sqrt).collect(),
        }
    }

    pub fn trace(&self) -> C {
        self.blocks.iter().map(|b| b.trace()).sum()
    }
}

impl Add for &CommutantElement {
    type Output = CommutantElement;
    fn add(self, rhs: Self) -> CommutantElement {
        CommutantElement {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CommutantElement {
    type Output = CommutantElement;
    fn sub(self, rhs: Self) -> CommutantElement {
        CommutantElement {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A linear map between block-diagonal algebras.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    pub domain: BlockSpace,
    pub codomain: BlockSpace,
    pub matrix: Mat,
}

impl Superoperator {
    pub fn from_fn(
        domain: &BlockSpace,
        codomain: &BlockSpace,
        f: impl Fn(&CommutantElement) -> CommutantElement,
    ) -> Self {
        let mut matrix = Mat::zeros(codomain.dim(), domain.dim());
        let mut col = 0;
        for (v, &m) in domain.sizes().iter().enumerate() {
            for j in 0..m {
                for i in 0..m {
                    let out = codomain.vectorize(&f(&domain.unit(v, i, j)));
                    matrix.set_column(col, &out);
                    col += 1;
                }
            }
        }
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix,
        }
    }

    pub fn identity(space: &BlockSpace) -> Self {
        Self {
            domain: space.clone(),
            codomain: space.clone(),
            matrix: Mat::identity(space.dim(), space.dim()),
        }
    }

    pub fn zero(domain: &BlockSpace, codomain: &BlockSpace) -> Self {
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: Mat::zeros(codomain.dim(), domain.dim()),
        }
    }

    pub fn apply(&self, x: &CommutantElement) -> CommutantElement {
        self.codomain.unvectorize(&(&self.matrix * self.domain.vectorize(x)))
    }

    /// `self o other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn scale(&self, s: C) -> Self {
        Self {
            matrix: &self.matrix * s,
            ..self.clone()
        }
    }

    pub fn power(&self, n: usize) -> Self {
        let mut out = Self::identity(&self.domain);
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    /// Dual with respect to the trace pairing `<a, b> = tr(a* b)`.
    pub fn dual(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        linalg::spectral_radius(&self.matrix)
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.matrix.clone().try_inverse().map(|matrix| Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix,
        })
    }

    /// Choi matrix `sum_{p,q} e_pq (x) L(E(e_pq))` where `E` compresses the
    /// full matrix algebra of the domain onto its diagonal blocks.
    pub fn choi(&self) -> Mat {
        let n = self.domain.full_dim();
        let n2 = self.codomain.full_dim();
        let mut out = Mat::zeros(n * n2, n * n2);
        for (v, &m) in self.domain.sizes().iter().enumerate() {
            let o = self.domain.full_offset(v);
            for i in 0..m {
                for j in 0..m {
                    let img = self.apply(&self.domain.unit(v, i, j)).to_full();
                    let (p, q) = (o + i, o + j);
                    out.view_mut((p * n2, q * n2), (n2, n2)).copy_from(&img);
                }
            }
        }
        out
    }

    /// Maximal deviation of `self` from being Hermitian-preserving,
    /// `max |L(x*) - L(x)*|` over matrix units.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (v, &m) in self.domain.sizes().iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let x = self.domain.unit(v, i, j);
                    let lhs = self.apply(&x.adjoint());
                    let rhs = self.apply(&x).adjoint();
                    d = d.max((&lhs - &rhs).max_abs());
                }
            }
        }
        d
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Self) -> Superoperator {
        Superoperator {
            matrix: &self.matrix + &rhs.matrix,
            ..self.clone()
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: Self) -> Superoperator {
        Superoperator {
            matrix: &self.matrix - &rhs.matrix,
            ..self.clone()
        }
    }
}

/// `a |-> X a Y*` from `domain` into the full algebra of `X`'s row space.
pub fn ad(x: &Mat, y: &Mat, domain: &BlockSpace) -> Superoperator {
    let codomain = BlockSpace::full(x.nrows());
    Superoperator::from_fn(domain, &codomain, |a| {
        CommutantElement::new(vec![x * a.to_full() * y.adjoint()])
    })
}

/// Minimum eigenvalue of the Choi matrix after symmetrization, with the
/// corresponding eigenvector.
pub fn choi_min_eigen(choi: &Mat) -> (f64, Vector) {
    let (vals, vecs) = linalg::eigh(&linalg::hermitian_part(choi));
    if vals.is_empty() {
        return (f64::INFINITY, Vector::zeros(0));
    }
    (vals[0], vecs.column(0).into_owned())
}
