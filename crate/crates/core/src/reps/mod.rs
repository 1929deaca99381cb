//! Representations of `M = l^inf(G^0)` with multiplicities, covariant
//! representations `(T, sigma)` given by edge blocks, points of the dual
//! correspondence, and the completely positive maps `Phi_T`.

mod induced;
mod superop;

use std::fmt;
use std::sync::Arc;

pub use induced::{induced_rep, isometric_dilation, Dilation, InducedRep};
pub use superop::{ad, choi_min_eigen, BlockSpace, CommutantElement, Superoperator};

use crate::corr::{AlgebraElement, DirectedGraph, Path};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C};

/// Tolerance for the isometry and coisometry flags.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Tolerance for block support and covariance.
pub const COVARIANCE_TOL: f64 = 1e-12;
/// `Phi_T^n(I)` below this norm counts as decayed.
pub const PURITY_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_PURITY_CAP: usize = 200;

/// `sigma` on `H = (+)_v C^{m_v}`, acting on the block of vertex `v` by `a(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    graph: Arc<DirectedGraph>,
    multiplicity: Vec<usize>,
    offsets: Vec<usize>,
}

impl Representation {
    pub fn new(graph: impl Into<Arc<DirectedGraph>>, multiplicity: Vec<usize>) -> Result<Self> {
        let graph = graph.into();
        if multiplicity.len() != graph.num_vertices() {
            return Err(Error::Precondition(format!(
                "expected {} multiplicities, got {}",
                graph.num_vertices(),
                multiplicity.len()
            )));
        }
        let mut offsets = Vec::with_capacity(multiplicity.len() + 1);
        let mut acc = 0;
        for &m in &multiplicity {
            offsets.push(acc);
            acc += m;
        }
        offsets.push(acc);
        Ok(Self {
            graph,
            multiplicity,
            offsets,
        })
    }

    /// Every vertex with multiplicity `m`.
    pub fn uniform(graph: impl Into<Arc<DirectedGraph>>, m: usize) -> Self {
        let graph = graph.into();
        let n = graph.num_vertices();
        Self::new(graph, vec![m; n]).unwrap()
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<DirectedGraph> {
        self.graph.clone()
    }

    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn mult(&self, v: usize) -> usize {
        self.multiplicity[v]
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    pub fn block_range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Vertex owning global index `i` of `H`.
    pub fn vertex_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    /// `sigma` is faithful iff every multiplicity is positive.
    pub fn is_faithful(&self) -> bool {
        self.multiplicity.iter().all(|&m| m > 0)
    }

    /// The commutant `sigma(M)'` as a block space.
    pub fn block_space(&self) -> BlockSpace {
        BlockSpace::new(self.multiplicity.clone())
    }

    /// `Q_v = sigma(delta_v)`.
    pub fn q(&self, v: usize) -> Mat {
        let mut m = Mat::zeros(self.dim(), self.dim());
        for i in self.block_range(v) {
            m[(i, i)] = linalg::ONE;
        }
        m
    }

    pub fn sigma(&self, a: &AlgebraElement) -> Mat {
        let mut m = Mat::zeros(self.dim(), self.dim());
        for v in 0..self.graph.num_vertices() {
            for i in self.block_range(v) {
                m[(i, i)] = a.get(v);
            }
        }
        m
    }

    /// Column offsets of each path block in `E^(x)n (x) H = (+)_{|a|=n} H_{src a}`,
    /// with the total dimension.
    pub fn tensor_power_layout(&self, n: usize) -> (Vec<(Path, usize)>, usize) {
        let mut acc = 0;
        let layout = self
            .graph
            .paths_of_length(n)
            .into_iter()
            .map(|p| {
                let o = acc;
                acc += self.multiplicity[p.src()];
                (p, o)
            })
            .collect();
        (layout, acc)
    }

    /// Offsets of the edge blocks in `E (x) H = (+)_e H_{src e}`, with the total.
    pub fn edge_layout(&self) -> (Vec<usize>, usize) {
        let mut acc = 0;
        let offs = self
            .graph
            .edges()
            .iter()
            .map(|e| {
                let o = acc;
                acc += self.multiplicity[e.src];
                o
            })
            .collect();
        (offs, acc)
    }

    fn check_edge_blocks(&self, blocks: &[Mat], transposed: bool) -> Result<()> {
        if blocks.len() != self.graph.num_edges() {
            return Err(Error::Precondition(format!(
                "expected {} edge blocks, got {}",
                self.graph.num_edges(),
                blocks.len()
            )));
        }
        for (e, b) in blocks.iter().enumerate() {
            let edge = self.graph.edge(e);
            let mut expected = (self.mult(edge.rng), self.mult(edge.src));
            if transposed {
                expected = (expected.1, expected.0);
            }
            if b.shape() != expected {
                return Err(Error::ShapeMismatch {
                    what: format!("block of edge {}", edge.name),
                    expected,
                    found: b.shape(),
                });
            }
        }
        Ok(())
    }
}

/// A covariant representation: edge blocks `T(e): H_{src e} -> H_{rng e}`
/// and the row operator `T~: E (x) H -> H`.
#[derive(Clone, Debug)]
pub struct CovariantRep {
    rep: Representation,
    blocks: Vec<Mat>,
    t_tilde: Mat,
    norm: f64,
    interior: Option<Vec<usize>>,
}

/// Assembles `T~` from edge blocks and checks covariance.
pub fn make_covariant(rep: &Representation, blocks: Vec<Mat>) -> Result<CovariantRep> {
    rep.check_edge_blocks(&blocks, false)?;
    let (offs, n_e) = rep.edge_layout();
    let mut t = Mat::zeros(rep.dim(), n_e);
    for (e, b) in blocks.iter().enumerate() {
        let edge = rep.graph().edge(e);
        t.view_mut((rep.offset(edge.rng), offs[e]), b.shape()).copy_from(b);
    }
    // T~ (phi(delta_v) (x) I) = sigma(delta_v) T~
    let mut residual: f64 = 0.0;
    for v in 0..rep.graph().num_vertices() {
        let mut left = t.clone();
        for (e, edge) in rep.graph().edges().iter().enumerate() {
            if edge.rng != v {
                left.columns_mut(offs[e], rep.mult(edge.src)).fill(linalg::ZERO);
            }
        }
        residual = residual.max(linalg::max_abs(&(left - rep.q(v) * &t)));
    }
    if residual > COVARIANCE_TOL {
        return Err(Error::CovarianceViolation { residual });
    }
    let norm = linalg::op_norm(&t);
    Ok(CovariantRep {
        rep: rep.clone(),
        blocks,
        t_tilde: t,
        norm,
        interior: None,
    })
}

/// Accepts `T(e)` as full `dim H x dim H` operators, checking
/// `T(e) = Q_{rng e} T(e) Q_{src e}` before extracting the blocks.
pub fn make_covariant_from_operators(rep: &Representation, ops: &[Mat]) -> Result<CovariantRep> {
    let n = rep.dim();
    let mut blocks = Vec::with_capacity(ops.len());
    for (e, op) in ops.iter().enumerate() {
        if op.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                what: format!("operator of edge {}", rep.graph().edge(e).name),
                expected: (n, n),
                found: op.shape(),
            });
        }
        let edge = rep.graph().edge(e);
        let supported = rep.q(edge.rng) * op * rep.q(edge.src);
        let residual = linalg::max_abs(&(op - supported));
        if residual > COVARIANCE_TOL {
            return Err(Error::CovarianceViolation { residual });
        }
        blocks.push(
            op.view(
                (rep.offset(edge.rng), rep.offset(edge.src)),
                (rep.mult(edge.rng), rep.mult(edge.src)),
            )
            .into_owned(),
        );
    }
    make_covariant(rep, blocks)
}

impl CovariantRep {
    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn graph(&self) -> &DirectedGraph {
        self.rep.graph()
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, e: usize) -> &Mat {
        &self.blocks[e]
    }

    /// `T(e)` as an operator on all of `H`.
    pub fn operator(&self, e: usize) -> Mat {
        let edge = self.graph().edge(e);
        let mut m = Mat::zeros(self.rep.dim(), self.rep.dim());
        m.view_mut(
            (self.rep.offset(edge.rng), self.rep.offset(edge.src)),
            self.blocks[e].shape(),
        )
        .copy_from(&self.blocks[e]);
        m
    }

    pub fn t_tilde(&self) -> &Mat {
        &self.t_tilde
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Completely contractive iff `||T~|| <= 1`.
    pub fn is_contractive(&self) -> bool {
        self.norm <= 1.0 + COVARIANCE_TOL
    }

    /// Marks the indices of `H` on which isometry is expected to hold
    /// (truncated models).
    pub fn with_interior(mut self, interior: Vec<usize>) -> Self {
        self.interior = Some(interior);
        self
    }

    pub fn interior(&self) -> Option<&[usize]> {
        self.interior.as_deref()
    }

    /// `T(e_1) ... T(e_k)` for a path; the identity block for a vertex.
    pub fn path_block(&self, p: &Path) -> Mat {
        let m = self.rep.mult(p.src());
        if p.is_empty() {
            return Mat::identity(m, m);
        }
        let mut acc = self.blocks[*p.edges().last().unwrap()].clone();
        for &e in p.edges().iter().rev().skip(1) {
            acc = &self.blocks[e] * acc;
        }
        acc
    }

    /// `Phi_T(b) = sum_e T(e) b_{src e} T(e)*`, evaluated blockwise.
    pub fn apply_cp(&self, b: &CommutantElement) -> CommutantElement {
        let mut out = CommutantElement::zero(&self.rep.block_space());
        for (e, edge) in self.graph().edges().iter().enumerate() {
            let t = &self.blocks[e];
            out.blocks[edge.rng] += t * &b.blocks[edge.src] * t.adjoint();
        }
        out
    }

    pub fn dual_point(&self) -> DualPoint {
        DualPoint::new(&self.rep, self.blocks.iter().map(|b| b.adjoint()).collect())
            .expect("adjoint blocks have dual shapes")
    }
}

/// `T~_n: E^(x)n (x) H -> H` with path-indexed column blocks.
pub fn generalized_power(t: &CovariantRep, n: usize) -> Mat {
    let rep = t.rep();
    let (layout, cols) = rep.tensor_power_layout(n);
    let mut m = Mat::zeros(rep.dim(), cols);
    for (p, off) in layout {
        let b = t.path_block(&p);
        m.view_mut((rep.offset(p.rng()), off), b.shape()).copy_from(&b);
    }
    m
}

/// `Phi_T` as a superoperator on `sigma(M)'`.
pub fn cp_map(t: &CovariantRep) -> Superoperator {
    let s = t.rep().block_space();
    Superoperator::from_fn(&s, &s, |b| t.apply_cp(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub contractive: bool,
    pub isometric: bool,
    pub fully_coisometric: bool,
    pub pure: bool,
    /// `||Phi_T^n(I)||` for `n = 1, 2, ...` until decay or the cap.
    pub decay: Vec<f64>,
    /// `T~* T~ = I` on the columns over the interior indices; `None` when
    /// the representation carries no interior.
    pub isometric_on_interior: Option<bool>,
    pub isometry_residual: f64,
    pub coisometry_residual: f64,
}

pub fn classify(t: &CovariantRep) -> Classification {
    classify_with_cap(t, DEFAULT_PURITY_CAP)
}

pub fn classify_with_cap(t: &CovariantRep, purity_cap: usize) -> Classification {
    let tt = t.t_tilde();
    let iso = linalg::max_abs(&(tt.adjoint() * tt - Mat::identity(tt.ncols(), tt.ncols())));
    let coiso = linalg::max_abs(&(tt * tt.adjoint() - Mat::identity(tt.nrows(), tt.nrows())));
    let space = t.rep().block_space();
    let mut q = CommutantElement::identity(&space);
    let mut decay = Vec::new();
    let mut pure = t.rep().dim() == 0;
    for _ in 0..purity_cap {
        if pure {
            break;
        }
        q = t.apply_cp(&q);
        let n = q.norm();
        decay.push(n);
        if n < PURITY_THRESHOLD {
            pure = true;
        }
    }
    let isometric_on_interior = t.interior().map(|interior| {
        let rep = t.rep();
        let (offs, _) = rep.edge_layout();
        let mut cols = Vec::new();
        for (e, edge) in t.graph().edges().iter().enumerate() {
            for &i in interior {
                if rep.vertex_of(i) == edge.src {
                    cols.push(offs[e] + i - rep.offset(edge.src));
                }
            }
        }
        let sub = tt.select_columns(&cols);
        let g = sub.adjoint() * &sub - Mat::identity(cols.len(), cols.len());
        linalg::max_abs(&g) <= ISOMETRY_TOL
    });
    Classification {
        contractive: t.is_contractive(),
        isometric: iso <= ISOMETRY_TOL,
        fully_coisometric: coiso <= ISOMETRY_TOL,
        pure,
        decay,
        isometric_on_interior,
        isometry_residual: iso,
        coisometry_residual: coiso,
    }
}

/// A point `eta = T~*` of the dual correspondence, with blocks
/// `eta_e = T(e)*: H_{rng e} -> H_{src e}`.
#[derive(Clone, Debug)]
pub struct DualPoint {
    rep: Representation,
    blocks: Vec<Mat>,
    norm: f64,
}

impl DualPoint {
    pub fn new(rep: &Representation, blocks: Vec<Mat>) -> Result<Self> {
        rep.check_edge_blocks(&blocks, true)?;
        let mut p = Self {
            rep: rep.clone(),
            blocks,
            norm: 0.0,
        };
        p.norm = linalg::op_norm(&p.column());
        Ok(p)
    }

    pub fn zero(rep: &Representation) -> Self {
        let blocks = rep
            .graph()
            .edges()
            .iter()
            .map(|e| Mat::zeros(rep.mult(e.src), rep.mult(e.rng)))
            .collect();
        Self::new(rep, blocks).unwrap()
    }

    /// A point on a representation with every relevant multiplicity one,
    /// given by one scalar per edge.
    pub fn scalar(rep: &Representation, values: &[C]) -> Result<Self> {
        let blocks = values.iter().map(|z| Mat::from_element(1, 1, *z)).collect();
        Self::new(rep, blocks)
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn graph(&self) -> &DirectedGraph {
        self.rep.graph()
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, e: usize) -> &Mat {
        &self.blocks[e]
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `eta: H -> E (x) H` as a matrix.
    pub fn column(&self) -> Mat {
        let (offs, n_e) = self.rep.edge_layout();
        let mut m = Mat::zeros(n_e, self.rep.dim());
        for (e, b) in self.blocks.iter().enumerate() {
            let edge = self.graph().edge(e);
            m.view_mut((offs[e], self.rep.offset(edge.rng)), b.shape())
                .copy_from(b);
        }
        m
    }

    pub fn to_covariant(&self) -> CovariantRep {
        make_covariant(&self.rep, self.blocks.iter().map(|b| b.adjoint()).collect())
            .expect("adjoint blocks are covariant")
    }

    /// `<eta, zeta> = eta* zeta`, block `v` collecting edges with range `v`.
    pub fn inner(&self, other: &Self) -> CommutantElement {
        let mut out = CommutantElement::zero(&self.rep.block_space());
        for (e, edge) in self.graph().edges().iter().enumerate() {
            out.blocks[edge.rng] += self.blocks[e].adjoint() * &other.blocks[e];
        }
        out
    }

    /// `(I_E (x) x) eta`.
    pub fn left_action(&self, x: &CommutantElement) -> Self {
        let blocks = self
            .graph()
            .edges()
            .iter()
            .zip(&self.blocks)
            .map(|(edge, b)| &x.blocks[edge.src] * b)
            .collect();
        Self::new(&self.rep, blocks).unwrap()
    }

    /// `eta y`.
    pub fn right_action(&self, y: &CommutantElement) -> Self {
        let blocks = self
            .graph()
            .edges()
            .iter()
            .zip(&self.blocks)
            .map(|(edge, b)| b * &y.blocks[edge.rng])
            .collect();
        Self::new(&self.rep, blocks).unwrap()
    }

    pub fn scale(&self, s: C) -> Self {
        Self::new(&self.rep, self.blocks.iter().map(|b| b * s).collect()).unwrap()
    }

    pub fn add(&self, other: &Self) -> Self {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Self::new(&self.rep, blocks).unwrap()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}

/// Block structure of the dual correspondence `E^sigma`.
#[derive(Clone, Debug)]
pub struct DualCorrespondence {
    pub rep: Representation,
    /// `(edge name, shape of eta_e)`.
    pub block_shapes: Vec<(String, (usize, usize))>,
    /// When every multiplicity is one, `E^sigma` is the correspondence of
    /// the opposite graph.
    pub opposite_graph: Option<DirectedGraph>,
}

pub fn dual_correspondence(rep: &Representation) -> DualCorrespondence {
    let block_shapes = rep
        .graph()
        .edges()
        .iter()
        .map(|e| (e.name.clone(), (rep.mult(e.src), rep.mult(e.rng))))
        .collect();
    let opposite_graph = rep
        .multiplicity()
        .iter()
        .all(|&m| m == 1)
        .then(|| rep.graph().opposite());
    DualCorrespondence {
        rep: rep.clone(),
        block_shapes,
        opposite_graph,
    }
}

impl fmt::Display for DualCorrespondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.rep.graph();
        writeln!(f, "dual correspondence over the commutant")?;
        for (v, name) in g.vertices().iter().enumerate() {
            writeln!(f, "  vertex {name}: B(C^{})", self.rep.mult(v))?;
        }
        for ((name, (r, c)), edge) in self.block_shapes.iter().zip(g.edges()) {
            writeln!(
                f,
                "  eta[{name}]: H_{} -> H_{} ({r}x{c})",
                g.vertices()[edge.rng],
                g.vertices()[edge.src]
            )?;
        }
        writeln!(f, "  left action: eta_e -> x_(src e) eta_e")?;
        writeln!(f, "  right action: eta_e -> eta_e y_(rng e)")?;
        writeln!(f, "  inner product: <eta,zeta>_v = sum_(rng e = v) eta_e* zeta_e")?;
        if let Some(op) = &self.opposite_graph {
            let edges: Vec<String> = op
                .edges()
                .iter()
                .map(|e| format!("{}: {} -> {}", e.name, op.vertices()[e.src], op.vertices()[e.rng]))
                .collect();
            writeln!(f, "  scalar blocks: correspondence of the opposite graph [{}]", edges.join(", "))?;
        }
        Ok(())
    }
}
