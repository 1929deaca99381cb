//! Completely positive kernels on the dual ball: Pick maps,
//! Nevanlinna-Pick feasibility, Schur-class tests, transfer-function
//! realizations, the Schwarz inequality, the Lyapunov preorder and the
//! boundary interpolation condition.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{evaluate, DEFAULT_EVAL_TOL};
use crate::fock::{hardy_norm_lower, FockBasis, HardyElement};
use crate::linalg::{self, Mat, Vector, C, ONE};
use crate::reps::{
    ad, BlockSpace, CommutantElement, DualPoint, InducedRep, Representation,
    Superoperator,
};

/// Relative PSD tolerance for Choi matrices.
pub const PSD_TOL: f64 = 1e-9;
/// Resolvents are refused once the spectral radius reaches `1 - BOUNDARY_GAP`.
pub const BOUNDARY_GAP: f64 = 1e-9;
pub const SCHWARZ_TOL: f64 = 1e-8;

/// `theta_{eta,zeta}(a) = <eta, a zeta> = sum_e eta_e* a_{src e} zeta_e`.
pub fn theta_map(eta: &DualPoint, zeta: &DualPoint) -> Result<Superoperator> {
    if eta.rep() != zeta.rep() {
        return Err(Error::Precondition(
            "points must share one representation".into(),
        ));
    }
    let space = eta.rep().block_space();
    let edges = eta.graph().edges().to_vec();
    Ok(Superoperator::from_fn(&space, &space, |a| {
        let mut out = CommutantElement::zero(&space);
        for (e, edge) in edges.iter().enumerate() {
            out.blocks[edge.rng] += eta.block(e).adjoint() * &a.blocks[edge.src] * zeta.block(e);
        }
        out
    }))
}

/// `(id - theta)^(-1)`.
pub fn resolvent(theta: &Superoperator) -> Result<Superoperator> {
    let rho = theta.spectral_radius();
    if rho >= 1.0 - BOUNDARY_GAP {
        return Err(Error::BoundaryPoint {
            spectral_radius: rho,
        });
    }
    let id = Superoperator::identity(&theta.domain);
    let gap = &id - theta;
    let inv = gap.try_inverse().ok_or(Error::BoundaryPoint {
        spectral_radius: rho,
    })?;
    let residual = linalg::max_abs(&(&gap.matrix * &inv.matrix - &id.matrix));
    if residual > 1e-10 * linalg::op_norm(&inv.matrix).max(1.0) {
        return Err(Error::Precondition(format!(
            "resolvent residual {residual:.3e} too large"
        )));
    }
    Ok(inv)
}

/// A `k x k` array of maps from the commutant into `B(H)`.
#[derive(Clone, Debug)]
pub struct KernelBlockMap {
    pub size: usize,
    /// Row-major `(i, j)` entries.
    pub blocks: Vec<Superoperator>,
    pub domain: BlockSpace,
    /// Dimension of `H`.
    pub target_dim: usize,
}

impl KernelBlockMap {
    pub fn new(size: usize, blocks: Vec<Superoperator>) -> Self {
        assert_eq!(blocks.len(), size * size);
        let domain = blocks
            .first()
            .map(|b| b.domain.clone())
            .unwrap_or_else(|| BlockSpace::new(Vec::new()));
        let target_dim = blocks.first().map_or(0, |b| b.codomain.full_dim());
        Self {
            size,
            blocks,
            domain,
            target_dim,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Superoperator {
        &self.blocks[i * self.size + j]
    }

    /// `max |K(j,i)(a) - K(i,j)(a*)*|` over matrix units `a`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                for (v, &m) in self.domain.sizes().iter().enumerate() {
                    for p in 0..m {
                        for q in 0..m {
                            let a = self.domain.unit(v, p, q);
                            let lhs = self.entry(j, i).apply(&a);
                            let rhs = self.entry(i, j).apply(&a.adjoint()).adjoint();
                            d = d.max((&lhs - &rhs).max_abs());
                        }
                    }
                }
            }
        }
        d
    }

    /// Choi matrix of `Psi_K o E`, where `Psi_K((a_ij)) = (K(i,j)(a_ij))` and
    /// `E` compresses `M_k(M_n)` onto `M_k(sigma(M)')`.
    pub fn choi(&self) -> Mat {
        let k = self.size;
        let n = self.domain.full_dim();
        let t = self.target_dim;
        let big_in = k * n;
        let big_out = k * t;
        let mut out = Mat::zeros(big_in * big_out, big_in * big_out);
        for i in 0..k {
            for j in 0..k {
                let entry = self.entry(i, j);
                for (v, &m) in self.domain.sizes().iter().enumerate() {
                    let o = self.domain.full_offset(v);
                    for p in 0..m {
                        for q in 0..m {
                            let img = entry.apply(&self.domain.unit(v, p, q)).to_full();
                            let row = (i * n + o + p) * big_out + i * t;
                            let col = (j * n + o + q) * big_out + j * t;
                            out.view_mut((row, col), (t, t)).copy_from(&img);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CpVerdict {
    pub completely_positive: bool,
    /// Smallest Choi eigenvalue within ten times the tolerance of zero.
    pub marginal: bool,
    pub min_eigenvalue: f64,
    pub choi_norm: f64,
    pub spectrum: Vec<f64>,
    /// Eigenvector of the most negative Choi eigenvalue when not CP.
    pub witness: Option<Vector>,
}

pub fn choi_verdict(choi: &Mat) -> CpVerdict {
    let herm = linalg::hermitian_part(choi);
    let (spectrum, vecs) = linalg::eigh(&herm);
    let choi_norm = spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let min_eigenvalue = spectrum.first().copied().unwrap_or(0.0);
    let tol = PSD_TOL * choi_norm;
    let cp = min_eigenvalue >= -tol;
    CpVerdict {
        completely_positive: cp,
        marginal: choi_norm > 0.0 && min_eigenvalue.abs() <= 10.0 * tol,
        min_eigenvalue,
        choi_norm,
        witness: (!cp).then(|| vecs.column(0).into_owned()),
        spectrum,
    }
}

pub fn is_completely_positive(k: &KernelBlockMap) -> CpVerdict {
    choi_verdict(&k.choi())
}

/// Points `eta_i` on one representation with data `B_i`, `C_i` on `H`.
#[derive(Clone, Debug)]
pub struct InterpolationProblem {
    pub points: Vec<DualPoint>,
    pub b: Vec<Mat>,
    pub c: Vec<Mat>,
}

impl InterpolationProblem {
    pub fn new(points: Vec<DualPoint>, b: Vec<Mat>, c: Vec<Mat>) -> Result<Self> {
        let k = points.len();
        if k == 0 || b.len() != k || c.len() != k {
            return Err(Error::Precondition(format!(
                "need matching nonempty lists of points and data (got {}, {}, {})",
                k,
                b.len(),
                c.len()
            )));
        }
        let rep = points[0].rep();
        if points.iter().any(|p| p.rep() != rep) {
            return Err(Error::Precondition(
                "all points must share one representation".into(),
            ));
        }
        let n = rep.dim();
        for (name, list) in [("B", &b), ("C", &c)] {
            for (i, m) in list.iter().enumerate() {
                if m.shape() != (n, n) {
                    return Err(Error::ShapeMismatch {
                        what: format!("{name}[{i}]"),
                        expected: (n, n),
                        found: m.shape(),
                    });
                }
            }
        }
        Ok(Self { points, b, c })
    }

    /// Scalar problem on the single-loop graph: `B_i = 1`, `C_i = w_i`,
    /// points `z_i`.
    pub fn scalar(z: &[C], w: &[C]) -> Result<Self> {
        let rep = Representation::uniform(crate::corr::DirectedGraph::free(1), 1);
        let points = z
            .iter()
            .map(|&zi| DualPoint::scalar(&rep, &[zi]))
            .collect::<Result<Vec<_>>>()?;
        let b = vec![Mat::identity(1, 1); z.len()];
        let c = w.iter().map(|&wi| Mat::from_element(1, 1, wi)).collect();
        Self::new(points, b, c)
    }

    pub fn rep(&self) -> &Representation {
        self.points[0].rep()
    }
}

/// Entry `(i, j)`: `(Ad(B_i, B_j) - Ad(C_i, C_j)) o (id - theta_{eta_i, eta_j})^(-1)`.
pub fn pick_matrix(problem: &InterpolationProblem) -> Result<KernelBlockMap> {
    let k = problem.points.len();
    let space = problem.rep().block_space();
    let mut blocks = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let res = resolvent(&theta_map(&problem.points[i], &problem.points[j])?)?;
            let diff = &ad(&problem.b[i], &problem.b[j], &space) - &ad(&problem.c[i], &problem.c[j], &space);
            blocks.push(diff.compose(&res));
        }
    }
    Ok(KernelBlockMap::new(k, blocks))
}

#[derive(Clone, Debug)]
pub struct NpVerdict {
    pub feasible: bool,
    pub cp: CpVerdict,
    /// The interpolation theorem assumes a faithful representation.
    pub faithful: bool,
}

pub fn np_feasible(problem: &InterpolationProblem) -> Result<NpVerdict> {
    let cp = is_completely_positive(&pick_matrix(problem)?);
    Ok(NpVerdict {
        feasible: cp.completely_positive,
        cp,
        faithful: problem.rep().is_faithful(),
    })
}

/// The kernel `K_Z` on a finite sample, checked for complete positivity.
pub fn schur_kernel_test(z: &dyn Fn(&DualPoint) -> Mat, sample: &[DualPoint]) -> Result<CpVerdict> {
    let n = sample
        .first()
        .map(|p| p.rep().dim())
        .ok_or_else(|| Error::Precondition("empty sample".into()))?;
    let b = vec![Mat::identity(n, n); sample.len()];
    let c = sample.iter().map(z).collect();
    let problem = InterpolationProblem::new(sample.to_vec(), b, c)?;
    Ok(is_completely_positive(&pick_matrix(&problem)?))
}

/// A coisometric colligation `U = [[A, B], [C, D]]` intertwining the
/// commutant actions. At vertex `v` it acts as `I_{m_v} (x) U_v` with
/// `U_v : C^{l_v} (+) C -> ((+)_{src e = v} C^{l_{rng e}}) (+) C`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub rep: Representation,
    /// Auxiliary multiplicities `l_v`.
    pub aux: Vec<usize>,
    pub u_blocks: Vec<Mat>,
}

impl Realization {
    pub fn new(rep: &Representation, aux: Vec<usize>, u_blocks: Vec<Mat>) -> Result<Self> {
        let g = rep.graph();
        if aux.len() != g.num_vertices() || u_blocks.len() != g.num_vertices() {
            return Err(Error::Precondition("one block per vertex required".into()));
        }
        for v in 0..g.num_vertices() {
            let rows: usize = g.edges().iter().filter(|e| e.src == v).map(|e| aux[e.rng]).sum::<usize>() + 1;
            let expected = (rows, aux[v] + 1);
            if u_blocks[v].shape() != expected {
                return Err(Error::ShapeMismatch {
                    what: format!("colligation block at vertex {}", g.vertices()[v]),
                    expected,
                    found: u_blocks[v].shape(),
                });
            }
            let uu = &u_blocks[v] * u_blocks[v].adjoint();
            let residual = linalg::max_abs(&(uu - Mat::identity(rows, rows)));
            if residual > 1e-10 {
                return Err(Error::NotCoisometric { residual });
            }
        }
        Ok(Self {
            rep: rep.clone(),
            aux,
            u_blocks,
        })
    }

    fn aux_offsets(&self) -> (Vec<usize>, usize) {
        let mut acc = 0;
        let offs = (0..self.aux.len())
            .map(|v| {
                let o = acc;
                acc += self.rep.mult(v) * self.aux[v];
                o
            })
            .collect();
        (offs, acc)
    }

    fn tensor_offsets(&self) -> (Vec<usize>, usize) {
        let mut acc = 0;
        let offs = self
            .rep
            .graph()
            .edges()
            .iter()
            .map(|e| {
                let o = acc;
                acc += self.rep.mult(e.src) * self.aux[e.rng];
                o
            })
            .collect();
        (offs, acc)
    }

    /// `(A, B, C, D)` as full matrices:
    /// `A: aux -> E^sigma (x) aux`, `B: H -> E^sigma (x) aux`, `C: aux -> H`, `D: H -> H`.
    pub fn blocks(&self) -> (Mat, Mat, Mat, Mat) {
        let g = self.rep.graph();
        let (aoff, na) = self.aux_offsets();
        let (toff, nt) = self.tensor_offsets();
        let nh = self.rep.dim();
        let mut a = Mat::zeros(nt, na);
        let mut b = Mat::zeros(nt, nh);
        let mut c = Mat::zeros(nh, na);
        let mut d = Mat::zeros(nh, nh);
        for v in 0..g.num_vertices() {
            let u = &self.u_blocks[v];
            let m = self.rep.mult(v);
            let lv = self.aux[v];
            // row segments of U_v: edges with source v, then the H row
            let mut segs = Vec::new();
            let mut r0 = 0;
            for (e, edge) in g.edges().iter().enumerate() {
                if edge.src == v {
                    segs.push((e, r0, self.aux[edge.rng]));
                    r0 += self.aux[edge.rng];
                }
            }
            for i in 0..m {
                for &(e, start, le) in &segs {
                    let row = |r: usize| toff[e] + i * le + r;
                    for r in 0..le {
                        for col in 0..lv {
                            a[(row(r), aoff[v] + i * lv + col)] = u[(start + r, col)];
                        }
                        b[(row(r), self.rep.offset(v) + i)] = u[(start + r, lv)];
                    }
                }
                for col in 0..lv {
                    c[(self.rep.offset(v) + i, aoff[v] + i * lv + col)] = u[(r0, col)];
                }
                d[(self.rep.offset(v) + i, self.rep.offset(v) + i)] = u[(r0, lv)];
            }
        }
        (a, b, c, d)
    }

    /// `L_eta: aux -> E^sigma (x) aux`, `h |-> eta (x) h`.
    pub fn creation(&self, eta: &DualPoint) -> Mat {
        let g = self.rep.graph();
        let (aoff, na) = self.aux_offsets();
        let (toff, nt) = self.tensor_offsets();
        let mut l = Mat::zeros(nt, na);
        for (e, edge) in g.edges().iter().enumerate() {
            let lw = self.aux[edge.rng];
            let block = linalg::kron(eta.block(e), &Mat::identity(lw, lw));
            l.view_mut((toff[e], aoff[edge.rng]), block.shape()).copy_from(&block);
        }
        l
    }
}

/// `Z(eta*) = D + C (I - L_eta* A)^(-1) L_eta* B`.
pub fn realization_evaluate(real: &Realization, eta: &DualPoint) -> Result<Mat> {
    if eta.rep() != &real.rep {
        return Err(Error::Precondition(
            "point and realization use different representations".into(),
        ));
    }
    let (a, b, c, d) = real.blocks();
    let ls = real.creation(eta).adjoint();
    let la = &ls * &a;
    let rho = linalg::spectral_radius(&la);
    if rho >= 1.0 - BOUNDARY_GAP {
        return Err(Error::BoundaryPoint {
            spectral_radius: rho,
        });
    }
    let n = la.nrows();
    let inv = (Mat::identity(n, n) - la)
        .try_inverse()
        .ok_or(Error::BoundaryPoint {
            spectral_radius: rho,
        })?;
    Ok(d + c * inv * ls * b)
}

#[derive(Clone, Debug)]
pub struct SchwarzVerdict {
    pub holds: bool,
    /// Smallest eigenvalue of `<eta, eta> - X^ X^*`.
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub tail_bound: f64,
}

/// `X^(eta*) X^(eta*)* <= <eta, eta>` for `theta` with `a0 = 0` and norm at most one.
pub fn schwartz_check(theta: &HardyElement, eta: &DualPoint, basis: &FockBasis) -> Result<SchwarzVerdict> {
    if theta.a0().norm() > 0.0 {
        return Err(Error::Precondition(
            "the constant term must vanish".into(),
        ));
    }
    let lower = hardy_norm_lower(theta, basis);
    if lower > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!(
            "element is not normalized (norm at least {lower:.6})"
        )));
    }
    if eta.norm() >= 1.0 {
        return Err(Error::Precondition("point must be interior".into()));
    }
    let x = evaluate(theta, eta, DEFAULT_EVAL_TOL)?;
    let gram = eta.inner(eta).to_full();
    let xx = &x.value * x.value.adjoint();
    let min_eigenvalue = linalg::min_eigenvalue(&linalg::hermitian_part(&(gram - xx)));
    // |X X* - Y Y*| <= (2|X| + tail) tail with |X| <= 1
    let tolerance = SCHWARZ_TOL + x.tail_bound * (2.0 + x.tail_bound);
    Ok(SchwarzVerdict {
        holds: min_eigenvalue >= -tolerance,
        min_eigenvalue,
        tolerance,
        tail_bound: x.tail_bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum LyapunovMethod {
    /// Complete positivity of `(id - Psi) o (id - Phi)^(-1)`.
    Exact,
    /// Inclusion tested on this many sampled cone elements.
    Sampled(usize),
}

#[derive(Clone, Debug)]
pub struct LyapunovVerdict {
    pub holds: bool,
    pub method: LyapunovMethod,
    pub min_eigenvalue: f64,
}

/// Decides `{a >= 0 : Phi(a) <= a} subset {a >= 0 : Psi(a) <= a}`.
pub fn lyapunov_preorder(phi: &Superoperator, psi: &Superoperator, seed: u64) -> LyapunovVerdict {
    let space = phi.domain.clone();
    let id = Superoperator::identity(&space);
    if phi.spectral_radius() < 1.0 - BOUNDARY_GAP {
        if let Some(inv) = (&id - phi).try_inverse() {
            let m = (&id - psi).compose(&inv);
            let v = choi_verdict(&m.choi());
            return LyapunovVerdict {
                holds: v.completely_positive,
                method: LyapunovMethod::Exact,
                min_eigenvalue: v.min_eigenvalue,
            };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = vec![CommutantElement::identity(&space)];
    for _ in 0..64 {
        let b = CommutantElement::new(
            space
                .sizes()
                .iter()
                .map(|&m| {
                    let g = Mat::from_fn(m, m, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
                    &g * g.adjoint()
                })
                .collect(),
        );
        // Cesaro averages of the orbit are close to the cone for contractive Phi
        let mut acc = CommutantElement::zero(&space);
        let mut x = b.clone();
        for _ in 0..32 {
            acc = &acc + &x;
            x = phi.apply(&x);
        }
        candidates.push(b);
        candidates.push(acc.scale(C::new(1.0 / 32.0, 0.0)));
    }
    let mut tested = 0;
    let mut worst = f64::INFINITY;
    for a in &candidates {
        let scale = a.norm().max(1.0);
        if (&a.clone() - &phi.apply(a)).min_eigenvalue() < -1e-12 * scale {
            continue;
        }
        tested += 1;
        worst = worst.min((&a.clone() - &psi.apply(a)).min_eigenvalue() / scale);
    }
    LyapunovVerdict {
        holds: worst >= -1e-10,
        method: LyapunovMethod::Sampled(tested),
        min_eigenvalue: worst,
    }
}

/// `C: F(E) (x) H_0 -> H` determined by its vacuum blocks
/// `c0[v]: H_0,v -> H_v` through `C (delta_alpha (x) x) = T(alpha) C x`.
pub fn intertwiner_from_vacuum(
    induced: &InducedRep,
    basis: &FockBasis,
    eta: &DualPoint,
    c0: &[Mat],
) -> Mat {
    let t = eta.to_covariant();
    let rep = eta.rep();
    let krep = induced.covrep.rep();
    let mut c = Mat::zeros(rep.dim(), krep.dim());
    for (pi, p) in basis.paths().iter().enumerate() {
        let block = t.path_block(p) * &c0[p.src()];
        for i in 0..block.ncols() {
            let col = induced.index(pi, i);
            c.view_mut((rep.offset(p.rng()), col), (block.nrows(), 1))
                .copy_from(&block.column(i));
        }
    }
    c
}

/// `max |C S(e) - T(e) C|` on interior columns, together with the
/// off-diagonal mass `|C sigma_ind(a) - sigma(a) C|`.
pub fn truncated_intertwiner_residual(induced: &InducedRep, eta: &DualPoint, c: &Mat) -> f64 {
    let t = eta.to_covariant();
    let s = &induced.covrep;
    let interior = s.interior().unwrap_or(&[]);
    let mut residual: f64 = 0.0;
    for e in 0..eta.graph().num_edges() {
        let lhs = c * s.operator(e);
        let rhs = t.operator(e) * c;
        for &col in interior {
            let d = (lhs.column(col) - rhs.column(col)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            residual = residual.max(d);
        }
    }
    for v in 0..eta.graph().num_vertices() {
        let d = eta.rep().q(v) * c - c * s.rep().q(v);
        residual = residual.max(linalg::max_abs(&d));
    }
    residual
}

#[derive(Clone, Debug)]
pub struct BoundaryVerdict {
    pub consistent: bool,
    /// Smallest eigenvalue of `(C_l C_j*) - (D_l C_l C_j* D_j*)`.
    pub min_eigenvalue: f64,
    /// The family indices echoed on violation.
    pub violating: Option<Vec<usize>>,
}

/// Necessary condition for boundary interpolation on a finite family of
/// truncated intertwiners `C_j in I(S, eta_{i(j)}*)`:
/// `(D_{i(l)} C_l C_j* D_{i(j)}*) <= (C_l C_j*)`.
pub fn boundary_np_check(
    points: &[DualPoint],
    d: &[Mat],
    induced: &InducedRep,
    family: &[(usize, Mat)],
) -> Result<BoundaryVerdict> {
    if points.len() != d.len() {
        return Err(Error::Precondition("one datum per point required".into()));
    }
    for (j, (i, c)) in family.iter().enumerate() {
        let eta = points
            .get(*i)
            .ok_or_else(|| Error::Precondition(format!("family member {j} names point {i}")))?;
        let res = truncated_intertwiner_residual(induced, eta, c);
        if res > 1e-9 {
            return Err(Error::Precondition(format!(
                "family member {j} is not a truncated intertwiner (residual {res:.3e})"
            )));
        }
    }
    let n = points.first().map_or(0, |p| p.rep().dim());
    let m = family.len();
    let mut left = Mat::zeros(m * n, m * n);
    let mut right = Mat::zeros(m * n, m * n);
    for (l, (il, cl)) in family.iter().enumerate() {
        for (j, (ij, cj)) in family.iter().enumerate() {
            let g = cl * cj.adjoint();
            let lg = &d[*il] * &g * d[*ij].adjoint();
            right.view_mut((l * n, j * n), (n, n)).copy_from(&g);
            left.view_mut((l * n, j * n), (n, n)).copy_from(&lg);
        }
    }
    let scale = linalg::op_norm(&right).max(1.0);
    let min_eigenvalue = linalg::min_eigenvalue(&linalg::hermitian_part(&(right - left)));
    let consistent = min_eigenvalue >= -PSD_TOL * scale;
    Ok(BoundaryVerdict {
        consistent,
        min_eigenvalue,
        violating: (!consistent).then(|| (0..m).collect()),
    })
}

/// The classical Pick matrix `((1 - w_i conj(w_j)) / (1 - conj(z_i) z_j))`
/// for points `eta = z_i` (so that `T = conj(z_i)`).
pub fn classical_pick_matrix(z: &[C], w: &[C]) -> Mat {
    let k = z.len();
    Mat::from_fn(k, k, |i, j| (ONE - w[i] * w[j].conj()) / (ONE - z[i].conj() * z[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::DirectedGraph;
    use crate::linalg::{c, max_abs, r};
    use crate::reps::induced_rep;
    use std::sync::Arc;

    fn scalar_point(z: C) -> DualPoint {
        DualPoint::scalar(&Representation::uniform(DirectedGraph::free(1), 1), &[z]).unwrap()
    }

    fn unit(v: f64) -> CommutantElement {
        CommutantElement::new(vec![Mat::from_element(1, 1, r(v))])
    }

    #[test]
    fn theta_map_examples() {
        let (z, w) = (c(0.3, 0.2), c(-0.1, 0.5));
        let th = theta_map(&scalar_point(z), &scalar_point(w)).unwrap();
        let out = th.apply(&unit(2.0)).blocks[0][(0, 0)];
        assert!((out - z.conj() * w * 2.0).norm() < 1e-15);
        let zero = theta_map(&scalar_point(r(0.0)), &scalar_point(w)).unwrap();
        assert_eq!(max_abs(&zero.matrix), 0.0);
        let rep = Representation::uniform(DirectedGraph::free(2), 1);
        let (z1, z2, w1, w2) = (c(0.1, 0.2), c(0.3, -0.1), c(0.2, 0.0), c(0.0, 0.4));
        let e = DualPoint::scalar(&rep, &[z1, z2]).unwrap();
        let f = DualPoint::scalar(&rep, &[w1, w2]).unwrap();
        let out = theta_map(&e, &f).unwrap().apply(&unit(1.0)).blocks[0][(0, 0)];
        assert!((out - (z1.conj() * w1 + z2.conj() * w2)).norm() < 1e-15);
    }

    #[test]
    fn resolvent_examples() {
        let s = BlockSpace::full(1);
        let zero = Superoperator::zero(&s, &s);
        assert_eq!(resolvent(&zero).unwrap().matrix, Mat::identity(1, 1));
        let (z, w) = (c(0.3, 0.2), c(-0.1, 0.5));
        let th = theta_map(&scalar_point(z), &scalar_point(w)).unwrap();
        let res = resolvent(&th).unwrap();
        assert!((res.matrix[(0, 0)] - ONE / (ONE - z.conj() * w)).norm() < 1e-15);
        let s2 = BlockSpace::full(2);
        let mut nil = Superoperator::zero(&s2, &s2);
        nil.matrix[(1, 0)] = r(3.0);
        nil.matrix[(3, 1)] = r(-2.0);
        let res = resolvent(&nil).unwrap();
        let expected = Mat::identity(4, 4) + &nil.matrix + &nil.matrix * &nil.matrix;
        assert!(max_abs(&(res.matrix - expected)) < 1e-14);
        let id = Superoperator::identity(&s);
        assert!(matches!(resolvent(&id), Err(Error::BoundaryPoint { .. })));
    }

    #[test]
    fn scalar_pick_entries_match_classical_formula() {
        let z = [c(0.1, 0.2), c(-0.4, 0.1), c(0.0, -0.6)];
        let w = [c(0.3, 0.0), c(0.1, 0.1), c(-0.2, 0.5)];
        let p = InterpolationProblem::scalar(&z, &w).unwrap();
        let k = pick_matrix(&p).unwrap();
        let classical = classical_pick_matrix(&z, &w);
        for i in 0..3 {
            for j in 0..3 {
                let v = k.entry(i, j).apply(&unit(1.0)).blocks[0][(0, 0)];
                assert!((v - classical[(i, j)]).norm() < 1e-14);
            }
        }
        assert!(k.hermitian_defect() < 1e-12);
    }

    #[test]
    fn hand_computed_scalar_instances() {
        let ones = InterpolationProblem::scalar(&[r(0.0), r(0.5)], &[r(0.0), r(0.5)]).unwrap();
        assert!(np_feasible(&ones).unwrap().feasible);
        let bad = InterpolationProblem::scalar(&[r(0.0), r(0.5)], &[r(0.0), r(0.9)]).unwrap();
        let v = np_feasible(&bad).unwrap();
        assert!(!v.feasible);
        assert!(v.cp.witness.is_some());
        let classical = classical_pick_matrix(&[r(0.0), r(0.5)], &[r(0.0), r(0.9)]);
        assert!((classical[(1, 1)].re - 0.19 / 0.75).abs() < 1e-14);
    }

    #[test]
    fn trivial_kernels_are_cp() {
        let p = InterpolationProblem::scalar(&[c(0.2, 0.3), r(-0.5)], &[c(0.2, 0.3), r(-0.5)]).unwrap();
        let same = InterpolationProblem::new(p.points.clone(), p.c.clone(), p.c.clone()).unwrap();
        let k = pick_matrix(&same).unwrap();
        assert!(k.blocks.iter().all(|b| max_abs(&b.matrix) == 0.0));
        assert!(is_completely_positive(&k).completely_positive);
        let single = InterpolationProblem::scalar(&[r(0.0)], &[r(0.0)]).unwrap();
        let k = pick_matrix(&single).unwrap();
        assert_eq!(k.entry(0, 0).matrix, Mat::identity(1, 1));
        assert!(np_feasible(&single).unwrap().feasible);
    }

    #[test]
    fn schur_kernel_examples() {
        let sample: Vec<DualPoint> = [c(0.1, 0.2), c(-0.5, 0.3), c(0.0, -0.7)]
            .into_iter()
            .map(scalar_point)
            .collect();
        let ident = |p: &DualPoint| p.block(0).adjoint();
        assert!(schur_kernel_test(&ident, &sample).unwrap().completely_positive);
        let two = |_: &DualPoint| Mat::from_element(1, 1, r(2.0));
        assert!(!schur_kernel_test(&two, &sample).unwrap().completely_positive);
        let zero = |_: &DualPoint| Mat::zeros(1, 1);
        assert!(schur_kernel_test(&zero, &sample).unwrap().completely_positive);
    }

    #[test]
    fn flip_realization_is_the_coordinate_function() {
        let rep = Representation::uniform(DirectedGraph::free(1), 1);
        let flip = Mat::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        let real = Realization::new(&rep, vec![1], vec![flip]).unwrap();
        let z = c(0.3, -0.4);
        let v = realization_evaluate(&real, &scalar_point(z)).unwrap();
        assert!((v[(0, 0)] - z.conj()).norm() < 1e-15);
        let constant = Mat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), c(0.0, 1.0)]);
        let real = Realization::new(&rep, vec![1], vec![constant]).unwrap();
        let v = realization_evaluate(&real, &scalar_point(z)).unwrap();
        assert!((v[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        let bad = Mat::from_row_slice(2, 2, &[r(2.0), r(0.0), r(0.0), r(1.0)]);
        assert!(matches!(
            Realization::new(&rep, vec![1], vec![bad]),
            Err(Error::NotCoisometric { .. })
        ));
    }

    #[test]
    fn schwarz_examples() {
        let g = Arc::new(DirectedGraph::free(1));
        let basis = FockBasis::new(g.clone(), 8);
        let s = HardyElement::generator(g.clone(), 0);
        let z = c(0.3, 0.4);
        let v = schwartz_check(&s, &scalar_point(z), &basis).unwrap();
        assert!(v.holds && v.min_eigenvalue.abs() < 1e-15);
        let s2 = s.mul(&s);
        let v = schwartz_check(&s2, &scalar_point(r(0.5)), &basis).unwrap();
        assert!((v.min_eigenvalue - (0.25 - 0.0625)).abs() < 1e-14);
        let g2 = Arc::new(DirectedGraph::free(2));
        let rep = Representation::uniform(g2.clone(), 2);
        let eta = DualPoint::new(
            &rep,
            vec![
                Mat::from_row_slice(2, 2, &[r(0.3), c(0.0, 0.2), r(0.1), r(-0.2)]),
                Mat::from_row_slice(2, 2, &[c(0.1, 0.1), r(0.0), r(0.4), r(0.2)]),
            ],
        )
        .unwrap();
        let v = schwartz_check(&HardyElement::generator(g2.clone(), 0), &eta, &FockBasis::new(g2.clone(), 4)).unwrap();
        assert!(v.holds);
        let with_constant = HardyElement::constant(g, crate::corr::AlgebraElement::one(1));
        assert!(matches!(
            schwartz_check(&with_constant, &scalar_point(z), &basis),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lyapunov_examples() {
        let s = BlockSpace::full(1);
        let phi = Superoperator::identity(&s).scale(r(0.25));
        assert!(lyapunov_preorder(&phi, &phi, 0).holds);
        let psi = Superoperator::identity(&s).scale(r(2.0));
        let v = lyapunov_preorder(&phi, &psi, 0);
        assert!(!v.holds && v.method == LyapunovMethod::Exact);
        let zero = Superoperator::zero(&s, &s);
        assert!(lyapunov_preorder(&phi, &zero, 0).holds);
        let id = Superoperator::identity(&s);
        let v = lyapunov_preorder(&id, &phi, 0);
        assert!(v.holds && matches!(v.method, LyapunovMethod::Sampled(n) if n > 0));
    }

    fn boundary_setup(level: usize) -> (InducedRep, FockBasis, DualPoint) {
        let g = Arc::new(DirectedGraph::free(1));
        let basis = FockBasis::new(g.clone(), level);
        let ind = induced_rep(&Representation::uniform(g, 1), &basis);
        (ind, basis, scalar_point(r(1.0)))
    }

    #[test]
    fn boundary_examples() {
        let (ind, basis, z) = boundary_setup(5);
        let cvac = intertwiner_from_vacuum(&ind, &basis, &z, &[Mat::from_element(1, 1, ONE)]);
        assert!(truncated_intertwiner_residual(&ind, &z, &cvac) < 1e-14);
        let fam = vec![(0, cvac.clone())];
        let pts = vec![z.clone()];
        assert!(boundary_np_check(&pts, &[Mat::zeros(1, 1)], &ind, &fam).unwrap().consistent);
        let eq = boundary_np_check(&pts, &[Mat::identity(1, 1)], &ind, &fam).unwrap();
        assert!(eq.consistent && eq.min_eigenvalue.abs() < 1e-12);
        let bad = boundary_np_check(&pts, &[Mat::from_element(1, 1, r(2.0))], &ind, &fam).unwrap();
        assert!(!bad.consistent && bad.violating.is_some());
        let not_intertwiner = Mat::from_fn(1, 6, |_, j| r(j as f64));
        assert!(matches!(
            boundary_np_check(&pts, &[Mat::zeros(1, 1)], &ind, &[(0, not_intertwiner)]),
            Err(Error::Precondition(_))
        ));
    }
}
