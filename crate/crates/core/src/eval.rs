//! Point evaluation of Hardy elements on the dual ball, radius of
//! convergence, direct sums and unitary similarity of points, and
//! intertwiner spaces.

use std::collections::HashMap;
use std::fmt;

use crate::corr::{corr_norm, Path};
use crate::error::{Error, Result};
use crate::fock::HardyElement;
use crate::linalg::{self, Mat};
use crate::reps::{CommutantElement, CovariantRep, DualPoint, Representation};

/// Ratio cap for the geometric tail majorant.
pub const RATIO_CAP: f64 = 0.99;
pub const DEFAULT_TERM_CAP: usize = 2000;
pub const DEFAULT_EVAL_TOL: f64 = 1e-12;
/// Relative singular-value threshold for intertwiner null spaces.
pub const INTERTWINER_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Mat,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// `X^(eta*) = sigma(a0) + sum_k sum_{|alpha|=k} theta_k(alpha) T(alpha)`
/// with `T(e) = eta_e*`.
pub fn evaluate(theta: &HardyElement, eta: &DualPoint, tol: f64) -> Result<EvalResult> {
    evaluate_with_cap(theta, eta, tol, DEFAULT_TERM_CAP)
}

pub fn evaluate_with_cap(
    theta: &HardyElement,
    eta: &DualPoint,
    tol: f64,
    term_cap: usize,
) -> Result<EvalResult> {
    if theta.graph() != eta.graph() {
        return Err(Error::Precondition(
            "element and point live over different graphs".into(),
        ));
    }
    let t = eta.to_covariant();
    let rep = eta.rep();
    let mut value = rep.sigma(theta.a0());
    if let Some(degree) = theta.degree() {
        let mut cache = PathCache::default();
        for k in 1..=degree {
            value += term(&theta.tensor(k), &t, &mut cache);
        }
        return Ok(EvalResult {
            value,
            tail_bound: 0.0,
            terms_used: degree,
        });
    }
    if let Some(radius) = theta.declared_radius() {
        if eta.norm() >= radius {
            return Err(Error::RadiusExceeded {
                partial: value,
                terms: 0,
                last_term: f64::NAN,
            });
        }
    }
    let mut cache = PathCache::default();
    // Term-norm bounds of the last two nonzero terms and the number of zero terms since.
    let mut last_two: (f64, f64) = (0.0, 0.0);
    let mut nonzero_seen = 0;
    let mut zeros_since = 0;
    let mut last_norm = 0.0;
    let eta_norm = eta.norm();
    for k in 1..=term_cap {
        let theta_k = theta.tensor(k);
        let x = term(&theta_k, &t, &mut cache);
        // ||eta_k* L_theta_k|| <= ||theta_k|| ||eta||^k
        let n = crate::corr::corr_norm(&theta_k) * eta_norm.powi(k as i32);
        if !n.is_finite() {
            break;
        }
        value += x;
        last_norm = n;
        if n > 0.0 {
            last_two = (last_two.1, n);
            nonzero_seen += 1;
            zeros_since = 0;
        } else {
            zeros_since += 1;
        }
        if k < 3 {
            continue;
        }
        let tail = match nonzero_seen {
            0 => 0.0,
            _ => {
                let q = if nonzero_seen == 1 {
                    RATIO_CAP
                } else {
                    (last_two.1 / last_two.0).min(RATIO_CAP)
                };
                last_two.1 * q.powi(zeros_since + 1) / (1.0 - q)
            }
        };
        if tail < tol {
            return Ok(EvalResult {
                value,
                tail_bound: tail,
                terms_used: k,
            });
        }
    }
    Err(Error::RadiusExceeded {
        partial: value,
        terms: term_cap,
        last_term: last_norm,
    })
}

/// Products `T(alpha)` of the previous level, reused when prepending an edge.
#[derive(Default)]
struct PathCache {
    level: usize,
    prev: HashMap<Path, Mat>,
    cur: HashMap<Path, Mat>,
}

fn term(xi: &crate::corr::CorrTensor, t: &CovariantRep, cache: &mut PathCache) -> Mat {
    let rep = t.rep();
    let k = xi.degree();
    if cache.level + 1 == k {
        cache.prev = std::mem::take(&mut cache.cur);
    } else {
        cache.prev.clear();
        cache.cur.clear();
    }
    cache.level = k;
    let mut out = Mat::zeros(rep.dim(), rep.dim());
    for (p, z) in xi.entries() {
        let (head, tail) = p.split_at(t.graph(), 1);
        let block = match cache.prev.get(&tail) {
            Some(tb) => t.path_block(&head) * tb,
            None => t.path_block(p),
        };
        let mut view = out.view_mut((rep.offset(p.rng()), rep.offset(p.src())), block.shape());
        view += &block * *z;
        cache.cur.insert(p.clone(), block);
    }
    out
}

#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub radius: f64,
    /// `||theta_k||^(1/k)` for `k = 1..=k_max`.
    pub roots: Vec<f64>,
    /// Set when the trailing term norms have a constant ratio.
    pub geometric: bool,
}

/// `(max over the trailing window of ||theta_k||^(1/k))^(-1)`.
pub fn radius_of_convergence(theta: &HardyElement, k_max: usize) -> RadiusEstimate {
    let norms: Vec<f64> = (1..=k_max).map(|k| corr_norm(&theta.tensor(k))).collect();
    let roots: Vec<f64> = norms
        .iter()
        .enumerate()
        .map(|(i, n)| n.powf(1.0 / (i + 1) as f64))
        .collect();
    let window = (k_max / 4).max(1).min(k_max);
    let tail = &roots[k_max - window..];
    let top = tail.iter().cloned().fold(0.0, f64::max);
    let radius = if top == 0.0 { f64::INFINITY } else { 1.0 / top };
    let tn = &norms[k_max - window..];
    let geometric = tn.iter().all(|&n| n > 0.0) && {
        let ratios: Vec<f64> = tn.windows(2).map(|w| w[1] / w[0]).collect();
        ratios
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= 1e-9 * w[0].abs().max(1e-300))
    };
    let radius = if geometric && tn.len() >= 2 {
        tn[tn.len() - 2] / tn[tn.len() - 1]
    } else {
        radius
    };
    RadiusEstimate {
        radius,
        roots,
        geometric,
    }
}

/// Places `a` (on `H_1`) and `b` (on `H_2`) block-diagonally on the direct
/// sum, ordered vertex by vertex with `H_1`'s block first.
pub fn direct_sum_matrix(a: &Mat, b: &Mat, r1: &Representation, r2: &Representation) -> Mat {
    let (i1, i2) = direct_sum_embeddings(r1, r2);
    &i1 * a * i1.adjoint() + &i2 * b * i2.adjoint()
}

/// Sum representation with multiplicities `m_v + m'_v`.
pub fn direct_sum_rep(r1: &Representation, r2: &Representation) -> Representation {
    let mult = r1
        .multiplicity()
        .iter()
        .zip(r2.multiplicity())
        .map(|(a, b)| a + b)
        .collect();
    Representation::new(r1.graph_arc(), mult).unwrap()
}

/// The canonical isometries `H_1 -> H_1 (+) H_2` and `H_2 -> H_1 (+) H_2`.
pub fn direct_sum_embeddings(r1: &Representation, r2: &Representation) -> (Mat, Mat) {
    let s = direct_sum_rep(r1, r2);
    let mut i1 = Mat::zeros(s.dim(), r1.dim());
    let mut i2 = Mat::zeros(s.dim(), r2.dim());
    for v in 0..s.graph().num_vertices() {
        for k in 0..r1.mult(v) {
            i1[(s.offset(v) + k, r1.offset(v) + k)] = linalg::ONE;
        }
        for k in 0..r2.mult(v) {
            i2[(s.offset(v) + r1.mult(v) + k, r2.offset(v) + k)] = linalg::ONE;
        }
    }
    (i1, i2)
}

pub fn direct_sum(eta: &DualPoint, zeta: &DualPoint) -> Result<DualPoint> {
    if eta.graph() != zeta.graph() {
        return Err(Error::Precondition("points over different graphs".into()));
    }
    let s = direct_sum_rep(eta.rep(), zeta.rep());
    let blocks = eta
        .blocks()
        .iter()
        .zip(zeta.blocks())
        .map(|(a, b)| {
            let mut m = Mat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
            m.view_mut((0, 0), a.shape()).copy_from(a);
            m.view_mut(a.shape(), b.shape()).copy_from(b);
            m
        })
        .collect();
    DualPoint::new(&s, blocks)
}

/// `u . eta . u* : eta_e -> u_{src e} eta_e u_{rng e}*`.
pub fn unitary_conjugate(u: &CommutantElement, eta: &DualPoint) -> Result<DualPoint> {
    let full = u.to_full();
    let (ok, residual) = linalg::is_unitary(&full, 1e-12);
    if !ok {
        return Err(Error::NotUnitary { residual });
    }
    if u.space() != eta.rep().block_space() {
        return Err(Error::Precondition(
            "unitary does not match the point's representation".into(),
        ));
    }
    let blocks = eta
        .graph()
        .edges()
        .iter()
        .zip(eta.blocks())
        .map(|(edge, b)| &u.blocks[edge.src] * b * u.blocks[edge.rng].adjoint())
        .collect();
    DualPoint::new(eta.rep(), blocks)
}

/// Orthonormal (Frobenius) basis of `{C : C sigma(a) = tau(a) C, C eta* = zeta* (I (x) C)}`.
#[derive(Clone, Debug)]
pub struct IntertwinerBasis {
    pub source: DualPoint,
    pub target: DualPoint,
    /// Each `C: H_sigma -> H_tau` as a full matrix.
    pub basis: Vec<Mat>,
    /// `max ||C T_eta(alpha) - T_zeta(alpha) C||` over `|alpha| <= 3`.
    pub power_residual: f64,
}

impl IntertwinerBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn intertwiner_space(eta: &DualPoint, zeta: &DualPoint) -> Result<IntertwinerBasis> {
    if eta.graph() != zeta.graph() {
        return Err(Error::Precondition("points over different graphs".into()));
    }
    let (rs, rt) = (eta.rep(), zeta.rep());
    let g = eta.graph();
    let nv = g.num_vertices();
    // unknowns: vec(C_v) for each vertex, C_v of shape mt_v x ms_v
    let mut unk_off = Vec::with_capacity(nv + 1);
    let mut acc = 0;
    for v in 0..nv {
        unk_off.push(acc);
        acc += rt.mult(v) * rs.mult(v);
    }
    let n_unk = acc;
    let (ts, tt) = (eta.to_covariant(), zeta.to_covariant());
    let mut rows: Vec<Mat> = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        let (w, s) = (edge.rng, edge.src);
        let a = ts.block(e); // ms_w x ms_s
        let b = tt.block(e); // mt_w x mt_s
        // C_w a - b C_s = 0, vectorized column-major
        let neq = rt.mult(w) * rs.mult(s);
        let mut m = Mat::zeros(neq, n_unk);
        let left = linalg::kron(&a.transpose(), &Mat::identity(rt.mult(w), rt.mult(w)));
        let right = linalg::kron(&Mat::identity(rs.mult(s), rs.mult(s)), b);
        let mut lv = m.columns_mut(unk_off[w], rt.mult(w) * rs.mult(w));
        lv += left;
        let mut rv = m.columns_mut(unk_off[s], rt.mult(s) * rs.mult(s));
        rv -= right;
        rows.push(m);
    }
    let total_rows: usize = rows.iter().map(|m| m.nrows()).sum();
    let mut system = Mat::zeros(total_rows, n_unk);
    let mut r0 = 0;
    for m in rows {
        system.view_mut((r0, 0), m.shape()).copy_from(&m);
        r0 += m.nrows();
    }
    let ns = linalg::null_space(&system, INTERTWINER_TOL);
    let mut basis = Vec::with_capacity(ns.ncols());
    for j in 0..ns.ncols() {
        let mut c = Mat::zeros(rt.dim(), rs.dim());
        for (v, &off) in unk_off.iter().enumerate().take(nv) {
            let (mt, ms) = (rt.mult(v), rs.mult(v));
            let block = Mat::from_iterator(mt, ms, ns.column(j).iter().skip(off).take(mt * ms).copied());
            c.view_mut((rt.offset(v), rs.offset(v)), (mt, ms)).copy_from(&block);
        }
        basis.push(c);
    }
    let mut power_residual: f64 = 0.0;
    for k in 1..=3 {
        for p in g.paths_of_length(k) {
            let a = ts.path_block(&p);
            let b = tt.path_block(&p);
            for c in &basis {
                let cw = c.view((rt.offset(p.rng()), rs.offset(p.rng())), (rt.mult(p.rng()), rs.mult(p.rng())));
                let cs = c.view((rt.offset(p.src()), rs.offset(p.src())), (rt.mult(p.src()), rs.mult(p.src())));
                power_residual = power_residual.max(linalg::max_abs(&(cw * &a - &b * cs)));
            }
        }
    }
    Ok(IntertwinerBasis {
        source: eta.clone(),
        target: zeta.clone(),
        basis,
        power_residual,
    })
}

/// A family of functions, one per representation, evaluated at dual points.
pub trait Section {
    fn eval(&self, eta: &DualPoint) -> Result<EvalResult>;
}

impl Section for HardyElement {
    fn eval(&self, eta: &DualPoint) -> Result<EvalResult> {
        evaluate(self, eta, DEFAULT_EVAL_TOL)
    }
}

/// Wraps a closure returning an exact matrix value.
pub struct FnSection<F>(pub F);

impl<F: Fn(&DualPoint) -> Mat> Section for FnSection<F> {
    fn eval(&self, eta: &DualPoint) -> Result<EvalResult> {
        Ok(EvalResult {
            value: (self.0)(eta),
            tail_bound: 0.0,
            terms_used: 0,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleVerdict {
    Pass,
    Fail,
    Error(String),
}

#[derive(Clone, Debug)]
pub struct SampleRow {
    pub index: usize,
    pub intertwiner_dim: usize,
    pub residual: f64,
    pub tail_bound: f64,
    pub verdict: SampleVerdict,
}

#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub rows: Vec<SampleRow>,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == SampleVerdict::Pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for PreservationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6} {:>5} {:>12} {:>12}  verdict", "pair", "dim", "residual", "tail")?;
        for r in &self.rows {
            let v = match &r.verdict {
                SampleVerdict::Pass => "pass".to_string(),
                SampleVerdict::Fail => "FAIL".to_string(),
                SampleVerdict::Error(e) => format!("error: {e}"),
            };
            writeln!(
                f,
                "{:>6} {:>5} {:>12.3e} {:>12.3e}  {v}",
                r.index, r.intertwiner_dim, r.residual, r.tail_bound
            )?;
        }
        Ok(())
    }
}

/// For each pair, the largest `||C f(eta) - f(zeta) C||` over an
/// orthonormal basis of the intertwiners from `eta` to `zeta`.
pub fn check_intertwiner_preservation(
    section: &dyn Section,
    samples: &[(DualPoint, DualPoint)],
    tol: f64,
) -> PreservationReport {
    let rows = samples
        .iter()
        .enumerate()
        .map(|(index, (eta, zeta))| {
            let row = |dim, residual, tail_bound, verdict| SampleRow {
                index,
                intertwiner_dim: dim,
                residual,
                tail_bound,
                verdict,
            };
            let space = match intertwiner_space(eta, zeta) {
                Ok(s) => s,
                Err(e) => return row(0, f64::NAN, 0.0, SampleVerdict::Error(e.to_string())),
            };
            let (fe, fz) = match (section.eval(eta), section.eval(zeta)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    return row(space.dim(), f64::NAN, 0.0, SampleVerdict::Error(e.to_string()))
                }
            };
            let tail = fe.tail_bound + fz.tail_bound;
            let residual = space
                .basis
                .iter()
                .map(|c| linalg::op_norm(&(c * &fe.value - &fz.value * c)))
                .fold(0.0, f64::max);
            let verdict = if residual <= tol + tail {
                SampleVerdict::Pass
            } else {
                SampleVerdict::Fail
            };
            row(space.dim(), residual, tail, verdict)
        })
        .collect();
    PreservationReport { rows }
}
