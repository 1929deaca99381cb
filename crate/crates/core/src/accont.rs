//! Absolute continuity of covariant representations: superharmonic
//! operators and their certificates, the completely non-coisometric
//! decision, periodic states of `Phi_T`, and wandering vectors.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{self, Mat, Vector, C};
use crate::reps::{
    classify, cp_map, induced_rep, CommutantElement, CovariantRep, InducedRep, Representation,
    Superoperator,
};

pub const SUPERHARMONIC_TOL: f64 = 1e-10;
pub const SUPERHARMONIC_CAP: usize = 500;
pub const DECAY_THRESHOLD: f64 = 1e-8;
/// Trace below which a Cesaro limit counts as vanishing.
pub const STATE_TRACE_TOL: f64 = 1e-8;
/// Cesaro horizon `2^HORIZON_DOUBLINGS`.
pub const HORIZON_DOUBLINGS: u32 = 40;
pub const DEFAULT_PERIOD_CAP: usize = 4;

#[derive(Clone, Debug)]
pub struct SuperharmonicFlags {
    pub superharmonic: bool,
    pub pure: bool,
    pub min_eig_q: f64,
    /// Smallest eigenvalue of `Q - Phi(Q)`.
    pub min_eig_gap: f64,
    /// `||Phi^n(Q)||` for `n = 1, 2, ...`.
    pub decay: Vec<f64>,
}

/// `Q >= 0`, `Phi(Q) <= Q`, and whether `Phi^n(Q) -> 0` within the cap.
pub fn is_superharmonic(q: &CommutantElement, phi: &Superoperator) -> SuperharmonicFlags {
    let min_eig_q = q.min_eigenvalue();
    let min_eig_gap = (q - &phi.apply(q)).min_eigenvalue();
    let superharmonic = min_eig_q >= -SUPERHARMONIC_TOL && min_eig_gap >= -SUPERHARMONIC_TOL;
    let mut decay = Vec::new();
    let mut pure = q.norm() < DECAY_THRESHOLD;
    let mut x = q.clone();
    while !pure && decay.len() < SUPERHARMONIC_CAP {
        x = phi.apply(&x);
        let n = x.norm();
        decay.push(n);
        pure = n < DECAY_THRESHOLD;
    }
    SuperharmonicFlags {
        superharmonic,
        pure: superharmonic && pure,
        min_eig_q,
        min_eig_gap,
        decay,
    }
}

#[derive(Clone, Debug)]
pub struct SuperharmonicCertificate {
    pub q: CommutantElement,
    /// Positive square root of `Q - Phi(Q)`.
    pub r: CommutantElement,
    /// `sum_{n <= N} Phi^n(r^2)` for `N = 0..=level_cap`.
    pub partial_sums: Vec<CommutantElement>,
    /// `||Phi^(N+1)(Q)||` for `N = 0..=level_cap`.
    pub remainders: Vec<f64>,
    /// `C: F(E) (x) H_rho -> H` on the truncated induced space.
    pub c: Mat,
    pub induced: InducedRep,
    /// `||C C* - Q||`; bounded by the last remainder.
    pub gram_residual: f64,
    /// `max |C S(e) - T(e) C|` on interior columns.
    pub intertwining_residual: f64,
}

impl SuperharmonicCertificate {
    /// `||sum_{n <= N} Phi^n(r^2) - Q|| <= ||Phi^(N+1)(Q)||` at every level.
    pub fn telescoping_holds(&self) -> bool {
        self.partial_sums
            .iter()
            .zip(&self.remainders)
            .all(|(s, rem)| (s - &self.q).norm() <= rem + 1e-12)
    }
}

/// Partial sums `sum_{n <= N} Phi^n(r2)` and remainders `||Phi^(N+1)(Q)||`
/// for `N = 0..=n_max`. With `r2 = Q - Phi(Q)` the difference of the two
/// sides telescopes to `Q - Phi^(N+1)(Q)`.
pub fn telescoping(
    q: &CommutantElement,
    r2: &CommutantElement,
    phi: &Superoperator,
    n_max: usize,
) -> (Vec<CommutantElement>, Vec<f64>) {
    let mut partial_sums = Vec::with_capacity(n_max + 1);
    let mut remainders = Vec::with_capacity(n_max + 1);
    let mut acc = CommutantElement::zero(&q.space());
    let mut term = r2.clone();
    let mut qpow = phi.apply(q);
    for _ in 0..=n_max {
        acc = &acc + &term;
        partial_sums.push(acc.clone());
        remainders.push(qpow.norm());
        term = phi.apply(&term);
        qpow = phi.apply(&qpow);
    }
    (partial_sums, remainders)
}

/// Builds `r = (Q - Phi(Q))^(1/2)` and `C (delta_alpha (x) x) = T(alpha) r W x`
/// where `W` is an isometry onto the range of `r`.
pub fn superharmonic_certificate(
    q: &CommutantElement,
    t: &CovariantRep,
    level_cap: usize,
) -> Result<SuperharmonicCertificate> {
    let phi = cp_map(t);
    let flags = is_superharmonic(q, &phi);
    if !flags.pure {
        return Err(Error::Precondition(
            "Q is not a pure superharmonic operator".into(),
        ));
    }
    let gap = q - &phi.apply(q);
    let r = CommutantElement::new(gap.blocks.iter().map(|b| linalg::psd_sqrt(&linalg::hermitian_part(b))).collect());
    let (partial_sums, remainders) = telescoping(q, &r.mul(&r), &phi, level_cap);

    let rep = t.rep();
    let g = rep.graph_arc();
    let ranges: Vec<Mat> = r
        .blocks
        .iter()
        .map(|b| linalg::range_basis(b, 1e-10))
        .collect();
    let rho = Representation::new(g.clone(), ranges.iter().map(|w| w.ncols()).collect())?;
    let basis = FockBasis::new(g, level_cap);
    let induced = induced_rep(&rho, &basis);
    let krep = induced.covrep.rep();
    let mut c = Mat::zeros(rep.dim(), krep.dim());
    for (pi, p) in basis.paths().iter().enumerate() {
        let s = p.src();
        let block = t.path_block(p) * &r.blocks[s] * &ranges[s];
        for i in 0..block.ncols() {
            let col = induced.index(pi, i);
            c.view_mut((rep.offset(p.rng()), col), (block.nrows(), 1))
                .copy_from(&block.column(i));
        }
    }
    let gram_residual = linalg::op_norm(&(&c * c.adjoint() - q.to_full()));
    let interior = induced.covrep.interior().unwrap_or(&[]).to_vec();
    let mut intertwining_residual: f64 = 0.0;
    for e in 0..rep.graph().num_edges() {
        let lhs = &c * induced.covrep.operator(e);
        let rhs = t.operator(e) * &c;
        for &col in &interior {
            let d = (lhs.column(col) - rhs.column(col))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            intertwining_residual = intertwining_residual.max(d);
        }
    }
    Ok(SuperharmonicCertificate {
        q: q.clone(),
        r,
        partial_sums,
        remainders,
        c,
        induced,
        gram_residual,
        intertwining_residual,
    })
}

#[derive(Clone, Debug)]
pub struct CncReport {
    pub completely_non_coisometric: bool,
    /// Orthonormal basis (columns) of the largest subspace on which `T~*`
    /// is isometric and which is invariant under all `T(e)*` and `Q_v`.
    pub w: Mat,
    /// `dim W_m` along the iteration.
    pub dims: Vec<usize>,
}

/// Decreasing fixed-point iteration `W_0 = ker(I - T~ T~*)`,
/// `W_{m+1} = {h in W_m : T(e)* h, Q_v h in W_m}`.
pub fn completely_non_coisometric(t: &CovariantRep) -> CncReport {
    let rep = t.rep();
    let n = rep.dim();
    let tt = t.t_tilde();
    let defect = linalg::hermitian_part(&(Mat::identity(n, n) - tt * tt.adjoint()));
    let (vals, vecs) = linalg::eigh(&defect);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i].abs() <= SUPERHARMONIC_TOL)
        .collect();
    let mut w = vecs.select_columns(&keep);
    let mut dims = vec![w.ncols()];
    let mut ops: Vec<Mat> = (0..rep.graph().num_edges())
        .map(|e| t.operator(e).adjoint())
        .collect();
    ops.extend((0..rep.graph().num_vertices()).map(|v| rep.q(v)));
    loop {
        let k = w.ncols();
        if k == 0 {
            break;
        }
        let proj_perp = Mat::identity(n, n) - &w * w.adjoint();
        let mut stacked = Mat::zeros(ops.len() * n, k);
        for (i, op) in ops.iter().enumerate() {
            stacked
                .view_mut((i * n, 0), (n, k))
                .copy_from(&(&proj_perp * op * &w));
        }
        let y = linalg::null_space_abs(&stacked, 1e-9);
        if y.ncols() == k {
            break;
        }
        w = &w * y;
        dims.push(w.ncols());
    }
    CncReport {
        completely_non_coisometric: w.ncols() == 0,
        w,
        dims,
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicState {
    pub period: usize,
    /// Density of the state `omega(a) = tr(state a)`.
    pub state: CommutantElement,
    pub residual: f64,
}

/// Cesaro limit of `(Phi^k)^dagger` applied to the normalized identity, if
/// it carries trace; the returned state satisfies `omega o Phi^k = omega`.
pub fn periodic_state_at(phi: &Superoperator, k: usize) -> Option<PeriodicState> {
    let space = phi.domain.clone();
    let dual = phi.power(k).dual();
    let dim = space.full_dim();
    if dim == 0 {
        return None;
    }
    let rho0 = CommutantElement::identity(&space).scale(C::new(1.0 / dim as f64, 0.0));
    // S_N = (1/N) sum_{n<N} Psi^n via doubling: S_2N = (S_N + Psi^N S_N) / 2.
    let mut avg = Superoperator::identity(&space);
    let mut pw = dual.clone();
    for _ in 0..HORIZON_DOUBLINGS {
        avg = (&avg + &pw.compose(&avg)).scale(C::new(0.5, 0.0));
        pw = pw.compose(&pw);
    }
    let limit = avg.apply(&rho0);
    let tr = limit.trace().re;
    if tr <= STATE_TRACE_TOL {
        return None;
    }
    let herm = CommutantElement::new(limit.blocks.iter().map(linalg::hermitian_part).collect());
    let state = herm.scale(C::new(1.0 / tr, 0.0));
    let residual = (&dual.apply(&state) - &state).max_abs();
    (residual <= STATE_TRACE_TOL).then_some(PeriodicState {
        period: k,
        state,
        residual,
    })
}

/// Smallest `k <= k_max` admitting a periodic state.
pub fn periodic_state_search(phi: &Superoperator, k_max: usize) -> Option<PeriodicState> {
    (1..=k_max).find_map(|k| periodic_state_at(phi, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcVerdict {
    AbsolutelyContinuous,
    NotAc,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct AcReport {
    pub verdict: AcVerdict,
    pub cnc: CncReport,
    pub certificates: Vec<SuperharmonicCertificate>,
    pub periodic_state: Option<PeriodicState>,
}

impl AcReport {
    /// The maximal subspace obstructing absolute continuity.
    pub fn w(&self) -> &Mat {
        &self.cnc.w
    }
}

/// Decides absolute continuity by the completely non-coisometric criterion,
/// with a periodic-state search as an independent obstruction and
/// superharmonic certificates for `Q = I` when `Phi_T` is pure.
pub fn ac_membership(t: &CovariantRep, level_cap: usize) -> Result<AcReport> {
    if !t.is_contractive() {
        return Err(Error::NotContractive { norm: t.norm() });
    }
    let cnc = completely_non_coisometric(t);
    let phi = cp_map(t);
    let periodic_state = periodic_state_search(&phi, DEFAULT_PERIOD_CAP);
    let verdict = match (cnc.completely_non_coisometric, periodic_state.is_some()) {
        (true, false) => AcVerdict::AbsolutelyContinuous,
        (false, _) => AcVerdict::NotAc,
        (true, true) => AcVerdict::Undecided,
    };
    let mut certificates = Vec::new();
    if verdict == AcVerdict::AbsolutelyContinuous && classify(t).pure {
        let id = CommutantElement::identity(&t.rep().block_space());
        if let Ok(cert) = superharmonic_certificate(&id, t, level_cap) {
            certificates.push(cert);
        }
    }
    Ok(AcReport {
        verdict,
        cnc,
        certificates,
        periodic_state,
    })
}

impl fmt::Display for AcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.verdict {
            AcVerdict::AbsolutelyContinuous => "AC".to_string(),
            AcVerdict::NotAc => "not AC".to_string(),
            AcVerdict::Undecided => "undecided".to_string(),
        };
        match &self.periodic_state {
            Some(p) => writeln!(f, "{head}; periodic state k={}", p.period)?,
            None => writeln!(f, "{head}")?,
        }
        writeln!(
            f,
            "  completely non-coisometric: {} (dim W = {}, iteration dims {:?})",
            self.cnc.completely_non_coisometric,
            self.cnc.w.ncols(),
            self.cnc.dims
        )?;
        for c in &self.certificates {
            writeln!(
                f,
                "  certificate Q=I: |CC* - Q| = {:.3e}, intertwining residual {:.3e}",
                c.gram_residual, c.intertwining_residual
            )?;
        }
        Ok(())
    }
}

/// Whether the subspaces `T~_n (E^(x)n (x) [sigma(M) h])`, `n <= N`, are
/// mutually orthogonal.
pub fn is_wandering(h: &Vector, t: &CovariantRep, level_cap: usize) -> Result<bool> {
    let cl = classify(t);
    if !(cl.isometric || cl.isometric_on_interior == Some(true)) {
        return Err(Error::Precondition(
            "wandering vectors need an isometric representation".into(),
        ));
    }
    let rep = t.rep();
    if h.len() != rep.dim() {
        return Err(Error::ShapeMismatch {
            what: "vector".into(),
            expected: (rep.dim(), 1),
            found: (h.len(), 1),
        });
    }
    let frames: Vec<Vec<Vector>> = (0..=level_cap)
        .map(|n| {
            rep.graph()
                .paths_of_length(n)
                .into_iter()
                .filter_map(|p| {
                    let s = p.src();
                    let part = h.rows(rep.offset(s), rep.mult(s)).into_owned();
                    if part.iter().all(|z| z.norm() == 0.0) {
                        return None;
                    }
                    let img = t.path_block(&p) * part;
                    let mut v = Vector::zeros(rep.dim());
                    v.rows_mut(rep.offset(p.rng()), rep.mult(p.rng())).copy_from(&img);
                    (v.norm() > 0.0).then_some(v)
                })
                .collect()
        })
        .collect();
    for n in 0..frames.len() {
        for m in n + 1..frames.len() {
            for x in &frames[n] {
                for y in &frames[m] {
                    if x.dotc(y).norm() > 1e-10 * x.norm() * y.norm() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
