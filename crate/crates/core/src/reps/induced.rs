//! Induced representations on the truncated Fock space and isometric
//! dilations of contractive covariant representations.

use super::{classify, make_covariant, CovariantRep, Representation, ISOMETRY_TOL};
use crate::corr::Path;
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{self, Mat, ONE};

/// The induced representation on `F(E) (x) H_0` truncated at level `N`.
#[derive(Clone, Debug)]
pub struct InducedRep {
    pub covrep: CovariantRep,
    /// For every index of the induced space: (Fock basis index, index
    /// inside `H_0` of the path's source vertex).
    pub layout: Vec<(usize, usize)>,
    pub level_cap: usize,
    local_offset: Vec<usize>,
    path_rng: Vec<usize>,
}

impl InducedRep {
    /// Global index of `delta_alpha (x) x_i`.
    pub fn index(&self, path_index: usize, i: usize) -> usize {
        self.covrep.rep().offset(self.path_rng[path_index]) + self.local_offset[path_index] + i
    }
}

/// `S(e) = S_e (x) I` on the truncated `F(E) (x) H_0`, with
/// `sigma = phi_inf (x) I`. Indices at level `< N` are interior.
pub fn induced_rep(pi0: &Representation, basis: &FockBasis) -> InducedRep {
    let g = basis.graph_arc();
    let nv = g.num_vertices();
    let cap = basis.level_cap();
    let mut multiplicity = vec![0; nv];
    let mut local_offset = vec![0; basis.dim()];
    let mut per_vertex: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (pi, p) in basis.paths().iter().enumerate() {
        let w = p.rng();
        local_offset[pi] = multiplicity[w];
        let m0 = pi0.mult(p.src());
        multiplicity[w] += m0;
        per_vertex[w].extend((0..m0).map(|i| (pi, i)));
    }
    let rep = Representation::new(g.clone(), multiplicity).unwrap();
    let layout: Vec<(usize, usize)> = per_vertex.into_iter().flatten().collect();
    let mut blocks = Vec::with_capacity(g.num_edges());
    for (e, edge) in g.edges().iter().enumerate() {
        let mut b = Mat::zeros(rep.mult(edge.rng), rep.mult(edge.src));
        let head = Path::edge(&g, e);
        for (pi, p) in basis.paths().iter().enumerate() {
            if p.rng() != edge.src || p.len() >= cap {
                continue;
            }
            let target = basis.index_of(&head.concat(p).unwrap()).unwrap();
            for i in 0..pi0.mult(p.src()) {
                b[(local_offset[target] + i, local_offset[pi] + i)] = ONE;
            }
        }
        blocks.push(b);
    }
    let interior = layout
        .iter()
        .enumerate()
        .filter(|(_, &(pi, _))| basis.level_of(pi) < cap)
        .map(|(k, _)| k)
        .collect();
    let covrep = make_covariant(&rep, blocks)
        .expect("induced blocks are covariant")
        .with_interior(interior);
    InducedRep {
        covrep,
        layout,
        level_cap: cap,
        local_offset,
        path_rng: basis.paths().iter().map(|p| p.rng()).collect(),
    }
}

/// An isometric dilation `(V, tau)` on `K` together with the isometric
/// embedding `H -> K`.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub covrep: CovariantRep,
    pub embedding: Mat,
    /// Dimension of the defect space at each vertex.
    pub defect_dims: Vec<usize>,
    /// `max |P tau(delta_v) - tau(delta_v) P|`.
    pub commutation_residual: f64,
    /// `max |P V(e) P - T(e) P|`.
    pub compression_residual: f64,
    pub isometric_on_interior: bool,
}

/// Defect-space (Schaffer-type) dilation: `K = H (+) F(E) (x) D` where `D`
/// is the range of `(I - T~*T~)^(1/2)` in `E (x) H`, truncated at the
/// basis level cap.
pub fn isometric_dilation(t: &CovariantRep, basis: &FockBasis) -> Result<Dilation> {
    if t.norm() > 1.0 + 1e-12 {
        return Err(Error::NotContractive { norm: t.norm() });
    }
    let rep = t.rep();
    let g = basis.graph_arc();
    let nv = g.num_vertices();
    let cap = basis.level_cap();
    let (edge_offs, n_e) = rep.edge_layout();
    let tt = t.t_tilde();
    let defect = Mat::identity(n_e, n_e) - tt.adjoint() * tt;

    // Coordinates on the defect space at vertex w, as rows of `coord[w]`
    // indexed by the E (x) H positions listed in `positions[w]`.
    let mut coord = Vec::with_capacity(nv);
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (e, edge) in g.edges().iter().enumerate() {
        positions[edge.rng].extend(edge_offs[e]..edge_offs[e] + rep.mult(edge.src));
    }
    let mut d = vec![0usize; nv];
    for w in 0..nv {
        let idx = &positions[w];
        let sub = defect.select_rows(idx).select_columns(idx);
        let (vals, vecs) = linalg::eigh(&linalg::hermitian_part(&sub));
        let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > ISOMETRY_TOL).collect();
        d[w] = keep.len();
        let mut cm = Mat::zeros(keep.len(), idx.len());
        for (row, &k) in keep.iter().enumerate() {
            let s = vals[k].sqrt();
            for col in 0..idx.len() {
                cm[(row, col)] = vecs[(col, k)].conj() * s;
            }
        }
        coord.push(cm);
    }

    // K_w = H_w followed by delta_alpha (x) D_{src alpha} for rng alpha = w.
    let mut k_mult: Vec<usize> = (0..nv).map(|w| rep.mult(w)).collect();
    let mut fock_offset = vec![0usize; basis.dim()];
    for (pi, p) in basis.paths().iter().enumerate() {
        fock_offset[pi] = k_mult[p.rng()];
        k_mult[p.rng()] += d[p.src()];
    }
    let krep = Representation::new(g.clone(), k_mult)?;
    let mut blocks = Vec::with_capacity(g.num_edges());
    for (e, edge) in g.edges().iter().enumerate() {
        let (w, s) = (edge.rng, edge.src);
        let mut b = Mat::zeros(krep.mult(w), krep.mult(s));
        b.view_mut((0, 0), t.block(e).shape()).copy_from(t.block(e));
        let vertex_row = fock_offset[basis.index_of(&Path::vertex(w)).unwrap()];
        let first = positions[w].iter().position(|&p| p == edge_offs[e]);
        if let Some(first) = first {
            let cols = coord[w].columns(first, rep.mult(s));
            b.view_mut((vertex_row, 0), (d[w], rep.mult(s))).copy_from(&cols);
        }
        let head = Path::edge(&g, e);
        for (pi, p) in basis.paths().iter().enumerate() {
            if p.rng() != s || p.len() >= cap {
                continue;
            }
            let target = basis.index_of(&head.concat(p).unwrap()).unwrap();
            for k in 0..d[p.src()] {
                b[(fock_offset[target] + k, fock_offset[pi] + k)] = ONE;
            }
        }
        blocks.push(b);
    }
    let mut embedding = Mat::zeros(krep.dim(), rep.dim());
    for v in 0..nv {
        for i in 0..rep.mult(v) {
            embedding[(krep.offset(v) + i, rep.offset(v) + i)] = ONE;
        }
    }
    let mut interior = Vec::new();
    for v in 0..nv {
        interior.extend(krep.offset(v)..krep.offset(v) + rep.mult(v));
    }
    for (pi, p) in basis.paths().iter().enumerate() {
        if p.len() < cap {
            let o = krep.offset(p.rng()) + fock_offset[pi];
            interior.extend(o..o + d[p.src()]);
        }
    }
    interior.sort_unstable();
    let vrep = make_covariant(&krep, blocks)?.with_interior(interior);

    let proj = &embedding * embedding.adjoint();
    let commutation_residual = (0..nv)
        .map(|v| {
            let q = krep.q(v);
            linalg::max_abs(&(&proj * &q - &q * &proj))
        })
        .fold(0.0, f64::max);
    let compression_residual = (0..g.num_edges())
        .map(|e| {
            let lhs = embedding.adjoint() * vrep.operator(e) * &embedding;
            linalg::max_abs(&(lhs - t.operator(e)))
        })
        .fold(0.0, f64::max);
    let isometric_on_interior = classify(&vrep).isometric_on_interior.unwrap_or(false);
    Ok(Dilation {
        covrep: vrep,
        embedding,
        defect_dims: d,
        commutation_residual,
        compression_residual,
        isometric_on_interior,
    })
}
