//! Seeded random instances for tests, suites and benchmarks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corr::{AlgebraElement, CorrTensor, DirectedGraph, Path};
use crate::fock::{hardy_norm_lower, FockBasis, HardyElement};
use crate::linalg::{self, Mat, C};
use crate::pick::Realization;
use crate::reps::{make_covariant, CommutantElement, CovariantRep, DualPoint, Representation};

pub type Rand = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the unit square `[-1,1] + i[-1,1]`.
pub fn complex(rng: &mut Rand) -> C {
    C::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0)
}

/// Uniform on the disc of radius `r`.
pub fn disc_point(rng: &mut Rand, r: f64) -> C {
    let rad = r * rng.random::<f64>().sqrt();
    C::from_polar(rad, std::f64::consts::TAU * rng.random::<f64>())
}

pub fn matrix(rng: &mut Rand, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| complex(rng))
}

pub fn algebra(rng: &mut Rand, n: usize) -> AlgebraElement {
    AlgebraElement((0..n).map(|_| complex(rng)).collect())
}

pub fn tensor(rng: &mut Rand, g: &DirectedGraph, degree: usize) -> CorrTensor {
    if degree == 0 {
        return CorrTensor::from_algebra(&algebra(rng, g.num_vertices()));
    }
    let entries: Vec<_> = g
        .paths_of_length(degree)
        .into_iter()
        .map(|p| (p, complex(rng)))
        .collect();
    CorrTensor::from_entries(g, degree, entries).expect("paths have the requested degree")
}

/// A polynomial of exact degree `degree` with random coefficients.
pub fn polynomial(rng: &mut Rand, g: &Arc<DirectedGraph>, degree: usize) -> HardyElement {
    let a0 = algebra(rng, g.num_vertices());
    let tensors = (1..=degree).map(|k| tensor(rng, g, k)).collect();
    HardyElement::polynomial(g.clone(), a0, tensors).expect("degrees are consecutive")
}

/// A random polynomial divided by its truncated norm at `level_cap`, so that
/// `hardy_norm_lower <= 1`.
pub fn normalized_polynomial(
    rng: &mut Rand,
    g: &Arc<DirectedGraph>,
    degree: usize,
    level_cap: usize,
    constant_term: bool,
) -> HardyElement {
    let mut theta = polynomial(rng, g, degree);
    if !constant_term {
        theta = theta.sub(&HardyElement::constant(g.clone(), theta.a0().clone()));
    }
    let basis = FockBasis::new(g.clone(), level_cap);
    let n = hardy_norm_lower(&theta, &basis);
    if n > 0.0 {
        theta.scale(C::new(1.0 / n, 0.0))
    } else {
        theta
    }
}

pub const NORMALIZATION_DIM: usize = 512;

/// Deepest truncation level whose Fock basis has at most `max_dim` paths.
/// Used to normalize by `hardy_norm_lower` as tightly as the budget allows.
pub fn normalization_level(g: &DirectedGraph, max_dim: usize) -> usize {
    let mut ending = vec![1usize; g.num_vertices()];
    let mut total = g.num_vertices();
    let mut level = 0;
    loop {
        let mut next = vec![0usize; g.num_vertices()];
        for e in g.edges() {
            next[e.src] = next[e.src].saturating_add(ending[e.rng]);
        }
        let count = next.iter().fold(0usize, |a, &b| a.saturating_add(b));
        if count == 0 || total.saturating_add(count) > max_dim {
            return level.max(1);
        }
        total += count;
        ending = next;
        level += 1;
    }
}

/// A random composable path of length `k >= 1`, if one exists.
pub fn path(rng: &mut Rand, g: &DirectedGraph, k: usize) -> Option<Path> {
    if g.num_edges() == 0 {
        return None;
    }
    let mut edges = vec![rng.random_range(0..g.num_edges())];
    while edges.len() < k {
        let need = g.edge(*edges.last().unwrap()).src;
        let options: Vec<usize> = (0..g.num_edges()).filter(|&e| g.edge(e).rng == need).collect();
        if options.is_empty() {
            return None;
        }
        edges.push(options[rng.random_range(0..options.len())]);
    }
    Path::from_edges(g, edges).ok()
}

/// A tensor of degree `k` supported on at most `terms` random paths; dense
/// when `|E|^k <= 64`.
pub fn sparse_tensor(rng: &mut Rand, g: &DirectedGraph, k: usize, terms: usize) -> CorrTensor {
    let dense = (g.num_edges() as f64).powi(k as i32) <= 64.0;
    if k == 0 || dense {
        return tensor(rng, g, k);
    }
    let mut entries = Vec::new();
    for _ in 0..terms {
        if let Some(p) = path(rng, g, k) {
            entries.push((p, complex(rng)));
        }
    }
    CorrTensor::from_entries(g, k, entries).expect("paths have the requested degree")
}

/// A series with `||theta_k|| = c^k` and declared radius `1/c`.
pub fn geometric_series(rng: &mut Rand, g: &Arc<DirectedGraph>, c: f64) -> HardyElement {
    let gg = g.clone();
    let a0 = algebra(rng, g.num_vertices());
    let seed: u64 = rng.random();
    HardyElement::from_rule(g.clone(), a0, move |k| {
        let mut local = seeded(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let t = (0..16)
            .map(|_| sparse_tensor(&mut local, &gg, k, 4))
            .find(|t| !t.is_zero());
        match t {
            Some(t) => {
                let n = crate::corr::corr_norm(&t);
                t.scale(C::new(c.powi(k as i32) / n, 0.0))
            }
            None => CorrTensor::zero(&gg, k),
        }
    })
    .with_radius(1.0 / c)
}

/// A point on `rep` with norm exactly `norm`.
pub fn point_with_norm(rng: &mut Rand, rep: &Representation, norm: f64) -> DualPoint {
    let g = rep.graph();
    let blocks = g
        .edges()
        .iter()
        .map(|e| matrix(rng, rep.mult(e.src), rep.mult(e.rng)))
        .collect();
    let p = DualPoint::new(rep, blocks).expect("shapes match");
    if p.norm() == 0.0 {
        return p;
    }
    p.scale(C::new(norm / p.norm(), 0.0))
}

/// A point with norm uniform in `[0, max_norm)`.
pub fn interior_point(rng: &mut Rand, rep: &Representation, max_norm: f64) -> DualPoint {
    let r = max_norm * rng.random::<f64>();
    point_with_norm(rng, rep, r)
}

/// A covariant representation with `||T~|| = norm`.
pub fn covariant_with_norm(rng: &mut Rand, rep: &Representation, norm: f64) -> CovariantRep {
    point_with_norm(rng, rep, norm).to_covariant()
}

pub fn unitary(rng: &mut Rand, n: usize) -> Mat {
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    matrix(rng, n, n).qr().q()
}

/// An isometry `rows x cols` with `rows >= cols`.
pub fn isometry(rng: &mut Rand, rows: usize, cols: usize) -> Mat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    unitary(rng, rows).columns(0, cols).into_owned()
}

pub fn block_unitary(rng: &mut Rand, rep: &Representation) -> CommutantElement {
    CommutantElement::new(
        (0..rep.graph().num_vertices())
            .map(|v| unitary(rng, rep.mult(v)))
            .collect(),
    )
}

/// A coisometric realization with auxiliary multiplicities `aux`; each
/// vertex needs `sum_{src e = v} aux[rng e] <= aux[v]`.
pub fn realization(rng: &mut Rand, rep: &Representation, aux: Vec<usize>) -> Realization {
    let g = rep.graph();
    let blocks = (0..g.num_vertices())
        .map(|v| {
            let rows: usize = g
                .edges()
                .iter()
                .filter(|e| e.src == v)
                .map(|e| aux[e.rng])
                .sum::<usize>()
                + 1;
            isometry(rng, aux[v] + 1, rows).adjoint()
        })
        .collect();
    Realization::new(rep, aux, blocks).expect("random blocks are coisometric")
}

/// A positive semidefinite commutant element with spectrum in `[0, 1]`.
pub fn positive_contraction(rng: &mut Rand, rep: &Representation) -> CommutantElement {
    CommutantElement::new(
        (0..rep.graph().num_vertices())
            .map(|v| {
                let a = matrix(rng, rep.mult(v), rep.mult(v));
                let p = &a * a.adjoint();
                let n = linalg::op_norm(&p);
                if n > 0.0 {
                    p.scale(1.0 / n)
                } else {
                    p
                }
            })
            .collect(),
    )
}

/// A contraction of one of three kinds: strict, norm one, or norm one with
/// random edges halved.
pub fn mixed_covariant(rng: &mut Rand, rep: &Representation) -> CovariantRep {
    match rng.random_range(0..3) {
        0 => {
            let r = 0.95 * rng.random::<f64>();
            covariant_with_norm(rng, rep, r)
        }
        1 => covariant_with_norm(rng, rep, 1.0),
        _ => {
            let g = rep.graph();
            let p = point_with_norm(rng, rep, 1.0);
            let t = p.to_covariant();
            let blocks: Vec<Mat> = (0..g.num_edges())
                .map(|e| {
                    let b = t.block(e).clone();
                    if rng.random::<bool>() {
                        b.scale(0.5)
                    } else {
                        b
                    }
                })
                .collect();
            make_covariant(rep, blocks).expect("shapes match")
        }
    }
}
