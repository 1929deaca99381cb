//! Fixed, seeded inputs shared by the benchmarks.

use std::sync::Arc;

use nchardy::corr::DirectedGraph;
use nchardy::eval::evaluate;
use nchardy::fock::HardyElement;
use nchardy::linalg::Mat;
use nchardy::random::{self, Rand};
use nchardy::{CovariantRep, DualPoint, InterpolationProblem, Representation};

pub fn graph(name: &str) -> Arc<DirectedGraph> {
    Arc::new(match name {
        "c2" => DirectedGraph::cycle(2),
        "free2" => DirectedGraph::free(2),
        "free3" => DirectedGraph::free(3),
        other => panic!("unknown bench graph {other}"),
    })
}

pub fn rng() -> Rand {
    random::seeded(2024)
}

/// A geometric series with `||theta_k|| = c^k` and a point of norm `rho / c`.
pub fn series_and_point(g: &Arc<DirectedGraph>, mult: usize, c: f64, rho: f64) -> (HardyElement, DualPoint) {
    let mut rng = rng();
    let theta = random::geometric_series(&mut rng, g, c);
    let rep = Representation::uniform(g.clone(), mult);
    let eta = random::point_with_norm(&mut rng, &rep, rho / c);
    (theta, eta)
}

/// A feasible Pick problem with `k` nodes built from a normalized polynomial.
pub fn pick_problem(g: &Arc<DirectedGraph>, mult: usize, k: usize) -> InterpolationProblem {
    let mut rng = rng();
    let rep = Representation::uniform(g.clone(), mult);
    let theta = random::normalized_polynomial(&mut rng, g, 2, 4, true);
    let points: Vec<DualPoint> = (0..k).map(|_| random::interior_point(&mut rng, &rep, 0.9)).collect();
    let c = points.iter().map(|p| evaluate(&theta, p, 1e-12).unwrap().value).collect();
    let b = vec![Mat::identity(rep.dim(), rep.dim()); k];
    InterpolationProblem::new(points, b, c).unwrap()
}

pub fn covariant(g: &Arc<DirectedGraph>, mult: usize, norm: f64) -> CovariantRep {
    let mut rng = rng();
    random::covariant_with_norm(&mut rng, &Representation::uniform(g.clone(), mult), norm)
}
