//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p nchardy --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use nchardy::accont::{ac_membership, superharmonic_certificate, telescoping, AcVerdict};
use nchardy::corr::{corr_norm, inner_product, CorrTensor, DirectedGraph, Path};
use nchardy::eval::{
    check_intertwiner_preservation, direct_sum, evaluate, radius_of_convergence, FnSection,
};
use nchardy::fock::{
    cesaro, creation_operator, gauge_fourier, ideal_compression, shift, FockBasis, HardyElement,
};
use nchardy::linalg::{self, Mat, C};
use nchardy::pick::{
    np_feasible, realization_evaluate, schur_kernel_test, schwartz_check, InterpolationProblem,
};
use nchardy::random::{self, seeded, Rand};
use nchardy::reps::{
    classify, cp_map, induced_rep, make_covariant, CommutantElement, DualPoint, Representation,
};
use nchardy::suite;
use nchardy::AlgebraElement;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c2() -> Arc<DirectedGraph> {
    Arc::new(
        DirectedGraph::new(
            ["1", "2"],
            [
                ("f".to_string(), "1".to_string(), "2".to_string()),
                ("g".to_string(), "2".to_string(), "1".to_string()),
            ],
        )
        .unwrap(),
    )
}

fn free(d: usize) -> Arc<DirectedGraph> {
    Arc::new(DirectedGraph::free(d))
}

fn min_eig_hermitian(m: &Mat) -> f64 {
    let h = (m + m.adjoint()) * C::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let mut rng = seeded(1);
    let mut oracle_gap: f64 = 0.0;
    let mut axiom_gap: f64 = 0.0;
    for g in [c2(), free(3)] {
        for _ in 0..500 {
            let k = rng.random_range(0..=3);
            let xi = random::tensor(&mut rng, &g, k);
            let eta = random::tensor(&mut rng, &g, k);
            let mut direct = vec![C::new(0.0, 0.0); g.num_vertices()];
            for (p, z) in xi.entries() {
                direct[p.src()] += z.conj() * eta.coeff(p);
            }
            let lib = inner_product(&xi, &eta).unwrap();
            oracle_gap = oracle_gap.max(lib.distance(&AlgebraElement(direct)));
        }
        axiom_gap = axiom_gap.max(suite::corr_axioms(&g, &mut rng, 500).max_residual);
    }
    let worst = oracle_gap.max(axiom_gap);
    outcome(
        worst <= 1e-12,
        format!("1000 tensors on C2 and free d=3; oracle {oracle_gap:.1e}, axioms {axiom_gap:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for g in [c2(), free(2)] {
        let basis = FockBasis::new(g.clone(), 6);
        for c in suite::cuntz_toeplitz(&basis) {
            worst = worst.max(c.max_residual);
        }
        for e in 0..g.num_edges() {
            let mut m = Mat::zeros(basis.dim(), basis.dim());
            for (col, alpha) in basis.paths().iter().enumerate() {
                if alpha.len() == basis.level_cap() || g.edge(e).src != alpha.rng() {
                    continue;
                }
                let mut edges = vec![e];
                edges.extend_from_slice(alpha.edges());
                let p = Path::from_edges(&g, edges).unwrap();
                m[(basis.index_of(&p).unwrap(), col)] = C::new(1.0, 0.0);
            }
            oracle = oracle.max(linalg::max_abs(&(m - shift(&basis, e).matrix)));
        }
    }
    outcome(
        worst.max(oracle) <= 1e-12,
        format!("relations (i)-(iv) on C2 and free d=2 at N=6: max residual {worst:.1e}, shift oracle {oracle:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(3);
    let mut worst: f64 = 0.0;
    for g in [c2(), free(2)] {
        let basis = FockBasis::new(g.clone(), 4);
        for _ in 0..50 {
            let k = rng.random_range(0..=3);
            let xi = random::tensor(&mut rng, &g, k);
            let op = creation_operator(&xi, &basis).unwrap().norm();
            let mut mass = vec![0.0; g.num_vertices()];
            for (p, z) in xi.entries() {
                mass[p.src()] += z.norm_sqr();
            }
            let direct = mass.iter().cloned().fold(0.0, f64::max).sqrt();
            worst = worst.max((op - corr_norm(&xi)).abs()).max((op - direct).abs());
        }
    }
    outcome(worst <= 1e-10, format!("100 tensors of degree <= 3 at N=4: max gap {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(4);
    let mut worst: f64 = 0.0;
    for (g, n) in [(c2(), 5), (free(2), 4)] {
        let basis = FockBasis::new(g.clone(), n);
        worst = worst.max(suite::gauge_analysis(&basis, &mut rng, 12).max_residual);
    }
    let basis = FockBasis::new(c2(), 4);
    let sf = shift(&basis, 0);
    worst = worst.max(linalg::max_abs(&(gauge_fourier(&sf, 1, &basis).matrix - &sf.matrix)));
    worst = worst.max(linalg::max_abs(&gauge_fourier(&sf, 0, &basis).matrix));
    worst = worst.max(linalg::max_abs(&(cesaro(&sf, 2, &basis).matrix - &sf.matrix * C::new(0.5, 0.0))));
    outcome(worst <= 1e-12, format!("Fourier idempotence, resolution, Cesaro identity: max residual {worst:.1e}"))
}

fn classical_feasible(z: &[C], w: &[C]) -> bool {
    let k = z.len();
    let m = Mat::from_fn(k, k, |i, j| {
        let one = C::new(1.0, 0.0);
        (one - w[i] * w[j].conj()) / (one - z[i].conj() * z[j])
    });
    let scale = linalg::op_norm(&m).max(1.0);
    min_eig_hermitian(&m) >= -1e-9 * scale
}

fn criterion_5() -> Outcome {
    let mut rng = seeded(5);
    let mut mismatches = 0;
    let mut feasible_count = 0;
    for _ in 0..100 {
        let k = rng.random_range(1..=5);
        let z: Vec<C> = (0..k).map(|_| random::disc_point(&mut rng, 0.95)).collect();
        let w: Vec<C> = if rng.random::<bool>() {
            let a = random::disc_point(&mut rng, 0.9);
            let s = random::disc_point(&mut rng, 1.0);
            z.iter()
                .map(|zi| {
                    let lam = zi.conj();
                    s * (lam - a) / (C::new(1.0, 0.0) - a.conj() * lam)
                })
                .collect()
        } else {
            (0..k).map(|_| random::disc_point(&mut rng, 1.0)).collect()
        };
        let lib = np_feasible(&InterpolationProblem::scalar(&z, &w).unwrap()).unwrap().feasible;
        let oracle = classical_feasible(&z, &w);
        feasible_count += usize::from(oracle);
        if lib != oracle {
            mismatches += 1;
        }
    }
    let half = C::new(0.5, 0.0);
    let zero = C::new(0.0, 0.0);
    let ones = np_feasible(&InterpolationProblem::scalar(&[zero, half, C::new(0.0, 0.7)], &[C::new(1.0, 0.0); 3]).unwrap())
        .unwrap()
        .feasible;
    let schwarz = np_feasible(&InterpolationProblem::scalar(&[zero, half], &[zero, C::new(0.9, 0.0)]).unwrap())
        .unwrap()
        .feasible;
    outcome(
        mismatches == 0 && ones && !schwarz,
        format!("100 scalar instances ({feasible_count} feasible): {mismatches} mismatches; all-ones feasible={ones}; (0,1/2)->(0,0.9) feasible={schwarz}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(6);
    let mut infeasible = 0;
    let mut worst: f64 = f64::INFINITY;
    for g in [c2(), free(2)] {
        let rep = Representation::uniform(g.clone(), 1);
        let level = random::normalization_level(&g, random::NORMALIZATION_DIM);
        for _ in 0..25 {
            let d = rng.random_range(1..=3);
            let theta = random::normalized_polynomial(&mut rng, &g, d, level, true);
            let k = rng.random_range(1..=4);
            let points: Vec<DualPoint> = (0..k).map(|_| random::interior_point(&mut rng, &rep, 0.95)).collect();
            let c = points.iter().map(|p| evaluate(&theta, p, 1e-12).unwrap().value).collect();
            let b = vec![Mat::identity(rep.dim(), rep.dim()); k];
            let v = np_feasible(&InterpolationProblem::new(points, b, c).unwrap()).unwrap();
            worst = worst.min(v.cp.min_eigenvalue);
            if !v.feasible {
                infeasible += 1;
            }
        }
    }
    outcome(
        infeasible == 0,
        format!("50 roundtrip problems on C2 and free d=2: {infeasible} infeasible, smallest Choi eigenvalue {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = seeded(7);
    let mut worst: f64 = f64::INFINITY;
    let mut cases = 0;
    let setups: Vec<(Arc<DirectedGraph>, usize)> = vec![(c2(), 20), (free(1), 20), (free(2), 10)];
    for (g, n) in setups {
        for _ in 0..n {
            let m = rng.random_range(1..=2);
            let rep = Representation::uniform(g.clone(), m);
            let aux = if g.num_edges() == 1 || g.num_vertices() == 2 {
                vec![rng.random_range(0..=4); g.num_vertices()]
            } else {
                vec![0; g.num_vertices()]
            };
            let real = random::realization(&mut rng, &rep, aux);
            let sample: Vec<DualPoint> = (0..4).map(|_| random::interior_point(&mut rng, &rep, 0.9)).collect();
            let z = |p: &DualPoint| realization_evaluate(&real, p).unwrap();
            let v = schur_kernel_test(&z, &sample).unwrap();
            worst = worst.min(v.min_eigenvalue);
            cases += 1;
        }
    }
    outcome(
        worst >= -1e-8,
        format!("{cases} coisometric realizations (aux <= 4): smallest Choi eigenvalue {worst:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = seeded(8);
    let mut failures = 0;
    let mut margin: f64 = f64::INFINITY;
    for g in [c2(), free(2)] {
        let basis = FockBasis::new(g.clone(), 6);
        for _ in 0..25 {
            let rep = Representation::uniform(g.clone(), rng.random_range(1..=2));
            let d = rng.random_range(1..=3);
            let theta = random::normalized_polynomial(&mut rng, &g, d, 8, false);
            let eta = random::interior_point(&mut rng, &rep, 0.95);
            let v = schwartz_check(&theta, &eta, &basis).unwrap();
            margin = margin.min(v.min_eigenvalue);
            if !v.holds {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("50 normalized elements with a0=0: {failures} violations; min eigenvalue of <eta,eta> - XX* {margin:.2e}"),
    )
}

fn similar_point(rng: &mut Rand, eta: &DualPoint, spread: f64) -> (DualPoint, CommutantElement) {
    let rep = eta.rep();
    let s = CommutantElement::new(
        (0..rep.graph().num_vertices())
            .map(|v| {
                let m = rep.mult(v);
                Mat::identity(m, m) + random::matrix(rng, m, m) * C::new(spread, 0.0)
            })
            .collect(),
    );
    let t = eta.to_covariant();
    let blocks = rep
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let inv = s.blocks[edge.src].clone().try_inverse().expect("near identity");
            &s.blocks[edge.rng] * t.block(e) * inv
        })
        .collect();
    let tz = make_covariant(rep, blocks).unwrap();
    (tz.dual_point(), s)
}

fn adjoint_sum_counterexample(rng: &mut Rand) -> f64 {
    let rep = Representation::uniform(c2(), 2);
    let eta = random::point_with_norm(rng, &rep, 0.8);
    let (zeta, _) = similar_point(rng, &eta, 0.6);
    let adjoint_sum = FnSection(|p: &DualPoint| {
        let t = p.to_covariant();
        let mut m = Mat::zeros(p.rep().dim(), p.rep().dim());
        for e in 0..p.graph().num_edges() {
            m += t.operator(e).adjoint();
        }
        m
    });
    check_intertwiner_preservation(&adjoint_sum, &[(eta, zeta)], 1e-10).max_residual()
}

fn criterion_9() -> Outcome {
    let mut rng = seeded(9);
    let mut samples_ok = true;
    let mut max_excess: f64 = 0.0;
    let mut min_dim = usize::MAX;
    for i in 0..50 {
        let g = if i % 2 == 0 { c2() } else { free(2) };
        let c = 1.0 + rng.random::<f64>();
        let theta = random::geometric_series(&mut rng, &g, c);
        let rep = Representation::uniform(g.clone(), 2);
        let eta = random::interior_point(&mut rng, &rep, 0.5 / c);
        let zeta = if i % 4 < 2 {
            similar_point(&mut rng, &eta, 0.15).0
        } else {
            let other = random::interior_point(&mut rng, &Representation::uniform(g.clone(), 1), 0.5 / c);
            direct_sum(&eta, &other).unwrap()
        };
        let pairs = vec![(eta.clone(), zeta.clone())];
        let report = check_intertwiner_preservation(&theta, &pairs, 1e-10);
        for r in &report.rows {
            min_dim = min_dim.min(r.intertwiner_dim);
            max_excess = max_excess.max(r.residual - r.tail_bound);
        }
        samples_ok &= report.passed();
    }
    let counter_residual = adjoint_sum_counterexample(&mut rng);
    let pass = samples_ok && min_dim >= 1 && counter_residual > 1e-3;
    outcome(
        pass,
        format!("50 series and point pairs (min intertwiner dim {min_dim}): residual - tail <= {max_excess:.1e}; non-section residual {counter_residual:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = seeded(10);
    let a = suite::functoriality(&Representation::new(c2(), vec![2, 1]).unwrap(), &mut rng, 25);
    let b = suite::functoriality(&Representation::uniform(free(2), 2), &mut rng, 25);
    let worst = a.max_residual.max(b.max_residual);
    outcome(a.passed && b.passed, format!("50 cases: residual beyond tail bounds {worst:.1e}"))
}

fn criterion_11() -> Outcome {
    let t = make_covariant(&Representation::uniform(free(1), 1), vec![Mat::from_element(1, 1, C::new(0.5, 0.0))]).unwrap();
    let q = CommutantElement::identity(&t.rep().block_space());
    let cert = superharmonic_certificate(&q, &t, 20).unwrap();
    let oracle: f64 = (0..=20).map(|n| 0.75 * 0.25f64.powi(n)).sum();
    let lib = cert.partial_sums[20].blocks[0][(0, 0)].re;
    let scalar_ok = (lib - oracle).abs() <= 1e-15 && (lib - 1.0).abs() <= 1e-10 && cert.telescoping_holds();

    let mut rng = seeded(11);
    let mut violations = 0;
    let mut impure = 0;
    for i in 0..20 {
        let rep = if i % 2 == 0 {
            Representation::new(c2(), vec![2, 1]).unwrap()
        } else {
            Representation::uniform(free(2), 2)
        };
        let norm = 0.3 + 0.65 * rng.random::<f64>();
        let t = random::covariant_with_norm(&mut rng, &rep, norm);
        if !classify(&t).pure {
            impure += 1;
            continue;
        }
        let phi = cp_map(&t);
        let q = CommutantElement::identity(&rep.block_space());
        let r2 = &q - &phi.apply(&q);
        let (sums, rems) = telescoping(&q, &r2, &phi, 30);
        for (s, rem) in sums.iter().zip(&rems) {
            if (s - &q).norm() > rem + 1e-12 {
                violations += 1;
            }
        }
    }
    outcome(
        scalar_ok && violations == 0 && impure == 0,
        format!("scalar T=1/2: partial sum {lib:.15} vs 1 - 4^-21; 20 random pure covreps: {violations} telescoping violations over N <= 30"),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = seeded(12);
    let mut problems: Vec<String> = Vec::new();
    for i in 0..20 {
        let rep = if i % 2 == 0 {
            Representation::new(c2(), vec![1, 2]).unwrap()
        } else {
            Representation::uniform(free(2), 2)
        };
        let r = 0.95 * rng.random::<f64>();
        let t = random::covariant_with_norm(&mut rng, &rep, r);
        if ac_membership(&t, 3).unwrap().verdict != AcVerdict::AbsolutelyContinuous {
            problems.push(format!("strict contraction {i} not AC"));
        }
    }
    let one = C::new(1.0, 0.0);
    let unit = make_covariant(&Representation::uniform(free(1), 1), vec![Mat::from_element(1, 1, one)]).unwrap();
    let row = make_covariant(
        &Representation::uniform(free(2), 1),
        vec![Mat::from_element(1, 1, one), Mat::zeros(1, 1)],
    )
    .unwrap();
    for (name, t) in [("T=1", &unit), ("(1,0)", &row)] {
        let report = ac_membership(t, 3).unwrap();
        let w = report.w();
        let witness_ok = w.ncols() >= 1 && {
            let tt = t.t_tilde();
            let iso = (tt.adjoint() * w).norm() - w.norm();
            let proj = Mat::identity(w.nrows(), w.nrows()) - w * w.adjoint();
            let inv = (0..t.graph().num_edges())
                .map(|e| linalg::max_abs(&(&proj * t.operator(e).adjoint() * w)))
                .fold(0.0, f64::max);
            iso.abs() < 1e-10 && inv < 1e-10
        };
        if report.verdict != AcVerdict::NotAc || !witness_ok {
            problems.push(format!("{name} not flagged with a W witness"));
        }
    }
    for g in [c2(), free(2)] {
        let basis = FockBasis::new(g.clone(), 3);
        let ind = induced_rep(&Representation::uniform(g.clone(), 1), &basis);
        if ac_membership(&ind.covrep, 3).unwrap().verdict != AcVerdict::AbsolutelyContinuous {
            problems.push("induced representation not AC".into());
        }
    }
    let mut disagreements = 0;
    for i in 0..100 {
        let rep = match i % 4 {
            0 => Representation::uniform(c2(), 1),
            1 => Representation::new(c2(), vec![2, 1]).unwrap(),
            2 => Representation::uniform(free(2), 1),
            _ => Representation::uniform(free(2), 2),
        };
        let t = random::mixed_covariant(&mut rng, &rep);
        let r = ac_membership(&t, 2).unwrap();
        if r.cnc.completely_non_coisometric && r.periodic_state.is_some() {
            disagreements += 1;
        }
    }
    if disagreements > 0 {
        problems.push(format!("{disagreements} detector disagreements"));
    }
    let detail = if problems.is_empty() {
        "strict contractions AC; T=1 and (1,0) not AC with W; induced AC; 100 random: no disagreement".to_string()
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn criterion_13() -> Outcome {
    let g = free(2);
    let s1 = HardyElement::generator(g.clone(), 0);
    let s2 = HardyElement::generator(g.clone(), 1);
    let comm = s1.mul(&s2).sub(&s2.mul(&s1));
    let rep = Representation::uniform(g.clone(), 1);
    let mut rng = seeded(13);
    let mut eval_max: f64 = 0.0;
    for _ in 0..100 {
        let r = 2.0 * rng.random::<f64>();
        let p = random::point_with_norm(&mut rng, &rep, r);
        eval_max = eval_max.max(linalg::max_abs(&evaluate(&comm, &p, 1e-12).unwrap().value));
    }
    let n = 6;
    let basis = FockBasis::new(g.clone(), n);
    let ic = ideal_compression(std::slice::from_ref(&comm), &basis).unwrap();
    let pgp = linalg::max_abs(&ic.compress(&comm.truncated_operator(&basis)).matrix);
    let mut mult: f64 = 0.0;
    for _ in 0..10 {
        let (dx, dy) = (rng.random_range(0..=2), rng.random_range(0..=2));
        let x = random::polynomial(&mut rng, &g, dx);
        let y = random::polynomial(&mut rng, &g, dy);
        let lhs = &ic.compress(&x.truncated_operator(&basis)) * &ic.compress(&y.truncated_operator(&basis));
        let rhs = ic.compress(&x.mul(&y).truncated_operator(&basis));
        let interior = basis.up_to_level(n - dx - dy);
        mult = mult.max(lhs.distance_on_columns(&rhs, interior));
    }
    outcome(
        eval_max <= 1e-12 && pgp <= 1e-12 && mult <= 1e-10,
        format!("commutator at 100 scalar points {eval_max:.1e}; |PgP| {pgp:.1e}; multiplicativity on interior {mult:.1e}"),
    )
}

fn criterion_14() -> Outcome {
    let mut rng = seeded(14);
    let mut radius_err: f64 = 0.0;
    let mut cauchy_excess: f64 = 0.0;
    for i in 0..10 {
        let g = if i % 2 == 0 { c2() } else { free(2) };
        let c = 1.0 + 2.0 * rng.random::<f64>();
        let theta = random::geometric_series(&mut rng, &g, c);
        let est = radius_of_convergence(&theta, 60);
        radius_err = radius_err.max((est.radius - 1.0 / c).abs());
        let rho = 0.7 / c;
        let rep = Representation::uniform(g.clone(), 2);
        let eta = random::point_with_norm(&mut rng, &rep, rho);
        let q = rho * c;
        let mut partial = vec![rep.sigma(theta.a0())];
        for k in 1..=40 {
            let term = evaluate(&HardyElement::monomial(g.clone(), theta.tensor(k)), &eta, 1e-12).unwrap().value;
            let next = partial.last().unwrap() + term;
            partial.push(next);
        }
        for n in 0..40 {
            for m in (n + 1)..=40 {
                let bound = q.powi(n as i32 + 1) * (1.0 - q.powi((m - n) as i32)) / (1.0 - q) * (1.0 + 1e-6);
                let d = linalg::op_norm(&(&partial[m] - &partial[n]));
                cauchy_excess = cauchy_excess.max(d - bound - 1e-14);
            }
        }
    }
    let g = free(1);
    let one = AlgebraElement::one(1);
    let gg = g.clone();
    let h = HardyElement::from_rule(g.clone(), one, move |k| {
        CorrTensor::delta(&gg, Path::from_edges(&gg, vec![0; k]).unwrap())
    })
    .with_radius(1.0);
    let mut resolvent_gap: f64 = 0.0;
    for _ in 0..20 {
        let rep = Representation::uniform(g.clone(), 3);
        let r = 0.9 * rng.random::<f64>();
        let eta = random::point_with_norm(&mut rng, &rep, r);
        let a = eta.block(0).clone();
        let value = evaluate(&h, &eta, 1e-12).unwrap().value;
        let direct = (Mat::identity(3, 3) - a.adjoint()).try_inverse().unwrap();
        resolvent_gap = resolvent_gap.max(linalg::max_abs(&(value - direct)));
    }
    outcome(
        radius_err <= 1e-6 && cauchy_excess <= 0.0 && resolvent_gap <= 1e-8,
        format!("radius error {radius_err:.1e}; Cauchy bound excess {cauchy_excess:.1e}; (I - A*)^-1 gap {resolvent_gap:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 14] = [
        ("correspondence axioms", criterion_1),
        ("Cuntz-Toeplitz relations", criterion_2),
        ("norm identity", criterion_3),
        ("gauge analysis", criterion_4),
        ("classical Pick oracle", criterion_5),
        ("roundtrip interpolation", criterion_6),
        ("realization forward direction", criterion_7),
        ("Schwarz lemma", criterion_8),
        ("intertwiner preservation", criterion_9),
        ("direct-sum/similarity functoriality", criterion_10),
        ("superharmonic certificates", criterion_11),
        ("AC classification", criterion_12),
        ("commutator-ideal probe", criterion_13),
        ("Cauchy-Hadamard", criterion_14),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {}: {} [{:.1}s]",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 14 passed", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
