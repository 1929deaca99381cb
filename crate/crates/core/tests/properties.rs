use std::sync::Arc;

use proptest::prelude::*;

use nchardy::accont::{ac_membership, AcVerdict};
use nchardy::corr::{corr_norm, inner_product, DirectedGraph};
use nchardy::eval::{direct_sum, direct_sum_matrix, evaluate, unitary_conjugate};
use nchardy::fock::{creation_operator, gauge_fourier, FockBasis, FockOperator};
use nchardy::linalg::{self, Mat, C};
use nchardy::pick::{classical_pick_matrix, realization_evaluate};
use nchardy::random::{self, seeded};
use nchardy::reps::{classify, CommutantElement, Representation};

fn graph(which: u8) -> Arc<DirectedGraph> {
    Arc::new(match which % 3 {
        0 => DirectedGraph::cycle(2),
        1 => DirectedGraph::free(1),
        _ => DirectedGraph::free(2),
    })
}

fn rep(g: &Arc<DirectedGraph>, m: usize) -> Representation {
    Representation::uniform(g.clone(), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_is_hermitian_and_positive(seed: u64, which: u8, k in 0usize..4) {
        let g = graph(which);
        let mut rng = seeded(seed);
        let xi = random::tensor(&mut rng, &g, k);
        let eta = random::tensor(&mut rng, &g, k);
        let a = inner_product(&xi, &eta).unwrap();
        let b = inner_product(&eta, &xi).unwrap();
        for (x, y) in a.0.iter().zip(&b.0) {
            prop_assert!((x - y.conj()).norm() <= 1e-12);
        }
        for z in inner_product(&xi, &xi).unwrap().0 {
            prop_assert!(z.re >= -1e-14 && z.im.abs() <= 1e-14);
        }
    }

    #[test]
    fn creation_norm_is_correspondence_norm(seed: u64, which: u8, k in 0usize..3) {
        let g = graph(which);
        let basis = FockBasis::new(g.clone(), 4);
        let xi = random::tensor(&mut seeded(seed), &g, k);
        let op = creation_operator(&xi, &basis).unwrap();
        prop_assert!((op.norm() - corr_norm(&xi)).abs() <= 1e-10);
    }

    #[test]
    fn fourier_components_resolve_polynomials(seed: u64, which: u8, d in 0usize..3) {
        let g = graph(which);
        let basis = FockBasis::new(g.clone(), 4);
        let x = random::polynomial(&mut seeded(seed), &g, d).truncated_operator(&basis);
        let mut sum = FockOperator::zero(&basis).matrix;
        for j in -4i64..=4 {
            sum += gauge_fourier(&x, j, &basis).matrix;
        }
        prop_assert!(linalg::max_abs(&(sum - &x.matrix)) <= 1e-12);
    }

    #[test]
    fn evaluation_is_multiplicative(seed: u64, which: u8, m in 1usize..3, r in 0.0f64..1.5) {
        let g = graph(which);
        let mut rng = seeded(seed);
        let a = random::polynomial(&mut rng, &g, 2);
        let b = random::polynomial(&mut rng, &g, 2);
        let eta = random::point_with_norm(&mut rng, &rep(&g, m), r);
        let ab = evaluate(&a.mul(&b), &eta, 1e-12).unwrap().value;
        let prod = evaluate(&a, &eta, 1e-12).unwrap().value * evaluate(&b, &eta, 1e-12).unwrap().value;
        let scale = 1.0 + linalg::op_norm(&prod);
        prop_assert!(linalg::max_abs(&(ab - prod)) <= 1e-10 * scale);
    }

    #[test]
    fn evaluation_respects_direct_sums(seed: u64, which: u8, r in 0.0f64..0.5) {
        let g = graph(which);
        let mut rng = seeded(seed);
        let theta = random::geometric_series(&mut rng, &g, 1.5);
        let (r1, r2) = (rep(&g, 1), rep(&g, 2));
        let eta = random::point_with_norm(&mut rng, &r1, r);
        let zeta = random::point_with_norm(&mut rng, &r2, r);
        let sum = evaluate(&theta, &direct_sum(&eta, &zeta).unwrap(), 1e-12).unwrap();
        let x = evaluate(&theta, &eta, 1e-12).unwrap().value;
        let y = evaluate(&theta, &zeta, 1e-12).unwrap().value;
        let expected = direct_sum_matrix(&x, &y, &r1, &r2);
        prop_assert!(linalg::op_norm(&(sum.value - expected)) <= 1e-10);
    }

    #[test]
    fn evaluation_commutes_with_unitaries(seed: u64, which: u8, m in 1usize..3, r in 0.0f64..0.5) {
        let g = graph(which);
        let mut rng = seeded(seed);
        let theta = random::geometric_series(&mut rng, &g, 1.5);
        let rp = rep(&g, m);
        let eta = random::point_with_norm(&mut rng, &rp, r);
        let u = CommutantElement::new((0..g.num_vertices()).map(|_| random::unitary(&mut rng, m)).collect());
        let moved = evaluate(&theta, &unitary_conjugate(&u, &eta).unwrap(), 1e-12).unwrap().value;
        let x = evaluate(&theta, &eta, 1e-12).unwrap().value;
        let full = u.to_full();
        prop_assert!(linalg::op_norm(&(moved - &full * &x * full.adjoint())) <= 1e-10);
    }

    #[test]
    fn classical_pick_matrix_is_hermitian(seed: u64, k in 1usize..6) {
        let mut rng = seeded(seed);
        let z: Vec<C> = (0..k).map(|_| random::disc_point(&mut rng, 0.95)).collect();
        let w: Vec<C> = (0..k).map(|_| random::disc_point(&mut rng, 1.0)).collect();
        let m = classical_pick_matrix(&z, &w);
        prop_assert!(linalg::max_abs(&(&m - m.adjoint())) <= 1e-12);
    }

    #[test]
    fn realizations_are_contractive(seed: u64, which: u8, m in 1usize..3, aux in 0usize..3) {
        let g = graph(which);
        let rp = rep(&g, m);
        let aux = if g.num_vertices() == 1 && g.num_edges() > 1 { 0 } else { aux };
        let mut rng = seeded(seed);
        let real = random::realization(&mut rng, &rp, vec![aux; g.num_vertices()]);
        let eta = random::interior_point(&mut rng, &rp, 0.9);
        let z = realization_evaluate(&real, &eta).unwrap();
        prop_assert!(linalg::op_norm(&z) <= 1.0 + 1e-10);
    }

    #[test]
    fn strict_contractions_are_pure_and_ac(seed: u64, which: u8, m in 1usize..3, r in 0.0f64..0.95) {
        let g = graph(which);
        let t = random::covariant_with_norm(&mut seeded(seed), &rep(&g, m), r);
        prop_assert!(classify(&t).pure);
        prop_assert_eq!(ac_membership(&t, 2).unwrap().verdict, AcVerdict::AbsolutelyContinuous);
    }

    #[test]
    fn scaling_keeps_complete_non_coisometry(seed: u64, which: u8, s in 0.1f64..1.0) {
        let g = graph(which);
        let rp = rep(&g, 2);
        let mut rng = seeded(seed);
        let t = random::mixed_covariant(&mut rng, &rp);
        let before = ac_membership(&t, 2).unwrap();
        let blocks: Vec<Mat> = (0..g.num_edges()).map(|e| t.block(e) * C::new(s, 0.0)).collect();
        let scaled = nchardy::reps::make_covariant(&rp, blocks).unwrap();
        let after = ac_membership(&scaled, 2).unwrap();
        if before.cnc.completely_non_coisometric {
            prop_assert!(after.cnc.completely_non_coisometric);
        }
        prop_assert!(after.w().ncols() <= before.w().ncols());
    }
}
