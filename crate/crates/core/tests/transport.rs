use holonomy_core::lie::{exp_group, root_decomposition, AlgebraVector, GroupElement, GroupId};
use holonomy_core::loops::{basis_loop, enumerate_basis, gauge_act, hs_inner, l2_inner, AlgebraLoop, GroupPath};
use holonomy_core::random::{random_group_element, random_loop, random_path, random_vector, rng};
use holonomy_core::transport::{
    check_equivariance, check_riemannian_submersion, convergence_study, differential_phi, differential_phi_variational, solve_transport,
    DifferentialMethod, Scheme,
};
use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn taylor_exp(x: &DMatrix<C>) -> DMatrix<C> {
    let n = x.nrows();
    let squarings = 8;
    let y = x.map(|z| z / 2f64.powi(squarings));
    let mut term = DMatrix::<C>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..25 {
        term = &term * &y / C::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn dist(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn constant_loops_transport_to_the_exponential() {
    for g in GroupId::ALL {
        let mut r = rng(11);
        for _ in 0..10 {
            let v: AlgebraVector<f64> = random_vector(g, 1.0, &mut r);
            let sol = solve_transport(&AlgebraLoop::constant(&v, 1024).unwrap(), Scheme::Rkmk4).unwrap();
            assert!(dist(sol.endpoint.matrix(), &taylor_exp(v.matrix())) < 1e-10);
        }
    }
}

#[test]
fn schemes_are_fourth_order_and_agree() {
    for g in GroupId::ALL {
        for seed in 0..2 {
            let sample = |n| random_loop::<f64, _>(g, n, 3, 1.0, &mut rng(seed));
            let mut ends = Vec::new();
            for scheme in Scheme::ALL {
                let study = convergence_study(sample, &[128, 256, 512, 1024], 8192, scheme).unwrap();
                assert!((study.order - 4.0).abs() < 0.2, "{g} {scheme} {:?}", study);
                ends.push(solve_transport(&sample(1024).unwrap(), scheme).unwrap().endpoint);
            }
            for e in &ends[1..] {
                assert!(e.frobenius_distance(&ends[0]) < 1e-9);
            }
        }
    }
}

#[test]
fn transport_path_solves_the_ode() {
    let u = random_loop::<f64, _>(GroupId::Su3, 512, 2, 1.0, &mut rng(5)).unwrap();
    let sol = solve_transport(&u, Scheme::Cf4).unwrap();
    assert!(sol.unitarity_drift() < 1e-12);
    assert!(sol.ode_residual() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_action_is_equivariant(seed in 0u64..10_000, gi in 0usize..3) {
        let g = GroupId::ALL[gi];
        let mut r = rng(seed);
        let u = random_loop::<f64, _>(g, 512, 3, 1.0, &mut r).unwrap();
        let path = random_path::<f64, _>(g, 512, 3, 0.5, false, &mut r).unwrap();
        let res = check_equivariance(&path, &u, Scheme::Rkmk4).unwrap();
        prop_assert!(res < 1e-6, "{}", res);
    }

    #[test]
    fn gauge_action_composes(seed in 0u64..10_000) {
        let g = GroupId::Su2;
        let mut r = rng(seed);
        let u = random_loop::<f64, _>(g, 512, 2, 1.0, &mut r).unwrap();
        let a = random_path::<f64, _>(g, 512, 2, 0.5, false, &mut r).unwrap();
        let b = random_path::<f64, _>(g, 512, 2, 0.5, false, &mut r).unwrap();
        let lhs = gauge_act(&a.mul(&b).unwrap(), &u).unwrap();
        let rhs = gauge_act(&a, &gauge_act(&b, &u).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-7);
    }
}

#[test]
fn variational_and_difference_differentials_agree() {
    let g = GroupId::So3;
    let mut r = rng(2);
    let u = random_loop::<f64, _>(g, 512, 2, 1.0, &mut r).unwrap();
    let w = random_loop::<f64, _>(g, 512, 2, 1.0, &mut r).unwrap();
    let sol = solve_transport(&u, Scheme::Rkmk4).unwrap();
    let a = differential_phi_variational(&sol, &w).unwrap();
    let b = differential_phi(&u, &w, 1e-4, Scheme::Rkmk4).unwrap();
    assert!(a.frobenius_distance(&b) < 1e-7, "{}", a.frobenius_distance(&b));
}

#[test]
fn phi_is_a_riemannian_submersion_at_the_origin() {
    for g in GroupId::ALL {
        let rep = check_riemannian_submersion(&AlgebraLoop::<f64>::zero(g, 1024).unwrap(), 8, DifferentialMethod::Variational, Scheme::Rkmk4).unwrap();
        assert_eq!(rep.rank, g.dim());
        assert!(rep.isometry_residual < 1e-5);
        assert!(rep.kernel_constant_leakage < 1e-10);
    }
}

#[test]
fn phi_is_a_riemannian_submersion_at_gauge_translates() {
    // g(s) = h1 exp(2 pi m s H) h2 with exp(2 pi H) = e maps 0^ into phi^{-1}(e)
    let g = GroupId::Su2;
    let h_int = AlgebraVector::<f64>::from_coords(g, &[0.0, 0.0, std::f64::consts::SQRT_2]).unwrap();
    assert!(exp_group(&h_int.scale(std::f64::consts::TAU)).frobenius_distance(&GroupElement::identity(g)) < 1e-12);
    let mut r = rng(4);
    for m in 1..=3 {
        let h1: GroupElement<f64> = random_group_element(g, 3.0, &mut r);
        let h2: GroupElement<f64> = random_group_element(g, 3.0, &mut r);
        let path = GroupPath::from_fn(g, 1024, |s| h1.mul(&exp_group(&h_int.scale(std::f64::consts::TAU * m as f64 * s))).mul(&h2)).unwrap();
        let u = gauge_act(&path, &AlgebraLoop::zero(g, 1024).unwrap()).unwrap();
        let phi_u = solve_transport(&u, Scheme::Rkmk4).unwrap().endpoint;
        assert!(phi_u.frobenius_distance(&GroupElement::identity(g)) < 1e-9);
        let rep = check_riemannian_submersion(&u, 8, DifferentialMethod::Variational, Scheme::Rkmk4).unwrap();
        assert!(rep.isometry_residual < 1e-5, "{rep:?}");
    }
}

#[test]
fn loop_basis_is_orthonormal() {
    for g in GroupId::ALL {
        let dec = root_decomposition(&g.reference_torus_vector::<f64>()).unwrap();
        let labels = enumerate_basis(&dec, 8);
        assert_eq!(labels.len(), g.dim() * 17);
        let loops: Vec<_> = labels.iter().map(|l| basis_loop(&dec, l, 1024).unwrap()).collect();
        for (i, a) in loops.iter().enumerate() {
            for (j, b) in loops.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((l2_inner(a, b).unwrap() - want).abs() < 1e-12, "{} {}", labels[i], labels[j]);
            }
        }
    }
}

#[test]
fn spectral_product_of_order_zero_is_the_l2_product() {
    let mut r = rng(8);
    let a = random_loop::<f64, _>(GroupId::Su3, 64, 4, 1.0, &mut r).unwrap();
    let b = random_loop::<f64, _>(GroupId::Su3, 64, 4, 1.0, &mut r).unwrap();
    assert!((hs_inner(&a, &b, 0).unwrap() - l2_inner(&a, &b).unwrap()).abs() < 1e-12);
}
