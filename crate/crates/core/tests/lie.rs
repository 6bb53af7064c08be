use holonomy_core::lie::{exp_group, log_group, root_decomposition, AlgebraVector, GroupId};
use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

/// Taylor series with scaling and squaring.
fn taylor_exp(x: &DMatrix<C>) -> DMatrix<C> {
    let n = x.nrows();
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let y = x.map(|z| z / 2f64.powi(squarings as i32));
    let mut term = DMatrix::<C>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &y / C::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Closed form `cos(theta) I + sin(theta)/theta X` for `X` in su(2).
fn su2_exp(x: &DMatrix<C>) -> DMatrix<C> {
    let theta = (-(x * x)[(0, 0)].re).sqrt();
    let s = if theta < 1e-12 { 1.0 } else { theta.sin() / theta };
    DMatrix::<C>::identity(2, 2) * C::new(theta.cos(), 0.0) + x * C::new(s, 0.0)
}

/// Rodrigues' formula.
fn so3_exp(x: &DMatrix<C>) -> DMatrix<C> {
    let x2 = x * x;
    let theta = (-(x2.trace().re) / 2.0).sqrt();
    let (a, b) = if theta < 1e-8 { (1.0, 0.5) } else { (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta)) };
    DMatrix::<C>::identity(3, 3) + x * C::new(a, 0.0) + x2 * C::new(b, 0.0)
}

fn dist(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vector(group: GroupId) -> impl Strategy<Value = AlgebraVector<f64>> {
    proptest::collection::vec(-2.0f64..2.0, group.dim()).prop_map(move |c| AlgebraVector::from_coords(group, &c).unwrap())
}

fn any_group() -> impl Strategy<Value = GroupId> {
    prop_oneof![Just(GroupId::Su2), Just(GroupId::Su3), Just(GroupId::So3)]
}

fn group_and_vectors() -> impl Strategy<Value = (AlgebraVector<f64>, AlgebraVector<f64>, AlgebraVector<f64>)> {
    any_group().prop_flat_map(|g| (vector(g), vector(g), vector(g)))
}

proptest! {
    #[test]
    fn exp_matches_closed_forms((x, _, _) in group_and_vectors()) {
        let e = exp_group(&x);
        let oracle = match x.group() {
            GroupId::Su2 => su2_exp(x.matrix()),
            GroupId::So3 => so3_exp(x.matrix()),
            GroupId::Su3 => taylor_exp(x.matrix()),
        };
        prop_assert!(dist(e.matrix(), &oracle) < 1e-12);
        prop_assert!(e.unitarity_defect() < 1e-13);
    }

    #[test]
    fn log_inverts_exp_inside_the_injectivity_radius((x, _, _) in group_and_vectors()) {
        // keep the spectrum of x inside (-pi, pi)
        let x = x.scale(1.0 / (1.0 + x.norm()));
        let back = log_group(&exp_group(&x)).unwrap();
        prop_assert!(back.frobenius_distance(&x) < 1e-11);
    }

    #[test]
    fn inner_product_is_ad_invariant((x, y, z) in group_and_vectors()) {
        let g = exp_group(&z);
        let lhs = g.adjoint(&x).inner(&g.adjoint(&y)).unwrap();
        prop_assert!((lhs - x.inner(&y).unwrap()).abs() < 1e-11);
        // ad-skew: <[z, x], y> = -<x, [z, y]>
        let a = z.bracket(&x).inner(&y).unwrap();
        let b = x.inner(&z.bracket(&y)).unwrap();
        prop_assert!((a + b).abs() < 1e-11);
    }

    #[test]
    fn bracket_satisfies_jacobi((x, y, z) in group_and_vectors()) {
        let j = x.bracket(&y.bracket(&z)) + y.bracket(&z.bracket(&x)) + z.bracket(&x.bracket(&y));
        prop_assert!(j.norm() < 1e-12);
        prop_assert!((x.bracket(&y) + y.bracket(&x)).norm() < 1e-14);
    }

    #[test]
    fn killing_form_is_a_negative_multiple_of_the_inner_product((x, y, _) in group_and_vectors()) {
        let g = x.group();
        // B(x, y) = tr(ad x ad y) computed from the ad matrices
        let b = (x.ad_matrix() * y.ad_matrix()).trace();
        let c: f64 = g.killing_constant();
        prop_assert!((b + x.inner(&y).unwrap() / c).abs() < 1e-10 * (1.0 + b.abs()));
    }
}

#[test]
fn bases_are_orthonormal() {
    for g in GroupId::ALL {
        let b = g.basis::<f64>();
        assert_eq!(b.len(), g.dim());
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y).unwrap() - want).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn root_pairs_satisfy_bracket_relations() {
    for g in GroupId::ALL {
        let v = g.reference_torus_vector::<f64>();
        let dec = root_decomposition(&v).unwrap();
        assert_eq!(dec.torus_basis.len(), g.rank());
        assert_eq!(dec.torus_basis.len() + 2 * dec.roots.len(), g.dim());
        for r in &dec.roots {
            // [v, e] = alpha e_k and [v, e_k] = -alpha e
            assert!(v.bracket(&r.e).frobenius_distance(&r.e_k.scale(r.alpha_value)) < 1e-12);
            assert!(v.bracket(&r.e_k).frobenius_distance(&r.e.scale(-r.alpha_value)) < 1e-12);
        }
    }
}

#[test]
fn single_precision_aliases_work() {
    let x = holonomy_core::AlgebraVector32::from_coords(GroupId::Su2, &[0.3, -0.2, 0.5]).unwrap();
    let g = exp_group(&x);
    assert!(g.unitarity_defect() < 1e-5);
    let back = log_group(&g).unwrap();
    assert!(back.frobenius_distance(&x) < 1e-5);
}
