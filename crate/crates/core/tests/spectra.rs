use holonomy_core::lie::{AlgebraVector, GroupId};
use holonomy_core::random::{random_vector, rng};
use holonomy_core::spectra::traces::{regularized_traces, TailModel, TraceOptions};
use holonomy_core::spectra::{analytic_fiber_spectrum, numeric_shape_operator, trace_square, trace_square_closed_form, SpectrumTable};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Positive roots read off the spectrum of `ad(v)^T ad(v)`: each nonzero
/// eigenvalue `alpha^2` appears twice, once per root vector pair.
fn roots_from_ad(v: &AlgebraVector<f64>) -> Vec<f64> {
    let ad = v.ad_matrix();
    let mut ev: Vec<f64> = (ad.transpose() * &ad).symmetric_eigen().eigenvalues.iter().copied().filter(|x| *x > 1e-10).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.chunks(2).map(|p| p[0].sqrt()).collect()
}

fn oracle_table(v: &AlgebraVector<f64>, kmax: usize) -> SpectrumTable {
    let mut vals = Vec::new();
    for k in 1..=kmax as i64 {
        for kk in [k, -k] {
            for a in roots_from_ad(v) {
                vals.extend([-a / (2.0 * PI * kk as f64); 2]);
            }
            vals.extend(std::iter::repeat_n(0.0, v.group().rank()));
        }
    }
    SpectrumTable::from_values(&vals).unwrap()
}

#[test]
fn numeric_shape_operator_matches_the_root_formula() {
    let mut r = rng(5);
    for g in [GroupId::Su2, GroupId::So3] {
        for _ in 0..2 {
            let v: AlgebraVector<f64> = random_vector(g, 1.0, &mut r);
            let op = numeric_shape_operator(&v, 4, 1e-4).unwrap();
            let d = op.table.multiset_distance(&oracle_table(&v, 4));
            assert!(d < 1e-4, "{g} {d}");
            let zeros = op.table.expanded().into_iter().filter(|x| x.abs() < 1e-3).count();
            assert_eq!(zeros, 2 * 4 * g.rank());
            assert!(op.table.expanded().iter().filter(|x| x.abs() < 1e-3).all(|x| x.abs() < 1e-6));
        }
    }
}

#[test]
fn su2_unit_root_squares_to_one_sixth() {
    let h = GroupId::Su2.reference_torus_vector::<f64>();
    let v = h.scale(1.0 / roots_from_ad(&h)[0]);
    for k in [1, 4, 16] {
        assert!((trace_square(&v, k).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }
}

#[test]
fn truncated_square_sums_approach_from_below() {
    let v: AlgebraVector<f64> = random_vector(GroupId::Su3, 1.0, &mut rng(8));
    let full = trace_square_closed_form(&v).unwrap();
    let bound: f64 = roots_from_ad(&v).iter().map(|a| a * a).sum::<f64>() / (PI * PI);
    for k in [2usize, 8, 32] {
        let head: f64 = analytic_fiber_spectrum(&v, k).unwrap().expanded().iter().map(|x| x * x).sum();
        assert!(head < full && full - head <= bound / k as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn analytic_table_matches_ad_oracle(seed in 0u64..1_000_000, gi in 0usize..3, k in 1usize..6) {
        let g = GroupId::ALL[gi];
        let v: AlgebraVector<f64> = random_vector(g, 1.0, &mut rng(seed));
        let t = analytic_fiber_spectrum(&v, k).unwrap();
        prop_assert!(t.multiset_distance(&oracle_table(&v, k)) < 1e-10);
    }

    #[test]
    fn spectra_scale_with_the_normal(seed in 0u64..1_000_000, gi in 0usize..3, s in 0.1f64..4.0) {
        let g = GroupId::ALL[gi];
        let v: AlgebraVector<f64> = random_vector(g, 1.0, &mut rng(seed));
        let a = analytic_fiber_spectrum(&v.scale(s), 3).unwrap();
        let b = analytic_fiber_spectrum(&v, 3).unwrap().scaled(s).unwrap();
        prop_assert!(a.multiset_distance(&b) < 1e-12);
        let sq = trace_square(&v.scale(s), 3).unwrap();
        prop_assert!((sq - s * s * trace_square(&v, 3).unwrap()).abs() < 1e-12 * (1.0 + sq));
    }

    #[test]
    fn fibre_spectrum_has_zero_regularized_trace(seed in 0u64..1_000_000, gi in 0usize..3, k in 1usize..9) {
        let g = GroupId::ALL[gi];
        let v: AlgebraVector<f64> = random_vector(g, 1.0, &mut rng(seed));
        let table = analytic_fiber_spectrum(&v, k).unwrap();
        let roots: Vec<(f64, usize)> = roots_from_ad(&v).into_iter().map(|a| (a, 1)).collect();
        let opts = TraceOptions { partial_sum_limit: 1000, ..TraceOptions::default() };
        let rep = regularized_traces(&table, Some(&TailModel::fibre(k, &roots)), &opts).unwrap();
        prop_assert_eq!(rep.hlo_trace.value(), Some(0.0));
        prop_assert!((trace_square(&v, k).unwrap() - trace_square_closed_form(&v).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn so3_and_su2_share_normalized_tables() {
    // same roots after scaling v to unit longest root
    let t = |g: GroupId| {
        let h = g.reference_torus_vector::<f64>();
        let a = roots_from_ad(&h).into_iter().fold(0.0, f64::max);
        analytic_fiber_spectrum(&h.scale(1.0 / a), 3).unwrap()
    };
    assert!(t(GroupId::Su2).multiset_distance(&t(GroupId::So3)) < 1e-12);
}
