use std::f64::consts::PI;

use proptest::prelude::*;
use rs_toolkit_core::operators::{build_operator, BasisTruncation, OperatorLabel};
use rs_toolkit_core::rsfunctions::*;
use rs_toolkit_core::{CirclePoint, Complex64, QParameter};

fn qp(v: f64) -> QParameter {
    QParameter::new(v).unwrap()
}

#[test]
fn odd_scaling_reference_point() {
    let p = CirclePoint::new(0.37, qp(0.5));
    let r = scaling_relations_check(0, &p);
    assert!(r.odd_f < 1e-12 && r.odd_g < 1e-12 && r.odd_weight < 1e-12, "{r:?}");
    assert!(r.even_f < 1e-12 && r.even_g < 1e-12 && r.even_weight < 1e-12);
}

#[test]
fn lowering_matrix_matches_lowering_form() {
    let q = qp(0.5);
    let p = CirclePoint::new(-1.1, q);
    let t = BasisTruncation::new(12).unwrap();
    let b = build_operator(OperatorLabel::B, t, &q).matrix;
    let bd = build_operator(OperatorLabel::Bdag, t, &q).matrix;
    let psi = rs_functions_all(12, &p);
    for n in 1..10u32 {
        let lattice = |r: i32| rs_function_on_lattice(n, &p, r);
        let by_form = apply_lowering(n, &lattice, &p, 0).unwrap();
        let by_matrix: Complex64 = (0..12).map(|k| b[(k, n as usize)] * psi[k]).sum();
        assert!((by_form - by_matrix).norm() < 1e-8, "n={n}");
        let raised = apply_raising(n, &lattice, &p, 0).unwrap();
        let raised_matrix: Complex64 = (0..12).map(|k| bd[(k, n as usize)] * psi[k]).sum();
        assert!((raised - raised_matrix).norm() < 1e-8, "n={n}");
    }
}

#[test]
fn ladder_singular_at_origin_free_points() {
    let p = CirclePoint::new(0.0, qp(0.5));
    // on the circle |qz| = q^(1/2) < 1, so the forms are regular everywhere
    assert!(qdiff_ladder_check(2, &p).is_ok());
}

#[test]
fn ground_lowering_vanishes() {
    let p = CirclePoint::new(0.8, qp(0.5));
    let l = qdiff_ladder_check(0, &p).unwrap();
    assert!(l.lowering < 1e-12 && l.number < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_symmetric(n in 0u32..10, phi in 0.0f64..PI, v in 0.1f64..0.9) {
        let q = qp(v);
        let a = rs_function(n, &CirclePoint::new(phi, q)).norm_sqr();
        let b = rs_function(n, &CirclePoint::new(-phi, q)).norm_sqr();
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }

    #[test]
    fn functions_obey_normalized_recurrence(n in 1u32..30, phi in -PI..PI, v in 0.1f64..0.9) {
        let p = CirclePoint::new(phi, qp(v));
        let z = p.z();
        let f = rs_functions_all(n as usize + 2, &p);
        let k = n as usize;
        let rhs = ((z + 1.0) * f[k] - z * f[k - 1] * (v * (1.0 - v.powi(n as i32))).sqrt())
            * (v / (1.0 - v.powi(n as i32 + 1))).sqrt();
        prop_assert!((f[k + 1] - rhs).norm() < 1e-10 * f[k + 1].norm().max(1.0));
    }

    #[test]
    fn derivative_forms_and_ladder(n in 0u32..=10, phi in -PI..PI, v in 0.2f64..0.8) {
        let p = CirclePoint::new(phi, qp(v));
        let d = q_derivative_identities_check(n, &p).unwrap();
        prop_assert!(d.lowering_form < 1e-8 && d.raising_form < 1e-8);
        let l = qdiff_ladder_check(n, &p).unwrap();
        prop_assert!(l.lowering < 1e-8 && l.raising < 1e-8 && l.number < 1e-8);
        prop_assert!(polynomial_derivative_residual(n, &p) < 1e-8);
        prop_assert!(weight_derivative_residual(&p) < 1e-9);
    }

    #[test]
    fn scaling_relations_everywhere(r in -3i32..=3, phi in -PI..PI, v in 0.2f64..0.8) {
        let res = scaling_relations_check(r, &CirclePoint::new(phi, qp(v)));
        prop_assert!(res.max() < 1e-9, "{:?}", res);
    }

    #[test]
    fn kernel_hermitian(beta in -PI..PI, phi in -PI..PI, eps in 0.0f64..0.95, v in 0.1f64..0.9) {
        let q = qp(v);
        let a = bilinear_kernel(beta, phi, eps, &q).unwrap().value;
        let b = bilinear_kernel(phi, beta, eps, &q).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
    }
}
