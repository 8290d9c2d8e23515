use std::f64::consts::PI;

use proptest::prelude::*;
use rs_toolkit_core::observables::*;
use rs_toolkit_core::operators::{build_operator, OperatorLabel};
use rs_toolkit_core::states::*;
use rs_toolkit_core::{BasisTruncation, CoherentLabel, Complex64, QParameter};

fn qp(v: f64) -> QParameter {
    QParameter::new(v).unwrap()
}

/// A label whose `(1-q)|mu|^2` is the given fraction of the domain bound.
fn label(fill: f64, theta: f64, v: f64) -> CoherentLabel {
    let mu2 = fill / (1.0 - v);
    CoherentLabel::new(mu2.sqrt(), theta, qp(v)).unwrap()
}

fn interior_residual(m: &nalgebra::DMatrix<Complex64>, v: &nalgebra::DVector<Complex64>, lambda: Complex64, k: usize) -> f64 {
    (m * v - v * lambda).rows(0, k).norm() / v.norm()
}

#[test]
fn asymptotic_path_approaches_limits() {
    let theta = PI / 3.0;
    let mut prev_c = f64::INFINITY;
    let mut prev_u = f64::INFINITY;
    for v in [0.95, 0.98, 0.99] {
        let l = label(0.5, theta, v);
        let m = moments_closed_form(&l).unwrap();
        let gap_c = (m.mean_c - theta.cos()).abs();
        let gap_u = uncertainty_symmetric(&l).unwrap() - 0.25;
        assert!(gap_c < prev_c && gap_u < prev_u);
        prev_c = gap_c;
        prev_u = gap_u;
    }
    assert!(prev_c < 0.05 && prev_u < 0.02);
}

#[test]
fn commutator_bound_vanishes_near_one() {
    let u = uncertainty_cs(&label(0.5, 0.0, 0.99)).unwrap();
    assert!(u.bound < 1e-40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn coherent_eigenvalue(fill in 0.0f64..0.6, theta in -PI..PI, v in 0.3f64..0.9) {
        let l = label(fill, theta, v);
        let t = BasisTruncation::new(300).unwrap();
        let s = coherent_coefficients(&l, t).unwrap();
        let b = build_operator(OperatorLabel::B, t, l.q()).matrix;
        prop_assert!(interior_residual(&b, &s.coefficients, l.mu(), t.interior()) < 1e-9);
    }

    #[test]
    fn phase_eigenvalues(gamma in 0.05f64..(PI - 0.05), v in 0.2f64..0.9) {
        let t = BasisTruncation::new(64).unwrap();
        let q = qp(v);
        let c = build_operator(OperatorLabel::C, t, &q).matrix;
        let s = build_operator(OperatorLabel::S, t, &q).matrix;
        let vc = phase_state_coefficients(&PhaseLabel::new(gamma, PhaseKind::Cosine).unwrap(), t);
        prop_assert!(interior_residual(&c, &vc, Complex64::new(gamma.cos(), 0.0), t.interior()) < 1e-10);
        let g = gamma - PI / 2.0;
        let vs = phase_state_coefficients(&PhaseLabel::new(g, PhaseKind::Sine).unwrap(), t);
        prop_assert!(interior_residual(&s, &vs, Complex64::new(g.sin(), 0.0), t.interior()) < 1e-10);
    }

    #[test]
    fn moment_set_invariants(fill in 0.0f64..0.9, theta in -PI..PI, v in 0.5f64..0.95) {
        let m = moments_closed_form(&label(fill, theta, v)).unwrap();
        prop_assert!(m.mean_c.powi(2) + m.mean_s.powi(2) <= m.mean_c2 + m.mean_s2);
        prop_assert_eq!(m.mean_cs_minus.re, 0.0);
        prop_assert!(m.variance_n() >= -1e-12 * m.mean_n2);
    }

    #[test]
    fn uncertainties_independent_of_phase(fill in 0.01f64..0.9, t1 in -PI..PI, t2 in -PI..PI, v in 0.5f64..0.95) {
        let a = label(fill, t1, v);
        let b = label(fill, t2, v);
        let ua = uncertainty_symmetric(&a).unwrap();
        let ub = uncertainty_symmetric(&b).unwrap();
        prop_assert!((ua - ub).abs() < 1e-10 * ua);
        prop_assert!(ua >= 0.25);
        let ca = uncertainty_cs(&a).unwrap();
        prop_assert!(ca.value >= ca.bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn overlap_modulus_in_unit_interval(
        f1 in 0.0f64..0.95, t1 in -PI..PI, f2 in 0.0f64..0.95, t2 in -PI..PI, v in 0.1f64..0.95,
    ) {
        let o = coherent_overlap(&label(f1, t1, v), &label(f2, t2, v)).unwrap().norm_sqr();
        prop_assert!(o > 0.0 && o <= 1.0 + 1e-14);
    }
}
