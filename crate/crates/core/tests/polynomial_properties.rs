use std::f64::consts::PI;

use proptest::prelude::*;
use rs_toolkit_core::polynomials::*;
use rs_toolkit_core::qcalc::{q_pochhammer_qq, TruncationPolicy};
use rs_toolkit_core::{Complex64, QParameter};

fn qp(v: f64) -> QParameter {
    QParameter::new(v).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coefficient(n: u32, q: f64) -> f64 {
    (q * (1.0 - q.powi(n as i32))).sqrt()
}

#[test]
fn low_degree_polynomials() {
    let q = qp(0.5);
    let z = c(0.7, -0.2);
    assert_eq!(rs_poly(0, z, &q), c(1.0, 0.0));
    assert!((rs_poly(1, z, &q) - (z + 1.0)).norm() < 1e-15);
    assert!((rs_poly(2, c(1.0, 0.0), &q).re - 3.5).abs() < 1e-14);
    assert!((rs_poly_normalized(0, z, &q).re - (2.0 * PI).powf(-0.5)).abs() < 1e-15);
    assert_eq!(sw_poly(0, z, &q), c(1.0, 0.0));
    assert!((sw_poly(1, z, &q) - (z + 1.0)).norm() < 1e-15);
}

#[test]
fn stieltjes_wigert_term_swap() {
    for v in [0.3, 0.7] {
        let q = qp(v);
        for n in 0..=10 {
            for z in [c(0.4, 0.1), c(-0.8, 0.5)] {
                let a = sw_poly(n, z, &q);
                let b = rs_poly_inverse_base(n, z, &q);
                assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "n={n}");
            }
        }
    }
}

#[test]
fn generating_function_examples() {
    let q = qp(0.5);
    let pol = TruncationPolicy::default();
    let w = c(0.3, 0.0);
    let z = c(0.5, 0.0);
    let partial = generating_function(w, z, &q, 60).unwrap();
    let closed = generating_function_product(w, z, &q, &pol).unwrap();
    assert!((partial.value - closed.value).norm() < 1e-12);
    let at_zero = generating_function_product(w, c(0.0, 0.0), &q, &pol).unwrap();
    let euler = rs_toolkit_core::qcalc::q_pochhammer_infinite(w, &q, &pol).unwrap();
    assert!((at_zero.value * euler.value - 1.0).norm() < 1e-14);
    assert!((generating_function(c(0.0, 0.0), z, &q, 10).unwrap().value - 1.0).norm() < 1e-15);
    assert!(generating_function(c(1.1, 0.0), z, &q, 10).is_err());
}

#[test]
fn generating_function_tail_shrinks() {
    let q = qp(0.6);
    let pol = TruncationPolicy::default();
    let w = c(0.4, 0.2);
    let z = c(0.9, -0.6);
    let closed = generating_function_product(w, z, &q, &pol).unwrap().value;
    let mut prev = f64::INFINITY;
    for order in 10..40 {
        let gap = (generating_function(w, z, &q, order).unwrap().value - closed).norm();
        assert!(gap <= prev || gap < 1e-14, "order {order}");
        prev = gap;
    }
}

#[test]
fn szego_orthogonality() {
    for v in [0.3, 0.6, 0.9] {
        let q = qp(v);
        let g = szego_gram(&q, 9, 2048);
        for m in 0..9 {
            for n in 0..9 {
                let expect = if m == n {
                    q_pochhammer_qq(&q, n) * v.powi(-(n as i32))
                } else {
                    0.0
                };
                assert!((g[(m, n)] - expect).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn normalized_recurrence_matches_direct() {
    for v in [0.3, 0.5, 0.7] {
        let q = qp(v);
        let z = c(-0.4, 0.9);
        let all = rs_normalized_all(32, z, &q);
        for n in 0..=32u32 {
            let direct = rs_poly_with(n, z, &q, PolyMethod::DirectSum).value * normalization(n, &q);
            assert!((all[n as usize] - direct).norm() < 1e-11 * direct.norm().max(1.0));
        }
    }
}

#[test]
fn moment_examples() {
    let p = MomentKernel::new(KernelKind::P, 1.0, qp(0.5)).unwrap();
    assert!((kernel_moment(0, &p, 1e-10).unwrap().re() - 1.0).abs() < 1e-10);
    assert!((kernel_moment(1, &p, 1e-10).unwrap().re() - 2.0).abs() < 1e-9);
    let y = MomentKernel::new(KernelKind::Y, 0.0, qp(0.5)).unwrap();
    assert!((kernel_moment(2, &y, 1e-10).unwrap().re() - 16.0).abs() < 16.0 * 1e-9);
    assert!(MomentKernel::new(KernelKind::P, 1.0, qp(1.0 - 1e-7)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_by_q(n in 1u32..=20, zr in -1.2f64..1.2, zi in -1.2f64..1.2, v in 0.1f64..0.9) {
        let q = qp(v);
        let z = c(zr, zi);
        let lhs = rs_poly_normalized(n, z, &q) - rs_poly_normalized(n, z * v, &q);
        let rhs = z * rs_poly_normalized(n - 1, z, &q) * coefficient(n, v);
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn shift_with_power(n in 1u32..=20, zr in -1.2f64..1.2, zi in -1.2f64..1.2, v in 0.1f64..0.9) {
        let q = qp(v);
        let z = c(zr, zi);
        let lhs = rs_poly_normalized(n, z * v, &q) - rs_poly_normalized(n, z, &q) * v.powi(n as i32);
        let rhs = rs_poly_normalized(n - 1, z * v, &q) * coefficient(n, v);
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn shift_by_q_at_qz(n in 1u32..=20, zr in -1.2f64..1.2, zi in -1.2f64..1.2, v in 0.1f64..0.9) {
        let q = qp(v);
        let z = c(zr, zi);
        let lhs = rs_poly_normalized(n, z * v, &q) - rs_poly_normalized(n, z * v * v, &q);
        let rhs = z * v * rs_poly_normalized(n - 1, z * v, &q) * coefficient(n, v);
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn shift_by_q_squared(n in 1u32..=20, zr in -1.2f64..1.2, zi in -1.2f64..1.2, v in 0.1f64..0.9) {
        let q = qp(v);
        let z = c(zr, zi);
        let lhs = rs_poly_normalized(n, z, &q) - rs_poly_normalized(n, z * v * v, &q);
        let rhs = z * rs_poly_normalized(n, z, &q) * (v * (1.0 - v.powi(n as i32)))
            + (c(1.0, 0.0) - z * v) * z * rs_poly_normalized(n - 1, z, &q) * coefficient(n, v);
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn methods_agree_on_moderate_q(n in 0u32..=64, phi in -PI..PI, v in 0.1f64..0.6) {
        let q = qp(v);
        let z = Complex64::from_polar(v.powf(-0.5), phi);
        let a = rs_poly_with(n, z, &q, PolyMethod::DirectSum).value;
        let b = rs_poly_with(n, z, &q, PolyMethod::Recurrence).value;
        prop_assert!((a - b).norm() < 1e-11 * a.norm().max(1.0));
    }

    #[test]
    fn kernels_nonnegative(omega in 1e-6f64..1e6, r in -2.0f64..2.0, v in 0.1f64..0.9) {
        for kind in [KernelKind::P, KernelKind::Y] {
            let k = MomentKernel::new(kind, r, qp(v)).unwrap();
            prop_assert!(k.density(omega) >= 0.0);
        }
    }
}
