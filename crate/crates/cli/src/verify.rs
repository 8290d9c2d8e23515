//! Named residual checks over the core library.
//!
//! Every check carries a neutral `id`, a short `eq` tag used for filtering,
//! its parameters, a tolerance and a closure producing a residual. A check
//! passes when the residual is finite and does not exceed the tolerance.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_3;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rs_toolkit_core::observables::{
    moments_closed_form, moments_matrix_route, uncertainty_cs, uncertainty_cs_from_moments,
    uncertainty_symmetric,
};
use rs_toolkit_core::operators::{algebra_check, build_operator, phase_operator_check};
use rs_toolkit_core::polynomials::{
    integral_representation_check, kernel_moment, rs_poly_with, szego_gram, IntegralRepresentation,
};
use rs_toolkit_core::qcalc::{q_pochhammer_qq, TruncationPolicy};
use rs_toolkit_core::rsfunctions::{
    orthonormality_matrix, polynomial_derivative_residual, q_derivative_identities_check,
    qdiff_ladder_check, reproducing_residual, semigroup_residual, weight_derivative_residual,
};
use rs_toolkit_core::states::{
    coherent_coefficients, coherent_expansion, coherent_function, coherent_overlap,
    coherent_overlap_quadrature, phase_completeness_check, phase_smearing, phase_state_coefficients,
    resolution_moment, resolution_moment_simplified, resolution_of_unity_check,
};
use rs_toolkit_core::{
    BasisTruncation, CirclePoint, CoherentLabel, Complex64, KernelKind, MomentKernel, OperatorLabel,
    PhaseKind, PhaseLabel, PolyMethod, QParameter, Result as CoreResult,
};
use serde::Serialize;

use crate::output::{format_real, Cell, Table};

pub const CIRCLE_NODES: usize = 2048;
pub const ALGEBRA_DIM: usize = 64;
pub const MOMENT_DIM: usize = 300;
pub const SMEARING_DIM: usize = 200;
pub const NEAR_ONE_Q: f64 = 1.0 - 1e-8;
pub const ASYMPTOTIC_Q: f64 = 0.99;
/// `(1-q)|mu|^2` values used for coherent-state labels.
pub const FILLS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.8];
const DERIVATIVE_POINTS: usize = 10;
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

type Params = BTreeMap<&'static str, f64>;
type Eval = Box<dyn Fn() -> CoreResult<f64> + Send + Sync>;

pub struct Check {
    pub id: &'static str,
    pub eq: &'static str,
    pub params: Params,
    pub tol: f64,
    eval: Eval,
}

impl Check {
    fn new(
        id: &'static str,
        eq: &'static str,
        params: &[(&'static str, f64)],
        tol: f64,
        eval: impl Fn() -> CoreResult<f64> + Send + Sync + 'static,
    ) -> Self {
        Check {
            id,
            eq,
            params: params.iter().copied().collect(),
            tol,
            eval: Box::new(eval),
        }
    }

    pub fn matches(&self, key: &str) -> bool {
        self.id == key || self.eq == key
    }

    pub fn run(&self) -> Record {
        let outcome = (self.eval)();
        let residual = outcome.as_ref().ok().copied().filter(|r| r.is_finite());
        let error = outcome.err().map(|e| e.to_string());
        Record {
            id: self.id,
            eq: self.eq,
            params: self.params.clone(),
            residual,
            tol: self.tol,
            pass: residual.is_some_and(|r| r <= self.tol),
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: &'static str,
    pub eq: &'static str,
    pub params: Params,
    /// `None` when the evaluation failed or produced a non-finite value.
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip)]
    pub error: Option<String>,
}

impl Record {
    pub fn params_text(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new("verify", vec!["id", "eq", "params", "residual", "tol", "pass"]);
        for r in &self.records {
            t.rows.push(vec![
                Cell::Text(r.id.into()),
                Cell::Text(r.eq.into()),
                Cell::Text(r.params_text()),
                Cell::Text(r.residual.map_or_else(|| "nan".into(), format_real)),
                Cell::Real(r.tol),
                Cell::Text(r.pass.to_string()),
            ]);
        }
        t
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.records).expect("records serialize")
    }
}

/// Settings that shape the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub q_list: Vec<f64>,
    pub max_degree: u32,
    pub tol_override: Option<f64>,
}

impl Default for Suite {
    fn default() -> Self {
        Suite {
            q_list: crate::config::DEFAULT_Q_LIST.to_vec(),
            max_degree: crate::config::DEFAULT_MAX_DEGREE,
            tol_override: None,
        }
    }
}

fn qp(v: f64) -> QParameter {
    QParameter::new(v).expect("q validated by the caller")
}

fn max_of(values: impl IntoIterator<Item = CoreResult<f64>>) -> CoreResult<f64> {
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn identity_gap(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    (m - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

/// `|| (M v - lambda v)[..k] || / ||v||`.
fn eigen_residual(m: &DMatrix<Complex64>, v: &DVector<Complex64>, lambda: Complex64, k: usize) -> f64 {
    (m * v - v * lambda).rows(0, k).norm() / v.norm()
}

/// Quasi-random points on the circle from the golden angle.
pub fn sample_angles(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| rs_toolkit_core::theta::wrap_angle(0.37 + GOLDEN_ANGLE * j as f64))
        .collect()
}

fn label(fill: f64, theta: f64, q: f64) -> CoreResult<CoherentLabel> {
    let mu2 = fill / rs_toolkit_core::qcalc::one_minus_q_pow(q, 1.0);
    CoherentLabel::new(mu2.sqrt(), theta, qp(q))
}

fn polynomial_checks(q: f64, max_degree: u32, out: &mut Vec<Check>) {
    let samples = [
        ("z_re", 0.3, "z_im", 0.0),
        ("z_re", 0.7, "z_im", 0.2),
        ("z_re", -0.4, "z_im", 0.9),
    ];
    for (kr, re, ki, im) in samples {
        out.push(Check::new(
            "rs_three_term_recurrence",
            "e3",
            &[("q", q), (kr, re), (ki, im), ("n_max", max_degree as f64)],
            1e-10,
            move || {
                let h = qp(q);
                let z = Complex64::new(re, im);
                let p = |n: u32| rs_poly_with(n, z, &h, PolyMethod::DirectSum).value;
                Ok((1..max_degree)
                    .map(|n| {
                        let lhs = p(n + 1);
                        let rhs = (z + 1.0) * p(n) - z * p(n - 1) * (1.0 - q.powi(n as i32));
                        (lhs - rhs).norm() / lhs.norm().max(1.0)
                    })
                    .fold(0.0, f64::max))
            },
        ));
    }
    out.push(Check::new(
        "szego_orthogonality",
        "e4",
        &[("q", q), ("n_max", max_degree as f64)],
        1e-8,
        move || {
            let h = qp(q);
            let size = max_degree as usize + 1;
            let g = szego_gram(&h, size, CIRCLE_NODES);
            let norms: Vec<f64> = (0..size).map(|n| q_pochhammer_qq(&h, n) * q.powi(-(n as i32))).collect();
            let mut gap = 0.0f64;
            for m in 0..size {
                for n in 0..size {
                    let expect = if m == n { norms[n] } else { 0.0 };
                    // entries grow like q^-n; measure the error on the scale of the diagonal
                    let scale = (norms[m] * norms[n]).sqrt().max(1.0);
                    gap = gap.max((g[(m, n)] - expect).abs() / scale);
                }
            }
            Ok(gap)
        },
    ));
    for a in [0.2, 0.5] {
        out.push(Check::new(
            "pochhammer_representation",
            "e5",
            &[("q", q), ("a", a), ("n_max", 6.0)],
            1e-8,
            move || {
                let h = qp(q);
                max_of((0..=6).map(|n| {
                    let repr = IntegralRepresentation::pochhammer(n, Complex64::new(a, 0.0));
                    integral_representation_check(repr, &h, 1e-12).map(|r| r.residual)
                }))
            },
        ));
    }
    for (re, im) in [(0.3, 0.0), (0.7, 0.2)] {
        for (id, eq, kind) in [
            ("kernel_p_representation", "e6", KernelKind::P),
            ("kernel_y_representation", "e10", KernelKind::Y),
        ] {
            out.push(Check::new(
                id,
                eq,
                &[("q", q), ("z_re", re), ("z_im", im), ("r", 1.0), ("n_max", 6.0)],
                1e-7,
                move || {
                    let h = qp(q);
                    let z = Complex64::new(re, im);
                    max_of((0..=6).map(|n| {
                        let repr = match kind {
                            KernelKind::P => IntegralRepresentation::KernelP { n, z, r: 1.0 },
                            KernelKind::Y => IntegralRepresentation::KernelY { n, z, r: 1.0 },
                        };
                        integral_representation_check(repr, &h, 1e-10).map(|r| r.residual)
                    }))
                },
            ));
        }
    }
    for (id, eq, kind) in [
        ("kernel_p_moments", "e7", KernelKind::P),
        ("kernel_y_moments", "e9", KernelKind::Y),
    ] {
        out.push(Check::new(id, eq, &[("q", q), ("r", 1.0), ("k_max", 8.0)], 1e-9, move || {
            let kernel = MomentKernel::new(kind, 1.0, qp(q))?;
            max_of((0..=8).map(|k| {
                let exact = kernel.exact_moment(k);
                kernel_moment(k, &kernel, 1e-11).map(|v| (v.re() - exact).abs() / exact)
            }))
        }));
    }
}

fn function_checks(q: f64, max_degree: u32, out: &mut Vec<Check>) {
    out.push(Check::new(
        "rs_orthonormality",
        "e16",
        &[("q", q), ("n_max", max_degree as f64)],
        1e-8,
        move || Ok(identity_gap(&orthonormality_matrix(&qp(q), max_degree as usize + 1, CIRCLE_NODES))),
    ));
    out.push(Check::new(
        "kernel_reproducing",
        "e19",
        &[("q", q), ("eps", 0.5), ("phi", 0.4), ("n_max", 6.0)],
        1e-8,
        move || max_of((0..=6).map(|n| reproducing_residual(n, 0.4, 0.5, &qp(q), CIRCLE_NODES))),
    ));
    out.push(Check::new(
        "kernel_semigroup",
        "e20",
        &[("q", q), ("eps", 0.6), ("eps2", 0.5), ("gamma", -0.7), ("phi", 0.4)],
        1e-8,
        move || semigroup_residual(-0.7, 0.4, 0.6, 0.5, &qp(q), CIRCLE_NODES),
    ));

    let points = DERIVATIVE_POINTS as f64;
    let at_points = move |f: fn(u32, &CirclePoint) -> CoreResult<f64>| {
        move || {
            let h = qp(q);
            max_of(
                sample_angles(DERIVATIVE_POINTS)
                    .into_iter()
                    .flat_map(|phi| (0..=10).map(move |n| (phi, n)))
                    .map(|(phi, n)| f(n, &CirclePoint::new(phi, h))),
            )
        }
    };
    let derivative: [(&'static str, &'static str, fn(u32, &CirclePoint) -> CoreResult<f64>); 6] = [
        ("polynomial_q_derivative", "e24", |n, p| Ok(polynomial_derivative_residual(n, p))),
        ("weight_q_derivative", "e25", |_, p| Ok(weight_derivative_residual(p))),
        ("rs_function_q_derivative", "e25", |n, p| {
            q_derivative_identities_check(n, p).map(|d| d.lowering_form.max(d.raising_form))
        }),
        ("lowering_form", "e26", |n, p| qdiff_ladder_check(n, p).map(|l| l.lowering)),
        ("raising_form", "e27", |n, p| qdiff_ladder_check(n, p).map(|l| l.raising)),
        ("number_form", "e28", |n, p| qdiff_ladder_check(n, p).map(|l| l.number)),
    ];
    for (id, eq, f) in derivative {
        out.push(Check::new(
            id,
            eq,
            &[("q", q), ("points", points), ("n_max", 10.0)],
            1e-8,
            at_points(f),
        ));
    }
}

fn algebra_checks(q: f64, out: &mut Vec<Check>) {
    let dim = ALGEBRA_DIM as f64;
    out.push(Check::new("q_commutation", "e29", &[("q", q), ("dim", dim)], 1e-12, move || {
        let r = algebra_check(BasisTruncation::new(ALGEBRA_DIM)?, &qp(q))?;
        Ok(r.q_commutator.max(r.q_lowering).max(r.q_raising))
    }));
    out.push(Check::new("commutation", "e30", &[("q", q), ("dim", dim)], 1e-12, move || {
        let r = algebra_check(BasisTruncation::new(ALGEBRA_DIM)?, &qp(q))?;
        Ok(r.commutator.max(r.number_lowering).max(r.number_raising))
    }));
    out.push(Check::new("phase_operators", "e37", &[("q", q), ("dim", dim)], 1e-12, move || {
        let r = phase_operator_check(BasisTruncation::new(ALGEBRA_DIM)?, &qp(q));
        Ok(r.square_sum
            .max(r.commutator)
            .max(r.shift_product)
            .max(r.shift_product_reversed))
    }));
}

fn coherent_checks(q: f64, out: &mut Vec<Check>) {
    let dim = MOMENT_DIM as f64;
    for fill in [0.2, 0.5] {
        out.push(Check::new(
            "coherent_eigenvalue",
            "e31",
            &[("q", q), ("fill", fill), ("theta", FRAC_PI_3), ("dim", dim)],
            1e-9,
            move || {
                let l = label(fill, FRAC_PI_3, q)?;
                let t = BasisTruncation::new(MOMENT_DIM)?;
                let s = coherent_coefficients(&l, t)?;
                let b = build_operator(OperatorLabel::B, t, l.q()).matrix;
                Ok(eigen_residual(&b, &s.coefficients, l.mu(), t.interior()))
            },
        ));
        out.push(Check::new(
            "coherent_closed_form",
            "e33",
            &[("q", q), ("fill", fill), ("theta", FRAC_PI_3), ("terms", dim)],
            1e-10,
            move || {
                let l = label(fill, FRAC_PI_3, q)?;
                max_of(sample_angles(5).into_iter().map(|phi| {
                    let p = CirclePoint::new(phi, *l.q());
                    let closed = coherent_function(&l, &p)?;
                    let series = coherent_expansion(&l, &p, MOMENT_DIM)?.value;
                    Ok((closed - series).norm())
                }))
            },
        ));
    }
    out.push(Check::new(
        "coherent_overlap",
        "e34",
        &[("q", q), ("fill_mu", 0.2), ("theta_mu", 0.3), ("fill_nu", 0.5), ("theta_nu", -1.0)],
        1e-9,
        move || {
            let mu = label(0.2, 0.3, q)?;
            let nu = label(0.5, -1.0, q)?;
            let exact = coherent_overlap(&nu, &mu)?;
            let numeric = coherent_overlap_quadrature(&nu, &mu, CIRCLE_NODES)?;
            Ok((exact - numeric).norm())
        },
    ));
    out.push(Check::new("resolution_of_unity", "e35", &[("q", q), ("n_max", 20.0)], 1e-10, move || {
        max_of((0..=20).map(|n| resolution_of_unity_check(n, &qp(q))))
    }));
    out.push(Check::new("resolution_measure", "e36", &[("q", q), ("n_max", 20.0)], 1e-10, move || {
        let h = qp(q);
        let pol = TruncationPolicy::default();
        max_of((0..=20).map(|n| {
            let jackson = resolution_moment(n, &h, &pol)?.re();
            let lattice = resolution_moment_simplified(n, &h, &pol)?;
            Ok((jackson - lattice).abs() / lattice)
        }))
    }));
}

fn phase_checks(q: f64, out: &mut Vec<Check>) {
    let dim = ALGEBRA_DIM as f64;
    for (id, eq, kind) in [
        ("cosine_completeness", "e41", PhaseKind::Cosine),
        ("sine_completeness", "e45", PhaseKind::Sine),
    ] {
        out.push(Check::new(
            id,
            eq,
            &[("q", q), ("dim", dim), ("beta", 0.3), ("phi", -1.2)],
            1e-12,
            move || Ok(phase_completeness_check(kind, BasisTruncation::new(ALGEBRA_DIM)?, 0.3, -1.2, &qp(q))),
        ));
    }
}

/// Checks that do not depend on the q list.
fn fixed_checks(out: &mut Vec<Check>) {
    let dim = ALGEBRA_DIM as f64;
    out.push(Check::new(
        "heisenberg_weyl_limit",
        "e30",
        &[("q", NEAR_ONE_Q), ("dim", dim)],
        1e-6,
        || {
            let t = BasisTruncation::new(ALGEBRA_DIM)?;
            let h = qp(NEAR_ONE_Q);
            let b = build_operator(OperatorLabel::B, t, &h).matrix;
            let bd = build_operator(OperatorLabel::Bdag, t, &h).matrix;
            let k = t.interior();
            Ok(identity_gap(&(&b * &bd - &bd * &b).view((0, 0), (k, k)).into_owned()))
        },
    ));
    let phase = [
        (PhaseKind::Cosine, "cosine", ["e38", "e39", "e40"], [0.4, 1.0, 2.5], 1.0),
        (PhaseKind::Sine, "sine", ["e42", "e43", "e44"], [-1.0, 0.2, 1.2], 0.5),
    ];
    for (kind, name, eqs, gammas, probe) in phase {
        let (eig_id, end_id, smear_id) = match name {
            "cosine" => ("cosine_eigenvalue", "cosine_endpoints", "cosine_smearing"),
            _ => ("sine_eigenvalue", "sine_endpoints", "sine_smearing"),
        };
        for gamma in gammas {
            out.push(Check::new(eig_id, eqs[0], &[("gamma", gamma), ("dim", dim)], 1e-10, move || {
                let t = BasisTruncation::new(ALGEBRA_DIM)?;
                let h = qp(0.5);
                let (op, eigen) = match kind {
                    PhaseKind::Cosine => (OperatorLabel::C, gamma.cos()),
                    PhaseKind::Sine => (OperatorLabel::S, gamma.sin()),
                };
                let m = build_operator(op, t, &h).matrix;
                let v = phase_state_coefficients(&PhaseLabel::new(gamma, kind)?, t);
                Ok(eigen_residual(&m, &v, Complex64::new(eigen, 0.0), t.interior()))
            }));
        }
        out.push(Check::new(end_id, eqs[1], &[("dim", dim)], 1e-12, move || {
            let t = BasisTruncation::new(ALGEBRA_DIM)?;
            let (a, b) = kind.interval();
            let mut gap = 0.0f64;
            for g in [a, b] {
                let v = phase_state_coefficients(&PhaseLabel::new(g, kind)?, t);
                gap = gap.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
            Ok(gap)
        }));
        out.push(Check::new(
            smear_id,
            eqs[2],
            &[("gamma", probe), ("dim", SMEARING_DIM as f64)],
            1e-3,
            move || {
                let t = BasisTruncation::new(SMEARING_DIM)?;
                let f = |g: f64| (2.0 * g).sin();
                Ok((phase_smearing(kind, probe, t, f) - f(probe)).abs())
            },
        ));
    }
    out.push(Check::new(
        "asymptotic_mean_cosine",
        "e46",
        &[("q", ASYMPTOTIC_Q), ("fill", 0.5), ("theta", FRAC_PI_3)],
        0.05,
        || {
            let m = moments_closed_form(&label(0.5, FRAC_PI_3, ASYMPTOTIC_Q)?)?;
            Ok((m.mean_c - FRAC_PI_3.cos()).abs())
        },
    ));
    out.push(Check::new(
        "asymptotic_symmetric_uncertainty",
        "e50",
        &[("q", ASYMPTOTIC_Q), ("fill", 0.5), ("theta", FRAC_PI_3)],
        0.02,
        || Ok((uncertainty_symmetric(&label(0.5, FRAC_PI_3, ASYMPTOTIC_Q)?)? - 0.25).abs()),
    ));
}

fn uncertainty_checks(q: f64, out: &mut Vec<Check>) {
    const THETAS: [f64; 3] = [FRAC_PI_3, -0.8, 2.2];
    for fill in FILLS {
        let base = [("q", q), ("fill", fill), ("theta", FRAC_PI_3)];
        out.push(Check::new(
            "mean_values_two_routes",
            "e46",
            &[("q", q), ("fill", fill), ("theta", FRAC_PI_3), ("dim", MOMENT_DIM as f64)],
            1e-8,
            move || {
                let l = label(fill, FRAC_PI_3, q)?;
                let closed = moments_closed_form(&l)?;
                let matrix = moments_matrix_route(&l, BasisTruncation::new(MOMENT_DIM)?)?;
                Ok(closed.max_gap(&matrix))
            },
        ));
        out.push(Check::new("cosine_sine_uncertainty", "e47", &base, 1e-12, move || {
            let u = uncertainty_cs(&label(fill, FRAC_PI_3, q)?)?;
            Ok((u.bound - u.value).max(0.0))
        }));
        out.push(Check::new("cosine_sine_reduced_form", "e47", &base, 1e-10, move || {
            let l = label(fill, FRAC_PI_3, q)?;
            let reduced = uncertainty_cs(&l)?.value;
            Ok((reduced - uncertainty_cs_from_moments(&moments_closed_form(&l)?)).abs())
        }));
        out.push(Check::new("number_cosine_uncertainty", "e48", &base, 1e-12, move || {
            let m = moments_closed_form(&label(fill, FRAC_PI_3, q)?)?;
            let lhs = m.variance_n() * m.variance_c() - m.covariance_nc().powi(2);
            Ok((0.25 * m.mean_s * m.mean_s - lhs).max(0.0))
        }));
        out.push(Check::new("number_sine_uncertainty", "e49", &base, 1e-12, move || {
            let m = moments_closed_form(&label(fill, FRAC_PI_3, q)?)?;
            let lhs = m.variance_n() * m.variance_s() - m.covariance_ns().powi(2);
            Ok((0.25 * m.mean_c * m.mean_c - lhs).max(0.0))
        }));
        out.push(Check::new("symmetric_uncertainty", "e50", &base, 1e-12, move || {
            Ok((0.25 - uncertainty_symmetric(&label(fill, FRAC_PI_3, q)?)?).max(0.0))
        }));
        out.push(Check::new(
            "uncertainty_phase_invariance",
            "e50",
            &[("q", q), ("fill", fill), ("thetas", THETAS.len() as f64)],
            1e-10,
            move || {
                let mut sym = Vec::new();
                let mut cs = Vec::new();
                for theta in THETAS {
                    let l = label(fill, theta, q)?;
                    sym.push(uncertainty_symmetric(&l)?);
                    cs.push(uncertainty_cs(&l)?.value);
                }
                let spread = |v: &[f64]| {
                    let hi = v.iter().copied().fold(f64::MIN, f64::max);
                    let lo = v.iter().copied().fold(f64::MAX, f64::min);
                    (hi - lo) / hi.abs().max(1e-300)
                };
                Ok(spread(&sym).max(spread(&cs)))
            },
        ));
    }
}

/// The full catalog in report order: per-q blocks first, then fixed checks.
pub fn catalog(suite: &Suite) -> Vec<Check> {
    let mut out = Vec::new();
    for &q in &suite.q_list {
        polynomial_checks(q, suite.max_degree, &mut out);
        function_checks(q, suite.max_degree, &mut out);
        algebra_checks(q, &mut out);
        coherent_checks(q, &mut out);
        phase_checks(q, &mut out);
        uncertainty_checks(q, &mut out);
    }
    fixed_checks(&mut out);
    if let Some(tol) = suite.tol_override {
        for c in &mut out {
            c.tol = tol;
        }
    }
    out.sort_by(|a, b| {
        eq_order(a.eq)
            .cmp(&eq_order(b.eq))
            .then_with(|| a.id.cmp(b.id))
            .then_with(|| param_order(&a.params, &b.params))
    });
    out
}

fn eq_order(tag: &str) -> u32 {
    tag.trim_start_matches('e').parse().unwrap_or(u32::MAX)
}

fn param_order(a: &Params, b: &Params) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|((ka, va), (kb, vb))| ka.cmp(kb).then_with(|| va.total_cmp(vb)))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Whether `key` names any check id or tag.
pub fn matches_any(key: &str) -> bool {
    catalog(&Suite {
        q_list: vec![0.5],
        ..Suite::default()
    })
    .iter()
    .any(|c| c.matches(key))
}

/// Runs the (optionally filtered) catalog on the current rayon pool.
pub fn run(suite: &Suite, only: Option<&str>) -> Report {
    let checks: Vec<Check> = catalog(suite)
        .into_iter()
        .filter(|c| only.is_none_or(|k| c.matches(k)))
        .collect();
    Report {
        records: checks.par_iter().map(Check::run).collect(),
    }
}
