//! Quadrature engines: periodic trapezoid on `[-pi, pi)`, composite
//! Gauss-Legendre on finite intervals and a Gauss-Hermite rule for integrals
//! over `(0, inf)` after the substitution `omega = exp(x / m^2)`.
//!
//! Every rule reports the difference against a rule with twice the nodes as
//! its error estimate and is refined at most [`MAX_REFINEMENTS`] times.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcalc::SeriesValue;

pub const MAX_REFINEMENTS: usize = 3;
pub const DEFAULT_PERIODIC_NODES: usize = 2048;
pub const DEFAULT_LEGENDRE_NODES: usize = 64;
pub const DEFAULT_LEGENDRE_PANELS: usize = 4;
pub const DEFAULT_HERMITE_NODES: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureRule {
    /// Equispaced nodes on `[-pi, pi)` for 2pi-periodic integrands.
    PeriodicTrapezoid { nodes: usize },
    /// `panels` equal subintervals of `[lower, upper]`, each with `nodes` Legendre nodes.
    GaussLegendre {
        nodes: usize,
        panels: usize,
        lower: f64,
        upper: f64,
    },
    /// Integrals over `omega in (0, inf)` mapped by `omega = exp(x / m^2)`,
    /// with Hermite nodes placed at `x = center + width * t`.
    ///
    /// The integrand is evaluated as given; no Gaussian factor is divided out.
    LogGaussian {
        nodes: usize,
        center: f64,
        width: f64,
        m: f64,
    },
}

impl QuadratureRule {
    pub fn periodic() -> Self {
        QuadratureRule::PeriodicTrapezoid {
            nodes: DEFAULT_PERIODIC_NODES,
        }
    }

    pub fn legendre(lower: f64, upper: f64) -> Self {
        QuadratureRule::GaussLegendre {
            nodes: DEFAULT_LEGENDRE_NODES,
            panels: DEFAULT_LEGENDRE_PANELS,
            lower,
            upper,
        }
    }

    pub fn log_gaussian(center: f64, width: f64, m: f64) -> Self {
        QuadratureRule::LogGaussian {
            nodes: DEFAULT_HERMITE_NODES,
            center,
            width,
            m,
        }
    }

    fn refined(&self) -> Self {
        match *self {
            QuadratureRule::PeriodicTrapezoid { nodes } => {
                QuadratureRule::PeriodicTrapezoid { nodes: 2 * nodes }
            }
            QuadratureRule::GaussLegendre {
                nodes,
                panels,
                lower,
                upper,
            } => QuadratureRule::GaussLegendre {
                nodes,
                panels: 2 * panels,
                lower,
                upper,
            },
            QuadratureRule::LogGaussian {
                nodes,
                center,
                width,
                m,
            } => QuadratureRule::LogGaussian {
                nodes: 2 * nodes,
                center,
                width,
                m,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            QuadratureRule::PeriodicTrapezoid { nodes } => nodes >= 2 && nodes % 2 == 0,
            QuadratureRule::GaussLegendre {
                nodes,
                panels,
                lower,
                upper,
            } => nodes >= 1 && panels >= 1 && lower.is_finite() && upper.is_finite(),
            QuadratureRule::LogGaussian {
                nodes,
                center,
                width,
                m,
            } => nodes >= 2 && center.is_finite() && width > 0.0 && m > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("quadrature rule {self:?}")))
        }
    }

    /// Nodes and weights of this rule in the integration variable.
    ///
    /// For [`QuadratureRule::LogGaussian`] the nodes are values of `omega`
    /// and the weights already include the Jacobian `d omega / dt`.
    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            QuadratureRule::PeriodicTrapezoid { nodes } => periodic_nodes(nodes),
            QuadratureRule::GaussLegendre {
                nodes,
                panels,
                lower,
                upper,
            } => composite_legendre(nodes, panels, lower, upper),
            QuadratureRule::LogGaussian {
                nodes,
                center,
                width,
                m,
            } => {
                let (t, w) = gauss_hermite_scaled(nodes);
                let m2 = m * m;
                let mut xs = Vec::with_capacity(nodes);
                let mut ws = Vec::with_capacity(nodes);
                for (ti, wi) in t.iter().zip(&w) {
                    let omega = ((center + width * ti) / m2).exp();
                    xs.push(omega);
                    ws.push(wi * width * omega / m2);
                }
                (xs, ws)
            }
        }
    }
}

fn apply<F>(f: &F, rule: &QuadratureRule) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (x, w) = rule.nodes_and_weights();
    x.iter().zip(&w).map(|(xi, wi)| f(*xi) * *wi).sum()
}

/// Integrates `f` with `rule`, refining until the doubling estimate is below `tol`.
pub fn integrate<F>(f: F, rule: QuadratureRule, tol: f64) -> Result<SeriesValue>
where
    F: Fn(f64) -> Complex64,
{
    rule.validate()?;
    let mut rule = rule;
    let mut estimate = f64::INFINITY;
    for _ in 0..=MAX_REFINEMENTS {
        let (coarse, fine, terms) = match rule {
            QuadratureRule::PeriodicTrapezoid { nodes } => {
                // the coarse sum reuses the even-indexed samples
                let h = 2.0 * PI / nodes as f64;
                let mut all = Complex64::new(0.0, 0.0);
                let mut even = Complex64::new(0.0, 0.0);
                for j in 0..nodes {
                    let v = f(-PI + h * j as f64);
                    all += v;
                    if j % 2 == 0 {
                        even += v;
                    }
                }
                (even * (2.0 * h), all * h, nodes)
            }
            _ => {
                let finer = rule.refined();
                let terms = match finer {
                    QuadratureRule::GaussLegendre { nodes, panels, .. } => nodes * panels,
                    QuadratureRule::LogGaussian { nodes, .. } => nodes,
                    _ => unreachable!(),
                };
                (apply(&f, &rule), apply(&f, &finer), terms)
            }
        };
        estimate = (fine - coarse).norm();
        if estimate <= tol {
            return Ok(SeriesValue {
                value: fine,
                error_bound: estimate,
                terms,
                q_near_one: false,
            });
        }
        rule = rule.refined();
    }
    Err(Error::QuadratureFailure { estimate, tol })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, rule: QuadratureRule, tol: f64) -> Result<SeriesValue>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), rule, tol)
}

/// Equispaced nodes `-pi + 2 pi j / n` with equal weights `2 pi / n`.
pub fn periodic_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|j| -PI + h * j as f64).collect(), vec![h; n])
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

fn composite_legendre(nodes: usize, panels: usize, lower: f64, upper: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(nodes);
    let h = (upper - lower) / panels as f64;
    let mut xs = Vec::with_capacity(nodes * panels);
    let mut ws = Vec::with_capacity(nodes * panels);
    for p in 0..panels {
        let a = lower + h * p as f64;
        for (ti, wi) in t.iter().zip(&w) {
            xs.push(a + 0.5 * h * (ti + 1.0));
            ws.push(0.5 * h * wi);
        }
    }
    (xs, ws)
}

/// Hermite nodes for the weight `exp(-t^2)` together with the scaled
/// weights `w_i exp(t_i^2)`, which stay representable for large `n`.
///
/// Tables are cached per node count.
pub fn gauss_hermite_scaled(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("hermite cache").get(&n) {
        return (t.0.clone(), t.1.clone());
    }
    let table = Arc::new(build_hermite(n));
    cache.lock().expect("hermite cache").insert(n, table.clone());
    (table.0.clone(), table.1.clone())
}

/// Returns `(psi_n(t), sqrt(2n) psi_(n-1)(t))` for the normalized Hermite
/// functions `psi_j`, i.e. orthonormal polynomials times `exp(-t^2 / 2)`.
fn hermite_functions(n: usize, t: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * t * t).exp();
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = t * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

fn build_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    // eigenvalues of the Jacobi matrix seed a Newton polish
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut weights = Vec::with_capacity(n);
    for t in nodes.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = hermite_functions(n, *t);
            if dp == 0.0 {
                break;
            }
            *t -= p / dp;
        }
        let (_, dp) = hermite_functions(n, *t);
        weights.push(2.0 / (dp * dp));
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let t = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::QParameter;
    use crate::theta::theta3;

    #[test]
    fn trapezoid_integrates_cosine_to_zero() {
        let v = integrate_real(f64::cos, QuadratureRule::periodic(), 1e-12).unwrap();
        assert!(v.value.norm() < 1e-14);
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let n = 64;
        let rule = QuadratureRule::PeriodicTrapezoid { nodes: n };
        for k in 1..(n / 2) as i32 {
            let v = integrate(|x| Complex64::from_polar(1.0, k as f64 * x), rule, f64::INFINITY).unwrap();
            // mean value over the period
            assert!(v.value.norm() / (2.0 * PI) < 1e-14, "k = {k}");
        }
        let c = integrate_real(|_| 1.0, rule, 1e-12).unwrap();
        assert!((c.re() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_integrates_measure() {
        let pol = Default::default();
        let v = integrate_real(
            |x| theta3(x / 2.0, 0.5, &pol).unwrap().re() / (2.0 * PI),
            QuadratureRule::periodic(),
            1e-12,
        )
        .unwrap();
        assert!((v.re() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn doubling_estimate_bounds_error() {
        // smooth periodic integrand with known mean: exp(cos x) has integral 2 pi I0(1)
        let exact = 2.0 * PI * 1.266_065_877_752_008_4;
        for nodes in [8, 12, 16] {
            let rule = QuadratureRule::PeriodicTrapezoid { nodes };
            let v = integrate_real(|x| x.cos().exp(), rule, f64::INFINITY).unwrap();
            assert!((v.re() - exact).abs() <= v.error_bound + 1e-15);
        }
    }

    #[test]
    fn refinement_failure_is_reported() {
        let rule = QuadratureRule::PeriodicTrapezoid { nodes: 4 };
        let err = integrate_real(|x| (40.0 * x.cos()).exp(), rule, 1e-30).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn legendre_rules() {
        let (x, w) = gauss_legendre(64);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for degree <= 127
        let s: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(126) * b).sum();
        assert!((s - 2.0 / 127.0).abs() < 1e-14);
        let v = integrate_real(f64::sin, QuadratureRule::legendre(0.0, PI), 1e-13).unwrap();
        assert!((v.re() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_rules() {
        let (t, w) = gauss_hermite_scaled(80);
        let mass: f64 = t.iter().zip(&w).map(|(ti, wi)| wi * (-ti * ti).exp()).sum();
        assert!((mass - PI.sqrt()).abs() < 1e-13);
        let second: f64 = t.iter().zip(&w).map(|(ti, wi)| wi * ti * ti * (-ti * ti).exp()).sum();
        assert!((second - PI.sqrt() / 2.0).abs() < 1e-13);
        let (t, w) = gauss_hermite_scaled(640);
        assert!(w.iter().all(|v| v.is_finite() && *v > 0.0));
        let mass: f64 = t.iter().zip(&w).map(|(ti, wi)| wi * (-ti * ti).exp()).sum();
        assert!((mass - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_gaussian_kernel_has_unit_mass() {
        let q = QParameter::new(0.5).unwrap();
        let m = q.width();
        let r = 1.0;
        let kernel = |w: f64| {
            m / PI.sqrt() * w.powf(r - 1.5) * (-(r - 0.5f64).powi(2) / (4.0 * m * m) - m * m * w.ln().powi(2)).exp()
        };
        let rule = QuadratureRule::log_gaussian((r - 0.5) / 2.0, m, m);
        let v = integrate_real(kernel, rule, 1e-12).unwrap();
        assert!((v.re() - 1.0).abs() < 1e-13);
    }
}
