//! Coherent states of the deformed lowering operator and cosine/sine phase
//! states, both as coefficient vectors over `Psi_n` and as functions on the
//! circle.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{periodic_nodes, QuadratureRule, DEFAULT_LEGENDRE_NODES};
use crate::operators::BasisTruncation;
use crate::qcalc::{
    jackson_q_integral, jackson_upper, one_minus_q_pow, q_exponential, q_exponential_complex,
    q_factorial, q_number, q_pochhammer_infinite, QParameter, SeriesValue,
    TruncationPolicy,
};
use crate::rsfunctions::{rs_functions_all, weight};
use crate::theta::CirclePoint;

/// Tail mass above which a truncated coherent state is rejected.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;

/// Largest degree accepted by the resolution-of-unity check.
pub const RESOLUTION_MAX_DEGREE: u32 = 60;

/// Coherent-state label `mu = |mu| e^(i theta)` inside `(1 - q)|mu|^2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    mu_abs: f64,
    theta: f64,
    q: QParameter,
}

impl CoherentLabel {
    pub fn new(mu_abs: f64, theta: f64, q: QParameter) -> Result<Self> {
        if !(mu_abs >= 0.0 && mu_abs.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coherent label needs finite |mu| >= 0, got |mu| = {mu_abs}, theta = {theta}"
            )));
        }
        let x = one_minus_q_pow(q.value(), 1.0) * mu_abs * mu_abs;
        if x >= 1.0 {
            return Err(Error::domain(
                "coherent label",
                format!("(1-q)|mu|^2 = {x} must be below 1"),
            ));
        }
        Ok(CoherentLabel { mu_abs, theta, q })
    }

    pub fn from_complex(mu: Complex64, q: QParameter) -> Result<Self> {
        Self::new(mu.norm(), mu.arg(), q)
    }

    pub fn mu(&self) -> Complex64 {
        Complex64::from_polar(self.mu_abs, self.theta)
    }

    pub fn mu_abs(&self) -> f64 {
        self.mu_abs
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn q(&self) -> &QParameter {
        &self.q
    }

    /// The argument `(1 - q)|mu|^2` of the normalizing q-exponential.
    pub fn argument(&self) -> f64 {
        one_minus_q_pow(self.q.value(), 1.0) * self.mu_abs * self.mu_abs
    }

    /// `e_q((1 - q)|mu|^2) = sum_n |mu|^2n / [n]_q!`.
    pub fn normalizer(&self) -> Result<f64> {
        Ok(q_exponential(self.argument(), &self.q, &TruncationPolicy::default())?.re())
    }
}

/// Coefficients of a state over `Psi_0, ..., Psi_(n_max-1)` and the
/// probability mass that falls outside the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub coefficients: DVector<Complex64>,
    pub tail_mass: f64,
}

impl StateVector {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Excitation probabilities `|C_n|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Coherent coefficients `C_n = e_q^(-1/2) mu^n / sqrt([n]!)` regardless of
/// how much mass the truncation drops.
pub fn coherent_coefficients_truncated(label: &CoherentLabel, trunc: BasisTruncation) -> Result<StateVector> {
    let q = label.q();
    let mu = label.mu();
    let mut c = Complex64::new(label.normalizer()?.powf(-0.5), 0.0);
    let mut coefficients = DVector::zeros(trunc.n_max());
    for n in 0..trunc.n_max() {
        coefficients[n] = c;
        c *= mu / q_number(n as u32 + 1, q).sqrt();
    }

    // the squared ratio of successive terms decreases to (1-q)|mu|^2 < 1
    let mut tail = 0.0;
    let mut term = c.norm_sqr();
    let mu2 = label.mu_abs() * label.mu_abs();
    let mut n = trunc.n_max();
    for _ in 0..TruncationPolicy::default().max_terms {
        tail += term;
        let ratio = mu2 / q_number(n as u32 + 1, q);
        term *= ratio;
        n += 1;
        if ratio < 1.0 && (term * ratio / (1.0 - ratio) <= 1e-15 * tail || term < 1e-300) {
            break;
        }
    }
    Ok(StateVector {
        coefficients,
        tail_mass: tail,
    })
}

/// Coherent coefficients, rejected when more than `TAIL_MASS_LIMIT` is lost.
pub fn coherent_coefficients(label: &CoherentLabel, trunc: BasisTruncation) -> Result<StateVector> {
    let state = coherent_coefficients_truncated(label, trunc)?;
    if state.tail_mass > TAIL_MASS_LIMIT {
        return Err(Error::Truncation {
            tail_mass: state.tail_mass,
        });
    }
    Ok(state)
}

/// Closed form of the coherent state on the circle,
/// `e_q^(-1/2) M(z) / (sqrt(2 pi) (w; q)_inf (w z; q)_inf)` with `w = sqrt(q(1-q)) mu`.
pub fn coherent_function(label: &CoherentLabel, p: &CirclePoint) -> Result<Complex64> {
    let q = label.q();
    let w = label.mu() * (q.value() * one_minus_q_pow(q.value(), 1.0)).sqrt();
    let wz = w * p.z();
    if w.norm() >= 1.0 || wz.norm() >= 1.0 {
        return Err(Error::domain(
            "coherent function",
            format!("|w| = {}, |wz| = {} must both be below 1", w.norm(), wz.norm()),
        ));
    }
    let pol = TruncationPolicy::default();
    let denom = q_pochhammer_infinite(w, q, &pol)?.value * q_pochhammer_infinite(wz, q, &pol)?.value;
    Ok(weight(p).weight * label.normalizer()?.powf(-0.5) / (denom * (2.0 * PI).sqrt()))
}

/// The expansion `sum_n C_n Psi_n` truncated after `n_terms` terms; the
/// bound extrapolates the last term geometrically.
pub fn coherent_expansion(label: &CoherentLabel, p: &CirclePoint, n_terms: usize) -> Result<SeriesValue> {
    let trunc = BasisTruncation::new(n_terms.max(2))?;
    let state = coherent_coefficients_truncated(label, trunc)?;
    let psi = rs_functions_all(trunc.n_max(), p);
    let terms: Vec<Complex64> = state.coefficients.iter().zip(&psi).map(|(c, f)| c * f).collect();
    let value = terms.iter().sum();
    let last = terms.last().map_or(0.0, |t| t.norm());
    let prev = terms[terms.len() - 2].norm();
    let ratio = if prev > 0.0 { last / prev } else { 0.0 };
    let error_bound = if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue {
        value,
        error_bound,
        terms: terms.len(),
        q_near_one: label.q().near_one(),
    })
}

/// `<nu|mu> = e_q((1-q) conj(nu) mu) / sqrt(e_q((1-q)|mu|^2) e_q((1-q)|nu|^2))`.
pub fn coherent_overlap(nu: &CoherentLabel, mu: &CoherentLabel) -> Result<Complex64> {
    if nu.q() != mu.q() {
        return Err(Error::InvalidParameter("labels with different q".into()));
    }
    let q = mu.q();
    let x = nu.mu().conj() * mu.mu() * one_minus_q_pow(q.value(), 1.0);
    let cross = q_exponential_complex(x, q, &TruncationPolicy::default())?.value;
    Ok(cross / (nu.normalizer()? * mu.normalizer()?).sqrt())
}

/// The overlap integral `int conj(F_nu) F_mu dphi` by the periodic trapezoid.
pub fn coherent_overlap_quadrature(nu: &CoherentLabel, mu: &CoherentLabel, nodes: usize) -> Result<Complex64> {
    let (xs, ws) = periodic_nodes(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for (phi, w) in xs.iter().zip(&ws) {
        let p = CirclePoint::new(*phi, *mu.q());
        acc += coherent_function(nu, &p)?.conj() * coherent_function(mu, &p)? * *w;
    }
    Ok(acc)
}

fn check_degree(n: u32) -> Result<()> {
    if n > RESOLUTION_MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "resolution-of-unity degree {n} exceeds {RESOLUTION_MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Radial moment `int |mu|^2n / e_q((1-q) q |mu|^2) d_q|mu|^2` over
/// `[0, 1/(1-q)]` as a Jackson integral.
pub fn resolution_moment(n: u32, q: &QParameter, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_degree(n)?;
    let shrink = one_minus_q_pow(q.value(), 1.0) * q.value();
    jackson_q_integral(
        |x| {
            // the argument reaches q^(k+1) < 1 on every lattice node
            let e = q_exponential(shrink * x, q, policy).map_or(f64::NAN, |v| v.re());
            x.powi(n as i32) / e
        },
        jackson_upper(q),
        q,
        policy,
    )
}

/// The same moment from `1 / e_q(q^(k+1)) = (q;q)_inf / (q;q)_k` on the lattice.
pub fn resolution_moment_simplified(n: u32, q: &QParameter, policy: &TruncationPolicy) -> Result<f64> {
    check_degree(n)?;
    let qv = q.value();
    let qq_inf = q_pochhammer_infinite(Complex64::new(qv, 0.0), q, policy)?.re();
    let step = qv.powi(n as i32 + 1);
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..policy.max_terms {
        sum += term;
        term *= step / one_minus_q_pow(qv, k as f64 + 1.0);
        if policy.negligible(term, sum) {
            return Ok(qq_inf * sum / one_minus_q_pow(qv, 1.0).powi(n as i32));
        }
    }
    Err(Error::NonConvergence {
        what: "simplified resolution moment",
        terms: policy.max_terms,
    })
}

/// Relative deviation of the radial moment from `[n]_q!`.
pub fn resolution_of_unity_check(n: u32, q: &QParameter) -> Result<f64> {
    let policy = TruncationPolicy::default();
    let value = resolution_moment(n, q, &policy)?.re();
    let expect = q_factorial(n, q);
    Ok((value - expect).abs() / expect)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Cosine,
    Sine,
}

impl PhaseKind {
    /// Range of the phase label.
    pub fn interval(&self) -> (f64, f64) {
        match self {
            PhaseKind::Cosine => (0.0, PI),
            PhaseKind::Sine => (-FRAC_PI_2, FRAC_PI_2),
        }
    }

    /// `sqrt(2/pi) sin((n+1) t)` times the phase factor of the kind, with
    /// `t` the label shifted onto `[0, pi]` or `[-pi, 0]`.
    fn coefficient(&self, n: usize, gamma: f64) -> Complex64 {
        let norm = (2.0 / PI).sqrt();
        let k = (n + 1) as f64;
        match self {
            PhaseKind::Cosine => Complex64::new(norm * (k * gamma).sin(), 0.0),
            PhaseKind::Sine => {
                let phase = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, k * FRAC_PI_2);
                phase * norm * (k * (gamma - FRAC_PI_2)).sin()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    gamma: f64,
    kind: PhaseKind,
}

impl PhaseLabel {
    pub fn new(gamma: f64, kind: PhaseKind) -> Result<Self> {
        let (a, b) = kind.interval();
        if !(a..=b).contains(&gamma) {
            return Err(Error::domain(
                "phase label",
                format!("gamma = {gamma} outside [{a}, {b}]"),
            ));
        }
        Ok(PhaseLabel { gamma, kind })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kind(&self) -> PhaseKind {
        self.kind
    }
}

/// Coefficients of the phase eigenstate. These states are not normalizable,
/// so no tail mass is attached.
pub fn phase_state_coefficients(label: &PhaseLabel, trunc: BasisTruncation) -> DVector<Complex64> {
    DVector::from_fn(trunc.n_max(), |n, _| label.kind.coefficient(n, label.gamma))
}

/// The truncated phase state `sum_n c_n Psi_n` at a circle point.
pub fn phase_state_function(label: &PhaseLabel, trunc: BasisTruncation, p: &CirclePoint) -> Complex64 {
    let c = phase_state_coefficients(label, trunc);
    rs_functions_all(trunc.n_max(), p)
        .iter()
        .zip(c.iter())
        .map(|(f, c)| c * f)
        .sum()
}

fn phase_rule(kind: PhaseKind, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = kind.interval();
    // keep roughly a dozen oscillations per panel at the top frequency
    let panels = (n_max / 10).max(4);
    QuadratureRule::GaussLegendre {
        nodes: DEFAULT_LEGENDRE_NODES,
        panels,
        lower: a,
        upper: b,
    }
    .nodes_and_weights()
}

/// `G_mn = int conj(c_m(gamma)) c_n(gamma) dgamma` over the label interval.
pub fn phase_gram(kind: PhaseKind, trunc: BasisTruncation) -> DMatrix<Complex64> {
    let n = trunc.n_max();
    let (xs, ws) = phase_rule(kind, n);
    let mut g = DMatrix::zeros(n, n);
    for (gamma, w) in xs.iter().zip(&ws) {
        let c: Vec<Complex64> = (0..n).map(|k| kind.coefficient(k, *gamma)).collect();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += c[i].conj() * c[j] * *w;
            }
        }
    }
    g
}

/// Completeness of the phase states: integrating `conj(X(beta)) X(phi)`
/// over the label should give `sum_n conj(Psi_n(beta)) Psi_n(phi)`. The
/// residual is the larger of the coefficient-level gap `max|G - 1|` and the
/// gap between the two function values.
pub fn phase_completeness_check(
    kind: PhaseKind,
    trunc: BasisTruncation,
    beta: f64,
    phi: f64,
    q: &QParameter,
) -> f64 {
    let n = trunc.n_max();
    let g = phase_gram(kind, trunc);
    let coeff_gap = (&g - DMatrix::identity(n, n))
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let pb = DVector::from_vec(rs_functions_all(n, &CirclePoint::new(beta, *q)));
    let pp = DVector::from_vec(rs_functions_all(n, &CirclePoint::new(phi, *q)));
    let integrated = (pb.adjoint() * &g * &pp)[(0, 0)];
    let direct = pb.dotc(&pp);
    coeff_gap.max((integrated - direct).norm())
}

/// Truncated delta kernel `sum_n conj(c_n(g1)) c_n(g2)`, which reduces to
/// `(2/pi) sum sin((n+1) t1) sin((n+1) t2)`.
pub fn phase_orthogonality_kernel(kind: PhaseKind, gamma1: f64, gamma2: f64, trunc: BasisTruncation) -> f64 {
    (0..trunc.n_max())
        .map(|n| (kind.coefficient(n, gamma1).conj() * kind.coefficient(n, gamma2)).re)
        .sum()
}

/// `int D(gamma, g) f(g) dg` over the label interval.
pub fn phase_smearing<F>(kind: PhaseKind, gamma: f64, trunc: BasisTruncation, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let (xs, ws) = phase_rule(kind, trunc.n_max());
    xs.iter()
        .zip(&ws)
        .map(|(g, w)| phase_orthogonality_kernel(kind, gamma, *g, trunc) * f(*g) * w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_operator, OperatorLabel};

    fn q(v: f64) -> QParameter {
        QParameter::new(v).unwrap()
    }

    fn trunc(n: usize) -> BasisTruncation {
        BasisTruncation::new(n).unwrap()
    }

    #[test]
    fn label_domain() {
        assert!(CoherentLabel::new(3.0, 0.0, q(0.8)).is_err());
        assert!(CoherentLabel::new(3.0, 0.0, q(0.9)).is_ok());
        assert!(CoherentLabel::new(-1.0, 0.0, q(0.8)).is_err());
    }

    #[test]
    fn vacuum_coefficients() {
        let s = coherent_coefficients(&CoherentLabel::new(0.0, 0.3, q(0.5)).unwrap(), trunc(10)).unwrap();
        assert_eq!(s.coefficients[0], Complex64::new(1.0, 0.0));
        assert!(s.coefficients.iter().skip(1).all(|c| c.norm() == 0.0));
        assert_eq!(s.tail_mass, 0.0);
    }

    #[test]
    fn coefficients_normalized() {
        let label = CoherentLabel::new(2f64.sqrt(), 0.4, q(0.8)).unwrap();
        let s = coherent_coefficients(&label, trunc(200)).unwrap();
        let total: f64 = s.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let short = coherent_coefficients_truncated(&label, trunc(5)).unwrap();
        let kept: f64 = short.probabilities().iter().sum();
        assert!((kept + short.tail_mass - 1.0).abs() < 1e-12);
        assert!(matches!(
            coherent_coefficients(&label, trunc(5)),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn coherent_state_is_lowering_eigenvector() {
        let label = CoherentLabel::new(1.3, 1.1, q(0.7)).unwrap();
        let t = trunc(120);
        let v = coherent_coefficients(&label, t).unwrap().coefficients;
        let b = build_operator(OperatorLabel::B, t, label.q()).matrix;
        let r = (&b * &v - &v * label.mu()).rows(0, t.interior()).norm() / v.norm();
        assert!(r < 1e-9);
    }

    #[test]
    fn closed_form_matches_expansion() {
        let label = CoherentLabel::new(1.2, 0.0, q(0.8)).unwrap();
        let p = CirclePoint::new(0.5, q(0.8));
        let closed = coherent_function(&label, &p).unwrap();
        let series = coherent_expansion(&label, &p, 120).unwrap();
        assert!((closed - series.value).norm() < 1e-10);
        let vac = CoherentLabel::new(0.0, 0.0, q(0.8)).unwrap();
        let psi0 = rs_functions_all(1, &p)[0];
        assert!((coherent_function(&vac, &p).unwrap() - psi0).norm() < 1e-15);
    }

    #[test]
    fn overlap_forms_agree() {
        let h = q(0.6);
        let mu = CoherentLabel::new(1.1, 0.4, h).unwrap();
        let nu = CoherentLabel::new(0.7, -2.0, h).unwrap();
        assert!((coherent_overlap(&mu, &mu).unwrap() - 1.0).norm() < 1e-14);
        let closed = coherent_overlap(&nu, &mu).unwrap();
        let quad = coherent_overlap_quadrature(&nu, &mu, 2048).unwrap();
        assert!((closed - quad).norm() < 1e-9, "{closed} {quad}");
        assert!((coherent_overlap_quadrature(&mu, &mu, 2048).unwrap() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn resolution_moments() {
        assert!(resolution_of_unity_check(0, &q(0.5)).unwrap() < 1e-14);
        let pol = TruncationPolicy::default();
        assert!((resolution_moment(3, &q(0.5), &pol).unwrap().re() - 2.625).abs() < 1e-12);
        for v in [0.3, 0.6, 0.9] {
            for n in 0..=20 {
                assert!(resolution_of_unity_check(n, &q(v)).unwrap() < 1e-10, "q={v} n={n}");
                let a = resolution_moment(n, &q(v), &pol).unwrap().re();
                let b = resolution_moment_simplified(n, &q(v), &pol).unwrap();
                assert!((a - b).abs() < 1e-11 * b);
            }
        }
        assert!(resolution_of_unity_check(61, &q(0.5)).is_err());
    }

    #[test]
    fn phase_eigenvectors() {
        let h = q(0.5);
        let t = trunc(40);
        let c = build_operator(OperatorLabel::C, t, &h).matrix;
        let s = build_operator(OperatorLabel::S, t, &h).matrix;
        for gamma in [0.3, 1.0, 2.5] {
            let v = phase_state_coefficients(&PhaseLabel::new(gamma, PhaseKind::Cosine).unwrap(), t);
            let r = (&c * &v - &v * Complex64::new(gamma.cos(), 0.0)).rows(0, t.interior()).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(r < 1e-10);
        }
        for gamma in [-1.2, 0.2, 1.4] {
            let v = phase_state_coefficients(&PhaseLabel::new(gamma, PhaseKind::Sine).unwrap(), t);
            let r = (&s * &v - &v * Complex64::new(gamma.sin(), 0.0)).rows(0, t.interior()).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(r < 1e-10);
        }
        let edge = phase_state_coefficients(&PhaseLabel::new(0.0, PhaseKind::Cosine).unwrap(), t);
        assert!(edge.iter().all(|v| v.norm() == 0.0));
        assert!(PhaseLabel::new(2.0, PhaseKind::Sine).is_err());
    }

    #[test]
    fn phase_completeness() {
        let h = q(0.5);
        for kind in [PhaseKind::Cosine, PhaseKind::Sine] {
            assert!(phase_completeness_check(kind, trunc(21), 0.4, -1.3, &h) < 1e-12);
        }
    }

    #[test]
    fn dirichlet_smearing() {
        let t = trunc(200);
        let v = phase_smearing(PhaseKind::Cosine, 1.0, t, |g| (2.0 * g).sin());
        assert!((v - 2f64.sin()).abs() < 1e-3);
        let a = phase_orthogonality_kernel(PhaseKind::Cosine, 0.7, 1.9, t);
        let b = phase_orthogonality_kernel(PhaseKind::Cosine, 1.9, 0.7, t);
        assert!((a - b).abs() < 1e-12);
        let d1 = phase_orthogonality_kernel(PhaseKind::Cosine, 1.0, 1.0, trunc(100));
        let d2 = phase_orthogonality_kernel(PhaseKind::Cosine, 1.0, 1.0, trunc(200));
        assert!((d2 / d1 - 2.0).abs() < 0.05);
    }
}
