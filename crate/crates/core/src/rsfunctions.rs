//! Orthonormal functions `Psi_n = R_n * M` on the circle, the complex weight
//! `M` and its constituents, lattice scaling, q-derivative identities and the
//! bilinear kernel.
//!
//! Fractional powers of `z` are taken in the circle chart: on the sheet with
//! angle `phi` (not reduced mod 2pi) the square root is
//! `sqrt(z) = i q^(-1/4) e^(i phi / 2)`, and on the lattice point `q^k z` it is
//! `q^(k/2) sqrt(z)`. Angles that differ by 2pi give opposite square roots.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::periodic_nodes;
use crate::polynomials::{rs_normalized_all, rs_poly_normalized};
use crate::qcalc::{
    one_minus_q_pow, q_number, q_pochhammer_infinite, q_pochhammer_infinite_multi, QParameter,
    SeriesValue, TruncationPolicy,
};
use crate::theta::{theta1, theta3, CirclePoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The weight `M` together with the two theta-like constituents it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValue {
    pub weight: Complex64,
    pub f: Complex64,
    pub g: Complex64,
}

fn weight_scale(q: &QParameter) -> f64 {
    let pol = TruncationPolicy::default();
    theta3(0.0, q.sqrt(), &pol).expect("theta3 converges").re().powf(-1.5)
}

fn assemble(f: Complex64, g: Complex64, scale: f64) -> WeightValue {
    WeightValue {
        weight: (f * f + I * g * g) * scale,
        f,
        g,
    }
}

/// Weight on the sheet with (unreduced) angle `phi`, from theta functions at `phi / 4`.
pub fn weight_on_sheet(phi: f64, q: &QParameter) -> WeightValue {
    let pol = TruncationPolicy::default();
    let nome = q.sqrt();
    let f = theta3(phi / 4.0, nome, &pol).expect("theta3 converges").re();
    let g = theta1(phi / 4.0, nome, &pol).expect("theta1 converges").re();
    assemble(Complex64::new(f, 0.0), Complex64::new(g, 0.0), weight_scale(q))
}

/// Weight at a circle point; `M` coincides with the measure decomposition there.
pub fn weight(p: &CirclePoint) -> WeightValue {
    weight_on_sheet(p.phi(), p.q())
}

/// Square root of `z = -q^(-1/2) e^(i phi)` on the sheet `phi`.
pub fn sqrt_z(phi: f64, q: &QParameter) -> Complex64 {
    I * Complex64::from_polar(q.pow(-0.25), phi / 2.0)
}

/// Weight at the lattice point `q^k z(phi)` summed from the defining series,
/// without reference to any scaling identity.
pub fn weight_on_lattice(phi: f64, k: i32, q: &QParameter) -> WeightValue {
    let ln_q = q.ln();
    let kf = k as f64;
    // terms decay like q^((l + k/2)^2 / 2) around their peak
    let reach = ((2.0 * (1e-18f64).ln() / ln_q).sqrt()).ceil() as i64 + 2;
    let centre = -(k as i64) / 2;
    let mut f = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for l in (centre - reach - 1)..=(centre + reach + 1) {
        let lf = l as f64;
        f += Complex64::from_polar(((0.5 * lf * lf + 0.5 * kf * lf) * ln_q).exp(), lf * phi / 2.0);
        let s = lf + 0.5;
        g -= Complex64::from_polar(((0.5 * s * s + 0.5 * kf * s) * ln_q).exp(), s * (PI + phi / 2.0));
    }
    assemble(f, g, weight_scale(q))
}

/// Residuals of the six lattice scaling identities for the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingResiduals {
    pub even_f: f64,
    pub even_g: f64,
    pub even_weight: f64,
    pub odd_f: f64,
    pub odd_g: f64,
    pub odd_weight: f64,
}

impl ScalingResiduals {
    pub fn max(&self) -> f64 {
        [
            self.even_f,
            self.even_g,
            self.even_weight,
            self.odd_f,
            self.odd_g,
            self.odd_weight,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn relative_gap(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// `i^x = e^(i pi x / 2)` for real `x`.
fn i_pow(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x / 2.0)
}

/// Checks the scalings `z -> q^(2r) z` and `z -> q^(2r+1) z`.
///
/// Left sides come from the lattice series; right sides from theta functions
/// at the original point. Even case, on the sheet of `p`:
///
/// ```text
/// F(q^2r z) = i^r q^(-r(r+1/2)/2) z^(-r/2) F(z)
/// G(q^2r z) = (-i)^r q^(-r(r+1/2)/2) z^(-r/2) G(z)
/// M(q^2r z) = (-1)^r q^(-r(r+1/2)) z^(-r) M(z)
/// ```
///
/// Odd case, with the right side on the neighbouring sheet `phi + 2 pi`
/// (so `sqrt(z)` changes sign) and `z^x = sqrt(z)^(2x)`:
///
/// ```text
/// F(q^(2r+1) z) = -(-i)^(r+1/2) q^(-(r+1/2)(r+1)/2) z^(-(r+1/2)/2) G(z)
/// G(q^(2r+1) z) = -i^(r+1/2) q^(-(r+1/2)(r+1)/2) z^(-(r+1/2)/2) F(z)
/// M(q^(2r+1) z) = (-1)^(r+1) q^(-(r+1/2)(r+1)) z^(-(r+1/2)) M(z)
/// ```
pub fn scaling_relations_check(r: i32, p: &CirclePoint) -> ScalingResiduals {
    let q = p.q();
    let phi = p.phi();
    let rf = r as f64;

    let here = weight_on_sheet(phi, q);
    let root = sqrt_z(phi, q);
    let even = weight_on_lattice(phi, 2 * r, q);
    let half = q.pow(-0.5 * rf * (rf + 0.5));
    let root_pow = root.powi(-r);
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };

    let next = weight_on_sheet(phi + 2.0 * PI, q);
    let odd = weight_on_lattice(phi, 2 * r + 1, q);
    let h = rf + 0.5;
    // sqrt(z)^(-h) on the next sheet, with the chart's argument rather than the principal one
    let log_root = Complex64::new(-0.25 * q.ln(), (phi + 2.0 * PI) / 2.0 + PI / 2.0);
    let root_next_pow = (-h * log_root).exp();
    let odd_half = q.pow(-0.5 * h * (rf + 1.0));

    ScalingResiduals {
        even_f: relative_gap(even.f, i_pow(rf) * half * root_pow * here.f),
        even_g: relative_gap(even.g, i_pow(-rf) * half * root_pow * here.g),
        even_weight: relative_gap(
            even.weight,
            here.weight * sign * half * half * root_pow * root_pow,
        ),
        odd_f: relative_gap(odd.f, -i_pow(-h) * odd_half * root_next_pow * next.g),
        odd_g: relative_gap(odd.g, -i_pow(h) * odd_half * root_next_pow * next.f),
        odd_weight: relative_gap(
            odd.weight,
            -sign * odd_half * odd_half * root_next_pow * root_next_pow * next.weight,
        ),
    }
}

/// `M(q^2r z) = (-1)^r q^(-r(r+1/2)) z^(-r) M(z)` as a multiplier.
pub fn even_lattice_factor(r: i32, p: &CirclePoint) -> Complex64 {
    let rf = r as f64;
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    p.z().powi(-r) * sign * p.q().pow(-rf * (rf + 0.5))
}

/// Orthonormal function `Psi_n(z) = R_n(z) M(z)` at a circle point.
pub fn rs_function(n: u32, p: &CirclePoint) -> Complex64 {
    rs_poly_normalized(n, p.z(), p.q()) * weight(p).weight
}

/// `Psi_0, ..., Psi_(len-1)` at a circle point.
pub fn rs_functions_all(len: usize, p: &CirclePoint) -> Vec<Complex64> {
    if len == 0 {
        return Vec::new();
    }
    let m = weight(p).weight;
    rs_normalized_all(len as u32 - 1, p.z(), p.q())
        .into_iter()
        .map(|r| r * m)
        .collect()
}

/// `Psi_n(q^2r z)` through the exact even scaling of the weight.
pub fn rs_function_on_lattice(n: u32, p: &CirclePoint, r: i32) -> Complex64 {
    let w = lattice_point(p, r);
    rs_poly_normalized(n, w, p.q()) * even_lattice_factor(r, p) * weight(p).weight
}

/// The lattice point `q^2r z`.
pub fn lattice_point(p: &CirclePoint, r: i32) -> Complex64 {
    p.z() * p.q().pow(2.0 * r as f64)
}

/// Jackson derivative `[f(w) - f(q^2 w)] / [w (1 - q^2)]` at `w = q^2r z`
/// for a function known on the lattice by its index.
pub fn lattice_q_derivative<F>(f: &F, p: &CirclePoint, r: i32) -> Result<Complex64>
where
    F: Fn(i32) -> Complex64,
{
    let w = lattice_point(p, r);
    if w.norm() == 0.0 {
        return Err(Error::SingularPoint {
            what: "Jackson q-derivative",
        });
    }
    Ok((f(r) - f(r + 1)) / (w * one_minus_q_pow(p.q().value(), 2.0)))
}

fn check_ladder_point(w: Complex64, q: f64) -> Result<()> {
    if w.norm() == 0.0 || (Complex64::new(1.0, 0.0) - w * q).norm() < 1e-300 {
        return Err(Error::SingularPoint {
            what: "q-differential ladder form",
        });
    }
    Ok(())
}

/// Lowering form `L_n` applied to a lattice function, evaluated at `q^2r z`.
pub fn apply_lowering<F>(n: u32, f: &F, p: &CirclePoint, r: i32) -> Result<Complex64>
where
    F: Fn(i32) -> Complex64,
{
    let q = p.q().value();
    let sq = q.sqrt();
    let w = lattice_point(p, r);
    check_ladder_point(w, q)?;
    let one = Complex64::new(1.0, 0.0);
    let d = lattice_q_derivative(f, p, r)?;
    let num = (one - w * q * (1.0 - sq - q.powi(n as i32))) * f(r)
        - w * w * q * sq * one_minus_q_pow(q, 2.0) * d;
    Ok(num / ((q * one_minus_q_pow(q, 1.0)).sqrt() * (one - w * q) * w))
}

/// Raising form `R_n` applied to a lattice function, evaluated at `q^2r z`.
pub fn apply_raising<F>(n: u32, f: &F, p: &CirclePoint, r: i32) -> Result<Complex64>
where
    F: Fn(i32) -> Complex64,
{
    let q = p.q().value();
    let sq = q.sqrt();
    let w = lattice_point(p, r);
    check_ladder_point(w, q)?;
    let one = Complex64::new(1.0, 0.0);
    let d = lattice_q_derivative(f, p, r)?;
    let inner = (one - (w + sq + q.powi(n as i32)) * q) * f(r) + w * q * sq * one_minus_q_pow(q, 2.0) * d;
    Ok(w * sq * inner / (one_minus_q_pow(q, 1.0).sqrt() * (one - w * q)))
}

/// `|a - b| / max(1, |b|)`; both sides of the difference identities grow
/// quickly as `q -> 1`, so an absolute gap would only measure rounding.
fn scaled_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Residuals of the two identities for the q-derivative of `Psi_n`:
/// the form involving `Psi_(n-1)` and the form involving `Psi_(n+1)`,
/// each relative to `max(1, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeResiduals {
    pub lowering_form: f64,
    pub raising_form: f64,
}

pub fn q_derivative_identities_check(n: u32, p: &CirclePoint) -> Result<DerivativeResiduals> {
    let q = p.q().value();
    let sq = q.sqrt();
    let z = p.z();
    let one = Complex64::new(1.0, 0.0);
    let psi = |k: u32| rs_function(k, p);
    let lattice = |r: i32| rs_function_on_lattice(n, p, r);
    let d = lattice_q_derivative(&lattice, p, 0)?;
    let qn = q.powi(n as i32);
    let q2 = one_minus_q_pow(q, 2.0);

    let below = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        psi(n - 1)
    };
    let lower_rhs = (one - z * q * (1.0 - sq - qn)) / (z * z * q * sq * q2) * psi(n)
        - (q_number(n, p.q()) / one_minus_q_pow(q, 1.0)).sqrt() * (one - z * q) / (z * q * (1.0 + q))
            * below;
    let raise_rhs = -(one - (z + sq + qn) * q) / (z * q * sq * q2) * psi(n)
        + (q_number(n + 1, p.q()) / one_minus_q_pow(q, 1.0)).sqrt() * (one - z * q)
            / (z * z * q * q * (1.0 + q))
            * psi(n + 1);
    Ok(DerivativeResiduals {
        lowering_form: scaled_gap(d, lower_rhs),
        raising_form: scaled_gap(d, raise_rhs),
    })
}

/// Scaled residual of `D R_n = q/(1+q) [n] R_n + (q/(1-q))^(1/2) (1-qz)/(1+q) [n]^(1/2) R_(n-1)`.
pub fn polynomial_derivative_residual(n: u32, p: &CirclePoint) -> f64 {
    let qp = p.q();
    let q = qp.value();
    let z = p.z();
    let one = Complex64::new(1.0, 0.0);
    let lhs = (rs_poly_normalized(n, z, qp) - rs_poly_normalized(n, z * q * q, qp))
        / (z * one_minus_q_pow(q, 2.0));
    let below = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        rs_poly_normalized(n - 1, z, qp)
    };
    let nq = q_number(n, qp);
    let rhs = rs_poly_normalized(n, z, qp) * (q / (1.0 + q) * nq)
        + below * (one - z * q) * ((q / one_minus_q_pow(q, 1.0)).sqrt() / (1.0 + q) * nq.sqrt());
    scaled_gap(lhs, rhs)
}

/// Scaled residual of `D M = (1 + q^(3/2) z) / (q^(3/2) z^2 (1 - q^2)) M`, with
/// `M(q^2 z)` taken from the lattice series.
pub fn weight_derivative_residual(p: &CirclePoint) -> f64 {
    let q = p.q().value();
    let z = p.z();
    let here = weight(p).weight;
    let scaled = weight_on_lattice(p.phi(), 2, p.q()).weight;
    let lhs = (here - scaled) / (z * one_minus_q_pow(q, 2.0));
    let q32 = q * q.sqrt();
    let rhs = (Complex64::new(1.0, 0.0) + z * q32) / (z * z * q32 * one_minus_q_pow(q, 2.0)) * here;
    scaled_gap(lhs, rhs)
}

/// Residuals of the ladder actions of the q-differential forms on `Psi_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderResiduals {
    /// `|L_n Psi_n - [n]^(1/2) Psi_(n-1)|`
    pub lowering: f64,
    /// `|R_n Psi_n - [n+1]^(1/2) Psi_(n+1)|`
    pub raising: f64,
    /// `|R_(n-1) L_n Psi_n - [n] Psi_n|`
    pub number: f64,
}

/// Applies the q-differential ladder forms to `Psi_n` at a circle point.
///
/// The forms depend on the degree, so the number form is composed as
/// `R_(n-1) L_n`: the lowering form maps `Psi_n` to a multiple of
/// `Psi_(n-1)`, on which the raising form of degree `n - 1` acts.
pub fn qdiff_ladder_check(n: u32, p: &CirclePoint) -> Result<LadderResiduals> {
    let qp = p.q();
    let psi = |k: u32| rs_function(k, p);
    let lattice = |r: i32| rs_function_on_lattice(n, p, r);
    let lowered = apply_lowering(n, &lattice, p, 0)?;
    let raised = apply_raising(n, &lattice, p, 0)?;
    let below = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        psi(n - 1)
    };
    let lowering = (lowered - below * q_number(n, qp).sqrt()).norm();
    let raising = (raised - psi(n + 1) * q_number(n + 1, qp).sqrt()).norm();
    let number = if n == 0 {
        lowered.norm()
    } else {
        let lowered_lattice = |r: i32| apply_lowering(n, &lattice, p, r).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let composed = apply_raising(n - 1, &lowered_lattice, p, 0)?;
        (composed - psi(n) * q_number(n, qp)).norm()
    };
    Ok(LadderResiduals {
        lowering,
        raising,
        number,
    })
}

/// Orthonormality matrix `int conj(Psi_m) Psi_n dphi` for `m, n < size`.
pub fn orthonormality_matrix(q: &QParameter, size: usize, nodes: usize) -> DMatrix<Complex64> {
    let (xs, ws) = periodic_nodes(nodes);
    let mut out = DMatrix::<Complex64>::zeros(size, size);
    for (phi, w) in xs.iter().zip(&ws) {
        let vals = rs_functions_all(size, &CirclePoint::new(*phi, *q));
        for m in 0..size {
            for n in 0..size {
                out[(m, n)] += vals[m].conj() * vals[n] * *w;
            }
        }
    }
    out
}

/// A kernel value with its damping parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub epsilon: f64,
    pub value: Complex64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain("bilinear kernel", format!("epsilon = {epsilon} outside [0, 1)")));
    }
    Ok(())
}

/// Closed form of `K_eps(beta, phi) = sum_n eps^n conj(Psi_n(beta)) Psi_n(phi)`.
pub fn bilinear_kernel(beta: f64, phi: f64, epsilon: f64, q: &QParameter) -> Result<KernelValue> {
    check_epsilon(epsilon)?;
    let pol = TruncationPolicy::default();
    let qv = q.value();
    let sq = q.sqrt();
    let rel = Complex64::from_polar(1.0, phi - beta);
    let numer = q_pochhammer_infinite(rel * (qv * epsilon * epsilon), q, &pol)?;
    let denom = q_pochhammer_infinite_multi(
        &[
            rel * epsilon,
            -Complex64::from_polar(sq * epsilon, -beta),
            -Complex64::from_polar(sq * epsilon, phi),
            Complex64::new(qv * epsilon, 0.0),
        ],
        q,
        &pol,
    )?;
    let wb = weight(&CirclePoint::new(beta, *q)).weight;
    let wp = weight(&CirclePoint::new(phi, *q)).weight;
    Ok(KernelValue {
        epsilon,
        value: numer.value * wb.conj() * wp / (denom.value * 2.0 * PI),
    })
}

/// Kernel from its defining series, stopped when the tail estimate
/// `eps^N / (1 - eps) max|Psi|^2` falls below the policy tolerance.
pub fn bilinear_kernel_series(
    beta: f64,
    phi: f64,
    epsilon: f64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    check_epsilon(epsilon)?;
    let n_max = policy.max_terms;
    let pb = rs_functions_all(n_max, &CirclePoint::new(beta, *q));
    let pp = rs_functions_all(n_max, &CirclePoint::new(phi, *q));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak: f64 = 0.0;
    let mut power = 1.0;
    for n in 0..n_max {
        sum += pb[n].conj() * pp[n] * power;
        peak = peak.max(pb[n].norm_sqr()).max(pp[n].norm_sqr());
        power *= epsilon;
        let tail = power / (1.0 - epsilon) * peak;
        if policy.negligible(tail, sum.norm()) || epsilon == 0.0 {
            return Ok(SeriesValue {
                value: sum,
                error_bound: tail,
                terms: n + 1,
                q_near_one: q.near_one(),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "bilinear kernel series",
        terms: n_max,
    })
}

/// `|int K_eps(beta, phi) Psi_n(beta) dbeta - eps^n Psi_n(phi)|`.
pub fn reproducing_residual(n: u32, phi: f64, epsilon: f64, q: &QParameter, nodes: usize) -> Result<f64> {
    let (xs, ws) = periodic_nodes(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for (beta, w) in xs.iter().zip(&ws) {
        let k = bilinear_kernel(*beta, phi, epsilon, q)?.value;
        acc += k * rs_function(n, &CirclePoint::new(*beta, *q)) * *w;
    }
    let expect = rs_function(n, &CirclePoint::new(phi, *q)) * epsilon.powi(n as i32);
    Ok((acc - expect).norm())
}

/// `|int K_eps(beta, phi) K_eps2(gamma, beta) dbeta - K_(eps eps2)(gamma, phi)|`.
pub fn semigroup_residual(
    gamma: f64,
    phi: f64,
    epsilon: f64,
    epsilon2: f64,
    q: &QParameter,
    nodes: usize,
) -> Result<f64> {
    let (xs, ws) = periodic_nodes(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for (beta, w) in xs.iter().zip(&ws) {
        let a = bilinear_kernel(*beta, phi, epsilon, q)?.value;
        let b = bilinear_kernel(gamma, *beta, epsilon2, q)?.value;
        acc += a * b * *w;
    }
    let expect = bilinear_kernel(gamma, phi, epsilon * epsilon2, q)?.value;
    Ok((acc - expect).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{measure_decomposition, szego_measure};

    fn q(v: f64) -> QParameter {
        QParameter::new(v).unwrap()
    }

    #[test]
    fn weight_matches_decomposition() {
        for v in [0.2, 0.5, 0.9] {
            let h = q(v);
            for i in 0..=720 {
                let phi = -PI + 2.0 * PI * i as f64 / 720.0;
                let p = CirclePoint::new(phi, h);
                let w = weight(&p);
                assert!((w.weight - measure_decomposition(&p)).norm() < 1e-13);
                assert!((w.weight.norm_sqr() - szego_measure(&p)).abs() < 1e-10);
            }
            let origin = weight(&CirclePoint::new(0.0, h));
            assert_eq!(origin.g.norm(), 0.0);
            assert!(origin.weight.re > 0.0 && origin.weight.im == 0.0);
        }
    }

    #[test]
    fn weight_is_even_in_angle() {
        let h = q(0.6);
        for phi in [0.1, 0.9, 2.0, 3.0] {
            let a = weight(&CirclePoint::new(phi, h)).weight;
            let b = weight(&CirclePoint::new(-phi, h)).weight;
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn lattice_series_reduces_to_theta_forms() {
        for v in [0.3, 0.8] {
            let h = q(v);
            for phi in [-2.0, 0.0, 0.37, 2.9] {
                let a = weight_on_lattice(phi, 0, &h);
                let b = weight_on_sheet(phi, &h);
                assert!((a.f - b.f).norm() < 1e-12 * b.f.norm().max(1.0));
                assert!((a.g - b.g).norm() < 1e-12 * b.g.norm().max(1.0));
            }
        }
    }

    #[test]
    fn scaling_relations_hold() {
        for v in [0.3, 0.5, 0.8] {
            let h = q(v);
            for phi in [-2.7, -0.4, 0.37, 1.9] {
                let p = CirclePoint::new(phi, h);
                for r in -3..=3 {
                    let res = scaling_relations_check(r, &p);
                    assert!(res.max() < 1e-9, "q={v} phi={phi} r={r}: {res:?}");
                }
            }
        }
    }

    #[test]
    fn first_even_scaling_of_weight() {
        let h = q(0.5);
        let p = CirclePoint::new(0.37, h);
        let lhs = weight_on_lattice(p.phi(), 2, &h).weight;
        let rhs = -h.pow(-1.5) / p.z() * weight(&p).weight;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn ground_state_density() {
        let h = q(0.7);
        for phi in [-1.0, 0.0, 2.5] {
            let p = CirclePoint::new(phi, h);
            let psi = rs_function(0, &p);
            assert!((psi.norm_sqr() - szego_measure(&p) / (2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn orthonormal_on_circle() {
        for v in [0.3, 0.5, 0.7, 0.9] {
            let g = orthonormality_matrix(&q(v), 9, 1024);
            for m in 0..9 {
                for n in 0..9 {
                    let expect = if m == n { 1.0 } else { 0.0 };
                    assert!((g[(m, n)] - expect).norm() < 1e-8, "q={v} ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn derivative_identities() {
        let h = q(0.5);
        let p = CirclePoint::new(1.0, h);
        for n in 0..=6 {
            let d = q_derivative_identities_check(n, &p).unwrap();
            assert!(d.lowering_form < 1e-9 && d.raising_form < 1e-9, "n={n}: {d:?}");
            assert!(polynomial_derivative_residual(n, &p) < 1e-9);
        }
        assert!(weight_derivative_residual(&p) < 1e-9);
    }

    #[test]
    fn ladder_forms() {
        let h = q(0.5);
        let p = CirclePoint::new(0.8, h);
        for n in 0..=6 {
            let l = qdiff_ladder_check(n, &p).unwrap();
            assert!(l.lowering < 1e-8 && l.raising < 1e-8 && l.number < 1e-8, "n={n}: {l:?}");
        }
    }

    #[test]
    fn kernel_closed_form_matches_series() {
        let h = q(0.5);
        let pol = TruncationPolicy::new(1e-13, 400).unwrap();
        for (beta, phi, eps) in [(0.3, -1.2, 0.5), (2.0, 2.5, 0.0), (-3.0, 1.0, 0.8)] {
            let a = bilinear_kernel(beta, phi, eps, &h).unwrap().value;
            let b = bilinear_kernel_series(beta, phi, eps, &h, &pol).unwrap();
            assert!((a - b.value).norm() <= b.error_bound + 1e-12, "{beta} {phi} {eps}");
            let c = bilinear_kernel(phi, beta, eps, &h).unwrap().value;
            assert!((a - c.conj()).norm() < 1e-13);
        }
        let zero = bilinear_kernel(0.4, 1.1, 0.0, &h).unwrap().value;
        let direct = rs_function(0, &CirclePoint::new(0.4, h)).conj() * rs_function(0, &CirclePoint::new(1.1, h));
        assert!((zero - direct).norm() < 1e-14);
        assert!(bilinear_kernel(0.0, 0.0, 1.0, &h).is_err());
    }

    #[test]
    fn kernel_series_needs_enough_terms() {
        let pol = TruncationPolicy::new(1e-14, 20).unwrap();
        let err = bilinear_kernel_series(0.1, 0.2, 0.99, &q(0.5), &pol).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn kernel_reproduces_and_composes() {
        let h = q(0.5);
        for n in 0..=6 {
            assert!(reproducing_residual(n, 0.7, 0.5, &h, 2048).unwrap() < 1e-8);
        }
        assert!(semigroup_residual(-0.9, 0.7, 0.6, 0.5, &h, 2048).unwrap() < 1e-8);
    }
}
