//! Rogers-Szegő polynomials, their normalized form, the Stieltjes-Wigert
//! companions and the integral representations linking them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureRule};
use crate::qcalc::{
    gaussian_binomial_raw, one_minus_q_pow, q_binomial, q_pochhammer_finite,
    q_pochhammer_infinite, q_pochhammer_qq, QParameter, SeriesValue, TruncationPolicy,
};
use crate::theta::theta3;

/// Degrees above this use the recurrence by default.
pub const RECURRENCE_THRESHOLD: u32 = 16;

/// Kernels degenerate as `q -> 1`; above this value they are rejected.
pub const KERNEL_Q_LIMIT: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyMethod {
    DirectSum,
    Recurrence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub n: u32,
    pub z: Complex64,
    pub value: Complex64,
    pub method: PolyMethod,
}

fn horner(coeffs: impl DoubleEndedIterator<Item = f64>, z: Complex64) -> Complex64 {
    coeffs
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `H_n(z) = sum_k [n choose k]_q z^k` by the chosen method.
pub fn rs_poly_with(n: u32, z: Complex64, q: &QParameter, method: PolyMethod) -> PolyEval {
    let value = match method {
        PolyMethod::DirectSum => horner((0..=n).map(|k| q_binomial(n, k as i64, q)), z),
        PolyMethod::Recurrence => rs_poly_all(n, z, q)[n as usize],
    };
    PolyEval { n, z, value, method }
}

/// Rogers-Szegő polynomial `H_n(z; q)`.
pub fn rs_poly(n: u32, z: Complex64, q: &QParameter) -> Complex64 {
    let method = if n > RECURRENCE_THRESHOLD {
        PolyMethod::Recurrence
    } else {
        PolyMethod::DirectSum
    };
    rs_poly_with(n, z, q, method).value
}

/// `H_0(z), ..., H_n(z)` from `H_{k+1} = (1 + z) H_k - (1 - q^k) z H_{k-1}`.
pub fn rs_poly_all(n: u32, z: Complex64, q: &QParameter) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let one = Complex64::new(1.0, 0.0);
    out.push(one);
    if n == 0 {
        return out;
    }
    out.push(one + z);
    for k in 1..n as usize {
        let next = (one + z) * out[k] - z * out[k - 1] * one_minus_q_pow(q.value(), k as f64);
        out.push(next);
    }
    out
}

/// Normalization `[q^n / (2 pi (q;q)_n)]^(1/2)` of the orthonormal polynomials.
pub fn normalization(n: u32, q: &QParameter) -> f64 {
    (q.pow(n as f64) / (2.0 * PI * q_pochhammer_qq(q, n as usize))).sqrt()
}

/// Normalized polynomial `R_n(z) = [q^n / (2 pi (q;q)_n)]^(1/2) H_n(z)`.
pub fn rs_poly_normalized(n: u32, z: Complex64, q: &QParameter) -> Complex64 {
    rs_poly(n, z, q) * normalization(n, q)
}

/// `R_0(z), ..., R_n(z)` from the normalized three-term recurrence.
pub fn rs_normalized_all(n: u32, z: Complex64, q: &QParameter) -> Vec<Complex64> {
    let qv = q.value();
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Complex64::new((2.0 * PI).powf(-0.5), 0.0));
    if n == 0 {
        return out;
    }
    out.push((one + z) * (qv / (2.0 * PI * one_minus_q_pow(qv, 1.0))).sqrt());
    for k in 1..n as usize {
        let lead = (qv / one_minus_q_pow(qv, k as f64 + 1.0)).sqrt();
        let back = (qv * one_minus_q_pow(qv, k as f64)).sqrt();
        out.push(((one + z) * out[k] - z * out[k - 1] * back) * lead);
    }
    out
}

/// Stieltjes-Wigert polynomial `G_n(x) = sum_k [n choose k]_q q^(k(k-n)) x^k`.
pub fn sw_poly(n: u32, x: Complex64, q: &QParameter) -> Complex64 {
    let ln_q = q.ln();
    horner(
        (0..=n).map(|k| {
            let kk = k as f64;
            q_binomial(n, k as i64, q) * (kk * (kk - n as f64) * ln_q).exp()
        }),
        x,
    )
}

/// `H_n(x; 1/q)` with Gaussian binomials in base `1/q`.
pub fn rs_poly_inverse_base(n: u32, x: Complex64, q: &QParameter) -> Complex64 {
    let inv = 1.0 / q.value();
    horner((0..=n).map(|k| gaussian_binomial_raw(n, k as i64, inv)), x)
}

/// Partial sum `sum_{n<=N} H_n(z) w^n / (q;q)_n` of the generating function.
///
/// The error bound is an estimate assuming geometric decay with ratio
/// `|w| max(1, |z|)` beyond the last term.
pub fn generating_function(
    w: Complex64,
    z: Complex64,
    q: &QParameter,
    order: u32,
) -> Result<SeriesValue> {
    let ratio = w.norm() * z.norm().max(1.0);
    if !(w.norm() < 1.0 && (w * z).norm() < 1.0) {
        return Err(Error::domain(
            "generating function",
            format!("|w| = {}, |wz| = {}", w.norm(), (w * z).norm()),
        ));
    }
    let polys = rs_poly_all(order, z, q);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut wn = Complex64::new(1.0, 0.0);
    let mut last = 0.0;
    for (k, h) in polys.iter().enumerate() {
        let term = *h * wn / q_pochhammer_qq(q, k);
        sum += term;
        last = term.norm();
        wn *= w;
    }
    let error_bound = if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue {
        value: sum,
        error_bound,
        terms: order as usize + 1,
        q_near_one: q.near_one(),
    })
}

/// Closed form `1 / [(w; q)_inf (wz; q)_inf]` of the generating function.
pub fn generating_function_product(
    w: Complex64,
    z: Complex64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    if !(w.norm() < 1.0 && (w * z).norm() < 1.0) {
        return Err(Error::domain(
            "generating function",
            format!("|w| = {}, |wz| = {}", w.norm(), (w * z).norm()),
        ));
    }
    let a = q_pochhammer_infinite(w, q, policy)?;
    let b = q_pochhammer_infinite(w * z, q, policy)?;
    let value = (a.value * b.value).inv();
    let rel = a.error_bound / a.value.norm() + b.error_bound / b.value.norm();
    Ok(SeriesValue {
        value,
        error_bound: value.norm() * rel,
        terms: a.terms + b.terms,
        q_near_one: q.near_one(),
    })
}

/// Gram matrix `int H_m(zbar) H_n(z) theta3(phi/2 | sqrt q) dphi / 2pi` for
/// `m, n < size`, by the periodic trapezoid rule with `nodes` points.
pub fn szego_gram(q: &QParameter, size: usize, nodes: usize) -> DMatrix<f64> {
    let pol = TruncationPolicy::default();
    let mut gram = DMatrix::<Complex64>::zeros(size, size);
    let h = 1.0 / nodes as f64;
    for j in 0..nodes {
        let phi = -PI + 2.0 * PI * j as f64 / nodes as f64;
        let z = -Complex64::from_polar(1.0 / q.sqrt(), phi);
        let weight = theta3(phi / 2.0, q.sqrt(), &pol).expect("theta3 converges").re() * h;
        let polys = rs_poly_all(size.saturating_sub(1) as u32, z, q);
        for m in 0..size {
            for n in 0..size {
                gram[(m, n)] += polys[m].conj() * polys[n] * weight;
            }
        }
    }
    gram.map(|c| c.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Kernel reproducing `(-q^r z w; q)_n -> H_n(z)`.
    P,
    /// Kernel reproducing `G_n(q^(n+r) z w) -> H_n(z)`.
    Y,
}

/// A log-normal transformation kernel on `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentKernel {
    pub kind: KernelKind,
    pub r: f64,
    q: QParameter,
}

impl MomentKernel {
    pub fn new(kind: KernelKind, r: f64, q: QParameter) -> Result<Self> {
        if q.value() >= KERNEL_Q_LIMIT {
            return Err(Error::domain(
                "transformation kernel",
                format!("q = {} too close to 1", q.value()),
            ));
        }
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("kernel parameter r = {r}")));
        }
        Ok(MomentKernel { kind, r, q })
    }

    pub fn q(&self) -> &QParameter {
        &self.q
    }

    /// Kernel density at `omega > 0`.
    pub fn density(&self, omega: f64) -> f64 {
        self.log_density(omega.ln()).exp()
    }

    /// Natural log of the density as a function of `l = ln omega`.
    fn log_density(&self, l: f64) -> f64 {
        let m = self.q.width();
        let m2 = m * m;
        match self.kind {
            KernelKind::P => {
                let s = self.r - 0.5;
                (m / PI.sqrt()).ln() + (self.r - 1.5) * l - s * s / (4.0 * m2) - m2 * l * l
            }
            KernelKind::Y => {
                (m / (2.0 * PI).sqrt()).ln() + (0.5 * self.r - 1.0) * l
                    - self.r * self.r / (8.0 * m2)
                    - 0.5 * m2 * l * l
            }
        }
    }

    /// Mean and standard scale of the kernel in `x = m^2 ln omega`, plus the
    /// shift of the mean per power of `omega`.
    fn log_shape(&self) -> (f64, f64, f64) {
        let m = self.q.width();
        match self.kind {
            KernelKind::P => ((self.r - 0.5) / 2.0, m, 0.5),
            KernelKind::Y => (self.r / 2.0, std::f64::consts::SQRT_2 * m, 1.0),
        }
    }

    /// Rule centred on the mass of `omega^power` times the kernel.
    pub fn rule(&self, power: f64) -> QuadratureRule {
        let (mean, scale, shift) = self.log_shape();
        QuadratureRule::log_gaussian(mean + shift * power, scale, self.q.width())
    }

    /// Exact moment `int omega^k K(omega) d omega`.
    pub fn exact_moment(&self, k: u32) -> f64 {
        let k = k as f64;
        match self.kind {
            KernelKind::P => self.q.pow(-0.5 * k * (k - 1.0) - self.r * k),
            KernelKind::Y => self.q.pow(-k * (k + self.r)),
        }
    }
}

/// Numerical moment `int_0^inf omega^k K(omega) d omega`; `rel_tol` is
/// relative to the exact moment.
pub fn kernel_moment(k: u32, kernel: &MomentKernel, rel_tol: f64) -> Result<SeriesValue> {
    let scale = kernel.exact_moment(k);
    integrate(
        // in log form so that large moments do not overflow before the kernel decays
        |w| {
            let l = w.ln();
            Complex64::new((k as f64 * l + kernel.log_density(l)).exp(), 0.0)
        },
        kernel.rule(k as f64),
        rel_tol * scale,
    )
}

/// The three integral representations that can be checked numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralRepresentation {
    /// `int H_n(-q^(-1/2) a^r e^(i s phi)) theta3(u phi | q^(2u^2/s^2)) dphi/2pi = (a^r; q)_n`.
    Pochhammer {
        n: u32,
        a: Complex64,
        r: f64,
        s: i32,
        u: i32,
    },
    /// `int (-q^r z w; q)_n P_r(w) dw = H_n(z)`.
    KernelP { n: u32, z: Complex64, r: f64 },
    /// `int G_n(q^(n+r) z w) Y_r(w) dw = H_n(z)`.
    KernelY { n: u32, z: Complex64, r: f64 },
}

impl IntegralRepresentation {
    /// Default periodic case with `s = 2`, `u = 1`, `r = 1`.
    pub fn pochhammer(n: u32, a: Complex64) -> Self {
        IntegralRepresentation::Pochhammer {
            n,
            a,
            r: 1.0,
            s: 2,
            u: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationResidual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Evaluates both sides of an integral representation; `tol` is the
/// quadrature tolerance relative to `max(1, |rhs|)`.
pub fn integral_representation_check(
    repr: IntegralRepresentation,
    q: &QParameter,
    tol: f64,
) -> Result<RepresentationResidual> {
    let (lhs, rhs) = match repr {
        IntegralRepresentation::Pochhammer { n, a, r, s, u } => {
            if s == 0 || u == 0 || s % (2 * u) != 0 {
                return Err(Error::InvalidParameter(format!(
                    "s / 2u must be a nonzero integer (s = {s}, u = {u})"
                )));
            }
            let ar = if a == Complex64::new(0.0, 0.0) {
                a
            } else {
                a.powf(r)
            };
            let rhs = q_pochhammer_finite(ar, q, n as usize);
            let nome = q.pow(2.0 * (u * u) as f64 / (s * s) as f64);
            let pol = TruncationPolicy::default();
            let lead = -ar / q.sqrt();
            let scale = rhs.norm().max(1.0);
            let lhs = integrate(
                |phi| {
                    let z = lead * Complex64::from_polar(1.0, s as f64 * phi);
                    let w = theta3(u as f64 * phi, nome, &pol).expect("theta3 converges").re();
                    rs_poly(n, z, q) * w / (2.0 * PI)
                },
                QuadratureRule::periodic(),
                tol * scale,
            )?;
            (lhs.value, rhs)
        }
        IntegralRepresentation::KernelP { n, z, r } => {
            let kernel = MomentKernel::new(KernelKind::P, r, *q)?;
            let rhs = rs_poly(n, z, q);
            let a = -z * q.pow(r);
            let lhs = integrate(
                |w| q_pochhammer_finite(a * w, q, n as usize) * kernel.density(w),
                kernel.rule(n as f64 / 2.0),
                tol * rhs.norm().max(1.0),
            )?;
            (lhs.value, rhs)
        }
        IntegralRepresentation::KernelY { n, z, r } => {
            let kernel = MomentKernel::new(KernelKind::Y, r, *q)?;
            let rhs = rs_poly(n, z, q);
            let a = z * q.pow(n as f64 + r);
            let lhs = integrate(
                |w| sw_poly(n, a * w, q) * kernel.density(w),
                kernel.rule(n as f64 / 2.0),
                tol * rhs.norm().max(1.0),
            )?;
            (lhs.value, rhs)
        }
    };
    Ok(RepresentationResidual {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}
