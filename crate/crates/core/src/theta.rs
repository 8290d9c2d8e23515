//! Jacobi theta functions, the circle measure and its complex square root.
//!
//! Conventions: `theta3(x | p) = sum_l p^(l^2) e^(2 i l x)` and
//! `theta1(x | p) = 2 sum_{l>=0} (-1)^l p^((l+1/2)^2) sin((2l+1)x)`.
//! The orthogonality measure at angle `phi` is `theta3(phi/2 | sqrt q)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcalc::{QParameter, SeriesValue, TruncationPolicy};

/// A point `z = -q^(-1/2) e^(i phi)` of the orthogonality circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    phi: f64,
    q: QParameter,
}

/// Maps an angle to `[-pi, pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    if (-PI..PI).contains(&phi) {
        return phi;
    }
    let two_pi = 2.0 * PI;
    let mut w = (phi + PI).rem_euclid(two_pi) - PI;
    if w >= PI {
        w -= two_pi;
    }
    w
}

impl CirclePoint {
    pub fn new(phi: f64, q: QParameter) -> Self {
        CirclePoint {
            phi: wrap_angle(phi),
            q,
        }
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }

    #[inline]
    pub fn q(&self) -> &QParameter {
        &self.q
    }

    pub fn z(&self) -> Complex64 {
        -Complex64::from_polar(1.0 / self.q.sqrt(), self.phi)
    }
}

fn truncation_order(nome: f64, policy: &TruncationPolicy) -> Result<usize> {
    let tol = policy.abs_tol.max(f64::MIN_POSITIVE);
    let l = ((tol.ln() / nome.ln()).sqrt().ceil() as usize) + 2;
    if l > policy.max_terms {
        return Err(Error::NonConvergence {
            what: "theta series",
            terms: policy.max_terms,
        });
    }
    Ok(l)
}

fn check_nome(nome: f64) -> Result<()> {
    if !(0.0..1.0).contains(&nome) {
        return Err(Error::domain("theta series", format!("nome = {nome} outside [0, 1)")));
    }
    Ok(())
}

/// `theta3(x | nome)`, evaluated through the Jacobi triple product
/// `prod_n (1 - p^2n) |1 + p^(2n-1) e^(2ix)|^2` so that the result keeps full
/// relative accuracy where the series cancels down to tiny positive values.
pub fn theta3(x: f64, nome: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_nome(nome)?;
    if nome == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(1.0, 0.0)));
    }
    let (c, s) = ((2.0 * x).cos(), (2.0 * x).sin());
    let p2 = nome * nome;
    let mut odd = nome;
    let mut even = p2;
    let mut acc = 1.0;
    for n in 1..=policy.max_terms {
        let a = odd;
        let re = 1.0 + a * c;
        let im = a * s;
        acc *= (1.0 - even) * (re * re + im * im);
        odd *= p2;
        even *= p2;
        if policy.negligible(2.0 * odd, 1.0) {
            return Ok(SeriesValue {
                value: Complex64::new(acc, 0.0),
                error_bound: acc * (3.0 * odd / (1.0 - p2)),
                terms: n,
                q_near_one: false,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "theta3 product",
        terms: policy.max_terms,
    })
}

/// `theta1(x | nome) = 2 nome^(1/4) sin x prod_n (1 - p^2n) |1 - p^2n e^(2ix)|^2`.
pub fn theta1(x: f64, nome: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_nome(nome)?;
    if nome == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(0.0, 0.0)));
    }
    let (c, s) = ((2.0 * x).cos(), (2.0 * x).sin());
    let p2 = nome * nome;
    let mut even = p2;
    let mut acc = 2.0 * nome.powf(0.25) * x.sin();
    for n in 1..=policy.max_terms {
        let re = 1.0 - even * c;
        let im = even * s;
        acc *= (1.0 - even) * (re * re + im * im);
        even *= p2;
        if policy.negligible(2.0 * even, 1.0) {
            return Ok(SeriesValue {
                value: Complex64::new(acc, 0.0),
                error_bound: acc.abs() * (3.0 * even / (1.0 - p2)),
                terms: n,
                q_near_one: false,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "theta1 product",
        terms: policy.max_terms,
    })
}

/// Direct Fourier series for `theta3`, truncated at
/// `L = ceil(sqrt(ln tol / ln nome)) + 2`.
pub fn theta3_series(x: f64, nome: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_nome(nome)?;
    if nome == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(1.0, 0.0)));
    }
    let order = truncation_order(nome, policy)?;
    let ln_nome = nome.ln();
    // summed from the small end up to limit rounding
    let mut tail = 0.0;
    for l in (1..=order).rev() {
        let lf = l as f64;
        tail += (lf * lf * ln_nome).exp() * (2.0 * lf * x).cos();
    }
    let next = (order + 1) as f64;
    Ok(SeriesValue {
        value: Complex64::new(1.0 + 2.0 * tail, 0.0),
        error_bound: 2.0 * (next * next * ln_nome).exp() / (1.0 - nome),
        terms: order + 1,
        q_near_one: false,
    })
}

/// Direct Fourier series for `theta1`.
pub fn theta1_series(x: f64, nome: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_nome(nome)?;
    if nome == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(0.0, 0.0)));
    }
    let order = truncation_order(nome, policy)?;
    let ln_nome = nome.ln();
    let mut sum = 0.0;
    for l in (0..=order).rev() {
        let h = l as f64 + 0.5;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (h * h * ln_nome).exp() * (2.0 * h * x).sin();
    }
    let next = order as f64 + 1.5;
    Ok(SeriesValue {
        value: Complex64::new(2.0 * sum, 0.0),
        error_bound: 2.0 * (next * next * ln_nome).exp() / (1.0 - nome),
        terms: order + 1,
        q_near_one: false,
    })
}

/// Positive weight `theta3(phi/2 | sqrt q)` orthogonalizing the polynomials on the circle.
pub fn szego_measure(p: &CirclePoint) -> f64 {
    let pol = TruncationPolicy::default();
    theta3(p.phi() / 2.0, p.q().sqrt(), &pol)
        .expect("theta3 converges for nome in (0, 1)")
        .re()
}

/// The complex factor `E(phi)` with `|E(phi)|^2` equal to the circle measure,
/// normalized so that `E(0) > 0`.
pub fn measure_decomposition(p: &CirclePoint) -> Complex64 {
    let pol = TruncationPolicy::default();
    let nome = p.q().sqrt();
    let t0 = theta3(0.0, nome, &pol).expect("theta3 converges").re();
    let t3 = theta3(p.phi() / 4.0, nome, &pol).expect("theta3 converges").re();
    let t1 = theta1(p.phi() / 4.0, nome, &pol).expect("theta1 converges").re();
    Complex64::new(t3 * t3, t1 * t1) * t0.powf(-1.5)
}

/// Ramanujan's two-sided theta series `f(a, b) = sum_l a^(l(l+1)/2) b^(l(l-1)/2)`.
///
/// Every exponent is a nonnegative integer: the `l >= 0` terms equal
/// `(ab)^(l(l-1)/2) a^l` and the `l = -k` terms equal `(ab)^(k(k-1)/2) b^k`.
/// With `0^0 = 1` the series is therefore defined whenever `|ab| < 1`,
/// including `a = 0` or `b = 0`.
pub fn ramanujan_f(a: Complex64, b: Complex64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let ab = a * b;
    if !(ab.norm() < 1.0) {
        return Err(Error::domain("Ramanujan f(a, b)", format!("|ab| = {} >= 1", ab.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut value = one;
    let mut error_bound = 0.0;
    let mut terms = 1;
    for base in [a, b] {
        // term_{k+1} = term_k * base * (ab)^k
        let mut term = one;
        let mut abk = one;
        let mut done = false;
        for _ in 0..policy.max_terms {
            let ratio = base * abk;
            term *= ratio;
            value += term;
            terms += 1;
            abk *= ab;
            let next_ratio = (base * abk).norm();
            if next_ratio < 1.0 && policy.negligible(term.norm(), value.norm()) {
                error_bound += term.norm() * next_ratio / (1.0 - next_ratio);
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::NonConvergence {
                what: "Ramanujan f(a, b)",
                terms: policy.max_terms,
            });
        }
    }
    Ok(SeriesValue {
        value,
        error_bound,
        terms,
        q_near_one: false,
    })
}
