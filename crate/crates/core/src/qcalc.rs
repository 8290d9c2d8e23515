//! q-arithmetic primitives and Jackson q-calculus.
//!
//! Everything here works with a deformation parameter `0 < q < 1`. Finite and
//! infinite q-Pochhammer symbols are evaluated by direct product recursion so
//! that exact zeros (a factor `1 - a q^j` vanishing) survive; the infinite
//! variants report an a-posteriori bound on the truncated tail.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Above this value of `q` results carry the `q_near_one` flag.
pub const NEAR_ONE_THRESHOLD: f64 = 1.0 - 1e-8;

/// The deformation parameter together with its Gaussian width `m`,
/// linked by `q = exp(-1 / (2 m^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
    m: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        let m = (-0.5 / q.ln()).sqrt();
        Ok(QParameter { q, m })
    }

    /// Builds the parameter from the kernel width `m > 0`.
    pub fn from_width(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("width m = {m} must be positive")));
        }
        let q = (-0.5 / (m * m)).exp();
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        Ok(QParameter { q, m })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn sqrt(&self) -> f64 {
        self.q.sqrt()
    }

    #[inline]
    pub fn ln(&self) -> f64 {
        self.q.ln()
    }

    /// `q^x` for real exponents.
    #[inline]
    pub fn pow(&self, x: f64) -> f64 {
        (x * self.q.ln()).exp()
    }

    pub fn near_one(&self) -> bool {
        self.q > NEAR_ONE_THRESHOLD
    }
}

/// Stopping rule shared by every infinite series or product.
///
/// A summation stops once the magnitude of the next additive contribution
/// falls below `abs_tol * max(1, |partial sum|)` and fails with
/// [`Error::NonConvergence`] after `max_terms` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            abs_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol >= 0.0) || max_terms == 0 {
            return Err(Error::InvalidParameter(format!(
                "truncation policy abs_tol = {abs_tol}, max_terms = {max_terms}"
            )));
        }
        Ok(TruncationPolicy { abs_tol, max_terms })
    }

    #[inline]
    pub(crate) fn negligible(&self, term: f64, partial: f64) -> bool {
        term < self.abs_tol * partial.max(1.0)
    }
}

/// A complex value with an a-posteriori truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub terms: usize,
    /// Set when the computation involved `q > 1 - 1e-8`.
    pub q_near_one: bool,
}

impl SeriesValue {
    pub fn exact(value: Complex64) -> Self {
        SeriesValue {
            value,
            error_bound: 0.0,
            terms: 0,
            q_near_one: false,
        }
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub(crate) fn flagged(mut self, q: &QParameter) -> Self {
        self.q_near_one = q.near_one();
        self
    }
}

/// `1 - q^n` without cancellation for q close to one.
#[inline]
pub fn one_minus_q_pow(q: f64, n: f64) -> f64 {
    -(n * q.ln()).exp_m1()
}

/// Finite q-Pochhammer symbol `(a; q)_n = prod_{j<n} (1 - a q^j)`.
pub fn q_pochhammer_finite(a: Complex64, q: &QParameter, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..n {
        acc *= Complex64::new(1.0, 0.0) - aq;
        aq *= q.value();
    }
    acc
}

/// `(q; q)_n` as a real number, with each factor computed as `-expm1(j ln q)`.
pub fn q_pochhammer_qq(q: &QParameter, n: usize) -> f64 {
    (1..=n).map(|j| one_minus_q_pow(q.value(), j as f64)).product()
}

/// Infinite q-Pochhammer symbol `(a; q)_inf`.
pub fn q_pochhammer_infinite(
    a: Complex64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let one = Complex64::new(1.0, 0.0);
    if a == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue::exact(one).flagged(q));
    }
    let mut acc = one;
    let mut aq = a;
    for j in 0..policy.max_terms {
        // remaining factors multiply by exp(O(sum |a| q^i))
        let tail = aq.norm() / one_minus_q_pow(q.value(), 1.0);
        if tail < policy.abs_tol {
            return Ok(SeriesValue {
                value: acc,
                error_bound: acc.norm() * tail.exp_m1(),
                terms: j,
                q_near_one: q.near_one(),
            });
        }
        acc *= one - aq;
        if acc == Complex64::new(0.0, 0.0) {
            return Ok(SeriesValue {
                value: acc,
                error_bound: 0.0,
                terms: j + 1,
                q_near_one: q.near_one(),
            });
        }
        aq *= q.value();
    }
    Err(Error::NonConvergence {
        what: "infinite q-Pochhammer product",
        terms: policy.max_terms,
    })
}

/// Generalized symbol `(a_1, ..., a_r; q)_inf` as the product of the individual symbols.
pub fn q_pochhammer_infinite_multi(
    args: &[Complex64],
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let mut value = Complex64::new(1.0, 0.0);
    let mut rel = 0.0;
    let mut terms = 0;
    for &a in args {
        let p = q_pochhammer_infinite(a, q, policy)?;
        if p.value.norm() > 0.0 {
            rel += p.error_bound / p.value.norm();
        }
        value *= p.value;
        terms += p.terms;
    }
    Ok(SeriesValue {
        value,
        error_bound: value.norm() * rel,
        terms,
        q_near_one: q.near_one(),
    })
}

/// Gaussian binomial coefficient with a raw real base.
///
/// Works for any `q != 1`, including `q > 1`, which the term-swap identity
/// between the two polynomial families needs.
pub(crate) fn gaussian_binomial_raw(n: u32, k: i64, q: f64) -> f64 {
    if k < 0 || k > n as i64 {
        return 0.0;
    }
    let k = k as u32;
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 1..=k {
        acc *= one_minus_q_pow(q, (n - k + j) as f64) / one_minus_q_pow(q, j as f64);
    }
    acc
}

/// q-binomial coefficient `[n choose k]_q`; zero outside `0 <= k <= n`.
pub fn q_binomial(n: u32, k: i64, q: &QParameter) -> f64 {
    gaussian_binomial_raw(n, k, q.value())
}

/// q-number `[n]_q = (1 - q^n) / (1 - q)`.
pub fn q_number(n: u32, q: &QParameter) -> f64 {
    if n == 0 {
        return 0.0;
    }
    one_minus_q_pow(q.value(), n as f64) / one_minus_q_pow(q.value(), 1.0)
}

/// q-factorial `[n]_q! = prod_{j=1}^{n} [j]_q`.
pub fn q_factorial(n: u32, q: &QParameter) -> f64 {
    (1..=n).map(|j| q_number(j, q)).product()
}

/// q-exponential `e_q(x) = 1 / (x; q)_inf` for real `|x| < 1`.
pub fn q_exponential(x: f64, q: &QParameter, policy: &TruncationPolicy) -> Result<SeriesValue> {
    q_exponential_complex(Complex64::new(x, 0.0), q, policy)
}

/// q-exponential for complex arguments inside the unit disk.
pub fn q_exponential_complex(
    x: Complex64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    if !(x.norm() < 1.0) {
        return Err(Error::domain("q-exponential", format!("|x| = {} >= 1", x.norm())));
    }
    let p = q_pochhammer_infinite(x, q, policy)?;
    let value = p.value.inv();
    let rel = if p.value.norm() > 0.0 {
        p.error_bound / p.value.norm()
    } else {
        0.0
    };
    Ok(SeriesValue {
        value,
        error_bound: value.norm() * rel,
        terms: p.terms,
        q_near_one: q.near_one(),
    })
}

/// Series form `sum_n x^n / (q; q)_n` of the q-exponential.
pub fn q_exponential_series(
    x: Complex64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    if !(x.norm() < 1.0) {
        return Err(Error::domain("q-exponential", format!("|x| = {} >= 1", x.norm())));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut magnitude = 1.0;
    for n in 1..policy.max_terms {
        term *= x / one_minus_q_pow(q.value(), n as f64);
        sum += term;
        magnitude += term.norm();
        if policy.negligible(term.norm(), sum.norm()) {
            // ratio of successive terms tends to |x|; rounding grows with the
            // absolute sum when terms of alternating sign cancel
            let r = x.norm();
            return Ok(SeriesValue {
                value: sum,
                error_bound: term.norm() * r / (1.0 - r) + 4.0 * f64::EPSILON * magnitude,
                terms: n + 1,
                q_near_one: q.near_one(),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "q-exponential series",
        terms: policy.max_terms,
    })
}

/// Jackson derivative `D_{q^2} f(z) = [f(z) - f(q^2 z)] / [z (1 - q^2)]`.
pub fn jackson_q_derivative<F>(f: F, z: Complex64, q: &QParameter) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPoint {
            what: "Jackson q-derivative",
        });
    }
    let q2 = q.value() * q.value();
    Ok((f(z) - f(z * q2)) / (z * one_minus_q_pow(q.value(), 2.0)))
}

/// Default upper limit `1 / (1 - q)` of the Jackson integral.
pub fn jackson_upper(q: &QParameter) -> f64 {
    1.0 / one_minus_q_pow(q.value(), 1.0)
}

/// Jackson q-integral `(1 - q) b sum_k q^k g(b q^k)` over `[0, b]`.
pub fn jackson_q_integral<G>(
    g: G,
    upper: f64,
    q: &QParameter,
    policy: &TruncationPolicy,
) -> Result<SeriesValue>
where
    G: Fn(f64) -> f64,
{
    let scale = one_minus_q_pow(q.value(), 1.0) * upper;
    let mut sum = 0.0;
    let mut qk = 1.0;
    for k in 0..policy.max_terms {
        let term = qk * g(upper * qk);
        sum += term;
        // a vanishing sample does not end the sum while q^k is still large
        if policy.negligible(term.abs(), sum.abs()) && policy.negligible(qk, sum.abs()) {
            return Ok(SeriesValue {
                value: Complex64::new(scale * sum, 0.0),
                error_bound: (scale * term / (1.0 - q.value())).abs(),
                terms: k + 1,
                q_near_one: q.near_one(),
            });
        }
        qk *= q.value();
    }
    Err(Error::NonConvergence {
        what: "Jackson q-integral",
        terms: policy.max_terms,
    })
}
