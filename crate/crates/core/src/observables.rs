//! Coherent-state mean values of the cosine, sine and number operators and
//! the two uncertainty products built from them.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{build_operator, BasisTruncation, OperatorLabel};
use crate::qcalc::{q_number, TruncationPolicy};
use crate::states::{coherent_coefficients, CoherentLabel};

/// Power series in `x = |mu|^2` with `[n]_q!` denominators:
///
/// ```text
/// mq = sum x^n / ([n]! [n+1]^(1/2))
/// nq = sum x^n / ([n]! ([n+1][n+2])^(1/2))
/// lq = sum (2n+1) x^n / ([n]! [n+1]^(1/2))
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliarySeries {
    pub mq: f64,
    pub nq: f64,
    pub lq: f64,
}

/// Sums `sum_n weight(n) x^n / [n]!`. Terms may grow before they decay, so
/// the stopping rule is applied only once the ratio `x / [n+1]` is below one.
fn factorial_series<W>(label: &CoherentLabel, policy: &TruncationPolicy, what: &'static str, weight: W) -> Result<f64>
where
    W: Fn(u32) -> f64,
{
    let q = label.q();
    let x = label.mu_abs() * label.mu_abs();
    let mut base = 1.0;
    let mut sum = 0.0;
    for n in 0..policy.max_terms as u32 {
        let term = base * weight(n);
        sum += term;
        let ratio = x / q_number(n + 1, q);
        if ratio < 1.0 && policy.negligible(term.abs().max(base * ratio), sum.abs()) {
            return Ok(sum);
        }
        base *= ratio;
    }
    Err(Error::NonConvergence {
        what,
        terms: policy.max_terms,
    })
}

pub fn auxiliary_series(label: &CoherentLabel, policy: &TruncationPolicy) -> Result<AuxiliarySeries> {
    let q = label.q();
    let m = |n: u32| q_number(n + 1, q).powf(-0.5);
    let mq = factorial_series(label, policy, "auxiliary series M", m)?;
    let nq = factorial_series(label, policy, "auxiliary series N", |n| {
        (q_number(n + 1, q) * q_number(n + 2, q)).powf(-0.5)
    })?;
    let lq = factorial_series(label, policy, "auxiliary series L", |n| (2 * n + 1) as f64 * m(n))?;
    Ok(AuxiliarySeries { mq, nq, lq })
}

/// `<N^k> = e_q^(-1) sum n^k |mu|^2n / [n]!` for the plain number operator.
pub fn number_moment(k: u32, label: &CoherentLabel, policy: &TruncationPolicy) -> Result<f64> {
    let s = factorial_series(label, policy, "number moment", |n| (n as f64).powi(k as i32))?;
    Ok(s / label.normalizer()?)
}

/// Coherent-state mean values. `mean_cs_minus` is `<CS - SC>`, purely imaginary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mean_c: f64,
    pub mean_s: f64,
    pub mean_c2: f64,
    pub mean_s2: f64,
    pub mean_cs_plus: f64,
    pub mean_cs_minus: Complex64,
    pub mean_n: f64,
    pub mean_n2: f64,
    /// `<(NC + CN) / 2>`
    pub mean_nc: f64,
    /// `<(NS + SN) / 2>`
    pub mean_ns: f64,
    pub label: CoherentLabel,
}

impl MomentSet {
    /// Largest componentwise difference between two moment sets.
    pub fn max_gap(&self, other: &MomentSet) -> f64 {
        [
            (self.mean_c - other.mean_c).abs(),
            (self.mean_s - other.mean_s).abs(),
            (self.mean_c2 - other.mean_c2).abs(),
            (self.mean_s2 - other.mean_s2).abs(),
            (self.mean_cs_plus - other.mean_cs_plus).abs(),
            (self.mean_cs_minus - other.mean_cs_minus).norm(),
            (self.mean_n - other.mean_n).abs(),
            (self.mean_n2 - other.mean_n2).abs(),
            (self.mean_nc - other.mean_nc).abs(),
            (self.mean_ns - other.mean_ns).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn variance_c(&self) -> f64 {
        self.mean_c2 - self.mean_c * self.mean_c
    }

    pub fn variance_s(&self) -> f64 {
        self.mean_s2 - self.mean_s * self.mean_s
    }

    pub fn variance_n(&self) -> f64 {
        self.mean_n2 - self.mean_n * self.mean_n
    }

    pub fn covariance_cs(&self) -> f64 {
        0.5 * self.mean_cs_plus - self.mean_c * self.mean_s
    }

    pub fn covariance_nc(&self) -> f64 {
        self.mean_nc - self.mean_n * self.mean_c
    }

    pub fn covariance_ns(&self) -> f64 {
        self.mean_ns - self.mean_n * self.mean_s
    }
}

/// Mean values from the auxiliary series.
pub fn moments_closed_form(label: &CoherentLabel) -> Result<MomentSet> {
    let policy = TruncationPolicy::default();
    let aux = auxiliary_series(label, &policy)?;
    let inv = 1.0 / label.normalizer()?;
    let r = label.mu_abs();
    let (st, ct) = label.theta().sin_cos();
    let (s2t, c2t) = (2.0 * label.theta()).sin_cos();
    let first = r * inv * aux.mq;
    let second = r * r * inv * aux.nq;
    let base = 0.5 - 0.25 * inv;
    let mixed = 0.5 * r * inv * aux.lq;
    Ok(MomentSet {
        mean_c: first * ct,
        mean_s: first * st,
        mean_c2: base + 0.5 * second * c2t,
        mean_s2: base - 0.5 * second * c2t,
        mean_cs_plus: second * s2t,
        mean_cs_minus: Complex64::new(0.0, 0.5 * inv),
        mean_n: number_moment(1, label, &policy)?,
        mean_n2: number_moment(2, label, &policy)?,
        mean_nc: mixed * ct,
        mean_ns: mixed * st,
        label: *label,
    })
}

/// Mean values as `v^+ O v` with the truncated operator matrices. Fails with
/// a truncation error when the basis drops more than the allowed tail mass.
pub fn moments_matrix_route(label: &CoherentLabel, trunc: BasisTruncation) -> Result<MomentSet> {
    let q = label.q();
    let v = coherent_coefficients(label, trunc)?.coefficients;
    let op = |l| build_operator(l, trunc, q).matrix;
    let c = op(OperatorLabel::C);
    let s = op(OperatorLabel::S);
    let n = op(OperatorLabel::N);
    let cv = &c * &v;
    let sv = &s * &v;
    let nv = &n * &v;
    let mean = |a: &DVector<Complex64>, b: &DVector<Complex64>| a.dotc(b);
    let cs = mean(&cv, &sv);
    let sc = mean(&sv, &cv);
    let nc = mean(&nv, &cv);
    Ok(MomentSet {
        mean_c: mean(&v, &cv).re,
        mean_s: mean(&v, &sv).re,
        mean_c2: mean(&cv, &cv).re,
        mean_s2: mean(&sv, &sv).re,
        mean_cs_plus: (cs + sc).re,
        mean_cs_minus: cs - sc,
        mean_n: mean(&v, &nv).re,
        mean_n2: mean(&nv, &nv).re,
        mean_nc: nc.re,
        mean_ns: mean(&nv, &sv).re,
        label: *label,
    })
}

/// Cosine-sine uncertainty product and its commutator bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSineUncertainty {
    pub value: f64,
    pub bound: f64,
}

/// `U_CS = (a - b)(a + b - c^2)` with `a = 1/2 - e^(-1)/4`,
/// `b = |mu|^2 e^(-1) N_q / 2`, `c = |mu| e^(-1) M_q`; bound `|<[C,S]>|^2 / 4`.
pub fn uncertainty_cs(label: &CoherentLabel) -> Result<CosineSineUncertainty> {
    let aux = auxiliary_series(label, &TruncationPolicy::default())?;
    let inv = 1.0 / label.normalizer()?;
    let r = label.mu_abs();
    let a = 0.5 - 0.25 * inv;
    let b = 0.5 * r * r * inv * aux.nq;
    let c = r * inv * aux.mq;
    Ok(CosineSineUncertainty {
        value: (a - b) * (a + b - c * c),
        bound: 0.0625 * inv * inv,
    })
}

/// `V_C V_S - V_CS^2` from a moment set, the unreduced form of `U_CS`.
pub fn uncertainty_cs_from_moments(m: &MomentSet) -> f64 {
    m.variance_c() * m.variance_s() - m.covariance_cs().powi(2)
}

/// Symmetric number-phase product
/// `[V_N (V_C + V_S) - V_NC^2 - V_NS^2] / (<C>^2 + <S>^2)`, bounded below by 1/4.
pub fn uncertainty_symmetric(label: &CoherentLabel) -> Result<f64> {
    if label.mu_abs() == 0.0 {
        return Err(Error::DegenerateLabel("symmetric uncertainty needs mu != 0"));
    }
    let m = moments_closed_form(label)?;
    Ok(uncertainty_symmetric_from_moments(&m))
}

pub fn uncertainty_symmetric_from_moments(m: &MomentSet) -> f64 {
    let num = m.variance_n() * (m.variance_c() + m.variance_s())
        - m.covariance_nc().powi(2)
        - m.covariance_ns().powi(2);
    num / (m.mean_c * m.mean_c + m.mean_s * m.mean_s)
}
