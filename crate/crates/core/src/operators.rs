//! Ladder, number and phase operators as dense matrices on a truncated
//! basis `Psi_0, ..., Psi_(n_max-1)`, the deformed commutation relations they
//! satisfy, and the oscillator energy spectrum.
//!
//! The raising operators leak out of the truncated space through the last
//! basis vector, so every identity is checked on the interior block
//! `n < n_max - 1` only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcalc::{q_number, QParameter};

pub use crate::rsfunctions::{qdiff_ladder_check, LadderResiduals};

/// Size of the truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisTruncation {
    n_max: usize,
}

impl BasisTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "basis truncation n_max = {n_max} must be at least 2"
            )));
        }
        Ok(BasisTruncation { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of leading indices on which truncated identities are exact.
    pub fn interior(&self) -> usize {
        self.n_max - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorLabel {
    /// Lowering operator.
    B,
    /// Raising operator.
    Bdag,
    /// Deformed number operator with eigenvalues `[n]_q`.
    Nq,
    /// Plain number operator with eigenvalues `n`.
    N,
    /// One-step shift down, annihilating the ground state.
    Eminus,
    /// One-step shift up.
    Eplus,
    /// Cosine operator `(E- + E+) / 2`.
    C,
    /// Sine operator `(E- - E+) / 2i`.
    S,
}

impl OperatorLabel {
    pub const ALL: [OperatorLabel; 8] = [
        OperatorLabel::B,
        OperatorLabel::Bdag,
        OperatorLabel::Nq,
        OperatorLabel::N,
        OperatorLabel::Eminus,
        OperatorLabel::Eplus,
        OperatorLabel::C,
        OperatorLabel::S,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub matrix: DMatrix<Complex64>,
}

fn shift_down(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn build_operator(label: OperatorLabel, trunc: BasisTruncation, q: &QParameter) -> OperatorMatrix {
    let n = trunc.n_max();
    let c = |x: f64| Complex64::new(x, 0.0);
    let matrix = match label {
        OperatorLabel::B => DMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                c(q_number(j as u32, q).sqrt())
            } else {
                c(0.0)
            }
        }),
        OperatorLabel::Bdag => build_operator(OperatorLabel::B, trunc, q).matrix.adjoint(),
        OperatorLabel::Nq => DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(q_number(i as u32, q))
            } else {
                c(0.0)
            }
        }),
        OperatorLabel::N => DMatrix::from_fn(n, n, |i, j| if i == j { c(i as f64) } else { c(0.0) }),
        OperatorLabel::Eminus => shift_down(n),
        OperatorLabel::Eplus => shift_down(n).transpose(),
        OperatorLabel::C => (shift_down(n) + shift_down(n).transpose()) * c(0.5),
        OperatorLabel::S => {
            (shift_down(n) - shift_down(n).transpose()) / Complex64::new(0.0, 2.0)
        }
    };
    OperatorMatrix { label, matrix }
}

fn interior_gap(lhs: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>, k: usize) -> f64 {
    let d = lhs.view((0, 0), (k, k)) - rhs.view((0, 0), (k, k));
    d.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Max-norm residuals of the six deformed commutation relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraResiduals {
    /// `B B+ - q B+ B = 1`
    pub q_commutator: f64,
    /// `B Nq - q Nq B = B`
    pub q_lowering: f64,
    /// `Nq B+ - q B+ Nq = B+`
    pub q_raising: f64,
    /// `[B, B+] = 1 - (1-q) Nq`
    pub commutator: f64,
    /// `[Nq, B] = -(1 - (1-q) Nq) B`
    pub number_lowering: f64,
    /// `[Nq, B+] = B+ (1 - (1-q) Nq)`
    pub number_raising: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [
            self.q_commutator,
            self.q_lowering,
            self.q_raising,
            self.commutator,
            self.number_lowering,
            self.number_raising,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn algebra_check(trunc: BasisTruncation, q: &QParameter) -> Result<AlgebraResiduals> {
    if trunc.n_max() < 4 {
        return Err(Error::InvalidParameter(format!(
            "algebra check needs n_max >= 4, got {}",
            trunc.n_max()
        )));
    }
    let n = trunc.n_max();
    let k = trunc.interior();
    let qc = Complex64::new(q.value(), 0.0);
    let b = build_operator(OperatorLabel::B, trunc, q).matrix;
    let bd = build_operator(OperatorLabel::Bdag, trunc, q).matrix;
    let nq = build_operator(OperatorLabel::Nq, trunc, q).matrix;
    let one = DMatrix::<Complex64>::identity(n, n);
    let defect = &one - &nq * Complex64::new(1.0 - q.value(), 0.0);

    Ok(AlgebraResiduals {
        q_commutator: interior_gap(&(&b * &bd - &bd * &b * qc), &one, k),
        q_lowering: interior_gap(&(&b * &nq - &nq * &b * qc), &b, k),
        q_raising: interior_gap(&(&nq * &bd - &bd * &nq * qc), &bd, k),
        commutator: interior_gap(&(&b * &bd - &bd * &b), &defect, k),
        number_lowering: interior_gap(&(&nq * &b - &b * &nq), &(-(&defect * &b)), k),
        number_raising: interior_gap(&(&nq * &bd - &bd * &nq), &(&bd * &defect), k),
    })
}

/// Residuals of the cosine and sine operator identities on the interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOperatorResiduals {
    /// `C^2 + S^2 = 1 - P0 / 2`
    pub square_sum: f64,
    /// `[C, S] = (i/2) P0`
    pub commutator: f64,
    /// `E- E+ = 1`
    pub shift_product: f64,
    /// `E+ E- = 1 - P0`
    pub shift_product_reversed: f64,
}

/// `P0 = |0><0|`, the ground-state projector.
fn ground_projector(n: usize) -> DMatrix<Complex64> {
    let mut p = DMatrix::zeros(n, n);
    p[(0, 0)] = Complex64::new(1.0, 0.0);
    p
}

pub fn phase_operator_check(trunc: BasisTruncation, q: &QParameter) -> PhaseOperatorResiduals {
    let n = trunc.n_max();
    let k = trunc.interior();
    let c = build_operator(OperatorLabel::C, trunc, q).matrix;
    let s = build_operator(OperatorLabel::S, trunc, q).matrix;
    let em = build_operator(OperatorLabel::Eminus, trunc, q).matrix;
    let ep = build_operator(OperatorLabel::Eplus, trunc, q).matrix;
    let one = DMatrix::<Complex64>::identity(n, n);
    let p0 = ground_projector(n);
    PhaseOperatorResiduals {
        square_sum: interior_gap(&(&c * &c + &s * &s), &(&one - &p0 * Complex64::new(0.5, 0.0)), k),
        commutator: interior_gap(&(&c * &s - &s * &c), &(&p0 * Complex64::new(0.0, 0.5)), k),
        shift_product: interior_gap(&(&em * &ep), &one, k),
        shift_product_reversed: interior_gap(&(&ep * &em), &(&one - &p0), k),
    }
}

/// An oscillator level and the gap to the next one in units of `E0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    pub energy: f64,
    pub gap: f64,
}

/// `E_n = (2 - (1+q) q^n) / (1-q) E0` and `(E_(n+1) - E_n) / E0 = (1+q) q^n`.
pub fn energy_spectrum(n: u32, q: &QParameter, e0: f64) -> EnergyLevel {
    let qv = q.value();
    let qn = qv.powi(n as i32);
    EnergyLevel {
        energy: (2.0 - (1.0 + qv) * qn) / (1.0 - qv) * e0,
        gap: (1.0 + qv) * qn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, q: f64) -> (BasisTruncation, QParameter) {
        (BasisTruncation::new(n).unwrap(), QParameter::new(q).unwrap())
    }

    #[test]
    fn matrix_elements() {
        let (t, q) = setup(8, 0.5);
        let b = build_operator(OperatorLabel::B, t, &q).matrix;
        assert_eq!(b[(0, 1)], Complex64::new(1.0, 0.0));
        assert!((b[(2, 3)].re - 1.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(b[(1, 0)], Complex64::new(0.0, 0.0));
        let bd = build_operator(OperatorLabel::Bdag, t, &q).matrix;
        assert_eq!(bd, b.adjoint());
        let em = build_operator(OperatorLabel::Eminus, t, &q).matrix;
        assert!(em.column(0).iter().all(|v| v.norm() == 0.0));
        for l in [OperatorLabel::C, OperatorLabel::S, OperatorLabel::N, OperatorLabel::Nq] {
            let m = build_operator(l, t, &q).matrix;
            assert_eq!(m, m.adjoint());
        }
    }

    #[test]
    fn number_operator_factorizes_on_interior() {
        let (t, q) = setup(12, 0.7);
        let b = build_operator(OperatorLabel::B, t, &q).matrix;
        let bd = build_operator(OperatorLabel::Bdag, t, &q).matrix;
        let nq = build_operator(OperatorLabel::Nq, t, &q).matrix;
        assert!(interior_gap(&(&bd * &b), &nq, t.interior()) < 1e-15);
    }

    #[test]
    fn algebra_holds_on_interior() {
        for v in [0.1, 0.5, 0.9, 0.99] {
            let (t, q) = setup(64, v);
            let r = algebra_check(t, &q).unwrap();
            assert!(r.max() < 1e-12, "q={v}: {r:?}");
        }
        let (t, _) = setup(3, 0.5);
        assert!(algebra_check(t, &QParameter::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn undeformed_limit() {
        let (t, q) = setup(64, 1.0 - 1e-8);
        let b = build_operator(OperatorLabel::B, t, &q).matrix;
        let bd = build_operator(OperatorLabel::Bdag, t, &q).matrix;
        let one = DMatrix::identity(64, 64);
        assert!(interior_gap(&(&b * &bd - &bd * &b), &one, t.interior()) < 1e-6);
    }

    #[test]
    fn phase_operator_identities() {
        let (t, q) = setup(32, 0.6);
        let r = phase_operator_check(t, &q);
        assert!(r.square_sum < 1e-15 && r.commutator < 1e-15);
        assert!(r.shift_product == 0.0 && r.shift_product_reversed == 0.0);
    }

    #[test]
    fn spectrum_gaps() {
        let q = QParameter::new(0.6).unwrap();
        assert!((energy_spectrum(0, &q, 1.0).gap - 1.6).abs() < 1e-15);
        assert!((energy_spectrum(0, &q, 2.0).energy - 2.0).abs() < 1e-14);
        for n in 0..20 {
            let a = energy_spectrum(n, &q, 1.3);
            let b = energy_spectrum(n + 1, &q, 1.3);
            assert!(b.gap < a.gap);
            assert!(((b.energy - a.energy) - a.gap * 1.3).abs() < 1e-12);
        }
        let near = QParameter::new(1.0 - 1e-10).unwrap();
        assert!((energy_spectrum(5, &near, 1.0).gap - 2.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_tiny_basis() {
        assert!(BasisTruncation::new(1).is_err());
    }
}
