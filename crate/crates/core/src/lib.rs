//! Rogers-Szegő polynomials, the associated orthonormal functions on the
//! circle, their q-oscillator algebra, coherent and phase states, and
//! coherent-state observables.
//!
//! Every evaluator works in double precision and reports truncation through
//! [`SeriesValue`] or a typed [`Error`].

pub mod error;
pub mod numerics;
pub mod observables;
pub mod operators;
pub mod polynomials;
pub mod qcalc;
pub mod rsfunctions;
pub mod states;
pub mod theta;

pub use error::{Error, Result};
pub use numerics::QuadratureRule;
pub use observables::{AuxiliarySeries, CosineSineUncertainty, MomentSet};
pub use operators::{BasisTruncation, OperatorLabel, OperatorMatrix};
pub use polynomials::{KernelKind, MomentKernel, PolyEval, PolyMethod};
pub use qcalc::{QParameter, SeriesValue, TruncationPolicy};
pub use rsfunctions::{KernelValue, WeightValue};
pub use states::{CoherentLabel, PhaseKind, PhaseLabel, StateVector};
pub use theta::CirclePoint;

pub use num_complex::Complex64;
