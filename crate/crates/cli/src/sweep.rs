use std::str::FromStr;

use rayon::prelude::*;
use rs_toolkit_core::observables::{moments_closed_form, uncertainty_cs, uncertainty_symmetric_from_moments};
use rs_toolkit_core::states::coherent_coefficients_truncated;
use rs_toolkit_core::{BasisTruncation, CoherentLabel, MomentSet, QParameter, Result as CoreResult};

use crate::config::{ConfigError, Mu2Grid};
use crate::output::{Cell, Table};

/// Named scalar quantities of a coherent state, plus the excitation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    MeanC,
    MeanS,
    MeanC2,
    MeanS2,
    MeanCSPlus,
    MeanN,
    MeanN2,
    VarC,
    VarS,
    VarN,
    CovCS,
    CovNC,
    CovNS,
    Ucs,
    UcsBound,
    Usym,
    Excitation,
}

impl Quantity {
    pub const ALL: [Quantity; 17] = [
        Quantity::MeanC,
        Quantity::MeanS,
        Quantity::MeanC2,
        Quantity::MeanS2,
        Quantity::MeanCSPlus,
        Quantity::MeanN,
        Quantity::MeanN2,
        Quantity::VarC,
        Quantity::VarS,
        Quantity::VarN,
        Quantity::CovCS,
        Quantity::CovNC,
        Quantity::CovNS,
        Quantity::Ucs,
        Quantity::UcsBound,
        Quantity::Usym,
        Quantity::Excitation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::MeanC => "meanC",
            Quantity::MeanS => "meanS",
            Quantity::MeanC2 => "meanC2",
            Quantity::MeanS2 => "meanS2",
            Quantity::MeanCSPlus => "meanCSplus",
            Quantity::MeanN => "meanN",
            Quantity::MeanN2 => "meanN2",
            Quantity::VarC => "varC",
            Quantity::VarS => "varS",
            Quantity::VarN => "varN",
            Quantity::CovCS => "covCS",
            Quantity::CovNC => "covNC",
            Quantity::CovNS => "covNS",
            Quantity::Ucs => "ucs",
            Quantity::UcsBound => "ucsBound",
            Quantity::Usym => "usym",
            Quantity::Excitation => "excitation",
        }
    }

    /// Value from a moment set; `None` for quantities not derived from moments.
    pub fn from_moments(&self, m: &MomentSet) -> Option<f64> {
        Some(match self {
            Quantity::MeanC => m.mean_c,
            Quantity::MeanS => m.mean_s,
            Quantity::MeanC2 => m.mean_c2,
            Quantity::MeanS2 => m.mean_s2,
            Quantity::MeanCSPlus => m.mean_cs_plus,
            Quantity::MeanN => m.mean_n,
            Quantity::MeanN2 => m.mean_n2,
            Quantity::VarC => m.variance_c(),
            Quantity::VarS => m.variance_s(),
            Quantity::VarN => m.variance_n(),
            Quantity::CovCS => m.covariance_cs(),
            Quantity::CovNC => m.covariance_nc(),
            Quantity::CovNS => m.covariance_ns(),
            Quantity::Usym => uncertainty_symmetric_from_moments(m),
            Quantity::Ucs | Quantity::UcsBound | Quantity::Excitation => return None,
        })
    }

    pub fn evaluate(&self, label: &CoherentLabel) -> CoreResult<f64> {
        match self {
            Quantity::Ucs => Ok(uncertainty_cs(label)?.value),
            Quantity::UcsBound => Ok(uncertainty_cs(label)?.bound),
            _ => {
                let m = moments_closed_form(label)?;
                Ok(self.from_moments(&m).expect("moment quantity"))
            }
        }
    }
}

impl FromStr for Quantity {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConfigError::UnknownQuantity(s.to_string()))
    }
}

/// Evaluates `quantity` on the `q x |mu|^2` grid at fixed `theta`; for the
/// excitation distribution `nmax` is the largest occupation number.
pub fn sweep(
    quantity: Quantity,
    q_list: &[f64],
    mu2: &Mu2Grid,
    theta: f64,
    nmax: usize,
) -> anyhow::Result<Table> {
    let cells: Vec<(f64, f64)> = q_list
        .iter()
        .flat_map(|&q| mu2.points().into_iter().map(move |m| (q, m)))
        .collect();
    let label = |q: f64, m: f64| CoherentLabel::new(m.sqrt(), theta, QParameter::new(q)?);
    if quantity == Quantity::Excitation {
        let trunc = BasisTruncation::new((nmax + 1).max(2))?;
        let rows: Vec<Vec<Vec<Cell>>> = cells
            .par_iter()
            .map(|&(q, m)| {
                let state = coherent_coefficients_truncated(&label(q, m)?, trunc)?;
                Ok(state
                    .probabilities()
                    .into_iter()
                    .take(nmax + 1)
                    .enumerate()
                    .map(|(n, p)| {
                        vec![Cell::Real(q), Cell::Real(m), Cell::Real(theta), Cell::Int(n as i64), Cell::Real(p)]
                    })
                    .collect())
            })
            .collect::<CoreResult<_>>()?;
        let mut t = Table::new("sweep_excitation", vec!["q", "mu2", "theta", "n", "value"]);
        t.rows = rows.into_iter().flatten().collect();
        t.sort_by_columns(&[0, 1, 3]);
        return Ok(t);
    }
    let rows: Vec<Vec<Cell>> = cells
        .par_iter()
        .map(|&(q, m)| {
            let v = quantity.evaluate(&label(q, m)?)?;
            Ok(vec![
                Cell::Text(quantity.name().into()),
                Cell::Real(q),
                Cell::Real(m),
                Cell::Real(theta),
                Cell::Real(v),
            ])
        })
        .collect::<CoreResult<_>>()?;
    let mut t = Table::new("sweep", vec!["quantity", "q", "mu2", "theta", "value"]);
    t.rows = rows;
    t.sort_by_columns(&[1, 2]);
    Ok(t)
}
