use std::f64::consts::{FRAC_PI_3, PI};

use rayon::prelude::*;
use rs_toolkit_core::observables::{moments_closed_form, uncertainty_symmetric};
use rs_toolkit_core::qcalc::one_minus_q_pow;
use rs_toolkit_core::rsfunctions::rs_functions_all;
use rs_toolkit_core::theta::measure_decomposition;
use rs_toolkit_core::{CirclePoint, CoherentLabel, QParameter, Result as CoreResult};

use crate::config::{ConfigError, DOMAIN_MARGIN};
use crate::output::{Cell, Table};
use crate::sweep::Quantity;

pub const FIG2_Q: [f64; 3] = [0.5, 0.7, 0.9];
pub const FIG2_LEVELS: u32 = 5;
pub const FIG3_Q: [f64; 3] = [0.8, 0.85, 0.9];
pub const FIG3_THETA: f64 = FRAC_PI_3;
pub const FIG3_QUANTITIES: [Quantity; 5] = [
    Quantity::MeanC,
    Quantity::MeanS,
    Quantity::MeanC2,
    Quantity::MeanS2,
    Quantity::MeanCSPlus,
];
pub const FIG4_Q: [f64; 4] = [0.8, 0.85, 0.9, 0.95];
const FIG1_Q_STEPS: usize = 19;
const FIG3_MU2_STEPS: usize = 100;
const FIG4_MU2_STEPS: usize = 100;

/// Inclusive grid on `[-pi, pi]`.
pub fn phi_grid(samples: usize) -> Vec<f64> {
    let last = (samples - 1) as f64;
    (0..samples).map(|k| -PI + 2.0 * PI * k as f64 / last).collect()
}

fn qp(v: f64) -> QParameter {
    QParameter::new(v).expect("figure q values are valid")
}

pub fn figure(id: u8, phi_samples: usize) -> Result<Table, anyhow::Error> {
    match id {
        1 => Ok(measure_map(phi_samples)),
        2 => Ok(function_densities(phi_samples)),
        3 => Ok(moments_vs_mu2()?),
        4 => Ok(symmetric_uncertainty()?),
        other => Err(ConfigError::FigureId(other).into()),
    }
}

/// Real and imaginary parts of the measure factor over `phi x q`.
fn measure_map(phi_samples: usize) -> Table {
    let qs: Vec<f64> = (1..=FIG1_Q_STEPS).map(|k| k as f64 / 20.0).collect();
    let phis = phi_grid(phi_samples);
    let cells: Vec<(f64, f64)> = qs.iter().flat_map(|&q| phis.iter().map(move |&p| (q, p))).collect();
    let mut t = Table::new("figure1", vec!["phi", "q", "reE", "imE"]);
    t.rows = cells
        .par_iter()
        .map(|&(q, phi)| {
            let e = measure_decomposition(&CirclePoint::new(phi, qp(q)));
            vec![Cell::Real(phi), Cell::Real(q), Cell::Real(e.re), Cell::Real(e.im)]
        })
        .collect();
    t.sort_by_columns(&[1, 0]);
    t
}

/// `|Psi_n|^2` on the circle for the low levels.
fn function_densities(phi_samples: usize) -> Table {
    let phis = phi_grid(phi_samples);
    let cells: Vec<(f64, f64)> = FIG2_Q
        .iter()
        .flat_map(|&q| phis.iter().map(move |&p| (q, p)))
        .collect();
    let mut t = Table::new("figure2", vec!["phi", "q", "n", "psi2"]);
    t.rows = cells
        .par_iter()
        .flat_map_iter(|&(q, phi)| {
            let psi = rs_functions_all(FIG2_LEVELS as usize, &CirclePoint::new(phi, qp(q)));
            psi.into_iter().enumerate().map(move |(n, v)| {
                vec![Cell::Real(phi), Cell::Real(q), Cell::Int(n as i64), Cell::Real(v.norm_sqr())]
            })
        })
        .collect();
    t.sort_by_columns(&[1, 2, 0]);
    t
}

/// `|mu|^2` grid on `[lo, hi]` kept inside the convergence domain of `q`.
fn admissible_mu2(q: f64, lo: f64, hi: f64, steps: usize, skip_zero: bool) -> Vec<f64> {
    let start = usize::from(skip_zero);
    (start..=steps)
        .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
        .filter(|m| one_minus_q_pow(q, 1.0) * m < 1.0 - DOMAIN_MARGIN)
        .collect()
}

fn moments_vs_mu2() -> CoreResult<Table> {
    let cells: Vec<(f64, f64)> = FIG3_Q
        .iter()
        .flat_map(|&q| admissible_mu2(q, 0.0, 5.0, FIG3_MU2_STEPS, false).into_iter().map(move |m| (q, m)))
        .collect();
    let blocks: Vec<Vec<Vec<Cell>>> = cells
        .par_iter()
        .map(|&(q, m)| {
            let moments = moments_closed_form(&CoherentLabel::new(m.sqrt(), FIG3_THETA, qp(q))?)?;
            Ok(FIG3_QUANTITIES
                .iter()
                .map(|quantity| {
                    let v = quantity.from_moments(&moments).expect("moment quantity");
                    vec![Cell::Real(m), Cell::Real(q), Cell::Text(quantity.name().into()), Cell::Real(v)]
                })
                .collect())
        })
        .collect::<CoreResult<_>>()?;
    let mut t = Table::new("figure3", vec!["mu2", "q", "quantity", "value"]);
    t.rows = blocks.into_iter().flatten().collect();
    t.sort_by_columns(&[1, 2, 0]);
    Ok(t)
}

fn symmetric_uncertainty() -> CoreResult<Table> {
    let cells: Vec<(f64, f64)> = FIG4_Q
        .iter()
        .flat_map(|&q| admissible_mu2(q, 0.0, 4.0, FIG4_MU2_STEPS, true).into_iter().map(move |m| (q, m)))
        .collect();
    let mut t = Table::new("figure4", vec!["mu2", "q", "usym", "bound"]);
    t.rows = cells
        .par_iter()
        .map(|&(q, m)| {
            let u = uncertainty_symmetric(&CoherentLabel::new(m.sqrt(), FIG3_THETA, qp(q))?)?;
            Ok(vec![Cell::Real(m), Cell::Real(q), Cell::Real(u), Cell::Real(0.25)])
        })
        .collect::<CoreResult<_>>()?;
    t.sort_by_columns(&[1, 0]);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = phi_grid(5);
        assert_eq!(g[0], -PI);
        assert_eq!(g[4], PI);
        assert_eq!(g[2], 0.0);
    }

    #[test]
    fn admissible_grid_respects_domain() {
        let m = admissible_mu2(0.8, 0.0, 5.0, 100, false);
        assert_eq!(m.len(), 100);
        assert!(m.iter().all(|v| 0.2 * v < 1.0));
        assert_eq!(admissible_mu2(0.9, 0.0, 4.0, 100, true).len(), 100);
    }

    #[test]
    fn figure_row_counts() {
        assert_eq!(figure(1, 11).unwrap().rows.len(), 19 * 11);
        assert_eq!(figure(2, 11).unwrap().rows.len(), 3 * 5 * 11);
        assert!(figure(5, 11).is_err());
    }
}
