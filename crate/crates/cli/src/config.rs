use std::path::PathBuf;
use std::str::FromStr;

use rs_toolkit_core::qcalc::one_minus_q_pow;
use thiserror::Error;

use crate::sweep::Quantity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("q = {0} must lie strictly inside (0, 1)")]
    QOutOfRange(f64),
    #[error("the q list is empty")]
    EmptyQList,
    #[error("malformed |mu|^2 range {0:?} (expected a:b:steps)")]
    Mu2Syntax(String),
    #[error("|mu|^2 range {start}..{end} with {steps} steps is invalid")]
    Mu2Range { start: f64, end: f64, steps: usize },
    #[error("(1-q)|mu|^2 = {product} >= 1 at q = {q}, |mu|^2 = {mu2}")]
    Mu2Domain { q: f64, mu2: f64, product: f64 },
    #[error("unknown quantity {0:?}")]
    UnknownQuantity(String),
    #[error("no check matches {0:?}")]
    UnknownCheck(String),
    #[error("figure id {0} is not one of 1, 2, 3, 4")]
    FigureId(u8),
    #[error("tolerance {0} must be positive and finite")]
    Tolerance(f64),
    #[error("need at least 2 phi samples, got {0}")]
    PhiSamples(usize),
    #[error("theta = {0} is not finite")]
    Theta(f64),
    #[error("RS_TOOLKIT_THREADS = {0:?} is not a positive integer")]
    Threads(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Inclusive, evenly spaced `|mu|^2` grid written as `a:b:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu2Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Mu2Grid {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self, ConfigError> {
        let ok = start.is_finite() && end.is_finite() && start >= 0.0 && end >= start && steps >= 1;
        if !ok || (steps == 1 && end != start) {
            return Err(ConfigError::Mu2Range { start, end, steps });
        }
        Ok(Mu2Grid { start, end, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.start + (self.end - self.start) * k as f64 / last)
            .collect()
    }
}

impl FromStr for Mu2Grid {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Mu2Syntax(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(bad());
        };
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        let steps = n.trim().parse().map_err(|_| bad())?;
        Mu2Grid::new(start, end, steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Verify { only: Option<String>, tol: Option<f64> },
    Figure { id: u8 },
    Sweep { quantity: Quantity, nmax: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub q_list: Vec<f64>,
    /// Largest degree in the polynomial orthogonality and recurrence checks.
    pub max_degree: u32,
    pub phi_samples: usize,
    pub mu2: Mu2Grid,
    pub theta: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Grid points closer than this to `(1-q)|mu|^2 = 1` are treated as outside
/// the domain: the decimal inputs sit on the boundary and differ only by rounding.
pub const DOMAIN_MARGIN: f64 = 1e-9;
pub const DEFAULT_Q_LIST: [f64; 3] = [0.3, 0.6, 0.9];
pub const DEFAULT_MAX_DEGREE: u32 = 8;
pub const DEFAULT_PHI_SAMPLES: usize = 181;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            q_list: DEFAULT_Q_LIST.to_vec(),
            max_degree: DEFAULT_MAX_DEGREE,
            phi_samples: DEFAULT_PHI_SAMPLES,
            mu2: Mu2Grid {
                start: 0.0,
                end: 1.0,
                steps: 11,
            },
            theta: std::f64::consts::FRAC_PI_3,
            output: None,
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.q_list.is_empty() {
            return Err(ConfigError::EmptyQList);
        }
        if let Some(&q) = self.q_list.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(ConfigError::QOutOfRange(q));
        }
        if !self.theta.is_finite() {
            return Err(ConfigError::Theta(self.theta));
        }
        if self.phi_samples < 2 {
            return Err(ConfigError::PhiSamples(self.phi_samples));
        }
        match &self.command {
            Command::Verify { tol: Some(t), .. } if !(*t > 0.0 && t.is_finite()) => {
                Err(ConfigError::Tolerance(*t))
            }
            Command::Verify { only: Some(key), .. } if !crate::verify::matches_any(key) => {
                Err(ConfigError::UnknownCheck(key.clone()))
            }
            Command::Figure { id } if !(1..=4).contains(id) => Err(ConfigError::FigureId(*id)),
            Command::Sweep { quantity, .. } => {
                if *quantity == Quantity::Usym && self.mu2.start <= 0.0 {
                    return Err(ConfigError::Mu2Range {
                        start: self.mu2.start,
                        end: self.mu2.end,
                        steps: self.mu2.steps,
                    });
                }
                for &q in &self.q_list {
                    let product = one_minus_q_pow(q, 1.0) * self.mu2.end;
                    if product >= 1.0 - DOMAIN_MARGIN {
                        return Err(ConfigError::Mu2Domain {
                            q,
                            mu2: self.mu2.end,
                            product,
                        });
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
