//! Sensor placement: FrameSense, the greedy baselines it is compared
//! against, random placement and exhaustive oracles.
//!
//! All indices are 0-based. Every algorithm is a pure function of
//! `(Ψ, L, options)`; ties are broken towards the lowest index.

mod baselines;
mod framesense;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SensingMatrix;

pub use baselines::{greedy_coherence, greedy_det, greedy_mi, greedy_mse, random_placement};
pub use framesense::{framesense, marginal_gain, RowGram};
pub use oracle::{exhaustive_oracle, Objective, OracleOutcome, ORACLE_GUARD};

/// Relative ridge used when none is given: `1e-6 × mean row energy`.
pub const DEFAULT_RIDGE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    FrameSense,
    Det,
    Mse,
    Mi,
    Coherence,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::FrameSense,
        Algorithm::Det,
        Algorithm::Mse,
        Algorithm::Mi,
        Algorithm::Coherence,
        Algorithm::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FrameSense => "framesense",
            Algorithm::Det => "det",
            Algorithm::Mse => "mse",
            Algorithm::Mi => "mi",
            Algorithm::Coherence => "coherence",
            Algorithm::Random => "random",
        }
    }

    /// Admissible sensor counts `[min, max]` for an `n × k` matrix.
    pub fn sensor_range(self, n: usize, k: usize) -> (usize, usize) {
        match self {
            Algorithm::FrameSense => (k, n.saturating_sub(2)),
            Algorithm::Det | Algorithm::Mse => (k, n),
            Algorithm::Mi => (1, n.saturating_sub(1)),
            Algorithm::Coherence => (2, n),
            Algorithm::Random => (1, n),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementOptions {
    /// Run FrameSense on the row-normalized copy of Ψ. Only FrameSense
    /// looks at this flag.
    pub normalize_rows: bool,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Noise variance for the mutual-information baseline.
    pub sigma2: f64,
    /// Ridge `ε` for the regularized baselines; `None` picks
    /// `1e-6 × mean row energy`.
    pub ridge: Option<f64>,
}

impl Default for PlacementOptions {
    fn default() -> Self {
        Self {
            normalize_rows: true,
            algorithm: Algorithm::FrameSense,
            seed: 0,
            sigma2: 1.0,
            ridge: None,
        }
    }
}

impl PlacementOptions {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn ridge_for(&self, psi: &SensingMatrix) -> Result<f64> {
        let eps = match self.ridge {
            Some(r) => r,
            None => DEFAULT_RIDGE_FACTOR * psi.total_energy() / psi.n_rows() as f64,
        };
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ridge must be positive and finite, got {eps}"
            )));
        }
        Ok(eps)
    }
}

/// Outcome of a placement run.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Chosen locations. FrameSense reports them ascending; best-in
    /// algorithms report them in the order they were added.
    pub chosen: Vec<usize>,
    /// Discarded locations, in elimination order for FrameSense and ascending
    /// for the best-in algorithms.
    pub eliminated: Vec<usize>,
    /// Objective value after each iteration, in the algorithm's own metric.
    pub objective_trace: Vec<f64>,
}

impl Selection {
    pub fn chosen_sorted(&self) -> Vec<usize> {
        let mut c = self.chosen.clone();
        c.sort_unstable();
        c
    }

    /// Builds a selection from chosen indices; everything else is eliminated
    /// in ascending order.
    pub(crate) fn from_chosen(n: usize, chosen: Vec<usize>, objective_trace: Vec<f64>) -> Self {
        let mut taken = vec![false; n];
        for &i in &chosen {
            taken[i] = true;
        }
        let eliminated = (0..n).filter(|&i| !taken[i]).collect();
        Self {
            chosen,
            eliminated,
            objective_trace,
        }
    }
}

pub(crate) fn check_sensor_count(
    algorithm: Algorithm,
    psi: &SensingMatrix,
    l: usize,
) -> Result<()> {
    let (min, max) = algorithm.sensor_range(psi.n_rows(), psi.n_cols());
    if l < min || l > max {
        return Err(Error::SensorCount { l, min, max });
    }
    Ok(())
}

/// Runs the algorithm selected in `opts`.
pub fn place(psi: &SensingMatrix, l: usize, opts: &PlacementOptions) -> Result<Selection> {
    match opts.algorithm {
        Algorithm::FrameSense => framesense(psi, l, opts),
        Algorithm::Det => greedy_det(psi, l, opts),
        Algorithm::Mse => greedy_mse(psi, l, opts),
        Algorithm::Mi => greedy_mi(psi, l, opts),
        Algorithm::Coherence => greedy_coherence(psi, l, opts),
        Algorithm::Random => random_placement(psi, l, opts.seed),
    }
}
