//! Brute-force reference: the best size-`L` subset by enumeration.

use super::{RowGram, Selection};
use crate::combin::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::linalg::{mse, NoiseModel, SensingMatrix};

/// Largest `C(N, L)` the oracle will enumerate.
pub const ORACLE_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize the frame potential of the selected rows.
    FramePotential,
    /// Minimize the least-squares MSE at unit noise variance.
    Mse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub selection: Selection,
    /// Optimal objective value; `+inf` for MSE when no subset has full rank.
    pub value: f64,
}

/// Global optimum over all size-`L` subsets. Ties resolve to the
/// lexicographically smallest subset.
pub fn exhaustive_oracle(
    psi: &SensingMatrix,
    l: usize,
    objective: Objective,
) -> Result<OracleOutcome> {
    let n = psi.n_rows();
    if l == 0 || l > n {
        return Err(Error::SensorCount { l, min: 1, max: n });
    }
    let count = binomial(n, l);
    if count > ORACLE_GUARD as u128 {
        return Err(Error::EnumerationGuard {
            n,
            l,
            guard: ORACLE_GUARD,
        });
    }

    let gram = matches!(objective, Objective::FramePotential).then(|| RowGram::new(psi));
    let mut best_value = f64::INFINITY;
    let mut best: Option<Vec<usize>> = None;
    let mut combos = Combinations::new(n, l);
    while let Some(subset) = combos.next_subset() {
        let value = match &gram {
            Some(g) => subset_frame_potential(g, subset),
            None => mse(psi, subset, NoiseModel::unit())?.value(),
        };
        if best.is_none() || value < best_value {
            best_value = value;
            best = Some(subset.to_vec());
        }
    }
    let chosen = best.expect("at least one subset");
    Ok(OracleOutcome {
        selection: Selection::from_chosen(n, chosen, vec![best_value]),
        value: best_value,
    })
}

fn subset_frame_potential(g: &RowGram, subset: &[usize]) -> f64 {
    let mut fp = 0.0;
    for (a, &i) in subset.iter().enumerate() {
        fp += g.get(i, i).powi(2);
        for &j in &subset[a + 1..] {
            fp += 2.0 * g.get(i, j).powi(2);
        }
    }
    fp
}
