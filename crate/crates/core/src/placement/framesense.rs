//! Greedy worst-out frame-potential minimization.
//!
//! Removing a row `i` from the remaining set `R` lowers the frame potential
//! by `2 Σ_{n∈R, n≠i} ⟨ψ_n,ψ_i⟩² + ‖ψ_i‖⁴`. Keeping that score per row and
//! patching it in O(N) after every elimination gives an O(N²K) algorithm
//! dominated by building the row Gram matrix.

use std::borrow::Cow;

use super::{check_sensor_count, Algorithm, PlacementOptions, Selection};
use crate::error::{Error, Result};
use crate::linalg::{dot, row_normalize, SensingMatrix};

/// `G = ΨΨᵀ`, the `N × N` Gram matrix of the rows.
#[derive(Debug, Clone)]
pub struct RowGram {
    n: usize,
    data: Vec<f64>,
}

impl RowGram {
    pub fn new(psi: &SensingMatrix) -> Self {
        let n = psi.n_rows();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            let ri = psi.row(i);
            for j in i..n {
                let g = dot(ri, psi.row(j));
                data[i * n + j] = g;
                data[j * n + i] = g;
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Increase of the elimination objective when `i` leaves `remaining`:
/// `2 Σ_{n∈remaining∖{i}} G[n][i]² + G[i][i]²`.
pub fn marginal_gain(gram: &RowGram, remaining: &[usize], i: usize) -> Result<f64> {
    if !remaining.contains(&i) {
        return Err(Error::InvalidParameter(format!(
            "row {} is not in the remaining set",
            i + 1
        )));
    }
    if let Some(&bad) = remaining.iter().find(|&&r| r >= gram.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            n: gram.len(),
        });
    }
    let cross: f64 = remaining
        .iter()
        .filter(|&&n| n != i)
        .map(|&n| gram.get(n, i).powi(2))
        .sum();
    Ok(2.0 * cross + gram.get(i, i).powi(2))
}

/// FrameSense: eliminate rows until `L` remain, each time dropping the row
/// whose removal lowers the frame potential the most.
///
/// The first two eliminations are the distinct pair with the largest squared
/// inner product. With `normalize_rows` set the search runs on unit-norm rows;
/// the objective trace records the frame potential of the remaining rows of
/// the matrix that was searched.
pub fn framesense(psi: &SensingMatrix, l: usize, opts: &PlacementOptions) -> Result<Selection> {
    check_sensor_count(Algorithm::FrameSense, psi, l)?;
    let work: Cow<'_, SensingMatrix> = if opts.normalize_rows {
        Cow::Owned(row_normalize(psi)?)
    } else {
        Cow::Borrowed(psi)
    };
    let n = work.n_rows();
    let g = RowGram::new(&work);

    let mut pair = (0, 1);
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let v = g.get(i, j).powi(2);
            if v > best {
                best = v;
                pair = (i, j);
            }
        }
    }

    let mut score: Vec<f64> = (0..n)
        .map(|i| {
            let cross: f64 = (0..n)
                .filter(|&m| m != i)
                .map(|m| g.get(m, i).powi(2))
                .sum();
            2.0 * cross + g.get(i, i).powi(2)
        })
        .collect();
    let mut fp: f64 = (0..n)
        .map(|i| (0..n).map(|j| g.get(i, j).powi(2)).sum::<f64>())
        .sum();

    let mut alive = vec![true; n];
    let mut eliminated = Vec::with_capacity(n - l);
    let mut trace = Vec::with_capacity(n - l);

    let mut eliminate = |r: usize, alive: &mut [bool], score: &mut [f64]| {
        fp -= score[r];
        alive[r] = false;
        for m in 0..n {
            if alive[m] {
                score[m] -= 2.0 * g.get(m, r).powi(2);
            }
        }
        fp
    };

    eliminate(pair.0, &mut alive, &mut score);
    eliminated.push(pair.0);
    trace.push(eliminate(pair.1, &mut alive, &mut score));
    eliminated.push(pair.1);

    while eliminated.len() < n - l {
        let mut pick = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for m in 0..n {
            if alive[m] && score[m] > best {
                best = score[m];
                pick = m;
            }
        }
        trace.push(eliminate(pick, &mut alive, &mut score));
        eliminated.push(pick);
    }

    let chosen = (0..n).filter(|&i| alive[i]).collect();
    Ok(Selection {
        chosen,
        eliminated,
        objective_trace: trace,
    })
}
