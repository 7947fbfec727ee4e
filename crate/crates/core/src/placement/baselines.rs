//! Best-in greedy baselines and random placement.
//!
//! The determinant and MSE greedies regularize the Gram matrix with `εI` so
//! that every step is well defined before rank `K` is reached. Candidate
//! scores use rank-one identities on `M = (T_A + εI)⁻¹`, which is refactored
//! from scratch at every step:
//!
//! * `log det(T_A + ψψᵀ + εI) = log det(T_A + εI) + log(1 + ψᵀMψ)`
//! * `tr((T_A + ψψᵀ + εI)⁻¹) = tr(M) − ‖Mψ‖² / (1 + ψᵀMψ)`

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_sensor_count, Algorithm, PlacementOptions, Selection};
use crate::error::{Error, Result};
use crate::linalg::{coherence, dot, spd_inverse, spd_log_det, SensingMatrix};

fn regularized_gram(psi: &SensingMatrix, chosen: &[usize], eps: f64) -> Vec<f64> {
    let k = psi.n_cols();
    let mut a = vec![0.0; k * k];
    for i in 0..k {
        a[i * k + i] = eps;
    }
    for &s in chosen {
        let r = psi.row(s);
        for p in 0..k {
            for q in 0..k {
                a[p * k + q] += r[p] * r[q];
            }
        }
    }
    a
}

fn mat_vec(m: &[f64], x: &[f64]) -> Vec<f64> {
    m.chunks_exact(x.len()).map(|row| dot(row, x)).collect()
}

fn not_spd() -> Error {
    Error::InvalidParameter("regularized Gram matrix is not positive definite".into())
}

/// Shared best-in loop: at each step `score(M, ψ_i)` is evaluated for every
/// unused row and the highest score wins. `value` of the regularized Gram
/// matrix is logged after each addition.
fn best_in<S, V>(psi: &SensingMatrix, l: usize, eps: f64, score: S, value: V) -> Result<Selection>
where
    S: Fn(&[f64], &[f64]) -> f64,
    V: Fn(&[f64]) -> Result<f64>,
{
    let n = psi.n_rows();
    let k = psi.n_cols();
    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(l);
    let mut trace = Vec::with_capacity(l);
    for _ in 0..l {
        let a = regularized_gram(psi, &chosen, eps);
        let inv = spd_inverse(&a, k).ok_or_else(not_spd)?;
        let mut pick = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for i in (0..n).filter(|&i| !used[i]) {
            let s = score(&inv, psi.row(i));
            if s > best {
                best = s;
                pick = i;
            }
        }
        used[pick] = true;
        chosen.push(pick);
        let a = regularized_gram(psi, &chosen, eps);
        trace.push(value(&a)?);
    }
    Ok(Selection::from_chosen(n, chosen, trace))
}

/// Greedy maximization of `log det(T_A + εI)`.
pub fn greedy_det(psi: &SensingMatrix, l: usize, opts: &PlacementOptions) -> Result<Selection> {
    check_sensor_count(Algorithm::Det, psi, l)?;
    let eps = opts.ridge_for(psi)?;
    let k = psi.n_cols();
    best_in(
        psi,
        l,
        eps,
        |m, r| (dot(r, &mat_vec(m, r))).ln_1p(),
        |a| spd_log_det(a, k).ok_or_else(not_spd),
    )
}

/// Greedy minimization of `tr((T_A + εI)⁻¹)`.
pub fn greedy_mse(psi: &SensingMatrix, l: usize, opts: &PlacementOptions) -> Result<Selection> {
    check_sensor_count(Algorithm::Mse, psi, l)?;
    let eps = opts.ridge_for(psi)?;
    let k = psi.n_cols();
    best_in(
        psi,
        l,
        eps,
        |m, r| {
            let mr = mat_vec(m, r);
            dot(&mr, &mr) / (1.0 + dot(r, &mr))
        },
        |a| {
            let inv = spd_inverse(a, k).ok_or_else(not_spd)?;
            Ok((0..k).map(|i| inv[i * k + i]).sum())
        },
    )
}

/// Greedy mutual-information placement under the Gaussian model
/// `y = Ψα + n`, `α ~ N(0, I)`, `n ~ N(0, sI)` with `s = σ² + ε`, i.e.
/// location covariance `ΨΨᵀ + sI`.
///
/// Each step adds the row maximizing `Var(i | A) / Var(i | V∖(A∪i))`.
/// Conditional variances are Schur complements of that covariance, evaluated
/// in parameter space:
/// `Var(i | B) = s + ψ_iᵀ (I + T_B / s)⁻¹ ψ_i`.
/// The complement term uses one inverse for `V∖A` and a rank-one downdate,
/// which reduces to `s² / (s − ψ_iᵀ Q ψ_i)` with `Q = (I + T_{V∖A}/s)⁻¹`.
pub fn greedy_mi(psi: &SensingMatrix, l: usize, opts: &PlacementOptions) -> Result<Selection> {
    check_sensor_count(Algorithm::Mi, psi, l)?;
    if !(opts.sigma2 > 0.0) || !opts.sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be positive, got {}",
            opts.sigma2
        )));
    }
    let s = opts.sigma2 + opts.ridge_for(psi)?;
    let n = psi.n_rows();
    let k = psi.n_cols();

    // I + T_B / s for an arbitrary row set
    let precision = |rows: &mut dyn Iterator<Item = usize>| -> Vec<f64> {
        let mut a = vec![0.0; k * k];
        for i in 0..k {
            a[i * k + i] = 1.0;
        }
        for r in rows {
            let row = psi.row(r);
            for p in 0..k {
                for q in 0..k {
                    a[p * k + q] += row[p] * row[q] / s;
                }
            }
        }
        a
    };

    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(l);
    let mut trace = Vec::with_capacity(l);
    let mut info = 0.0;
    for _ in 0..l {
        let p_inv = spd_inverse(&precision(&mut chosen.iter().copied()), k).ok_or_else(not_spd)?;
        let q_inv =
            spd_inverse(&precision(&mut (0..n).filter(|&i| !used[i])), k).ok_or_else(not_spd)?;
        let mut pick = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for i in (0..n).filter(|&i| !used[i]) {
            let r = psi.row(i);
            let var_given_chosen = s + dot(r, &mat_vec(&p_inv, r));
            let q = dot(r, &mat_vec(&q_inv, r));
            let slack = s - q;
            if !(slack > 0.0) || !(var_given_chosen > 0.0) {
                return Err(Error::Conditioning { row: i });
            }
            let var_given_rest = s * s / slack;
            let ratio = var_given_chosen / var_given_rest;
            if ratio > best {
                best = ratio;
                pick = i;
            }
        }
        used[pick] = true;
        chosen.push(pick);
        info += 0.5 * best.ln();
        trace.push(info);
    }
    Ok(Selection::from_chosen(n, chosen, trace))
}

/// Greedy coherence minimization: start from the least coherent pair, then
/// repeatedly add the row whose largest coherence with the chosen rows is
/// smallest.
pub fn greedy_coherence(
    psi: &SensingMatrix,
    l: usize,
    _opts: &PlacementOptions,
) -> Result<Selection> {
    check_sensor_count(Algorithm::Coherence, psi, l)?;
    let n = psi.n_rows();
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = coherence(psi, i, j)?;
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }

    let mut pair = (0, 1);
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            if c[i * n + j] < best {
                best = c[i * n + j];
                pair = (i, j);
            }
        }
    }

    let mut used = vec![false; n];
    let mut worst = vec![0.0f64; n];
    let mut chosen = Vec::with_capacity(l);
    let mut trace = Vec::with_capacity(l - 1);
    let mut current = 0.0f64;
    let mut add = |r: usize, used: &mut [bool], worst: &mut [f64], chosen: &mut Vec<usize>| {
        used[r] = true;
        current = current.max(worst[r]);
        chosen.push(r);
        for i in 0..n {
            worst[i] = worst[i].max(c[i * n + r]);
        }
        current
    };
    add(pair.0, &mut used, &mut worst, &mut chosen);
    trace.push(add(pair.1, &mut used, &mut worst, &mut chosen));
    while chosen.len() < l {
        let mut pick = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if !used[i] && worst[i] < best {
                best = worst[i];
                pick = i;
            }
        }
        trace.push(add(pick, &mut used, &mut worst, &mut chosen));
    }
    Ok(Selection::from_chosen(n, chosen, trace))
}

/// Uniformly random `L`-subset drawn with a seeded Fisher–Yates shuffle.
pub fn random_placement(psi: &SensingMatrix, l: usize, seed: u64) -> Result<Selection> {
    check_sensor_count(Algorithm::Random, psi, l)?;
    let n = psi.n_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    let (picked, _) = idx.partial_shuffle(&mut rng, l);
    Ok(Selection::from_chosen(n, picked.to_vec(), Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_with_duplicate() -> SensingMatrix {
        SensingMatrix::from_rows(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn det_reaches_full_rank() {
        let psi = basis_with_duplicate();
        let sel = greedy_det(&psi, 3, &PlacementOptions::default()).unwrap();
        let c = sel.chosen_sorted();
        assert!(c.contains(&1) && c.contains(&2));
        assert!(c.contains(&0) ^ c.contains(&3));
    }

    #[test]
    fn det_on_identity_picks_everything() {
        let psi = SensingMatrix::identity(4).unwrap();
        let opts = PlacementOptions::default();
        let eps = opts.ridge_for(&psi).unwrap();
        let sel = greedy_det(&psi, 4, &opts).unwrap();
        assert_eq!(sel.chosen_sorted(), vec![0, 1, 2, 3]);
        let det = sel.objective_trace.last().unwrap().exp();
        assert!((det - (1.0 + eps).powi(4)).abs() < 1e-12);
        assert!(det - 1.0 <= 5.0 * eps);
    }

    #[test]
    fn mse_greedy_examples() {
        let psi = basis_with_duplicate();
        let sel = greedy_mse(&psi, 3, &PlacementOptions::default()).unwrap();
        let c = sel.chosen_sorted();
        assert!(c.contains(&1) && c.contains(&2));

        let psi = SensingMatrix::identity(3).unwrap();
        let opts = PlacementOptions::default();
        let eps = opts.ridge_for(&psi).unwrap();
        let sel = greedy_mse(&psi, 3, &opts).unwrap();
        assert_eq!(sel.chosen_sorted(), vec![0, 1, 2]);
        let tr = *sel.objective_trace.last().unwrap();
        assert!((tr - 3.0 / (1.0 + eps)).abs() < 1e-12);
    }

    #[test]
    fn mi_ignores_duplicate_of_chosen_row() {
        let psi = basis_with_duplicate();
        let opts = PlacementOptions {
            sigma2: 0.01,
            ..PlacementOptions::default()
        };
        let sel = greedy_mi(&psi, 3, &opts).unwrap();
        let c = sel.chosen_sorted();
        assert!(
            !(c.contains(&0) && c.contains(&3)),
            "picked both copies: {c:?}"
        );
    }

    #[test]
    fn mi_orthogonal_rows_tie() {
        // Orthogonal rows are independent, so Var(i|A) = Var(i|rest) for
        // every candidate and the tie rule decides.
        let psi =
            SensingMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        let sel = greedy_mi(&psi, 1, &PlacementOptions::default()).unwrap();
        assert_eq!(sel.chosen, vec![0]);
        assert!(sel.objective_trace[0].abs() < 1e-12);
    }

    #[test]
    fn mi_rejects_bad_inputs() {
        let psi = basis_with_duplicate();
        assert!(matches!(
            greedy_mi(&psi, 4, &PlacementOptions::default()),
            Err(Error::SensorCount { .. })
        ));
        let opts = PlacementOptions {
            sigma2: 0.0,
            ..PlacementOptions::default()
        };
        assert!(greedy_mi(&psi, 2, &opts).is_err());
    }

    #[test]
    fn coherence_avoids_duplicates() {
        let psi = basis_with_duplicate();
        let sel = greedy_coherence(&psi, 3, &PlacementOptions::default()).unwrap();
        let c = sel.chosen_sorted();
        assert!(!(c.contains(&0) && c.contains(&3)));
        assert_eq!(*sel.objective_trace.last().unwrap(), 0.0);
    }

    #[test]
    fn coherence_ties_pick_lowest_indices() {
        let psi = SensingMatrix::identity(5).unwrap();
        let sel = greedy_coherence(&psi, 3, &PlacementOptions::default()).unwrap();
        assert_eq!(sel.chosen, vec![0, 1, 2]);
    }

    #[test]
    fn random_examples() {
        let psi = basis_with_duplicate();
        let all = random_placement(&psi, 4, 7).unwrap();
        assert_eq!(all.chosen_sorted(), vec![0, 1, 2, 3]);
        assert!(all.eliminated.is_empty());
        let a = random_placement(&psi, 2, 99).unwrap();
        let b = random_placement(&psi, 2, 99).unwrap();
        assert_eq!(a, b);
        assert!(random_placement(&psi, 5, 0).is_err());
    }

    #[test]
    fn dimension_contracts() {
        let psi = basis_with_duplicate();
        let o = PlacementOptions::default();
        assert!(matches!(
            greedy_det(&psi, 2, &o),
            Err(Error::SensorCount { .. })
        ));
        assert!(matches!(
            greedy_mse(&psi, 5, &o),
            Err(Error::SensorCount { .. })
        ));
        assert!(matches!(
            greedy_coherence(&psi, 1, &o),
            Err(Error::SensorCount { .. })
        ));
    }
}
