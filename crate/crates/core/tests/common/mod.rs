//! Independent reference implementations shared by the integration tests.
//! They favour obviousness over speed and reuse nothing from the library
//! except the matrix container.

#![allow(dead_code, clippy::needless_range_loop)]

use framesense::matgen::{generate, Family, GeneratorSpec};
use framesense::SensingMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gram matrix of the selected rows by the textbook triple loop.
pub fn naive_gram(psi: &SensingMatrix, sel: &[usize]) -> Vec<Vec<f64>> {
    let k = psi.n_cols();
    let mut t = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            for &i in sel {
                t[a][b] += psi.get(i, a) * psi.get(i, b);
            }
        }
    }
    t
}

fn naive_dot(psi: &SensingMatrix, i: usize, j: usize) -> f64 {
    (0..psi.n_cols())
        .map(|c| psi.get(i, c) * psi.get(j, c))
        .sum()
}

/// Frame potential as the double sum over all ordered pairs.
pub fn naive_fp(psi: &SensingMatrix, sel: &[usize]) -> f64 {
    let mut fp = 0.0;
    for &i in sel {
        for &j in sel {
            fp += naive_dot(psi, i, j).powi(2);
        }
    }
    fp
}

/// Worst-out elimination that recomputes the frame potential of every
/// candidate removal at every step. Returns the elimination order.
pub fn naive_framesense(psi: &SensingMatrix, l: usize) -> Vec<usize> {
    let n = psi.n_rows();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in 0..n {
        for j in i + 1..n {
            let v = naive_dot(psi, i, j).powi(2);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let mut order = vec![best.1, best.2];
    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != best.1 && i != best.2).collect();
    while remaining.len() > l {
        let mut pick = (f64::INFINITY, 0);
        for (pos, _) in remaining.iter().enumerate() {
            let mut without = remaining.clone();
            without.remove(pos);
            let fp = naive_fp(psi, &without);
            if fp < pick.0 {
                pick = (fp, pos);
            }
        }
        order.push(remaining.remove(pick.1));
    }
    order
}

/// Number of eigenvalues of the symmetric `a` strictly below `x`, from the
/// signs of the pivots of `a − xI` (Sylvester's law of inertia).
fn count_below(a: &[Vec<f64>], x: f64) -> usize {
    let k = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= x;
    }
    let mut negative = 0;
    for p in 0..k {
        let mut piv = m[p][p];
        if piv == 0.0 {
            piv = -1e-300;
        }
        if piv < 0.0 {
            negative += 1;
        }
        for i in p + 1..k {
            let f = m[i][p] / piv;
            for j in p..k {
                m[i][j] -= f * m[p][j];
            }
        }
    }
    negative
}

/// Eigenvalues of a symmetric matrix by bisection on the characteristic
/// polynomial's root count, sorted descending.
pub fn bisect_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let k = a.len();
    let radius = a
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        // idx-th smallest: count_below(hi) > idx, count_below(lo) <= idx
        let (mut lo, mut hi) = (-radius, radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(a, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * radius {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.reverse();
    out
}

pub const RANDOM_FAMILIES: [Family; 4] = [
    Family::Gaussian,
    Family::GaussianRowNormalized,
    Family::RandomTightFrame,
    Family::Bernoulli,
];

/// A seeded matrix from one of the random families; the tight frame needs
/// `N > K`.
pub fn random_matrix(r: &mut ChaCha8Rng, n: usize, k: usize) -> SensingMatrix {
    let mut family = RANDOM_FAMILIES[r.random_range(0..RANDOM_FAMILIES.len())];
    if family == Family::RandomTightFrame && n <= k {
        family = Family::Gaussian;
    }
    generate(&GeneratorSpec::new(family, n, k, r.random())).unwrap()
}

pub fn random_subset(r: &mut ChaCha8Rng, n: usize, l: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(r);
    all.truncate(l);
    all.sort_unstable();
    all
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Every size-`l` subset of `0..n` in lexicographic order.
pub fn all_subsets(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, l, &mut Vec::new(), &mut out);
    out
}

/// Real harmonic frame: `L` unit-norm rows in `R^K` forming a tight frame.
/// Even `K` uses cos/sin pairs of frequencies `1..=K/2`; odd `K` adds a
/// constant coordinate. Tight whenever `L > K`.
pub fn harmonic_frame(l: usize, k: usize) -> SensingMatrix {
    let pairs = k / 2;
    let odd = k % 2 == 1;
    let mut rows = Vec::with_capacity(l);
    for t in 0..l {
        let mut row = Vec::with_capacity(k);
        if odd {
            row.push(1.0);
        }
        for p in 1..=pairs {
            let ang = 2.0 * std::f64::consts::PI * (p * t) as f64 / l as f64;
            row.push(2f64.sqrt() * ang.cos());
            row.push(2f64.sqrt() * ang.sin());
        }
        let norm = (k as f64).sqrt();
        rows.push(row.into_iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    SensingMatrix::from_rows(&rows).unwrap()
}
