mod common;

use common::*;
use framesense::csvio::{format_matrix, parse_matrix};
use framesense::linalg::{
    frame_potential, gram, least_squares, row_normalize, sym_eigenvalues, GramMatrix,
};
use framesense::matgen::{generate, Family, GeneratorSpec};
use framesense::SensingMatrix;
use proptest::prelude::*;
use rand::Rng;

fn matrix_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = SensingMatrix> {
    (1..=max_k)
        .prop_flat_map(move |k| (Just(k), k..=max_n.max(k)))
        .prop_flat_map(|(k, n)| {
            prop::collection::vec(-3.0f64..3.0, n * k).prop_map(move |d| (n, k, d))
        })
        .prop_map(|(n, k, d)| SensingMatrix::from_row_major(n, k, d).unwrap())
}

fn spectrum_of(psi: &SensingMatrix, sel: &[usize]) -> Vec<f64> {
    sym_eigenvalues(&gram(psi, sel).unwrap())
        .unwrap()
        .eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fp_equals_sum_of_squared_eigenvalues(psi in matrix_strategy(12, 6), seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = r.random_range(1..=psi.n_rows());
        let sel = random_subset(&mut r, psi.n_rows(), l);
        let fp = frame_potential(&psi, &sel).unwrap();
        let lam = spectrum_of(&psi, &sel);
        let sum_sq: f64 = lam.iter().map(|x| x * x).sum();
        let frob = gram(&psi, &sel).unwrap().frobenius_sq();
        prop_assert!(rel_err(fp, sum_sq) <= 1e-8 || fp < 1e-300);
        prop_assert!(rel_err(fp, frob) <= 1e-8 || fp < 1e-300);
    }

    #[test]
    fn eigenvalues_sum_to_energy(psi in matrix_strategy(12, 6)) {
        let all: Vec<usize> = (0..psi.n_rows()).collect();
        let lam = spectrum_of(&psi, &all);
        let energy: f64 = (0..psi.n_rows()).map(|i| psi.row_energy(i)).sum();
        prop_assert!(rel_err(lam.iter().sum::<f64>(), energy) <= 1e-9 || energy < 1e-300);
        prop_assert!(lam.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn fp_excess_for_unit_rows(psi in matrix_strategy(12, 5)) {
        prop_assume!((0..psi.n_rows()).all(|i| psi.row_norm(i) > 1e-3));
        let unit = row_normalize(&psi).unwrap();
        let all: Vec<usize> = (0..unit.n_rows()).collect();
        let (l, k) = (unit.n_rows() as f64, unit.n_cols() as f64);
        let excess = frame_potential(&unit, &all).unwrap() - l * l / k;
        let spread: f64 = spectrum_of(&unit, &all).iter().map(|x| (x - l / k).powi(2)).sum();
        prop_assert!((excess - spread).abs() <= 1e-8 * (l * l / k));
        prop_assert!(excess >= -1e-9 * (l * l / k));
    }

    #[test]
    fn fp_global_bounds(psi in matrix_strategy(12, 6)) {
        let all: Vec<usize> = (0..psi.n_rows()).collect();
        let energy: f64 = (0..psi.n_rows()).map(|i| psi.row_energy(i)).sum();
        let fp = frame_potential(&psi, &all).unwrap();
        let k = psi.n_cols() as f64;
        prop_assert!(fp >= energy * energy / k * (1.0 - 1e-12));
        prop_assert!(fp <= energy * energy * (1.0 + 1e-12));
    }

    #[test]
    fn least_squares_is_exact_without_noise(seed in any::<u64>(), k in 1usize..6, extra in 0usize..6) {
        let psi = generate(&GeneratorSpec::new(Family::Gaussian, k + extra, k, seed)).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let alpha: Vec<f64> = (0..k).map(|_| r.random_range(-2.0..2.0)).collect();
        let sel: Vec<usize> = (0..k + extra).collect();
        let f: Vec<f64> = sel.iter().map(|&i| (0..k).map(|c| psi.get(i, c) * alpha[c]).sum()).collect();
        let lam = spectrum_of(&psi, &sel);
        prop_assume!(lam[k - 1] > 1e-6 * lam[0]);
        let est = least_squares(&psi, &sel, &f).unwrap();
        for (a, b) in est.iter().zip(&alpha) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn harmonic_below_arithmetic(psi in matrix_strategy(10, 5)) {
        let all: Vec<usize> = (0..psi.n_rows()).collect();
        let s = sym_eigenvalues(&gram(&psi, &all).unwrap()).unwrap();
        if let Some(h) = s.harmonic_mean {
            prop_assert!(h <= s.arithmetic_mean * (1.0 + 1e-12));
        }
    }

    #[test]
    fn csv_roundtrip_is_bitwise(psi in matrix_strategy(8, 5)) {
        let back = parse_matrix(&format_matrix(&psi)).unwrap();
        prop_assert_eq!(back.as_slice(), psi.as_slice());
    }
}

#[test]
fn gram_matches_triple_loop() {
    let psi = generate(&GeneratorSpec::new(Family::Gaussian, 6, 3, 11)).unwrap();
    let sel = [0, 2, 4];
    let fast = gram(&psi, &sel).unwrap();
    let slow = naive_gram(&psi, &sel);
    for (a, row) in slow.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            assert!((fast.get(a, b) - v).abs() <= 1e-14 * (1.0 + v.abs()));
        }
    }
}

#[test]
fn jacobi_matches_bisection_oracle() {
    let mut r = rng(4);
    for _ in 0..50 {
        let k = r.random_range(1..=8);
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = r.random_range(-5.0..5.0);
                data[i * k + j] = v;
                data[j * k + i] = v;
            }
        }
        let rows: Vec<Vec<f64>> = data.chunks(k).map(|c| c.to_vec()).collect();
        let oracle = bisect_eigenvalues(&rows);
        let got = sym_eigenvalues(&GramMatrix::from_symmetric(k, data).unwrap())
            .unwrap()
            .eigenvalues;
        for (g, o) in got.iter().zip(&oracle) {
            assert!(
                (g - o).abs() <= 1e-8 * (1.0 + o.abs()),
                "{got:?} vs {oracle:?}"
            );
        }
    }
}

#[test]
fn large_gaussian_csv_roundtrip() {
    let psi = generate(&GeneratorSpec::new(Family::Gaussian, 100, 30, 2024)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    framesense::csvio::write_matrix(&path, &psi).unwrap();
    let back = framesense::csvio::read_matrix(&path).unwrap();
    assert_eq!(back.as_slice(), psi.as_slice());
    assert_eq!(
        std::fs::read(&path).unwrap(),
        format_matrix(&psi).into_bytes()
    );
}
