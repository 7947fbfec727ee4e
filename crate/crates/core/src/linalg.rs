//! Dense small-matrix numerics: the sensing matrix, Gram matrices, a cyclic
//! Jacobi eigensolver, frame potential, least-squares MSE and the
//! least-squares estimator itself.
//!
//! Index sets are 0-based slices of row indices. Every routine here is a pure
//! function of its inputs.

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a Gram matrix is treated as
/// rank deficient (`λ_k < RANK_TOL · λ_1`).
pub const RANK_TOL: f64 = 1e-10;

/// Rows with a norm at or below this value cannot be normalized.
pub const ZERO_ROW_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-12;

/// The `N × K` linear model mapping `K` parameters to `N` candidate
/// measurement locations. Stored row-major; row `i` is the sensing vector of
/// location `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    row_norms: Vec<f64>,
}

impl SensingMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        let row_norms = data.chunks_exact(cols).map(|r| dot(r, r).sqrt()).collect();
        Ok(Self {
            rows,
            cols,
            data,
            row_norms,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n * k);
        for r in rows {
            let r = r.as_ref();
            if r.len() != k {
                return Err(Error::Dimension(format!(
                    "ragged rows: expected {k} columns, got {}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, k, data)
    }

    pub fn identity(k: usize) -> Result<Self> {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        Self::from_row_major(k, k, data)
    }

    /// Number of candidate locations `N`.
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    /// Number of parameters `K`.
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// `‖ψ_i‖₂`
    pub fn row_norm(&self, i: usize) -> f64 {
        self.row_norms[i]
    }

    /// `‖ψ_i‖₂²`, the sensing energy of a single row.
    pub fn row_energy(&self, i: usize) -> f64 {
        let r = self.row(i);
        dot(r, r)
    }

    /// `Σ_i ‖ψ_i‖²` over all rows.
    pub fn total_energy(&self) -> f64 {
        (0..self.rows).map(|i| self.row_energy(i)).sum()
    }

    /// Sub-matrix made of the selected rows, in selection order.
    pub fn select(&self, sel: &[usize]) -> Result<SensingMatrix> {
        validate_selection(sel, self.rows)?;
        let mut data = Vec::with_capacity(sel.len() * self.cols);
        for &i in sel {
            data.extend_from_slice(self.row(i));
        }
        Self::from_row_major(sel.len(), self.cols, data)
    }

    pub fn scaled(&self, factor: f64) -> Result<SensingMatrix> {
        Self::from_row_major(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x * factor).collect(),
        )
    }
}

/// Symmetric `K × K` Gram matrix `T = Ψ_selᵀ Ψ_sel`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    order: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    /// Builds a Gram matrix from a full row-major buffer, symmetrizing from
    /// the upper triangle.
    pub fn from_symmetric(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != order * order {
            return Err(Error::ShapeMismatch {
                expected: order * order,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / order,
                col: pos % order,
            });
        }
        let mut data = data;
        for i in 0..order {
            for j in 0..i {
                data[i * order + j] = data[j * order + i];
            }
        }
        Ok(Self { order, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    /// `‖T‖_F² = trace(TᵀT)`
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// Eigenvalues of a Gram matrix, sorted descending, with the summary
/// statistics used by the MSE bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `K / Σ 1/λ_k`; `None` when some value is not strictly positive.
    pub harmonic_mean: Option<f64>,
    pub arithmetic_mean: f64,
    /// Population standard deviation `sqrt(1/K Σ (λ_k − A)²)`.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

impl Spectrum {
    /// Summary statistics of an arbitrary set of values. The values are
    /// sorted descending.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if let Some(pos) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: pos, col: 0 });
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let n = values.len() as f64;
        let arithmetic_mean = values.iter().sum::<f64>() / n;
        let var = values
            .iter()
            .map(|v| (v - arithmetic_mean).powi(2))
            .sum::<f64>()
            / n;
        let harmonic_mean = if values.iter().all(|&v| v > 0.0) {
            Some(n / values.iter().map(|v| 1.0 / v).sum::<f64>())
        } else {
            None
        };
        Ok(Self {
            min: values[values.len() - 1],
            max: values[0],
            eigenvalues: values,
            harmonic_mean,
            arithmetic_mean,
            std_dev: var.sqrt(),
        })
    }

    pub fn largest(&self) -> f64 {
        self.max
    }

    pub fn smallest(&self) -> f64 {
        self.min
    }

    /// True when the smallest eigenvalue falls under the relative rank
    /// threshold.
    pub fn is_rank_deficient(&self) -> bool {
        !(self.max > 0.0) || self.min < RANK_TOL * self.max
    }
}

/// Measurement noise: i.i.d. with variance `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn unit() -> Self {
        Self { sigma2: 1.0 }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::unit()
    }
}

/// Least-squares mean square error. Rank-deficient selections have no
/// bounded MSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mse {
    Finite(f64),
    Unbounded,
}

impl Mse {
    /// The MSE as a float, `+inf` when unbounded.
    pub fn value(self) -> f64 {
        match self {
            Mse::Finite(v) => v,
            Mse::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Mse::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Mse::Finite(v) => Some(v),
            Mse::Unbounded => None,
        }
    }
}

impl std::fmt::Display for Mse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mse::Finite(v) => write!(f, "{v}"),
            Mse::Unbounded => f.write_str("unbounded"),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks that `sel` is a nonempty set of distinct indices below `n`.
pub fn validate_selection(sel: &[usize], n: usize) -> Result<()> {
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut seen = vec![false; n];
    for &i in sel {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::DuplicateIndex { index: i });
        }
        seen[i] = true;
    }
    Ok(())
}

/// `T = Ψ_selᵀ Ψ_sel`, computed on the upper triangle and mirrored.
pub fn gram(psi: &SensingMatrix, sel: &[usize]) -> Result<GramMatrix> {
    validate_selection(sel, psi.n_rows())?;
    let k = psi.n_cols();
    let mut t = vec![0.0; k * k];
    for &s in sel {
        let r = psi.row(s);
        for a in 0..k {
            let ra = r[a];
            if ra == 0.0 {
                continue;
            }
            for b in a..k {
                t[a * k + b] += ra * r[b];
            }
        }
    }
    GramMatrix::from_symmetric(k, t)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-12 · ‖T‖_F`; fails after 100 sweeps.
pub fn sym_eigenvalues(t: &GramMatrix) -> Result<Spectrum> {
    let values = jacobi_eigenvalues(t.as_slice(), t.order())?;
    Spectrum::from_values(values)
}

fn jacobi_eigenvalues(input: &[f64], n: usize) -> Result<Vec<f64>> {
    // Work on T / max|T_ij| so squared entries neither overflow nor underflow.
    let peak = input.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut a: Vec<f64> = input.iter().map(|x| x / peak).collect();
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_REL_TOL * norm;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < tol {
            return Ok((0..n).map(|i| peak * a[i * n + i]).collect());
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    if off_norm(&a) < tol {
        return Ok((0..n).map(|i| peak * a[i * n + i]).collect());
    }
    Err(Error::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// `FP = Σ_{i,j ∈ sel} ⟨ψ_i, ψ_j⟩²`, diagonal terms included.
pub fn frame_potential(psi: &SensingMatrix, sel: &[usize]) -> Result<f64> {
    validate_selection(sel, psi.n_rows())?;
    let mut fp = 0.0;
    for (a, &i) in sel.iter().enumerate() {
        let ri = psi.row(i);
        let e = dot(ri, ri);
        fp += e * e;
        for &j in &sel[a + 1..] {
            let g = dot(ri, psi.row(j));
            fp += 2.0 * g * g;
        }
    }
    Ok(fp)
}

/// Frame potential of the whole matrix.
pub fn frame_potential_all(psi: &SensingMatrix) -> f64 {
    let all: Vec<usize> = (0..psi.n_rows()).collect();
    frame_potential(psi, &all).expect("full selection is valid")
}

/// Least-squares MSE `σ² Σ_k 1/λ_k` of the selected rows.
pub fn mse(psi: &SensingMatrix, sel: &[usize], noise: NoiseModel) -> Result<Mse> {
    let spectrum = sym_eigenvalues(&gram(psi, sel)?)?;
    Ok(mse_from_spectrum(&spectrum, noise))
}

pub fn mse_from_spectrum(spectrum: &Spectrum, noise: NoiseModel) -> Mse {
    if spectrum.is_rank_deficient() {
        return Mse::Unbounded;
    }
    let inv_sum: f64 = spectrum.eigenvalues.iter().map(|l| 1.0 / l).sum();
    Mse::Finite(noise.sigma2() * inv_sum)
}

/// Least-squares estimate `α̂ = (Ψ_selᵀΨ_sel)⁻¹ Ψ_selᵀ f`, solved through a
/// Householder QR factorization of `Ψ_sel`.
pub fn least_squares(psi: &SensingMatrix, sel: &[usize], f: &[f64]) -> Result<Vec<f64>> {
    validate_selection(sel, psi.n_rows())?;
    if f.len() != sel.len() {
        return Err(Error::Dimension(format!(
            "measurement vector has {} entries for {} selected rows",
            f.len(),
            sel.len()
        )));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "measurement vector has non-finite entries".into(),
        ));
    }
    let k = psi.n_cols();
    if sel.len() < k || sym_eigenvalues(&gram(psi, sel)?)?.is_rank_deficient() {
        return Err(Error::RankDeficient);
    }
    let m = sel.len();
    let sub = psi.select(sel)?;
    let mut a = sub.as_slice().to_vec();
    let mut b = f.to_vec();

    for j in 0..k {
        let col_norm = (j..m).map(|i| a[i * k + j].powi(2)).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[j * k + j] > 0.0 {
            -col_norm
        } else {
            col_norm
        };
        let mut v: Vec<f64> = (j..m).map(|i| a[i * k + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..k {
            let proj: f64 = (j..m).map(|i| v[i - j] * a[i * k + c]).sum::<f64>() * 2.0 / vnorm2;
            for i in j..m {
                a[i * k + c] -= proj * v[i - j];
            }
        }
        let proj: f64 = (j..m).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in j..m {
            b[i] -= proj * v[i - j];
        }
    }

    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|c| a[j * k + c] * x[c]).sum();
        x[j] = (b[j] - s) / a[j * k + j];
    }
    Ok(x)
}

/// Copy of `psi` with every row scaled to unit ℓ₂ norm.
pub fn row_normalize(psi: &SensingMatrix) -> Result<SensingMatrix> {
    let k = psi.n_cols();
    let mut data = Vec::with_capacity(psi.n_rows() * k);
    for i in 0..psi.n_rows() {
        let norm = psi.row_norm(i);
        if !(norm > ZERO_ROW_TOL) {
            return Err(Error::ZeroRow { row: i });
        }
        data.extend(psi.row(i).iter().map(|x| x / norm));
    }
    SensingMatrix::from_row_major(psi.n_rows(), k, data)
}

/// `|⟨ψ_i, ψ_j⟩| / (‖ψ_i‖ ‖ψ_j‖)`, clamped to `[0, 1]`.
pub fn coherence(psi: &SensingMatrix, i: usize, j: usize) -> Result<f64> {
    let n = psi.n_rows();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
        if !(psi.row_norm(idx) > ZERO_ROW_TOL) {
            return Err(Error::ZeroRow { row: idx });
        }
    }
    let c = dot(psi.row(i), psi.row(j)).abs() / (psi.row_norm(i) * psi.row_norm(j));
    Ok(c.min(1.0))
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// if a pivot is not positive.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|p| l[i * n + p] * l[j * n + p]).sum();
            if i == j {
                let d = a[i * n + i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub(crate) fn spd_inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let l = cholesky(a, n)?;
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
    let mut linv = vec![0.0; n * n];
    for c in 0..n {
        for i in c..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (c..i).map(|p| l[i * n + p] * linv[p * n + c]).sum();
            linv[i * n + c] = (rhs - s) / l[i * n + i];
        }
    }
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (i..n).map(|p| linv[p * n + i] * linv[p * n + j]).sum();
            inv[i * n + j] = s;
            inv[j * n + i] = s;
        }
    }
    Some(inv)
}

/// Log-determinant of a symmetric positive definite matrix.
pub(crate) fn spd_log_det(a: &[f64], n: usize) -> Option<f64> {
    let l = cholesky(a, n)?;
    Some((0..n).map(|i| 2.0 * l[i * n + i].ln()).sum())
}
