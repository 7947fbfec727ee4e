//! Approximation factors and sandwich bounds for frame-potential placement.
//!
//! * `γ = 1 + (FP(Ψ)·K / L_MIN² − 1) / e` bounds the frame potential of the
//!   greedy selection against the best `L`-subset.
//! * `η = γ (d+δ)² / (d−δ)² · L_MAX / L_MIN` does the same for the MSE on
//!   `(δ, L)`-bounded frames, with `d = L_MEAN / K`.
//! * For a full-rank selection `A` with Gram spectrum `λ_1 ≥ … ≥ λ_K`,
//!   `K·FP(Ψ_A) / (L_MAX λ_1²) ≤ MSE(Ψ_A)/σ² ≤ K·FP(Ψ_A) / (L_MIN λ_K²)`.

use std::f64::consts::E;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::combin::{binomial, Combinations};
use crate::csvio::fmt_f64;
use crate::error::{Error, Result};
use crate::linalg::{
    frame_potential, frame_potential_all, gram, sym_eigenvalues, Mse, SensingMatrix,
};

/// Largest `C(N, L)` that [`delta_bound`] will enumerate.
pub const DELTA_GUARD: u64 = 1_000_000;

/// Extremes and mean of the sensing energy `L_A = Σ_{i∈A} ‖ψ_i‖²` over all
/// size-`L` subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyExtremes {
    pub l_min: f64,
    pub l_max: f64,
    pub l_mean: f64,
}

/// Energy extremes from sorted row energies: the `L` smallest and largest
/// squared norms, and `L_MEAN = (L/N) Σ ‖ψ_i‖²`.
pub fn l_min_max(psi: &SensingMatrix, l: usize) -> Result<EnergyExtremes> {
    let n = psi.n_rows();
    if l == 0 || l > n {
        return Err(Error::SensorCount { l, min: 1, max: n });
    }
    let mut energies: Vec<f64> = (0..n).map(|i| psi.row_energy(i)).collect();
    energies.sort_by(f64::total_cmp);
    let l_min = energies[..l].iter().sum();
    let l_max = energies[n - l..].iter().sum();
    let l_mean = l as f64 / n as f64 * energies.iter().sum::<f64>();
    Ok(EnergyExtremes {
        l_min,
        l_max,
        l_mean,
    })
}

/// Frame-potential approximation factor `γ`, computed on the matrix as given.
pub fn fp_approx_factor(psi: &SensingMatrix, l: usize) -> Result<f64> {
    let (n, k) = (psi.n_rows(), psi.n_cols());
    if l < k || l > n {
        return Err(Error::SensorCount { l, min: k, max: n });
    }
    let ext = l_min_max(psi, l)?;
    if !(ext.l_min > 0.0) {
        return Err(Error::InvalidParameter(
            "L_MIN is zero: the matrix has too many zero rows".into(),
        ));
    }
    let fp = frame_potential_all(psi);
    Ok(1.0 + (fp * k as f64 / (ext.l_min * ext.l_min) - 1.0) / E)
}

/// MSE approximation factor `η`. Fails when `d ≤ δ`, where the spectral
/// lower bound `d − δ` no longer keeps eigenvalues away from zero.
pub fn mse_approx_factor(gamma: f64, d: f64, delta: f64, l_min: f64, l_max: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    if !(l_min > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "L_MIN must be positive, got {l_min}"
        )));
    }
    if !(d > delta) {
        return Err(Error::VacuousBound { d, delta });
    }
    Ok(gamma * (d + delta).powi(2) / (d - delta).powi(2) * l_max / l_min)
}

/// MSE sandwich `(lower, upper)` at unit noise variance for the selection
/// `sel`. The upper end is unbounded when the selection is rank deficient.
pub fn lemma3_bounds(
    psi: &SensingMatrix,
    sel: &[usize],
    l_min: f64,
    l_max: f64,
) -> Result<(f64, Mse)> {
    let spectrum = sym_eigenvalues(&gram(psi, sel)?)?;
    let fp = frame_potential(psi, sel)?;
    let k = psi.n_cols() as f64;
    let l1 = spectrum.largest();
    let lower = if l1 > 0.0 {
        k / l_max * fp / (l1 * l1)
    } else {
        0.0
    };
    let upper = if spectrum.is_rank_deficient() {
        Mse::Unbounded
    } else {
        let lk = spectrum.smallest();
        Mse::Finite(k / l_min * fp / (lk * lk))
    };
    Ok((lower, upper))
}

/// Smallest `δ` for which `Ψ` is `(δ, L)`-bounded: the largest distance
/// between any eigenvalue of any size-`L` subset Gram matrix and
/// `L_MEAN / K`.
///
/// Enumerates every subset, split across threads by leading index. The
/// reduction is a max, so the result does not depend on the thread count.
pub fn delta_bound(psi: &SensingMatrix, l: usize) -> Result<f64> {
    let n = psi.n_rows();
    let ext = l_min_max(psi, l)?;
    if binomial(n, l) > DELTA_GUARD as u128 {
        return Err(Error::EnumerationGuard {
            n,
            l,
            guard: DELTA_GUARD,
        });
    }
    let center = ext.l_mean / psi.n_cols() as f64;
    let per_lead: Vec<f64> = (0..=n - l)
        .into_par_iter()
        .map(|lead| -> Result<f64> {
            let mut worst = 0.0f64;
            let mut combos = Combinations::with_prefix(n, &[lead], l - 1);
            while let Some(subset) = combos.next_subset() {
                let s = sym_eigenvalues(&gram(psi, subset)?)?;
                for &lambda in &s.eigenvalues {
                    worst = worst.max((lambda - center).abs());
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(per_lead.into_iter().fold(0.0, f64::max))
}

/// Bounds on `A/H` (arithmetic over harmonic mean) from the spread of a set
/// of positive numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharmaInterval {
    pub lower: f64,
    pub upper: f64,
    /// The closed-form lower bound needs `M > 2S`; otherwise it is replaced
    /// by the trivial bound 1 and this flag is set.
    pub lower_clamped: bool,
}

impl SharmaInterval {
    pub fn contains(&self, ratio: f64, rel_tol: f64) -> bool {
        ratio >= self.lower * (1.0 - rel_tol) && ratio <= self.upper * (1.0 + rel_tol)
    }
}

/// `(M−S)² / (M(M−2S)) ≤ A/H ≤ (m+S)² / (m(m+2S))` with `S` the population
/// standard deviation, `m`/`M` the extremes.
///
/// `M − 2S` cancels badly when `m ≪ M`, so `S` and the differences are carried
/// in double-double arithmetic.
pub fn sharma_interval(values: &[f64]) -> Result<SharmaInterval> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter("need at least two values".into()));
    }
    if let Some(v) = values.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "values must be positive and finite, got {v}"
        )));
    }
    let n = values.len() as f64;
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let big_m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values
        .iter()
        .fold(Dd::ZERO, |acc, &v| acc.add(Dd::from(v)))
        .div(n);
    let var = values
        .iter()
        .fold(Dd::ZERO, |acc, &v| {
            let d = Dd::from(v).sub(mean);
            acc.add(d.mul(d))
        })
        .div(n);
    let sd = var.sqrt();
    let m_minus_2s = Dd::from(big_m).sub(sd).sub(sd);
    let (lower, lower_clamped) = if m_minus_2s.hi > 0.0 {
        let a = Dd::from(big_m).sub(sd).hi;
        (a * a / (big_m * m_minus_2s.hi), false)
    } else {
        (1.0, true)
    };
    let sd = sd.hi;
    let upper = (m + sd).powi(2) / (m * (m + 2.0 * sd));
    Ok(SharmaInterval {
        lower,
        upper,
        lower_clamped,
    })
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, o: Dd) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    fn sub(self, o: Dd) -> Self {
        self.add(Dd {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    fn mul(self, o: Dd) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, d: f64) -> Self {
        let q = self.hi / d;
        let r = self.sub(Dd::from(q).mul(Dd::from(d)));
        Self::renorm(q, r.hi / d)
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let r = self.sub(Dd::from(s).mul(Dd::from(s)));
        Self::renorm(s, r.hi / (2.0 * s))
    }
}

/// Frame potential, MSE and common eigenvalue of an `L × K` unit-norm tight
/// frame: `(L²/K, K²/L, L/K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UntfReference {
    pub fp: f64,
    pub mse: f64,
    pub lambda: f64,
}

pub fn untf_reference(l: usize, k: usize) -> Result<UntfReference> {
    if k == 0 || l < k {
        return Err(Error::SensorCount {
            l,
            min: k.max(1),
            max: usize::MAX,
        });
    }
    let (l, k) = (l as f64, k as f64);
    Ok(UntfReference {
        fp: l * l / k,
        mse: k * k / l,
        lambda: l / k,
    })
}

/// Large random matrix with i.i.d. entries of variance `1/K`,
/// `L = c1·K` sensors out of `N = c2·K` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpScenario {
    c1: f64,
    c2: f64,
    k: usize,
}

impl MpScenario {
    pub fn new(c1: f64, c2: f64, k: usize) -> Result<Self> {
        if !(c1 > 0.0 && c1 < 1.0 && c2 > 1.0 && c2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need c2 > 1 > c1 > 0, got c1={c1}, c2={c2}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("K must be positive".into()));
        }
        Ok(Self { c1, c2, k })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpOutcome {
    pub gamma: f64,
    pub eta: f64,
    pub spec_low: f64,
    pub spec_high: f64,
}

impl MpOutcome {
    pub fn report(&self, sc: &MpScenario) -> String {
        format!(
            "c1={}\nc2={}\nK={}\ngamma={}\nspec_low={}\nspec_high={}\neta={}\n\
             eta_note=closed-form value of gamma*((1+sqrt(c1))/(1-sqrt(c1)))^4; \
             the rounded figure eta~50 quoted for c1=0.25, c2=6 does not follow from it\n",
            sc.c1, sc.c2, sc.k, self.gamma, self.spec_low, self.spec_high, self.eta
        )
    }
}

/// Closed-form `γ`, `η` and the asymptotic spectrum edges
/// `√(1/c1)(1 ∓ √c1)²` for the scenario.
pub fn mp_scenario(sc: &MpScenario) -> MpOutcome {
    let gamma = 1.0 + (sc.c2 * sc.c2 - 1.0) / E;
    let r = sc.c1.sqrt();
    let scale = (1.0 / sc.c1).sqrt();
    let spec_low = scale * (1.0 - r).powi(2);
    let spec_high = scale * (1.0 + r).powi(2);
    let eta = gamma * ((1.0 + r) / (1.0 - r)).powi(4);
    MpOutcome {
        gamma,
        eta,
        spec_low,
        spec_high,
    }
}

/// Every bound for one `(Ψ, selection)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub gamma: f64,
    /// `None` when δ is unavailable or the bound is vacuous (`d ≤ δ`).
    pub eta: Option<f64>,
    pub l_min: f64,
    pub l_max: f64,
    pub l_mean: f64,
    pub d: f64,
    /// `None` when the subset enumeration guard was exceeded.
    pub delta: Option<f64>,
    pub lemma3_lower: f64,
    pub lemma3_upper: Mse,
}

impl BoundsReport {
    pub const CSV_HEADER: &'static str =
        "N,K,L,gamma,eta,l_min,l_max,l_mean,d,delta,lemma3_lower,lemma3_upper";

    /// Computes the report for `sel`; δ is enumerated only when
    /// `C(N, L) ≤ DELTA_GUARD`.
    pub fn compute(psi: &SensingMatrix, sel: &[usize]) -> Result<Self> {
        let (n, k, l) = (psi.n_rows(), psi.n_cols(), sel.len());
        let ext = l_min_max(psi, l)?;
        let gamma = fp_approx_factor(psi, l)?;
        let d = ext.l_mean / k as f64;
        let delta = match delta_bound(psi, l) {
            Ok(v) => Some(v),
            Err(Error::EnumerationGuard { .. }) => None,
            Err(e) => return Err(e),
        };
        let eta = match delta {
            Some(delta) => match mse_approx_factor(gamma, d, delta, ext.l_min, ext.l_max) {
                Ok(v) => Some(v),
                Err(Error::VacuousBound { .. }) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        let (lemma3_lower, lemma3_upper) = lemma3_bounds(psi, sel, ext.l_min, ext.l_max)?;
        Ok(Self {
            n,
            k,
            l,
            gamma,
            eta,
            l_min: ext.l_min,
            l_max: ext.l_max,
            l_mean: ext.l_mean,
            d,
            delta,
            lemma3_lower,
            lemma3_upper,
        })
    }

    fn eta_field(&self) -> String {
        match (self.eta, self.delta) {
            (Some(e), _) => fmt_f64(e),
            (None, Some(_)) => "vacuous".into(),
            (None, None) => "nan".into(),
        }
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_f64);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.l,
            fmt_f64(self.gamma),
            self.eta_field(),
            fmt_f64(self.l_min),
            fmt_f64(self.l_max),
            fmt_f64(self.l_mean),
            fmt_f64(self.d),
            opt(self.delta),
            fmt_f64(self.lemma3_lower),
            fmt_f64(self.lemma3_upper.value()),
        )
    }

    /// One `key=value` pair per line, keys in CSV column order.
    pub fn key_values(&self) -> String {
        let mut out = String::new();
        for (key, value) in Self::CSV_HEADER.split(',').zip(self.csv_row().split(',')) {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mse, NoiseModel, Spectrum};

    fn m(rows: &[&[f64]]) -> SensingMatrix {
        SensingMatrix::from_rows(rows).unwrap()
    }

    fn mercedes() -> SensingMatrix {
        let h = 3f64.sqrt() / 2.0;
        m(&[&[0.0, 1.0], &[-h, -0.5], &[h, -0.5]])
    }

    /// `n` equally spaced unit vectors in the plane: a unit-norm tight frame
    /// for `n ≥ 3`.
    fn harmonic(n: usize) -> SensingMatrix {
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        SensingMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn energy_extremes() {
        let e = l_min_max(&m(&[&[1.0, 0.0], &[0.0, 2.0], &[3.0, 0.0]]), 2).unwrap();
        assert_eq!((e.l_min, e.l_max), (5.0, 13.0));
        assert!((e.l_mean - 28.0 / 3.0).abs() < 1e-14);
        let e = l_min_max(&mercedes(), 2).unwrap();
        assert!((e.l_min - 2.0).abs() < 1e-15 && (e.l_max - 2.0).abs() < 1e-15);
        assert!(l_min_max(&mercedes(), 4).is_err());
    }

    #[test]
    fn gamma_examples() {
        let psi = harmonic(8);
        let g = fp_approx_factor(&psi, 4).unwrap();
        assert!((g - (1.0 + 3.0 / E)).abs() < 1e-12, "{g}");
        let g = fp_approx_factor(&psi, 8).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!(fp_approx_factor(&psi, 1).is_err());
        let zeros = m(&[&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(fp_approx_factor(&zeros, 2).is_err());
    }

    #[test]
    fn eta_examples() {
        assert_eq!(mse_approx_factor(1.7, 2.0, 0.0, 3.0, 3.0).unwrap(), 1.7);
        assert_eq!(mse_approx_factor(2.0, 2.0, 1.0, 1.0, 1.0).unwrap(), 18.0);
        assert!(matches!(
            mse_approx_factor(2.0, 1.0, 1.0, 1.0, 1.0),
            Err(Error::VacuousBound { .. })
        ));
        assert!(mse_approx_factor(2.0, 1.0, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn lemma3_collapses_on_tight_frames() {
        let (lo, hi) = lemma3_bounds(&mercedes(), &[0, 1, 2], 3.0, 3.0).unwrap();
        assert!((lo - 4.0 / 3.0).abs() < 1e-12);
        assert!((hi.value() - 4.0 / 3.0).abs() < 1e-12);

        let id = SensingMatrix::identity(3).unwrap();
        let (lo, hi) = lemma3_bounds(&id, &[0, 1, 2], 3.0, 3.0).unwrap();
        assert_eq!((lo, hi), (3.0, Mse::Finite(3.0)));
        assert_eq!(
            mse(&id, &[0, 1, 2], NoiseModel::unit()).unwrap(),
            Mse::Finite(3.0)
        );
    }

    #[test]
    fn lemma3_rank_deficient() {
        let psi = m(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let (lo, hi) = lemma3_bounds(&psi, &[0, 1], 5.0, 5.0).unwrap();
        assert_eq!(hi, Mse::Unbounded);
        assert!(lo > 0.0);
    }

    #[test]
    fn delta_examples() {
        let psi = m(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0],
        ]);
        assert!((delta_bound(&psi, 3).unwrap() - 1.0).abs() < 1e-12);

        // single subset: deviation of the full spectrum from L_MEAN/K
        let id = SensingMatrix::identity(3).unwrap();
        assert_eq!(delta_bound(&id, 3).unwrap(), 0.0);
        let diag = m(&[&[2.0, 0.0], &[0.0, 1.0]]);
        // spectrum {4, 1}, L_MEAN/K = 2.5
        assert!((delta_bound(&diag, 2).unwrap() - 1.5).abs() < 1e-14);

        let big = SensingMatrix::from_row_major(40, 1, vec![1.0; 40]).unwrap();
        assert!(matches!(
            delta_bound(&big, 20),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn sharma_examples() {
        let s = sharma_interval(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.lower, s.upper), (1.0, 1.0));
        let s = sharma_interval(&[1.0, 3.0]).unwrap();
        assert!((s.lower - 4.0 / 3.0).abs() < 1e-15);
        assert!((s.upper - 4.0 / 3.0).abs() < 1e-15);
        assert!(!s.lower_clamped);
        assert!(sharma_interval(&[1.0]).is_err());
        assert!(sharma_interval(&[1.0, 0.0]).is_err());
        assert!(sharma_interval(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn sharma_two_values_far_apart() {
        // (a+b)²/(4ab) is attained by both bounds; M − 2S = m must survive
        // the cancellation
        for (a, b) in [(1e-3, 1e3), (2.5e-7, 4.0), (1.0, 1.0 + 1e-9)] {
            let s = sharma_interval(&[a, b]).unwrap();
            let ratio = (a + b) * (a + b) / (4.0 * a * b);
            assert!(
                (s.lower - ratio).abs() <= 1e-14 * ratio,
                "{a} {b}: {s:?} vs {ratio}"
            );
            assert!(
                (s.upper - ratio).abs() <= 1e-14 * ratio,
                "{a} {b}: {s:?} vs {ratio}"
            );
        }
    }

    #[test]
    fn sharma_extreme_spread() {
        // Half the mass near zero and half at M puts S just below M/2, the
        // largest spread positive values allow.
        let mut v = vec![1e-9; 4];
        v.extend([1.0; 4]);
        let s = sharma_interval(&v).unwrap();
        let sp = Spectrum::from_values(v).unwrap();
        assert!(!s.lower_clamped);
        let ratio = sp.arithmetic_mean / sp.harmonic_mean.unwrap();
        assert!(s.contains(ratio, 1e-12), "{ratio} not in {s:?}");
    }

    #[test]
    fn untf_examples() {
        let u = untf_reference(3, 2).unwrap();
        assert_eq!((u.fp, u.lambda), (4.5, 1.5));
        assert!((u.mse - 4.0 / 3.0).abs() < 1e-15);
        let u = untf_reference(5, 5).unwrap();
        assert_eq!((u.fp, u.mse, u.lambda), (5.0, 5.0, 1.0));
        let u = untf_reference(100, 30).unwrap();
        assert!((u.fp - 1000.0 / 3.0).abs() < 1e-12);
        assert!((u.mse - 9.0).abs() < 1e-15);
        assert!((u.lambda - 10.0 / 3.0).abs() < 1e-15);
        assert!(untf_reference(2, 3).is_err());
    }

    #[test]
    fn mp_examples() {
        let sc = MpScenario::new(0.25, 6.0, 100).unwrap();
        let out = mp_scenario(&sc);
        assert!((out.gamma - (1.0 + 35.0 / E)).abs() < 1e-12);
        assert_eq!((out.spec_low, out.spec_high), (0.5, 4.5));
        assert!((out.eta - 81.0 * out.gamma).abs() < 1e-9);
        assert!((out.eta - 1123.93).abs() < 0.01, "{}", out.eta);
        assert!(out.report(&sc).contains("eta_note="));

        let near = mp_scenario(&MpScenario::new(0.25, 1.0 + 1e-9, 10).unwrap());
        assert!((near.gamma - 1.0).abs() < 1e-8);

        assert!(MpScenario::new(1.5, 6.0, 10).is_err());
        assert!(MpScenario::new(0.5, 0.9, 10).is_err());
    }

    #[test]
    fn report_serializations_agree() {
        let psi = harmonic(6);
        let r = BoundsReport::compute(&psi, &[0, 2, 4]).unwrap();
        assert_eq!(r.csv_row().split(',').count(), 12);
        let kv = r.key_values();
        assert!(kv.starts_with("N=6\nK=2\nL=3\n"));
        assert_eq!(kv.lines().count(), 12);
        assert!(r.gamma >= 1.0);
        assert!(r.l_min <= r.l_mean && r.l_mean <= r.l_max);
    }
}
