//! Seeded sensing-matrix families.
//!
//! Every family is a pure function of its [`GeneratorSpec`]. Random families
//! draw from a ChaCha8 stream keyed by the generator seed, so output is identical
//! across platforms and thread schedules.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, row_normalize, SensingMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    GaussianRowNormalized,
    RandomTightFrame,
    Bernoulli,
    DctFrame,
    StackedScaled,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Gaussian,
        Family::GaussianRowNormalized,
        Family::RandomTightFrame,
        Family::Bernoulli,
        Family::DctFrame,
        Family::StackedScaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::GaussianRowNormalized => "gaussian_row_normalized",
            Family::RandomTightFrame => "random_tight_frame",
            Family::Bernoulli => "bernoulli",
            Family::DctFrame => "dct_frame",
            Family::StackedScaled => "stacked_scaled",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown matrix family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    /// Multiplier `C > 1` of the second block; `stacked_scaled` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Standard deviation of Gaussian entries (default 1); `gaussian` and
    /// `stacked_scaled` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_std: Option<f64>,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, k: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            k,
            seed,
            scale: None,
            entry_std: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n == 0 || self.k == 0 {
            return bad(format!(
                "N and K must be positive, got N={}, K={}",
                self.n, self.k
            ));
        }
        match self.family {
            Family::StackedScaled => match self.scale {
                Some(c) if c > 1.0 && c.is_finite() => {}
                Some(c) => return bad(format!("stacked_scaled needs scale C > 1, got {c}")),
                None => return bad("stacked_scaled needs a scale C > 1".into()),
            },
            f if self.scale.is_some() => {
                return bad(format!(
                    "scale is only meaningful for stacked_scaled, not {f}"
                ))
            }
            _ => {}
        }
        match (self.family, self.entry_std) {
            (Family::Gaussian | Family::StackedScaled, Some(s)) if !(s > 0.0 && s.is_finite()) => {
                return bad(format!("entry_std must be positive, got {s}"))
            }
            (Family::Gaussian | Family::StackedScaled, _) | (_, None) => {}
            (f, Some(_)) => return bad(format!("entry_std is not used by {f}")),
        }
        match self.family {
            Family::RandomTightFrame if self.n <= self.k => bad(format!(
                "random_tight_frame needs N > K, got N={}, K={}",
                self.n, self.k
            )),
            Family::DctFrame if self.n < self.k => bad(format!(
                "dct_frame needs N >= K, got N={}, K={}",
                self.n, self.k
            )),
            Family::StackedScaled if !self.n.is_multiple_of(2) => {
                bad(format!("stacked_scaled needs an even N, got {}", self.n))
            }
            _ => Ok(()),
        }
    }
}

/// Mixes a master seed with a stream index (SplitMix64 finalizer), so each
/// trial gets its own independent seed.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal draws by the Box–Muller transform, both outputs used.
struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

fn gaussian(n: usize, k: usize, std: f64, seed: u64) -> Result<SensingMatrix> {
    let mut normals = Normals::new(seed);
    let data = (0..n * k).map(|_| std * normals.next()).collect();
    SensingMatrix::from_row_major(n, k, data)
}

/// Orthonormalizes the columns of `psi` with two passes of modified
/// Gram–Schmidt.
fn orthonormalize_columns(psi: &SensingMatrix) -> Result<SensingMatrix> {
    let (n, k) = (psi.n_rows(), psi.n_cols());
    let mut cols: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..n).map(|i| psi.get(i, j)).collect())
        .collect();
    for j in 0..k {
        for _pass in 0..2 {
            for p in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[p], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[p]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).sqrt();
        if !(norm > 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "column {} is numerically dependent on the previous ones",
                j + 1
            )));
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut data = vec![0.0; n * k];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            data[i * k + j] = *x;
        }
    }
    SensingMatrix::from_row_major(n, k, data)
}

/// Column `k` is `cos(π(2n+1)k / (2N))` over rows `n = 0..N`, scaled to unit
/// norm.
fn dct_frame(n: usize, k: usize) -> Result<SensingMatrix> {
    let mut data = vec![0.0; n * k];
    for col in 0..k {
        let norm = if col == 0 {
            (n as f64).sqrt()
        } else {
            (n as f64 / 2.0).sqrt()
        };
        for row in 0..n {
            let angle = PI * (2 * row + 1) as f64 * col as f64 / (2 * n) as f64;
            data[row * k + col] = angle.cos() / norm;
        }
    }
    SensingMatrix::from_row_major(n, k, data)
}

pub fn generate(spec: &GeneratorSpec) -> Result<SensingMatrix> {
    spec.validate()?;
    let (n, k, seed) = (spec.n, spec.k, spec.seed);
    let std = spec.entry_std.unwrap_or(1.0);
    match spec.family {
        Family::Gaussian => gaussian(n, k, std, seed),
        Family::GaussianRowNormalized => row_normalize(&gaussian(n, k, 1.0, seed)?),
        Family::RandomTightFrame => orthonormalize_columns(&gaussian(n, k, 1.0, seed)?),
        Family::Bernoulli => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = (0..n * k)
                .map(|_| if rng.next_u64() >> 63 == 0 { -1.0 } else { 1.0 })
                .collect();
            SensingMatrix::from_row_major(n, k, data)
        }
        Family::DctFrame => dct_frame(n, k),
        Family::StackedScaled => {
            let c = spec.scale.expect("validated");
            let top = gaussian(n / 2, k, std, seed)?;
            let mut data = top.as_slice().to_vec();
            data.extend(top.as_slice().iter().map(|x| c * x));
            SensingMatrix::from_row_major(n, k, data)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csvio::format_matrix;
    use crate::linalg::{frame_potential_all, gram};

    #[test]
    fn tight_frame_has_orthonormal_columns() {
        let psi = generate(&GeneratorSpec::new(Family::RandomTightFrame, 20, 5, 3)).unwrap();
        let all: Vec<usize> = (0..20).collect();
        let t = gram(&psi, &all).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((t.get(i, j) - want).abs() < 1e-10);
            }
        }
        assert!((frame_potential_all(&psi) - 5.0).abs() < 1e-10);
        // rows are generally not unit norm
        assert!((0..20).any(|i| (psi.row_norm(i) - psi.row_norm(0)).abs() > 1e-3));
    }

    #[test]
    fn bernoulli_entries_are_signs() {
        let psi = generate(&GeneratorSpec::new(Family::Bernoulli, 30, 7, 11)).unwrap();
        assert!(psi.as_slice().iter().all(|&x| x == 1.0 || x == -1.0));
        assert!((0..30).all(|i| psi.row_energy(i) == 7.0));
        let plus = psi.as_slice().iter().filter(|&&x| x > 0.0).count();
        assert!(plus > 60 && plus < 150);
    }

    #[test]
    fn gaussian_is_deterministic() {
        let spec = GeneratorSpec::new(Family::Gaussian, 10, 4, 42);
        let a = format_matrix(&generate(&spec).unwrap());
        let b = format_matrix(&generate(&spec).unwrap());
        assert_eq!(a, b);
        let other = format_matrix(&generate(&GeneratorSpec { seed: 43, ..spec }).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn row_normalized_family() {
        let psi = generate(&GeneratorSpec::new(Family::GaussianRowNormalized, 12, 3, 5)).unwrap();
        assert!((0..12).all(|i| (psi.row_norm(i) - 1.0).abs() < 1e-15));
    }

    #[test]
    fn stacked_blocks_are_parallel() {
        let spec = GeneratorSpec {
            scale: Some(3.0),
            ..GeneratorSpec::new(Family::StackedScaled, 8, 3, 1)
        };
        let psi = generate(&spec).unwrap();
        for i in 0..4 {
            assert!((psi.row_norm(i + 4) / psi.row_norm(i) - 3.0).abs() < 1e-14);
            for j in 0..3 {
                assert_eq!(psi.get(i + 4, j), 3.0 * psi.get(i, j));
            }
        }
    }

    #[test]
    fn dct_columns_are_orthonormal() {
        let psi = generate(&GeneratorSpec::new(Family::DctFrame, 16, 6, 0)).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let t = gram(&psi, &all).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((t.get(i, j) - want).abs() < 1e-12);
            }
        }
        // seed is ignored
        let again = generate(&GeneratorSpec::new(Family::DctFrame, 16, 6, 99)).unwrap();
        assert_eq!(psi, again);
    }

    #[test]
    fn parameter_mismatches() {
        let mut s = GeneratorSpec::new(Family::StackedScaled, 7, 2, 0);
        s.scale = Some(2.0);
        assert!(generate(&s).is_err(), "odd N");
        s.n = 8;
        s.scale = Some(0.5);
        assert!(generate(&s).is_err(), "C <= 1");
        s.scale = None;
        assert!(generate(&s).is_err(), "missing C");

        let mut g = GeneratorSpec::new(Family::Gaussian, 4, 2, 0);
        g.scale = Some(2.0);
        assert!(generate(&g).is_err());

        let mut b = GeneratorSpec::new(Family::Bernoulli, 4, 2, 0);
        b.entry_std = Some(2.0);
        assert!(generate(&b).is_err());

        assert!(generate(&GeneratorSpec::new(Family::RandomTightFrame, 3, 3, 0)).is_err());
        assert!(generate(&GeneratorSpec::new(Family::Gaussian, 0, 3, 0)).is_err());
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            assert_eq!(
                serde_json::to_string(&f).unwrap(),
                format!("\"{}\"", f.name())
            );
        }
    }

    #[test]
    fn stream_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| stream_seed(7, i)).collect();
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 100);
        assert_ne!(stream_seed(7, 0), stream_seed(8, 0));
    }
}
