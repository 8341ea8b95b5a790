//! Dense statevector simulation over `n` sites of uniform local dimension 2 or 3.
//!
//! Basis index `i` is read as a big-endian base-`d` digit string: site 0 is the
//! most significant digit.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encodings::DiagonalCost;
use crate::error::{Error, Result};
use crate::gates::unitarity_error;
use crate::CMatrix;

/// Default cap on the state size: 18 qubit-equivalents.
pub const DEFAULT_MAX_AMPLITUDES: usize = 1 << 18;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Check every ingested gate matrix for unitarity.
    pub strict_unitary: bool,
    pub max_amplitudes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            strict_unitary: true,
            max_amplitudes: DEFAULT_MAX_AMPLITUDES,
        }
    }
}

impl SimConfig {
    /// Skip unitarity checks; for inner loops over gates that are unitary by construction.
    pub fn fast() -> Self {
        SimConfig {
            strict_unitary: false,
            ..Self::default()
        }
    }
}

/// A basis state index together with its per-site digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub index: usize,
    pub digits: Vec<u8>,
}

impl BasisIndex {
    pub fn decode(index: usize, local_dim: usize, num_sites: usize) -> Self {
        let mut digits = vec![0u8; num_sites];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % local_dim) as u8;
            rest /= local_dim;
        }
        BasisIndex { index, digits }
    }

    pub fn encode(digits: &[u8], local_dim: usize) -> Self {
        let index = digits.iter().fold(0usize, |acc, &d| acc * local_dim + d as usize);
        BasisIndex {
            index,
            digits: digits.to_vec(),
        }
    }
}

/// Writes the digits of `index` into `out` (big-endian, one per site).
pub(crate) fn digits_into(index: usize, local_dim: usize, out: &mut [u8]) {
    let mut rest = index;
    for d in out.iter_mut().rev() {
        *d = (rest % local_dim) as u8;
        rest /= local_dim;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    local_dim: usize,
    num_sites: usize,
    amplitudes: Vec<Complex64>,
    config: SimConfig,
}

impl Statevector {
    /// `|0...0>` on `num_sites` sites.
    pub fn init_ground(num_sites: usize, local_dim: usize) -> Result<Self> {
        Self::init_ground_with(num_sites, local_dim, SimConfig::default())
    }

    pub fn init_ground_with(num_sites: usize, local_dim: usize, config: SimConfig) -> Result<Self> {
        let dim = checked_dim(num_sites, local_dim, config.max_amplitudes)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            local_dim,
            num_sites,
            amplitudes,
            config,
        })
    }

    /// Wraps raw amplitudes. The vector must already be normalized.
    pub fn from_amplitudes(local_dim: usize, num_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let config = SimConfig::default();
        let dim = checked_dim(num_sites, local_dim, config.max_amplitudes)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Statevector {
            local_dim,
            num_sites,
            amplitudes,
            config,
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn config(&self) -> SimConfig {
        self.config
    }

    pub fn set_config(&mut self, config: SimConfig) {
        self.config = config;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.num_sites - 1 - site) as u32)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.num_sites {
            return Err(Error::SiteOutOfRange {
                site,
                num_sites: self.num_sites,
            });
        }
        Ok(())
    }

    fn check_matrix(&self, matrix: &CMatrix, size: usize) -> Result<()> {
        let (r, c) = matrix.dim();
        if r != size || c != size {
            return Err(Error::MatrixShape {
                expected: size,
                found: if r != size { r } else { c },
            });
        }
        if self.config.strict_unitary {
            let err = unitarity_error(matrix);
            if err > UNITARY_TOL {
                return Err(Error::NotUnitary(err));
            }
        }
        Ok(())
    }

    /// Applies a `d x d` matrix to one site in place.
    pub fn apply_single(&mut self, site: usize, matrix: &CMatrix) -> Result<()> {
        self.check_site(site)?;
        self.check_matrix(matrix, self.local_dim)?;
        let d = self.local_dim;
        let stride = self.stride(site);
        let block = stride * d;
        let m: Vec<Complex64> = matrix.iter().copied().collect();
        let mut buf = [Complex64::new(0.0, 0.0); 3];
        for base in (0..self.amplitudes.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, b) in buf.iter_mut().enumerate().take(d) {
                    *b = self.amplitudes[start + k * stride];
                }
                for r in 0..d {
                    let row = &m[r * d..(r + 1) * d];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += row[k] * buf[k];
                    }
                    self.amplitudes[start + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Applies a `d^2 x d^2` matrix to an ordered site pair in place.
    ///
    /// Row/column index of `matrix` is `d * digit(site_a) + digit(site_b)`.
    pub fn apply_two(&mut self, site_a: usize, site_b: usize, matrix: &CMatrix) -> Result<()> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        if site_a == site_b {
            return Err(Error::DuplicateSite(site_a));
        }
        let d = self.local_dim;
        let dd = d * d;
        self.check_matrix(matrix, dd)?;
        let sa = self.stride(site_a);
        let sb = self.stride(site_b);
        let m: Vec<Complex64> = matrix.iter().copied().collect();
        let offsets: Vec<usize> = (0..dd).map(|k| (k / d) * sa + (k % d) * sb).collect();
        let mut buf = [Complex64::new(0.0, 0.0); 9];
        for start in 0..self.amplitudes.len() {
            // visit each group once, from the member with both digits zero
            if !(start / sa).is_multiple_of(d) || !(start / sb).is_multiple_of(d) {
                continue;
            }
            for (k, &off) in offsets.iter().enumerate() {
                buf[k] = self.amplitudes[start + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = &m[r * dd..(r + 1) * dd];
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dd {
                    acc += row[k] * buf[k];
                }
                self.amplitudes[start + off] = acc;
            }
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum_i p_i cost(i)` for a cost diagonal in the computational basis.
    pub fn expectation_diagonal(&self, cost: &DiagonalCost) -> Result<f64> {
        let expected = cost.dim();
        if expected != self.dim() || cost.local_dim() != self.local_dim {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(cost.expectation(&self.probabilities()))
    }

    /// I.i.d. basis-state samples; deterministic for a fixed seed.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<BasisIndex> {
        self.sample_indices(shots, seed)
            .into_iter()
            .map(|i| BasisIndex::decode(i, self.local_dim, self.num_sites))
            .collect()
    }

    pub fn sample_indices(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = WeightedIndex::new(self.probabilities()).expect("a normalized state has positive total weight");
        (0..shots).map(|_| dist.sample(&mut rng)).collect()
    }
}

fn checked_dim(num_sites: usize, local_dim: usize, cap: usize) -> Result<usize> {
    if local_dim != 2 && local_dim != 3 {
        return Err(Error::UnsupportedDimension(local_dim));
    }
    if num_sites == 0 {
        return Err(Error::InvalidArgument("a state needs at least one site".into()));
    }
    let too_many = Error::TooManySites {
        sites: num_sites,
        local_dim,
        cap,
    };
    let exp = u32::try_from(num_sites).map_err(|_| Error::InvalidArgument("site count".into()))?;
    match local_dim.checked_pow(exp) {
        Some(dim) if dim <= cap => Ok(dim),
        _ => Err(too_many),
    }
}
