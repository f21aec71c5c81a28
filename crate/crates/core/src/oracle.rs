//! Reference spectrum by direct diagonalization in a truncated basis.
//!
//! The matrices here couple only states of equal parity, so each operator is
//! split into its even and odd blocks. Each block is symmetric with
//! bandwidth 2, and eigenvalues are located by bisection on the inertia of
//! `A − σI`, read off the pivots of a banded `LDLᵀ` factorization.

use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::{build_unsplit, BandedOperator};

/// Largest basis tried by [`oracle_energy`].
pub const MAX_DIMENSION: usize = 8192;
/// Extra basis states required beyond the number of levels requested.
pub const DIMENSION_MARGIN: usize = 10;

const MAX_BISECTION_STEPS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(
        "dimension {dimension} too small for {count} levels (need ≥ count + {DIMENSION_MARGIN})"
    )]
    DimensionTooSmall { dimension: usize, count: usize },
    #[error("unsupported coupling λ = {0}")]
    UnsupportedCoupling(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("level {state} not converged to {tolerance:e} at dimension cap {cap} (last change {last_change:e})")]
    DimensionCap {
        state: usize,
        cap: usize,
        tolerance: f64,
        last_change: f64,
    },
    #[error("eigenvalue bisection failed: {0}")]
    Numerical(String),
}

/// Symmetric matrix with nonzero entries only on the diagonal and the first
/// `bands.len()` off-diagonals.
#[derive(Debug, Clone)]
struct SymmetricBand {
    diag: Vec<f64>,
    /// `bands[d][i] = A[i][i + d + 1]`.
    bands: Vec<Vec<f64>>,
}

impl SymmetricBand {
    fn len(&self) -> usize {
        self.diag.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.diag[lo],
            d => self
                .bands
                .get(d - 1)
                .and_then(|b| b.get(lo))
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// Gershgorin interval containing the whole spectrum.
    fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let p = self.bands.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius: f64 = (i.saturating_sub(p)..(i + p + 1).min(n))
                .filter(|&j| j != i)
                .map(|j| self.at(i, j).abs())
                .sum();
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`.
    ///
    /// Sylvester's law of inertia applied to `A − σI = L D Lᵀ`. A pivot that
    /// underflows to zero is nudged to a tiny negative value, which counts
    /// an eigenvalue at `σ` as lying below it.
    fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let p = self.bands.len();
        let tiny = f64::EPSILON * (sigma.abs() + 1.0) * 1e-3;
        // Last p rows of L (sub-diagonal part) and their pivots.
        let mut l_rows: Vec<Vec<f64>> = vec![vec![0.0; p]; n];
        let mut pivots = vec![0.0; n];
        let mut negatives = 0;
        for i in 0..n {
            // L[i][j] for j in i-p..i stored at l_rows[i][i - j - 1].
            for j in i.saturating_sub(p)..i {
                let mut s = self.at(i, j);
                for q in i.saturating_sub(p)..j {
                    if j - q <= p {
                        s -= l_rows[i][i - q - 1] * l_rows[j][j - q - 1] * pivots[q];
                    }
                }
                l_rows[i][i - j - 1] = s / pivots[j];
            }
            let mut d = self.diag[i] - sigma;
            for q in i.saturating_sub(p)..i {
                let l = l_rows[i][i - q - 1];
                d -= l * l * pivots[q];
            }
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                negatives += 1;
            }
            pivots[i] = d;
        }
        negatives
    }

    /// The `k`-th smallest eigenvalue (0-based) by inertia bisection.
    fn eigenvalue(&self, k: usize, bounds: (f64, f64)) -> Result<f64, OracleError> {
        let (mut lo, mut hi) = bounds;
        let pad = 1e-9 * (lo.abs() + hi.abs() + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            Ok(0.5 * (lo + hi))
        } else {
            Err(OracleError::Numerical(format!(
                "level {k} bracket [{lo}, {hi}] did not close"
            )))
        }
    }

    fn lowest(&self, count: usize) -> Result<Vec<f64>, OracleError> {
        if self.diag.iter().any(|x| !x.is_finite())
            || self.bands.iter().flatten().any(|x| !x.is_finite())
        {
            return Err(OracleError::Numerical("non-finite matrix entry".into()));
        }
        let bounds = self.bounds();
        (0..count.min(self.len()))
            .map(|k| self.eigenvalue(k, bounds))
            .collect()
    }
}

/// Splits a `±2, ±4` coupled operator into its even and odd parity blocks.
fn parity_blocks(op: &BandedOperator) -> [SymmetricBand; 2] {
    let dim = op.dimension();
    [0usize, 1].map(|parity| {
        let states: Vec<usize> = (parity..dim).step_by(2).collect();
        let len = states.len();
        let diag = states.iter().map(|&m| op.diag()[m]).collect();
        let band1 = (0..len.saturating_sub(1))
            .map(|i| op.coupling(states[i], states[i + 1]))
            .collect();
        let band2 = (0..len.saturating_sub(2))
            .map(|i| op.coupling(states[i], states[i + 2]))
            .collect();
        SymmetricBand {
            diag,
            bands: vec![band1, band2],
        }
    })
}

/// Lowest `count` eigenvalues of the symmetric matrix `H_D + H_N`, ascending.
pub fn lowest_eigenvalues(op: &BandedOperator, count: usize) -> Result<Vec<f64>, OracleError> {
    let count = count.min(op.dimension());
    let [even, odd] = parity_blocks(op);
    let mut all = even.lowest(count)?;
    all.extend(odd.lowest(count)?);
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    Ok(all)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub lambda: f64,
    pub dimension: usize,
    pub eigenvalues: Vec<f64>,
    /// Per level `|E(dimension) − E(dimension / 2)|`; infinite when the half
    /// basis cannot hold the level.
    pub truncation_estimate: Vec<f64>,
}

fn check_lambda(lambda: f64) -> Result<(), OracleError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(OracleError::UnsupportedCoupling(lambda));
    }
    Ok(())
}

/// Lowest `count` levels of `p²/2 + x²/2 + λx⁴` in a basis of `dimension`
/// frequency-1 oscillator states.
pub fn diagonalize(
    lambda: f64,
    dimension: usize,
    count: usize,
) -> Result<OracleResult, OracleError> {
    check_lambda(lambda)?;
    if dimension < count + DIMENSION_MARGIN {
        return Err(OracleError::DimensionTooSmall { dimension, count });
    }
    let eigenvalues = lowest_eigenvalues(&build_unsplit(lambda, dimension), count)?;
    let half = dimension / 2;
    let coarse = lowest_eigenvalues(&build_unsplit(lambda, half.max(1)), count)?;
    let truncation_estimate = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, e)| coarse.get(i).map_or(f64::INFINITY, |c| (e - c).abs()))
        .collect();
    Ok(OracleResult {
        lambda,
        dimension,
        eigenvalues,
        truncation_estimate,
    })
}

/// Level `state_n`, doubling the basis from `max(64, 4n + 32)` until two
/// successive sizes agree within `tolerance · max(1, |E|)`.
pub fn oracle_energy(lambda: f64, state_n: usize, tolerance: f64) -> Result<f64, OracleError> {
    oracle_energy_capped(lambda, state_n, tolerance, MAX_DIMENSION)
}

fn oracle_energy_capped(
    lambda: f64,
    state_n: usize,
    tolerance: f64,
    cap: usize,
) -> Result<f64, OracleError> {
    check_lambda(lambda)?;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(OracleError::BadTolerance(tolerance));
    }
    let level = |dim: usize| -> Result<f64, OracleError> {
        let op = build_unsplit(lambda, dim);
        Ok(lowest_eigenvalues(&op, state_n + 1)?[state_n])
    };
    let mut dim = (4 * state_n + 32).max(64);
    let mut prev = level(dim)?;
    let mut last_change = f64::INFINITY;
    while dim * 2 <= cap {
        dim *= 2;
        let next = level(dim)?;
        last_change = (next - prev).abs();
        if last_change < tolerance * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(OracleError::DimensionCap {
        state: state_n,
        cap,
        tolerance,
        last_change,
    })
}
