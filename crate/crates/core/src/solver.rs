//! Self-consistent solution of `E = g(E)` at a fixed series order.

use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::{build_banded, BandedOperator};
use crate::series::{required_dimension, residual, SeriesError};
use crate::splitparams::SchemeSpec;

/// Iterates beyond this magnitude count as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e6;
/// Smallest damping factor of the fixed-point iteration.
pub const MIN_DAMPING: f64 = 1.0 / 16.0;
/// Subintervals scanned for sign changes by the bracketing fallback.
const BRACKET_SCAN_INTERVALS: usize = 64;
/// Cap on leading digits reported by [`digits_agreed`].
pub const MAX_DIGITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Residual bound, applied as `tolerance · max(1, |E|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-14,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("table has {0} converged rows; at least two are needed")]
    TooFewConverged(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    NoConvergence,
    SmallDenominator,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NoConvergence => "NC",
            Status::SmallDenominator => "small_denominator",
        }
    }
}

/// How a result was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Orders 0 and 1, where `g(E)` does not depend on `E`.
    Direct,
    FixedPoint,
    Bracketed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySolution {
    pub scheme: SchemeSpec,
    pub state_n: usize,
    pub order_k: usize,
    /// `None` unless `status` is `Converged`.
    pub energy: Option<f64>,
    pub iterations: usize,
    /// `g(E) − E` at the last iterate that could be evaluated.
    pub final_residual: Option<f64>,
    pub status: Status,
    pub method: Method,
}

impl EnergySolution {
    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }
}

fn scaled_tol(config: &SolverConfig, e: f64) -> f64 {
    config.tolerance * e.abs().max(1.0)
}

/// A root belongs to level `n` only if `E⁰_n` is the nearest same-parity
/// diagonal energy; otherwise the iteration has locked onto another level.
fn on_branch(op: &BandedOperator, n: usize, e: f64) -> bool {
    let own = (e - op.diag()[n]).abs();
    op.diag()
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != n && m.abs_diff(n) % 2 == 0)
        .all(|(_, &d)| own < (e - d).abs())
}

/// Energy window of level `n`: halfway to the neighbouring same-parity
/// diagonal energies.
fn branch_window(op: &BandedOperator, n: usize) -> (f64, f64) {
    let d = op.diag();
    let here = d[n];
    let hi = match d.get(n + 2) {
        Some(&up) => 0.5 * (here + up),
        None => here + 2.0,
    };
    let lo = if n >= 2 {
        0.5 * (d[n - 2] + here)
    } else {
        here - (hi - here).max(2.0)
    };
    (lo, hi)
}

enum FixedPoint {
    Converged {
        energy: f64,
        residual: f64,
        iterations: usize,
    },
    Diverged {
        iterations: usize,
        residual: Option<f64>,
    },
    Pole {
        iterations: usize,
    },
    Stalled {
        iterations: usize,
        residual: f64,
    },
}

fn fixed_point(op: &BandedOperator, n: usize, k: usize, config: &SolverConfig) -> FixedPoint {
    let mut e = op.diag()[n];
    let mut beta = 1.0;
    let mut prev: Option<f64> = None;
    let mut last = f64::NAN;
    for it in 1..=config.max_iterations {
        let r = match residual(op, n, e, k) {
            Ok(r) => r,
            Err(SeriesError::SmallDenominator { .. }) => {
                return FixedPoint::Pole { iterations: it }
            }
            Err(_) => {
                return FixedPoint::Diverged {
                    iterations: it,
                    residual: None,
                }
            }
        };
        let g = e + r;
        if !g.is_finite() || g.abs() > DIVERGENCE_BOUND {
            return FixedPoint::Diverged {
                iterations: it,
                residual: r.is_finite().then_some(r),
            };
        }
        if r.abs() <= scaled_tol(config, e) {
            return FixedPoint::Converged {
                energy: e,
                residual: r,
                iterations: it,
            };
        }
        if prev.is_some_and(|p| p * r < 0.0) && beta > MIN_DAMPING {
            beta *= 0.5;
        }
        prev = Some(r);
        last = r;
        e += beta * r;
    }
    FixedPoint::Stalled {
        iterations: config.max_iterations,
        residual: last,
    }
}

/// Sign-change scan of the branch window followed by secant steps safeguarded
/// by bisection. Returns the accepted root closest to the seed, if any.
fn bracketed(
    op: &BandedOperator,
    n: usize,
    k: usize,
    config: &SolverConfig,
) -> (Option<(f64, f64)>, usize) {
    let f = |e: f64| residual(op, n, e, k).ok().filter(|r| r.is_finite());
    let seed = op.diag()[n];
    let (lo, hi) = branch_window(op, n);
    let mut evals = 0usize;
    let budget = config.max_iterations;

    let grid: Vec<f64> = (0..=BRACKET_SCAN_INTERVALS)
        .map(|i| lo + (hi - lo) * i as f64 / BRACKET_SCAN_INTERVALS as f64)
        .collect();
    let values: Vec<Option<f64>> = grid.iter().map(|&e| f(e)).collect();
    evals += grid.len();

    let mut best: Option<(f64, f64)> = None;
    for i in 0..BRACKET_SCAN_INTERVALS {
        let (Some(fa0), Some(fb0)) = (values[i], values[i + 1]) else {
            continue;
        };
        if fa0 * fb0 > 0.0 {
            continue;
        }
        let (mut a, mut b, mut fa, mut fb) = (grid[i], grid[i + 1], fa0, fb0);
        let mut root = None;
        while evals < budget + grid.len() {
            let secant = b - fb * (b - a) / (fb - fa);
            let mid = 0.5 * (a + b);
            let x = if secant.is_finite() && secant > a.min(b) && secant < a.max(b) {
                secant
            } else {
                mid
            };
            if x <= a.min(b) || x >= a.max(b) {
                break;
            }
            let Some(fx) = f(x) else { break };
            evals += 1;
            if fx.abs() <= scaled_tol(config, x) {
                root = Some((x, fx));
                break;
            }
            // Keep the bracket; fall back to bisection when secant stalls.
            if fa * fx < 0.0 {
                b = x;
                fb = fx;
            } else {
                a = x;
                fa = fx;
            }
            if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
            if x == secant {
                let m = 0.5 * (a + b);
                let Some(fm) = f(m) else { break };
                evals += 1;
                if fm.abs() <= scaled_tol(config, m) {
                    root = Some((m, fm));
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                    fb = fm;
                } else {
                    a = m;
                    fa = fm;
                }
            }
        }
        if let Some((x, fx)) = root {
            if on_branch(op, n, x)
                && best.is_none_or(|(bx, _)| (x - seed).abs() < (bx - seed).abs())
            {
                best = Some((x, fx));
            }
        }
    }
    (best, evals)
}

/// Solves `E = g(E)` for level `state_n` at series order `order_k`.
///
/// Damped fixed-point iteration seeded at `E⁰_n` runs first. If it neither
/// converges nor diverges within the budget, a bracketed secant/bisection
/// search over the level's energy window takes over. A root that lies closer
/// to another level's unperturbed energy is reported as `NoConvergence`.
pub fn self_consistent_energy(
    scheme: &SchemeSpec,
    state_n: usize,
    order_k: usize,
    config: &SolverConfig,
) -> Result<EnergySolution, SolverError> {
    if !(config.tolerance > 0.0 && config.tolerance.is_finite()) {
        return Err(SolverError::BadTolerance(config.tolerance));
    }
    if config.max_iterations == 0 {
        return Err(SolverError::NoIterations);
    }
    let op = build_banded(scheme, required_dimension(state_n, order_k));
    let solution =
        |energy: Option<f64>, iterations, final_residual, status, method| EnergySolution {
            scheme: scheme.clone(),
            state_n,
            order_k,
            energy,
            iterations,
            final_residual,
            status,
            method,
        };

    if order_k < 2 {
        let e = op.diag()[state_n];
        let r = residual(&op, state_n, e, order_k)?;
        return Ok(solution(
            Some(e),
            0,
            Some(r),
            Status::Converged,
            Method::Direct,
        ));
    }

    match fixed_point(&op, state_n, order_k, config) {
        FixedPoint::Converged {
            energy,
            residual,
            iterations,
        } => {
            let status = if on_branch(&op, state_n, energy) {
                Status::Converged
            } else {
                Status::NoConvergence
            };
            let energy = (status == Status::Converged).then_some(energy);
            Ok(solution(
                energy,
                iterations,
                Some(residual),
                status,
                Method::FixedPoint,
            ))
        }
        FixedPoint::Diverged {
            iterations,
            residual,
        } => Ok(solution(
            None,
            iterations,
            residual,
            Status::NoConvergence,
            Method::FixedPoint,
        )),
        FixedPoint::Pole { iterations } => Ok(solution(
            None,
            iterations,
            None,
            Status::SmallDenominator,
            Method::FixedPoint,
        )),
        FixedPoint::Stalled {
            iterations,
            residual,
        } => {
            let (root, evals) = bracketed(&op, state_n, order_k, config);
            Ok(match root {
                Some((e, r)) => solution(
                    Some(e),
                    iterations + evals,
                    Some(r),
                    Status::Converged,
                    Method::Bracketed,
                ),
                None => solution(
                    None,
                    iterations + evals,
                    Some(residual),
                    Status::NoConvergence,
                    Method::Bracketed,
                ),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub scheme: SchemeSpec,
    pub state_n: usize,
    pub lambda: f64,
    /// One row per order `K = 0 … K_max`.
    pub rows: Vec<(usize, EnergySolution)>,
}

impl ConvergenceTable {
    pub fn energies(&self) -> impl Iterator<Item = (usize, Option<f64>)> + '_ {
        self.rows.iter().map(|(k, s)| (*k, s.energy))
    }
}

/// Solves every order `0 … k_max` independently, each from a fresh seed.
pub fn convergence_table(
    scheme: &SchemeSpec,
    state_n: usize,
    k_max: usize,
    config: &SolverConfig,
) -> Result<ConvergenceTable, SolverError> {
    let rows = (0..=k_max)
        .map(|k| self_consistent_energy(scheme, state_n, k, config).map(|s| (k, s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceTable {
        scheme: scheme.clone(),
        state_n,
        lambda: scheme.lambda,
        rows,
    })
}

/// Leading significant digits shared by `a` and `b`, `⌊−log₁₀|a − b|/|b|⌋`
/// clamped to `0 … 16`.
pub fn digits_agreed(a: f64, b: f64) -> u32 {
    if a == b {
        return MAX_DIGITS;
    }
    let rel = (a - b).abs() / b.abs().max(a.abs());
    if !rel.is_finite() || rel >= 1.0 {
        return 0;
    }
    (-rel.log10()).floor().clamp(0.0, MAX_DIGITS as f64) as u32
}

/// Digits shared by the last two converged rows of a table.
pub fn digits_stabilized(table: &ConvergenceTable) -> Result<u32, SolverError> {
    let converged: Vec<f64> = table.rows.iter().filter_map(|(_, s)| s.energy).collect();
    match converged.as_slice() {
        [.., a, b] => Ok(digits_agreed(*a, *b)),
        other => Err(SolverError::TooFewConverged(other.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitparams::SchemeKind;

    fn solve(kind: &str, lambda: f64, n: usize, k: usize) -> EnergySolution {
        let scheme = SchemeSpec::resolve(kind.parse::<SchemeKind>().unwrap(), lambda, n).unwrap();
        self_consistent_energy(&scheme, n, k, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn free_oscillator_levels() {
        for kind in ["chain:1", "chain:3", "var1", "var2"] {
            for k in [0, 1, 2, 7, 15] {
                let s = solve(kind, 0.0, 4, k);
                assert_eq!(s.status, Status::Converged);
                assert!((s.energy.unwrap() - 4.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn converged_results_certify() {
        let s = solve("chain:1", 1.0, 0, 15);
        assert_eq!(s.status, Status::Converged);
        let e = s.energy.unwrap();
        let op = build_banded(&s.scheme, required_dimension(0, 15));
        let r = residual(&op, 0, e, 15).unwrap();
        assert!(r.abs() <= 1e-14);
        assert!((e - 0.80377065).abs() < 1e-7);
    }

    #[test]
    fn low_orders_are_direct() {
        let s0 = solve("chain:1", 1.0, 0, 0);
        let s1 = solve("chain:1", 1.0, 0, 1);
        assert_eq!(s0.energy, s1.energy);
        assert_eq!(s0.method, Method::Direct);
        assert_eq!(s0.iterations, 0);
    }

    #[test]
    fn ground_parameters_fail_high_excited_state() {
        let s = solve("chain:1", 0.1, 8, 15);
        assert_eq!(s.status, Status::NoConvergence);
        assert_eq!(s.energy, None);
    }

    #[test]
    fn table_first_rows_equal() {
        let scheme = SchemeSpec::chain(1.0, 2).unwrap();
        let t = convergence_table(&scheme, 0, 5, &SolverConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.rows[0].1.energy, t.rows[1].1.energy);
        assert!(t.rows.iter().all(|(_, s)| s.is_converged()));
    }

    #[test]
    fn digits() {
        assert_eq!(digits_agreed(0.8037706243946594, 0.8037706287404748), 8);
        assert_eq!(digits_agreed(2.737826568159874, 2.737955961049832), 4);
        assert_eq!(digits_agreed(1.5, 1.5), 16);
        assert_eq!(digits_agreed(1.0, -1.0), 0);
    }

    #[test]
    fn digits_need_two_rows() {
        let scheme = SchemeSpec::chain(1.0, 1).unwrap();
        let mut t = convergence_table(&scheme, 0, 0, &SolverConfig::default()).unwrap();
        assert_eq!(digits_stabilized(&t), Err(SolverError::TooFewConverged(1)));
        t = convergence_table(&scheme, 0, 3, &SolverConfig::default()).unwrap();
        assert!(digits_stabilized(&t).unwrap() >= 3);
        let free = SchemeSpec::chain(0.0, 1).unwrap();
        let t = convergence_table(&free, 2, 4, &SolverConfig::default()).unwrap();
        assert_eq!(digits_stabilized(&t).unwrap(), 16);
    }

    #[test]
    fn rejects_bad_config() {
        let scheme = SchemeSpec::chain(1.0, 1).unwrap();
        let bad = SolverConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert_eq!(
            self_consistent_energy(&scheme, 0, 3, &bad),
            Err(SolverError::BadTolerance(0.0))
        );
        let bad = SolverConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert_eq!(
            self_consistent_energy(&scheme, 0, 3, &bad),
            Err(SolverError::NoIterations)
        );
    }

    #[test]
    fn bracketed_search_agrees_with_fixed_point() {
        for (kind, lambda, n, k) in [
            ("chain:1", 1.0, 0, 6),
            ("var1", 1.0, 3, 9),
            ("var2", 100.0, 2, 12),
        ] {
            let reference = solve(kind, lambda, n, k);
            let op = build_banded(&reference.scheme, required_dimension(n, k));
            let (root, evals) = bracketed(&op, n, k, &SolverConfig::default());
            let (e, r) = root.expect("bracketed root");
            assert!(evals > BRACKET_SCAN_INTERVALS);
            assert!(r.abs() <= 1e-14 * e.abs().max(1.0));
            let fp = reference.energy.unwrap();
            assert!(
                (e - fp).abs() <= 1e-12 * fp.abs().max(1.0),
                "{kind}: {e} vs {fp}"
            );
        }
    }

    #[test]
    fn starved_fixed_point_falls_back() {
        let scheme = SchemeSpec::chain(1.0, 1).unwrap();
        let config = SolverConfig {
            tolerance: 1e-14,
            max_iterations: 2,
        };
        let s = self_consistent_energy(&scheme, 0, 6, &config).unwrap();
        assert_eq!(s.method, Method::Bracketed);
        assert!(s.iterations > 2);
    }
}
