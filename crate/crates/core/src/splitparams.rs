//! Splitting and variational frequency parameters.
//!
//! Every frequency used to split the Hamiltonian is the positive root of a
//! depressed cubic `x³ − a·x − b = 0` with `a, b ≥ 0`. The base frequency
//! solves `w³ − w − 6λ = 0`, each chain step solves
//! `Wⱼ³ − W²ⱼ₋₁·Wⱼ − 6λ = 0`, and the state-dependent variational frequencies
//! replace `6λ` by `6λ(2n²+2n+1)/(2n+1)`.

use serde::Serialize;
use thiserror::Error;

/// Residual bound for returned roots, scaled by `max(1, b)`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-13;

const MAX_NEWTON_STEPS: usize = 100;
const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("non-finite cubic coefficients (a = {a}, b = {b})")]
    NonFinite { a: f64, b: f64 },
    #[error("cubic coefficients must be non-negative (a = {a}, b = {b})")]
    NegativeCoefficient { a: f64, b: f64 },
    #[error("cubic x³ = 0 has no positive root")]
    ZeroRoot,
    #[error("unsupported coupling λ = {0}: only finite λ ≥ 0 is treated")]
    UnsupportedCoupling(f64),
    #[error("chain depth must be at least 1")]
    ZeroDepth,
    #[error("variational base frequency must be ≥ 1, got {0}")]
    BaseBelowOne(f64),
    #[error("root solve for a = {a}, b = {b} stopped at residual {residual:e}")]
    RootNotConverged { a: f64, b: f64, residual: f64 },
}

fn cubic_residual(x: f64, a: f64, b: f64) -> f64 {
    x * x * x - a * x - b
}

/// Positive real root of `x³ − a·x − b = 0` for `a, b ≥ 0`.
///
/// For `b > 0` the root is unique (one sign change). For `b = 0` the root is
/// `√a`. Newton is run inside the bracket `[max(√a, ∛b), 1 + a + b]` and any
/// step that leaves the bracket is replaced by bisection.
pub fn cubic_positive_root(a: f64, b: f64) -> Result<f64, ParamError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(ParamError::NonFinite { a, b });
    }
    if a < 0.0 || b < 0.0 {
        return Err(ParamError::NegativeCoefficient { a, b });
    }
    if b == 0.0 {
        if a == 0.0 {
            return Err(ParamError::ZeroRoot);
        }
        return Ok(a.sqrt());
    }

    let tol = ROOT_RESIDUAL_TOL * b.max(1.0);
    // f(lo) ≤ 0 and f(hi) > 0 for the bounds below.
    let mut lo = a.sqrt().max(b.cbrt());
    let mut hi = 1.0 + a + b;
    let mut x = lo.max(1.0).min(hi);

    for _ in 0..MAX_NEWTON_STEPS {
        let f = cubic_residual(x, a, b);
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let slope = 3.0 * x * x - a;
        let mut next = x - f / slope;
        if slope.is_nan() || slope <= 0.0 || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            break;
        }
        x = next;
    }

    // Newton lands within an ulp or two; polish by bisection if needed.
    let mut best = x;
    let mut best_res = cubic_residual(x, a, b).abs();
    if best_res > tol {
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = cubic_residual(mid, a, b);
            if f.abs() < best_res {
                best = mid;
                best_res = f.abs();
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    if best_res > tol {
        return Err(ParamError::RootNotConverged {
            a,
            b,
            residual: best_res,
        });
    }
    Ok(best)
}

fn check_coupling(lambda: f64) -> Result<(), ParamError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(ParamError::UnsupportedCoupling(lambda));
    }
    Ok(())
}

/// Base splitting frequency `w` with `w² = 1 + 6λ/w`.
pub fn solve_base_frequency(lambda: f64) -> Result<f64, ParamError> {
    check_coupling(lambda)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    cubic_positive_root(1.0, 6.0 * lambda)
}

/// The chain `w, W₁, …, W_k` of multi-step optimal splitting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitChain {
    pub lambda: f64,
    pub base_w: f64,
    /// `W₁ … W_k`, ascending in step index.
    pub steps: Vec<f64>,
}

impl SplitChain {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// `W_k`, the frequency that enters the matrix elements.
    pub fn top(&self) -> f64 {
        self.steps.last().copied().unwrap_or(self.base_w)
    }

    /// `1/w + 1/W₁ + … + 1/W_{k−1}`.
    pub fn counterterm_sum(&self) -> f64 {
        let below_top = &self.steps[..self.steps.len().saturating_sub(1)];
        1.0 / self.base_w + below_top.iter().map(|w| 1.0 / w).sum::<f64>()
    }

    /// `w` followed by every `Wⱼ`.
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.base_w).chain(self.steps.iter().copied())
    }
}

pub fn build_chain(lambda: f64, depth_k: usize) -> Result<SplitChain, ParamError> {
    if depth_k == 0 {
        return Err(ParamError::ZeroDepth);
    }
    let base_w = solve_base_frequency(lambda)?;
    let mut steps = Vec::with_capacity(depth_k);
    let mut prev = base_w;
    for _ in 0..depth_k {
        let next = if lambda == 0.0 {
            1.0
        } else {
            cubic_positive_root(prev * prev, 6.0 * lambda)?
        };
        steps.push(next);
        prev = next;
    }
    Ok(SplitChain {
        lambda,
        base_w,
        steps,
    })
}

/// `(2n² + 2n + 1) / (2n + 1)`, the state weight of the variational cubic.
pub fn state_weight(state_n: usize) -> f64 {
    let n = state_n as f64;
    (2.0 * n * n + 2.0 * n + 1.0) / (2.0 * n + 1.0)
}

/// State-dependent frequency from `W³ − base²·W − 6λ(2n²+2n+1)/(2n+1) = 0`.
///
/// `base = 1` gives the single-step variational frequency, `base = w` the
/// two-step one.
pub fn solve_variational_w(lambda: f64, state_n: usize, base: f64) -> Result<f64, ParamError> {
    check_coupling(lambda)?;
    if !base.is_finite() || base < 1.0 {
        return Err(ParamError::BaseBelowOne(base));
    }
    cubic_positive_root(base * base, 6.0 * lambda * state_weight(state_n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// State-independent chain of the given depth (`depth = 1` is the
    /// two-step `w, W₁` splitting).
    Chain {
        depth: usize,
    },
    VariationalSingleStep,
    VariationalTwoStep,
}

impl SchemeKind {
    pub fn label(&self) -> String {
        match self {
            SchemeKind::Chain { depth } => format!("chain:{depth}"),
            SchemeKind::VariationalSingleStep => "var1".to_string(),
            SchemeKind::VariationalTwoStep => "var2".to_string(),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "var1" => Ok(SchemeKind::VariationalSingleStep),
            "var2" => Ok(SchemeKind::VariationalTwoStep),
            _ => {
                let depth = s
                    .strip_prefix("chain:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| {
                        format!("unknown scheme `{s}` (expected chain:<k≥1>, var1 or var2)")
                    })?;
                Ok(SchemeKind::Chain { depth })
            }
        }
    }
}

/// A splitting scheme with its frequencies resolved for one `(λ, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub lambda: f64,
    /// Only meaningful for the variational kinds.
    pub state_n: usize,
    pub effective_w: f64,
    /// Zero for the variational kinds.
    pub counterterm_sum: f64,
    /// Base frequency the top one was grown from (`1` for single-step).
    pub base_w: f64,
    /// Chain steps `W₁ … W_k`; a single entry for the variational kinds.
    pub steps: Vec<f64>,
}

impl SchemeSpec {
    pub fn resolve(kind: SchemeKind, lambda: f64, state_n: usize) -> Result<Self, ParamError> {
        match kind {
            SchemeKind::Chain { depth } => Self::chain(lambda, depth),
            SchemeKind::VariationalSingleStep => Self::variational_single(lambda, state_n),
            SchemeKind::VariationalTwoStep => Self::variational_two(lambda, state_n),
        }
    }

    pub fn chain(lambda: f64, depth: usize) -> Result<Self, ParamError> {
        let chain = build_chain(lambda, depth)?;
        Ok(Self::from_chain(&chain))
    }

    pub fn from_chain(chain: &SplitChain) -> Self {
        SchemeSpec {
            kind: SchemeKind::Chain {
                depth: chain.depth(),
            },
            lambda: chain.lambda,
            state_n: 0,
            effective_w: chain.top(),
            counterterm_sum: chain.counterterm_sum(),
            base_w: chain.base_w,
            steps: chain.steps.clone(),
        }
    }

    pub fn variational_single(lambda: f64, state_n: usize) -> Result<Self, ParamError> {
        let w = solve_variational_w(lambda, state_n, 1.0)?;
        Ok(SchemeSpec {
            kind: SchemeKind::VariationalSingleStep,
            lambda,
            state_n,
            effective_w: w,
            counterterm_sum: 0.0,
            base_w: 1.0,
            steps: vec![w],
        })
    }

    pub fn variational_two(lambda: f64, state_n: usize) -> Result<Self, ParamError> {
        let base = solve_base_frequency(lambda)?;
        let w = solve_variational_w(lambda, state_n, base)?;
        Ok(SchemeSpec {
            kind: SchemeKind::VariationalTwoStep,
            lambda,
            state_n,
            effective_w: w,
            counterterm_sum: 0.0,
            base_w: base,
            steps: vec![w],
        })
    }

    /// Named parameters `w, W1, …` in chain order.
    pub fn parameters(&self) -> Vec<(String, f64)> {
        let mut out = vec![("w".to_string(), self.base_w)];
        out.extend(
            self.steps
                .iter()
                .enumerate()
                .map(|(j, &v)| (format!("W{}", j + 1), v)),
        );
        out
    }
}
