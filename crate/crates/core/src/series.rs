//! Right-hand side of the nonlinear perturbation series at a trial energy.
//!
//! The order-`j` term sums every closed walk `n → m₁ → … → m_{j−1} → n`
//! through the `H_N` couplings, with each intermediate state `mᵢ ≠ n`
//! contributing a factor `1/(E − E⁰_{mᵢ})`. The walk sum is accumulated as a
//! sequence of banded matrix-vector products instead of by enumeration.

use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::BandedOperator;

/// Relative size below which `E − E⁰_m` is treated as a vanishing denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("basis of dimension {have} too small for state {state} at order {order}: need {need}")]
    DimensionTooSmall {
        have: usize,
        need: usize,
        state: usize,
        order: usize,
    },
    #[error("energy denominator E − E⁰_{state} = {gap:e} below guard at E = {energy}")]
    SmallDenominator { state: usize, energy: f64, gap: f64 },
    #[error("trial energy {0} is not finite")]
    NonFiniteEnergy(f64),
}

/// Smallest basis that makes an order-`K` evaluation for state `n` exact.
pub fn required_dimension(target_n: usize, order_k: usize) -> usize {
    target_n + 4 * order_k + 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEvaluation {
    pub target_n: usize,
    pub trial_e: f64,
    pub order_k: usize,
    /// `T₀ … T_K`; `T₀` is the diagonal element and `T₁` is always zero.
    pub per_order_terms: Vec<f64>,
    pub total: f64,
}

pub fn evaluate_series(
    op: &BandedOperator,
    target_n: usize,
    trial_e: f64,
    order_k: usize,
) -> Result<SeriesEvaluation, SeriesError> {
    if !trial_e.is_finite() {
        return Err(SeriesError::NonFiniteEnergy(trial_e));
    }
    let dim = op.dimension();
    let need = required_dimension(target_n, order_k);
    if dim < need {
        return Err(SeriesError::DimensionTooSmall {
            have: dim,
            need,
            state: target_n,
            order: order_k,
        });
    }

    let mut terms = Vec::with_capacity(order_k + 1);
    terms.push(op.diag()[target_n]);
    if order_k >= 1 {
        terms.push(0.0);
    }

    if order_k >= 2 {
        // Intermediate states lie within 4(K − 1) of the target.
        let reach = 4 * (order_k - 1);
        let lo = target_n.saturating_sub(reach);
        let hi = (target_n + reach).min(dim - 1);
        let guard = DENOMINATOR_GUARD * trial_e.abs().max(1.0);
        let mut inv_gap = vec![0.0; dim];
        for m in (lo..=hi).filter(|&m| m != target_n && m.abs_diff(target_n) % 2 == 0) {
            let gap = trial_e - op.diag()[m];
            if gap.abs() < guard {
                return Err(SeriesError::SmallDenominator {
                    state: m,
                    energy: trial_e,
                    gap,
                });
            }
            inv_gap[m] = 1.0 / gap;
        }

        // amp holds v_i, the weight of all length-i walks from n ending at m.
        let mut amp = vec![0.0; dim];
        for m in 0..dim {
            amp[m] = op.coupling(m, target_n) * inv_gap[m];
        }
        let mut next = vec![0.0; dim];
        for j in 2..=order_k {
            let closing: f64 = (lo..=hi).map(|m| op.coupling(target_n, m) * amp[m]).sum();
            terms.push(closing);
            if j == order_k {
                break;
            }
            op.apply_coupling(&amp, &mut next);
            for (x, &g) in next.iter_mut().zip(&inv_gap) {
                *x *= g;
            }
            std::mem::swap(&mut amp, &mut next);
        }
    }

    let total = terms.iter().sum();
    Ok(SeriesEvaluation {
        target_n,
        trial_e,
        order_k,
        per_order_terms: terms,
        total,
    })
}

/// `g(E) − E`; zero at a self-consistent energy.
pub fn residual(
    op: &BandedOperator,
    target_n: usize,
    energy: f64,
    order_k: usize,
) -> Result<f64, SeriesError> {
    Ok(evaluate_series(op, target_n, energy, order_k)?.total - energy)
}
