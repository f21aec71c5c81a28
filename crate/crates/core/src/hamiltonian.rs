//! Matrix elements of the split Hamiltonian `H = H_D + H_N` in the number
//! basis of the scheme's effective frequency `W` (ħ = m = 1).
//!
//! `H_D` is diagonal. `H_N` couples states two and four quanta apart and has
//! no diagonal part, so every matrix here is symmetric pentadiagonal with
//! zero first and third off-diagonals.

use crate::splitparams::{SchemeKind, SchemeSpec};

/// `⟨m|H_D|m⟩ = ((2m+1)/4)(W + 1/W) + (3λ/4W²)(2m²+2m+1)`.
pub fn diag_element(scheme: &SchemeSpec, m: usize) -> f64 {
    diag_at(scheme.effective_w, scheme.lambda, m)
}

fn diag_at(w: f64, lambda: f64, m: usize) -> f64 {
    let m = m as f64;
    (2.0 * m + 1.0) / 4.0 * (w + 1.0 / w)
        + 3.0 * lambda / (4.0 * w * w) * (2.0 * m * m + 2.0 * m + 1.0)
}

/// `⟨m|H_N|m+2⟩`.
///
/// Chain schemes use the counterterm form; variational schemes carry the
/// explicit `¼(−W + 1/W)` frequency mismatch. Both are exact rewrites of the
/// same Hamiltonian once the frequencies satisfy their cubics.
pub fn offdiag2(scheme: &SchemeSpec, m: usize) -> f64 {
    let w = scheme.effective_w;
    let lambda = scheme.lambda;
    let mf = m as f64;
    let root = ((mf + 1.0) * (mf + 2.0)).sqrt();
    match scheme.kind {
        SchemeKind::Chain { .. } => lambda * root / w * (mf / w - 1.5 * scheme.counterterm_sum),
        SchemeKind::VariationalSingleStep | SchemeKind::VariationalTwoStep => {
            variational_off2(w, lambda, m)
        }
    }
}

fn variational_off2(w: f64, lambda: f64, m: usize) -> f64 {
    let mf = m as f64;
    let root = ((mf + 1.0) * (mf + 2.0)).sqrt();
    root * (0.25 * (-w + 1.0 / w) + lambda / (w * w) * (mf + 1.5))
}

/// `⟨m|H_N|m+4⟩ = λ√((m+1)(m+2)(m+3)(m+4))/(4W²)`.
pub fn offdiag4(scheme: &SchemeSpec, m: usize) -> f64 {
    off4_at(scheme.effective_w, scheme.lambda, m)
}

fn off4_at(w: f64, lambda: f64, m: usize) -> f64 {
    let mf = m as f64;
    lambda * ((mf + 1.0) * (mf + 2.0) * (mf + 3.0) * (mf + 4.0)).sqrt() / (4.0 * w * w)
}

/// `H_D + H_N` over the states `0 … dimension−1`.
///
/// Only the upper couplings are stored; the lower ones follow by symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    diag: Vec<f64>,
    /// `off2[m] = ⟨m|H_N|m+2⟩`, length `dimension − 2` (saturating).
    off2: Vec<f64>,
    /// `off4[m] = ⟨m|H_N|m+4⟩`, length `dimension − 4` (saturating).
    off4: Vec<f64>,
}

impl BandedOperator {
    pub fn from_parts(diag: Vec<f64>, off2: Vec<f64>, off4: Vec<f64>) -> Self {
        let dim = diag.len();
        assert!(dim >= 1, "empty basis");
        assert_eq!(off2.len(), dim.saturating_sub(2));
        assert_eq!(off4.len(), dim.saturating_sub(4));
        BandedOperator { diag, off2, off4 }
    }

    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off2(&self) -> &[f64] {
        &self.off2
    }

    pub fn off4(&self) -> &[f64] {
        &self.off4
    }

    /// `⟨i|H_N|j⟩` for any pair inside the basis.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            2 => self.off2.get(lo).copied().unwrap_or(0.0),
            4 => self.off4.get(lo).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// `⟨i|H_D + H_N|j⟩`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            self.coupling(i, j)
        }
    }

    /// `out[m] = Σ_{m'} ⟨m|H_N|m'⟩ v[m']`.
    pub fn apply_coupling(&self, v: &[f64], out: &mut [f64]) {
        let dim = self.dimension();
        debug_assert_eq!(v.len(), dim);
        debug_assert_eq!(out.len(), dim);
        out.iter_mut().for_each(|x| *x = 0.0);
        for (m, &c) in self.off2.iter().enumerate() {
            out[m] += c * v[m + 2];
            out[m + 2] += c * v[m];
        }
        for (m, &c) in self.off4.iter().enumerate() {
            out[m] += c * v[m + 4];
            out[m + 4] += c * v[m];
        }
    }

    /// Row-major dense copy of `H_D + H_N`.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = self.dimension();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = self.entry(i, j);
            }
        }
        out
    }
}

pub fn build_banded(scheme: &SchemeSpec, dimension: usize) -> BandedOperator {
    assert!(dimension >= 1, "dimension must be at least 1");
    BandedOperator {
        diag: (0..dimension).map(|m| diag_element(scheme, m)).collect(),
        off2: (0..dimension.saturating_sub(2))
            .map(|m| offdiag2(scheme, m))
            .collect(),
        off4: (0..dimension.saturating_sub(4))
            .map(|m| offdiag4(scheme, m))
            .collect(),
    }
}

/// `p²/2 + x²/2 + λx⁴` in the frequency-1 oscillator basis.
///
/// At `W = 1` the frequency mismatch in `⟨m|H|m+2⟩` vanishes and no
/// splitting parameter is involved.
pub fn build_unsplit(lambda: f64, dimension: usize) -> BandedOperator {
    assert!(dimension >= 1, "dimension must be at least 1");
    BandedOperator {
        diag: (0..dimension).map(|m| diag_at(1.0, lambda, m)).collect(),
        off2: (0..dimension.saturating_sub(2))
            .map(|m| variational_off2(1.0, lambda, m))
            .collect(),
        off4: (0..dimension.saturating_sub(4))
            .map(|m| off4_at(1.0, lambda, m))
            .collect(),
    }
}
