//! Analytical machinery: error-support expressions over GF(2), innovation
//! parameters α and β, entropy gaps, pre-state/main-state distributions, and
//! the per-SNR summary tables built from them.

use crate::channel::q_function;
use crate::conv::{error_state_map, CodeError, ConvCode, PredecodeMode};
use crate::gf2poly::{mat_mul, PolyMatrix};
use std::collections::BTreeSet;

/// An XOR of channel-error bits e_{k−j}^{(r+1)}, stored as the set of (delay
/// j, component r) pairs; duplicate bits cancel.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorSupportExpr {
    bits: BTreeSet<(u32, usize)>,
}

impl ErrorSupportExpr {
    pub fn new() -> ErrorSupportExpr {
        ErrorSupportExpr::default()
    }

    /// Single bit e_{k−delay}^{(component+1)}.
    pub fn bit(delay: u32, component: usize) -> ErrorSupportExpr {
        let mut e = ErrorSupportExpr::new();
        e.bits.insert((delay, component));
        e
    }

    /// The support of column `col` of (e·M)_k: bit (j, r) for each monomial
    /// D^j of M[r, col].
    pub fn from_matrix_column(m: &PolyMatrix, col: usize) -> ErrorSupportExpr {
        let mut e = ErrorSupportExpr::new();
        for r in 0..m.rows {
            let poly = m[(r, col)];
            for j in 0..64 {
                if poly.coeff(j) {
                    e.bits.insert((j, r));
                }
            }
        }
        e
    }

    /// XOR: symmetric difference of supports.
    pub fn xor(&self, rhs: &ErrorSupportExpr) -> ErrorSupportExpr {
        ErrorSupportExpr {
            bits: self.bits.symmetric_difference(&rhs.bits).cloned().collect(),
        }
    }

    /// Same expression one time step earlier: all delays + d.
    pub fn delayed(&self, d: u32) -> ErrorSupportExpr {
        ErrorSupportExpr { bits: self.bits.iter().map(|&(j, r)| (j + d, r)).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// P(expr = 1) when the error bits are iid Bernoulli(ε).
    pub fn probability(&self, eps: f64) -> f64 {
        parity_probability(self.len(), eps)
    }
}

/// P(XOR of n iid Bernoulli(ε) bits = 1) = (1 − (1−2ε)^n) / 2.
pub fn parity_probability(n: usize, eps: f64) -> f64 {
    (1.0 - (1.0 - 2.0 * eps).powi(n as i32)) / 2.0
}

/// Joint distribution of a tuple of support expressions by enumerating all
/// assignments of the union of their supports (capped at 24 bits). Index:
/// first expression is the most significant bit.
pub fn state_distribution(exprs: &[ErrorSupportExpr], eps: f64) -> Vec<f64> {
    let union: Vec<(u32, usize)> = {
        let mut u = BTreeSet::new();
        for e in exprs {
            u.extend(e.bits.iter().cloned());
        }
        u.into_iter().collect()
    };
    let n = union.len();
    assert!(n <= 24, "support too large to enumerate: {n} bits");
    let masks: Vec<u32> = exprs
        .iter()
        .map(|e| {
            union
                .iter()
                .enumerate()
                .filter(|(_, b)| e.bits.contains(b))
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let m = exprs.len();
    let mut dist = vec![0.0; 1 << m];
    for assign in 0..(1u32 << n) {
        let w = assign.count_ones() as i32;
        let p = eps.powi(w) * (1.0 - eps).powi(n as i32 - w);
        let idx = masks.iter().fold(0usize, |acc, &mask| {
            (acc << 1) | ((assign & mask).count_ones() as usize & 1)
        });
        dist[idx] += p;
    }
    dist
}

/// Shannon entropy in bits, with 0·log 0 = 0.
pub fn entropy_bits(dist: &[f64]) -> f64 {
    -dist.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Innovation parameters α_l = P(e_k^{(l)} ⊕ r_k^{(l)h} = 1) = P((eG⁻¹G)_l = 1).
pub fn alpha_exprs(code: &ConvCode) -> Vec<ErrorSupportExpr> {
    let gg = mat_mul(&code.g_inv, &code.g).expect("shape");
    (0..code.n0).map(|l| ErrorSupportExpr::from_matrix_column(&gg, l)).collect()
}

pub fn alpha_params(code: &ConvCode, eps: f64) -> Vec<f64> {
    alpha_exprs(code).iter().map(|e| e.probability(eps)).collect()
}

/// QLI parameters β_l = P(e_{k−L}^{(l)} ⊕ ζ_k = 1).
pub fn beta_exprs(code: &ConvCode) -> Result<Vec<ErrorSupportExpr>, CodeError> {
    let l_delay = code.qli_l.ok_or(CodeError::NotQli)? as u32;
    let ht = code.h.transpose();
    let zeta = ErrorSupportExpr::from_matrix_column(&ht, 0);
    Ok((0..code.n0).map(|l| zeta.xor(&ErrorSupportExpr::bit(l_delay, l))).collect())
}

pub fn beta_params(code: &ConvCode, eps: f64) -> Result<Vec<f64>, CodeError> {
    Ok(beta_exprs(code)?.iter().map(|e| e.probability(eps)).collect())
}

/// Pre-decoder symbol error probabilities: filtered (z^hG⁻¹) and smoothed
/// (z^hF, QLI only).
pub fn filtered_error_probability(code: &ConvCode, eps: f64) -> f64 {
    ErrorSupportExpr::from_matrix_column(&code.g_inv, 0).probability(eps)
}

pub fn smoothed_error_probability(code: &ConvCode, eps: f64) -> Result<f64, CodeError> {
    if code.qli_l.is_none() {
        return Err(CodeError::NotQli);
    }
    Ok(parity_probability(code.n0, eps))
}

/// Approximate differential-entropy gap H[z] − H[r] in nats:
/// ½ ln((1+c²)/(1+4c²p(1−p))).
pub fn entropy_gap(c: f64, p: f64) -> f64 {
    0.5 * ((1.0 + c * c) / (1.0 + 4.0 * c * c * p * (1.0 - p))).ln()
}

/// (H[z], H[z] − upper bound of H[r]) limits in nats: the channel-output
/// differential entropy ½ln(2πe(1+c²)) and the largest possible gap
/// ½ln(1+c²).
pub fn capacity_entropy_bounds(c: f64) -> (f64, f64) {
    let var = 1.0 + c * c;
    (0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln(), 0.5 * var.ln())
}

/// Support expressions of the ν = 2 main-decoder state (u_{k−1}, u_k).
pub fn code_state_exprs(
    code: &ConvCode,
    mode: PredecodeMode,
) -> Result<Vec<ErrorSupportExpr>, CodeError> {
    if code.nu != 2 || code.k0 != 1 {
        return Err(CodeError::UnsupportedRate);
    }
    let u = match mode {
        PredecodeMode::General => ErrorSupportExpr::from_matrix_column(&code.g_inv, 0),
        PredecodeMode::Qli => {
            if code.qli_l.is_none() {
                return Err(CodeError::NotQli);
            }
            // u_k = e_k F: one bit per component
            (0..code.n0).fold(ErrorSupportExpr::new(), |acc, l| {
                acc.xor(&ErrorSupportExpr::bit(0, l))
            })
        }
    };
    Ok(vec![u.delayed(1), u])
}

/// Support expressions of the error-trellis state σ_k = e_k U(D).
pub fn error_state_exprs(code: &ConvCode) -> Result<Vec<ErrorSupportExpr>, CodeError> {
    let map = error_state_map(code)?;
    Ok((0..map.u.cols).map(|c| ErrorSupportExpr::from_matrix_column(&map.u, c)).collect())
}

/// Per-SNR summary tables, following the source material's evaluation
/// pipeline: the printed channel parameters (c to 3 decimals, ε to 4 decimals
/// or 5 below 0.01) are the inputs to every derived column.
pub mod tables {
    use super::*;

    pub const EBN0_GRID_DB: [f64; 11] =
        [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

    /// One table row: the channel point plus the derived columns.
    #[derive(Clone, Debug)]
    pub struct TableRow {
        pub ebn0_db: f64,
        pub c: f64,
        pub eps: f64,
        pub cols: Vec<f64>,
    }

    fn round_to(x: f64, decimals: i32) -> f64 {
        let s = 10f64.powi(decimals);
        (x * s).round() / s
    }

    /// ε as printed: 4 decimals, or 5 once below 0.01.
    pub fn printed_epsilon(c: f64) -> f64 {
        let eps = q_function(c);
        if eps >= 0.01 {
            round_to(eps, 4)
        } else {
            round_to(eps, 5)
        }
    }

    /// c as printed: 3 decimals.
    pub fn printed_amplitude(ebn0_db: f64) -> f64 {
        round_to(10f64.powf(ebn0_db / 10.0).sqrt(), 3)
    }

    /// Probabilities as printed: 4 decimals, or 2 significant figures once
    /// below 0.001.
    pub fn printed_probability(p: f64) -> f64 {
        if p >= 1e-3 {
            round_to(p, 4)
        } else if p > 0.0 {
            let exp = p.log10().floor() as i32;
            round_to(p, 1 - exp)
        } else {
            0.0
        }
    }

    fn channel_point(ebn0_db: f64) -> (f64, f64) {
        let c = printed_amplitude(ebn0_db);
        // ε is computed from the rounded amplitude (0.0788 at 3 dB, not
        // Q of the exact amplitude, 0.0789)
        (c, printed_epsilon(c))
    }

    /// α table: per row (α₁, α₂, gap₁, gap₂, gap₁+gap₂); gaps in nats.
    pub fn alpha_table(code: &ConvCode) -> Vec<TableRow> {
        let exprs = alpha_exprs(code);
        EBN0_GRID_DB
            .iter()
            .map(|&db| {
                let (c, eps) = channel_point(db);
                let params: Vec<f64> =
                    exprs.iter().map(|e| round_to(e.probability(eps), 4)).collect();
                let gaps: Vec<f64> = params.iter().map(|&a| entropy_gap(c, a)).collect();
                let mut cols = params;
                cols.extend(gaps.iter());
                cols.push(gaps.iter().sum());
                TableRow { ebn0_db: db, c, eps, cols }
            })
            .collect()
    }

    /// β table (QLI codes): same layout as `alpha_table`.
    pub fn beta_table(code: &ConvCode) -> Result<Vec<TableRow>, CodeError> {
        let exprs = beta_exprs(code)?;
        Ok(EBN0_GRID_DB
            .iter()
            .map(|&db| {
                let (c, eps) = channel_point(db);
                let params: Vec<f64> =
                    exprs.iter().map(|e| round_to(e.probability(eps), 4)).collect();
                let gaps: Vec<f64> = params.iter().map(|&b| entropy_gap(c, b)).collect();
                let mut cols = params;
                cols.extend(gaps.iter());
                cols.push(gaps.iter().sum());
                TableRow { ebn0_db: db, c, eps, cols }
            })
            .collect())
    }

    fn distribution_table(exprs: &[ErrorSupportExpr]) -> Vec<TableRow> {
        EBN0_GRID_DB
            .iter()
            .map(|&db| {
                let (c, eps) = channel_point(db);
                let probs: Vec<f64> = state_distribution(exprs, eps)
                    .into_iter()
                    .map(printed_probability)
                    .collect();
                let h = entropy_bits(&probs);
                let mut cols = probs;
                cols.push(h);
                TableRow { ebn0_db: db, c, eps, cols }
            })
            .collect()
    }

    /// Main-decoder state distribution table: (P00, P01, P10, P11, H).
    pub fn code_state_table(
        code: &ConvCode,
        mode: PredecodeMode,
    ) -> Result<Vec<TableRow>, CodeError> {
        Ok(distribution_table(&code_state_exprs(code, mode)?))
    }

    /// Error-trellis state distribution table: (P̃00, P̃01, P̃10, P̃11, H).
    pub fn error_state_table(code: &ConvCode) -> Result<Vec<TableRow>, CodeError> {
        Ok(distribution_table(&error_state_exprs(code)?))
    }
}
