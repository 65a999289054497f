//! Convolutional code bundles: validated generator/inverse/check matrices,
//! encoders, syndrome computation, pre-decoders, trellis construction, and the
//! error-trellis state map.

use crate::gf2poly::{
    left_inverse_transpose, mat_mul, right_inverse, syndrome_former, AlgebraError, Gf2Poly,
    PolyMatrix,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("block width mismatch: expected {expected} bits, got {got}")]
    BlockWidth { expected: usize, got: usize },
    #[error("operation requires a QLI code")]
    NotQli,
    #[error("unsupported rate: requires k0 = n0 - 1")]
    UnsupportedRate,
    #[error("state budget exceeded: k0*nu = {0} > 24")]
    StateBudget(usize),
    #[error("generator matrix rejected: {0}")]
    Invalid(String),
    #[error("unknown registry code {0:?} (known: C1, C2, C3)")]
    UnknownCode(String),
    #[error("index out of range")]
    IndexRange,
}

pub type Result<T> = std::result::Result<T, CodeError>;

/// A frame of hard symbols: one n₀-bit block per trellis section, packed
/// little-endian (bit l = component l+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardFrame {
    pub n0: usize,
    pub blocks: Vec<u8>,
}

impl HardFrame {
    pub fn new(n0: usize, blocks: Vec<u8>) -> HardFrame {
        assert!(n0 > 0 && n0 <= 8);
        HardFrame { n0, blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn bit(&self, k: usize, l: usize) -> u8 {
        (self.blocks[k] >> l) & 1
    }

    pub fn xor(&self, rhs: &HardFrame) -> HardFrame {
        assert_eq!(self.n0, rhs.n0);
        assert_eq!(self.len(), rhs.len());
        HardFrame::new(self.n0, self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a ^ b).collect())
    }

    /// Blocks as bit strings, e.g. "11,10,...".
    pub fn to_bit_string(&self) -> String {
        self.blocks
            .iter()
            .map(|b| (0..self.n0).map(|l| char::from(b'0' + ((b >> l) & 1))).collect::<String>())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A validated (n₀, k₀) convolutional code.
#[derive(Clone, Debug)]
pub struct ConvCode {
    pub name: String,
    pub g: PolyMatrix,
    pub g_inv: PolyMatrix,
    pub h: PolyMatrix,
    pub h_inv_t: PolyMatrix,
    pub k0: usize,
    pub n0: usize,
    /// Overall constraint length (sum of row degrees of G).
    pub nu: usize,
    /// For QLI codes (g1 + g2 = D^L): the look-in delay L.
    pub qli_l: Option<usize>,
}

impl ConvCode {
    /// Validate and derive the full bundle from a generator matrix.
    pub fn from_generator(name: &str, g: PolyMatrix) -> Result<ConvCode> {
        let (k0, n0) = (g.rows, g.cols);
        if k0 >= n0 {
            return Err(CodeError::Invalid(format!("need k0 < n0, got {k0}x{n0}")));
        }
        let g_inv = right_inverse(&g).map_err(|e| match e {
            AlgebraError::NoPolynomialInverse => {
                CodeError::Invalid("non-basic generator (catastrophic or non-unit invariant factor)".into())
            }
            other => CodeError::Algebra(other),
        })?;
        let ht = syndrome_former(&g)?;
        let h = ht.transpose();
        // Keep (H⁻¹)ᵀ coherent with the normalized G⁻¹ so that Eq. (20)
        // G⁻¹G + Hᵀ(H⁻¹)ᵀ = I holds exactly: the normalized minimal-degree
        // left inverse X of Hᵀ satisfies X·Hᵀ = I, and the compensation term
        // lands in the identity check below.
        let h_inv_t = left_inverse_transpose(&h)?;
        let idy = mat_mul(&g_inv, &g)?.add(&mat_mul(&ht, &h_inv_t)?)?;
        if idy != PolyMatrix::identity(n0) {
            return Err(CodeError::Invalid("derived matrices violate G⁻¹G + Hᵀ(H⁻¹)ᵀ = I".into()));
        }
        let nu: usize = (0..k0)
            .map(|r| (0..n0).filter_map(|c| g[(r, c)].degree()).max().unwrap_or(0) as usize)
            .sum();
        if nu == 0 {
            return Err(CodeError::Invalid("memoryless generator".into()));
        }
        let qli_l = if k0 == 1 && n0 == 2 {
            let s = g[(0, 0)].add(g[(0, 1)]);
            match (s.weight(), s.degree()) {
                (1, Some(l)) if l as usize >= 1 && (l as usize) < nu => Some(l as usize),
                _ => None,
            }
        } else {
            None
        };
        Ok(ConvCode {
            name: name.to_string(),
            g,
            g_inv,
            h,
            h_inv_t,
            k0,
            n0,
            nu,
            qli_l,
        })
    }

    /// Registry lookup: C1, C2, C3 from the literature.
    pub fn registry(name: &str) -> Result<ConvCode> {
        let g = match name.to_ascii_uppercase().as_str() {
            // (1+D+D², 1+D²), QLI with L=1
            "C1" => PolyMatrix::from_binary(1, 2, &["111", "101"])?,
            // (1+D+D³+D⁴+D⁶, 1+D+D²+D³+D⁴+D⁶), QLI with L=2
            "C2" => PolyMatrix::from_binary(1, 2, &["1101101", "1111101"])?,
            // (1+D+D⁴+D⁵+D⁶, 1+D²+D³+D⁴+D⁶), general code with G⁻¹=(D,1+D)ᵀ
            "C3" => PolyMatrix::from_binary(1, 2, &["1100111", "1011101"])?,
            other => return Err(CodeError::UnknownCode(other.to_string())),
        };
        ConvCode::from_generator(&name.to_ascii_uppercase(), g)
    }

    /// QLI smoothed pre-decoder F = (1,...,1)ᵀ.
    pub fn f_column(&self) -> PolyMatrix {
        let mut f = PolyMatrix::zero(self.n0, 1);
        for r in 0..self.n0 {
            f[(r, 0)] = Gf2Poly::ONE;
        }
        f
    }
}

/// y_k = i_k G(D). Info blocks are k₀ bits wide; with `terminate`, ν zero
/// blocks are appended so the encoder ends in the all-zero state.
pub fn encode(code: &ConvCode, info: &[u8], terminate: bool) -> HardFrame {
    let mut bits: Vec<u8> = info.to_vec();
    if terminate {
        bits.extend(std::iter::repeat(0).take(code.nu));
    }
    filter_blocks(&bits, code.k0, &code.g)
}

/// Apply a polynomial matrix (rows = input width, cols = output width) to a
/// block sequence as a causal filter: out_k = Σ_j in_{k-j} · M_j.
pub fn filter_blocks(input: &[u8], in_width: usize, m: &PolyMatrix) -> HardFrame {
    assert_eq!(m.rows, in_width);
    let out_width = m.cols;
    let mut out = vec![0u8; input.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let mut block = 0u8;
        for c in 0..out_width {
            let mut bit = 0u8;
            for r in 0..in_width {
                let poly = m[(r, c)];
                if poly.is_zero() {
                    continue;
                }
                let maxd = poly.degree().unwrap() as usize;
                for j in 0..=maxd.min(k) {
                    if poly.coeff(j as u32) {
                        bit ^= (input[k - j] >> r) & 1;
                    }
                }
            }
            block |= bit << c;
        }
        *o = block;
    }
    HardFrame::new(out_width, out)
}

/// Syndrome ζ_k = z_k^h Hᵀ(D); all-zero exactly on codewords.
pub fn syndrome(code: &ConvCode, frame: &HardFrame) -> Result<Vec<u8>> {
    if frame.n0 != code.n0 {
        return Err(CodeError::BlockWidth { expected: code.n0, got: frame.n0 });
    }
    let ht = code.h.transpose();
    Ok(filter_blocks(&frame.blocks, code.n0, &ht).blocks)
}

/// Filtered estimate î(k|k) = z_k^h G⁻¹ (equals i_k + e_k G⁻¹ exactly, since
/// G·G⁻¹ = I with no delay).
pub fn predecode_general(code: &ConvCode, frame: &HardFrame) -> Result<Vec<u8>> {
    if frame.n0 != code.n0 {
        return Err(CodeError::BlockWidth { expected: code.n0, got: frame.n0 });
    }
    Ok(filter_blocks(&frame.blocks, code.n0, &code.g_inv).blocks)
}

/// Smoothed estimate î(k−L|k) = z_k^h F for QLI codes.
pub fn predecode_qli(code: &ConvCode, frame: &HardFrame) -> Result<Vec<u8>> {
    if code.qli_l.is_none() {
        return Err(CodeError::NotQli);
    }
    if frame.n0 != code.n0 {
        return Err(CodeError::BlockWidth { expected: code.n0, got: frame.n0 });
    }
    Ok(frame
        .blocks
        .iter()
        .map(|b| {
            let mut bit = 0u8;
            for l in 0..code.n0 {
                bit ^= (b >> l) & 1;
            }
            bit
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredecodeMode {
    General,
    Qli,
}

/// Hard-decision input to the main decoder.
///
/// General: r_k^h = z_k^h + (z_k^h G⁻¹)G, which equals ζ(H⁻¹)ᵀ.
/// QLI: η_{k−L}^h = z_{k−L}^h + (z_k^h F)G, which equals (ζ_k, ..., ζ_k);
/// beyond the frame z is taken as zero. Both closed forms are checked.
pub fn main_input_hard(code: &ConvCode, frame: &HardFrame, mode: PredecodeMode) -> Result<HardFrame> {
    let t = frame.len();
    let out = match mode {
        PredecodeMode::General => {
            let a = predecode_general(code, frame)?;
            let reenc = filter_blocks(&a, code.k0, &code.g);
            frame.xor(&reenc)
        }
        PredecodeMode::Qli => {
            let l = code.qli_l.ok_or(CodeError::NotQli)?;
            // η_{k−L} = z_{k−L} + (z_k F)G: the re-encoded term at output m is
            // Σ_j g_j s_{m+L−j} with s_k = z_k^h F, which reaches back to
            // s_0..s_{L−1} at the frame start; filter s whole and shift by L.
            let mut s = predecode_qli(code, frame)?;
            s.extend(std::iter::repeat(0).take(l));
            let reenc = filter_blocks(&s, code.k0, &code.g);
            let shifted = HardFrame::new(code.n0, reenc.blocks[l..].to_vec());
            frame.xor(&shifted)
        }
    };
    // Closed-form verification (Def 2.1 / Eq. (37)).
    let zeta_ext = {
        let mut padded = frame.blocks.clone();
        padded.extend(std::iter::repeat(0).take(code.nu + code.qli_l.unwrap_or(0)));
        filter_blocks(&padded, code.n0, &code.h.transpose()).blocks
    };
    match mode {
        PredecodeMode::General => {
            let closed = filter_blocks(&zeta_ext[..t], code.n0 - code.k0, &code.h_inv_t);
            debug_assert_eq!(out, closed, "r^h must equal ζ(H⁻¹)ᵀ");
        }
        PredecodeMode::Qli => {
            let l = code.qli_l.unwrap();
            for k in 0..t {
                let zb = zeta_ext[k + l] & 1;
                let want = if zb == 1 { (1u8 << code.n0) - 1 } else { 0 };
                debug_assert_eq!(out.blocks[k], want, "η^h must equal (ζ, ζ) at {k}");
            }
        }
    }
    Ok(out)
}

/// Controller-canonical encoder trellis with 2^{k₀ν} states.
#[derive(Clone, Debug)]
pub struct TrellisModule {
    pub nu: usize,
    pub k0: usize,
    pub n0: usize,
    pub num_states: usize,
    /// transitions[state][input] = (next_state, output block)
    pub transitions: Vec<Vec<(u32, u8)>>,
}

/// Build the code trellis; state = the latest ν input blocks, most recent in
/// the low bits.
pub fn build_code_trellis(code: &ConvCode) -> Result<TrellisModule> {
    let state_bits = code.k0 * code.nu;
    if state_bits > 24 {
        return Err(CodeError::StateBudget(state_bits));
    }
    let num_states = 1usize << state_bits;
    let num_inputs = 1usize << code.k0;
    let mut transitions = vec![Vec::with_capacity(num_inputs); num_states];
    // For k0 = 1 the state packs u_{t-1}..u_{t-nu} as bits 0..nu-1. For k0 > 1
    // the blocks are packed the same way, k0 bits per section.
    for s in 0..num_states {
        for u in 0..num_inputs {
            let next = ((s << code.k0) | u) & (num_states - 1);
            let mut block = 0u8;
            for c in 0..code.n0 {
                let mut bit = 0u8;
                for r in 0..code.k0 {
                    let poly = code.g[(r, c)];
                    for j in 0..=code.nu.min(63) {
                        if poly.coeff(j as u32) {
                            let in_bits = if j == 0 { u } else { (s >> ((j - 1) * code.k0)) & ((1 << code.k0) - 1) };
                            bit ^= ((in_bits >> r) & 1) as u8;
                        }
                    }
                }
                block |= bit << c;
            }
            transitions[s].push((next as u32, block));
        }
    }
    Ok(TrellisModule {
        nu: code.nu,
        k0: code.k0,
        n0: code.n0,
        num_states,
        transitions,
    })
}

/// Observer-canonical syndrome-former state map σ_k = e_k U(D).
#[derive(Clone, Debug)]
pub struct ErrorStateMap {
    pub u: PolyMatrix,
}

/// U(D): n₀ × ν with U_{l,i}(D) = Σ_j h_l[i+j]·D^j (adjoint-obvious
/// realization); requires k₀ = n₀ − 1 so that H is a single row.
pub fn error_state_map(code: &ConvCode) -> Result<ErrorStateMap> {
    if code.n0 - code.k0 != 1 {
        return Err(CodeError::UnsupportedRate);
    }
    let nu_h = (0..code.n0).filter_map(|c| code.h[(0, c)].degree()).max().unwrap_or(0) as usize;
    let mut u = PolyMatrix::zero(code.n0, nu_h);
    for l in 0..code.n0 {
        let hl = code.h[(0, l)];
        for (i, col) in (1..=nu_h).zip(0..nu_h) {
            let mut bits = 0u64;
            for j in 0..=(63 - i as u32).min(63) {
                if hl.coeff(i as u32 + j) {
                    bits |= 1u64 << j;
                }
            }
            u[(l, col)] = Gf2Poly(bits);
        }
    }
    Ok(ErrorStateMap { u })
}

/// One-to-one correspondence between the main-decoder code-trellis state and
/// the error-trellis state at depth k (ν = 2 rate-1/2 case, Eqs. (79)/(81)).
pub fn state_correspondence(
    code: &ConvCode,
    mode: PredecodeMode,
    u_seq: &[u8],
    zeta_seq: &[u8],
    k: usize,
) -> Result<((u8, u8), (u8, u8))> {
    if code.nu != 2 || code.k0 != 1 || code.n0 != 2 {
        return Err(CodeError::UnsupportedRate);
    }
    let at = |s: &[u8], i: isize| -> std::result::Result<u8, CodeError> {
        if i < 0 {
            Ok(0)
        } else {
            s.get(i as usize).copied().map(|b| b & 1).ok_or(CodeError::IndexRange)
        }
    };
    let ki = k as isize;
    let code_state = (at(u_seq, ki - 1)?, at(u_seq, ki)?);
    let error_state = match mode {
        PredecodeMode::General => (at(u_seq, ki)?, at(u_seq, ki - 1)? ^ at(zeta_seq, ki)?),
        PredecodeMode::Qli => {
            if code.qli_l != Some(1) {
                return Err(CodeError::NotQli);
            }
            (at(u_seq, ki + 1)? ^ at(zeta_seq, ki + 1)?, at(u_seq, ki)?)
        }
    };
    Ok((code_state, error_state))
}
