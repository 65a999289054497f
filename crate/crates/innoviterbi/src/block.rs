//! Two-stage decoding of linear block codes: the generator is completed to a
//! nonsingular matrix B, giving a right inverse and syndrome former in one
//! stroke, and the innovation ξ^h = z^h + (z^hG⁻¹)G = ζ(H⁻¹)ᵀ feeds an ML
//! main decoder exactly as in the convolutional case.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BlockError {
    #[error("block length {0} exceeds 63")]
    TooWide(usize),
    #[error("generator is rank deficient")]
    RankDeficient,
    #[error("dimension {0} too large for exhaustive ML (max 20)")]
    DimensionTooLarge(usize),
    #[error("need 0 < k < n")]
    BadShape,
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("unknown registry code {0:?} (known: hamming74, hamming84)")]
    UnknownCode(String),
}

pub type Result<T> = std::result::Result<T, BlockError>;

/// Rows are u64 bitmasks; bit j = column j.
fn invert(rows: &[u64], n: usize) -> Option<Vec<u64>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r] >> col & 1 == 1)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r] >> col & 1 == 1 {
                a[r] ^= a[col];
                inv[r] ^= inv[col];
            }
        }
    }
    Some(inv)
}

/// An (n, k) linear block code with the matrices used by two-stage decoding.
#[derive(Clone, Debug)]
pub struct BlockCode {
    pub n: usize,
    pub k: usize,
    /// Generator rows (k of them, n bits wide).
    pub g: Vec<u64>,
    /// Nonsingular completion B: the k generator rows followed by n−k unit
    /// rows, chosen from the high coordinates down so a systematic generator
    /// yields B = [[I, S], [0, I]].
    pub b: Vec<u64>,
    pub b_inv: Vec<u64>,
}

fn row_reduce_insert(basis: &mut Vec<u64>, mut v: u64) -> bool {
    for &b in basis.iter() {
        let lead = 63 - b.leading_zeros();
        if v >> lead & 1 == 1 {
            v ^= b;
        }
    }
    if v == 0 {
        false
    } else {
        basis.push(v);
        true
    }
}

impl BlockCode {
    pub fn new(n: usize, k: usize, g: Vec<u64>) -> Result<BlockCode> {
        if n > 63 {
            return Err(BlockError::TooWide(n));
        }
        if k == 0 || k >= n || g.len() != k {
            return Err(BlockError::BadShape);
        }
        let mask = (1u64 << n) - 1;
        let mut basis = Vec::new();
        for &row in &g {
            if row & !mask != 0 {
                return Err(BlockError::BadShape);
            }
            if !row_reduce_insert(&mut basis, row) {
                return Err(BlockError::RankDeficient);
            }
        }
        let mut completion = Vec::new();
        for j in (0..n).rev() {
            if completion.len() == n - k {
                break;
            }
            if row_reduce_insert(&mut basis, 1u64 << j) {
                completion.push(1u64 << j);
            }
        }
        if completion.len() != n - k {
            return Err(BlockError::RankDeficient);
        }
        completion.sort_unstable();
        let mut b = g.clone();
        b.extend(completion);
        let b_inv = invert(&b, n).ok_or(BlockError::RankDeficient)?;
        Ok(BlockCode { n, k, g, b, b_inv })
    }

    /// The (7,4) Hamming code in systematic form, or its (8,4) extension with
    /// an overall parity bit.
    pub fn registry(name: &str) -> Result<BlockCode> {
        let s = [0b110u64, 0b101, 0b011, 0b111];
        match name.to_ascii_lowercase().as_str() {
            "hamming74" => {
                let g = (0..4).map(|i| (1u64 << i) | (s[i] << 4)).collect();
                BlockCode::new(7, 4, g)
            }
            "hamming84" => {
                let g = (0..4)
                    .map(|i| {
                        let row = (1u64 << i) | (s[i] << 4);
                        row | (((row.count_ones() as u64) & 1) << 7)
                    })
                    .collect();
                BlockCode::new(8, 4, g)
            }
            other => Err(BlockError::UnknownCode(other.to_string())),
        }
    }

    fn mul_rows(v: u64, rows: &[u64]) -> u64 {
        rows.iter()
            .enumerate()
            .filter(|&(i, _)| v >> i & 1 == 1)
            .fold(0, |acc, (_, &r)| acc ^ r)
    }

    /// Codeword for info word u (k bits).
    pub fn encode(&self, u: u64) -> u64 {
        Self::mul_rows(u, &self.g)
    }

    /// zG⁻¹ (k bits): G⁻¹ is the first k columns of B⁻¹.
    pub fn predecode(&self, z: u64) -> u64 {
        let gi: Vec<u64> = self.b_inv.iter().map(|r| r & ((1 << self.k) - 1)).collect();
        Self::mul_rows(z, &gi)
    }

    /// Syndrome ζ = zHᵀ (n−k bits): Hᵀ is the last n−k columns of B⁻¹.
    pub fn syndrome(&self, z: u64) -> u64 {
        let ht: Vec<u64> = self.b_inv.iter().map(|r| r >> self.k).collect();
        Self::mul_rows(z, &ht)
    }

    /// ζ(H⁻¹)ᵀ (n bits): (H⁻¹)ᵀ is the last n−k rows of B.
    pub fn syndrome_expand(&self, zeta: u64) -> u64 {
        Self::mul_rows(zeta, &self.b[self.k..])
    }

    /// Innovation ξ^h = z ⊕ (zG⁻¹)G; equals ζ(H⁻¹)ᵀ.
    pub fn innovation(&self, z: u64) -> u64 {
        let xi = z ^ self.encode(self.predecode(z));
        debug_assert_eq!(xi, self.syndrome_expand(self.syndrome(z)));
        xi
    }

    fn correlation(&self, y: u64, soft: &[f64]) -> f64 {
        (0..self.n).map(|j| (1.0 - 2.0 * f64::from(y >> j & 1 == 1)) * soft[j]).sum()
    }

    fn check_soft(&self, soft: &[f64]) -> Result<()> {
        if soft.len() != self.n {
            return Err(BlockError::SampleCount { expected: self.n, got: soft.len() });
        }
        if self.k > 20 {
            return Err(BlockError::DimensionTooLarge(self.k));
        }
        Ok(())
    }

    /// Exhaustive soft-decision ML decoding; returns (info, metric).
    pub fn ml_decode(&self, soft: &[f64]) -> Result<(u64, f64)> {
        self.check_soft(soft)?;
        let mut best = (0u64, f64::NEG_INFINITY);
        for u in 0..1u64 << self.k {
            let m = self.correlation(self.encode(u), soft);
            if m > best.1 {
                best = (u, m);
            }
        }
        Ok(best)
    }

    /// Two-stage decoding: hard pre-decode a = z^hG⁻¹, innovation ξ^h, sign
    /// remap, ML main decode, recombine î = a ⊕ v̂. Metric-equivalent to
    /// `ml_decode`.
    pub fn two_stage_decode(&self, soft: &[f64]) -> Result<(u64, f64)> {
        self.check_soft(soft)?;
        let zh = (0..self.n).fold(0u64, |acc, j| acc | (u64::from(soft[j] < 0.0) << j));
        let a = self.predecode(zh);
        let xi = zh ^ self.encode(a);
        let remapped: Vec<f64> = (0..self.n)
            .map(|j| if xi >> j & 1 == 1 { -soft[j].abs() } else { soft[j].abs() })
            .collect();
        let mut best = (0u64, f64::NEG_INFINITY);
        for v in 0..1u64 << self.k {
            let m = self.correlation(self.encode(v), &remapped);
            if m > best.1 {
                best = (v, m);
            }
        }
        let info = a ^ best.0;
        Ok((info, self.correlation(self.encode(info), soft)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{frame_rng, ChannelConfig};
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn hamming74_construction() {
        let code = BlockCode::registry("hamming74").unwrap();
        assert_eq!((code.n, code.k), (7, 4));
        // B = [[I,S],[0,I]]: completion rows are the last three unit vectors
        assert_eq!(&code.b[4..], &[1 << 4, 1 << 5, 1 << 6]);
        // B·B⁻¹ = I
        for i in 0..7 {
            let row = BlockCode::mul_rows(code.b[i], &code.b_inv);
            assert_eq!(row, 1 << i, "row {i}");
        }
        // G·G⁻¹ = I_k and G·Hᵀ = 0
        for u in 0..16u64 {
            let y = code.encode(u);
            assert_eq!(code.predecode(y), u);
            assert_eq!(code.syndrome(y), 0);
        }
        // minimum distance 3
        let dmin = (1..16u64).map(|u| code.encode(u).count_ones()).min().unwrap();
        assert_eq!(dmin, 3);
    }

    #[test]
    fn hamming84_has_distance_four() {
        let code = BlockCode::registry("hamming84").unwrap();
        let dmin = (1..16u64).map(|u| code.encode(u).count_ones()).min().unwrap();
        assert_eq!(dmin, 4);
        for u in 0..16u64 {
            assert_eq!(code.encode(u).count_ones() % 2, 0, "even weight");
        }
    }

    #[test]
    fn innovation_identity_over_all_words() {
        // z = (zG⁻¹)G ⊕ (zHᵀ)(H⁻¹)ᵀ for every z, and for a systematic code
        // ξ^h places ζ on the parity coordinates: ξ^h = (0…0, ζ).
        let code = BlockCode::registry("hamming74").unwrap();
        for z in 0..128u64 {
            let xi = code.innovation(z);
            assert_eq!(code.encode(code.predecode(z)) ^ xi, z);
            assert_eq!(xi & 0b1111, 0, "info coordinates must be clear");
            assert_eq!(xi >> 4, code.syndrome(z));
        }
    }

    #[test]
    fn syndrome_depends_only_on_error() {
        let code = BlockCode::registry("hamming74").unwrap();
        for u in 0..16u64 {
            let y = code.encode(u);
            for e in 0..128u64 {
                assert_eq!(code.syndrome(y ^ e), code.syndrome(e));
            }
        }
    }

    #[test]
    fn non_systematic_generator_still_validates() {
        // rows of the simplex-ish generator: not systematic, still rank 3
        let code = BlockCode::new(6, 3, vec![0b101011, 0b011101, 0b111000]).unwrap();
        for u in 0..8u64 {
            let y = code.encode(u);
            assert_eq!(code.predecode(y), u);
            assert_eq!(code.syndrome(y), 0);
            assert_eq!(code.innovation(y), 0);
        }
        for z in 0..64u64 {
            let _ = code.innovation(z); // internal identity debug-asserted
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            BlockCode::new(7, 2, vec![0b11, 0b11]),
            Err(BlockError::RankDeficient)
        ));
        assert!(matches!(BlockCode::new(7, 0, vec![]), Err(BlockError::BadShape)));
        assert!(matches!(BlockCode::new(64, 4, vec![1, 2, 4, 8]), Err(BlockError::TooWide(64))));
        assert!(BlockCode::registry("golay").is_err());
    }

    #[test]
    fn two_stage_equals_ml() {
        let code = BlockCode::registry("hamming74").unwrap();
        let cfg = ChannelConfig::new(3.0, 4.0 / 7.0);
        let c = cfg.amplitude();
        for frame in 0..2000 {
            let mut rng = frame_rng(555, frame);
            let u = rng.gen_range(0..16u64);
            let y = code.encode(u);
            let soft: Vec<f64> = (0..7)
                .map(|j| {
                    let x = if y >> j & 1 == 0 { 1.0 } else { -1.0 };
                    let w: f64 = rng.sample(StandardNormal);
                    x * c + w
                })
                .collect();
            let ml = code.ml_decode(&soft).unwrap();
            let ts = code.two_stage_decode(&soft).unwrap();
            assert_eq!(ts.0, ml.0, "frame {frame}");
            assert_eq!(ts.1, ml.1, "frame {frame}");
        }
    }

    #[test]
    fn ml_corrects_single_errors() {
        let code = BlockCode::registry("hamming74").unwrap();
        for u in 0..16u64 {
            let y = code.encode(u);
            for pos in 0..7 {
                let soft: Vec<f64> = (0..7)
                    .map(|j| {
                        let bit = (y >> j & 1) ^ u64::from(j == pos);
                        if bit == 0 { 1.0 } else { -1.0 }
                    })
                    .collect();
                assert_eq!(code.ml_decode(&soft).unwrap().0, u);
            }
        }
    }

    #[test]
    fn sample_count_is_checked() {
        let code = BlockCode::registry("hamming74").unwrap();
        assert!(matches!(
            code.ml_decode(&[1.0; 6]),
            Err(BlockError::SampleCount { expected: 7, got: 6 })
        ));
    }
}
