//! BPSK/AWGN channel model: modulation, noise generation, hard decisions,
//! soft remapping, optional 8-level quantization, and the crossover
//! probability ε = Q(c).

use crate::conv::HardFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

/// BPSK over AWGN at code rate `rate`; bit 0 maps to +c, bit 1 to −c, with
/// unit-variance noise, c = √(2·R·Eb/N0).
#[derive(Clone, Copy, Debug)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64) -> ChannelConfig {
        assert!(rate > 0.0 && rate < 1.0);
        ChannelConfig { ebn0_db, rate }
    }

    /// Signal amplitude c (noise is unit variance).
    pub fn amplitude(&self) -> f64 {
        let ebn0 = 10f64.powf(self.ebn0_db / 10.0);
        (2.0 * self.rate * ebn0).sqrt()
    }

    /// Hard-decision crossover probability ε = Q(c).
    pub fn epsilon(&self) -> f64 {
        q_function(self.amplitude())
    }
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// A frame of channel observations, one f64 per transmitted bit, grouped in
/// n₀-bit blocks matching the hard-frame layout.
#[derive(Clone, Debug)]
pub struct SoftFrame {
    pub n0: usize,
    pub samples: Vec<f64>,
}

impl SoftFrame {
    pub fn len(&self) -> usize {
        self.samples.len() / self.n0
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, k: usize, l: usize) -> f64 {
        self.samples[k * self.n0 + l]
    }
}

/// Deterministic per-frame RNG: a fixed mix of the master seed and frame
/// index, so results do not depend on work distribution across threads.
pub fn frame_rng(master_seed: u64, frame_index: u64) -> ChaCha8Rng {
    let mut x = master_seed ^ frame_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

/// Transmit a hard codeword frame: z = x·c + w with x = ±1 (bit 0 → +1).
pub fn transmit(cfg: &ChannelConfig, codeword: &HardFrame, rng: &mut impl Rng) -> SoftFrame {
    let c = cfg.amplitude();
    let mut samples = Vec::with_capacity(codeword.len() * codeword.n0);
    for k in 0..codeword.len() {
        for l in 0..codeword.n0 {
            let x = if codeword.bit(k, l) == 0 { 1.0 } else { -1.0 };
            let w: f64 = rng.sample(StandardNormal);
            samples.push(x * c + w);
        }
    }
    SoftFrame { n0: codeword.n0, samples }
}

/// Hard decision: z ≥ 0 → bit 0.
pub fn hard_decision(soft: &SoftFrame) -> HardFrame {
    let blocks = (0..soft.len())
        .map(|k| {
            (0..soft.n0).fold(0u8, |acc, l| acc | (((soft.sample(k, l) < 0.0) as u8) << l))
        })
        .collect();
    HardFrame::new(soft.n0, blocks)
}

/// Replace each sample's sign by the given hard bits (bit 0 → positive),
/// keeping the magnitudes: the soft input for the main decoder.
pub fn remap_soft(soft: &SoftFrame, signs: &HardFrame) -> SoftFrame {
    assert_eq!(soft.n0, signs.n0);
    assert_eq!(soft.len(), signs.len());
    let samples = (0..soft.len())
        .flat_map(|k| {
            (0..soft.n0).map(move |l| {
                let mag = soft.sample(k, l).abs();
                if signs.bit(k, l) == 0 {
                    mag
                } else {
                    -mag
                }
            })
        })
        .collect();
    SoftFrame { n0: soft.n0, samples }
}

/// 8-level midrise quantizer with step Δ: thresholds at 0, ±Δ, ±2Δ, ±3Δ;
/// interior cells reproduce at (i+½)Δ and the saturation cells at 3.25Δ.
#[derive(Clone, Copy, Debug)]
pub struct Quantizer8 {
    pub delta: f64,
}

impl Quantizer8 {
    pub fn new(delta: f64) -> Quantizer8 {
        assert!(delta > 0.0);
        Quantizer8 { delta }
    }

    /// Cell index 0..7 (0 = most negative).
    pub fn index(&self, z: f64) -> usize {
        let mut i = 4usize;
        let mag = z.abs();
        for t in [self.delta, 2.0 * self.delta, 3.0 * self.delta] {
            if mag >= t {
                i += 1;
            }
        }
        i -= 4;
        if z >= 0.0 {
            4 + i
        } else {
            3 - i
        }
    }

    /// Reproduction value of the cell containing z.
    pub fn reproduce(&self, z: f64) -> f64 {
        let idx = self.index(z);
        let side = if idx >= 4 { 1.0 } else { -1.0 };
        let mag_idx = if idx >= 4 { idx - 4 } else { 3 - idx };
        let mag = if mag_idx < 3 {
            (mag_idx as f64 + 0.5) * self.delta
        } else {
            3.25 * self.delta
        };
        side * mag
    }

    pub fn apply(&self, soft: &SoftFrame) -> SoftFrame {
        SoftFrame {
            n0: soft.n0,
            samples: soft.samples.iter().map(|&z| self.reproduce(z)).collect(),
        }
    }
}
