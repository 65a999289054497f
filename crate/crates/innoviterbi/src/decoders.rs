//! Soft-decision Viterbi decoding and its two-stage (SST) variants: the
//! plain decoder, the SST pipeline (pre-decoder + main decoder), trellis
//! degeneration over zero-strings, the generalized Viterbi algorithm (GVA),
//! and probability-selecting-states (PSS) decoding.

use crate::channel::{hard_decision, remap_soft, SoftFrame};
use crate::conv::{
    build_code_trellis, encode, filter_blocks, predecode_general, predecode_qli, syndrome,
    CodeError, ConvCode, HardFrame, PredecodeMode, TrellisModule,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("frame too short: {got} sections, need at least {need}")]
    FrameTooShort { got: usize, need: usize },
    #[error("invalid decoder configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, DecodeError>;

/// Decoded frame: the full input sequence (info bits followed by the ν-bit
/// tail for terminated frames) and the correlation metric of the re-encoded
/// codeword against the original observation.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub info: Vec<u8>,
    pub metric: f64,
}

/// Correlation Σ (1−2y)·z of the codeword for `info` against the soft frame,
/// accumulated in canonical order so equal codewords give bitwise-equal
/// metrics regardless of which decoder produced them.
pub fn correlation(code: &ConvCode, info: &[u8], soft: &SoftFrame) -> f64 {
    let y = encode(code, info, false);
    let mut acc = 0.0;
    for k in 0..y.len() {
        for l in 0..y.n0 {
            let sign = 1.0 - 2.0 * f64::from(y.bit(k, l));
            acc += sign * soft.sample(k, l);
        }
    }
    acc
}

fn branch_metrics(soft: &SoftFrame, k: usize, n0: usize) -> Vec<f64> {
    (0..1usize << n0)
        .map(|b| {
            (0..n0)
                .map(|l| (1.0 - 2.0 * f64::from((b >> l) & 1 == 1)) * soft.sample(k, l))
                .sum()
        })
        .collect()
}

/// Add-compare-select over one section; returns per-state backpointers.
fn acs_step(tr: &TrellisModule, bm: &[f64], metrics: &[f64], next: &mut [f64], bp: &mut [u32]) {
    next.fill(f64::NEG_INFINITY);
    for s in 0..tr.num_states {
        if metrics[s] == f64::NEG_INFINITY {
            continue;
        }
        for &(n, out) in &tr.transitions[s] {
            let cand = metrics[s] + bm[out as usize];
            if cand > next[n as usize] {
                next[n as usize] = cand;
                bp[n as usize] = s as u32;
            }
        }
    }
}

fn traceback(tr: &TrellisModule, bps: &[Vec<u32>], final_state: usize) -> Vec<u8> {
    let mask = (1usize << tr.k0) - 1;
    let mut inputs = vec![0u8; bps.len()];
    let mut s = final_state;
    for t in (0..bps.len()).rev() {
        inputs[t] = (s & mask) as u8;
        s = bps[t][s] as usize;
    }
    inputs
}

/// Per-step state pruning applied after the ACS update.
trait Pruner {
    fn prune(&mut self, metrics: &mut [f64]);
}

struct NoPrune;
impl Pruner for NoPrune {
    fn prune(&mut self, _: &mut [f64]) {}
}

fn run_viterbi(
    tr: &TrellisModule,
    soft: &SoftFrame,
    final_state: usize,
    pruner: &mut impl Pruner,
    pinned: &[(usize, usize)],
) -> Vec<u8> {
    let t_len = soft.len();
    let mut metrics = vec![f64::NEG_INFINITY; tr.num_states];
    metrics[0] = 0.0;
    let mut next = vec![0.0; tr.num_states];
    let mut bps: Vec<Vec<u32>> = Vec::with_capacity(t_len);
    let mut pin_iter = pinned.iter().peekable();
    for k in 0..t_len {
        let bm = branch_metrics(soft, k, tr.n0);
        let mut bp = vec![0u32; tr.num_states];
        acs_step(tr, &bm, &metrics, &mut next, &mut bp);
        std::mem::swap(&mut metrics, &mut next);
        let depth = k + 1;
        while let Some(&&(_, hi)) = pin_iter.peek() {
            if hi < depth {
                pin_iter.next();
            } else {
                break;
            }
        }
        if let Some(&&(lo, hi)) = pin_iter.peek() {
            if lo <= depth && depth <= hi {
                for s in 1..tr.num_states {
                    metrics[s] = f64::NEG_INFINITY;
                }
            }
        }
        let before_prune = metrics[final_state];
        pruner.prune(&mut metrics);
        if depth == t_len {
            // the frame must end in `final_state`; keep it alive through the
            // last pruning step so the traceback follows a real survivor
            metrics[final_state] = before_prune;
        }
        bps.push(bp);
    }
    traceback(tr, &bps, final_state)
}

/// Plain soft-decision Viterbi decoding of a terminated frame: start and end
/// in the all-zero state; returns the full input sequence including the tail.
pub fn viterbi_decode(code: &ConvCode, soft: &SoftFrame) -> Result<DecodeResult> {
    let tr = build_code_trellis(code)?;
    check_frame(code, soft)?;
    let info = run_viterbi(&tr, soft, 0, &mut NoPrune, &[]);
    let metric = correlation(code, &info, soft);
    Ok(DecodeResult { info, metric })
}

fn check_frame(code: &ConvCode, soft: &SoftFrame) -> Result<()> {
    if soft.len() < code.nu {
        return Err(DecodeError::FrameTooShort { got: soft.len(), need: code.nu });
    }
    Ok(())
}

/// Everything the main decoder needs, produced by the pre-decoder stage.
#[derive(Clone, Debug)]
pub struct SstFrontEnd {
    pub mode: PredecodeMode,
    /// Pre-decoded info estimate a (causal; zero before the frame).
    pub predecode: Vec<u8>,
    /// Hard input to the main decoder (r^h or η^h).
    pub main_hard: HardFrame,
    /// Soft input to the main decoder: |z| remapped onto the hard input.
    pub main_soft: SoftFrame,
    /// Syndrome of the observation.
    pub zeta: Vec<u8>,
    /// Trellis state reached by a, which the main decoder must end in so the
    /// recombined estimate terminates in the all-zero state.
    pub final_state: usize,
}

/// Pre-decode stage of the SST decoder.
///
/// The re-encoding is strictly causal (the pre-decoder output is taken as
/// zero before the frame start), so that the candidate set seen by the main
/// decoder is exactly the code trellis started in the all-zero state and the
/// two-stage decoder is metric-for-metric equivalent to plain Viterbi
/// decoding. Within the frame interior this agrees with the steady-state
/// forms r^h = ζ(H⁻¹)ᵀ and η^h = (ζ, ζ).
pub fn sst_front_end(code: &ConvCode, soft: &SoftFrame, mode: PredecodeMode) -> Result<SstFrontEnd> {
    check_frame(code, soft)?;
    if code.k0 != 1 {
        return Err(DecodeError::Config("SST pipeline requires k0 = 1".into()));
    }
    let t_len = soft.len();
    let zh = hard_decision(soft);
    let a: Vec<u8> = match mode {
        PredecodeMode::General => predecode_general(code, &zh)?,
        PredecodeMode::Qli => {
            let l = code.qli_l.ok_or(CodeError::NotQli)?;
            let s = predecode_qli(code, &zh)?;
            (0..t_len).map(|t| if t + l < t_len { s[t + l] } else { 0 }).collect()
        }
    };
    let reenc = filter_blocks(&a, code.k0, &code.g);
    let main_hard = zh.xor(&reenc);
    let main_soft = remap_soft(soft, &main_hard);
    let zeta = syndrome(code, &zh)?;
    let final_state = (0..code.nu.min(t_len)).fold(0usize, |acc, j| {
        acc | ((a[t_len - 1 - j] as usize & 1) << j)
    });
    Ok(SstFrontEnd { mode, predecode: a, main_hard, main_soft, zeta, final_state })
}

/// Recombine the main decoder's path v with the pre-decoded estimate:
/// î = a ⊕ v, metric taken against the original observation.
pub fn sst_recombine(
    code: &ConvCode,
    front: &SstFrontEnd,
    v: &[u8],
    soft: &SoftFrame,
) -> DecodeResult {
    let info: Vec<u8> = front.predecode.iter().zip(v).map(|(a, b)| a ^ b).collect();
    let metric = correlation(code, &info, soft);
    DecodeResult { info, metric }
}

/// Two-stage (SST) Viterbi decoding of a terminated frame; exactly equivalent
/// to `viterbi_decode` up to metric ties.
pub fn sst_decode(code: &ConvCode, soft: &SoftFrame, mode: PredecodeMode) -> Result<DecodeResult> {
    let front = sst_front_end(code, soft, mode)?;
    let tr = build_code_trellis(code)?;
    let v = run_viterbi(&tr, &front.main_soft, front.final_state, &mut NoPrune, &[]);
    Ok(sst_recombine(code, &front, &v, soft))
}

// ---------------------------------------------------------------------------
// Trellis degeneration over zero-strings
// ---------------------------------------------------------------------------

/// A zero-string: depths [t, t′] such that every section between them carries
/// an all-zero hard input block; the length is ℓ = t′ − t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroString {
    pub t: usize,
    pub t_prime: usize,
}

impl ZeroString {
    pub fn len(&self) -> usize {
        self.t_prime - self.t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Maximal runs of all-zero blocks in the main-decoder hard input, as depth
/// intervals, keeping those of length ≥ `l0`.
pub fn find_zero_strings(main_hard: &HardFrame, l0: usize) -> Vec<ZeroString> {
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for k in 0..=main_hard.len() {
        let zero = k < main_hard.len() && main_hard.blocks[k] == 0;
        match (zero, run_start) {
            (true, None) => run_start = Some(k),
            (false, Some(s)) => {
                if k - s >= l0 {
                    out.push(ZeroString { t: s, t_prime: k });
                }
                run_start = None;
            }
            _ => {}
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct ZeroStringOutcome {
    pub zs: ZeroString,
    pub tau: Option<usize>,
    pub tau_prime: Option<usize>,
    pub success: bool,
}

/// Complexity bookkeeping for one decoded frame, in trellis-section units.
#[derive(Clone, Debug, Default)]
pub struct DegenerationReport {
    pub outcomes: Vec<ZeroStringOutcome>,
    /// Sections saved by pinning: Σ (τ′ − τ) over successful strings.
    pub delta: usize,
    /// Probe overhead: Σ (N_s−1)·((τ−t) + (t′−τ′) + 2·offset).
    pub delta_prime: usize,
    /// Frame length M in sections.
    pub sections: usize,
}

impl DegenerationReport {
    /// Q_c = M + Δ′ − Δ.
    pub fn q_c(&self) -> i64 {
        self.sections as i64 + self.delta_prime as i64 - self.delta as i64
    }

    /// Q_c / M.
    pub fn normalized(&self) -> f64 {
        self.q_c() as f64 / self.sections as f64
    }
}

/// Zero-string length required for the probe overhead to pay off:
/// (N_s−1)(ℓ_H + 2·offset) + ℓ_H.
pub fn degeneration_criterion(n_s: usize, l_h: usize, offset: usize) -> usize {
    (n_s - 1) * (l_h + 2 * offset) + l_h
}

fn reverse_transitions(tr: &TrellisModule) -> Vec<Vec<(u32, u8)>> {
    let mut rev = vec![Vec::new(); tr.num_states];
    for s in 0..tr.num_states {
        for &(n, out) in &tr.transitions[s] {
            rev[n as usize].push((s as u32, out));
        }
    }
    rev
}

/// State 0 carries the (weakly) largest metric: ties resolve in its favor.
fn state0_best(metrics: &[f64]) -> bool {
    let m0 = metrics[0];
    m0 != f64::NEG_INFINITY && metrics[1..].iter().all(|&m| m <= m0)
}

/// Forward probe from nonzero state `x` at `start`: first depth in [t, t′]
/// at which state 0 has the largest metric.
fn forward_probe(
    tr: &TrellisModule,
    soft: &SoftFrame,
    x: usize,
    start: usize,
    zs: ZeroString,
) -> Option<usize> {
    let mut metrics = vec![f64::NEG_INFINITY; tr.num_states];
    metrics[x] = 0.0;
    let mut next = vec![0.0; tr.num_states];
    let mut bp = vec![0u32; tr.num_states];
    for k in start..zs.t_prime {
        let bm = branch_metrics(soft, k, tr.n0);
        acs_step(tr, &bm, &metrics, &mut next, &mut bp);
        std::mem::swap(&mut metrics, &mut next);
        let depth = k + 1;
        if depth >= zs.t && state0_best(&metrics) {
            return Some(depth);
        }
    }
    None
}

/// Backward mirror of `forward_probe`, from state `x` at depth `end` down.
fn backward_probe(
    tr: &TrellisModule,
    rev: &[Vec<(u32, u8)>],
    soft: &SoftFrame,
    x: usize,
    end: usize,
    zs: ZeroString,
) -> Option<usize> {
    let mut metrics = vec![f64::NEG_INFINITY; tr.num_states];
    metrics[x] = 0.0;
    let mut next = vec![0.0; tr.num_states];
    for k in (zs.t..end).rev() {
        let bm = branch_metrics(soft, k, tr.n0);
        next.fill(f64::NEG_INFINITY);
        for s in 0..tr.num_states {
            if metrics[s] == f64::NEG_INFINITY {
                continue;
            }
            for &(p, out) in &rev[s] {
                let cand = metrics[s] + bm[out as usize];
                if cand > next[p as usize] {
                    next[p as usize] = cand;
                }
            }
        }
        std::mem::swap(&mut metrics, &mut next);
        let depth = k;
        if depth <= zs.t_prime && state0_best(&metrics) {
            return Some(depth);
        }
    }
    None
}

/// SST decoding with trellis degeneration: zero-strings of length ≥ `l0` are
/// probed from depth t−offset (forward) and t′+offset (backward); where the
/// probes certify the all-zero sub-path, the trellis is pinned to state 0.
pub fn degenerate_decode(
    code: &ConvCode,
    soft: &SoftFrame,
    mode: PredecodeMode,
    l0: usize,
    offset: usize,
) -> Result<(DecodeResult, DegenerationReport)> {
    if l0 == 0 {
        return Err(DecodeError::Config("l0 must be positive".into()));
    }
    let front = sst_front_end(code, soft, mode)?;
    let tr = build_code_trellis(code)?;
    let rev = reverse_transitions(&tr);
    let t_len = soft.len();
    let n_s = tr.num_states;

    let mut report = DegenerationReport { sections: t_len, ..Default::default() };
    let mut pinned: Vec<(usize, usize)> = Vec::new();
    for zs in find_zero_strings(&front.main_hard, l0) {
        let start = zs.t.saturating_sub(offset);
        let end = (zs.t_prime + offset).min(t_len);
        // probes are clipped at the frame boundaries: a string touching the
        // frame start needs no forward probe (the decoder starts in state 0),
        // and one touching the frame end is probed backward only from the
        // state the decoder is known to terminate in
        let n_fwd = if zs.t == 0 { 0 } else { n_s - 1 };
        let n_bwd = if zs.t_prime == t_len { 1 } else { n_s - 1 };
        let tau = if zs.t == 0 {
            Some(0)
        } else {
            (1..n_s)
                .map(|x| forward_probe(&tr, &front.main_soft, x, start, zs))
                .collect::<Option<Vec<usize>>>()
                .map(|v| v.into_iter().max().unwrap())
        };
        let tau_prime = if zs.t_prime == t_len {
            backward_probe(&tr, &rev, &front.main_soft, front.final_state, end, zs)
        } else {
            (1..n_s)
                .map(|x| backward_probe(&tr, &rev, &front.main_soft, x, end, zs))
                .collect::<Option<Vec<usize>>>()
                .map(|v| v.into_iter().min().unwrap())
        };
        // probe work actually performed (failed probes scan the whole string)
        report.delta_prime += n_fwd * (tau.unwrap_or(zs.t_prime) - start)
            + n_bwd * (end - tau_prime.unwrap_or(zs.t));
        let success = matches!((tau, tau_prime), (Some(a), Some(b)) if a < b);
        if success {
            let (a, b) = (tau.unwrap(), tau_prime.unwrap());
            report.delta += b - a;
            pinned.push((a, b));
        }
        report.outcomes.push(ZeroStringOutcome { zs, tau, tau_prime, success });
    }
    pinned.sort_unstable();
    let v = run_viterbi(&tr, &front.main_soft, front.final_state, &mut NoPrune, &pinned);
    Ok((sst_recombine(code, &front, &v, soft), report))
}

/// ℓ_H for hard-decision data: the probe convergence length on an all-zero
/// hard input, doubled for the backward mirror. Determined entirely by the
/// code.
pub fn hard_decision_l_h(code: &ConvCode) -> Result<usize> {
    let tr = build_code_trellis(code)?;
    // all-zero hard input → every sample is +1
    let horizon = 64 * code.nu;
    let soft = SoftFrame { n0: code.n0, samples: vec![1.0; horizon * code.n0] };
    let zs = ZeroString { t: 0, t_prime: horizon };
    let mut worst = 0usize;
    for x in 1..tr.num_states {
        let tau = forward_probe(&tr, &soft, x, 0, zs)
            .ok_or_else(|| DecodeError::Config("probe did not converge".into()))?;
        worst = worst.max(tau);
    }
    Ok(2 * worst)
}

// ---------------------------------------------------------------------------
// Generalized Viterbi algorithm and probability-selecting-states decoding
// ---------------------------------------------------------------------------

/// GVA configuration: decoder states are the latest ν̃ inputs; each decoder
/// state keeps `budgets[ds]` encoder-state survivors after pre-selection.
#[derive(Clone, Debug)]
pub struct GvaConfig {
    pub nu_tilde: usize,
    pub budgets: Vec<usize>,
}

impl GvaConfig {
    pub fn uniform(nu_tilde: usize, budget: usize) -> GvaConfig {
        GvaConfig { nu_tilde, budgets: vec![budget; 1 << nu_tilde] }
    }

    /// The ν̃ = 5 configuration for a ν = 6 code with likelihood concentrated
    /// on the all-zero state and the single-one states: those six decoder
    /// states keep two survivors each, the rest one (38 survivors total).
    pub fn concentrated_nu6() -> GvaConfig {
        let mut cfg = GvaConfig::uniform(5, 1);
        cfg.budgets[0] = 2;
        for i in 0..5 {
            cfg.budgets[1 << i] = 2;
        }
        cfg
    }

    /// Total survivors for an encoder with 2^ν states.
    pub fn total_survivors(&self, nu: usize) -> usize {
        let group = 1usize << (nu - self.nu_tilde);
        self.budgets.iter().map(|&b| b.min(group)).sum()
    }
}

struct GvaPruner {
    nu_tilde: usize,
    budgets: Vec<usize>,
    k0: usize,
}

impl Pruner for GvaPruner {
    fn prune(&mut self, metrics: &mut [f64]) {
        let ds_count = 1usize << (self.nu_tilde * self.k0);
        let ds_mask = ds_count - 1;
        let mut groups: Vec<Vec<(f64, usize)>> = vec![Vec::new(); ds_count];
        for (s, &m) in metrics.iter().enumerate() {
            if m != f64::NEG_INFINITY {
                groups[s & ds_mask].push((m, s));
            }
        }
        for (ds, group) in groups.iter_mut().enumerate() {
            let b = self.budgets[ds];
            if group.len() <= b {
                continue;
            }
            group.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            for &(_, s) in &group[b..] {
                metrics[s] = f64::NEG_INFINITY;
            }
        }
    }
}

/// SST decoding with a GVA main decoder.
pub fn sst_gva_decode(
    code: &ConvCode,
    soft: &SoftFrame,
    mode: PredecodeMode,
    cfg: &GvaConfig,
) -> Result<DecodeResult> {
    if cfg.nu_tilde == 0 || cfg.nu_tilde > code.nu {
        return Err(DecodeError::Config("need 0 < ν̃ ≤ ν".into()));
    }
    if cfg.budgets.len() != 1 << cfg.nu_tilde || cfg.budgets.iter().any(|&b| b == 0) {
        return Err(DecodeError::Config("need a positive budget per decoder state".into()));
    }
    let front = sst_front_end(code, soft, mode)?;
    let tr = build_code_trellis(code)?;
    let mut pruner =
        GvaPruner { nu_tilde: cfg.nu_tilde, budgets: cfg.budgets.clone(), k0: code.k0 };
    let v = run_viterbi(&tr, &front.main_soft, front.final_state, &mut pruner, &[]);
    Ok(sst_recombine(code, &front, &v, soft))
}

struct PssPruner {
    keep: Vec<bool>,
}

impl Pruner for PssPruner {
    fn prune(&mut self, metrics: &mut [f64]) {
        for (s, &k) in self.keep.iter().enumerate() {
            if !k {
                metrics[s] = f64::NEG_INFINITY;
            }
        }
    }
}

/// SST decoding with a PSS main decoder: only the states in `keep` (which
/// must include the all-zero state) take part in the add-compare-select.
pub fn sst_pss_decode(
    code: &ConvCode,
    soft: &SoftFrame,
    mode: PredecodeMode,
    keep: &[bool],
) -> Result<DecodeResult> {
    let tr = build_code_trellis(code)?;
    if keep.len() != tr.num_states || !keep[0] {
        return Err(DecodeError::Config(
            "keep set must cover all states and include the all-zero state".into(),
        ));
    }
    let front = sst_front_end(code, soft, mode)?;
    let mut pruner = PssPruner { keep: keep.to_vec() };
    let v = run_viterbi(&tr, &front.main_soft, front.final_state, &mut pruner, &[]);
    Ok(sst_recombine(code, &front, &v, soft))
}
