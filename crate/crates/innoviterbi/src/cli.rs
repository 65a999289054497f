//! Command-line front end: paper-table reproduction, simulation sweeps,
//! per-frame decode traces, block-code decoding, and analysis reports.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::analysis::{self, tables};
use crate::block::BlockCode;
use crate::channel::{frame_rng, transmit, ChannelConfig, Quantizer8, SoftFrame};
use crate::conv::{encode, predecode_general, predecode_qli, syndrome, ConvCode, HardFrame,
    PredecodeMode};
use crate::decoders::{degenerate_decode, find_zero_strings, sst_decode, sst_front_end,
    sst_gva_decode, sst_pss_decode, viterbi_decode, DecodeResult, GvaConfig};

/// Exit codes: 0 success, 2 configuration error, 3 numeric guard tripped.
#[derive(Debug)]
enum CliError {
    Config(String),
    Numeric(String),
}

type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric guard: {m}"),
        }
    }
}

macro_rules! config_error_from {
    ($t:ty) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Config(e.to_string())
            }
        }
    };
}

config_error_from!(crate::conv::CodeError);
config_error_from!(crate::decoders::DecodeError);
config_error_from!(crate::block::BlockError);

#[derive(Parser, Debug)]
#[command(name = "innoviterbi", version, about = "SST Viterbi decoding workbench")]
struct Cli {
    /// JSON config file supplying defaults for the experiment options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce one of the paper's Tables I-IX (1-9).
    Table(TableArgs),
    /// BER/metric/complexity sweep over Eb/N0 points.
    Simulate(ExperimentArgs),
    /// Decode frames, emitting a per-frame JSON trace plus an aggregate CSV.
    Decode(ExperimentArgs),
    /// Two-stage ML decoding of a linear block code.
    BlockDecode(BlockArgs),
    /// Closed-form analysis report (estimator error rates, entropies, bounds).
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Table number, 1-9.
    #[arg(long)]
    table: u32,
    /// Sections per simulated frame for Tables VII-IX.
    #[arg(long, default_value_t = 100_000)]
    m: usize,
    /// Master seed for Tables VII-IX.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Viterbi,
    SstGeneral,
    SstQli,
    Degenerate,
    Gva,
    Pss,
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// Code id (C1, C2, C3).
    #[arg(long)]
    code: Option<String>,
    /// Decoder mode.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Eb/N0 points in dB (comma-separated).
    #[arg(long, value_delimiter = ',')]
    ebn0_db: Vec<f64>,
    /// Number of frames per Eb/N0 point.
    #[arg(long)]
    frames: Option<u64>,
    /// Master seed (explicit; there is no wall-clock default).
    #[arg(long)]
    seed: Option<u64>,
    /// Information blocks per frame.
    #[arg(long)]
    info_len: Option<usize>,
    /// Zero-string length threshold for degeneration.
    #[arg(long)]
    l0: Option<usize>,
    /// Probe start offset for degeneration.
    #[arg(long)]
    offset: Option<usize>,
    /// 8-level receiver quantization, e.g. --quantize 8:0.5.
    #[arg(long)]
    quantize: Option<String>,
    /// GVA algorithm constraint length.
    #[arg(long)]
    nu_tilde: Option<usize>,
    /// GVA survivors per decoder state.
    #[arg(long)]
    budget: Option<usize>,
    /// PSS kept states (comma-separated indices; must include 0).
    #[arg(long, value_delimiter = ',')]
    keep: Vec<usize>,
}

/// Config-file counterpart of `ExperimentArgs`; flags override file values.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    code: Option<String>,
    mode: Option<Mode>,
    ebn0_db: Option<Vec<f64>>,
    frames: Option<u64>,
    seed: Option<u64>,
    info_len: Option<usize>,
    l0: Option<usize>,
    offset: Option<usize>,
    quantize: Option<String>,
    nu_tilde: Option<usize>,
    budget: Option<usize>,
    keep: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct BlockArgs {
    /// Block code id (hamming74, hamming84) or a JSON file of generator rows.
    #[arg(long)]
    code: Option<String>,
    /// Generator matrix file: {"n": 7, "k": 4, "rows": [[1,0,...], ...]}.
    #[arg(long)]
    code_file: Option<PathBuf>,
    /// Eb/N0 points in dB (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "3")]
    ebn0_db: Vec<f64>,
    /// Number of frames per Eb/N0 point.
    #[arg(long)]
    frames: u64,
    /// Master seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Code id (C1, C2, C3).
    #[arg(long)]
    code: String,
    /// Eb/N0 points in dB (defaults to the paper's 0-10 dB grid).
    #[arg(long, value_delimiter = ',')]
    ebn0_db: Vec<f64>,
}

/// Merged experiment parameters after applying config-file defaults.
#[derive(Debug)]
struct Experiment {
    code: ConvCode,
    mode: Mode,
    ebn0_db: Vec<f64>,
    frames: u64,
    seed: u64,
    info_len: usize,
    l0: usize,
    offset: usize,
    quantizer: Option<Quantizer8>,
    nu_tilde: Option<usize>,
    budget: usize,
    keep: Vec<usize>,
}

fn parse_quantize(spec: &str) -> Result<Quantizer8> {
    let err = || CliError::Config(format!("bad quantizer spec {spec:?}; expected 8:<delta>"));
    let (levels, delta) = spec.split_once(':').ok_or_else(err)?;
    if levels != "8" {
        return Err(err());
    }
    let delta: f64 = delta.parse().map_err(|_| err())?;
    if !(delta > 0.0) {
        return Err(err());
    }
    Ok(Quantizer8::new(delta))
}

impl Experiment {
    fn merge(args: ExperimentArgs, file: FileConfig) -> Result<Experiment> {
        let need = |field: &str| CliError::Config(format!("missing required option --{field}"));
        let code_id = args.code.or(file.code).ok_or_else(|| need("code"))?;
        let code = ConvCode::registry(&code_id)?;
        let mode = args.mode.or(file.mode).ok_or_else(|| need("mode"))?;
        let ebn0_db = if args.ebn0_db.is_empty() {
            file.ebn0_db.unwrap_or_default()
        } else {
            args.ebn0_db
        };
        if ebn0_db.is_empty() {
            return Err(need("ebn0-db"));
        }
        let quantizer = match args.quantize.or(file.quantize) {
            Some(spec) => Some(parse_quantize(&spec)?),
            None => None,
        };
        Ok(Experiment {
            code,
            mode,
            ebn0_db,
            frames: args.frames.or(file.frames).ok_or_else(|| need("frames"))?,
            seed: args.seed.or(file.seed).ok_or_else(|| need("seed"))?,
            info_len: args.info_len.or(file.info_len).unwrap_or(100),
            l0: args.l0.or(file.l0).unwrap_or(20),
            offset: args.offset.or(file.offset).unwrap_or(1),
            quantizer,
            nu_tilde: args.nu_tilde.or(file.nu_tilde),
            budget: args.budget.or(file.budget).unwrap_or(1),
            keep: if args.keep.is_empty() { file.keep.unwrap_or_default() } else { args.keep },
        })
    }

    /// Pre-decoder mode used by SST-based decoders: QLI when available.
    fn predecode_mode(&self) -> PredecodeMode {
        match self.mode {
            Mode::SstGeneral => PredecodeMode::General,
            Mode::SstQli => PredecodeMode::Qli,
            _ if self.code.qli_l.is_some() => PredecodeMode::Qli,
            _ => PredecodeMode::General,
        }
    }
}

fn read_file_config(path: Option<&PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Honor INNOVITERBI_THREADS; rayon's default otherwise. Results do not
/// depend on the thread count (per-frame RNG streams, ordered reduction).
fn init_thread_pool() {
    if let Ok(n) = std::env::var("INNOVITERBI_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let file_cfg = read_file_config(cli.config.as_ref())?;
    let doc = match cli.cmd {
        Command::Table(args) => render_table(&args, cli.json)?,
        Command::Simulate(args) => {
            let exp = Experiment::merge(args, file_cfg)?;
            render_simulate(&exp, cli.json)?
        }
        Command::Decode(args) => {
            let exp = Experiment::merge(args, file_cfg)?;
            let (trace, aggregate) = render_decode(&exp, cli.json)?;
            print!("{trace}");
            aggregate
        }
        Command::BlockDecode(args) => render_block_decode(&args, cli.json)?,
        Command::Analyze(args) => render_analyze(&args, cli.json)?,
    };
    match cli.output {
        Some(path) => fs::write(&path, doc)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

/// A tabular report: header names plus rows of already-formatted cells.
struct Report {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn new(header: &[&str]) -> Report {
        Report { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, cell)| {
                        let v = cell
                            .parse::<f64>()
                            .map(|x| json!(x))
                            .unwrap_or_else(|_| json!(cell));
                        (h.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }

    fn render(&self, as_json: bool) -> String {
        if as_json {
            self.to_json()
        } else {
            self.to_csv()
        }
    }
}

fn fmt_f(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

/// Table I's worked example: the fixed error pattern injected noiselessly.
const TABLE1_ERROR: [u8; 8] = [0b00, 0b01, 0b00, 0b10, 0b00, 0b01, 0b00, 0b00];
const TABLE1_INFO: [u8; 8] = [1, 0, 0, 1, 0, 1, 0, 0];

fn render_table(args: &TableArgs, as_json: bool) -> Result<String> {
    let c1 = ConvCode::registry("C1")?;
    let report = match args.table {
        1 => table1_report(&c1)?,
        2 => closed_form_report(tables::alpha_table(&c1), &["alpha1", "alpha2"]),
        3 => closed_form_report(tables::beta_table(&c1)?, &["beta1", "beta2"]),
        4 => distribution_report(tables::code_state_table(&c1, PredecodeMode::General)?),
        5 => distribution_report(tables::code_state_table(&c1, PredecodeMode::Qli)?),
        6 => distribution_report(tables::error_state_table(&c1)?),
        7 => zero_string_report(&c1, args, ZeroStringStat::Count)?,
        8 => zero_string_report(&c1, args, ZeroStringStat::MeanLength)?,
        9 => complexity_report(&c1, args)?,
        n => return Err(CliError::Config(format!("unknown table id {n}; expected 1-9"))),
    };
    Ok(report.render(as_json))
}

fn table1_report(c1: &ConvCode) -> Result<Report> {
    let y = encode(c1, &TABLE1_INFO, false);
    let e = HardFrame::new(2, TABLE1_ERROR.to_vec());
    let z = y.xor(&e);
    let zeta = syndrome(c1, &z)?;
    let smoothed = predecode_qli(c1, &z)?;
    let filtered = predecode_general(c1, &z)?;

    let mut report =
        Report::new(&["k", "i_k", "y_k", "e_k", "z_k", "zeta_k", "i_hat_k-1|k", "i_hat_k-1|k-1"]);
    let pair = |b: u8| format!("{}{}", b & 1, (b >> 1) & 1);
    for k in 0..8 {
        report.push(vec![
            (k + 1).to_string(),
            TABLE1_INFO[k].to_string(),
            pair(y.blocks[k]),
            pair(e.blocks[k]),
            pair(z.blocks[k]),
            zeta[k].to_string(),
            smoothed[k].to_string(),
            // î(k−1|k−1) at row k is the previous section's filtered output
            if k == 0 { "0".into() } else { filtered[k - 1].to_string() },
        ]);
    }
    Ok(report)
}

fn channel_columns(row: &tables::TableRow) -> Vec<String> {
    vec![fmt_f(row.ebn0_db, 0), fmt_f(row.c, 3), row.eps.to_string()]
}

/// Tables II/III layout: probabilities, entropy gaps, and the gap sum.
fn closed_form_report(rows: Vec<tables::TableRow>, names: &[&str]) -> Report {
    let mut header = vec!["Eb/N0 (dB)", "c", "epsilon"];
    header.extend_from_slice(names);
    let gap_names: Vec<String> = names.iter().map(|n| format!("gap_{n}")).collect();
    header.extend(gap_names.iter().map(|s| s.as_str()));
    header.push("gap_sum");
    let mut report = Report::new(&header);
    for row in rows {
        let mut cells = channel_columns(&row);
        cells.extend(row.cols.iter().map(|&x| fmt_f(x, 4)));
        report.push(cells);
    }
    report
}

/// Tables IV-VI layout: the four state probabilities and the entropy.
fn distribution_report(rows: Vec<tables::TableRow>) -> Report {
    let mut report =
        Report::new(&["Eb/N0 (dB)", "c", "epsilon", "P00", "P01", "P10", "P11", "H"]);
    for row in rows {
        let mut cells = channel_columns(&row);
        let (probs, h) = row.cols.split_at(4);
        cells.extend(probs.iter().map(|p| p.to_string()));
        cells.push(fmt_f(h[0], 4));
        report.push(cells);
    }
    report
}

const DEGENERATION_EBN0_DB: [f64; 7] = [4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

/// One long simulated frame per SNR point, shared by Tables VII-IX.
fn long_main_input(c1: &ConvCode, args: &TableArgs, snr_index: usize) -> Result<SoftFrame> {
    use rand::Rng;
    let db = DEGENERATION_EBN0_DB[snr_index];
    let cfg = ChannelConfig::new(db, 0.5);
    let mut rng = frame_rng(args.seed, snr_index as u64);
    let info: Vec<u8> = (0..args.m).map(|_| rng.gen_range(0..2u8)).collect();
    let y = encode(c1, &info, true);
    Ok(transmit(&cfg, &y, &mut rng))
}

enum ZeroStringStat {
    Count,
    MeanLength,
}

const TABLE78_L0: [usize; 5] = [10, 15, 20, 25, 30];

fn zero_string_report(c1: &ConvCode, args: &TableArgs, stat: ZeroStringStat) -> Result<Report> {
    let mut report = Report::new(&[
        "Eb/N0 (dB)",
        "l0=10",
        "l0=15",
        "l0=20",
        "l0=25",
        "l0=30",
    ]);
    let rows: Vec<Result<Vec<String>>> = DEGENERATION_EBN0_DB
        .par_iter()
        .enumerate()
        .map(|(i, &db)| {
            let soft = long_main_input(c1, args, i)?;
            let front = sst_front_end(c1, &soft, PredecodeMode::Qli)?;
            let mut cells = vec![fmt_f(db, 0)];
            for l0 in TABLE78_L0 {
                let strings = find_zero_strings(&front.main_hard, l0);
                cells.push(match stat {
                    ZeroStringStat::Count => strings.len().to_string(),
                    ZeroStringStat::MeanLength => {
                        let total: usize = strings.iter().map(|z| z.len()).sum();
                        fmt_f(total as f64 / strings.len().max(1) as f64, 1)
                    }
                });
            }
            Ok(cells)
        })
        .collect();
    for row in rows {
        report.push(row?);
    }
    Ok(report)
}

const TABLE9_L0: [usize; 3] = [20, 25, 30];

fn complexity_report(c1: &ConvCode, args: &TableArgs) -> Result<Report> {
    let mut report = Report::new(&["Eb/N0 (dB)", "l0=20", "l0=25", "l0=30"]);
    let rows: Vec<Result<Vec<String>>> = DEGENERATION_EBN0_DB
        .par_iter()
        .enumerate()
        .map(|(i, &db)| {
            let soft = long_main_input(c1, args, i)?;
            let mut cells = vec![fmt_f(db, 0)];
            for l0 in TABLE9_L0 {
                let (_, rep) = degenerate_decode(c1, &soft, PredecodeMode::Qli, l0, 1)?;
                cells.push(fmt_f(rep.normalized(), 2));
            }
            Ok(cells)
        })
        .collect();
    for row in rows {
        report.push(row?);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// simulate / decode
// ---------------------------------------------------------------------------

/// Per-frame outcome used for aggregation.
struct FrameOutcome {
    bit_errors: u64,
    metric: f64,
    /// Trellis sections processed (Q_c for degenerate decoding, M otherwise).
    complexity: f64,
    sections: usize,
}

fn decode_one_frame(exp: &Experiment, snr_index: usize, frame: u64) -> Result<FrameOutcome> {
    use rand::Rng;
    let code = &exp.code;
    let cfg = ChannelConfig::new(exp.ebn0_db[snr_index], 0.5);
    let stream = (snr_index as u64) * exp.frames + frame;
    let mut rng = frame_rng(exp.seed, stream);
    let info: Vec<u8> = (0..exp.info_len).map(|_| rng.gen_range(0..2u8)).collect();
    let y = encode(code, &info, true);
    let mut soft = transmit(&cfg, &y, &mut rng);
    if let Some(q) = &exp.quantizer {
        soft = q.apply(&soft);
    }
    let sections = soft.len();

    let mut complexity = sections as f64;
    let result: DecodeResult = match exp.mode {
        Mode::Viterbi => viterbi_decode(code, &soft)?,
        Mode::SstGeneral | Mode::SstQli => sst_decode(code, &soft, exp.predecode_mode())?,
        Mode::Degenerate => {
            let (res, rep) =
                degenerate_decode(code, &soft, exp.predecode_mode(), exp.l0, exp.offset)?;
            complexity = rep.q_c() as f64;
            res
        }
        Mode::Gva => {
            let nu_tilde = exp
                .nu_tilde
                .ok_or_else(|| CliError::Config("GVA mode requires --nu-tilde".into()))?;
            let cfg = GvaConfig::uniform(nu_tilde, exp.budget);
            sst_gva_decode(code, &soft, exp.predecode_mode(), &cfg)?
        }
        Mode::Pss => {
            let n_states = 1usize << (code.k0 * code.nu);
            let mut keep = vec![false; n_states];
            for &s in &exp.keep {
                if s >= n_states {
                    return Err(CliError::Config(format!("kept state {s} out of range")));
                }
                keep[s] = true;
            }
            sst_pss_decode(code, &soft, exp.predecode_mode(), &keep)?
        }
    };
    if !result.metric.is_finite() {
        return Err(CliError::Numeric(format!(
            "non-finite path metric at {} dB, frame {frame}",
            exp.ebn0_db[snr_index]
        )));
    }
    let bit_errors =
        info.iter().zip(&result.info).filter(|(a, b)| a != b).count() as u64;
    Ok(FrameOutcome { bit_errors, metric: result.metric, complexity, sections })
}

/// One aggregated Eb/N0 row. Frames are decoded in parallel but collected in
/// frame order, so the sums (and the emitted bytes) are seed-deterministic.
struct SnrAggregate {
    ebn0_db: f64,
    frames: u64,
    info_bits: u64,
    bit_errors: u64,
    metric_sum: f64,
    complexity_sum: f64,
    sections_sum: u64,
}

impl SnrAggregate {
    fn ber(&self) -> f64 {
        if self.info_bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.info_bits as f64
        }
    }

    /// Half-width of the 95% normal-approximation interval on the BER.
    fn ci95(&self) -> f64 {
        if self.info_bits == 0 {
            return 0.0;
        }
        let p = self.ber();
        1.96 * (p * (1.0 - p) / self.info_bits as f64).sqrt()
    }

    fn row(&self) -> Vec<String> {
        let mean = |sum: f64| if self.frames == 0 { 0.0 } else { sum / self.frames as f64 };
        vec![
            self.ebn0_db.to_string(),
            self.frames.to_string(),
            self.info_bits.to_string(),
            self.bit_errors.to_string(),
            format!("{:e}", self.ber()),
            format!("{:e}", self.ci95()),
            fmt_f(mean(self.metric_sum), 4),
            fmt_f(
                if self.sections_sum == 0 {
                    0.0
                } else {
                    self.complexity_sum / self.sections_sum as f64
                },
                4,
            ),
        ]
    }
}

const AGGREGATE_HEADER: [&str; 8] =
    ["Eb/N0 (dB)", "frames", "info_bits", "bit_errors", "ber", "ci95", "mean_metric", "qc_over_m"];

fn run_sweep(exp: &Experiment) -> Result<Vec<(SnrAggregate, Vec<FrameOutcome>)>> {
    exp.ebn0_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let outcomes: Vec<Result<FrameOutcome>> =
                (0..exp.frames).into_par_iter().map(|f| decode_one_frame(exp, i, f)).collect();
            let outcomes: Vec<FrameOutcome> =
                outcomes.into_iter().collect::<Result<Vec<_>>>()?;
            let mut agg = SnrAggregate {
                ebn0_db: db,
                frames: exp.frames,
                info_bits: exp.frames * exp.info_len as u64,
                bit_errors: 0,
                metric_sum: 0.0,
                complexity_sum: 0.0,
                sections_sum: 0,
            };
            for o in &outcomes {
                agg.bit_errors += o.bit_errors;
                agg.metric_sum += o.metric;
                agg.complexity_sum += o.complexity;
                agg.sections_sum += o.sections as u64;
            }
            Ok((agg, outcomes))
        })
        .collect()
}

fn render_simulate(exp: &Experiment, as_json: bool) -> Result<String> {
    let mut report = Report::new(&AGGREGATE_HEADER);
    for (agg, _) in run_sweep(exp)? {
        report.push(agg.row());
    }
    Ok(report.render(as_json))
}

fn render_decode(exp: &Experiment, as_json: bool) -> Result<(String, String)> {
    let mut trace = String::new();
    let mut report = Report::new(&AGGREGATE_HEADER);
    for (agg, outcomes) in run_sweep(exp)? {
        for (f, o) in outcomes.iter().enumerate() {
            let line = json!({
                "ebn0_db": agg.ebn0_db,
                "frame": f,
                "metric": o.metric,
                "bit_errors": o.bit_errors,
                "info_bits": exp.info_len,
                "q_c": o.complexity,
            });
            writeln!(trace, "{line}").expect("string write");
        }
        report.push(agg.row());
    }
    Ok((trace, report.render(as_json)))
}

// ---------------------------------------------------------------------------
// block-decode
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct BlockCodeFile {
    n: usize,
    k: usize,
    rows: Vec<Vec<u8>>,
}

fn load_block_code(args: &BlockArgs) -> Result<BlockCode> {
    match (&args.code, &args.code_file) {
        (Some(id), None) => Ok(BlockCode::registry(id)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let file: BlockCodeFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let rows: Vec<u64> = file
                .rows
                .iter()
                .map(|bits| {
                    bits.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | ((b as u64 & 1) << j))
                })
                .collect();
            if rows.len() != file.k {
                return Err(CliError::Config("generator row count != k".into()));
            }
            Ok(BlockCode::new(file.n, file.k, rows)?)
        }
        _ => Err(CliError::Config("give exactly one of --code or --code-file".into())),
    }
}

fn render_block_decode(args: &BlockArgs, as_json: bool) -> Result<String> {
    use rand::Rng;
    let code = load_block_code(args)?;
    let rate = code.k as f64 / code.n as f64;
    let mut report = Report::new(&[
        "Eb/N0 (dB)",
        "frames",
        "info_bits",
        "bit_errors",
        "ber",
        "ml_agreement",
    ]);
    for (i, &db) in args.ebn0_db.iter().enumerate() {
        let cfg = ChannelConfig::new(db, rate);
        let outcomes: Vec<Result<(u64, bool)>> = (0..args.frames)
            .into_par_iter()
            .map(|f| {
                let stream = (i as u64) * args.frames + f;
                let mut rng = frame_rng(args.seed, stream);
                let u: u64 = rng.gen_range(0..(1u64 << code.k));
                let y = code.encode(u);
                let bits: Vec<u8> = (0..code.n).map(|j| ((y >> j) & 1) as u8).collect();
                let frame = HardFrame::new(1, bits);
                let soft = transmit(&cfg, &frame, &mut rng);
                let (u_hat, _) = code.two_stage_decode(&soft.samples)?;
                let (u_ml, _) = code.ml_decode(&soft.samples)?;
                Ok(((u_hat ^ u).count_ones() as u64, u_hat == u_ml))
            })
            .collect();
        let mut bit_errors = 0u64;
        let mut agree = 0u64;
        for o in outcomes {
            let (e, a) = o?;
            bit_errors += e;
            agree += a as u64;
        }
        let info_bits = args.frames * code.k as u64;
        report.push(vec![
            db.to_string(),
            args.frames.to_string(),
            info_bits.to_string(),
            bit_errors.to_string(),
            format!("{:e}", if info_bits == 0 { 0.0 } else { bit_errors as f64 / info_bits as f64 }),
            fmt_f(if args.frames == 0 { 1.0 } else { agree as f64 / args.frames as f64 }, 4),
        ]);
    }
    Ok(report.render(as_json))
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn render_analyze(args: &AnalyzeArgs, as_json: bool) -> Result<String> {
    let code = ConvCode::registry(&args.code)?;
    let grid: Vec<f64> = if args.ebn0_db.is_empty() {
        tables::EBN0_GRID_DB.to_vec()
    } else {
        args.ebn0_db.clone()
    };
    let qli = code.qli_l.is_some();
    let nu2 = code.nu == 2 && code.k0 == 1;

    let mut header = vec![
        "Eb/N0 (dB)".to_string(),
        "c".into(),
        "epsilon".into(),
        "alpha1".into(),
        "alpha2".into(),
        "gap_alpha1".into(),
        "gap_alpha2".into(),
        "p_f".into(),
        "h_lower".into(),
        "h_upper".into(),
    ];
    if qli {
        header.extend(["beta1", "beta2", "gap_beta1", "gap_beta2", "p_s"].map(String::from));
    }
    if nu2 {
        header.extend(["H_general", "H_error"].map(String::from));
        if qli {
            header.push("H_qli".into());
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut report = Report::new(&header_refs);

    for &db in &grid {
        let cfg = ChannelConfig::new(db, 0.5);
        let c = cfg.amplitude();
        let eps = cfg.epsilon();
        let alpha = analysis::alpha_params(&code, eps);
        let (h_lo, h_hi) = analysis::capacity_entropy_bounds(c);
        let mut cells = vec![
            db.to_string(),
            fmt_f(c, 6),
            format!("{eps:e}"),
            fmt_f(alpha[0], 6),
            fmt_f(alpha[1], 6),
            fmt_f(analysis::entropy_gap(c, alpha[0]), 6),
            fmt_f(analysis::entropy_gap(c, alpha[1]), 6),
            fmt_f(analysis::filtered_error_probability(&code, eps), 6),
            fmt_f(h_lo, 6),
            fmt_f(h_hi, 6),
        ];
        if qli {
            let beta = analysis::beta_params(&code, eps)?;
            cells.push(fmt_f(beta[0], 6));
            cells.push(fmt_f(beta[1], 6));
            cells.push(fmt_f(analysis::entropy_gap(c, beta[0]), 6));
            cells.push(fmt_f(analysis::entropy_gap(c, beta[1]), 6));
            cells.push(fmt_f(analysis::smoothed_error_probability(&code, eps)?, 6));
        }
        if nu2 {
            let h = |exprs: &[analysis::ErrorSupportExpr]| {
                fmt_f(analysis::entropy_bits(&analysis::state_distribution(exprs, eps)), 6)
            };
            cells.push(h(&analysis::code_state_exprs(&code, PredecodeMode::General)?));
            cells.push(h(&analysis::error_state_exprs(&code)?));
            if qli {
                cells.push(h(&analysis::code_state_exprs(&code, PredecodeMode::Qli)?));
            }
        }
        report.push(cells);
    }
    Ok(report.render(as_json))
}
