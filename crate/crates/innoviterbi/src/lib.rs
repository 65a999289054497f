//! Innovations-approach workbench for Viterbi decoding of convolutional
//! codes: GF(2) polynomial algebra, code construction, AWGN channel models,
//! scarce-state-transition (SST) decoders, degenerate/reduced-complexity
//! variants, and the analytical machinery behind them.

pub mod analysis;
pub mod block;
pub mod channel;
pub mod cli;
pub mod conv;
pub mod decoders;
pub mod gf2poly;

pub use cli::run;
