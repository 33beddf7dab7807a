//! Variable-length physical-layer header codes for noncoherent channels.
//!
//! * [`code`]: noncoherent distance, the union bound and greedy generator
//!   matrix design.
//! * [`codebook`]: the ModCod table and the variable-length codebook.
//! * [`modem`]: π/2-BPSK mapping and the unknown phase/amplitude AWGN channel.
//! * [`decoders`]: joint length, codeword and amplitude decoders.
//! * [`harness`]: seeded Monte Carlo CER estimation, sweeps and gap search.
//! * [`format`]: file formats for codebooks, matrices and ModCod tables.

pub mod bits;
pub mod code;
pub mod codebook;
pub mod decoders;
pub mod error;
pub mod format;
pub mod harness;
pub mod modem;

pub use bits::Bits;
pub use code::{
    cer_bound, code_min_distance, design_code, encode, grow_code, hamming_distance, noncoherent_distance,
    required_dmin, CodeDesignSpec, DistanceMode, GeneratorMatrix,
};
pub use codebook::{
    build_codebook, build_fixed_codebook, default_codebooks, design_variable_length, ModCodEntry, ModCodTable,
    PlhCodebook,
};
pub use decoders::{
    decode_simple, decode_standard, decode_strategy1, decode_strategy2, estimate_noise_var, DecodeResult,
    DecoderConfig, DecoderKind, NoiseVarSource, SimpleMode,
};
pub use error::{Error, Result};
pub use harness::{complexity_report, run_cer, CerEstimate, GapResult, Simulator};
pub use modem::{pi2bpsk_map, transmit, AmplitudeModel, ChannelParams};
