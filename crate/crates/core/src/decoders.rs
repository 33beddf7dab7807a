//! Header decoders for unknown length, phase and amplitude.
//!
//! Every rule scores each codebook entry from its correlation with the
//! received samples `Σ_{k<L} r_k c_k*` and picks the highest score; ties go to
//! the smaller ModCod id.
//!
//! * standard: `|corr|` over `L_max`, fixed-length codebook only.
//! * simple: `|corr|` over each codeword's own length, no normalization (or,
//!   in zero-padded mode, over `L_max` against the codeword padded with zero
//!   bits, so the data tail leaks into the score).
//! * strategy 1: `|corr|² / L^α`.
//! * strategy 2: `|corr| + (β/σ²) Σ_{k≥L} |r_k|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::codebook::PlhCodebook;
use crate::error::{Error, Result};
use crate::modem::pi2_rotation;

/// Lower bound on any noise variance estimate.
pub const NOISE_VAR_FLOOR: f64 = 1e-12;
/// Shortest observation accepted by the moment estimator.
pub const MIN_ESTIMATOR_LEN: usize = 16;
/// Default estimation window, in samples.
pub const DEFAULT_ESTIMATOR_WINDOW: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub modcod_id: u32,
    pub length_hat: usize,
    pub codeword_hat: Bits,
    pub amplitude_hat: f64,
    pub metric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpleMode {
    #[default]
    OwnLength,
    ZeroPadded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DecoderKind {
    Standard,
    Simple { mode: SimpleMode },
    Strategy1 { alpha: f64 },
    Strategy2 { beta: f64 },
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Standard => "standard",
            DecoderKind::Simple { .. } => "simple",
            DecoderKind::Strategy1 { .. } => "strategy1",
            DecoderKind::Strategy2 { .. } => "strategy2",
        }
    }

    /// `(name, value)` of the tunable parameter, if any.
    pub fn param(&self) -> Option<(&'static str, f64)> {
        match *self {
            DecoderKind::Strategy1 { alpha } => Some(("alpha", alpha)),
            DecoderKind::Strategy2 { beta } => Some(("beta", beta)),
            _ => None,
        }
    }

    /// Same decoder family with its tunable parameter replaced.
    pub fn with_param(&self, value: f64) -> DecoderKind {
        match self {
            DecoderKind::Strategy1 { .. } => DecoderKind::Strategy1 { alpha: value },
            DecoderKind::Strategy2 { .. } => DecoderKind::Strategy2 { beta: value },
            other => *other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum NoiseVarSource {
    #[default]
    Known,
    /// Moment estimate over `window` samples: the frame itself plus, when the
    /// window is longer than a frame, the preceding samples of the same link.
    Estimated { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub noise_var_source: NoiseVarSource,
}

impl DecoderConfig {
    pub fn new(kind: DecoderKind) -> Self {
        DecoderConfig {
            kind,
            noise_var_source: NoiseVarSource::Known,
        }
    }

    pub fn estimated(kind: DecoderKind, window: usize) -> Self {
        DecoderConfig {
            kind,
            noise_var_source: NoiseVarSource::Estimated { window },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DecoderKind::Strategy1 { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")))
            }
            DecoderKind::Strategy2 { beta } if !(beta >= 0.0 && beta.is_finite()) => {
                return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")))
            }
            _ => {}
        }
        if let NoiseVarSource::Estimated { window } = self.noise_var_source {
            if window < MIN_ESTIMATOR_LEN {
                return Err(Error::InvalidParameter(format!(
                    "estimation window {window} < {MIN_ESTIMATOR_LEN}"
                )));
            }
        }
        Ok(())
    }

    /// Decodes `r`; `noise_var` is only read by strategy 2.
    pub fn decode(&self, r: &[Complex64], codebook: &PlhCodebook, noise_var: f64) -> Result<DecodeResult> {
        PreparedDecoder::new(codebook, self.kind)?.decode(r, noise_var)
    }
}

/// `Σ_{k<upto} r_k · conj(c_k)`.
pub fn correlate(r: &[Complex64], c: &[Complex64], upto: usize) -> Result<Complex64> {
    if upto > r.len() || upto > c.len() {
        return Err(Error::LengthMismatch {
            left: upto,
            right: r.len().min(c.len()),
        });
    }
    Ok(correlate_unchecked(r, c, upto))
}

#[inline]
fn correlate_unchecked(r: &[Complex64], c: &[Complex64], upto: usize) -> Complex64 {
    r[..upto]
        .iter()
        .zip(&c[..upto])
        .fold(Complex64::new(0.0, 0.0), |acc, (r, c)| acc + r * c.conj())
}

/// Winner of one decoding pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    /// Index into the codebook entries.
    pub index: usize,
    pub metric: f64,
    pub amplitude_hat: f64,
}

/// A decoder bound to one codebook, with per-entry constants precomputed.
#[derive(Debug, Clone)]
pub struct PreparedDecoder<'a> {
    codebook: &'a PlhCodebook,
    kind: DecoderKind,
    // strategy 1: L^α per entry
    norms: Vec<f64>,
}

impl<'a> PreparedDecoder<'a> {
    pub fn new(codebook: &'a PlhCodebook, kind: DecoderKind) -> Result<Self> {
        if codebook.n() == 0 {
            return Err(Error::EmptyCodebook);
        }
        let mut norms = Vec::new();
        match kind {
            DecoderKind::Standard if !codebook.is_fixed_length() => {
                return Err(Error::InvalidParameter(
                    "standard decoder needs a fixed-length codebook".into(),
                ))
            }
            DecoderKind::Strategy1 { alpha } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
                }
                norms = codebook
                    .entries()
                    .iter()
                    .map(|e| (e.len() as f64).powf(alpha))
                    .collect();
            }
            DecoderKind::Strategy2 { beta } if !(beta >= 0.0 && beta.is_finite()) => {
                return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")))
            }
            _ => {}
        }
        Ok(PreparedDecoder { codebook, kind, norms })
    }

    pub fn codebook(&self) -> &'a PlhCodebook {
        self.codebook
    }

    /// Picks the best entry for `r`. `noise_var` is only read by strategy 2.
    pub fn decide(&self, r: &[Complex64], noise_var: f64) -> Result<Decision> {
        let cb = self.codebook;
        if r.len() != cb.l_max() {
            return Err(Error::LengthMismatch {
                left: r.len(),
                right: cb.l_max(),
            });
        }
        let entries = cb.entries();
        let l_max = cb.l_max() as f64;
        match self.kind {
            DecoderKind::Standard
            | DecoderKind::Simple {
                mode: SimpleMode::OwnLength,
            } => {
                let (i, m, c) = argmax(r, cb, |_, c| c);
                Ok(Decision {
                    index: i,
                    metric: m,
                    amplitude_hat: c / entries[i].len() as f64,
                })
            }
            DecoderKind::Simple {
                mode: SimpleMode::ZeroPadded,
            } => {
                // Σ_{k≥L} r_k conj(p_k), p the image of all-zero bits
                let pad_tail = suffix_sums(r.iter().enumerate().map(|(k, x)| x * pi2_rotation(k).conj()));
                let mut best = (0usize, f64::NEG_INFINITY);
                for (i, e) in entries.iter().enumerate() {
                    let m = (correlate_unchecked(r, &e.symbols, e.len()) + pad_tail[e.len()]).norm();
                    if m > best.1 {
                        best = (i, m);
                    }
                }
                Ok(Decision {
                    index: best.0,
                    metric: best.1,
                    amplitude_hat: best.1 / l_max,
                })
            }
            DecoderKind::Strategy1 { .. } => {
                let (i, m, c) = argmax(r, cb, |i, c| c * c / self.norms[i]);
                Ok(Decision {
                    index: i,
                    metric: m,
                    amplitude_hat: c / entries[i].len() as f64,
                })
            }
            DecoderKind::Strategy2 { beta } => {
                if !(noise_var > 0.0 && noise_var.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "noise variance must be > 0, got {noise_var}"
                    )));
                }
                let tail = suffix_sums(r.iter().map(|x| x.norm_sqr()));
                let weight = beta / noise_var;
                let (i, m, corr_abs) = argmax(r, cb, |i, c| c + weight * tail[entries[i].len()]);
                let l = entries[i].len();
                Ok(Decision {
                    index: i,
                    metric: m,
                    amplitude_hat: (corr_abs + tail[l] / (8.0 * PI * noise_var)) / l_max,
                })
            }
        }
    }

    pub fn decode(&self, r: &[Complex64], noise_var: f64) -> Result<DecodeResult> {
        let d = self.decide(r, noise_var)?;
        let e = &self.codebook.entries()[d.index];
        Ok(DecodeResult {
            modcod_id: e.modcod_id,
            length_hat: e.len(),
            codeword_hat: e.bits.clone(),
            amplitude_hat: d.amplitude_hat,
            metric: d.metric,
        })
    }
}

/// Scores every entry with `score(index, |corr|)`; strict `>` keeps the
/// smallest id on ties.
#[inline]
fn argmax(r: &[Complex64], codebook: &PlhCodebook, mut score: impl FnMut(usize, f64) -> f64) -> (usize, f64, f64) {
    let mut best = (0usize, f64::NEG_INFINITY, 0.0);
    for (i, e) in codebook.entries().iter().enumerate() {
        let corr_abs = correlate_unchecked(r, &e.symbols, e.len()).norm();
        let metric = score(i, corr_abs);
        if metric > best.1 {
            best = (i, metric, corr_abs);
        }
    }
    best
}

/// Conventional noncoherent correlator on a fixed-length codebook.
pub fn decode_standard(r: &[Complex64], codebook: &PlhCodebook) -> Result<DecodeResult> {
    PreparedDecoder::new(codebook, DecoderKind::Standard)?.decode(r, 1.0)
}

/// Length-unaware correlator applied to a variable-length codebook.
pub fn decode_simple(r: &[Complex64], codebook: &PlhCodebook, mode: SimpleMode) -> Result<DecodeResult> {
    PreparedDecoder::new(codebook, DecoderKind::Simple { mode })?.decode(r, 1.0)
}

/// `argmax |corr|² / L^α`, with `Â = |corr| / L̂`.
pub fn decode_strategy1(r: &[Complex64], codebook: &PlhCodebook, alpha: f64) -> Result<DecodeResult> {
    PreparedDecoder::new(codebook, DecoderKind::Strategy1 { alpha })?.decode(r, 1.0)
}

/// `argmax |corr| + (β/σ²) Σ_{k≥L} |r_k|²`, with
/// `Â = (|corr| + Σ_{k≥L̂} |r_k|² / (8πσ²)) / L_max`.
pub fn decode_strategy2(r: &[Complex64], codebook: &PlhCodebook, beta: f64, noise_var: f64) -> Result<DecodeResult> {
    PreparedDecoder::new(codebook, DecoderKind::Strategy2 { beta })?.decode(r, noise_var)
}

/// `out[i] = Σ_{k≥i} x_k`, with `out.len() = n + 1`.
fn suffix_sums<T>(xs: impl DoubleEndedIterator<Item = T> + ExactSizeIterator) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    let n = xs.len();
    let mut out = vec![T::default(); n + 1];
    for (i, x) in xs.enumerate().rev() {
        out[i] = out[i + 1] + x;
    }
    out
}

/// Running second and fourth moments of `|r|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    m2: f64,
    m4: f64,
    n: usize,
}

impl MomentAccumulator {
    #[inline]
    pub fn push(&mut self, x: Complex64) {
        let p = x.norm_sqr();
        self.m2 += p;
        self.m4 += p * p;
        self.n += 1;
    }

    pub fn extend(&mut self, xs: &[Complex64]) {
        xs.iter().for_each(|&x| self.push(x));
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Per-component noise variance from the M2M4 moments:
    /// `S = sqrt(max(2·M2² − M4, 0))`, `σ² = max((M2 − S)/2, floor)`.
    pub fn noise_var(&self) -> Result<f64> {
        if self.n < MIN_ESTIMATOR_LEN {
            return Err(Error::TooShort {
                len: self.n,
                min: MIN_ESTIMATOR_LEN,
            });
        }
        let m2 = self.m2 / self.n as f64;
        let m4 = self.m4 / self.n as f64;
        let signal = (2.0 * m2 * m2 - m4).max(0.0).sqrt();
        Ok(((m2 - signal) / 2.0).max(NOISE_VAR_FLOOR))
    }
}

/// Blind M2M4 noise variance estimate over `r`.
pub fn estimate_noise_var(r: &[Complex64]) -> Result<f64> {
    let mut acc = MomentAccumulator::default();
    acc.extend(r);
    acc.noise_var()
}
