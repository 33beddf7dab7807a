//! π/2-BPSK header mapping, data-tail constellations and the
//! unknown-amplitude, unknown-phase AWGN channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::Bits;
use crate::codebook::{ModCodTable, PlhCodebook};
use crate::error::{Error, Result};

pub const SUPPORTED_CONSTELLATIONS: [usize; 7] = [4, 8, 16, 32, 64, 128, 256];

/// Unit-modulus π/2-BPSK symbols of one header codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedCodeword(Vec<Complex64>);

impl ModulatedCodeword {
    pub fn symbols(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `j^(k mod 2)`: the π/2 rotation applied to symbol `k`.
pub(crate) fn pi2_rotation(k: usize) -> Complex64 {
    if k.is_multiple_of(2) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// Symbol `k` is `j^(k mod 2) · (1 - 2·bit_k)`.
pub fn pi2bpsk_map(bits: &Bits) -> ModulatedCodeword {
    ModulatedCodeword(
        bits.iter()
            .enumerate()
            .map(|(k, b)| pi2_rotation(k) * if b { -1.0 } else { 1.0 })
            .collect(),
    )
}

// (points on ring, radius relative to the inner ring)
fn apsk_rings(m: usize) -> &'static [(usize, f64)] {
    match m {
        16 => &[(4, 1.0), (12, 3.15)],
        32 => &[(4, 1.0), (12, 2.84), (16, 5.27)],
        64 => &[(16, 1.0), (16, 1.88), (16, 2.72), (16, 3.95)],
        128 => &[(16, 1.0), (16, 1.72), (16, 2.45), (16, 3.18), (16, 3.92), (48, 5.0)],
        256 => &[
            (32, 1.0),
            (32, 1.62),
            (32, 2.25),
            (32, 2.88),
            (32, 3.52),
            (32, 4.15),
            (32, 4.78),
            (32, 5.42),
        ],
        _ => &[],
    }
}

/// Unit average energy symbol set of size `m`: PSK for 4 and 8, APSK above.
pub fn data_constellation(m: usize) -> Result<Vec<Complex64>> {
    let points: Vec<Complex64> = match m {
        4 => (0..4)
            .map(|i| Complex64::from_polar(1.0, PI / 4.0 * (2 * i + 1) as f64))
            .collect(),
        8 => (0..8)
            .map(|i| Complex64::from_polar(1.0, PI / 4.0 * i as f64))
            .collect(),
        16 | 32 | 64 | 128 | 256 => apsk_rings(m)
            .iter()
            .enumerate()
            .flat_map(|(ring, &(n, radius))| {
                // stagger alternate rings by half a point spacing
                let offset = if ring % 2 == 0 { PI / n as f64 } else { 0.0 };
                (0..n).map(move |i| Complex64::from_polar(radius, offset + 2.0 * PI * i as f64 / n as f64))
            })
            .collect(),
        _ => return Err(Error::UnsupportedConstellation(m)),
    };
    let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    let scale = energy.sqrt().recip();
    Ok(points.into_iter().map(|p| p * scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub amplitude: f64,
    /// Radians in `[0, 2π)`.
    pub phase: f64,
    /// Per real/imaginary component.
    pub noise_var: f64,
}

impl ChannelParams {
    pub fn new(amplitude: f64, phase: f64, noise_var: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!("amplitude {amplitude}")));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance {noise_var}")));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter(format!("phase {phase}")));
        }
        Ok(ChannelParams {
            amplitude,
            phase: phase.rem_euclid(2.0 * PI),
            noise_var,
        })
    }
}

/// `σ² = A² / (2 · 10^(Es/N0 / 10))`, i.e. `Es = A²` and `N0 = 2σ²`.
pub fn snr_to_noise_var(esn0_db: f64, amplitude: f64) -> f64 {
    amplitude * amplitude / (2.0 * 10f64.powf(esn0_db / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTruth {
    pub modcod_id: u32,
    pub length: usize,
    pub params: ChannelParams,
}

/// `L_max` received samples and the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub samples: Vec<Complex64>,
    pub truth: FrameTruth,
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * sigma, im * sigma)
}

/// Transmits the header of `modcod_id` followed by random data symbols up to
/// `L_max`, through `r = A·c·e^{jθ} + w`.
///
/// Draw order is fixed: all data symbols, then the noise samples in index
/// order, so a replayed rng reproduces the frame.
pub fn transmit<R: Rng + ?Sized>(
    codebook: &PlhCodebook,
    table: &ModCodTable,
    modcod_id: u32,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ReceivedFrame> {
    let entry = codebook.get(modcod_id)?;
    let constellation = data_constellation(table.get(modcod_id)?.m)?;
    let mut samples = Vec::with_capacity(codebook.l_max());
    fill_frame(
        &entry.symbols,
        &constellation,
        codebook.l_max(),
        params,
        rng,
        &mut samples,
    );
    Ok(ReceivedFrame {
        samples,
        truth: FrameTruth {
            modcod_id,
            length: entry.len(),
            params: *params,
        },
    })
}

/// Writes `A·c·e^{jθ} + w` into `out`, `c` being `header` followed by data
/// symbols up to `l_max`.
pub(crate) fn fill_frame<R: Rng + ?Sized>(
    header: &[Complex64],
    constellation: &[Complex64],
    l_max: usize,
    params: &ChannelParams,
    rng: &mut R,
    out: &mut Vec<Complex64>,
) {
    out.clear();
    out.extend_from_slice(header);
    out.extend((header.len()..l_max).map(|_| constellation[rng.random_range(0..constellation.len())]));
    let gain = Complex64::from_polar(params.amplitude, params.phase);
    let sigma = params.noise_var.sqrt();
    for s in out.iter_mut() {
        *s = *s * gain + complex_gaussian(rng, sigma);
    }
}

/// Amplitude model for simulated frames.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AmplitudeModel {
    /// `A = 1`.
    #[default]
    Unit,
    /// `A ~ U[0.5, 2]`, drawn per frame.
    Uniform,
}

/// Draws per-frame channel parameters at a fixed Es/N0: uniform phase,
/// amplitude per `model`, and the noise variance that keeps Es/N0 fixed.
pub fn draw_channel<R: Rng + ?Sized>(esn0_db: f64, model: AmplitudeModel, rng: &mut R) -> ChannelParams {
    let phase = rng.random_range(0.0..2.0 * PI);
    let amplitude = match model {
        AmplitudeModel::Unit => 1.0,
        AmplitudeModel::Uniform => rng.random_range(0.5..=2.0),
    };
    ChannelParams {
        amplitude,
        phase,
        noise_var: snr_to_noise_var(esn0_db, amplitude),
    }
}
