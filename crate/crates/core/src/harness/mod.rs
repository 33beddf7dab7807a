//! Seeded, data-parallel Monte Carlo estimation of header codeword error
//! rates, parameter sweeps, gap search and the complexity report.
//!
//! Trial `i` of a run draws everything from `ChaCha8Rng` seeded with the
//! master seed and switched to stream `i`, so the counts do not depend on the
//! thread count or on how trials are split into batches.

mod complexity;
mod gap;
mod stats;

use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use complexity::{complexity_report, ComplexityReport, ComplexityRow};
pub use gap::{default_search_window, find_snr_at_cer, measure_gap, GapResult, GapSearch};
pub use stats::CerEstimate;

use crate::codebook::{ModCodTable, PlhCodebook};
use crate::decoders::{DecoderConfig, MomentAccumulator, NoiseVarSource, PreparedDecoder};
use crate::error::{Error, Result};
use crate::modem::{complex_gaussian, data_constellation, draw_channel, fill_frame, AmplitudeModel};

const CHUNK: u64 = 1024;

/// Independent generator for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Monte Carlo engine over one codebook; the codebook is used both to
/// transmit and to decode.
#[derive(Debug, Clone, Copy)]
pub struct Simulator<'a> {
    pub codebook: &'a PlhCodebook,
    pub table: &'a ModCodTable,
    pub amplitude: AmplitudeModel,
}

impl<'a> Simulator<'a> {
    pub fn new(codebook: &'a PlhCodebook, table: &'a ModCodTable) -> Self {
        Simulator {
            codebook,
            table,
            amplitude: AmplitudeModel::Unit,
        }
    }

    pub fn with_amplitude(mut self, amplitude: AmplitudeModel) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Number of ModCod-id errors over the trial indices in `trials`.
    pub fn count_errors(
        &self,
        modcod_id: u32,
        decoder: &DecoderConfig,
        esn0_db: f64,
        trials: Range<u64>,
        master_seed: u64,
    ) -> Result<u64> {
        decoder.validate()?;
        if !esn0_db.is_finite() {
            return Err(Error::InvalidParameter(format!("Es/N0 {esn0_db}")));
        }
        let header = &self.codebook.get(modcod_id)?.symbols;
        let constellation = data_constellation(self.table.get(modcod_id)?.m)?;
        let prepared = PreparedDecoder::new(self.codebook, decoder.kind)?;
        let l_max = self.codebook.l_max();
        let source = decoder.noise_var_source;
        let amplitude = self.amplitude;

        let trial = |frame: &mut Vec<Complex64>, trial: u64| -> Result<bool> {
            let mut rng = trial_rng(master_seed, trial);
            let params = draw_channel(esn0_db, amplitude, &mut rng);
            fill_frame(header, &constellation, l_max, &params, &mut rng, frame);
            let noise_var = match source {
                NoiseVarSource::Known => params.noise_var,
                NoiseVarSource::Estimated { window } => {
                    let mut acc = MomentAccumulator::default();
                    acc.extend(frame);
                    // further samples of the same link, drawn after the frame
                    let gain = Complex64::from_polar(params.amplitude, params.phase);
                    let sigma = params.noise_var.sqrt();
                    for _ in l_max..window {
                        let s = constellation[rng.random_range(0..constellation.len())];
                        acc.push(s * gain + complex_gaussian(&mut rng, sigma));
                    }
                    acc.noise_var()?
                }
            };
            let d = prepared.decide(frame, noise_var)?;
            Ok(self.codebook.entries()[d.index].modcod_id != modcod_id)
        };

        let chunks: Vec<Range<u64>> = (trials.start..trials.end)
            .step_by(CHUNK as usize)
            .map(|s| s..(s + CHUNK).min(trials.end))
            .collect();
        let errors = chunks
            .into_par_iter()
            .map(|chunk| {
                let mut frame = Vec::with_capacity(l_max);
                let mut errors = 0u64;
                for t in chunk {
                    errors += u64::from(trial(&mut frame, t)?);
                }
                Ok(errors)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(errors)
    }

    pub fn run_cer(
        &self,
        modcod_id: u32,
        decoder: &DecoderConfig,
        esn0_db: f64,
        trials: u64,
        master_seed: u64,
    ) -> Result<CerEstimate> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        let errors = self.count_errors(modcod_id, decoder, esn0_db, 0..trials, master_seed)?;
        Ok(CerEstimate::new(trials, errors))
    }
}

/// CER of `modcod_id` at `esn0_db` over `trials` frames with unit amplitude.
pub fn run_cer(
    codebook: &PlhCodebook,
    table: &ModCodTable,
    modcod_id: u32,
    decoder: &DecoderConfig,
    esn0_db: f64,
    trials: u64,
    master_seed: u64,
) -> Result<CerEstimate> {
    Simulator::new(codebook, table).run_cer(modcod_id, decoder, esn0_db, trials, master_seed)
}

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CerRow {
    pub modcod: u32,
    pub decoder: String,
    pub param_name: Option<String>,
    pub param_value: Option<f64>,
    pub esn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub cer: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl CerRow {
    pub fn new(modcod: u32, decoder: &DecoderConfig, esn0_db: f64, est: &CerEstimate, seed: u64) -> Self {
        let param = decoder.kind.param();
        CerRow {
            modcod,
            decoder: decoder.kind.name().to_string(),
            param_name: param.map(|(n, _)| n.to_string()),
            param_value: param.map(|(_, v)| v),
            esn0_db,
            trials: est.trials,
            errors: est.errors,
            cer: est.cer,
            ci_lo: est.ci95_lo,
            ci_hi: est.ci95_hi,
            seed,
        }
    }
}

/// Grid of a sweep: every `(modcod, param, esn0)` combination is simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub modcod_ids: Vec<u32>,
    pub decoder: DecoderConfig,
    /// Values substituted into the decoder's tunable parameter. Ignored, apart
    /// from needing to be nonempty, for decoders without one.
    pub param_grid: Vec<f64>,
    pub esn0_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl Simulator<'_> {
    pub fn sweep(&self, spec: &SweepSpec) -> Result<Vec<CerRow>> {
        if spec.modcod_ids.is_empty() || spec.param_grid.is_empty() || spec.esn0_grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
        }
        let params: &[f64] = if spec.decoder.kind.param().is_some() {
            &spec.param_grid
        } else {
            &spec.param_grid[..1]
        };
        let mut rows = Vec::new();
        for &id in &spec.modcod_ids {
            for &p in params {
                let decoder = DecoderConfig {
                    kind: spec.decoder.kind.with_param(p),
                    ..spec.decoder
                };
                for &esn0 in &spec.esn0_grid {
                    let est = self.run_cer(id, &decoder, esn0, spec.trials, spec.seed)?;
                    rows.push(CerRow::new(id, &decoder, esn0, &est, spec.seed));
                }
            }
        }
        Ok(rows)
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "modcod",
    "decoder",
    "param_name",
    "param_value",
    "esn0_db",
    "trials",
    "errors",
    "cer",
    "ci_lo",
    "ci_hi",
    "seed",
];

pub fn write_results_csv<W: std::io::Write>(rows: &[CerRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_results_csv<R: std::io::Read>(input: R) -> Result<Vec<CerRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, "unexpected results header"));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::parse(i + 2, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::default_codebooks;
    use crate::decoders::DecoderKind;

    #[test]
    fn batches_add_up() {
        let (table, cb, _) = default_codebooks();
        let sim = Simulator::new(&cb, &table);
        let dec = DecoderConfig::new(DecoderKind::Strategy1 { alpha: 0.5 });
        let whole = sim.count_errors(1, &dec, -8.0, 0..3000, 5).unwrap();
        let parts = sim.count_errors(1, &dec, -8.0, 0..1234, 5).unwrap()
            + sim.count_errors(1, &dec, -8.0, 1234..3000, 5).unwrap();
        assert_eq!(whole, parts);
        assert!(whole > 0);
    }

    #[test]
    fn csv_round_trip() {
        let dec = DecoderConfig::new(DecoderKind::Strategy2 { beta: 0.2 });
        let rows = vec![
            CerRow::new(6, &dec, 1.5, &CerEstimate::new(1000, 3), 9),
            CerRow::new(
                1,
                &DecoderConfig::new(DecoderKind::Standard),
                -2.85,
                &CerEstimate::new(10, 0),
                9,
            ),
        ];
        let mut buf = Vec::new();
        write_results_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("modcod,decoder,param_name,param_value,esn0_db,trials,errors,cer,ci_lo,ci_hi,seed\n"));
        assert!(text.contains("\n1,standard,,,"));
        assert_eq!(read_results_csv(&buf[..]).unwrap(), rows);
    }
}
