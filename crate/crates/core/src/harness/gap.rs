use serde::{Deserialize, Serialize};

use super::{CerEstimate, Simulator};
use crate::decoders::DecoderConfig;
use crate::error::{Error, Result};

/// Search schedule for [`find_snr_at_cer`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSearch {
    pub target_cer: f64,
    pub lo_db: f64,
    pub hi_db: f64,
    /// Step of the upward scan that brackets the first crossing.
    pub scan_step_db: f64,
    /// Bisection stops once the bracket is this narrow.
    pub resolution_db: f64,
    pub initial_trials: u64,
    pub max_trials: u64,
    pub seed: u64,
}

/// `[threshold − 12, threshold + 6]` dB around a ModCod's threshold.
pub fn default_search_window(threshold_db: f64) -> (f64, f64) {
    (threshold_db - 12.0, threshold_db + 6.0)
}

impl GapSearch {
    pub fn new(target_cer: f64, window: (f64, f64), seed: u64) -> Self {
        GapSearch {
            target_cer,
            lo_db: window.0,
            hi_db: window.1,
            scan_step_db: 1.0,
            resolution_db: 0.05,
            initial_trials: 10_000,
            max_trials: 1_000_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.target_cer > 0.0 && self.target_cer < 1.0) {
            return bad(format!("target CER {} not in (0, 1)", self.target_cer));
        }
        if !(self.lo_db.is_finite() && self.hi_db.is_finite() && self.lo_db < self.hi_db) {
            return bad(format!("search window [{}, {}]", self.lo_db, self.hi_db));
        }
        if !(self.resolution_db > 0.0 && self.scan_step_db > 0.0) {
            return bad(format!(
                "resolution {} / scan step {}",
                self.resolution_db, self.scan_step_db
            ));
        }
        if self.initial_trials == 0 || self.max_trials < self.initial_trials {
            return bad(format!("trial schedule {}..{}", self.initial_trials, self.max_trials));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    Below,
}

/// Decides whether CER at `esn0_db` is above or below the target, growing the
/// trial count fourfold while the interval straddles it. At the cap the point
/// estimate decides.
fn classify(
    sim: &Simulator<'_>,
    modcod_id: u32,
    decoder: &DecoderConfig,
    esn0_db: f64,
    search: &GapSearch,
) -> Result<Side> {
    let mut done = 0;
    let mut errors = 0;
    let mut n = search.initial_trials;
    loop {
        errors += sim.count_errors(modcod_id, decoder, esn0_db, done..n, search.seed)?;
        done = n;
        let est = CerEstimate::new(n, errors);
        if est.ci95_lo > search.target_cer {
            return Ok(Side::Above);
        }
        if est.ci95_hi < search.target_cer {
            return Ok(Side::Below);
        }
        if n >= search.max_trials {
            return Ok(if est.cer > search.target_cer {
                Side::Above
            } else {
                Side::Below
            });
        }
        n = (n * 4).min(search.max_trials);
    }
}

/// Lowest Es/N0 in dB at which the CER falls below the target.
///
/// An upward scan from the bottom of the window brackets the first crossing,
/// then bisection narrows it. CER curves that rise again at high SNR, as the
/// strategy 2 metric does for long codewords, still yield the waterfall
/// crossing. Every SNR point reuses the same seed, so neighbouring points see
/// the same frames.
pub fn find_snr_at_cer(
    sim: &Simulator<'_>,
    modcod_id: u32,
    decoder: &DecoderConfig,
    search: &GapSearch,
) -> Result<f64> {
    search.validate()?;
    decoder.validate()?;
    let not_bracketed = || Error::NotBracketed {
        target: search.target_cer,
        lo_db: search.lo_db,
        hi_db: search.hi_db,
    };
    if classify(sim, modcod_id, decoder, search.lo_db, search)? != Side::Above {
        return Err(not_bracketed());
    }
    let mut lo = search.lo_db;
    let mut hi = loop {
        if lo >= search.hi_db {
            return Err(not_bracketed());
        }
        let next = (lo + search.scan_step_db).min(search.hi_db);
        if classify(sim, modcod_id, decoder, next, search)? == Side::Below {
            break next;
        }
        lo = next;
    };
    while hi - lo > search.resolution_db {
        let mid = 0.5 * (lo + hi);
        match classify(sim, modcod_id, decoder, mid, search)? {
            Side::Above => lo = mid,
            Side::Below => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub modcod_id: u32,
    pub decoder: DecoderConfig,
    pub target_cer: f64,
    pub snr_at_target_db: f64,
    pub ldpc_threshold_db: f64,
    pub gap_db: f64,
}

/// Gap between the CER crossing and the ModCod's threshold.
pub fn measure_gap(
    sim: &Simulator<'_>,
    modcod_id: u32,
    decoder: &DecoderConfig,
    search: &GapSearch,
) -> Result<GapResult> {
    let threshold = sim.table.get(modcod_id)?.threshold_db;
    let snr = find_snr_at_cer(sim, modcod_id, decoder, search)?;
    Ok(GapResult {
        modcod_id,
        decoder: *decoder,
        target_cer: search.target_cer,
        snr_at_target_db: snr,
        ldpc_threshold_db: threshold,
        gap_db: snr - threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::default_codebooks;
    use crate::decoders::DecoderKind;

    #[test]
    fn unbracketed_window_is_an_error() {
        let (table, cb, _) = default_codebooks();
        let sim = Simulator::new(&cb, &table);
        let dec = DecoderConfig::new(DecoderKind::Strategy1 { alpha: 0.5 });
        let search = GapSearch {
            initial_trials: 2000,
            max_trials: 2000,
            ..GapSearch::new(1e-2, (20.0, 25.0), 1)
        };
        assert!(matches!(
            find_snr_at_cer(&sim, 6, &dec, &search),
            Err(Error::NotBracketed { .. })
        ));
        let search = GapSearch {
            initial_trials: 2000,
            max_trials: 2000,
            ..GapSearch::new(1e-2, (-30.0, -27.0), 1)
        };
        assert!(matches!(
            find_snr_at_cer(&sim, 6, &dec, &search),
            Err(Error::NotBracketed { .. })
        ));
        assert!(GapSearch::new(1.0, (0.0, 1.0), 1).validate().is_err());
        assert!(GapSearch::new(0.1, (1.0, 0.0), 1).validate().is_err());
    }

    #[test]
    fn crossing_lands_on_the_bisection_grid() {
        let (table, cb, _) = default_codebooks();
        let sim = Simulator::new(&cb, &table);
        let dec = DecoderConfig::new(DecoderKind::Strategy1 { alpha: 0.5 });
        let search = GapSearch {
            initial_trials: 2000,
            max_trials: 8000,
            ..GapSearch::new(5e-2, (-14.0, 0.0), 3)
        };
        let snr = find_snr_at_cer(&sim, 1, &dec, &search).unwrap();
        assert!(snr > -14.0 && snr < 0.0);
        // a 1 dB scan cell halved five times leaves a 1/32 dB bracket
        let k = (snr + 14.0) * 32.0 - 0.5;
        assert!((k - k.round()).abs() < 1e-9, "{snr}");
        let coarse = GapSearch {
            target_cer: 1e-1,
            ..search
        };
        assert!(find_snr_at_cer(&sim, 1, &dec, &coarse).unwrap() <= snr);
    }
}
