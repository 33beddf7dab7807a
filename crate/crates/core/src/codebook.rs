//! ModCod table and the variable-length PLH codebook built from it.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::code::{grow_code, required_dmin, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::modem::{pi2bpsk_map, SUPPORTED_CONSTELLATIONS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModCodEntry {
    pub modcod_id: u32,
    /// Data constellation size M.
    pub m: usize,
    /// LDPC convergence threshold, Es/N0 in dB.
    pub threshold_db: f64,
    pub plh_length: usize,
    /// Threshold is a placeholder rather than a published value.
    pub synthetic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModCodTable {
    entries: Vec<ModCodEntry>,
}

impl ModCodTable {
    /// Validates ids (unique, covering `1..=N`), constellation sizes and
    /// lengths, and sorts entries by id.
    pub fn new(mut entries: Vec<ModCodEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvariantViolation("empty ModCod table".into()));
        }
        entries.sort_by_key(|e| e.modcod_id);
        for (i, e) in entries.iter().enumerate() {
            if e.modcod_id as usize != i + 1 {
                return Err(Error::InvariantViolation(format!(
                    "ModCod ids must cover 1..={} exactly; found {} at position {}",
                    entries.len(),
                    e.modcod_id,
                    i + 1
                )));
            }
            if !SUPPORTED_CONSTELLATIONS.contains(&e.m) {
                return Err(Error::UnsupportedConstellation(e.m));
            }
            if e.plh_length == 0 || !e.threshold_db.is_finite() {
                return Err(Error::InvariantViolation(format!(
                    "ModCod {}: bad length or threshold",
                    e.modcod_id
                )));
            }
        }
        Ok(ModCodTable { entries })
    }

    /// The 39-entry DVB-S2X table. ModCods 1, 2, 3 and 6 carry the lowest
    /// threshold of their length class; the rest are evenly spaced inside the
    /// class range and flagged synthetic.
    pub fn dvb_s2x_default() -> Self {
        let mut entries = vec![
            entry(1, 4, -2.85, 64, false),
            entry(2, 4, -2.03, 58, false),
            entry(3, 4, 0.22, 48, false),
            entry(4, 4, 2.475, 48, true),
            entry(5, 4, 4.73, 48, true),
        ];
        let (lo, hi, n) = (5.13, 19.57, 34);
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let t = (t * 1000.0).round() / 1000.0;
            let m = match t {
                t if t < 7.5 => 8,
                t if t < 11.0 => 16,
                t if t < 14.5 => 32,
                t if t < 16.5 => 64,
                t if t < 18.0 => 128,
                _ => 256,
            };
            entries.push(entry(6 + i as u32, m, t, 26, i > 0));
        }
        ModCodTable::new(entries).expect("default table is valid")
    }

    pub fn entries(&self) -> &[ModCodEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, modcod_id: u32) -> Result<&ModCodEntry> {
        modcod_id
            .checked_sub(1)
            .and_then(|i| self.entries.get(i as usize))
            .ok_or(Error::UnknownModCod(modcod_id))
    }

    /// Distinct PLH lengths, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.entries.iter().map(|e| e.plh_length).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Lowest threshold among the ModCods of each length.
    pub fn class_thresholds(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            out.entry(e.plh_length)
                .and_modify(|t: &mut f64| *t = t.min(e.threshold_db))
                .or_insert(e.threshold_db);
        }
        out
    }

    /// For each length class, the ModCod with the lowest threshold.
    pub fn worst_case_modcods(&self) -> Vec<u32> {
        let thresholds = self.class_thresholds();
        let mut ids: Vec<u32> = thresholds
            .iter()
            .filter_map(|(l, t)| {
                self.entries
                    .iter()
                    .find(|e| e.plh_length == *l && e.threshold_db == *t)
                    .map(|e| e.modcod_id)
            })
            .collect();
        ids.sort_unstable();
        ids
    }
}

fn entry(modcod_id: u32, m: usize, threshold_db: f64, plh_length: usize, synthetic: bool) -> ModCodEntry {
    ModCodEntry {
        modcod_id,
        m,
        threshold_db,
        plh_length,
        synthetic,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookEntry {
    pub modcod_id: u32,
    pub bits: Bits,
    /// π/2-BPSK image of `bits`.
    pub symbols: Vec<Complex64>,
}

impl CodebookEntry {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// ModCod id → PLH codeword, plus the length statistics `N_L` and `P(L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlhCodebook {
    entries: Vec<CodebookEntry>,
    counts: BTreeMap<usize, usize>,
    probs: BTreeMap<usize, f64>,
}

impl PlhCodebook {
    /// Builds a codebook from `(modcod_id, codeword)` pairs.
    ///
    /// Rejects duplicate ids and, within each length class, any pair of
    /// codewords that are equal or complementary.
    pub fn new(words: Vec<(u32, Bits)>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        let mut words = words;
        words.sort_by_key(|(id, _)| *id);
        if let Some(w) = words.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvariantViolation(format!("duplicate ModCod id {}", w[0].0)));
        }
        if let Some((id, _)) = words.iter().find(|(_, b)| b.is_empty()) {
            return Err(Error::InvariantViolation(format!("ModCod {id} has an empty codeword")));
        }

        let mut counts = BTreeMap::new();
        for (_, b) in &words {
            *counts.entry(b.len()).or_insert(0usize) += 1;
        }
        let n = words.len();
        let probs = counts.iter().map(|(&l, &c)| (l, c as f64 / n as f64)).collect();

        for (i, (ida, a)) in words.iter().enumerate() {
            for (idb, b) in &words[i + 1..] {
                if a.len() == b.len() && (a == b || *a == b.complement()) {
                    return Err(Error::InvariantViolation(format!(
                        "ModCods {ida} and {idb} are equal or complementary"
                    )));
                }
            }
        }

        let entries = words
            .into_iter()
            .map(|(modcod_id, bits)| CodebookEntry {
                modcod_id,
                symbols: pi2bpsk_map(&bits).into_symbols(),
                bits,
            })
            .collect();
        Ok(PlhCodebook { entries, counts, probs })
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, modcod_id: u32) -> Result<&CodebookEntry> {
        self.entries
            .binary_search_by_key(&modcod_id, |e| e.modcod_id)
            .map(|i| &self.entries[i])
            .map_err(|_| Error::UnknownModCod(modcod_id))
    }

    /// Distinct lengths, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        self.counts.keys().copied().collect()
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    pub fn probs(&self) -> &BTreeMap<usize, f64> {
        &self.probs
    }

    pub fn l_max(&self) -> usize {
        *self.counts.keys().next_back().expect("codebook is never empty")
    }

    pub fn l_min(&self) -> usize {
        *self.counts.keys().next().expect("codebook is never empty")
    }

    /// `Σ_L P(L) · L`.
    pub fn mean_length(&self) -> f64 {
        self.probs.iter().map(|(&l, &p)| p * l as f64).sum()
    }

    pub fn is_fixed_length(&self) -> bool {
        self.counts.len() == 1
    }
}

/// Assigns each ModCod the codeword of message index `modcod_id - 1` under the
/// generator matrix of its length class.
///
/// Message indices are global rather than per class, so that with nested
/// per-length codes no codeword is a prefix of another one.
pub fn build_codebook(table: &ModCodTable, per_length: &BTreeMap<usize, GeneratorMatrix>) -> Result<PlhCodebook> {
    let mut words = Vec::with_capacity(table.len());
    for e in table.entries() {
        let g = per_length
            .get(&e.plh_length)
            .ok_or_else(|| Error::InvariantViolation(format!("no generator matrix for length {}", e.plh_length)))?;
        if g.v() != e.plh_length {
            return Err(Error::LengthMismatch {
                left: g.v(),
                right: e.plh_length,
            });
        }
        let index = (e.modcod_id - 1) as u64;
        if index >= 1 << g.k() {
            return Err(Error::CapacityExceeded {
                length: e.plh_length,
                needed: e.modcod_id as usize,
                capacity: 1 << g.k(),
            });
        }
        words.push((e.modcod_id, g.encode_index(index)));
    }
    PlhCodebook::new(words)
}

/// Fixed-length reference codebook: every ModCod encoded with `g` at `v` bits.
pub fn build_fixed_codebook(table: &ModCodTable, g: &GeneratorMatrix) -> Result<PlhCodebook> {
    let mut words = Vec::with_capacity(table.len());
    for e in table.entries() {
        let index = (e.modcod_id - 1) as u64;
        if index >= 1 << g.k() {
            return Err(Error::CapacityExceeded {
                length: g.v(),
                needed: e.modcod_id as usize,
                capacity: 1 << g.k(),
            });
        }
        words.push((e.modcod_id, g.encode_index(index)));
    }
    PlhCodebook::new(words)
}

/// Outcome of sizing one length class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthClassDesign {
    pub length: usize,
    pub threshold_db: f64,
    pub target_dmin: usize,
    pub achieved_dmin: usize,
}

/// Nested generator matrices for every length class of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableLengthDesign {
    /// Matrix of length `L_max`; every class matrix is a prefix of it.
    pub master: GeneratorMatrix,
    pub per_length: BTreeMap<usize, GeneratorMatrix>,
    pub classes: Vec<LengthClassDesign>,
}

/// Designs the per-length codes for a ModCod table.
///
/// One greedy column sequence of length `L_max` is grown and each class takes
/// its prefix. A class whose prefix misses the distance required at its
/// lowest threshold (for `target_cer`, BPSK bound) fails the design.
pub fn design_variable_length(
    table: &ModCodTable,
    k: usize,
    target_cer: f64,
    seed: u64,
) -> Result<VariableLengthDesign> {
    let lengths = table.lengths();
    let l_max = *lengths.last().expect("table is never empty");
    let master = grow_code(k, l_max, seed)?;
    let thresholds = table.class_thresholds();
    let mut per_length = BTreeMap::new();
    let mut classes = Vec::new();
    for &l in &lengths {
        let g = master.truncate(l)?;
        let threshold_db = thresholds[&l];
        let target_dmin = required_dmin(k, target_cer, threshold_db, 1.0)?;
        let achieved_dmin = g.noncoherent_dmin();
        if achieved_dmin < target_dmin {
            return Err(Error::DesignFailed {
                target: target_dmin,
                achieved: achieved_dmin,
                length: l,
            });
        }
        classes.push(LengthClassDesign {
            length: l,
            threshold_db,
            target_dmin,
            achieved_dmin,
        });
        per_length.insert(l, g);
    }
    Ok(VariableLengthDesign {
        master,
        per_length,
        classes,
    })
}

/// Default design parameters: `K = 6`, bound target CER `1e-5`.
pub const DEFAULT_K: usize = 6;
pub const DEFAULT_DESIGN_CER: f64 = 1e-5;
pub const DEFAULT_DESIGN_SEED: u64 = 1;

/// The default table's codebook together with the fixed-length reference
/// codebook built from the `L_max` matrix.
pub fn default_codebooks() -> (ModCodTable, PlhCodebook, PlhCodebook) {
    let table = ModCodTable::dvb_s2x_default();
    let design = design_variable_length(&table, DEFAULT_K, DEFAULT_DESIGN_CER, DEFAULT_DESIGN_SEED)
        .expect("default design meets its targets");
    let variable = build_codebook(&table, &design.per_length).expect("default codebook is valid");
    let fixed = build_fixed_codebook(&table, &design.master).expect("fixed codebook is valid");
    (table, variable, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_shape() {
        let t = ModCodTable::dvb_s2x_default();
        assert_eq!(t.len(), 39);
        assert_eq!(t.lengths(), vec![26, 48, 58, 64]);
        assert_eq!(t.worst_case_modcods(), vec![1, 2, 3, 6]);
        assert_eq!(t.entries().iter().filter(|e| e.synthetic).count(), 35);
        assert_eq!(t.get(6).unwrap().threshold_db, 5.13);
        assert_eq!(t.get(39).unwrap().threshold_db, 19.57);
        assert!(t.get(40).is_err());
        assert!(t.get(0).is_err());
    }

    #[test]
    fn table_rejects_gaps_and_bad_m() {
        let mut e = ModCodTable::dvb_s2x_default().entries().to_vec();
        e.remove(3);
        assert!(ModCodTable::new(e).is_err());
        let mut e = ModCodTable::dvb_s2x_default().entries().to_vec();
        e[0].m = 5;
        assert_eq!(ModCodTable::new(e), Err(Error::UnsupportedConstellation(5)));
    }

    #[test]
    fn single_modcod_single_length() {
        let cb = PlhCodebook::new(vec![(1, "1010".parse().unwrap())]).unwrap();
        assert_eq!(cb.probs().get(&4), Some(&1.0));
        assert_eq!(cb.mean_length(), 4.0);
    }

    #[test]
    fn complementary_pair_is_rejected() {
        let words = vec![(1, "0011".parse().unwrap()), (2, "1100".parse().unwrap())];
        assert!(matches!(PlhCodebook::new(words), Err(Error::InvariantViolation(_))));
        // same pattern at different lengths is fine
        let words = vec![(1, "0011".parse().unwrap()), (2, "001".parse().unwrap())];
        assert!(PlhCodebook::new(words).is_ok());
    }

    #[test]
    fn capacity_is_checked() {
        let table = ModCodTable::dvb_s2x_default();
        let g = grow_code(5, 26, 0).unwrap();
        let mut m = BTreeMap::new();
        for l in table.lengths() {
            m.insert(l, grow_code(6, l, 0).unwrap());
        }
        m.insert(26, g);
        assert!(matches!(
            build_codebook(&table, &m),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn missing_class_matrix_is_an_error() {
        let table = ModCodTable::dvb_s2x_default();
        let mut m = BTreeMap::new();
        m.insert(26, grow_code(6, 26, 0).unwrap());
        assert!(build_codebook(&table, &m).is_err());
    }
}
