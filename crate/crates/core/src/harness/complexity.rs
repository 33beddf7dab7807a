use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codebook::PlhCodebook;

/// Operation counts per decoded candidate. Multiplications by the ±1, ±j
/// header symbols are free and not counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub decoder: String,
    pub additions: u64,
    pub multiplications: u64,
    pub lut_accesses: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub l_max: usize,
    pub mean_length: usize,
    pub rows: Vec<ComplexityRow>,
}

/// Counts for the standard decoder and both strategies. The average length is
/// the probability-weighted mean codeword length rounded up to a whole bit.
pub fn complexity_report(codebook: &PlhCodebook) -> ComplexityReport {
    let l_max = codebook.l_max() as u64;
    let l_bar = codebook.mean_length().ceil() as u64;
    let row = |name: &str, a: u64, m: u64, lut: u64| ComplexityRow {
        decoder: name.to_string(),
        additions: a,
        multiplications: m,
        lut_accesses: lut,
    };
    ComplexityReport {
        l_max: l_max as usize,
        mean_length: l_bar as usize,
        rows: vec![
            row("standard", 2 * l_max - 1, 2, 1),
            row("strategy1", 2 * l_bar - 1, 2, 0),
            row("strategy2", 2 * l_max - 4, 2 * l_max - 2 * l_bar, 1),
        ],
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L_max = {}, mean length = {}", self.l_max, self.mean_length)?;
        writeln!(
            f,
            "{:<10} {:>9} {:>15} {:>11}",
            "decoder", "additions", "multiplications", "lut_accesses"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:>9} {:>15} {:>11}",
                r.decoder, r.additions, r.multiplications, r.lut_accesses
            )?;
        }
        Ok(())
    }
}
