//! Short binary codes for noncoherent π/2-BPSK detection.
//!
//! A noncoherent receiver only sees `|Σ r_k c_k*|`, so a codeword and its
//! bitwise complement are indistinguishable. Distances are therefore measured
//! as `min(d_H, V - d_H)` when designing codes, and construction grows a
//! generator matrix one column at a time, always picking the column that
//! maximizes that distance.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Largest message size accepted by the column-search construction.
pub const MAX_K: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Hamming,
    Noncoherent,
}

pub fn hamming_distance(a: &Bits, b: &Bits) -> Result<usize> {
    Ok(a.xor(b)?.weight())
}

/// `min(d_H(a, b), V - d_H(a, b))`.
pub fn noncoherent_distance(a: &Bits, b: &Bits) -> Result<usize> {
    let d = hamming_distance(a, b)?;
    Ok(d.min(a.len() - d))
}

/// Minimum pairwise distance by exhaustive enumeration of all pairs.
pub fn code_min_distance(codewords: &[Bits], mode: DistanceMode) -> Result<usize> {
    if codewords.len() < 2 {
        return Err(Error::TooFewCodewords(codewords.len()));
    }
    let mut best = usize::MAX;
    for (i, a) in codewords.iter().enumerate() {
        for b in &codewords[i + 1..] {
            let d = match mode {
                DistanceMode::Hamming => hamming_distance(a, b)?,
                DistanceMode::Noncoherent => noncoherent_distance(a, b)?,
            };
            best = best.min(d);
        }
    }
    Ok(best)
}

/// Union bound on the noncoherent codeword error probability,
/// `(2^k - 1) / 2 · erfc(sqrt(b · d · Es/N0))`.
pub fn cer_bound(k: usize, dmin: usize, esn0_db: f64, b_factor: f64) -> f64 {
    let esn0 = 10f64.powf(esn0_db / 10.0);
    ((1u64 << k) - 1) as f64 * 0.5 * erfc((b_factor * dmin as f64 * esn0).sqrt())
}

/// Smallest `d` for which [`cer_bound`] does not exceed `target_cer`.
pub fn required_dmin(k: usize, target_cer: f64, esn0_db: f64, b_factor: f64) -> Result<usize> {
    if !(target_cer > 0.0 && target_cer < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target CER {target_cer} outside (0, 1)"
        )));
    }
    if b_factor.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !esn0_db.is_finite() || k == 0 || k > 63 {
        return Err(Error::InvalidParameter(format!(
            "bad bound inputs k={k}, b={b_factor}, esn0={esn0_db}"
        )));
    }
    // erfc only decreases with d, so the scan terminates; the cap guards
    // against absurdly low SNR.
    (1..=1 << 20)
        .find(|&d| cer_bound(k, d, esn0_db, b_factor) <= target_cer)
        .ok_or_else(|| Error::InvalidParameter(format!("no d_min reaches {target_cer}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeDesignSpec {
    pub k: usize,
    pub target_dmin: usize,
    pub max_length: usize,
    pub seed: u64,
}

impl CodeDesignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > MAX_K {
            return Err(Error::InvalidParameter(format!("k={} outside 1..={MAX_K}", self.k)));
        }
        if self.target_dmin < 1 || self.max_length < self.target_dmin {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= target_dmin ({}) <= max_length ({})",
                self.target_dmin, self.max_length
            )));
        }
        Ok(())
    }
}

/// Binary `k × v` generator matrix, stored column-wise: bit `i` of a column
/// mask is the entry in row `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    k: usize,
    columns: Vec<u32>,
}

impl GeneratorMatrix {
    /// Builds a matrix from its rows, checking distinct columns and full rank.
    pub fn from_rows(rows: &[Bits]) -> Result<Self> {
        let k = rows.len();
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidParameter(format!("k={k} outside 1..={MAX_K}")));
        }
        let v = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != v) {
            return Err(Error::LengthMismatch {
                left: v,
                right: r.len(),
            });
        }
        let columns = (0..v)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, r)| acc | (r.as_slice()[j] as u32) << i)
            })
            .collect();
        let g = GeneratorMatrix { k, columns };
        g.check()?;
        Ok(g)
    }

    pub(crate) fn from_columns(k: usize, columns: Vec<u32>) -> Result<Self> {
        let g = GeneratorMatrix { k, columns };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if self.v() < self.k {
            return Err(Error::InvariantViolation(format!("v={} < k={}", self.v(), self.k)));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(j) = self.columns.iter().position(|c| !seen.insert(*c)) {
            return Err(Error::InvariantViolation(format!("column {j} repeats")));
        }
        if gf2_rank(&self.columns) != self.k {
            return Err(Error::InvariantViolation("rows are linearly dependent".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn v(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn rows(&self) -> Vec<Bits> {
        (0..self.k)
            .map(|i| self.columns.iter().map(|c| c >> i & 1 == 1).collect::<Vec<_>>().into())
            .collect()
    }

    /// The first `len` columns as a code of its own.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len > self.v() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate {} columns to {len}",
                self.v()
            )));
        }
        GeneratorMatrix::from_columns(self.k, self.columns[..len].to_vec())
    }

    /// Codeword for message index `m`: message bit `i` (MSB first) selects row `i`.
    pub fn encode_index(&self, m: u64) -> Bits {
        let mask = message_mask(m, self.k);
        self.columns
            .iter()
            .map(|&c| (c & mask).count_ones() & 1 == 1)
            .collect::<Vec<_>>()
            .into()
    }

    pub fn codewords(&self) -> Vec<Bits> {
        (0..1u64 << self.k).map(|m| self.encode_index(m)).collect()
    }

    /// Noncoherent minimum distance, via the minimum weight of the linear code.
    pub fn noncoherent_dmin(&self) -> usize {
        let v = self.v();
        (1u32..1 << self.k)
            .map(|m| {
                let w = self.columns.iter().filter(|&&c| (c & m).count_ones() & 1 == 1).count();
                w.min(v - w)
            })
            .min()
            .unwrap_or(0)
    }
}

// Message index m, read MSB-first over k bits, to a row-selection mask.
fn message_mask(m: u64, k: usize) -> u32 {
    (0..k).fold(0u32, |acc, i| acc | ((m >> (k - 1 - i) & 1) as u32) << i)
}

fn gf2_rank(columns: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &c in columns {
        let mut x = c;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// XOR of the rows selected by `message`.
pub fn encode(g: &GeneratorMatrix, message: &Bits) -> Result<Bits> {
    if message.len() != g.k() {
        return Err(Error::LengthMismatch {
            left: message.len(),
            right: g.k(),
        });
    }
    let mask = message
        .iter()
        .enumerate()
        .fold(0u32, |acc, (i, b)| acc | (b as u32) << i);
    Ok(g.columns
        .iter()
        .map(|&c| (c & mask).count_ones() & 1 == 1)
        .collect::<Vec<_>>()
        .into())
}

/// Column-by-column greedy construction.
///
/// Starts from the `k × k` identity. Each step appends the unused column that
/// maximizes the noncoherent minimum distance; ties go to the first candidate
/// in a seeded shuffle. The all-zero column is a candidate only once every
/// nonzero pattern is in use, which lets the code reach `v = 2^k`.
struct Greedy {
    k: usize,
    columns: Vec<u32>,
    used: Vec<bool>,
    // weights[m] = Hamming weight of the codeword for row mask m
    weights: Vec<usize>,
    rng: ChaCha8Rng,
}

impl Greedy {
    fn new(k: usize, seed: u64) -> Self {
        let mut g = Greedy {
            k,
            columns: Vec::new(),
            used: vec![false; 1 << k],
            weights: vec![0; 1 << k],
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for i in 0..k {
            g.push(1 << i);
        }
        g
    }

    fn push(&mut self, col: u32) {
        self.used[col as usize] = true;
        self.columns.push(col);
        for (m, w) in self.weights.iter_mut().enumerate() {
            *w += (m as u32 & col).count_ones() as usize & 1;
        }
    }

    fn dmin(&self) -> usize {
        let v = self.columns.len();
        self.weights[1..].iter().map(|&w| w.min(v - w)).min().unwrap_or(0)
    }

    fn dmin_with(&self, col: u32) -> usize {
        let v = self.columns.len() + 1;
        self.weights[1..]
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let w = w + ((i as u32 + 1) & col).count_ones() as usize % 2;
                w.min(v - w)
            })
            .min()
            .unwrap_or(0)
    }

    /// Appends one column; `false` once the column pool is exhausted.
    fn step(&mut self) -> bool {
        let mut candidates: Vec<u32> = (1..1u32 << self.k).filter(|&c| !self.used[c as usize]).collect();
        if candidates.is_empty() {
            if self.used[0] {
                return false;
            }
            candidates.push(0);
        }
        candidates.shuffle(&mut self.rng);
        let mut best = candidates[0];
        let mut best_d = self.dmin_with(best);
        for &c in &candidates[1..] {
            let d = self.dmin_with(c);
            if d > best_d {
                best = c;
                best_d = d;
            }
        }
        self.push(best);
        true
    }

    fn finish(self) -> Result<GeneratorMatrix> {
        GeneratorMatrix::from_columns(self.k, self.columns)
    }
}

/// Grows a code until its noncoherent minimum distance reaches the target.
pub fn design_code(spec: &CodeDesignSpec) -> Result<GeneratorMatrix> {
    spec.validate()?;
    let mut greedy = Greedy::new(spec.k, spec.seed);
    loop {
        if greedy.dmin() >= spec.target_dmin {
            return greedy.finish();
        }
        if greedy.columns.len() >= spec.max_length || !greedy.step() {
            return Err(Error::DesignFailed {
                target: spec.target_dmin,
                achieved: greedy.dmin(),
                length: greedy.columns.len(),
            });
        }
    }
}

/// Grows a code to exactly `length` columns with the same greedy rule.
///
/// The construction is incremental, so the result for a shorter length is
/// always a prefix of the result for a longer one under the same seed.
pub fn grow_code(k: usize, length: usize, seed: u64) -> Result<GeneratorMatrix> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidParameter(format!("k={k} outside 1..={MAX_K}")));
    }
    if length < k || length > 1 << k {
        return Err(Error::InvalidParameter(format!(
            "length {length} outside {k}..={}",
            1usize << k
        )));
    }
    let mut greedy = Greedy::new(k, seed);
    while greedy.columns.len() < length {
        greedy.step();
    }
    greedy.finish()
}
