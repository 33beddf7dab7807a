//! `plh` command-line front end.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use plh_core::code::{design_code, CodeDesignSpec, DistanceMode};
use plh_core::codebook::{
    build_codebook, build_fixed_codebook, design_variable_length, ModCodTable, PlhCodebook, DEFAULT_K,
};
use plh_core::format::{parse_codebook, parse_modcod_table, write_codebook, write_generator_matrix};
use plh_core::harness::{
    complexity_report, default_search_window, measure_gap, write_results_csv, CerRow, GapSearch, Simulator, SweepSpec,
};

pub use config::RunConfig;
use config::{DecoderName, NoiseVarName, SimpleModeName};

#[derive(Debug, Parser)]
#[command(
    name = "plh",
    version,
    about = "Variable-length PLH code design and noncoherent decoding simulator"
)]
pub struct Cli {
    /// Monte Carlo master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file, or directory for `design`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for any setting; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    /// Codebook file to simulate instead of the built-in design.
    #[arg(long, global = true)]
    pub codebook: Option<PathBuf>,
    /// ModCod table CSV (modcod_id,m,threshold_db,plh_length,synthetic).
    #[arg(long, global = true)]
    pub modcod_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design generator matrices and the codebook.
    Design(DesignArgs),
    /// CER of one ModCod at one or more Es/N0 values.
    Simulate(SimulateArgs),
    /// CER over ModCod x parameter x Es/N0 grids.
    Sweep(SweepArgs),
    /// Es/N0 at the target CER and its gap from each ModCod's threshold.
    Gap(GapArgs),
    /// Operation counts per decoded candidate.
    Complexity,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Message length; with --target-dmin designs a single standalone code.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub target_dmin: Option<usize>,
    /// Bound target CER used to size each length class.
    #[arg(long)]
    pub design_cer: Option<f64>,
    #[arg(long)]
    pub design_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DecoderArgs {
    #[arg(long, value_enum)]
    pub decoder: Option<DecoderName>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum)]
    pub simple_mode: Option<SimpleModeName>,
    #[arg(long, value_enum)]
    pub noise_var: Option<NoiseVarName>,
    /// Samples per noise variance estimate.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub modcod: Option<u32>,
    /// Es/N0 in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub esn0: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub modcods: Option<Vec<u32>>,
    /// Values of alpha or beta, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub params: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub esn0: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, value_delimiter = ',')]
    pub modcods: Option<Vec<u32>>,
    #[arg(long)]
    pub target_cer: Option<f64>,
    /// Trial cap per search point.
    #[arg(long)]
    pub max_trials: Option<u64>,
    /// Target CER 1e-5 with up to 1e8 trials per point. Takes hours.
    #[arg(long)]
    pub deep: bool,
    #[command(flatten)]
    pub decoder: DecoderArgs,
}

/// Subcommand once its flags are folded into the [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Design,
    Simulate,
    Sweep,
    Gap,
    Complexity,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl DecoderArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.decoder, self.decoder);
        set(&mut c.alpha, self.alpha);
        set(&mut c.beta, self.beta);
        set(&mut c.simple_mode, self.simple_mode);
        set(&mut c.noise_var, self.noise_var);
        set(&mut c.window, self.window);
    }
}

impl Cli {
    /// Effective configuration: defaults, then the config file, then flags.
    pub fn resolve(self) -> Result<(RunConfig, Action, bool)> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_toml(&read(path)?).with_context(|| format!("in {}", path.display()))?,
            None => RunConfig::default(),
        };
        set(&mut c.seed, self.seed);
        c.threads = self.threads.or(c.threads);
        c.out = self.out.or(c.out);
        c.codebook = self.codebook.or(c.codebook);
        c.modcod_table = self.modcod_table.or(c.modcod_table);
        let action = match self.command {
            Command::Design(a) => {
                c.k = a.k.or(c.k);
                c.target_dmin = a.target_dmin.or(c.target_dmin);
                set(&mut c.design_cer, a.design_cer);
                set(&mut c.design_seed, a.design_seed);
                Action::Design
            }
            Command::Simulate(a) => {
                set(&mut c.modcod, a.modcod);
                set(&mut c.esn0, a.esn0);
                set(&mut c.trials, a.trials);
                a.decoder.apply(&mut c);
                Action::Simulate
            }
            Command::Sweep(a) => {
                set(&mut c.modcods, a.modcods);
                set(&mut c.params, a.params);
                set(&mut c.esn0, a.esn0);
                set(&mut c.trials, a.trials);
                a.decoder.apply(&mut c);
                Action::Sweep
            }
            Command::Gap(a) => {
                set(&mut c.modcods, a.modcods);
                set(&mut c.target_cer, a.target_cer);
                set(&mut c.max_trials, a.max_trials);
                c.deep |= a.deep;
                a.decoder.apply(&mut c);
                Action::Gap
            }
            Command::Complexity => Action::Complexity,
        };
        c.validate()?;
        Ok((c, action, self.dump_config))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(c: &RunConfig, contents: &[u8]) -> Result<()> {
    match &c.out {
        Some(path) => write_file(path, contents),
        None => Ok(std::io::stdout().write_all(contents)?),
    }
}

fn load_table(c: &RunConfig) -> Result<ModCodTable> {
    match &c.modcod_table {
        Some(path) => parse_modcod_table(&read(path)?).with_context(|| format!("in {}", path.display())),
        None => Ok(ModCodTable::dvb_s2x_default()),
    }
}

/// Codebook the selected decoder runs on: the file given with `--codebook`,
/// or the design for the table (its fixed-length `L_max` code for the
/// standard decoder).
fn load_codebook(c: &RunConfig, table: &ModCodTable) -> Result<PlhCodebook> {
    let cb = match &c.codebook {
        Some(path) => parse_codebook(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        None => {
            let design = design_variable_length(table, DEFAULT_K, c.design_cer, c.design_seed)?;
            if c.decoder == DecoderName::Standard {
                build_fixed_codebook(table, &design.master)?
            } else {
                build_codebook(table, &design.per_length)?
            }
        }
    };
    for e in cb.entries() {
        table
            .get(e.modcod_id)
            .with_context(|| format!("codebook ModCod {} is missing from the table", e.modcod_id))?;
    }
    Ok(cb)
}

pub fn run(cli: Cli) -> Result<()> {
    let (c, action, dump) = cli.resolve()?;
    if dump {
        print!("{}", c.to_toml());
        return Ok(());
    }
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match action {
        Action::Design => cmd_design(&c),
        Action::Simulate => cmd_simulate(&c),
        Action::Sweep => cmd_sweep(&c),
        Action::Gap => cmd_gap(&c),
        Action::Complexity => cmd_complexity(&c),
    }
}

fn cmd_design(c: &RunConfig) -> Result<()> {
    let Some(dir) = &c.out else {
        bail!("design needs --out <directory>");
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    if let (Some(k), Some(target)) = (c.k, c.target_dmin) {
        let spec = CodeDesignSpec {
            k,
            target_dmin: target,
            max_length: 1 << k.min(20),
            seed: c.design_seed,
        };
        let g = design_code(&spec)?;
        let d = plh_core::code_min_distance(&g.codewords(), DistanceMode::Noncoherent)?;
        write_file(&dir.join("genmatrix.txt"), write_generator_matrix(&g).as_bytes())?;
        println!("k={k} V={} d_min={d} (target {target})", g.v());
        return Ok(());
    }
    let table = load_table(c)?;
    let design = design_variable_length(&table, DEFAULT_K, c.design_cer, c.design_seed)?;
    let cb = build_codebook(&table, &design.per_length)?;
    for (len, g) in &design.per_length {
        write_file(
            &dir.join(format!("genmatrix_L{len}.txt")),
            write_generator_matrix(g).as_bytes(),
        )?;
    }
    write_file(&dir.join("codebook.txt"), write_codebook(&cb).as_bytes())?;
    println!(
        "{:>6} {:>12} {:>6} {:>6} {:>5}",
        "length", "threshold_db", "target", "d_min", "count"
    );
    for class in &design.classes {
        println!(
            "{:>6} {:>12.2} {:>6} {:>6} {:>5}",
            class.length,
            class.threshold_db,
            class.target_dmin,
            class.achieved_dmin,
            cb.counts()[&class.length]
        );
    }
    println!("N={} mean length={:.4}", cb.n(), cb.mean_length());
    Ok(())
}

fn csv_bytes(rows: &[CerRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_results_csv(rows, &mut buf)?;
    Ok(buf)
}

fn cmd_simulate(c: &RunConfig) -> Result<()> {
    let table = load_table(c)?;
    let cb = load_codebook(c, &table)?;
    let sim = Simulator::new(&cb, &table);
    let dec = c.decoder_config();
    let rows = c
        .esn0
        .iter()
        .map(|&esn0| {
            let est = sim.run_cer(c.modcod, &dec, esn0, c.trials, c.seed)?;
            Ok(CerRow::new(c.modcod, &dec, esn0, &est, c.seed))
        })
        .collect::<Result<Vec<_>>>()?;
    emit(c, &csv_bytes(&rows)?)
}

fn cmd_sweep(c: &RunConfig) -> Result<()> {
    let table = load_table(c)?;
    let cb = load_codebook(c, &table)?;
    let rows = Simulator::new(&cb, &table).sweep(&SweepSpec {
        modcod_ids: c.modcods.clone(),
        decoder: c.decoder_config(),
        param_grid: c.params.clone(),
        esn0_grid: c.esn0.clone(),
        trials: c.trials,
        seed: c.seed,
    })?;
    emit(c, &csv_bytes(&rows)?)
}

fn cmd_gap(c: &RunConfig) -> Result<()> {
    let table = load_table(c)?;
    let cb = load_codebook(c, &table)?;
    let sim = Simulator::new(&cb, &table);
    let dec = c.decoder_config();
    let (target, cap) = c.gap_schedule();
    let results = c
        .modcods
        .iter()
        .map(|&id| {
            let window = default_search_window(table.get(id)?.threshold_db);
            let search = GapSearch {
                max_trials: cap,
                initial_trials: 10_000.min(cap),
                ..GapSearch::new(target, window, c.seed)
            };
            let g = measure_gap(&sim, id, &dec, &search).with_context(|| format!("ModCod {id}"))?;
            eprintln!(
                "ModCod {id}: CER {target:e} at {:.2} dB, gap {:+.2} dB",
                g.snr_at_target_db, g.gap_db
            );
            Ok(g)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut json = serde_json::to_string_pretty(&results)?;
    json.push('\n');
    emit(c, json.as_bytes())
}

fn cmd_complexity(c: &RunConfig) -> Result<()> {
    let table = load_table(c)?;
    let cb = match &c.codebook {
        Some(_) => load_codebook(c, &table)?,
        None => {
            let design = design_variable_length(&table, DEFAULT_K, c.design_cer, c.design_seed)?;
            build_codebook(&table, &design.per_length)?
        }
    };
    let report = complexity_report(&cb);
    print!("{report}");
    if let Some(path) = &c.out {
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}
