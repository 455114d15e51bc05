//! Synthetic balanced-homodyne records of phase-randomized coherent states.
//!
//! A coherent state at fixed phase `φ` has a Gaussian quadrature of variance
//! 1/4 centred at `√μ cos φ`; averaging over `φ` reproduces the Poisson
//! mixture of Fock-state densities exactly. The phase is swept by a
//! triangular ramp as in a piezo-driven interferometer.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{Header, Table};

/// Standard deviation of vacuum quadrature noise.
pub const VACUUM_SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub mu_true: f64,
    pub n_samples_per_record: usize,
    pub n_records: usize,
    /// Extra Gaussian detector noise, in quadrature units.
    pub electronic_noise_sigma: f64,
    /// Number of 2π intervals swept per ramp; non-integer values model
    /// imperfect phase randomization.
    pub phase_periods: f64,
    /// Detector output per quadrature unit.
    pub gain: f64,
    pub rng_seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            mu_true: 0.0,
            n_samples_per_record: 100_000,
            n_records: 100,
            electronic_noise_sigma: 0.0,
            phase_periods: 1.0,
            gain: 3.7,
            rng_seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_true >= 0.0 && self.mu_true.is_finite()) {
            return Err(Error::domain(format!(
                "mu_true must be ≥ 0, got {}",
                self.mu_true
            )));
        }
        if self.n_samples_per_record == 0 || self.n_records == 0 {
            return Err(Error::domain(
                "need at least one record of at least one sample",
            ));
        }
        if !(self.electronic_noise_sigma >= 0.0 && self.electronic_noise_sigma.is_finite()) {
            return Err(Error::domain("electronic noise sigma must be ≥ 0"));
        }
        if !(self.phase_periods > 0.0 && self.phase_periods.is_finite()) {
            return Err(Error::domain("phase_periods must be > 0"));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::domain("detector gain must be > 0"));
        }
        Ok(())
    }

    pub fn total_samples(&self) -> usize {
        self.n_samples_per_record * self.n_records
    }
}

/// One acquisition record of detector outputs (gain applied).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub samples: Vec<f64>,
    pub record_index: usize,
    pub config_echo: SimulationConfig,
}

/// One homodyne outcome `√μ cos φ + g`, `g ~ N(0, 1/4)`.
pub fn sample_prcs_quadrature<R: Rng + ?Sized>(mu: f64, phase: f64, rng: &mut R) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!(
            "mean photon number must be ≥ 0, got {mu}"
        )));
    }
    Ok(draw(mu.sqrt(), phase, rng))
}

#[inline]
fn draw<R: Rng + ?Sized>(amplitude: f64, phase: f64, rng: &mut R) -> f64 {
    let g: f64 = rng.sample(StandardNormal);
    amplitude * phase.cos() + VACUUM_SIGMA * g
}

/// Triangular ramp `0 → 1 → 0` over `t ∈ [0, 1)`.
pub fn triangular_ramp(t: f64) -> f64 {
    1.0 - (2.0 * t - 1.0).abs()
}

/// Ramp phase of sample `i` out of `n`.
pub fn ramp_phase(i: usize, n: usize, phase_periods: f64) -> f64 {
    2.0 * PI * phase_periods * triangular_ramp(i as f64 / n as f64)
}

fn record_rng(seed: u64, record_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ record_index as u64)
}

fn generate_record(config: &SimulationConfig, record_index: usize) -> SampleRecord {
    let mut rng = record_rng(config.rng_seed, record_index);
    let n = config.n_samples_per_record;
    let amplitude = config.mu_true.sqrt();
    let noise = config.electronic_noise_sigma;
    let samples = (0..n)
        .map(|i| {
            let mut x = draw(amplitude, ramp_phase(i, n, config.phase_periods), &mut rng);
            if noise > 0.0 {
                let e: f64 = rng.sample(StandardNormal);
                x += noise * e;
            }
            config.gain * x
        })
        .collect();
    SampleRecord {
        samples,
        record_index,
        config_echo: config.clone(),
    }
}

/// All records of a configuration, generated in parallel with one RNG
/// stream per record (`seed ⊕ record_index`).
pub fn generate_records(config: &SimulationConfig) -> Result<Vec<SampleRecord>> {
    config.validate()?;
    Ok((0..config.n_records)
        .into_par_iter()
        .map(|i| generate_record(config, i))
        .collect())
}

fn record_header(record: &SampleRecord) -> Header {
    let c = &record.config_echo;
    let mut h = Header::new();
    h.set("mu_true", c.mu_true)
        .set("gain", c.gain)
        .set("seed", c.rng_seed)
        .set("n_samples", c.n_samples_per_record)
        .set("n_records", c.n_records)
        .set("record_index", record.record_index)
        .set("noise_sigma", c.electronic_noise_sigma)
        .set("phase_periods", c.phase_periods);
    h
}

/// Writes one record as text with 17 significant digits per sample.
pub fn write_record(record: &SampleRecord, path: &Path) -> Result<()> {
    let mut table = Table::new(record_header(record), &["sample"]);
    table.rows = record.samples.iter().map(|&s| vec![s]).collect();
    let text = table.render_with(|out, v| {
        use std::fmt::Write;
        write!(out, "{v:.16e}")
    });
    crate::io::write_text(path, &text)
}

pub fn read_record(path: &Path) -> Result<SampleRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table = Table::parse(&text, path)?;
    let h = &table.header;
    let config_echo = SimulationConfig {
        mu_true: h.require("mu_true", path)?,
        n_samples_per_record: h.require("n_samples", path)?,
        n_records: h.optional("n_records", path)?.unwrap_or(1),
        electronic_noise_sigma: h.require("noise_sigma", path)?,
        phase_periods: h.optional("phase_periods", path)?.unwrap_or(1.0),
        gain: h.require("gain", path)?,
        rng_seed: h.require("seed", path)?,
    };
    config_echo
        .validate()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let record_index: usize = h.require("record_index", path)?;
    if record_index >= config_echo.n_records {
        return Err(Error::Validation(format!(
            "{}: record_index {record_index} not below n_records {}",
            path.display(),
            config_echo.n_records
        )));
    }
    if table.rows.len() != config_echo.n_samples_per_record {
        return Err(Error::parse(
            path,
            text.lines().count() + 1,
            format!(
                "expected {} samples, found {} (truncated file?)",
                config_echo.n_samples_per_record,
                table.rows.len()
            ),
        ));
    }
    Ok(SampleRecord {
        samples: table.rows.into_iter().map(|r| r[0]).collect(),
        record_index,
        config_echo,
    })
}

/// File name of record `index` under a channel stem, e.g. `ch1_rec0003.txt`.
pub fn record_file_name(stem: &str, index: usize) -> String {
    format!("{stem}_rec{index:04}.txt")
}

/// Writes each record to `dir/<stem>_recNNNN.txt` and returns the paths.
pub fn write_records(records: &[SampleRecord], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    records
        .iter()
        .map(|r| {
            let path = dir.join(record_file_name(stem, r.record_index));
            write_record(r, &path).map(|_| path)
        })
        .collect()
}

pub fn read_records(paths: &[PathBuf]) -> Result<Vec<SampleRecord>> {
    paths.iter().map(|p| read_record(p)).collect()
}
