//! Pipeline configuration: a flat TOML file with one table per concern and
//! one `[[channel]]` table per nonzero-μ input, optionally overridden from
//! the command line.
//!
//! ```toml
//! seed = 7
//! theoretical = false
//!
//! [simulation]
//! samples = 100000
//! records = 100
//!
//! [[channel]]
//! mu = 0.178
//!
//! [[channel]]
//! mu = 0.436
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use prcs_core::calibration::{DEFAULT_BINS, DEFAULT_RANGE_SIGMAS};
use prcs_core::quantum_math::TruncationPolicy;
use prcs_core::synth::SimulationConfig;
use prcs_core::UniformGrid;

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub samples: usize,
    pub records: usize,
    pub noise: f64,
    pub gain: f64,
    pub phase_periods: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let d = SimulationConfig::default();
        Self {
            samples: d.n_samples_per_record,
            records: d.n_records,
            noise: d.electronic_noise_sigma,
            gain: d.gain,
            phase_periods: d.phase_periods,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BinningSection {
    pub bins: usize,
    pub range_sigmas: f64,
}

impl Default for BinningSection {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            range_sigmas: DEFAULT_RANGE_SIGMAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSection {
    pub tail_tolerance: f64,
    pub k_min_cap: usize,
}

impl Default for TruncationSection {
    fn default() -> Self {
        let d = TruncationPolicy::default();
        Self {
            tail_tolerance: d.tail_tolerance,
            k_min_cap: d.k_min_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Theoretical-mode quadrature grid `[−x_half_width, x_half_width]`.
    pub x_half_width: f64,
    pub x_step: f64,
    /// Radial Wigner grid `[0, r_max]`.
    pub r_max: f64,
    pub r_step: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            x_half_width: 6.0,
            x_step: 0.01,
            r_max: 6.0,
            r_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VacuumSection {
    /// Record files (or directories of them); simulated when empty.
    #[serde(default)]
    pub records: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Target mean photon number. Required unless `records` is given.
    pub mu: Option<f64>,
    /// 1σ on `mu`, used in theoretical mode.
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub records: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub theoretical: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub binning: BinningSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub vacuum: VacuumSection,
    #[serde(default, rename = "channel")]
    pub channels: Vec<ChannelSection>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            theoretical: false,
            out: default_out(),
            simulation: SimulationSection::default(),
            binning: BinningSection::default(),
            truncation: TruncationSection::default(),
            grid: GridSection::default(),
            vacuum: VacuumSection::default(),
            channels: Vec::new(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub theoretical: bool,
    pub mu: Option<Vec<f64>>,
    pub records: Option<usize>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub noise: Option<f64>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Reads a config file; relative record paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.vacuum.records.iter_mut().for_each(resolve);
        for ch in cfg.channels.iter_mut() {
            ch.records.iter_mut().for_each(resolve);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if o.theoretical {
            self.theoretical = true;
        }
        if let Some(mus) = &o.mu {
            self.channels = mus
                .iter()
                .map(|&mu| ChannelSection {
                    mu: Some(mu),
                    sigma: 0.0,
                    records: Vec::new(),
                })
                .collect();
        }
        if let Some(r) = o.records {
            self.simulation.records = r;
        }
        if let Some(s) = o.samples {
            self.simulation.samples = s;
        }
        if let Some(b) = o.bins {
            self.binning.bins = b;
        }
        if let Some(n) = o.noise {
            self.simulation.noise = n;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(PipelineError::Config(msg));
        if self.channels.is_empty() {
            return err("at least one nonzero-μ [[channel]] is required besides the vacuum".into());
        }
        for (i, ch) in self.channels.iter().enumerate() {
            let n = i + 1;
            match ch.mu {
                Some(mu) if !(mu > 0.0 && mu.is_finite()) => {
                    return err(format!(
                        "channel {n}: field 'mu' must be positive, got {mu}"
                    ));
                }
                None if self.theoretical => {
                    return err(format!(
                        "channel {n}: field 'mu' is required in theoretical mode"
                    ));
                }
                None if ch.records.is_empty() => {
                    return err(format!("channel {n}: needs field 'mu' or field 'records'"));
                }
                _ => {}
            }
            if !(ch.sigma >= 0.0 && ch.sigma.is_finite()) {
                return err(format!("channel {n}: field 'sigma' must be ≥ 0"));
            }
        }
        if self.binning.bins < 2 {
            return err(format!(
                "field 'bins' must be at least 2, got {}",
                self.binning.bins
            ));
        }
        if !(self.binning.range_sigmas > 0.0) {
            return err("field 'range_sigmas' must be positive".into());
        }
        if self.simulation.samples == 0 || self.simulation.records == 0 {
            return err("fields 'samples' and 'records' must be positive".into());
        }
        self.policy()?;
        self.x_grid()?;
        self.r_grid()?;
        self.simulation_config(0.0, 0)
            .validate()
            .map_err(|e| PipelineError::Config(format!("[simulation]: {e}")))?;
        Ok(())
    }

    pub fn policy(&self) -> Result<TruncationPolicy> {
        TruncationPolicy::new(self.truncation.tail_tolerance, self.truncation.k_min_cap)
            .map_err(|e| PipelineError::Config(format!("[truncation]: {e}")))
    }

    pub fn x_grid(&self) -> Result<UniformGrid> {
        UniformGrid::symmetric(self.grid.x_half_width, self.grid.x_step)
            .map_err(|e| PipelineError::Config(format!("[grid] x: {e}")))
    }

    pub fn r_grid(&self) -> Result<UniformGrid> {
        UniformGrid::spanning(0.0, self.grid.r_max, self.grid.r_step)
            .map_err(|e| PipelineError::Config(format!("[grid] r: {e}")))
    }

    /// Simulation settings of channel `index` (0 is the vacuum). Each
    /// channel gets its own seed so record streams never coincide.
    pub fn simulation_config(&self, mu: f64, index: usize) -> SimulationConfig {
        SimulationConfig {
            mu_true: mu,
            n_samples_per_record: self.simulation.samples,
            n_records: self.simulation.records,
            electronic_noise_sigma: self.simulation.noise,
            phase_periods: self.simulation.phase_periods,
            gain: self.simulation.gain,
            rng_seed: self
                .seed
                .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        }
    }
}
