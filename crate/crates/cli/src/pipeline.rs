//! Pipeline stages. Each stage reads the previous stage's files from the
//! output directory and writes its own, so stages can run one at a time or
//! all at once through [`run`] with identical results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;

use prcs_core::calibration::{
    self, calibrate as calibrate_histograms, histogram_records, read_calibrated, shared_range,
    write_calibrated, CalibratedHistogram,
};
use prcs_core::decoy::{decoy_weights, estimate_y1_with_errors, MeanPhotonSet, QuadratureCurve};
use prcs_core::io::{Header, Table};
use prcs_core::quantum_math::{prcs_marginal, single_photon_marginal, single_photon_wigner};
use prcs_core::reconstruct::{quality_metrics, reconstruct_density_matrix, reconstruct_wigner};
use prcs_core::synth::{
    generate_records, read_records, record_file_name, write_records, SampleRecord,
};

use crate::config::PipelineConfig;
use crate::error::{io_error, PipelineError, Result};

/// File locations inside the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn records_dir(&self) -> PathBuf {
        self.root.join("records")
    }

    /// Channel 0 is the vacuum.
    pub fn channel_stem(channel: usize) -> String {
        format!("ch{channel:02}")
    }

    pub fn record(&self, channel: usize, index: usize) -> PathBuf {
        self.records_dir()
            .join(record_file_name(&Self::channel_stem(channel), index))
    }

    pub fn calibrated(&self, channel: usize) -> PathBuf {
        self.root
            .join("calibrated")
            .join(format!("{}.csv", Self::channel_stem(channel)))
    }

    pub fn mu_fit(&self) -> PathBuf {
        self.root.join("mu_fit.csv")
    }

    pub fn y1(&self, l: usize) -> PathBuf {
        self.root.join("estimate").join(format!("y1_L{l}.csv"))
    }

    pub fn wigner(&self, l: usize) -> PathBuf {
        self.root
            .join("reconstruct")
            .join(format!("wigner_L{l}.csv"))
    }

    pub fn rho(&self, l: usize) -> PathBuf {
        self.root.join("reconstruct").join(format!("rho_L{l}.csv"))
    }

    pub fn metrics(&self) -> PathBuf {
        self.root.join("reconstruct").join("metrics.csv")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.txt")
    }

    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.csv")
    }

    pub fn plot(&self, name: &str) -> PathBuf {
        self.root.join("plots").join(name)
    }
}

fn mode_name(theoretical: bool) -> &'static str {
    if theoretical {
        "theoretical"
    } else {
        "statistical"
    }
}

fn require_input(path: &Path, stage: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingInput {
            path: path.to_path_buf(),
            stage,
        })
    }
}

fn read_table(path: &Path, stage: &'static str) -> Result<Table> {
    require_input(path, stage)?;
    Ok(Table::read(path)?)
}

/// One input channel: index 0 is the vacuum.
struct ChannelSpec {
    index: usize,
    mu_target: Option<f64>,
    records: Vec<PathBuf>,
}

fn channel_specs(cfg: &PipelineConfig) -> Vec<ChannelSpec> {
    std::iter::once(ChannelSpec {
        index: 0,
        mu_target: Some(0.0),
        records: cfg.vacuum.records.clone(),
    })
    .chain(cfg.channels.iter().enumerate().map(|(i, ch)| ChannelSpec {
        index: i + 1,
        mu_target: ch.mu,
        records: ch.records.clone(),
    }))
    .collect()
}

/// Expands directories into their `.txt` files, sorted by name.
fn expand_record_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| io_error(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "txt"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(PipelineError::Config(format!(
                    "record directory {} holds no .txt files",
                    p.display()
                )));
            }
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load_records(
    cfg: &PipelineConfig,
    layout: &Layout,
    spec: &ChannelSpec,
) -> Result<Vec<SampleRecord>> {
    let paths = if spec.records.is_empty() {
        let paths: Vec<PathBuf> = (0..cfg.simulation.records)
            .map(|i| layout.record(spec.index, i))
            .collect();
        for p in &paths {
            require_input(p, "simulate")?;
        }
        paths
    } else {
        expand_record_paths(&spec.records)?
    };
    Ok(read_records(&paths)?)
}

/// Generates record files for every channel without user-supplied records.
pub fn simulate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.theoretical {
        info!("theoretical mode: simulate skipped");
        return Ok(Vec::new());
    }
    let layout = Layout::new(&cfg.out);
    let mut written = Vec::new();
    for spec in channel_specs(cfg) {
        if !spec.records.is_empty() {
            continue;
        }
        let mu = spec.mu_target.unwrap_or(0.0);
        let records = generate_records(&cfg.simulation_config(mu, spec.index))?;
        let stem = Layout::channel_stem(spec.index);
        written.extend(write_records(&records, &layout.records_dir(), &stem)?);
        info!(
            "simulate: channel {} (μ = {mu}), {} records",
            spec.index,
            records.len()
        );
    }
    Ok(written)
}

/// Histograms every channel on a shared binning and calibrates the axes
/// against the vacuum.
pub fn calibrate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.theoretical {
        info!("theoretical mode: calibrate skipped");
        return Ok(Vec::new());
    }
    let layout = Layout::new(&cfg.out);
    let channels = channel_specs(cfg)
        .iter()
        .map(|spec| load_records(cfg, &layout, spec))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[SampleRecord]> = channels.iter().map(Vec::as_slice).collect();
    let (lo, hi) = shared_range(&refs, cfg.binning.range_sigmas)?;
    let raws = channels
        .iter()
        .map(|r| histogram_records(r, cfg.binning.bins, lo, hi))
        .collect::<prcs_core::Result<Vec<_>>>()?;
    let calibrated = calibrate_histograms(&raws[0], &raws[1..])?;
    let mut written = Vec::new();
    for (i, h) in calibrated.iter().enumerate() {
        let path = layout.calibrated(i);
        write_calibrated(h, None, &path)?;
        written.push(path);
    }
    info!(
        "calibrate: {} channels, {} bins on [{lo:.4}, {hi:.4}] raw units",
        calibrated.len(),
        cfg.binning.bins
    );
    Ok(written)
}

/// One row of the μ-fit summary.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub channel: usize,
    /// NaN when the channel came from records without a target.
    pub mu_target: f64,
    pub mu_hat: f64,
    pub sigma_fit: f64,
    pub sigma_calibration: f64,
    pub fit_residual: f64,
    /// Zero in theoretical mode.
    pub n_samples: u64,
}

impl FitRow {
    pub fn sigma_total(&self) -> f64 {
        self.sigma_fit.hypot(self.sigma_calibration)
    }
}

const FIT_COLUMNS: [&str; 8] = [
    "channel",
    "mu_target",
    "mu_hat",
    "sigma_fit",
    "sigma_calibration",
    "sigma_total",
    "fit_residual",
    "n_samples",
];

/// Fits μ to every calibrated histogram (statistical mode) or records the
/// configured values (theoretical mode), and writes the μ-fit summary.
pub fn fit_mu(cfg: &PipelineConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out);
    let specs = channel_specs(cfg);
    let rows: Vec<FitRow> = if cfg.theoretical {
        specs
            .iter()
            .map(|s| FitRow {
                channel: s.index,
                mu_target: s.mu_target.unwrap_or(f64::NAN),
                mu_hat: s.mu_target.unwrap_or(f64::NAN),
                sigma_fit: if s.index == 0 {
                    0.0
                } else {
                    cfg.channels[s.index - 1].sigma
                },
                sigma_calibration: 0.0,
                fit_residual: 0.0,
                n_samples: 0,
            })
            .collect()
    } else {
        let policy = cfg.policy()?;
        let mut hists = Vec::with_capacity(specs.len());
        for s in &specs {
            let path = layout.calibrated(s.index);
            require_input(&path, "calibrate")?;
            hists.push(read_calibrated(&path)?.0);
        }
        let n_vacuum = hists[0].n_samples;
        let mut rows = Vec::with_capacity(specs.len());
        for (s, h) in specs.iter().zip(&hists) {
            let fit = calibration::fit_mu(h, &policy)?.with_calibration(n_vacuum);
            write_calibrated(h, Some(&fit), &layout.calibrated(s.index))?;
            info!(
                "fit-mu: channel {} μ̂ = {:.6} ± {:.2e}",
                s.index,
                fit.mu,
                fit.total_sigma()
            );
            rows.push(FitRow {
                channel: s.index,
                mu_target: s.mu_target.unwrap_or(f64::NAN),
                mu_hat: fit.mu,
                sigma_fit: fit.sigma,
                sigma_calibration: fit.sigma_calibration,
                fit_residual: fit.fit_residual,
                n_samples: h.n_samples,
            });
        }
        rows
    };

    let mut header = Header::new();
    header
        .set("mode", mode_name(cfg.theoretical))
        .set("seed", cfg.seed)
        .set("n_channels", rows.len());
    let mut table = Table::new(header, &FIT_COLUMNS);
    table.rows = rows
        .iter()
        .map(|r| {
            vec![
                r.channel as f64,
                r.mu_target,
                r.mu_hat,
                r.sigma_fit,
                r.sigma_calibration,
                r.sigma_total(),
                r.fit_residual,
                r.n_samples as f64,
            ]
        })
        .collect();
    let path = layout.mu_fit();
    table.write(&path)?;
    Ok(path)
}

/// Reads the μ-fit summary, checking it was produced in the configured mode.
pub fn read_fits(cfg: &PipelineConfig) -> Result<Vec<FitRow>> {
    let path = Layout::new(&cfg.out).mu_fit();
    let t = read_table(&path, "fit-mu")?;
    let mode: String = t.header.require("mode", &path)?;
    if mode != mode_name(cfg.theoretical) {
        return Err(PipelineError::Config(format!(
            "{} was written in {mode} mode; rerun fit-mu in {} mode",
            path.display(),
            mode_name(cfg.theoretical)
        )));
    }
    let col = |name: &str| t.require_column(name, &path);
    let (channel, mu_target, mu_hat) = (col("channel")?, col("mu_target")?, col("mu_hat")?);
    let (sigma_fit, sigma_cal) = (col("sigma_fit")?, col("sigma_calibration")?);
    let (residual, n) = (col("fit_residual")?, col("n_samples")?);
    let rows: Vec<FitRow> = (0..t.rows.len())
        .map(|i| FitRow {
            channel: channel[i] as usize,
            mu_target: mu_target[i],
            mu_hat: mu_hat[i],
            sigma_fit: sigma_fit[i],
            sigma_calibration: sigma_cal[i],
            fit_residual: residual[i],
            n_samples: n[i] as u64,
        })
        .collect();
    if rows.len() != cfg.channels.len() + 1 || rows.iter().enumerate().any(|(i, r)| r.channel != i)
    {
        return Err(PipelineError::Config(format!(
            "{} does not match the configured channels; rerun fit-mu",
            path.display()
        )));
    }
    Ok(rows)
}

/// Nonzero-μ channel indices in ascending μ̂ order, and the matching set.
pub fn ordered_set(rows: &[FitRow]) -> Result<(Vec<usize>, MeanPhotonSet)> {
    let mut order: Vec<usize> = (1..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].mu_hat.total_cmp(&rows[b].mu_hat));
    let mus = order.iter().map(|&i| rows[i].mu_hat).collect();
    let sigmas = order.iter().map(|&i| rows[i].sigma_total()).collect();
    Ok((order, MeanPhotonSet::new(mus, sigmas)?))
}

fn mu_header(header: &mut Header, set: &MeanPhotonSet) {
    for (j, (mu, s)) in set.mus().iter().zip(set.sigmas()).enumerate() {
        header.set(&format!("mu_{}", j + 1), mu);
        header.set(&format!("sigma_mu_{}", j + 1), s);
    }
}

fn write_y1<C: QuadratureCurve>(
    path: &Path,
    cfg: &PipelineConfig,
    set: &MeanPhotonSet,
    vacuum: &C,
    curves: &[&C],
    counts: Option<&[u64]>,
) -> Result<()> {
    let weights = decoy_weights(set)?;
    let est = estimate_y1_with_errors(&weights, vacuum, curves, counts)?;
    let mut header = Header::new();
    header
        .set("mode", mode_name(cfg.theoretical))
        .set("L", set.len());
    mu_header(&mut header, set);
    for (i, l) in weights.lambda.iter().enumerate() {
        header.set(&format!("lambda_{i}"), l);
    }
    header.set("integral", est.integral());
    let mut t = Table::new(header, &["x", "y1_est", "sigma", "y1_exact"]);
    t.rows = est
        .grid
        .points()
        .zip(est.values.iter().zip(&est.sigma_values))
        .map(|(x, (y, s))| vec![x, *y, *s, single_photon_marginal(x)])
        .collect();
    t.write(path)?;
    Ok(())
}

/// Writes `Y₁^est` with error bars for every prefix `L = 1..` of the
/// μ-ordered channel set.
pub fn estimate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out);
    let rows = read_fits(cfg)?;
    let (order, set) = ordered_set(&rows)?;
    let mut written = Vec::new();
    if cfg.theoretical {
        let grid = cfg.x_grid()?;
        let policy = cfg.policy()?;
        let vacuum = prcs_marginal(0.0, &grid, &policy)?;
        let curves = set
            .mus()
            .iter()
            .map(|&mu| prcs_marginal(mu, &grid, &policy))
            .collect::<prcs_core::Result<Vec<_>>>()?;
        for l in 1..=set.len() {
            let refs: Vec<_> = curves[..l].iter().collect();
            let path = layout.y1(l);
            write_y1(&path, cfg, &set.prefix(l)?, &vacuum, &refs, None)?;
            written.push(path);
        }
    } else {
        let load = |ch: usize| -> Result<CalibratedHistogram> {
            let path = layout.calibrated(ch);
            require_input(&path, "calibrate")?;
            Ok(read_calibrated(&path)?.0)
        };
        let vacuum = load(0)?;
        let curves = order
            .iter()
            .map(|&ch| load(ch))
            .collect::<Result<Vec<_>>>()?;
        for l in 1..=set.len() {
            let refs: Vec<_> = curves[..l].iter().collect();
            let counts: Vec<u64> = std::iter::once(&vacuum)
                .chain(refs.iter().copied())
                .map(|h| h.n_samples)
                .collect();
            let path = layout.y1(l);
            write_y1(&path, cfg, &set.prefix(l)?, &vacuum, &refs, Some(&counts))?;
            written.push(path);
        }
    }
    info!("estimate: {} prefixes", set.len());
    Ok(written)
}

/// Metrics of one reconstruction, as stored in the metrics file.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub l: usize,
    pub trace: f64,
    pub distance: f64,
    pub min_eigenvalue: f64,
    pub negative_eigenvalue: bool,
    pub k_max: usize,
}

/// Writes the Wigner profile, density-matrix diagonal and quality metrics
/// for every prefix `L`.
pub fn reconstruct(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out);
    let rows = read_fits(cfg)?;
    let (_, set) = ordered_set(&rows)?;
    let r_grid = cfg.r_grid()?;
    let policy = cfg.policy()?;
    let mut written = Vec::new();
    let mut metrics = Vec::new();
    for l in 1..=set.len() {
        let sub = set.prefix(l)?;
        let weights = decoy_weights(&sub)?;
        let mut header = Header::new();
        header.set("mode", mode_name(cfg.theoretical)).set("L", l);
        mu_header(&mut header, &sub);

        let w = reconstruct_wigner(&weights, &r_grid)?;
        let mut t = Table::new(header.clone(), &["r", "w_est", "w_exact"]);
        t.rows = r_grid
            .points()
            .zip(&w.values)
            .map(|(r, v)| vec![r, *v, single_photon_wigner(r)])
            .collect();
        t.header.set("normalization", w.normalization());
        t.write(&layout.wigner(l))?;
        written.push(layout.wigner(l));

        let rho = reconstruct_density_matrix(&weights, &policy)?;
        let report = quality_metrics(&rho);
        let mut t = Table::new(header, &["k", "rho_est", "rho_single_photon"]);
        t.rows = rho
            .diag
            .iter()
            .enumerate()
            .map(|(k, d)| vec![k as f64, *d, if k == 1 { 1.0 } else { 0.0 }])
            .collect();
        t.write(&layout.rho(l))?;
        written.push(layout.rho(l));

        metrics.push(MetricsRow {
            l,
            trace: report.trace,
            distance: report.distance_to_single_photon,
            min_eigenvalue: report.min_eigenvalue,
            negative_eigenvalue: report.has_negative_eigenvalue,
            k_max: report.k_max,
        });
    }
    let mut header = Header::new();
    header.set("mode", mode_name(cfg.theoretical));
    mu_header(&mut header, &set);
    let mut t = Table::new(
        header,
        &[
            "L",
            "trace",
            "distance",
            "min_eigenvalue",
            "negative_eigenvalue",
            "k_max",
        ],
    );
    t.rows = metrics
        .iter()
        .map(|m| {
            vec![
                m.l as f64,
                m.trace,
                m.distance,
                m.min_eigenvalue,
                if m.negative_eigenvalue { 1.0 } else { 0.0 },
                m.k_max as f64,
            ]
        })
        .collect();
    t.write(&layout.metrics())?;
    written.push(layout.metrics());
    info!("reconstruct: {} prefixes", set.len());
    Ok(written)
}

pub fn read_metrics(cfg: &PipelineConfig) -> Result<Vec<MetricsRow>> {
    let path = Layout::new(&cfg.out).metrics();
    let t = read_table(&path, "reconstruct")?;
    let col = |name: &str| t.require_column(name, &path);
    let (l, trace, dist) = (col("L")?, col("trace")?, col("distance")?);
    let (min, neg, k) = (
        col("min_eigenvalue")?,
        col("negative_eigenvalue")?,
        col("k_max")?,
    );
    Ok((0..t.rows.len())
        .map(|i| MetricsRow {
            l: l[i] as usize,
            trace: trace[i],
            distance: dist[i],
            min_eigenvalue: min[i],
            negative_eigenvalue: neg[i] != 0.0,
            k_max: k[i] as usize,
        })
        .collect())
}

/// Aggregates the stage outputs into `report.txt` and `summary.csv`, then
/// writes the plot data.
pub fn report(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out);
    let fits = read_fits(cfg)?;
    let metrics = read_metrics(cfg)?;
    let (order, set) = ordered_set(&fits)?;

    // Y₁ agreement per prefix: (∫Y₁^est, max |Y₁^est − Y₁|, fraction of
    // points whose error bar covers Y₁).
    let mut y1_stats = Vec::new();
    for m in &metrics {
        let path = layout.y1(m.l);
        let t = read_table(&path, "estimate")?;
        let est = t.require_column("y1_est", &path)?;
        let sigma = t.require_column("sigma", &path)?;
        let exact = t.require_column("y1_exact", &path)?;
        let integral: f64 = t.header.require("integral", &path)?;
        let max_dev = est
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let covered = est
            .iter()
            .zip(&sigma)
            .zip(&exact)
            .filter(|((e, s), x)| (*e - *x).abs() <= **s)
            .count() as f64
            / est.len().max(1) as f64;
        y1_stats.push((integral, max_dev, covered));
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "Single-photon reconstruction from phase-randomized coherent states"
    );
    let _ = writeln!(text, "mode: {}", mode_name(cfg.theoretical));
    if !cfg.theoretical {
        let _ = writeln!(text, "seed: {}", cfg.seed);
    }
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>7}  {:>10}  {:>12}  {:>10}  {:>10}",
        "channel", "mu_target", "mu_hat", "sigma_mu", "samples"
    );
    for r in &fits {
        let _ = writeln!(
            text,
            "{:>7}  {:>10}  {:>12.6}  {:>10.3e}  {:>10}",
            r.channel,
            if r.mu_target.is_nan() {
                "-".to_string()
            } else {
                format!("{}", r.mu_target)
            },
            r.mu_hat,
            r.sigma_total(),
            r.n_samples
        );
    }
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>2}  {:<24}  {:>9}  {:>11}  {:>19}  {:>14}",
        "L", "mu set", "trace", "distance", "negative eigenvalue", "min eigenvalue"
    );
    for m in &metrics {
        let mus: Vec<String> = set.mus()[..m.l]
            .iter()
            .map(|mu| format!("{mu:.4}"))
            .collect();
        let _ = writeln!(
            text,
            "{:>2}  {:<24}  {:>9.5}  {:>11.4e}  {:>19}  {:>14.3e}",
            m.l,
            mus.join(", "),
            m.trace,
            m.distance,
            if m.negative_eigenvalue { "Yes" } else { "No" },
            m.min_eigenvalue
        );
    }
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "{:>2}  {:>12}  {:>16}  {:>14}",
        "L", "int Y1_est", "max |Y1_est-Y1|", "1-sigma cover"
    );
    for (m, (integral, max_dev, covered)) in metrics.iter().zip(&y1_stats) {
        let _ = writeln!(
            text,
            "{:>2}  {:>12.6}  {:>16.4e}  {:>13.1}%",
            m.l,
            integral,
            max_dev,
            100.0 * covered
        );
    }
    let report_path = layout.report();
    std::fs::write(&report_path, text).map_err(|e| io_error(&report_path, e))?;

    let mut header = Header::new();
    header
        .set("mode", mode_name(cfg.theoretical))
        .set("seed", cfg.seed)
        .set("n_channels", fits.len());
    for (j, &ch) in order.iter().enumerate() {
        header.set(&format!("channel_{}", j + 1), ch);
    }
    mu_header(&mut header, &set);
    for m in &metrics {
        header
            .set(&format!("trace_L{}", m.l), m.trace)
            .set(&format!("distance_L{}", m.l), m.distance)
            .set(
                &format!("negative_eigenvalue_L{}", m.l),
                if m.negative_eigenvalue { "yes" } else { "no" },
            );
    }
    let mut t = Table::new(
        header,
        &[
            "L",
            "trace",
            "distance",
            "min_eigenvalue",
            "negative_eigenvalue",
            "y1_integral",
            "y1_max_deviation",
            "y1_coverage",
        ],
    );
    t.rows = metrics
        .iter()
        .zip(&y1_stats)
        .map(|(m, (integral, max_dev, covered))| {
            vec![
                m.l as f64,
                m.trace,
                m.distance,
                m.min_eigenvalue,
                if m.negative_eigenvalue { 1.0 } else { 0.0 },
                *integral,
                *max_dev,
                *covered,
            ]
        })
        .collect();
    t.write(&layout.summary())?;

    let mut written = vec![report_path, layout.summary()];
    written.extend(crate::plots::emit_plot_data(cfg)?);
    info!("report: {}", layout.report().display());
    Ok(written)
}

/// All stages in order.
pub fn run(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let mut written = simulate(cfg)?;
    written.extend(calibrate(cfg)?);
    written.push(fit_mu(cfg)?);
    written.extend(estimate(cfg)?);
    written.extend(reconstruct(cfg)?);
    written.extend(report(cfg)?);
    Ok(written)
}
