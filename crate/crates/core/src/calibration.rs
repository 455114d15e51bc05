//! Histogramming, axis calibration against the vacuum, and least-squares
//! fitting of the mean photon number.

use std::path::Path;

use rayon::prelude::*;

use crate::decoy::QuadratureCurve;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::io::{Header, Table};
use crate::minimize::brent_minimize;
use crate::quantum_math::{fock_quadrature_densities_into, poisson_weights, TruncationPolicy};
use crate::synth::SampleRecord;

pub const DEFAULT_BINS: usize = 201;
/// Half-width of the default histogram range in units of the widest
/// channel's standard deviation.
pub const DEFAULT_RANGE_SIGMAS: f64 = 4.0;
pub const FIT_MAX_ITER: usize = 200;
pub const FIT_REL_TOL: f64 = 1e-8;

/// Counts on `n_bins` equal bins over `[lo, hi]`. The last bin is closed on
/// the right.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHistogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub out_of_range: u64,
}

impl RawHistogram {
    pub fn empty(n_bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::domain(format!("need at least 2 bins, got {n_bins}")));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "invalid histogram range [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; n_bins],
            out_of_range: 0,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.bin_width()
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, x: f64) {
        if !(x >= self.lo && x <= self.hi) {
            self.out_of_range += 1;
            return;
        }
        let n = self.n_bins();
        let idx = (((x - self.lo) / self.bin_width()) as usize).min(n - 1);
        self.counts[idx] += 1;
    }

    pub fn same_binning(&self, other: &RawHistogram) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.n_bins() == other.n_bins()
    }

    /// Adds the counts of `other`, which must share this binning.
    pub fn merge(mut self, other: &RawHistogram) -> Result<Self> {
        if !self.same_binning(other) {
            return Err(Error::Alignment(
                "cannot merge histograms with different binning".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.out_of_range += other.out_of_range;
        Ok(self)
    }

    /// Mean and variance of the binned data (bin centres).
    pub fn moments(&self) -> (f64, f64) {
        let n = self.in_range() as f64;
        let mean = (0..self.n_bins())
            .map(|i| self.counts[i] as f64 * self.center(i))
            .sum::<f64>()
            / n;
        let var = (0..self.n_bins())
            .map(|i| self.counts[i] as f64 * (self.center(i) - mean).powi(2))
            .sum::<f64>()
            / n;
        (mean, var)
    }
}

pub fn build_histogram(samples: &[f64], n_bins: usize, lo: f64, hi: f64) -> Result<RawHistogram> {
    if samples.is_empty() {
        return Err(Error::domain("cannot histogram an empty sample set"));
    }
    let mut h = RawHistogram::empty(n_bins, lo, hi)?;
    for &x in samples {
        h.add(x);
    }
    Ok(h)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pooled histogram of a channel's records, each record mean-subtracted
/// before binning.
pub fn histogram_records(
    records: &[SampleRecord],
    n_bins: usize,
    lo: f64,
    hi: f64,
) -> Result<RawHistogram> {
    if records.is_empty() || records.iter().any(|r| r.samples.is_empty()) {
        return Err(Error::domain("cannot histogram an empty sample set"));
    }
    let empty = RawHistogram::empty(n_bins, lo, hi)?;
    records
        .par_iter()
        .map(|r| {
            let m = mean(&r.samples);
            let mut h = empty.clone();
            for &x in &r.samples {
                h.add(x - m);
            }
            Ok(h)
        })
        .try_reduce(|| empty.clone(), |a, b| a.merge(&b))
}

/// Shared symmetric range `±k σ_max`, with `σ_max` the largest
/// mean-subtracted standard deviation over all channels.
pub fn shared_range(channels: &[&[SampleRecord]], sigmas: f64) -> Result<(f64, f64)> {
    let mut sigma_max: f64 = 0.0;
    for records in channels {
        let (mut sum_sq, mut n) = (0.0, 0usize);
        for r in records.iter() {
            let m = mean(&r.samples);
            sum_sq += r.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>();
            n += r.samples.len();
        }
        if n > 0 {
            sigma_max = sigma_max.max((sum_sq / n as f64).sqrt());
        }
    }
    if !(sigma_max > 0.0) {
        return Err(Error::Degenerate("all channels have zero spread".into()));
    }
    Ok((-sigmas * sigma_max, sigmas * sigma_max))
}

/// A histogram on calibrated quadrature axes, normalized to unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedHistogram {
    /// Bin centres; the step is the calibrated bin width `Δx`.
    pub grid: UniformGrid,
    pub density: Vec<f64>,
    pub delta_x: f64,
    pub n_samples: u64,
    /// Raw-to-quadrature conversion factor.
    pub scale_factor: f64,
}

impl QuadratureCurve for CalibratedHistogram {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn values(&self) -> &[f64] {
        &self.density
    }
}

impl CalibratedHistogram {
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.delta_x
    }

    pub fn mean(&self) -> f64 {
        self.grid
            .points()
            .zip(&self.density)
            .map(|(x, d)| x * d)
            .sum::<f64>()
            * self.delta_x
    }

    /// Binned variance with Sheppard's correction `−Δx²/12`.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.grid
            .points()
            .zip(&self.density)
            .map(|(x, d)| (x - m).powi(2) * d)
            .sum::<f64>()
            * self.delta_x
            - self.delta_x * self.delta_x / 12.0
    }

    fn from_raw(raw: &RawHistogram, shift: f64, scale: f64) -> Result<Self> {
        let n = raw.in_range();
        if n == 0 {
            return Err(Error::Degenerate(
                "histogram has no in-range samples".into(),
            ));
        }
        let delta_x = raw.bin_width() * scale;
        let grid = UniformGrid::new((raw.center(0) - shift) * scale, delta_x, raw.n_bins())?;
        let norm = 1.0 / (n as f64 * delta_x);
        Ok(Self {
            grid,
            density: raw.counts.iter().map(|&c| c as f64 * norm).collect(),
            delta_x,
            n_samples: n,
            scale_factor: scale,
        })
    }
}

/// Rescales every histogram so the vacuum has quadrature variance 1/4.
///
/// All axes are shifted by the vacuum mean and multiplied by
/// `1 / (2√v)`, with `v` the binned vacuum variance in raw units; the
/// densities are then normalized to unit area. The vacuum comes first in
/// the output.
pub fn calibrate(
    vacuum: &RawHistogram,
    signals: &[RawHistogram],
) -> Result<Vec<CalibratedHistogram>> {
    if let Some(bad) = signals.iter().find(|s| !s.same_binning(vacuum)) {
        return Err(Error::Alignment(format!(
            "signal histogram binning [{}, {}]×{} differs from the vacuum's [{}, {}]×{}",
            bad.lo,
            bad.hi,
            bad.n_bins(),
            vacuum.lo,
            vacuum.hi,
            vacuum.n_bins()
        )));
    }
    if vacuum.in_range() == 0 {
        return Err(Error::Degenerate("vacuum histogram is empty".into()));
    }
    let (shift, var) = vacuum.moments();
    let var = var - vacuum.bin_width().powi(2) / 12.0;
    if !(var > 0.0) {
        return Err(Error::Degenerate(
            "vacuum histogram has zero variance".into(),
        ));
    }
    let scale = 1.0 / (2.0 * var.sqrt());
    std::iter::once(vacuum)
        .chain(signals)
        .map(|h| CalibratedHistogram::from_raw(h, shift, scale))
        .collect()
}

/// Fitted mean photon number of one histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEstimate {
    pub mu: f64,
    /// 1σ, from the curvature of the residual sum at the optimum.
    pub sigma: f64,
    /// Sum of squared residuals at the optimum.
    pub fit_residual: f64,
    pub iterations: usize,
    /// 1σ contribution of the vacuum-variance uncertainty behind the axis
    /// calibration; zero unless set with [`MuEstimate::with_calibration`].
    pub sigma_calibration: f64,
}

impl MuEstimate {
    /// Adds the calibration uncertainty for a vacuum histogram of
    /// `n_vacuum` samples.
    pub fn with_calibration(mut self, n_vacuum: u64) -> Self {
        self.sigma_calibration = calibration_sigma(self.mu, n_vacuum);
        self
    }

    /// Fit and calibration uncertainties combined in quadrature.
    pub fn total_sigma(&self) -> f64 {
        self.sigma.hypot(self.sigma_calibration)
    }
}

/// Shift of a fitted μ caused by a 1σ error in the calibrating vacuum
/// variance: the quadrature variance is `1/4 + μ/2`, so a relative variance
/// error `ε` moves μ by `ε(1/2 + μ)`, with `ε = √(2/N)` for a Gaussian.
pub fn calibration_sigma(mu: f64, n_vacuum: u64) -> f64 {
    (0.5 + mu) * (2.0 / n_vacuum as f64).sqrt()
}

/// How the model density is compared with a histogram bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitModel {
    /// `X_μ` averaged over each bin (Simpson's rule), matching what a
    /// histogram of counts actually estimates.
    #[default]
    BinAveraged,
    /// `X_μ` evaluated at the bin centre.
    Point,
}

/// Residual sum `S(μ) = Σ_bins [density − model_μ]²` with the Fock
/// densities tabulated once.
struct Objective<'a> {
    density: &'a [f64],
    /// Per bin, the Fock densities to combine with Poisson weights.
    fock: Vec<Vec<f64>>,
    policy: TruncationPolicy,
}

impl<'a> Objective<'a> {
    fn new(
        hist: &'a CalibratedHistogram,
        mu_max: f64,
        policy: TruncationPolicy,
        model: FitModel,
    ) -> Result<Self> {
        let k_max = policy.order(mu_max)?;
        let tabulate = |x: f64| {
            let mut row = vec![0.0; k_max + 1];
            fock_quadrature_densities_into(x, &mut row);
            row
        };
        let half = 0.5 * hist.delta_x;
        let fock = hist
            .grid
            .points()
            .map(|x| match model {
                FitModel::Point => tabulate(x),
                FitModel::BinAveraged => {
                    let (a, m, b) = (tabulate(x - half), tabulate(x), tabulate(x + half));
                    (0..=k_max)
                        .map(|k| (a[k] + 4.0 * m[k] + b[k]) / 6.0)
                        .collect()
                }
            })
            .collect();
        Ok(Self {
            density: &hist.density,
            fock,
            policy,
        })
    }

    fn eval(&self, mu: f64) -> f64 {
        let k_max = self.fock[0].len() - 1;
        let k = self.policy.order(mu).map(|k| k.min(k_max)).unwrap_or(k_max);
        let w = match poisson_weights(mu.max(0.0), k) {
            Ok(w) => w,
            Err(_) => return f64::INFINITY,
        };
        self.density
            .iter()
            .zip(&self.fock)
            .map(|(d, row)| {
                let model: f64 = w.iter().zip(row).map(|(a, b)| a * b).sum();
                (d - model).powi(2)
            })
            .sum()
    }
}

/// Least-squares fit of `X_μ` to a calibrated histogram, comparing bin
/// averages of the model with the histogram.
pub fn fit_mu(hist: &CalibratedHistogram, policy: &TruncationPolicy) -> Result<MuEstimate> {
    fit_mu_with(hist, policy, FitModel::default())
}

/// Brent search on `[0, 2(4·variance − 1)]` (at least `[0, 0.1]`) to
/// relative tolerance 1e-8; the uncertainty is
/// `σ² = 2·[S(μ̂)/(n_bins − 1)] / S''(μ̂)`.
pub fn fit_mu_with(
    hist: &CalibratedHistogram,
    policy: &TruncationPolicy,
    model: FitModel,
) -> Result<MuEstimate> {
    policy.validate()?;
    let var = hist.variance();
    let n = hist.n_samples as f64;
    let var_sigma = 0.25 * (2.0 / n).sqrt();
    if var < 0.25 - 3.0 * var_sigma {
        log::warn!(
            "histogram variance {var:.6} is below the vacuum level 0.25 by more than 3σ; \
             calibration may be inconsistent"
        );
    }
    let upper = (2.0 * (4.0 * var - 1.0)).max(0.1);
    // headroom so curvature probes past the bracket still see converged sums
    let objective = Objective::new(hist, 1.5 * upper + 1.0, *policy, model)?;
    let min = brent_minimize(
        |mu| objective.eval(mu),
        0.0,
        upper,
        FIT_REL_TOL,
        1e-12,
        FIT_MAX_ITER,
    )?;
    let mu = min.x;

    let h = 1e-3 * mu.max(1e-2);
    let curvature = if mu >= h {
        (objective.eval(mu + h) - 2.0 * min.fx + objective.eval(mu - h)) / (h * h)
    } else {
        (objective.eval(mu + 2.0 * h) - 2.0 * objective.eval(mu + h) + min.fx) / (h * h)
    };
    if !(curvature > 0.0) {
        return Err(Error::Fit(format!(
            "non-positive curvature {curvature} of the residual at μ = {mu}"
        )));
    }
    let dof = (hist.density.len() as f64 - 1.0).max(1.0);
    let sigma = (2.0 * (min.fx / dof) / curvature).sqrt();
    Ok(MuEstimate {
        mu,
        sigma,
        fit_residual: min.fx,
        iterations: min.iterations,
        sigma_calibration: 0.0,
    })
}

/// Writes a calibrated histogram, with its fit when available.
pub fn write_calibrated(
    hist: &CalibratedHistogram,
    fit: Option<&MuEstimate>,
    path: &Path,
) -> Result<()> {
    let mut h = Header::new();
    if let Some(f) = fit {
        h.set("mu_hat", f.mu)
            .set("sigma_mu", f.sigma)
            .set("sigma_calibration", f.sigma_calibration)
            .set("fit_residual", f.fit_residual);
    }
    h.set("delta_x", hist.delta_x)
        .set("x_start", hist.grid.start())
        .set("n_bins", hist.grid.len())
        .set("n_samples", hist.n_samples)
        .set("scale_factor", hist.scale_factor);
    let mut t = Table::new(h, &["x", "density"]);
    t.rows = hist
        .grid
        .points()
        .zip(&hist.density)
        .map(|(x, d)| vec![x, *d])
        .collect();
    t.write(path)
}

pub fn read_calibrated(path: &Path) -> Result<(CalibratedHistogram, Option<MuEstimate>)> {
    let t = Table::read(path)?;
    let h = &t.header;
    let delta_x: f64 = h.require("delta_x", path)?;
    let x_start: f64 = h.require("x_start", path)?;
    let n_bins: usize = h.require("n_bins", path)?;
    let n_samples: u64 = h.require("n_samples", path)?;
    let scale_factor: f64 = h.require("scale_factor", path)?;
    let xs = t.require_column("x", path)?;
    let density = t.require_column("density", path)?;
    if xs.len() != n_bins {
        return Err(Error::parse(
            path,
            t.rows.len() + 1,
            format!("expected {n_bins} bins, found {}", xs.len()),
        ));
    }
    let grid = UniformGrid::new(x_start, delta_x, n_bins)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    if let Some(i) = xs
        .iter()
        .enumerate()
        .position(|(i, x)| (x - grid.at(i)).abs() > 1e-9 * delta_x.max(1.0))
    {
        return Err(Error::Validation(format!(
            "{}: bin {i} centre {} is off the uniform grid",
            path.display(),
            xs[i]
        )));
    }
    let fit = match h.optional::<f64>("mu_hat", path)? {
        Some(mu) => Some(MuEstimate {
            mu,
            sigma: h.require("sigma_mu", path)?,
            fit_residual: h.optional("fit_residual", path)?.unwrap_or(0.0),
            iterations: 0,
            sigma_calibration: h.optional("sigma_calibration", path)?.unwrap_or(0.0),
        }),
        None => None,
    };
    Ok((
        CalibratedHistogram {
            grid,
            density,
            delta_x,
            n_samples,
            scale_factor,
        },
        fit,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_math::prcs_marginal;
    use crate::synth::{generate_records, SimulationConfig};

    #[test]
    fn histogram_counting() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let h = build_histogram(&xs, 4, 0.0, 1.0).unwrap();
        assert_eq!(h.in_range(), 10);
        let h = build_histogram(&[1.0], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![0, 0, 0, 1]);
        let h = build_histogram(&[-0.1, 0.5, 2.0, f64::NAN], 4, 0.0, 1.0).unwrap();
        assert_eq!((h.in_range(), h.out_of_range), (1, 3));
        assert!(build_histogram(&[], 4, 0.0, 1.0).is_err());
        assert!(build_histogram(&[0.1], 1, 0.0, 1.0).is_err());
        assert!(build_histogram(&[0.1], 4, 1.0, 0.0).is_err());
    }

    #[test]
    fn merge_is_associative() {
        let a = build_histogram(&[0.1, 0.2], 5, 0.0, 1.0).unwrap();
        let b = build_histogram(&[0.9, 3.0], 5, 0.0, 1.0).unwrap();
        let c = build_histogram(&[0.55], 5, 0.0, 1.0).unwrap();
        let left = a.clone().merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        let other = build_histogram(&[0.5], 6, 0.0, 1.0).unwrap();
        assert!(left.merge(&other).is_err());
    }

    #[test]
    fn calibrated_vacuum_has_quarter_variance() {
        let cfg = SimulationConfig {
            n_samples_per_record: 20_000,
            n_records: 5,
            rng_seed: 3,
            ..Default::default()
        };
        let recs = generate_records(&cfg).unwrap();
        let (lo, hi) = shared_range(&[&recs], 6.0).unwrap();
        let raw = histogram_records(&recs, 201, lo, hi).unwrap();
        let cal = calibrate(&raw, &[]).unwrap();
        assert!((cal[0].variance() - 0.25).abs() < 1e-10);
        assert!((cal[0].integral() - 1.0).abs() < 1e-12);
        assert!(cal[0].mean().abs() < 1e-12);
        assert!((cal[0].scale_factor - 1.0 / 3.7).abs() < 0.01);
    }

    #[test]
    fn calibrate_rejects_degenerate_input() {
        let raw = build_histogram(&[0.5; 10], 10, 0.0, 1.0).unwrap();
        assert!(matches!(calibrate(&raw, &[]), Err(Error::Degenerate(_))));
        let ok = build_histogram(&[0.1, 0.5, 0.9], 10, 0.0, 1.0).unwrap();
        let other = build_histogram(&[0.1], 12, 0.0, 1.0).unwrap();
        assert!(matches!(calibrate(&ok, &[other]), Err(Error::Alignment(_))));
    }

    fn theory_histogram(mu: f64) -> CalibratedHistogram {
        let grid = UniformGrid::symmetric(5.0, 0.05).unwrap();
        let m = prcs_marginal(mu, &grid, &TruncationPolicy::default()).unwrap();
        CalibratedHistogram {
            grid,
            density: m.values,
            delta_x: 0.05,
            n_samples: 1 << 40,
            scale_factor: 1.0,
        }
    }

    /// Exact expected histogram: bin averages of `X_μ` from a fine
    /// trapezoid rule.
    fn binned_theory_histogram(mu: f64) -> CalibratedHistogram {
        let grid = UniformGrid::symmetric(5.0, 0.05).unwrap();
        let sub = 50;
        let fine = UniformGrid::new(
            grid.start() - 0.025,
            0.05 / sub as f64,
            grid.len() * sub + 1,
        )
        .unwrap();
        let m = prcs_marginal(mu, &fine, &TruncationPolicy::default()).unwrap();
        let density = (0..grid.len())
            .map(|i| crate::grid::trapezoid(&m.values[i * sub..=(i + 1) * sub], fine.step()) / 0.05)
            .collect();
        CalibratedHistogram {
            grid,
            density,
            delta_x: 0.05,
            n_samples: 1 << 40,
            scale_factor: 1.0,
        }
    }

    #[test]
    fn fit_recovers_noise_free_mu() {
        let p = TruncationPolicy::default();
        for &mu in &[0.5, 0.178, 2.2] {
            let fit = fit_mu_with(&theory_histogram(mu), &p, FitModel::Point).unwrap();
            assert!((fit.mu - mu).abs() < 1e-6, "mu = {mu}: {fit:?}");
            assert!(fit.fit_residual < 1e-12);
            let fit = fit_mu(&binned_theory_histogram(mu), &p).unwrap();
            assert!((fit.mu - mu).abs() < 1e-6, "mu = {mu}: {fit:?}");
            assert!(fit.fit_residual < 1e-12);
        }
    }

    #[test]
    fn fit_vacuum_gives_zero() {
        let fit = fit_mu(&binned_theory_histogram(0.0), &TruncationPolicy::default()).unwrap();
        assert!(fit.mu < 1e-6, "{fit:?}");
    }

    #[test]
    fn calibrated_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let hist = theory_histogram(0.4);
        let fit = fit_mu(&hist, &TruncationPolicy::default()).unwrap();
        write_calibrated(&hist, Some(&fit), &path).unwrap();
        let (back, back_fit) = read_calibrated(&path).unwrap();
        assert_eq!(back, hist);
        let back_fit = back_fit.unwrap();
        assert_eq!((back_fit.mu, back_fit.sigma), (fit.mu, fit.sigma));
        let with_cal = fit.with_calibration(1_000_000);
        write_calibrated(&hist, Some(&with_cal), &path).unwrap();
        let back_cal = read_calibrated(&path).unwrap().1.unwrap();
        assert_eq!(back_cal.total_sigma(), with_cal.total_sigma());
        write_calibrated(&hist, None, &path).unwrap();
        assert!(read_calibrated(&path).unwrap().1.is_none());
    }
}
