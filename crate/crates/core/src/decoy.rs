//! Decoy-state linear estimators of the single-photon quadrature density.
//!
//! Given the vacuum marginal `X₀` and marginals `X_{μ_1} … X_{μ_L}` of
//! phase-randomized coherent states, the single-photon density is estimated
//! as `Σ_j λ_j X_{μ_j}`. For odd `L` the estimate bounds the true density
//! from above, for even `L` from below.

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quantum_math::MarginalDensity;

/// Default minimum gap between any two mean photon numbers.
pub const DEFAULT_SEPARATION_FLOOR: f64 = 1e-3;

/// A quadrature-density curve on a uniform grid: either a theoretical
/// marginal or a calibrated histogram.
pub trait QuadratureCurve {
    fn grid(&self) -> &UniformGrid;
    fn values(&self) -> &[f64];
}

impl QuadratureCurve for MarginalDensity {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Nonzero mean photon numbers `μ_1 < … < μ_L` with their 1σ uncertainties.
/// The vacuum `μ_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanPhotonSet {
    mus: Vec<f64>,
    sigmas: Vec<f64>,
}

impl MeanPhotonSet {
    pub fn new(mus: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        Self::with_separation_floor(mus, sigmas, DEFAULT_SEPARATION_FLOOR)
    }

    /// Set with zero uncertainties.
    pub fn exact(mus: Vec<f64>) -> Result<Self> {
        let sigmas = vec![0.0; mus.len()];
        Self::new(mus, sigmas)
    }

    pub fn with_separation_floor(mus: Vec<f64>, sigmas: Vec<f64>, floor: f64) -> Result<Self> {
        if mus.is_empty() {
            return Err(Error::domain(
                "at least one nonzero mean photon number is required",
            ));
        }
        if sigmas.len() != mus.len() {
            return Err(Error::domain(format!(
                "{} mean photon numbers but {} uncertainties",
                mus.len(),
                sigmas.len()
            )));
        }
        if let Some(bad) = mus.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::domain(format!(
                "mean photon numbers must be positive and finite, got {bad}"
            )));
        }
        if let Some(bad) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::domain(format!("invalid uncertainty {bad}")));
        }
        for pair in mus.windows(2) {
            if pair[1] <= pair[0] - floor {
                return Err(Error::domain(format!(
                    "mean photon numbers must be sorted ascending ({} before {})",
                    pair[0], pair[1]
                )));
            }
            if pair[1] - pair[0] < floor {
                return Err(Error::IllConditioned(format!(
                    "mean photon numbers {} and {} are closer than {floor}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { mus, sigmas })
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    /// The first `l` mean photon numbers, `1 ≤ l ≤ L`.
    pub fn prefix(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.len() {
            return Err(Error::domain(format!(
                "prefix length {l} outside 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            mus: self.mus[..l].to_vec(),
            sigmas: self.sigmas[..l].to_vec(),
        })
    }
}

/// The coefficients `λ_0 … λ_L` and the mean photon numbers they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoyWeights {
    pub lambda: Vec<f64>,
    pub source: MeanPhotonSet,
}

impl DecoyWeights {
    pub fn order(&self) -> usize {
        self.source.len()
    }

    /// `Σ_j λ_j`, the trace of the estimated state.
    pub fn sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Odd orders overestimate the single-photon density.
    pub fn is_upper_bound(&self) -> bool {
        self.order() % 2 == 1
    }
}

/// `λ_0 … λ_L` for arbitrary distinct positive `μ`s; no conditioning check.
pub(crate) fn lambda_coefficients(mus: &[f64]) -> Vec<f64> {
    let prod: f64 = mus.iter().product();
    let mut lambda = vec![0.0; mus.len() + 1];
    for (j, &mu_j) in mus.iter().enumerate() {
        let denom: f64 = mus
            .iter()
            .enumerate()
            .filter(|&(n, _)| n != j)
            .map(|(_, &mu_n)| mu_n - mu_j)
            .product();
        let base = prod / (mu_j * mu_j * denom);
        lambda[j + 1] = base * mu_j.exp();
        lambda[0] -= base;
    }
    lambda
}

pub fn decoy_weights(set: &MeanPhotonSet) -> Result<DecoyWeights> {
    let lambda = lambda_coefficients(set.mus());
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::IllConditioned(format!(
            "decoy coefficients overflow for mean photon numbers {:?}",
            set.mus()
        )));
    }
    Ok(DecoyWeights {
        lambda,
        source: set.clone(),
    })
}

/// Estimated single-photon density with 1σ error bars. Values may be
/// negative and need not integrate to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedDensity {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
    pub sigma_values: Vec<f64>,
}

impl EstimatedDensity {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step()
    }
}

fn check_inputs<C: QuadratureCurve>(
    weights: &DecoyWeights,
    vacuum: &C,
    curves: &[&C],
) -> Result<()> {
    if curves.len() != weights.order() {
        return Err(Error::Alignment(format!(
            "{} coefficients need {} nonzero-μ curves, got {}",
            weights.lambda.len(),
            weights.order(),
            curves.len()
        )));
    }
    let grid = vacuum.grid();
    for (j, c) in curves.iter().enumerate() {
        grid.ensure_aligned(c.grid(), &format!("curve {}", j + 1))?;
    }
    for c in std::iter::once(vacuum).chain(curves.iter().copied()) {
        if c.values().len() != grid.len() {
            return Err(Error::Alignment(format!(
                "curve has {} values on a {}-point grid",
                c.values().len(),
                grid.len()
            )));
        }
    }
    Ok(())
}

fn combine<C: QuadratureCurve>(lambda: &[f64], vacuum: &C, curves: &[&C]) -> Vec<f64> {
    let mut out: Vec<f64> = vacuum.values().iter().map(|v| lambda[0] * v).collect();
    for (l, c) in lambda[1..].iter().zip(curves) {
        for (o, v) in out.iter_mut().zip(c.values()) {
            *o += l * v;
        }
    }
    out
}

/// `Y₁^est(x) = λ_0 X_0(x) + Σ_j λ_j X_{μ_j}(x)`. Error bars are left at zero;
/// see [`propagate_errors`].
pub fn estimate_y1<C: QuadratureCurve>(
    weights: &DecoyWeights,
    vacuum: &C,
    curves: &[&C],
) -> Result<EstimatedDensity> {
    check_inputs(weights, vacuum, curves)?;
    let values = combine(&weights.lambda, vacuum, curves);
    Ok(EstimatedDensity {
        grid: *vacuum.grid(),
        sigma_values: vec![0.0; values.len()],
        values,
    })
}

/// `∂λ_i/∂μ_j` for all `i`, by central differences with step `10⁻⁶ μ_j`.
fn lambda_sensitivities(mus: &[f64], j: usize) -> Vec<f64> {
    let h = 1e-6 * mus[j];
    let mut up = mus.to_vec();
    let mut down = mus.to_vec();
    up[j] += h;
    down[j] -= h;
    let lu = lambda_coefficients(&up);
    let ld = lambda_coefficients(&down);
    lu.iter()
        .zip(&ld)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// `∂Y₁^est(x)/∂μ_j` holding the observed curves fixed.
pub fn mu_sensitivity<C: QuadratureCurve>(
    weights: &DecoyWeights,
    vacuum: &C,
    curves: &[&C],
    j: usize,
) -> Result<Vec<f64>> {
    check_inputs(weights, vacuum, curves)?;
    if j >= weights.order() {
        return Err(Error::domain(format!(
            "no mean photon number with index {j}"
        )));
    }
    let dlambda = lambda_sensitivities(weights.source.mus(), j);
    Ok(combine(&dlambda, vacuum, curves))
}

/// First-order 1σ error bars on the estimate.
///
/// `σ²_Y(x) = Σ_j λ_j² X_j(x)/(N_j Δx) + Σ_j (∂Y/∂μ_j)² σ²_{μ_j}`, all inputs
/// independent. `histogram_counts` holds `N_0 … N_L` (vacuum first); pass
/// `None` for exact curves, which drops the histogram term. Zero `mu_sigmas`
/// drop the μ term.
pub fn propagate_errors<C: QuadratureCurve>(
    weights: &DecoyWeights,
    vacuum: &C,
    curves: &[&C],
    mu_sigmas: &[f64],
    histogram_counts: Option<&[u64]>,
) -> Result<Vec<f64>> {
    check_inputs(weights, vacuum, curves)?;
    if mu_sigmas.len() != weights.order() {
        return Err(Error::domain(format!(
            "{} μ uncertainties for {} mean photon numbers",
            mu_sigmas.len(),
            weights.order()
        )));
    }
    if let Some(bad) = mu_sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::domain(format!("invalid μ uncertainty {bad}")));
    }
    let n = vacuum.grid().len();
    let dx = vacuum.grid().step();
    let all: Vec<&C> = std::iter::once(vacuum)
        .chain(curves.iter().copied())
        .collect();
    let mut var = vec![0.0; n];

    if let Some(counts) = histogram_counts {
        if counts.len() != all.len() {
            return Err(Error::domain(format!(
                "{} histogram counts for {} curves",
                counts.len(),
                all.len()
            )));
        }
        for ((lambda, curve), &count) in weights.lambda.iter().zip(&all).zip(counts) {
            if count == 0 {
                if curve.values().iter().any(|v| *v != 0.0) {
                    return Err(Error::domain("zero sample count for a non-empty curve"));
                }
                continue;
            }
            let scale = lambda * lambda / (count as f64 * dx);
            for (v, x) in var.iter_mut().zip(curve.values()) {
                *v += scale * x.max(0.0);
            }
        }
    }

    for (j, &sigma) in mu_sigmas.iter().enumerate() {
        if sigma == 0.0 {
            continue;
        }
        let dy = combine(
            &lambda_sensitivities(weights.source.mus(), j),
            vacuum,
            curves,
        );
        for (v, d) in var.iter_mut().zip(&dy) {
            *v += d * d * sigma * sigma;
        }
    }
    Ok(var.into_iter().map(f64::sqrt).collect())
}

/// [`estimate_y1`] followed by [`propagate_errors`] with the uncertainties
/// stored in the weights' source set.
pub fn estimate_y1_with_errors<C: QuadratureCurve>(
    weights: &DecoyWeights,
    vacuum: &C,
    curves: &[&C],
    histogram_counts: Option<&[u64]>,
) -> Result<EstimatedDensity> {
    let mut est = estimate_y1(weights, vacuum, curves)?;
    est.sigma_values = propagate_errors(
        weights,
        vacuum,
        curves,
        weights.source.sigmas(),
        histogram_counts,
    )?;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_math::{prcs_marginal, single_photon_marginal, TruncationPolicy};

    const REFERENCE_MUS: [f64; 3] = [0.178, 0.436, 2.20];

    fn curves(mus: &[f64], grid: &UniformGrid) -> (MarginalDensity, Vec<MarginalDensity>) {
        let p = TruncationPolicy::default();
        let vac = prcs_marginal(0.0, grid, &p).unwrap();
        let cs = mus
            .iter()
            .map(|&m| prcs_marginal(m, grid, &p).unwrap())
            .collect();
        (vac, cs)
    }

    #[test]
    fn single_mu_weights() {
        let w = decoy_weights(&MeanPhotonSet::exact(vec![0.178]).unwrap()).unwrap();
        assert!((w.lambda[0] + 1.0 / 0.178).abs() < 1e-12);
        assert!((w.lambda[1] - 0.178_f64.exp() / 0.178).abs() < 1e-12);
        assert!((w.lambda[0] + 5.61798).abs() < 1e-5);
        assert!((w.lambda[1] - 6.712_502).abs() < 1e-6);
    }

    #[test]
    fn trace_sums_match_table() {
        let two =
            decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS[..2].to_vec()).unwrap()).unwrap();
        let three = decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS.to_vec()).unwrap()).unwrap();
        assert!((two.sum() - 0.985).abs() < 5e-4);
        assert!((three.sum() - 1.013).abs() < 5e-4);
    }

    #[test]
    fn lambda_signs() {
        for l in 1..=3 {
            let w =
                decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS[..l].to_vec()).unwrap()).unwrap();
            assert!(w.lambda[0] < 0.0);
            for j in 1..=l {
                let expected = if j % 2 == 1 { 1.0 } else { -1.0 };
                assert_eq!(w.lambda[j].signum(), expected, "L = {l}, j = {j}");
            }
        }
    }

    #[test]
    fn set_validation() {
        assert!(matches!(
            MeanPhotonSet::exact(vec![]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            MeanPhotonSet::exact(vec![0.5, 0.5005]),
            Err(Error::IllConditioned(_))
        ));
        assert!(matches!(
            MeanPhotonSet::exact(vec![0.5, 0.5]),
            Err(Error::IllConditioned(_))
        ));
        assert!(matches!(
            MeanPhotonSet::exact(vec![0.9, 0.5]),
            Err(Error::Domain(_))
        ));
        assert!(MeanPhotonSet::exact(vec![0.0, 0.5]).is_err());
        assert!(MeanPhotonSet::new(vec![0.5], vec![-0.1]).is_err());
        assert!(MeanPhotonSet::new(vec![0.5], vec![]).is_err());
        assert!(
            MeanPhotonSet::with_separation_floor(vec![0.5, 0.5005], vec![0.0; 2], 1e-4).is_ok()
        );
    }

    #[test]
    fn estimate_overestimates_for_single_mu() {
        let grid = UniformGrid::symmetric(6.0, 0.01).unwrap();
        let (vac, cs) = curves(&REFERENCE_MUS[..1], &grid);
        let w = decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS[..1].to_vec()).unwrap()).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        let est = estimate_y1(&w, &vac, &refs).unwrap();
        for (x, v) in grid.points().zip(&est.values) {
            assert!(*v >= single_photon_marginal(x) - 1e-12);
        }
        assert!((est.integral() - w.sum()).abs() < 1e-6);
    }

    #[test]
    fn estimate_at_origin_for_three_mus() {
        let grid = UniformGrid::symmetric(6.0, 0.01).unwrap();
        let (vac, cs) = curves(&REFERENCE_MUS, &grid);
        let w = decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS.to_vec()).unwrap()).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        let est = estimate_y1(&w, &vac, &refs).unwrap();
        let v0 = est.values[grid.len() / 2];
        assert!((-1e-3..=1e-2).contains(&v0), "Y1est(0) = {v0}");
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g1 = UniformGrid::symmetric(6.0, 0.01).unwrap();
        let g2 = UniformGrid::symmetric(6.0, 0.02).unwrap();
        let (vac, _) = curves(&[], &g1);
        let (_, cs) = curves(&[0.5], &g2);
        let w = decoy_weights(&MeanPhotonSet::exact(vec![0.5]).unwrap()).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        assert!(matches!(
            estimate_y1(&w, &vac, &refs),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            estimate_y1(&w, &vac, &[]),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn no_uncertainty_means_zero_error_bars() {
        let grid = UniformGrid::symmetric(4.0, 0.05).unwrap();
        let (vac, cs) = curves(&REFERENCE_MUS, &grid);
        let w = decoy_weights(&MeanPhotonSet::exact(REFERENCE_MUS.to_vec()).unwrap()).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        let s = propagate_errors(&w, &vac, &refs, &[0.0; 3], None).unwrap();
        assert!(s.iter().all(|v| *v == 0.0));
        // a huge sample count behaves like the exact limit
        let s = propagate_errors(&w, &vac, &refs, &[0.0; 3], Some(&[u64::MAX; 4])).unwrap();
        assert!(s.iter().all(|v| *v < 1e-7));
    }

    #[test]
    fn errors_peak_at_center() {
        let grid = UniformGrid::symmetric(4.0, 0.05).unwrap();
        let (vac, cs) = curves(&REFERENCE_MUS, &grid);
        let set = MeanPhotonSet::new(REFERENCE_MUS.to_vec(), vec![0.002, 0.004, 0.01]).unwrap();
        let w = decoy_weights(&set).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        let est = estimate_y1_with_errors(&w, &vac, &refs, Some(&[1_000_000_000; 4])).unwrap();
        let at = |x: f64| est.sigma_values[((x - grid.start()) / grid.step()).round() as usize];
        assert!(at(0.0) > at(2.0));
    }

    #[test]
    fn zero_counts_rejected() {
        let grid = UniformGrid::symmetric(4.0, 0.05).unwrap();
        let (vac, cs) = curves(&[0.5], &grid);
        let w = decoy_weights(&MeanPhotonSet::exact(vec![0.5]).unwrap()).unwrap();
        let refs: Vec<&MarginalDensity> = cs.iter().collect();
        assert!(propagate_errors(&w, &vac, &refs, &[0.0], Some(&[0, 10])).is_err());
    }

    #[test]
    fn finite_difference_matches_analytic_derivative() {
        // d/dμ [(X_μ e^μ − X_0)/μ] = X_μ e^μ (μ − 1)/μ² + X_0/μ²
        let grid = UniformGrid::symmetric(3.0, 0.1).unwrap();
        let mu = 0.436;
        let (vac, cs) = curves(&[mu], &grid);
        let w = decoy_weights(&MeanPhotonSet::exact(vec![mu]).unwrap()).unwrap();
        let d = mu_sensitivity(&w, &vac, &[&cs[0]], 0).unwrap();
        for ((fd, x0), xm) in d.iter().zip(&vac.values).zip(&cs[0].values) {
            let analytic = xm * mu.exp() * (mu - 1.0) / (mu * mu) + x0 / (mu * mu);
            assert!((fd - analytic).abs() <= 1e-6 * analytic.abs().max(1e-3));
        }
    }
}
