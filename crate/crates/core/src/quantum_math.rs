//! Closed-form photon statistics, quadrature densities, radial Wigner
//! functions and Fock-diagonal density matrices of phase-randomized
//! coherent states.
//!
//! Quadratures follow `X = (a e^{-iθ} + a† e^{iθ}) / 2`, so the vacuum has
//! quadrature variance 1/4 and its Wigner function is `(2/π) e^{-2r²}`.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::special::{bessel_i0e, hermite_functions_into};

/// Hard ceiling on the photon-number truncation.
pub const MAX_TRUNCATION: usize = 100_000;

/// Rule for cutting the infinite Poisson sum over photon numbers.
///
/// The truncation order `K(μ)` is the smallest `K ≥ k_min_cap` whose Poisson
/// tail `Σ_{k>K} P_μ(k)` is below `tail_tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tail_tolerance: f64,
    pub k_min_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-10,
            k_min_cap: 20,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tolerance: f64, k_min_cap: usize) -> Result<Self> {
        let policy = Self {
            tail_tolerance,
            k_min_cap,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::domain(format!(
                "tail tolerance must lie in (0, 1), got {}",
                self.tail_tolerance
            )));
        }
        Ok(())
    }

    /// Truncation order `K(μ)`.
    pub fn order(&self, mu: f64) -> Result<usize> {
        self.validate()?;
        check_mu(mu)?;
        if mu == 0.0 {
            return Ok(self.k_min_cap);
        }
        // Sum the tail backwards from well past the mode so tiny terms are
        // accumulated before large ones.
        let mut weights = Vec::new();
        let ln_mu = mu.ln();
        let mut ln_w = -mu;
        for k in 0..=MAX_TRUNCATION + 1 {
            if k > 0 {
                ln_w += ln_mu - (k as f64).ln();
            }
            let w = ln_w.exp();
            weights.push(w);
            if k as f64 > mu && k > self.k_min_cap && w < self.tail_tolerance * 1e-6 {
                break;
            }
        }
        let mut tail = 0.0;
        let mut order = None;
        for k in (0..weights.len()).rev() {
            // here `tail` = Σ_{j>k} P(j)
            if tail < self.tail_tolerance {
                order = Some(k);
            } else {
                break;
            }
            tail += weights[k];
        }
        match order {
            Some(k) if k <= MAX_TRUNCATION => Ok(k.max(self.k_min_cap)),
            _ => Err(Error::domain(format!(
                "mean photon number {mu} needs more than {MAX_TRUNCATION} Fock terms"
            ))),
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "mean photon number must be finite and non-negative, got {mu}"
        )))
    }
}

/// `ln k!`, exact product up to 170 and Stirling's series beyond.
fn ln_factorial(k: usize) -> f64 {
    if k <= 170 {
        (2..=k).map(|i| i as f64).product::<f64>().ln()
    } else {
        let n = k as f64;
        let inv = 1.0 / n;
        let inv2 = inv * inv;
        n * n.ln() - n
            + 0.5 * (2.0 * PI * n).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
    }
}

/// Poisson photon-number probability `P_μ(k) = μ^k e^{-μ} / k!`.
pub fn poisson_weight(mu: f64, k: usize) -> Result<f64> {
    check_mu(mu)?;
    if mu == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok((k as f64 * mu.ln() - mu - ln_factorial(k)).exp())
}

/// `P_μ(0..=k_max)` via the log-space ratio recurrence.
pub fn poisson_weights(mu: f64, k_max: usize) -> Result<Vec<f64>> {
    check_mu(mu)?;
    let mut out = vec![0.0; k_max + 1];
    if mu == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let ln_mu = mu.ln();
    let mut ln_w = -mu;
    out[0] = ln_w.exp();
    for (k, w) in out.iter_mut().enumerate().skip(1) {
        ln_w += ln_mu - (k as f64).ln();
        *w = ln_w.exp();
    }
    Ok(out)
}

/// Fills `out[k] = P(x|k)` for `k = 0..out.len()`: the squared Fock-state
/// wavefunctions in the quadrature representation.
pub fn fock_quadrature_densities_into(x: f64, out: &mut [f64]) {
    hermite_functions_into(SQRT_2 * x, out);
    for v in out.iter_mut() {
        *v = SQRT_2 * *v * *v;
    }
}

/// Quadrature density `P(x|k) = |ψ_k(x)|²` of the Fock state `|k⟩`.
pub fn fock_quadrature_density(k: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; k + 1];
    fock_quadrature_densities_into(x, &mut buf);
    buf[k]
}

/// A probability density of quadrature outcomes sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDensity {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl MarginalDensity {
    pub fn x_grid(&self) -> Vec<f64> {
        self.grid.to_vec()
    }

    pub fn grid_step(&self) -> f64 {
        self.grid.step()
    }

    /// Riemann sum `Σ values · step`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step()
    }
}

/// Quadrature marginal `Σ_k diag[k] P(x|k)` of a Fock-diagonal state.
///
/// Works for estimated states with negative entries as well as for
/// physical ones.
pub fn fock_mixture_marginal(diag: &[f64], grid: &UniformGrid) -> MarginalDensity {
    let mut buf = vec![0.0; diag.len()];
    let values = grid
        .points()
        .map(|x| {
            fock_quadrature_densities_into(x, &mut buf);
            diag.iter().zip(&buf).map(|(p, d)| p * d).sum()
        })
        .collect();
    MarginalDensity {
        grid: *grid,
        values,
    }
}

/// Quadrature marginal `X_μ(x)` of a phase-randomized coherent state.
pub fn prcs_marginal(
    mu: f64,
    grid: &UniformGrid,
    policy: &TruncationPolicy,
) -> Result<MarginalDensity> {
    if grid.is_empty() {
        return Err(Error::domain("empty quadrature grid"));
    }
    let weights = poisson_weights(mu, policy.order(mu)?)?;
    Ok(fock_mixture_marginal(&weights, grid))
}

/// Rotationally symmetric Wigner function sampled on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWignerProfile {
    pub r_grid: UniformGrid,
    pub values: Vec<f64>,
}

impl RadialWignerProfile {
    /// `2π Σ r W(r) Δr`, the phase-space volume of the profile.
    pub fn normalization(&self) -> f64 {
        2.0 * PI
            * self.r_grid.step()
            * self
                .r_grid
                .points()
                .zip(&self.values)
                .map(|(r, w)| r * w)
                .sum::<f64>()
    }
}

fn check_r_grid(r_grid: &UniformGrid) -> Result<()> {
    if r_grid.start() < 0.0 {
        return Err(Error::domain(format!(
            "radial grid starts at negative radius {}",
            r_grid.start()
        )));
    }
    Ok(())
}

/// `W_μ(r) = (2/π) e^{-2(r² + μ)} I₀(4r√μ)`, evaluated as
/// `(2/π) e^{-2(r - √μ)²} · e^{-4r√μ} I₀(4r√μ)`.
pub fn prcs_wigner(mu: f64, r: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("negative radius {r}")));
    }
    let amp = mu.sqrt();
    let d = r - amp;
    Ok(FRAC_2_PI * (-2.0 * d * d).exp() * bessel_i0e(4.0 * r * amp))
}

pub fn prcs_wigner_radial(mu: f64, r_grid: &UniformGrid) -> Result<RadialWignerProfile> {
    check_mu(mu)?;
    check_r_grid(r_grid)?;
    let values = r_grid
        .points()
        .map(|r| prcs_wigner(mu, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialWignerProfile {
        r_grid: *r_grid,
        values,
    })
}

/// Diagonal of a density matrix in the Fock basis, `k = 0..=k_max`.
///
/// Estimated states may carry negative entries or a trace away from one;
/// values are stored as given.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFockState {
    pub diag: Vec<f64>,
}

impl DiagonalFockState {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::domain("empty Fock diagonal"));
        }
        Ok(Self { diag })
    }

    pub fn k_max(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// The pure Fock state `|n⟩⟨n|` truncated at `k_max ≥ n`.
    pub fn fock(n: usize, k_max: usize) -> Self {
        let mut diag = vec![0.0; k_max.max(n) + 1];
        diag[n] = 1.0;
        Self { diag }
    }
}

/// `ρ_μ = Σ_k P_μ(k) |k⟩⟨k|` truncated at `K(μ)`.
pub fn prcs_density_matrix(mu: f64, policy: &TruncationPolicy) -> Result<DiagonalFockState> {
    let diag = poisson_weights(mu, policy.order(mu)?)?;
    Ok(DiagonalFockState { diag })
}

/// Exact single-photon quadrature density `4√(2/π) x² e^{-2x²}`.
pub fn single_photon_marginal(x: f64) -> f64 {
    4.0 * FRAC_2_PI.sqrt() * x * x * (-2.0 * x * x).exp()
}

/// Exact single-photon Wigner function `(2/π)(4r² − 1) e^{-2r²}`.
pub fn single_photon_wigner(r: f64) -> f64 {
    FRAC_2_PI * (4.0 * r * r - 1.0) * (-2.0 * r * r).exp()
}

/// Ground-truth single-photon marginal and Wigner profile on the given grids.
pub fn single_photon_references(
    x_grid: &UniformGrid,
    r_grid: &UniformGrid,
) -> Result<(MarginalDensity, RadialWignerProfile)> {
    check_r_grid(r_grid)?;
    let marginal = MarginalDensity {
        grid: *x_grid,
        values: x_grid.points().map(single_photon_marginal).collect(),
    };
    let wigner = RadialWignerProfile {
        r_grid: *r_grid,
        values: r_grid.points().map(single_photon_wigner).collect(),
    };
    Ok((marginal, wigner))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_grid() -> UniformGrid {
        UniformGrid::symmetric(6.0, 0.01).unwrap()
    }

    fn r_grid() -> UniformGrid {
        UniformGrid::spanning(0.0, 6.0, 0.01).unwrap()
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_weight(0.0, 0).unwrap(), 1.0);
        assert_eq!(poisson_weight(0.0, 3).unwrap(), 0.0);
        let p = poisson_weight(0.178, 1).unwrap();
        assert!((p - 0.178 * (-0.178_f64).exp()).abs() < 1e-15);
        assert!((p - 0.148_976).abs() < 1e-6);
        let total: f64 = (0..=60).map(|k| poisson_weight(2.20, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(matches!(poisson_weight(-0.1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn poisson_large_k_does_not_overflow() {
        let p = poisson_weight(150.0, 400).unwrap();
        assert!(p.is_finite() && p > 0.0 && p < 1e-30);
        let v = poisson_weights(900.0, 1200).unwrap();
        let s: f64 = v.iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
        // the recurrence and the direct formula agree past 170!
        assert!((v[950] - poisson_weight(900.0, 950).unwrap()).abs() / v[950] < 1e-10);
    }

    #[test]
    fn truncation_order_contract() {
        let policy = TruncationPolicy::default();
        assert_eq!(policy.order(0.0).unwrap(), 20);
        let mut prev = 0;
        for &mu in &[0.0, 0.178, 0.436, 1.0, 2.2, 5.0, 20.0, 60.0] {
            let k = policy.order(mu).unwrap();
            assert!(k >= prev, "K not monotone at mu = {mu}");
            prev = k;
            let w = poisson_weights(mu, k + 400).unwrap();
            let tail: f64 = w[k + 1..].iter().sum();
            assert!(tail < policy.tail_tolerance, "mu = {mu}: tail {tail}");
            if k > policy.k_min_cap {
                let tail_prev: f64 = w[k..].iter().sum();
                assert!(tail_prev >= policy.tail_tolerance, "K({mu}) not minimal");
            }
        }
        assert!(TruncationPolicy::new(0.0, 5).is_err());
        assert!(TruncationPolicy::new(1.5, 5).is_err());
    }

    #[test]
    fn fock_density_examples() {
        assert!((fock_quadrature_density(0, 0.0) - FRAC_2_PI.sqrt()).abs() < 1e-15);
        assert!((fock_quadrature_density(0, 0.0) - 0.797885).abs() < 1e-6);
        assert!(fock_quadrature_density(1, 0.0).abs() < 1e-300);
        let closed = 4.0 * FRAC_2_PI.sqrt() * 0.25 * (-0.5_f64).exp();
        assert!((fock_quadrature_density(1, 0.5) - closed).abs() < 1e-15);
        assert!((fock_quadrature_density(1, 0.5) - 0.483941).abs() < 1e-6);
    }

    #[test]
    fn fock_densities_are_normalized() {
        // Fine grid: the step must resolve the fastest oscillation at k = 50.
        let g = UniformGrid::symmetric(10.0, 0.005).unwrap();
        let mut sums = vec![0.0; 51];
        let mut buf = vec![0.0; 51];
        for x in g.points() {
            fock_quadrature_densities_into(x, &mut buf);
            for (s, v) in sums.iter_mut().zip(&buf) {
                *s += v * g.step();
            }
        }
        for (k, s) in sums.iter().enumerate() {
            assert!((s - 1.0).abs() < 1e-8, "k = {k}: {s}");
        }
    }

    #[test]
    fn fock_density_finite_up_to_order_200() {
        for &x in &[-10.0, -3.3, 0.0, 0.1, 9.99] {
            let v = fock_quadrature_density(200, x);
            assert!(v.is_finite() && v >= 0.0);
        }
    }

    #[test]
    fn vacuum_marginal_is_gaussian() {
        let g = x_grid();
        let m = prcs_marginal(0.0, &g, &TruncationPolicy::default()).unwrap();
        for (x, v) in g.points().zip(&m.values) {
            let gauss = FRAC_2_PI.sqrt() * (-2.0 * x * x).exp();
            assert!((v - gauss).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_matches_high_truncation_sum() {
        // 200-term brute force with an independent Poisson evaluation.
        let mu = 2.20_f64;
        let mut buf = vec![0.0; 200];
        fock_quadrature_densities_into(0.0, &mut buf);
        let mut w = (-mu).exp();
        let mut oracle = 0.0;
        for (k, d) in buf.iter().enumerate() {
            if k > 0 {
                w *= mu / k as f64;
            }
            oracle += w * d;
        }
        let g = UniformGrid::new(0.0, 1.0, 1).unwrap();
        let m = prcs_marginal(mu, &g, &TruncationPolicy::default()).unwrap();
        assert!((m.values[0] - oracle).abs() < 1e-10);
    }

    #[test]
    fn marginal_rejects_negative_mu() {
        let g = x_grid();
        assert!(prcs_marginal(-1.0, &g, &TruncationPolicy::default()).is_err());
    }

    #[test]
    fn wigner_examples() {
        let r0 = UniformGrid::new(0.0, 0.1, 1).unwrap();
        let w = prcs_wigner_radial(0.0, &r0).unwrap();
        assert!((w.values[0] - 2.0 / PI).abs() < 1e-15);
        for &mu in &[0.178, 2.2] {
            let w0 = prcs_wigner(mu, 0.0).unwrap();
            assert!((w0 - FRAC_2_PI * (-2.0 * mu).exp()).abs() < 1e-15);
        }
        assert!(prcs_wigner(0.5, -0.1).is_err());
        assert!(prcs_wigner_radial(0.5, &UniformGrid::new(-1.0, 0.1, 3).unwrap()).is_err());
        // 4 r sqrt(mu) ~ 4e3 would overflow an unscaled I0
        let far = prcs_wigner(1e4, 10.0).unwrap();
        assert!(far.is_finite());
    }

    #[test]
    fn wigner_matches_phase_average() {
        // (1/2π) ∫ W_coh(r, φ) dφ with W_coh = (2/π) e^{-2|β - α|²}
        let mu = 0.436_f64;
        let r = 1.0_f64;
        let n = 20_000;
        let a = mu.sqrt();
        let mut acc = 0.0;
        for i in 0..n {
            let phi = 2.0 * PI * i as f64 / n as f64;
            let d2 = (r - a * phi.cos()).powi(2) + mu * phi.sin().powi(2);
            acc += FRAC_2_PI * (-2.0 * d2).exp();
        }
        let oracle = acc / n as f64;
        assert!((prcs_wigner(mu, r).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn density_matrix_examples() {
        let policy = TruncationPolicy::default();
        let vac = prcs_density_matrix(0.0, &policy).unwrap();
        assert_eq!(vac.diag[0], 1.0);
        assert!(vac.diag[1..].iter().all(|&v| v == 0.0));
        let rho = prcs_density_matrix(2.20, &policy).unwrap();
        assert!(rho.trace() >= 1.0 - policy.tail_tolerance && rho.trace() <= 1.0 + 1e-15);
        for &mu in &[0.178, 0.436, 2.2] {
            let rho = prcs_density_matrix(mu, &policy).unwrap();
            assert!((rho.diag[1] / rho.diag[0] - mu).abs() < 1e-12);
        }
    }

    #[test]
    fn single_photon_reference_values() {
        let (y1, w1) = single_photon_references(&x_grid(), &r_grid()).unwrap();
        let mid = x_grid().len() / 2;
        assert_eq!(y1.values[mid], 0.0);
        assert!((w1.values[0] + 2.0 / PI).abs() < 1e-15);
        assert!((y1.integral() - 1.0).abs() < 1e-8);
        assert!((w1.normalization() - 1.0).abs() < 1e-4);
        // the reference agrees with the k = 1 Fock density
        assert!((single_photon_marginal(0.37) - fock_quadrature_density(1, 0.37)).abs() < 1e-15);
    }
}
