//! Single-photon Wigner function and density matrix as λ-weighted
//! combinations of phase-randomized coherent-state quantities, plus the
//! quality metrics reported for each reconstruction.

use crate::decoy::DecoyWeights;
use crate::error::Result;
use crate::grid::UniformGrid;
use crate::quantum_math::{
    poisson_weights, prcs_wigner_radial, DiagonalFockState, RadialWignerProfile, TruncationPolicy,
};

/// Diagonal entries below this are counted as negative eigenvalues.
pub const NEGATIVE_EIGENVALUE_GUARD: f64 = 1e-12;

/// Characteristics of a reconstructed density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub trace: f64,
    /// `‖ρ − |1⟩⟨1|‖ = Tr[(ρ − |1⟩⟨1|)(ρ − |1⟩⟨1|)†]^{1/2}`
    pub distance_to_single_photon: f64,
    pub min_eigenvalue: f64,
    pub has_negative_eigenvalue: bool,
    pub k_max: usize,
}

/// `W^est(r) = λ_0 W_0(r) + Σ_j λ_j W_{μ_j}(r)`.
pub fn reconstruct_wigner(
    weights: &DecoyWeights,
    r_grid: &UniformGrid,
) -> Result<RadialWignerProfile> {
    let mut out = prcs_wigner_radial(0.0, r_grid)?;
    for v in out.values.iter_mut() {
        *v *= weights.lambda[0];
    }
    for (lambda, &mu) in weights.lambda[1..].iter().zip(weights.source.mus()) {
        let w = prcs_wigner_radial(mu, r_grid)?;
        for (o, v) in out.values.iter_mut().zip(&w.values) {
            *o += lambda * v;
        }
    }
    Ok(out)
}

/// `ρ^est = λ_0 |0⟩⟨0| + Σ_j λ_j ρ_{μ_j}`, truncated at `K(max μ)`.
///
/// Every `ρ_μ` is diagonal in the Fock basis, so the diagonal entries of the
/// result are its eigenvalues.
pub fn reconstruct_density_matrix(
    weights: &DecoyWeights,
    policy: &TruncationPolicy,
) -> Result<DiagonalFockState> {
    let mu_max = weights.source.mus().iter().copied().fold(0.0, f64::max);
    let k_max = policy.order(mu_max)?;
    let mut diag = vec![0.0; k_max + 1];
    diag[0] = weights.lambda[0];
    for (lambda, &mu) in weights.lambda[1..].iter().zip(weights.source.mus()) {
        for (d, p) in diag.iter_mut().zip(poisson_weights(mu, k_max)?) {
            *d += lambda * p;
        }
    }
    DiagonalFockState::new(diag)
}

pub fn quality_metrics(rho_est: &DiagonalFockState) -> ReconstructionReport {
    let trace = rho_est.trace();
    let distance_to_single_photon = rho_est
        .diag
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let diff = if k == 1 { d - 1.0 } else { d };
            diff * diff
        })
        .sum::<f64>()
        .sqrt();
    // |1⟩⟨1| always has a k = 1 entry, even if the estimate was truncated at 0
    let distance_to_single_photon = if rho_est.k_max() == 0 {
        (distance_to_single_photon.powi(2) + 1.0).sqrt()
    } else {
        distance_to_single_photon
    };
    let min_eigenvalue = rho_est.diag.iter().copied().fold(f64::INFINITY, f64::min);
    ReconstructionReport {
        trace,
        distance_to_single_photon,
        min_eigenvalue,
        has_negative_eigenvalue: min_eigenvalue < -NEGATIVE_EIGENVALUE_GUARD,
        k_max: rho_est.k_max(),
    }
}
