use proptest::prelude::*;

use prcs_core::decoy::{decoy_weights, estimate_y1, MeanPhotonSet, QuadratureCurve};
use prcs_core::quantum_math::{
    fock_mixture_marginal, prcs_marginal, single_photon_marginal, MarginalDensity, TruncationPolicy,
};
use prcs_core::reconstruct::{quality_metrics, reconstruct_density_matrix};
use prcs_core::UniformGrid;

const MUS: [f64; 3] = [0.178, 0.436, 2.20];

fn grid() -> UniformGrid {
    UniformGrid::symmetric(6.0, 0.01).unwrap()
}

fn curves(mus: &[f64], grid: &UniformGrid) -> (MarginalDensity, Vec<MarginalDensity>) {
    let p = TruncationPolicy::default();
    (
        prcs_marginal(0.0, grid, &p).unwrap(),
        mus.iter()
            .map(|&m| prcs_marginal(m, grid, &p).unwrap())
            .collect(),
    )
}

fn max_deviation(values: &[f64], grid: &UniformGrid) -> f64 {
    grid.points()
        .zip(values)
        .map(|(x, y)| (y - single_photon_marginal(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn estimate_converges_with_more_mean_photon_numbers() {
    let g = grid();
    let (vac, cs) = curves(&MUS, &g);
    let set = MeanPhotonSet::exact(MUS.to_vec()).unwrap();
    let dev: Vec<f64> = (1..=3)
        .map(|l| {
            let w = decoy_weights(&set.prefix(l).unwrap()).unwrap();
            let refs: Vec<_> = cs[..l].iter().collect();
            max_deviation(&estimate_y1(&w, &vac, &refs).unwrap().values, &g)
        })
        .collect();
    assert!(dev[2] < dev[0], "{dev:?}");
}

#[test]
fn distance_decreases_and_trace_is_lambda_sum() {
    let p = TruncationPolicy::default();
    let set = MeanPhotonSet::exact(MUS.to_vec()).unwrap();
    let mut last = f64::INFINITY;
    for l in 1..=3 {
        let w = decoy_weights(&set.prefix(l).unwrap()).unwrap();
        let rho = reconstruct_density_matrix(&w, &p).unwrap();
        let m = quality_metrics(&rho);
        assert!((m.trace - w.sum()).abs() < 1e-10, "L={l}");
        assert!(m.distance_to_single_photon < last, "L={l}");
        last = m.distance_to_single_photon;
    }
}

#[test]
fn marginal_from_density_matrix_matches_direct_estimate() {
    let g = UniformGrid::symmetric(3.0, 0.01).unwrap();
    let (vac, cs) = curves(&MUS, &g);
    let set = MeanPhotonSet::exact(MUS.to_vec()).unwrap();
    for l in 1..=3 {
        let w = decoy_weights(&set.prefix(l).unwrap()).unwrap();
        let refs: Vec<_> = cs[..l].iter().collect();
        let direct = estimate_y1(&w, &vac, &refs).unwrap();
        let rho = reconstruct_density_matrix(&w, &TruncationPolicy::default()).unwrap();
        let via_rho = fock_mixture_marginal(&rho.diag, &g);
        for (a, b) in direct.values.iter().zip(&via_rho.values) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

/// Curve scaled by a constant, to exercise linearity through the trait.
struct Scaled {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl QuadratureCurve for Scaled {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn values(&self) -> &[f64] {
        &self.values
    }
}

fn scaled(c: &MarginalDensity, k: f64) -> Scaled {
    Scaled {
        grid: c.grid,
        values: c.values.iter().map(|v| v * k).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn single_mu_weights_reduce_to_closed_form(mu in 0.01f64..5.0) {
        let w = decoy_weights(&MeanPhotonSet::exact(vec![mu]).unwrap()).unwrap();
        let l0 = -1.0 / mu;
        let l1 = mu.exp() / mu;
        prop_assert!((w.lambda[0] - l0).abs() <= 1e-12 * l0.abs());
        prop_assert!((w.lambda[1] - l1).abs() <= 1e-12 * l1);
    }

    #[test]
    fn estimate_is_linear_in_the_curves(k in 0.01f64..100.0, mu1 in 0.05f64..1.0, gap in 0.05f64..2.0) {
        let g = UniformGrid::symmetric(4.0, 0.05).unwrap();
        let mus = [mu1, mu1 + gap];
        let (vac, cs) = curves(&mus, &g);
        let w = decoy_weights(&MeanPhotonSet::exact(mus.to_vec()).unwrap()).unwrap();
        let base = estimate_y1(&w, &vac, &cs.iter().collect::<Vec<_>>()).unwrap();
        let svac = scaled(&vac, k);
        let scs: Vec<Scaled> = cs.iter().map(|c| scaled(c, k)).collect();
        let est = estimate_y1(&w, &svac, &scs.iter().collect::<Vec<_>>()).unwrap();
        for (a, b) in base.values.iter().zip(&est.values) {
            prop_assert!((a * k - b).abs() <= 1e-12 * (1.0 + (a * k).abs()));
        }
    }

    #[test]
    fn marginal_is_even_and_nonnegative(mu in 0.0f64..6.0) {
        let g = grid();
        let m = prcs_marginal(mu, &g, &TruncationPolicy::default()).unwrap();
        let n = m.values.len();
        for i in 0..n {
            prop_assert!(m.values[i] >= -1e-12);
            prop_assert!((m.values[i] - m.values[n - 1 - i]).abs() <= 1e-12);
        }
        prop_assert!((m.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn parity_holds_for_random_sets(a in 0.05f64..0.5, b in 0.6f64..1.5, c in 1.6f64..3.0) {
        let g = UniformGrid::symmetric(6.0, 0.05).unwrap();
        let mus = [a, b, c];
        let (vac, cs) = curves(&mus, &g);
        let set = MeanPhotonSet::exact(mus.to_vec()).unwrap();
        for l in 1..=3 {
            let w = decoy_weights(&set.prefix(l).unwrap()).unwrap();
            let est = estimate_y1(&w, &vac, &cs[..l].iter().collect::<Vec<_>>()).unwrap();
            let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
            for (x, y) in g.points().zip(&est.values) {
                prop_assert!(sign * (y - single_photon_marginal(x)) >= -1e-9, "L={} x={}", l, x);
            }
        }
    }
}
