//! Plot-ready data files, one per figure panel.
//!
//! - `fig2_chNN.csv`: `x, density_observed, density_theory` per channel
//!   (statistical mode only).
//! - `fig3_L{L}.csv` (theoretical) or `fig4_L{L}.csv` (statistical):
//!   `x, Y1_est, sigma, Y1_exact`.
//! - `fig5_L{L}.csv`: radial Wigner profile `r, W_est, W_exact`.

use std::path::PathBuf;

use prcs_core::calibration::read_calibrated;
use prcs_core::io::{Header, Table};
use prcs_core::quantum_math::prcs_marginal;

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result};
use crate::pipeline::{read_fits, read_metrics, Layout};

fn reread(path: &std::path::Path, stage: &'static str) -> Result<Table> {
    if !path.exists() {
        return Err(PipelineError::MissingInput {
            path: path.to_path_buf(),
            stage,
        });
    }
    Ok(Table::read(path)?)
}

/// Copies `columns` of `src` under new names, keeping its header.
fn relabel(src: &Table, path: &std::path::Path, from: &[&str], to: &[&str]) -> Result<Table> {
    let cols = from
        .iter()
        .map(|c| src.require_column(c, path))
        .collect::<prcs_core::Result<Vec<_>>>()?;
    let mut t = Table::new(src.header.clone(), to);
    t.rows = (0..src.rows.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    Ok(t)
}

pub fn emit_plot_data(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let layout = Layout::new(&cfg.out);
    let fits = read_fits(cfg)?;
    let metrics = read_metrics(cfg)?;
    let mut written = Vec::new();

    if !cfg.theoretical {
        let policy = cfg.policy()?;
        for fit in &fits {
            let src = layout.calibrated(fit.channel);
            if !src.exists() {
                return Err(PipelineError::MissingInput {
                    path: src,
                    stage: "calibrate",
                });
            }
            let (hist, _) = read_calibrated(&src)?;
            let theory = prcs_marginal(fit.mu_hat.max(0.0), &hist.grid, &policy)?;
            let mut header = Header::new();
            header
                .set("channel", fit.channel)
                .set("mu_hat", fit.mu_hat)
                .set("sigma_mu", fit.sigma_total())
                .set("delta_x", hist.delta_x);
            let mut t = Table::new(header, &["x", "density_observed", "density_theory"]);
            t.rows = hist
                .grid
                .points()
                .zip(hist.density.iter().zip(&theory.values))
                .map(|(x, (o, th))| vec![x, *o, *th])
                .collect();
            let path = layout.plot(&format!("fig2_{}.csv", Layout::channel_stem(fit.channel)));
            t.write(&path)?;
            written.push(path);
        }
    }

    let fig = if cfg.theoretical { 3 } else { 4 };
    for m in &metrics {
        let src = layout.y1(m.l);
        let t = reread(&src, "estimate")?;
        let t = relabel(
            &t,
            &src,
            &["x", "y1_est", "sigma", "y1_exact"],
            &["x", "Y1_est", "sigma", "Y1_exact"],
        )?;
        let path = layout.plot(&format!("fig{fig}_L{}.csv", m.l));
        t.write(&path)?;
        written.push(path);

        let src = layout.wigner(m.l);
        let t = reread(&src, "reconstruct")?;
        let t = relabel(
            &t,
            &src,
            &["r", "w_est", "w_exact"],
            &["r", "W_est", "W_exact"],
        )?;
        let path = layout.plot(&format!("fig5_L{}.csv", m.l));
        t.write(&path)?;
        written.push(path);
    }
    Ok(written)
}
