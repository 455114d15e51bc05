//! Uniformly spaced sampling grids for quadrature and radial coordinates.

use crate::error::{Error, Result};

/// A uniform grid `start, start + step, …, start + (len - 1)·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::domain("grid must contain at least one point"));
        }
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::domain(format!(
                "grid needs a finite start and a positive finite step (start = {start}, step = {step})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// Grid covering `[lo, hi]` with spacing `step`. The upper end is included
    /// when it falls on the lattice up to rounding.
    pub fn spanning(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(hi >= lo) {
            return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
        }
        if !(step > 0.0) {
            return Err(Error::domain(format!("non-positive grid step {step}")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Self::new(lo, step, n)
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        Self::spanning(-half_width, half_width, step)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Two grids are aligned when they have the same length and their start
    /// and step agree to a small fraction of the step.
    pub fn is_aligned_with(&self, other: &UniformGrid) -> bool {
        let tol = 1e-9 * self.step.max(other.step);
        self.len == other.len
            && (self.start - other.start).abs() <= tol
            && (self.step - other.step).abs() <= tol
    }

    pub(crate) fn ensure_aligned(&self, other: &UniformGrid, what: &str) -> Result<()> {
        if self.is_aligned_with(other) {
            Ok(())
        } else {
            Err(Error::Alignment(format!(
                "{what}: grid (start {}, step {}, len {}) differs from (start {}, step {}, len {})",
                other.start, other.step, other.len, self.start, self.step, self.len
            )))
        }
    }
}

/// Trapezoid-rule integral of samples taken on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, .., last] => step * (values.iter().sum::<f64>() - 0.5 * (first + last)),
    }
}
