use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which solver produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceLabel {
    Incident,
    Oracle,
    FoldyLax,
    Effective,
    Nystrom,
}

impl TraceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceLabel::Incident => "incident",
            TraceLabel::Oracle => "oracle",
            TraceLabel::FoldyLax => "foldy_lax",
            TraceLabel::Effective => "effective",
            TraceLabel::Nystrom => "nystrom",
        }
    }
}

impl fmt::Display for TraceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A complex field sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    label: TraceLabel,
}

impl FieldTrace {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, label: TraceLabel) -> Result<Self> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::Numerical(format!(
                "trace has {} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Numerical(format!(
                "{label} trace has non-finite values"
            )));
        }
        Ok(Self {
            grid,
            values,
            label,
        })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: &[f64], label: TraceLabel, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        validate_grid(grid)?;
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid.to_vec(), values, label)
    }

    /// The incident wave `e^{iκt}`.
    pub fn incident(grid: &[f64], kappa: f64) -> Result<Self> {
        Self::from_fn(grid, TraceLabel::Incident, |t| Complex64::cis(kappa * t))
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> TraceLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest pointwise modulus of the difference to `other` on a shared grid.
    pub fn sup_distance(&self, other: &FieldTrace) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Numerical(format!(
                "{} and {} traces live on different grids",
                self.label, other.label
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty("time grid"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Numerical("time grid has non-finite points".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Numerical(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `samples` evenly spaced points on `[start, end]` (one point when `samples == 1`).
pub fn uniform_grid(start: f64, end: f64, samples: usize) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::Empty("time grid"));
    }
    if samples == 1 {
        return Ok(vec![start]);
    }
    if !(end > start) {
        return Err(Error::param(
            "grid",
            format!("need t_max > t_min, got [{start}, {end}]"),
        ));
    }
    let step = (end - start) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            if i + 1 == samples {
                end
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}
