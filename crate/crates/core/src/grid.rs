//! Spatial meshes, grid functions, discrete norms and convergence orders.

use crate::{Error, Result};

/// Uniform mesh `x_i = i·h`, `i = 0..=n`, on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    n: usize,
    h: f64,
    length: f64,
}

impl SpaceGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 subintervals, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { n, h: length / n as f64, length })
    }

    /// Number of subintervals `N`.
    #[inline]
    pub fn intervals(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn interior(&self) -> usize {
        self.n - 1
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `x_i`; the last node is pinned to `length` exactly.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i == self.n {
            self.length
        } else {
            i as f64 * self.h
        }
    }

    /// `x_{i−1/2}`.
    #[inline]
    pub fn x_half(&self, i: usize) -> f64 {
        (i as f64 - 0.5) * self.h
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=self.n).map(|i| f(self.x(i))).collect()
    }
}

/// Values of a grid function on all nodes at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLayer {
    pub values: Vec<f64>,
    pub time: f64,
}

impl GridLayer {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        Self { values, time }
    }

    pub fn zeros(grid: &SpaceGrid, time: f64) -> Self {
        Self { values: vec![0.0; grid.nodes()], time }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All computed time layers of a run, oldest first.
///
/// Layers can only be appended; the nonlocal time operator needs every one
/// of them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionHistory {
    layers: Vec<GridLayer>,
}

impl SolutionHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_initial(layer: GridLayer) -> Self {
        Self { layers: vec![layer] }
    }

    pub fn push(&mut self, layer: GridLayer) {
        self.layers.push(layer);
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layer(&self, j: usize) -> &GridLayer {
        &self.layers[j]
    }

    pub fn last(&self) -> Option<&GridLayer> {
        self.layers.last()
    }

    pub fn layers(&self) -> &[GridLayer] {
        &self.layers
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GridLayer> {
        self.layers.iter()
    }
}

/// `sqrt(h · Σ_{i=1}^{N−1} v_i²)` over interior nodes of a full-node slice.
pub fn l2_norm_values(values: &[f64], h: f64) -> f64 {
    l2_norm_sq_values(values, h).sqrt()
}

pub(crate) fn l2_norm_sq_values(values: &[f64], h: f64) -> f64 {
    if values.len() < 3 {
        return 0.0;
    }
    h * values[1..values.len() - 1].iter().map(|v| v * v).sum::<f64>()
}

/// Discrete `L2` norm; boundary nodes are excluded.
pub fn l2_norm(layer: &GridLayer, grid: &SpaceGrid) -> Result<f64> {
    if layer.len() != grid.nodes() {
        return Err(Error::LengthMismatch { expected: grid.nodes(), actual: layer.len() });
    }
    Ok(l2_norm_values(&layer.values, grid.h()))
}

/// Largest absolute value over every node of every layer.
pub fn max_norm(history: &SolutionHistory) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    Ok(history
        .iter()
        .flat_map(|l| l.values.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Observed orders `log(e1/e2) / log(s1/s2)` between consecutive
/// `(step_size, error)` levels.
pub fn convergence_order(levels: &[(f64, f64)]) -> Result<Vec<f64>> {
    if levels.len() < 2 {
        return Err(Error::InvalidConvergenceData(format!(
            "need at least two levels, got {}",
            levels.len()
        )));
    }
    for (i, &(step, err)) in levels.iter().enumerate() {
        if !(err > 0.0) || !err.is_finite() {
            return Err(Error::InvalidConvergenceData(format!("level {i}: error must be positive, got {err}")));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidConvergenceData(format!("level {i}: step must be positive, got {step}")));
        }
    }
    levels
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let (s1, e1) = w[0];
            let (s2, e2) = w[1];
            if s2 >= s1 {
                return Err(Error::InvalidConvergenceData(format!(
                    "step sizes must strictly decrease (level {} -> {}: {s1} -> {s2})",
                    i,
                    i + 1
                )));
            }
            Ok((e1 / e2).ln() / (s1 / s2).ln())
        })
        .collect()
}
