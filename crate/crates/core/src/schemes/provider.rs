use crate::caputo::{weights, weights_l1, FractionalOrder, L1Table, L21SigmaTable};

/// Time weights of a scheme in the weighted family.
///
/// For the step producing layer `j + 1`, `weights(j)` returns
/// `g_0^{j+1}, …, g_j^{j+1}`, where `g_s` multiplies `y^{s+1} − y^s`, and
/// `sigma(j)` the blend `σ_{j+1}` of the spatial operator.
pub trait WeightProvider: Send + Sync {
    fn tau(&self) -> f64;

    fn weights(&self, j: usize) -> Vec<f64>;

    fn sigma(&self, j: usize) -> f64;

    /// Where coefficients and sources are sampled: `t_{j+σ}`.
    fn collocation_time(&self, j: usize) -> f64 {
        (j as f64 + self.sigma(j)) * self.tau()
    }
}

/// `g_s^{j+1} = c_{j−s} τ^{−α}/Γ(2−α)`, `σ = 1 − α/2`.
#[derive(Debug, Clone)]
pub struct L21SigmaProvider {
    table: L21SigmaTable,
    tau: f64,
    scale: f64,
}

impl L21SigmaProvider {
    /// Precomputes weights for `steps` time steps; later steps are computed
    /// on demand.
    pub fn new(order: FractionalOrder, tau: f64, steps: usize) -> Self {
        Self { table: L21SigmaTable::new(order, steps.max(1)), tau, scale: order.scale(tau) }
    }

    pub fn order(&self) -> FractionalOrder {
        self.table.order()
    }
}

impl WeightProvider for L21SigmaProvider {
    fn tau(&self) -> f64 {
        self.tau
    }

    fn weights(&self, j: usize) -> Vec<f64> {
        if j > self.table.max_index() {
            return weights(self.table.order(), j, self.tau).increment_weights();
        }
        (0..=j).map(|s| self.scale * self.table.coefficient(j, j - s)).collect()
    }

    fn sigma(&self, _j: usize) -> f64 {
        self.table.order().sigma()
    }
}

/// Uniform L1 weights with a fully implicit blend (`σ = 1`), sampled at
/// `t_{j+1}`.
#[derive(Debug, Clone)]
pub struct L1Provider {
    order: FractionalOrder,
    table: L1Table,
    tau: f64,
    scale: f64,
}

impl L1Provider {
    pub fn new(order: FractionalOrder, tau: f64, steps: usize) -> Self {
        Self { order, table: L1Table::new(order, steps.max(1)), tau, scale: order.scale(tau) }
    }
}

impl WeightProvider for L1Provider {
    fn tau(&self) -> f64 {
        self.tau
    }

    fn weights(&self, j: usize) -> Vec<f64> {
        if j > self.table.max_index() {
            return weights_l1(self.order, j, self.tau).increment_weights();
        }
        (0..=j).map(|s| self.scale * self.table.coefficient(j - s)).collect()
    }

    fn sigma(&self, _j: usize) -> f64 {
        1.0
    }
}

/// Wraps a provider and replaces its blend parameter.
#[derive(Debug, Clone)]
pub struct SigmaOverride<P> {
    pub inner: P,
    pub sigma: f64,
}

impl<P: WeightProvider> WeightProvider for SigmaOverride<P> {
    fn tau(&self) -> f64 {
        self.inner.tau()
    }

    fn weights(&self, j: usize) -> Vec<f64> {
        self.inner.weights(j)
    }

    fn sigma(&self, _j: usize) -> f64 {
        self.sigma
    }
}
