//! Composite midpoint quadrature on an interval with cell boundaries placed
//! on known breakpoints of the integrand.

/// Default number of cells on the normalized frequency torus.
pub const DEFAULT_PHI_CELLS: usize = 2048;

/// Midpoint nodes and their weights (cell widths).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Uniform midpoint rule with `cells` cells on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, cells: usize) -> Self {
        Self::aligned(lo, hi, cells, &[])
    }

    /// Midpoint rule with roughly `cells` cells on `[lo, hi]` such that every
    /// breakpoint strictly inside the interval is a cell boundary.
    ///
    /// Cells are distributed over the segments in proportion to their length,
    /// with at least one cell per segment.
    pub fn aligned(lo: f64, hi: f64, cells: usize, breakpoints: &[f64]) -> Self {
        assert!(hi > lo, "empty quadrature interval [{lo}, {hi}]");
        let cells = cells.max(1);
        let width = hi - lo;
        let snap = 1e-12 * width;

        let mut edges: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > lo + snap && *b < hi - snap)
            .collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() <= snap);
        edges.insert(0, lo);
        edges.push(hi);

        let mut nodes = Vec::with_capacity(cells + edges.len());
        let mut weights = Vec::with_capacity(cells + edges.len());
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let count = ((cells as f64) * (b - a) / width).round().max(1.0) as usize;
            let h = (b - a) / count as f64;
            for j in 0..count {
                nodes.push(a + (j as f64 + 0.5) * h);
                weights.push(h);
            }
        }
        QuadratureGrid { nodes, weights }
    }

    /// The same grid under the affine map `x -> scale * x`.
    pub fn scaled(&self, scale: f64) -> Self {
        QuadratureGrid {
            nodes: self.nodes.iter().map(|x| x * scale).collect(),
            weights: self.weights.iter().map(|w| w * scale.abs()).collect(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Reduce `x` into `[-1/2, 1/2]` modulo one.
pub fn fold_unit(x: f64) -> f64 {
    x - x.round()
}

/// Grid on the normalized frequency torus `[-1/2, 1/2]`, aligned to the
/// given breakpoints after folding them modulo one.
pub fn phi_grid(cells: usize, breakpoints: &[f64]) -> QuadratureGrid {
    let folded: Vec<f64> = breakpoints.iter().map(|&b| fold_unit(b)).collect();
    QuadratureGrid::aligned(-0.5, 0.5, cells, &folded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        let g = QuadratureGrid::aligned(-1.0, 2.0, 300, &[0.1, 0.7, 5.0, -3.0]);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 3.0).abs() < 1e-13);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn breakpoints_become_cell_boundaries() {
        let g = QuadratureGrid::aligned(0.0, 1.0, 100, &[0.3337]);
        // A step at the breakpoint integrates exactly.
        let v = g.integrate(|x| if x < 0.3337 { 1.0 } else { 0.0 });
        assert!((v - 0.3337).abs() < 1e-14);
    }

    #[test]
    fn midpoint_exact_for_linear() {
        let g = QuadratureGrid::uniform(-0.5, 0.5, 17);
        assert!((g.integrate(|x| 3.0 * x + 2.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fold_unit_range() {
        for x in [-3.2, -0.5, 0.0, 0.49, 1.75, 12.5001] {
            let y = fold_unit(x);
            assert!((-0.5..=0.5).contains(&y));
            assert!(((x - y) - (x - y).round()).abs() < 1e-12);
        }
    }
}
