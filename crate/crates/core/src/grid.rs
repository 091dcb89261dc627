//! Uniform grid on `[-1, 1]`, finite-difference operators and discrete norms.
//!
//! All node-indexed vectors have length `N + 2`: index `0` and `N + 1` are
//! the boundary nodes `x = -1` and `x = 1`, indices `1..=N` are interior.
//! Difference operators return interior vectors of length `N` whose entry
//! `k` belongs to node `j = k + 1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_interior: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// Grid with `n_interior` interior nodes and spacing `h = 2 / (N + 1)`.
    ///
    /// Nodes are computed as `(2j - (N + 1)) / (N + 1)`, which puts the
    /// endpoints exactly at `-1` and `1` and makes the grid exactly symmetric
    /// under `j -> N + 1 - j`.
    pub fn new(n_interior: usize) -> Result<Self> {
        if n_interior == 0 {
            return Err(Error::invalid_argument("grid needs at least one interior node"));
        }
        let intervals = (n_interior + 1) as f64;
        let nodes = (0..n_interior + 2)
            .map(|j| (2.0 * j as f64 - intervals) / intervals)
            .collect();
        Ok(Self {
            n_interior,
            h: 2.0 / intervals,
            nodes,
        })
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Total node count, `N + 2`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Index of the mirror node under `x -> -x`.
    pub fn reflect_index(&self, j: usize) -> usize {
        self.n_interior + 1 - j
    }

    /// Interior node closest to `x`, lowest index on ties.
    pub fn nearest_interior(&self, x: f64) -> usize {
        let mut best = 1;
        let mut best_dist = f64::INFINITY;
        for j in 1..=self.n_interior {
            let d = (self.nodes[j] - x).abs();
            if d < best_dist {
                best = j;
                best_dist = d;
            }
        }
        best
    }
}

/// Convenience constructor mirroring [`Grid::new`].
pub fn build_grid(n_interior: usize) -> Result<Grid> {
    Grid::new(n_interior)
}

/// Node values aligned with a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
        }
    }

    /// Wraps raw node values; the length must match the grid.
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid_argument(format!(
                "grid function has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { values })
    }

    /// Builds a Dirichlet field from interior values; boundary entries are zero.
    pub fn from_interior(grid: &Grid, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.n_interior() {
            return Err(Error::invalid_argument(format!(
                "expected {} interior values, got {}",
                grid.n_interior(),
                interior.len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        Ok(Self { values })
    }

    /// Samples `f` at every node, boundary included.
    pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    /// Samples `f` at interior nodes and pins both boundary entries to zero.
    pub fn sample_dirichlet(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let mut u = Self::sample(grid, f);
        u.clamp_boundary();
        u
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn clamp_boundary(&mut self) {
        let last = self.values.len() - 1;
        self.values[0] = 0.0;
        self.values[last] = 0.0;
    }

    pub fn is_dirichlet(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.values.len() - 1] == 0.0
    }

    /// Mirror image under `x -> -x`.
    pub fn reflected(&self) -> Self {
        Self {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_aligned(&self, grid: &Grid) -> Result<()> {
        if self.values.len() != grid.len() {
            return Err(Error::invalid_argument(format!(
                "grid function has {} values, grid has {} nodes",
                self.values.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}

/// Spacing suggested by the mesh-size rule
/// `min(h0, ((2 / (b_inf q)) M^(1 - q))^(1 / (2 - q)))`.
///
/// The rule only constrains `h` when the gradient term is present; with
/// `b_inf == 0` it degenerates to `h0`.
pub fn mesh_rule(h0: f64, b_inf: f64, q: f64, m: f64) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::invalid_argument("h0 must be positive"));
    }
    if !(q < 2.0) {
        return Err(Error::invalid_argument(format!("mesh rule needs q < 2, got {q}")));
    }
    if !(m > 0.0) {
        return Err(Error::invalid_argument("sup-norm bound M must be positive"));
    }
    if b_inf < 0.0 || !b_inf.is_finite() {
        return Err(Error::invalid_argument("b_inf must be a nonnegative real"));
    }
    if b_inf == 0.0 {
        return Ok(h0);
    }
    let bound = (2.0 / (b_inf * q) * m.powf(1.0 - q)).powf(1.0 / (2.0 - q));
    Ok(h0.min(bound))
}

fn interior_map(u: &GridFunction, grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> Result<Vec<f64>> {
    u.check_aligned(grid)?;
    Ok(u.values().windows(3).map(|w| f(w[0], w[1], w[2])).collect())
}

/// `(u[j+1] - 2 u[j] + u[j-1]) / h^2` at interior nodes.
pub fn second_difference(u: &GridFunction, grid: &Grid) -> Result<Vec<f64>> {
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    interior_map(u, grid, |l, c, r| second_diff(l, c, r, inv_h2))
}

/// `(u[j+1] - u[j-1]) / (2h)` at interior nodes.
pub fn central_difference(u: &GridFunction, grid: &Grid) -> Result<Vec<f64>> {
    let inv_2h = 0.5 / grid.h();
    interior_map(u, grid, |l, _, r| (r - l) * inv_2h)
}

/// `(u[j+1] - u[j]) / h` at interior nodes.
pub fn forward_difference(u: &GridFunction, grid: &Grid) -> Result<Vec<f64>> {
    let h = grid.h();
    interior_map(u, grid, |_, c, r| (r - c) / h)
}

/// `(u[j] - u[j-1]) / h` at interior nodes.
pub fn backward_difference(u: &GridFunction, grid: &Grid) -> Result<Vec<f64>> {
    let h = grid.h();
    interior_map(u, grid, |l, c, _| (c - l) / h)
}

// Neighbours are summed first so mirrored inputs give bitwise mirrored output.
#[inline]
pub(crate) fn second_diff(left: f64, center: f64, right: f64, inv_h2: f64) -> f64 {
    ((left + right) - 2.0 * center) * inv_h2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

/// Discrete norm of a grid function.
///
/// Finite orders use the interior weighted sum `(sum_{j=1..N} h |u_j|^a)^(1/a)`;
/// the sup-norm runs over every node, boundary included.
pub fn discrete_norm(u: &GridFunction, grid: &Grid, order: NormOrder) -> Result<f64> {
    u.check_aligned(grid)?;
    match order {
        NormOrder::Infinity => Ok(u.sup_norm()),
        NormOrder::Finite(alpha) => {
            if !(alpha >= 1.0) || !alpha.is_finite() {
                return Err(Error::invalid_argument(format!("norm order must be >= 1, got {alpha}")));
            }
            Ok(weighted_norm(u.interior(), grid.h(), alpha))
        }
    }
}

pub(crate) fn weighted_norm(interior: &[f64], h: f64, alpha: f64) -> f64 {
    let sum: f64 = interior.iter().map(|v| h * v.abs().powf(alpha)).sum();
    sum.powf(1.0 / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gf(grid: &Grid, v: &[f64]) -> GridFunction {
        GridFunction::from_values(grid, v.to_vec()).unwrap()
    }

    #[test]
    fn grid_n3() {
        let g = build_grid(3).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_n1() {
        let g = build_grid(1).unwrap();
        assert_eq!(g.h(), 1.0);
        assert_eq!(g.nodes(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn grid_rejects_zero() {
        assert!(matches!(build_grid(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_endpoints_exact_and_symmetric() {
        for n in [1, 2, 7, 100, 201, 1000] {
            let g = build_grid(n).unwrap();
            assert_eq!(g.x(0), -1.0);
            assert_eq!(g.x(n + 1), 1.0);
            for j in 0..g.len() {
                assert_eq!(g.x(j), -g.x(g.reflect_index(j)));
                if j > 0 {
                    assert_relative_eq!(g.x(j) - g.x(j - 1), g.h(), max_relative = 1e-12);
                    assert!(g.x(j) > g.x(j - 1));
                }
            }
        }
    }

    #[test]
    fn mesh_rule_examples() {
        assert_relative_eq!(
            mesh_rule(0.05, 1.0, 1.5, 100.0).unwrap(),
            (4.0_f64 / 3.0 * 0.1).powi(2),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            mesh_rule(0.05, 1.0, 1.5, 100.0).unwrap(),
            0.017777777777777778,
            max_relative = 1e-12
        );
        assert_eq!(mesh_rule(0.01, 1.0, 1.5, 100.0).unwrap(), 0.01);
        assert_eq!(mesh_rule(0.1, 2.0, 1.5, 1.0).unwrap(), 0.1);
        assert_eq!(mesh_rule(0.3, 0.0, 1.5, 10.0).unwrap(), 0.3);
        assert!(matches!(mesh_rule(0.1, 1.0, 2.0, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn second_difference_examples() {
        let g = build_grid(3).unwrap();
        let d2 = second_difference(&gf(&g, &[0.0, 1.0, 2.0, 1.0, 0.0]), &g).unwrap();
        assert_eq!(d2, vec![0.0, -8.0, 0.0]);

        let g = build_grid(9).unwrap();
        let affine = GridFunction::sample(&g, |x| 0.3 - 1.7 * x);
        for v in second_difference(&affine, &g).unwrap() {
            assert!(v.abs() < 1e-12, "{v}");
        }
        let quad = GridFunction::sample(&g, |x| x * x);
        for v in second_difference(&quad, &g).unwrap() {
            assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn central_difference_examples() {
        let g = build_grid(3).unwrap();
        let u = gf(&g, &[0.0, 1.0, 2.0, 1.0, 0.0]);
        assert_eq!(central_difference(&u, &g).unwrap(), vec![2.0, 0.0, -2.0]);
        assert_eq!(forward_difference(&u, &g).unwrap(), vec![2.0, -2.0, -2.0]);
        assert_eq!(backward_difference(&u, &g).unwrap(), vec![2.0, 2.0, -2.0]);

        let c = gf(&g, &[4.0; 5]);
        assert_eq!(central_difference(&c, &g).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn operators_reject_misaligned_input() {
        let g = build_grid(3).unwrap();
        let other = build_grid(4).unwrap();
        let u = GridFunction::zeros(&other);
        assert!(second_difference(&u, &g).is_err());
        assert!(central_difference(&u, &g).is_err());
        assert!(discrete_norm(&u, &g, NormOrder::Infinity).is_err());
        assert!(GridFunction::from_values(&g, vec![0.0; 4]).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = build_grid(1).unwrap();
        let z = GridFunction::zeros(&g);
        for order in [NormOrder::Finite(1.0), NormOrder::Finite(2.5), NormOrder::Infinity] {
            assert_eq!(discrete_norm(&z, &g, order).unwrap(), 0.0);
        }
        let u = gf(&g, &[0.0, 2.0, 0.0]);
        assert_eq!(discrete_norm(&u, &g, NormOrder::Finite(2.0)).unwrap(), 2.0);

        let g2 = build_grid(2).unwrap();
        let v = gf(&g2, &[0.0, -3.0, 1.0, 0.0]);
        assert_eq!(discrete_norm(&v, &g2, NormOrder::Infinity).unwrap(), 3.0);
        assert!(matches!(
            discrete_norm(&v, &g2, NormOrder::Finite(0.5)),
            Err(Error::InvalidArgument(_))
        ));
    }

    fn field() -> impl Strategy<Value = (Grid, GridFunction)> {
        (1usize..40).prop_flat_map(|n| {
            proptest::collection::vec(-100.0f64..100.0, n).prop_map(move |interior| {
                let g = build_grid(n).unwrap();
                let u = GridFunction::from_interior(&g, &interior).unwrap();
                (g, u)
            })
        })
    }

    proptest! {
        #[test]
        fn central_is_mean_of_one_sided((g, u) in field()) {
            let c = central_difference(&u, &g).unwrap();
            let f = forward_difference(&u, &g).unwrap();
            let b = backward_difference(&u, &g).unwrap();
            for k in 0..c.len() {
                let mean = 0.5 * (f[k] + b[k]);
                prop_assert!((c[k] - mean).abs() <= 1e-12 * (1.0 + c[k].abs()));
            }
        }

        #[test]
        fn reflection_symmetry_of_differences((g, u) in field()) {
            let r = u.reflected();
            let d2 = second_difference(&u, &g).unwrap();
            let d2r = second_difference(&r, &g).unwrap();
            let d1 = central_difference(&u, &g).unwrap();
            let d1r = central_difference(&r, &g).unwrap();
            let n = d2.len();
            for k in 0..n {
                prop_assert_eq!(d2[k], d2r[n - 1 - k]);
                prop_assert_eq!(d1[k], -d1r[n - 1 - k]);
            }
        }

        #[test]
        fn sup_norm_dominates_weighted_norms((g, u) in field(), alpha in 1.0f64..6.0) {
            let sup = discrete_norm(&u, &g, NormOrder::Infinity).unwrap();
            let na = discrete_norm(&u, &g, NormOrder::Finite(alpha)).unwrap();
            prop_assert!(sup >= 0.5f64.powf(1.0 / alpha) * na * (1.0 - 1e-12));
            let n2 = discrete_norm(&u, &g, NormOrder::Finite(2.0)).unwrap();
            prop_assert!(sup <= n2 / g.h().sqrt() * (1.0 + 1e-12));
        }
    }
}
