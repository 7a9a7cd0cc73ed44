//! Quadrature rules.
//!
//! Three families cover every integral in the crate.  Midpoint rules on
//! symmetric boxes handle plane and phase space integrals of rapidly
//! decaying functions, where the midpoint scheme is spectrally accurate and
//! its half lattice nodes keep sums of two nodes on a lattice that a single
//! table of special function values can serve.  Gauss-Legendre rules handle
//! integrals over individual cells of a grid set, where the integrand is
//! smooth but the domain has corners the big box rule cannot see.
//! Gauss-Hermite rules, folded so the weight sits in the nodes and weights
//! rather than in the integrand, handle the Gaussian weighted integrals of
//! the Fock picture exactly on polynomial data.
//!
//! Gauss nodes come from the Golub-Welsch eigenproblem of the three term
//! recurrence, which is deterministic and accurate to machine precision for
//! the small orders used here.

use nalgebra::{DMatrix, SymmetricEigen};

/// Midpoint rule on a symmetric interval: nodes sit at half lattice points
/// `(i + 1/2 - n/2) h`, so no node lies on the boundary or at zero, nodes are
/// exactly antisymmetric, and the sum of any two nodes lies on the integer
/// lattice of spacing `h`.
#[derive(Clone, Debug)]
pub struct Axis {
    pub step: f64,
    pub nodes: Vec<f64>,
}

impl Axis {
    pub fn midpoint(radius: f64, points: usize) -> Self {
        assert!(points >= 2 && points.is_multiple_of(2), "need an even node count");
        assert!(radius > 0.0);
        let step = 2.0 * radius / points as f64;
        let half = points as f64 / 2.0;
        let nodes = (0..points)
            .map(|i| (i as f64 + 0.5 - half) * step)
            .collect();
        Self { step, nodes }
    }

    /// Same spacing, `extra` additional nodes split evenly between the two
    /// ends.  Used for the inner integration variable of oscillatory
    /// kernels, which needs more reach than the outer box.
    pub fn extended(&self, extra: usize) -> Self {
        assert!(extra.is_multiple_of(2), "extension must keep the axis symmetric");
        let points = self.nodes.len() + extra;
        let half = points as f64 / 2.0;
        let nodes = (0..points)
            .map(|i| (i as f64 + 0.5 - half) * self.step)
            .collect();
        Self { step: self.step, nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Which construction produced a quadrature grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadScheme {
    /// Half lattice midpoint product rule on a symmetric box.
    Midpoint,
    /// Tensor Gauss-Legendre rule on a box.
    GaussLegendre,
    /// Folded Gauss-Hermite rule; weights absorb the Gaussian.
    GaussHermiteFolded,
}

/// A concrete multidimensional quadrature rule: node tuples, matching
/// weights, and the scheme that built it.  The heavy kernels iterate the
/// per axis factors directly for speed; this assembled form is the common
/// currency for code that only needs to sum `weight * f(node)`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub scheme: QuadScheme,
}

impl QuadratureGrid {
    /// Tensor product of per axis rules, axis major order.
    pub fn product(rules: &[Rule1d], scheme: QuadScheme) -> Self {
        assert!(!rules.is_empty());
        let mut nodes = vec![Vec::new()];
        let mut weights = vec![1.0];
        for rule in rules {
            let mut next_nodes = Vec::with_capacity(nodes.len() * rule.len());
            let mut next_weights = Vec::with_capacity(nodes.len() * rule.len());
            for (point, w) in nodes.iter().zip(&weights) {
                for i in 0..rule.len() {
                    let mut p = point.clone();
                    p.push(rule.nodes[i]);
                    next_nodes.push(p);
                    next_weights.push(w * rule.weights[i]);
                }
            }
            nodes = next_nodes;
            weights = next_weights;
        }
        Self { dim: rules.len(), nodes, weights, scheme }
    }

    /// Midpoint product rule over the symmetric box the axes span.
    pub fn from_axes(axes: &[Axis]) -> Self {
        let rules: Vec<Rule1d> = axes
            .iter()
            .map(|a| Rule1d {
                nodes: a.nodes.clone(),
                weights: vec![a.step; a.len()],
            })
            .collect();
        Self::product(&rules, QuadScheme::Midpoint)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of the weights; for box schemes this is the box volume.
    pub fn weight_sum(&self) -> f64 {
        crate::sum::stable_sum(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .collect();
        crate::sum::stable_sum(&terms)
    }
}

/// Nodes and weights of a quadrature rule on one axis.
#[derive(Clone, Debug)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Solves the Golub-Welsch eigenproblem for a symmetric three term
/// recurrence with the given off-diagonal entries.  Returns nodes sorted
/// ascending and weights `mu0 * v0^2`.
fn golub_welsch(offdiag: &[f64], mu0: f64) -> Rule1d {
    let n = offdiag.len() + 1;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in offdiag.iter().enumerate() {
        jacobi[(k, k + 1)] = b;
        jacobi[(k + 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, mu0 * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule1d {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1);
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&offdiag, 2.0)
}

/// Gauss-Legendre rule mapped to [lo, hi].
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> Rule1d {
    assert!(hi > lo);
    let base = gauss_legendre(n);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    Rule1d {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    }
}

/// Gauss-Hermite rule for the weight exp(-x^2); exact for polynomial
/// integrands of degree 2n - 1 against that weight.
pub fn gauss_hermite(n: usize) -> Rule1d {
    assert!(n >= 1);
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&offdiag, std::f64::consts::PI.sqrt())
}

/// Gauss-Hermite rule folded for plain Lebesgue integrals of functions that
/// decay like exp(-s x^2) times a polynomial: sum of `weights[i] *
/// g(nodes[i])` integrates such g exactly when the polynomial factor has
/// degree at most 2n - 1.
pub fn gauss_hermite_folded(n: usize, s: f64) -> Rule1d {
    assert!(s > 0.0);
    let base = gauss_hermite(n);
    let root = s.sqrt();
    Rule1d {
        nodes: base.nodes.iter().map(|x| x / root).collect(),
        weights: base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(x, w)| w * (x * x).exp() / root)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn double_factorial_odd(k: usize) -> f64 {
        // (2k - 1)!! with the empty product equal to 1.
        (0..k).map(|j| (2 * j + 1) as f64).product()
    }

    #[test]
    fn grid_weights_sum_to_the_box_volume() {
        let axes = [Axis::midpoint(3.0, 20), Axis::midpoint(1.5, 12)];
        let grid = QuadratureGrid::from_axes(&axes);
        assert_eq!(grid.dim, 2);
        assert_eq!(grid.len(), 240);
        assert_eq!(grid.scheme, QuadScheme::Midpoint);
        assert_abs_diff_eq!(grid.weight_sum(), 6.0 * 3.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_integrates_a_separable_gaussian() {
        let axes = [Axis::midpoint(8.0, 64), Axis::midpoint(8.0, 64)];
        let grid = QuadratureGrid::from_axes(&axes);
        let got = grid.integrate(|p| (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp());
        assert_abs_diff_eq!(got, 2.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn gauss_legendre_product_grid_matches_tensor_nodes() {
        let rules = [gauss_legendre_on(3, 0.0, 1.0), gauss_legendre_on(3, -1.0, 0.5)];
        let grid = QuadratureGrid::product(&rules, QuadScheme::GaussLegendre);
        assert_eq!(grid.len(), 9);
        let got = grid.integrate(|p| p[0] * p[0] * p[1]);
        // Integral of x^2 y over [0,1] x [-1, 1/2] is (1/3)(-3/8).
        assert_abs_diff_eq!(got, -0.125, epsilon = 1e-14);
    }

    #[test]
    fn midpoint_axis_is_exactly_antisymmetric() {
        let axis = Axis::midpoint(8.0, 200);
        for i in 0..axis.len() {
            assert_eq!(axis.nodes[i], -axis.nodes[axis.len() - 1 - i]);
        }
        assert_eq!(axis.step, 0.08);
    }

    #[test]
    fn extended_axis_shares_the_lattice() {
        let axis = Axis::midpoint(8.0, 200);
        let wide = axis.extended(64);
        assert_eq!(wide.len(), 264);
        // Every original node appears in the extension at offset 32.
        for i in 0..axis.len() {
            assert_eq!(axis.nodes[i], wide.nodes[i + 32]);
        }
    }

    #[test]
    fn midpoint_integrates_a_gaussian_spectrally() {
        // Integral of exp(-|z|^2 / 2) over the plane is 2 pi; the box at
        // radius 8 leaves a tail below 1e-13.
        let axis = Axis::midpoint(8.0, 200);
        let mut total = 0.0;
        for &x in &axis.nodes {
            for &y in &axis.nodes {
                total += (-0.5 * (x * x + y * y)).exp();
            }
        }
        total *= axis.step * axis.step;
        assert_abs_diff_eq!(total, 2.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn legendre_is_exact_on_its_degree_window() {
        for n in 1..=8 {
            let rule = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(k as i32))
                    .sum();
                let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn legendre_maps_to_cells() {
        // Integral of x^2 over [1.5, 2.0] = (2^3 - 1.5^3)/3.
        let rule = gauss_legendre_on(4, 1.5, 2.0);
        let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum();
        assert_abs_diff_eq!(got, (8.0 - 3.375) / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn hermite_matches_gaussian_moments() {
        let root_pi = std::f64::consts::PI.sqrt();
        for n in [6, 12, 20] {
            let rule = gauss_hermite(n);
            for k in 0..n {
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(2 * k as i32))
                    .sum();
                let want = double_factorial_odd(k) * root_pi / 2f64.powi(k as i32);
                // The top moments amplify machine precision node errors by
                // the degree, so the tight bound applies only on the degree
                // window the lab actually integrates.
                let epsilon = if 2 * k <= 12 { 1e-12 } else { 1e-9 };
                assert_abs_diff_eq!(got / want, 1.0, epsilon = epsilon);
            }
        }
    }

    #[test]
    fn folded_hermite_integrates_weighted_polynomials() {
        let s = 2.0;
        let rule = gauss_hermite_folded(12, s);
        for k in 0..12usize {
            let got: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(y, w)| w * y.powi(2 * k as i32) * (-s * y * y).exp())
                .sum();
            let want = double_factorial_odd(k) / (2.0 * s).powi(k as i32) * (std::f64::consts::PI / s).sqrt();
            assert_abs_diff_eq!(got / want, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hermite_weights_are_positive_and_symmetric() {
        let rule = gauss_hermite(12);
        for i in 0..rule.len() {
            assert!(rule.weights[i] > 0.0);
            assert_abs_diff_eq!(rule.nodes[i], -rule.nodes[rule.len() - 1 - i], epsilon = 1e-14);
            // The outermost weights are ~1e-7, where the eigensolver leaves
            // a few units of 1e-12 relative asymmetry.
            assert_abs_diff_eq!(
                rule.weights[i] / rule.weights[rule.len() - 1 - i],
                1.0,
                epsilon = 1e-9
            );
        }
    }
}
