//! The monomial basis of the one variable Fock space.
//!
//! For a weight parameter `s > 0` the space holds entire functions with
//! `int |F(z)|^2 exp(-s |z|^2) dA < infinity`, and the monomials `z^p` are
//! orthogonal with `||z^p||^2 = pi p! / s^(p+1)`.  The laboratory never
//! uses that closed form directly: norms come out of the same folded
//! Gauss-Hermite rule that evaluates every other Fock integral, and the
//! closed form stays on the test side as an independent check.
//!
//! The basis also tabulates the translation operators
//!
//! ```text
//! (pi(w) F)(z) = exp(-s |w|^2 / 2 - s z conj(w)) F(z + w),
//! ```
//!
//! whose matrix elements in the normalized monomials are the building
//! blocks of the quaternion picture: the four dimensional representation
//! acts as `pi(w1) (x) pi(w2)` on the two variable Fock space.

use num_complex::Complex64;

use crate::quad::{gauss_hermite_folded, Rule1d};

/// Normalized monomial basis `e_p = z^p / ||z^p||`, `p < degree`, with a
/// folded Gauss-Hermite rule sized for its integrals.
#[derive(Clone, Debug)]
pub struct FockBasis {
    degree: usize,
    s: f64,
    rule: Rule1d,
    norms: Vec<f64>,
}

impl FockBasis {
    /// A basis of `degree` monomials for weight `s`, with `points` nodes
    /// per real axis.  The rule integrates `poly * exp(-s |z|^2)` exactly
    /// for per axis polynomial degree below `2 * points`, so `points` must
    /// exceed `degree` for the Gram integrals alone; translation matrices
    /// want roughly twice that for their exponential factors.
    pub fn new(degree: usize, s: f64, points: usize) -> Self {
        assert!(degree >= 1, "need at least the constant monomial");
        assert!(s > 0.0 && s.is_finite());
        assert!(
            points > degree,
            "{points} nodes cannot resolve {degree} monomials"
        );
        let rule = gauss_hermite_folded(points, s);
        let mut basis = Self { degree, s, rule, norms: Vec::new() };
        basis.norms = (0..degree).map(|p| basis.norm_sq_of_power(p).sqrt()).collect();
        basis
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Norm of the monomial `z^p` (not of the normalized basis vector).
    pub fn norm(&self, p: usize) -> f64 {
        self.norms[p]
    }

    /// `||z^p||^2` by quadrature over the plane.
    fn norm_sq_of_power(&self, p: usize) -> f64 {
        let mut acc = 0.0;
        for (xa, wa) in self.rule.nodes.iter().zip(&self.rule.weights) {
            for (xb, wb) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let r2 = xa * xa + xb * xb;
                acc += wa * wb * r2.powi(p as i32) * (-self.s * r2).exp();
            }
        }
        acc
    }

    /// Matrix of the translation by `w` in the normalized monomials, row
    /// major with `out[i * degree + j] = <pi(w) e_j, e_i>`, evaluated by
    /// quadrature of `exp(-s z conj(w)) (z + w)^j conj(z)^i` against the
    /// Gaussian.
    pub fn translate_matrix(&self, w: Complex64) -> Vec<Complex64> {
        let d = self.degree;
        let pref = (-0.5 * self.s * w.norm_sqr()).exp();
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        let mut shifted = vec![Complex64::new(0.0, 0.0); d];
        let mut conjugated = vec![Complex64::new(0.0, 0.0); d];
        for (xa, wa) in self.rule.nodes.iter().zip(&self.rule.weights) {
            for (xb, wb) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let z = Complex64::new(*xa, *xb);
                let scalar = (-self.s * z * w.conj()).exp()
                    * (pref * wa * wb * (-self.s * z.norm_sqr()).exp());
                let mut zp = Complex64::new(1.0, 0.0);
                let mut cp = Complex64::new(1.0, 0.0);
                for j in 0..d {
                    shifted[j] = zp;
                    conjugated[j] = cp;
                    zp *= z + w;
                    cp *= z.conj();
                }
                for i in 0..d {
                    let row = conjugated[i] * scalar;
                    for j in 0..d {
                        out[i * d + j] += row * shifted[j];
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] /= self.norms[i] * self.norms[j];
            }
        }
        out
    }
}
