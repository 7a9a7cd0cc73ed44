//! The quaternion Heisenberg group in its Fock realisation.
//!
//! Points of the quaternion algebra are written `q = (q0, q1, q2, q3)` and
//! folded into two complex coordinates
//!
//! ```text
//! z1 = q0 + i q1,          z2 = q3 + i q2,
//! ```
//!
//! under which the representation attached to a central parameter of
//! modulus `|a|` acts on the Fock space of entire functions of `(z1, z2)`
//! square integrable against `exp(-s |z|^2)` with `s = 2 |a|`:
//!
//! ```text
//! (pi(q) F)(z) = exp(-s |q|^2 / 2 - s z . conj(q)) F(z + q),
//! ```
//!
//! where `q` on the right stands for its complex pair and `z . w` is the
//! bilinear dot product of the pairs.  Composing two such operators yields
//! the product law
//!
//! ```text
//! pi(q') pi(q) = exp(-i s Im(q' . conj(q))) pi(q' + q),
//! ```
//!
//! and the exponent is exactly twice the symplectic pairing in quaternion
//! coordinates, `|a| (-q1' q0 + q0' q1 + q3' q2 - q2' q3)`.
//!
//! The representation is square integrable modulo the centre: matrix
//! coefficients are polynomials times `exp(-s |q|^2 / 2)`, so every
//! integral the laboratory needs is a Gaussian weighted polynomial
//! integral, which the folded Gauss-Hermite grid evaluates exactly.

mod engine;
mod fock;
mod function;

pub use engine::QuatEngine;
pub use fock::FockBasis;
pub use function::{QuatPolynomial, SampledFunction4};

/// A point of the quaternion algebra, componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self { q0, q1, q2, q3 }
    }

    /// First complex coordinate `q0 + i q1`.
    pub fn z1(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.q0, self.q1)
    }

    /// Second complex coordinate `q3 + i q2`.
    pub fn z2(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.q3, self.q2)
    }

    pub fn from_pair(z1: num_complex::Complex64, z2: num_complex::Complex64) -> Self {
        Self { q0: z1.re, q1: z1.im, q2: z2.im, q3: z2.re }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }
}

impl std::ops::Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.q0 + o.q0, self.q1 + o.q1, self.q2 + o.q2, self.q3 + o.q3)
    }
}

impl std::ops::Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.q0 - o.q0, self.q1 - o.q1, self.q2 - o.q2, self.q3 - o.q3)
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

/// The symplectic pairing of two quaternion points at central modulus
/// `a_mag`.  The group product law carries the phase `exp(2 i *
/// symplectic(a_mag, qt, q))`, and the pairing equals `-a_mag` times the
/// imaginary part of the complex pair dot product `qt . conj(q)`.
pub fn symplectic(a_mag: f64, qt: Quaternion, q: Quaternion) -> f64 {
    a_mag * (-qt.q1 * q.q0 + qt.q0 * q.q1 + qt.q3 * q.q2 - qt.q2 * q.q3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complex_pair_round_trips() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.5);
        assert_eq!(Quaternion::from_pair(q.z1(), q.z2()), q);
        assert_abs_diff_eq!(
            q.norm_sqr(),
            q.z1().norm_sqr() + q.z2().norm_sqr(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn symplectic_pairing_is_the_imaginary_part_of_the_dot_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut r = || rng.gen::<f64>() * 2.0 - 1.0;
            let qt = Quaternion::new(r(), r(), r(), r());
            let q = Quaternion::new(r(), r(), r(), r());
            let a = 0.75;
            let dot = qt.z1() * q.z1().conj() + qt.z2() * q.z2().conj();
            assert_abs_diff_eq!(symplectic(a, qt, q), -a * dot.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn symplectic_pairing_is_antisymmetric() {
        let qt = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let q = Quaternion::new(-0.5, 0.25, 1.5, -2.0);
        assert_abs_diff_eq!(
            symplectic(1.0, qt, q),
            -symplectic(1.0, q, qt),
            epsilon = 1e-14
        );
        assert_eq!(symplectic(1.0, q, q), 0.0);
    }
}
