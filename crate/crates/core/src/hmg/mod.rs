//! The Heisenberg motion group of the plane: one complex degree of freedom,
//! circle symmetry, unit central parameter.
//!
//! Points of the group are pairs `(z, theta)` in `C x T`, optionally
//! extended by a central circle coordinate `t` that representations see as
//! a scalar phase.  The irreducible representations relevant here act on
//! `L^2(R)` through the Schrodinger representation `pi(z)` of the
//! Heisenberg group and the metaplectic circle action `mu(theta)`, which is
//! diagonal in the Hermite basis:
//!
//! ```text
//! (pi(x + iy) f)(s) = exp(i (x s + x y / 2)) f(s + y)
//! mu(theta) phi_k   = exp(i k theta) phi_k
//! rho_m(z, theta)   = exp(i m theta) pi(z) mu(theta)
//! ```
//!
//! The sector label `m` runs over the integers and shifts which circle
//! frequency each Hermite column responds to.  Matrix entries of `pi(z)`
//! are the special Hermite functions `phi_{jk}(z) = <pi(z) phi_j, phi_k>`,
//! which are orthogonal over the plane with constant `2 pi`; everything the
//! module computes reduces to quadratures against these.
//!
//! All operator matrices follow one convention: entry `(r, c)` is
//! `<Op phi_c, phi_r>`, so `pi(z)` has entry `(r, c)` equal to
//! `phi_{cr}(z)` and columns are images of basis vectors.

mod engine;
mod function;
mod hermite;

pub use engine::{HmgEngine, PairProfile, WeylPlan};
pub use function::{ComboTerm, PlaneFunction, SampledFunction2, SectorCombo};
pub use hermite::hermite_eval;

use num_complex::Complex64;

/// Sector label: the integer parameter selecting which representation of
/// the circle extension acts.
pub type SectorIndex = i64;

/// A point of the group: plane coordinate, circle coordinate, and an
/// optional central circle coordinate that contributes the scalar phase
/// `exp(i t)` to every representation.
#[derive(Clone, Copy, Debug)]
pub struct HMGPoint {
    pub z: Complex64,
    pub theta: f64,
    pub t: Option<f64>,
}

impl HMGPoint {
    pub fn new(z: Complex64, theta: f64) -> Self {
        Self { z, theta, t: None }
    }

    pub fn with_center(z: Complex64, theta: f64, t: f64) -> Self {
        Self { z, theta, t: Some(t) }
    }

    /// The scalar phase the central coordinate contributes.
    pub fn central_phase(&self) -> Complex64 {
        match self.t {
            Some(t) => Complex64::from_polar(1.0, t),
            None => Complex64::new(1.0, 0.0),
        }
    }
}
