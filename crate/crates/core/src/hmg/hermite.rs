//! Hermite functions, the orthonormal eigenbasis of the harmonic oscillator
//! on the line.
//!
//! The ground state is `phi_0(x) = pi^{-1/4} exp(-x^2/2)` and the higher
//! modes follow the stable upward recurrence
//! `phi_k = sqrt(2/k) x phi_{k-1} - sqrt((k-1)/k) phi_{k-2}`,
//! which keeps every mode at unit L^2 norm.

/// Values of `phi_0 .. phi_{modes-1}` at the point `x`.
pub fn hermite_eval(x: f64, modes: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(modes);
    hermite_eval_into(x, modes, &mut out);
    out
}

/// Same as [`hermite_eval`], writing into a caller supplied buffer to keep
/// hot loops free of allocation.  The buffer is cleared first.
pub fn hermite_eval_into(x: f64, modes: usize, out: &mut Vec<f64>) {
    assert!(modes >= 1);
    out.clear();
    out.push(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if modes > 1 {
        out.push((2.0f64).sqrt() * x * out[0]);
    }
    for k in 2..modes {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
}
