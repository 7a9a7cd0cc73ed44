//! Dense complex matrices of truncated operators.
//!
//! A matrix here always represents an operator written in a declared
//! orthonormal basis, with entry (r, c) equal to the coefficient of basis
//! vector r in the image of basis vector c.  The tag keeps pictures from
//! being mixed by accident: multiplying a Hermite basis matrix by a Fock
//! basis matrix is a bug, not a broadcast.
//!
//! Norm computations come in two flavours.  The Hilbert-Schmidt norm is a
//! fixed order compensated sum of squares.  The operator norm is a power
//! iteration on the normal matrix with a seeded start vector, so a report
//! that quotes an operator norm can be reproduced exactly; spectral
//! quantities that need the full decomposition (smallest eigenvalue of a
//! Hermitian matrix, singular values for numerical rank) go through the
//! deterministic dense solvers of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sum::{stable_sum, KahanSumC};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisTag {
    /// Hermite functions of one real variable.
    Hermite,
    /// Hermite functions tensored with a circle sector label.
    HermiteSector,
    /// Normalised holomorphic monomials of two complex variables.
    FockMonomial,
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix is not Hermitian: adjoint deviation {deviation:.3e} exceeds {allowed:.3e}")]
    NotHermitian { deviation: f64, allowed: f64 },
    #[error("power iteration did not converge to relative {tol:.1e} within {cap} steps")]
    PowerIterationStalled { tol: f64, cap: usize },
}

/// Dense row major complex matrix with a basis tag.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    basis: BasisTag,
    data: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(rows: usize, cols: usize, basis: BasisTag) -> Self {
        Self {
            rows,
            cols,
            basis,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize, basis: BasisTag) -> Self {
        let mut m = Self::zeros(n, n, basis);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        basis: BasisTag,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut m = Self::zeros(rows, cols, basis);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    /// Row major entries, row r occupying `data[r * cols..][..cols]`.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.basis);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!(self.basis, other.basis, "cannot mix operator pictures");
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        assert_eq!(self.basis, other.basis, "cannot mix operator pictures");
        let mut out = Self::zeros(self.rows, other.cols, self.basis);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = KahanSumC::new();
                for (a, x) in self.row(r).iter().zip(v) {
                    acc.add(a * x);
                }
                acc.value()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        let diag: Vec<Complex64> = (0..self.rows).map(|i| self[(i, i)]).collect();
        crate::sum::stable_sum_c(&diag)
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        let squares: Vec<f64> = self.data.iter().map(|v| v.norm_sqr()).collect();
        stable_sum(&squares).sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(other^H self)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let terms: Vec<Complex64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .collect();
        crate::sum::stable_sum_c(&terms)
    }

    fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, &factor) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * factor;
            }
        }
        out
    }

    /// Operator norm (largest singular value) by power iteration on the
    /// normal matrix.  The start vector comes from the seed, so the result
    /// is reproducible; convergence is judged by the relative change of the
    /// singular-value estimate, and exhausting the iteration cap without
    /// meeting `tol` is reported as an error rather than a best guess.
    pub fn op_norm(&self, tol: f64, seed: u64) -> Result<f64, MatrixError> {
        assert!(tol > 0.0, "tolerance must be positive");
        const CAP: usize = 10_000;
        if self.rows == 0 || self.cols == 0 {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..self.cols)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        normalize(&mut v);
        let mut prev = 0.0;
        for _ in 0..CAP {
            let w = self.apply(&v);
            let sigma_sq: f64 = stable_sum(&w.iter().map(|x| x.norm_sqr()).collect::<Vec<_>>());
            let sigma = sigma_sq.sqrt();
            if (sigma - prev).abs() <= tol * sigma.max(1e-300) {
                return Ok(sigma);
            }
            prev = sigma;
            let mut u = self.apply_adjoint(&w);
            if !normalize(&mut u) {
                return Ok(0.0);
            }
            v = u;
        }
        Err(MatrixError::PowerIterationStalled { tol, cap: CAP })
    }

    fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)])
    }

    fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    fn check_hermitian(&self) -> Result<(), MatrixError> {
        assert_eq!(self.rows, self.cols);
        let scale = self.data.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let allowed = 1e-10 * scale.max(1.0);
        let deviation = self.hermitian_deviation();
        if deviation > allowed {
            return Err(MatrixError::NotHermitian { deviation, allowed });
        }
        Ok(())
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigen_sym(&self) -> Result<f64, MatrixError> {
        Ok(self.eigen_hermitian()?.0.first().copied().unwrap_or(0.0))
    }

    /// Full Hermitian eigendecomposition: eigenvalues ascending, columns of
    /// the returned matrix the matching orthonormal eigenvectors.
    pub fn eigen_hermitian(&self) -> Result<(Vec<f64>, OperatorMatrix), MatrixError> {
        self.check_hermitian()?;
        let eig = SymmetricEigen::new(self.to_dmatrix());
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = OperatorMatrix::from_fn(self.rows, self.rows, self.basis, |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Ok((values, vectors))
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let svd = SVD::new(self.to_dmatrix(), false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Numerical rank: the number of singular values strictly above
    /// `eps` times the largest one.  A zero matrix has rank zero.
    pub fn eps_rank(&self, eps: f64) -> usize {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > eps * top).count()
    }

    /// Number of singular values strictly above the absolute threshold.
    /// Unlike [`eps_rank`](Self::eps_rank) this does not rescale by the
    /// largest singular value, so a uniformly tiny matrix has rank zero.
    pub fn eps_rank_abs(&self, eps: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > eps).count()
    }
}

impl std::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

fn normalize(v: &mut [Complex64]) -> bool {
    let norm = stable_sum(&v.iter().map(|x| x.norm_sqr()).collect::<Vec<_>>()).sqrt();
    if norm < 1e-300 {
        return false;
    }
    for x in v {
        *x /= norm;
    }
    true
}
