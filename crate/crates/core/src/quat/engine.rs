//! Transform kernels for the quaternion picture.
//!
//! The transform of a function on the quaternions at central modulus `a`
//! is the operator valued integral
//!
//! ```text
//! W(f) = int f(q) pi(q) dq,
//! ```
//!
//! with `pi(q) = pi(z1) (x) pi(z2)` acting on the two variable Fock space.
//! Everything happens on a tensor Gauss-Hermite grid: with the Fock weight
//! `s = 2a`, both the test functions and the matrix coefficients decay
//! like `exp(-s |q|^2 / 2)`, so every integrand the kernels meet is a
//! polynomial times `exp(-s |q|^2)` and the folded rule integrates it
//! exactly once the polynomial degrees fit under the node count.
//!
//! The tensor structure keeps every kernel cheap: the translation matrices
//! at all grid values of one complex coordinate form a single table that
//! serves both coordinates, and the four dimensional sums factor through
//! it two axes at a time.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::config::TruncationConfig;
use crate::matrix::{BasisTag, OperatorMatrix};
use crate::quad::{gauss_hermite_folded, Rule1d};
use crate::sum::{stable_sum, KahanSumC};

use super::{FockBasis, QuatPolynomial, Quaternion, SampledFunction4};

/// Transform engine for one central modulus: the Fock basis, the tensor
/// grid, and the table of translation matrices at the grid nodes.
pub struct QuatEngine {
    a_mag: f64,
    s: f64,
    degree: usize,
    rule: Rule1d,
    basis: FockBasis,
    /// `table[a * points + b]` is the translation matrix at `x_a + i x_b`,
    /// row major over `degree * degree` entries.  The key `(a, b)` reads a
    /// node of either complex coordinate: `(n0, n1)` for `z1 = q0 + i q1`
    /// and `(n3, n2)` for `z2 = q3 + i q2`.
    table: Vec<Vec<Complex64>>,
}

impl QuatEngine {
    pub fn new(cfg: &TruncationConfig) -> Self {
        let a_mag = cfg.a_magnitude;
        let s = 2.0 * a_mag;
        let degree = cfg.fock_degree;
        let points = cfg.quat_quad_points;
        assert!(points > degree, "grid must outresolve the kept degrees");
        let rule = gauss_hermite_folded(points, s);
        // The basis rule carries the exponential factors of the
        // translation integrals at the outer grid nodes; three times the
        // grid count keeps those spectrally converged to machine precision
        // even at the corner node pairs, so the table never limits the
        // kernels built on it.
        let basis = FockBasis::new(degree, s, 3 * points);
        let mut table = Vec::with_capacity(points * points);
        for a in 0..points {
            for b in 0..points {
                let w = Complex64::new(rule.nodes[a], rule.nodes[b]);
                table.push(basis.translate_matrix(w));
            }
        }
        Self { a_mag, s, degree, rule, basis, table }
    }

    pub fn a_magnitude(&self) -> f64 {
        self.a_mag
    }

    /// Fock weight `s = 2 a`.
    pub fn weight(&self) -> f64 {
        self.s
    }

    /// Monomials kept per complex variable.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Dimension of the truncated operator space, `degree^2`.
    pub fn fock_dim(&self) -> usize {
        self.degree * self.degree
    }

    pub fn points(&self) -> usize {
        self.rule.nodes.len()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.rule.nodes[i]
    }

    pub fn node_weight(&self, i: usize) -> f64 {
        self.rule.weights[i]
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn grid_node(&self, n: [usize; 4]) -> Quaternion {
        Quaternion::new(
            self.rule.nodes[n[0]],
            self.rule.nodes[n[1]],
            self.rule.nodes[n[2]],
            self.rule.nodes[n[3]],
        )
    }

    /// Ratio `||W(f)||_HS^2 / ||f||_2^2`, equal to `pi^2 / (4 a^2)`.
    pub fn plancherel_constant(&self) -> f64 {
        PI * PI / (4.0 * self.a_mag * self.a_mag)
    }

    /// Reciprocal of the Plancherel constant; the weight of the inversion
    /// trace formula.
    pub fn formal_degree(&self) -> f64 {
        1.0 / self.plancherel_constant()
    }

    /// Largest polynomial degree whose span of matrix coefficients stays
    /// strictly inside the kept degrees, leaving headroom for products.
    pub fn corpus_degree(&self) -> usize {
        self.degree.saturating_sub(4)
    }

    fn check(&self, f: &SampledFunction4) {
        assert!(
            f.points == self.points() && f.a_magnitude == self.a_mag,
            "sampled grid ({} nodes, a = {}) does not match the engine ({} nodes, a = {})",
            f.points,
            f.a_magnitude,
            self.points(),
            self.a_mag
        );
    }

    /// Tabulates a symbolic function on the engine grid.
    pub fn sample(&self, f: &QuatPolynomial) -> SampledFunction4 {
        assert!(
            f.a_magnitude() == self.a_mag,
            "function written for a = {} sampled by an engine at a = {}",
            f.a_magnitude(),
            self.a_mag
        );
        let q = self.points();
        let mut values = Vec::with_capacity(q * q * q * q);
        for n0 in 0..q {
            for n1 in 0..q {
                for n2 in 0..q {
                    for n3 in 0..q {
                        values.push(f.eval(self.grid_node([n0, n1, n2, n3])));
                    }
                }
            }
        }
        SampledFunction4 { a_magnitude: self.a_mag, points: q, values }
    }

    pub fn l2_norm_sq(&self, f: &SampledFunction4) -> f64 {
        self.check(f);
        let q = self.points();
        let w = &self.rule.weights;
        let mut terms = Vec::with_capacity(f.values.len());
        for n0 in 0..q {
            for n1 in 0..q {
                for n2 in 0..q {
                    for n3 in 0..q {
                        let wt = w[n0] * w[n1] * w[n2] * w[n3];
                        terms.push(wt * f.value(n0, n1, n2, n3).norm_sqr());
                    }
                }
            }
        }
        stable_sum(&terms)
    }

    pub fn l2_inner(&self, f: &SampledFunction4, g: &SampledFunction4) -> Complex64 {
        self.check(f);
        self.check(g);
        let q = self.points();
        let w = &self.rule.weights;
        let mut acc = KahanSumC::new();
        for n0 in 0..q {
            for n1 in 0..q {
                for n2 in 0..q {
                    for n3 in 0..q {
                        let wt = w[n0] * w[n1] * w[n2] * w[n3];
                        acc.add(wt * f.value(n0, n1, n2, n3) * g.value(n0, n1, n2, n3).conj());
                    }
                }
            }
        }
        acc.value()
    }

    pub fn l2_diff_sq(&self, f: &SampledFunction4, g: &SampledFunction4) -> f64 {
        self.check(f);
        self.check(g);
        let q = self.points();
        let w = &self.rule.weights;
        let mut terms = Vec::with_capacity(f.values.len());
        for n0 in 0..q {
            for n1 in 0..q {
                for n2 in 0..q {
                    for n3 in 0..q {
                        let wt = w[n0] * w[n1] * w[n2] * w[n3];
                        terms.push(wt * (f.value(n0, n1, n2, n3) - g.value(n0, n1, n2, n3)).norm_sqr());
                    }
                }
            }
        }
        stable_sum(&terms)
    }

    /// The two translation matrices whose tensor product is `pi(p)`.
    pub fn translate_pair(&self, p: Quaternion) -> (Vec<Complex64>, Vec<Complex64>) {
        (
            self.basis.translate_matrix(p.z1()),
            self.basis.translate_matrix(p.z2()),
        )
    }

    /// The representation matrix at one point, `degree^2` square with rows
    /// and columns flattened as `i1 * degree + i2`.
    pub fn pi_matrix(&self, p: Quaternion) -> OperatorMatrix {
        let d = self.degree;
        let (m1, m2) = self.translate_pair(p);
        let mut out = OperatorMatrix::zeros(d * d, d * d, BasisTag::FockMonomial);
        for i1 in 0..d {
            for j1 in 0..d {
                let c1 = m1[i1 * d + j1];
                for i2 in 0..d {
                    for j2 in 0..d {
                        out[(i1 * d + i2, j1 * d + j2)] = c1 * m2[i2 * d + j2];
                    }
                }
            }
        }
        out
    }

    /// One matrix coefficient `q -> <pi(q) e_c, e_r>` tabulated on the
    /// grid, with `r` and `c` flattened as in [`Self::pi_matrix`].
    pub fn coefficient_function(&self, r: usize, c: usize) -> SampledFunction4 {
        let d = self.degree;
        let q = self.points();
        let (i1, i2) = (r / d, r % d);
        let (j1, j2) = (c / d, c % d);
        let mut values = Vec::with_capacity(q * q * q * q);
        for n0 in 0..q {
            for n1 in 0..q {
                let c1 = self.table[n0 * q + n1][i1 * d + j1];
                for n2 in 0..q {
                    for n3 in 0..q {
                        values.push(c1 * self.table[n3 * q + n2][i2 * d + j2]);
                    }
                }
            }
        }
        SampledFunction4 { a_magnitude: self.a_mag, points: q, values }
    }

    /// The transform `int f(q) pi(q) dq` as a `degree^2` square matrix.
    ///
    /// The four dimensional sum factors through the node table: first the
    /// two `z2` axes collapse onto a partial block per `z1` node pair,
    /// then the `z1` axes fan the blocks out over the tensor indices.
    pub fn weyl_transform(&self, f: &SampledFunction4) -> OperatorMatrix {
        self.check(f);
        let d = self.degree;
        let dd = d * d;
        let q = self.points();
        let w = &self.rule.weights;

        let zero = Complex64::new(0.0, 0.0);
        let mut partial = vec![zero; q * q * dd];
        for n0 in 0..q {
            for n1 in 0..q {
                let pair = n0 * q + n1;
                let w01 = w[n0] * w[n1];
                let block = &mut partial[pair * dd..(pair + 1) * dd];
                for n2 in 0..q {
                    for n3 in 0..q {
                        let c = w01 * w[n2] * w[n3] * f.value(n0, n1, n2, n3);
                        let m2 = &self.table[n3 * q + n2];
                        for t in 0..dd {
                            block[t] += c * m2[t];
                        }
                    }
                }
            }
        }

        let mut out = OperatorMatrix::zeros(dd, dd, BasisTag::FockMonomial);
        for pair in 0..q * q {
            let m1 = &self.table[pair];
            let block = &partial[pair * dd..(pair + 1) * dd];
            for i1 in 0..d {
                for j1 in 0..d {
                    let c1 = m1[i1 * d + j1];
                    for i2 in 0..d {
                        for j2 in 0..d {
                            out[(i1 * d + i2, j1 * d + j2)] += c1 * block[i2 * d + j2];
                        }
                    }
                }
            }
        }
        out
    }

    /// Both sides of the Plancherel identity for `f`: the squared
    /// Hilbert-Schmidt norm of the transform, and the squared function
    /// norm scaled by the Plancherel constant.
    pub fn plancherel_sides(&self, f: &SampledFunction4) -> (f64, f64) {
        let hs = self.weyl_transform(f).hs_norm();
        (hs * hs, self.plancherel_constant() * self.l2_norm_sq(f))
    }

    /// Reconstructs grid samples from an operator by the trace formula
    /// `f(q) = d_a tr(W pi(q)^dagger)` with `d_a` the formal degree.
    pub fn inversion(&self, op: &OperatorMatrix) -> SampledFunction4 {
        let d = self.degree;
        let dd = d * d;
        assert!(
            op.rows() == dd && op.cols() == dd,
            "operator is {} x {}, engine expects {} x {}",
            op.rows(),
            op.cols(),
            dd,
            dd
        );
        let q = self.points();
        let da = self.formal_degree();
        let zero = Complex64::new(0.0, 0.0);
        let mut values = vec![zero; q * q * q * q];
        let mut partial = vec![zero; dd];
        for n2 in 0..q {
            for n3 in 0..q {
                let m2 = &self.table[n3 * q + n2];
                for i1 in 0..d {
                    for j1 in 0..d {
                        let mut acc = zero;
                        for i2 in 0..d {
                            for j2 in 0..d {
                                acc += op[(i1 * d + i2, j1 * d + j2)] * m2[i2 * d + j2].conj();
                            }
                        }
                        partial[i1 * d + j1] = acc;
                    }
                }
                let lo = n2 * q + n3;
                for pair in 0..q * q {
                    let m1 = &self.table[pair];
                    let mut acc = zero;
                    for t in 0..dd {
                        acc += partial[t] * m1[t].conj();
                    }
                    values[pair * q * q + lo] = da * acc;
                }
            }
        }
        SampledFunction4 { a_magnitude: self.a_mag, points: q, values }
    }

    /// Twisted convolution `(f * g)(q) = int f(w) g(q - w)
    /// exp(-i s Im(w . conj(q))) dw` against a symbolic `g`, returning
    /// grid samples.  Under the transform this realizes the operator
    /// product: `W(f * g) = W(f) W(g)`.
    ///
    /// The kernel splits per complex coordinate: Gaussian difference and
    /// phase factors form two node pair tables, and each monomial of `g`
    /// contributes two dense two axis contractions.
    pub fn twisted_convolution(&self, f: &SampledFunction4, g: &QuatPolynomial) -> SampledFunction4 {
        self.check(f);
        assert!(
            g.a_magnitude() == self.a_mag,
            "function written for a = {} convolved by an engine at a = {}",
            g.a_magnitude(),
            self.a_mag
        );
        let q = self.points();
        let qq = q * q;
        let nodes = &self.rule.nodes;
        let w = &self.rule.weights;
        let zero = Complex64::new(0.0, 0.0);

        // diff[a * q + b] = x_b - x_a, the integration node subtracted
        // from the output node; gauss is its Gaussian at the function
        // decay rate, phase the symplectic factor of one complex
        // coordinate keyed by (w node, output node) complex pairs.
        let mut diff = vec![0.0; qq];
        let mut gauss = vec![0.0; qq];
        for a in 0..q {
            for b in 0..q {
                let dx = nodes[b] - nodes[a];
                diff[a * q + b] = dx;
                gauss[a * q + b] = (-self.a_mag * dx * dx).exp();
            }
        }
        let mut phase = vec![zero; qq * qq];
        for are in 0..q {
            for aim in 0..q {
                for bre in 0..q {
                    for bim in 0..q {
                        let arg = -self.s * (nodes[aim] * nodes[bre] - nodes[are] * nodes[bim]);
                        phase[(are * q + aim) * qq + bre * q + bim] = Complex64::from_polar(1.0, arg);
                    }
                }
            }
        }

        // Base kernels without the monomial of g: k1 over the z1 axes
        // (0, 1), k2 over the z2 axes (2, 3); the z2 phase key swaps its
        // axes because the real part of z2 is q3.
        let mut k1 = vec![zero; qq * qq];
        let mut k2 = vec![zero; qq * qq];
        for a0 in 0..q {
            for a1 in 0..q {
                for b0 in 0..q {
                    for b1 in 0..q {
                        k1[(a0 * q + a1) * qq + b0 * q + b1] = w[a0]
                            * w[a1]
                            * gauss[a0 * q + b0]
                            * gauss[a1 * q + b1]
                            * phase[(a0 * q + a1) * qq + b0 * q + b1];
                    }
                }
            }
        }
        for a2 in 0..q {
            for a3 in 0..q {
                for b2 in 0..q {
                    for b3 in 0..q {
                        k2[(a2 * q + a3) * qq + b2 * q + b3] = w[a2]
                            * w[a3]
                            * gauss[a2 * q + b2]
                            * gauss[a3 * q + b3]
                            * phase[(a3 * q + a2) * qq + b3 * q + b2];
                    }
                }
            }
        }

        let pow_table = |e: u8| -> Vec<f64> {
            diff.iter().map(|d| d.powi(e as i32)).collect()
        };

        let mut out = vec![zero; qq * qq];
        let mut k1t = vec![zero; qq * qq];
        let mut k2t = vec![zero; qq * qq];
        let mut mix = vec![zero; qq * qq];
        for (e, coeff) in g.terms() {
            let p0 = pow_table(e[0]);
            let p1 = pow_table(e[1]);
            let p2 = pow_table(e[2]);
            let p3 = pow_table(e[3]);
            for a0 in 0..q {
                for a1 in 0..q {
                    let row = (a0 * q + a1) * qq;
                    for b0 in 0..q {
                        for b1 in 0..q {
                            k1t[row + b0 * q + b1] =
                                k1[row + b0 * q + b1] * (p0[a0 * q + b0] * p1[a1 * q + b1]);
                        }
                    }
                }
            }
            for a2 in 0..q {
                for a3 in 0..q {
                    let row = (a2 * q + a3) * qq;
                    for b2 in 0..q {
                        for b3 in 0..q {
                            k2t[row + b2 * q + b3] =
                                k2[row + b2 * q + b3] * (p2[a2 * q + b2] * p3[a3 * q + b3]);
                        }
                    }
                }
            }

            // mix[a01][b23] = sum over a23 of f[a01][a23] k2t[a23][b23].
            mix.fill(zero);
            for a01 in 0..qq {
                let frow = &f.values[a01 * qq..(a01 + 1) * qq];
                let mrow = &mut mix[a01 * qq..(a01 + 1) * qq];
                for a23 in 0..qq {
                    let c = frow[a23];
                    let krow = &k2t[a23 * qq..(a23 + 1) * qq];
                    for b23 in 0..qq {
                        mrow[b23] += c * krow[b23];
                    }
                }
            }
            // out[b01][b23] += coeff * k1t[a01][b01] mix[a01][b23].
            for a01 in 0..qq {
                let mrow = &mix[a01 * qq..(a01 + 1) * qq];
                let krow = &k1t[a01 * qq..(a01 + 1) * qq];
                for b01 in 0..qq {
                    let c = coeff * krow[b01];
                    let orow = &mut out[b01 * qq..(b01 + 1) * qq];
                    for b23 in 0..qq {
                        orow[b23] += c * mrow[b23];
                    }
                }
            }
        }
        SampledFunction4 { a_magnitude: self.a_mag, points: q, values: out }
    }

    /// Twisted translation `(T_w f)(q) = exp(-i s Im(q . conj(w)))
    /// f(q - w)` on grid samples; under the transform it multiplies by the
    /// representation matrix on the right: `W(T_w f) = W(f) pi(w)`.
    ///
    /// The shifted resampling runs through the polynomial part: samples
    /// are divided by the grid Gaussian, shifted one axis at a time by
    /// barycentric Lagrange interpolation on the Gauss-Hermite nodes, and
    /// redressed with the shifted Gaussian and the twisting phase.  The
    /// samples must come from a polynomial of per axis degree below the
    /// node count times the standard Gaussian, else the stripped data is
    /// not the polynomial the interpolation assumes.
    pub fn twisted_translate(&self, f: &SampledFunction4, shift: Quaternion) -> SampledFunction4 {
        self.check(f);
        let q = self.points();
        let nodes = &self.rule.nodes;

        // Strip the Gaussian: per axis factors exp(+a x^2).
        let strip: Vec<f64> = nodes.iter().map(|x| (self.a_mag * x * x).exp()).collect();
        let mut work: Vec<Complex64> = Vec::with_capacity(f.values.len());
        for n0 in 0..q {
            for n1 in 0..q {
                for n2 in 0..q {
                    for n3 in 0..q {
                        let s4 = strip[n0] * strip[n1] * strip[n2] * strip[n3];
                        work.push(f.value(n0, n1, n2, n3) * s4);
                    }
                }
            }
        }

        // Barycentric weights of the node set.
        let bary: Vec<f64> = (0..q)
            .map(|a| {
                let mut prod = 1.0;
                for b in 0..q {
                    if b != a {
                        prod *= nodes[a] - nodes[b];
                    }
                }
                1.0 / prod
            })
            .collect();
        // Row b of the axis matrix evaluates the interpolant at x_b - t.
        let lagrange = |t: f64| -> Vec<f64> {
            let mut l = vec![0.0; q * q];
            for b in 0..q {
                let x = nodes[b] - t;
                if let Some(hit) = nodes.iter().position(|&n| n == x) {
                    l[b * q + hit] = 1.0;
                    continue;
                }
                let terms: Vec<f64> = (0..q).map(|a| bary[a] / (x - nodes[a])).collect();
                let total = stable_sum(&terms);
                for a in 0..q {
                    l[b * q + a] = terms[a] / total;
                }
            }
            l
        };

        let components = [shift.q0, shift.q1, shift.q2, shift.q3];
        let mut next = vec![Complex64::new(0.0, 0.0); work.len()];
        for (axis, t) in components.iter().enumerate() {
            if *t == 0.0 {
                continue;
            }
            let l = lagrange(*t);
            let stride = q.pow(3 - axis as u32);
            let block = q * stride;
            for base in (0..work.len()).step_by(block) {
                for lo in 0..stride {
                    for b in 0..q {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..q {
                            acc += l[b * q + a] * work[base + a * stride + lo];
                        }
                        next[base + b * stride + lo] = acc;
                    }
                }
            }
            std::mem::swap(&mut work, &mut next);
        }

        // Redress: shifted Gaussian and the twisting phase, both products
        // of per axis factors.  The phase pairs each axis with the other
        // axis of its complex coordinate.
        let factor = |paired: f64, own: f64, sign: f64| -> Vec<Complex64> {
            nodes
                .iter()
                .map(|&x| {
                    let dx = x - own;
                    Complex64::from_polar((-self.a_mag * dx * dx).exp(), sign * self.s * x * paired)
                })
                .collect()
        };
        let c0 = factor(shift.q1, shift.q0, 1.0);
        let c1 = factor(shift.q0, shift.q1, -1.0);
        let c2 = factor(shift.q3, shift.q2, -1.0);
        let c3 = factor(shift.q2, shift.q3, 1.0);
        let mut idx = 0;
        let mut values = Vec::with_capacity(work.len());
        for &v0 in &c0 {
            for &v1 in &c1 {
                let c01 = v0 * v1;
                for &v2 in &c2 {
                    let c012 = c01 * v2;
                    for &v3 in &c3 {
                        values.push(work[idx] * c012 * v3);
                        idx += 1;
                    }
                }
            }
        }
        SampledFunction4 { a_magnitude: self.a_mag, points: q, values }
    }
}
