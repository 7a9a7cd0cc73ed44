//! The transform engine: quadrature-backed realizations of the group
//! Fourier apparatus on `C x T`.
//!
//! Everything rests on one factorization of the special Hermite functions.
//! With `z = x + i y`,
//!
//! ```text
//! phi_{jk}(z) = <pi(z) phi_j, phi_k>
//!             = integral  exp(i x (s + y/2)) phi_j(s + y) phi_k(s) ds,
//! ```
//!
//! so every plane integral against `phi_{jk}` becomes a double sum in which
//! the `x` dependence sits in the pure phase `exp(i x s)`.  The engine keeps
//! the plane grid and the `s` integration axis on one common half step
//! lattice: plane nodes are odd multiples of `h/2`, integration nodes are
//! odd multiples of `h/2` on a longer axis, and sums `s + y` land on even
//! multiples, so two flat tables of Hermite values cover every lookup and
//! the phase `exp(i x s)` is one precomputed matrix shared by the forward
//! transform, the inversion, and all matrix coefficient profiles.
//!
//! The integration axis extends past the plane box far enough to contain
//! the classically allowed region of the highest retained mode plus a tail
//! margin, which keeps the truncation error of the `s` integral near
//! roundoff for every entry the laboratory trusts.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::function::{PlaneFunction, SectorCombo};
use super::hermite::hermite_eval_into;
use super::HMGPoint;
use crate::config::TruncationConfig;
use crate::matrix::{BasisTag, OperatorMatrix};
use crate::quad::Axis;

/// One matrix coefficient profile `phi_{jk}` tabulated on the plane grid,
/// together with the grid norm of the associated basis element: `norm` is
/// the grid value of `(2 pi)^{-1/2} || phi_{jk} ||_{L^2}`, which is 1 up to
/// truncation tails.
#[derive(Clone, Debug)]
pub struct PairProfile {
    pub values: Vec<Complex64>,
    pub norm: f64,
}

/// The per-function half of the forward transform: the partial plane
/// transforms `hat G_p(s; y)` of every circle frequency, from which the
/// operator matrix of any sector is a cheap contraction.
#[derive(Clone, Debug)]
pub struct WeylPlan {
    hats: BTreeMap<i64, Vec<Complex64>>,
}

impl WeylPlan {
    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        self.hats.keys().copied()
    }
}

pub struct HmgEngine {
    cfg: TruncationConfig,
    /// Plane axis: `points` midpoint nodes of step `h` covering the box.
    plane: Axis,
    /// Integration axis: same step, extended reach.
    xi: Axis,
    /// `phi_mode` at integration nodes: `xi_phi[mode * qxi + j]`.
    xi_phi: Vec<f64>,
    /// `phi_mode` on the even sum lattice: `sum_phi[mode * width + (j + iy)]`
    /// holds `phi_mode(xi_j + y_iy)`.
    sum_phi: Vec<f64>,
    sum_width: usize,
    /// `exp(i x_i s_j)`: `phase[i * qxi + j]`.
    phase: Vec<Complex64>,
    profiles: RefCell<BTreeMap<(usize, usize), Arc<PairProfile>>>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl HmgEngine {
    pub fn new(cfg: &TruncationConfig) -> Self {
        let q = cfg.quad_points;
        let m = cfg.hermite_cutoff;
        let r = cfg.quad_radius;
        let plane = Axis::midpoint(r, q);

        // Reach needed by the integration axis: the turning point of the
        // highest mode plus a tail margin that pushes the boundary values
        // of every retained mode to roundoff.
        let needed = ((2.0 * m as f64 - 1.0).sqrt() + 4.5) / r;
        let extra = if needed <= 1.0 {
            2
        } else {
            let e = ((needed - 1.0) * q as f64).ceil() as usize;
            e + e % 2
        };
        let xi = plane.extended(extra);
        let qxi = xi.len();

        let mut scratch = Vec::new();
        let mut xi_phi = vec![0.0; m * qxi];
        for (j, &s) in xi.nodes.iter().enumerate() {
            hermite_eval_into(s, m, &mut scratch);
            for mode in 0..m {
                xi_phi[mode * qxi + j] = scratch[mode];
            }
        }

        // Sum lattice: xi_j + y_iy for j in 0..qxi, iy in 0..q runs over
        // consecutive even multiples of h/2, indexed simply by j + iy.
        let sum_width = qxi + q - 1;
        let mut sum_phi = vec![0.0; m * sum_width];
        let lo = xi.nodes[0] + plane.nodes[0];
        for idx in 0..sum_width {
            let point = lo + idx as f64 * plane.step;
            hermite_eval_into(point, m, &mut scratch);
            for mode in 0..m {
                sum_phi[mode * sum_width + idx] = scratch[mode];
            }
        }

        let mut phase = Vec::with_capacity(q * qxi);
        for &x in &plane.nodes {
            for &s in &xi.nodes {
                phase.push(Complex64::from_polar(1.0, x * s));
            }
        }

        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(2 * q);
        let fft_inverse = planner.plan_fft_inverse(2 * q);

        Self {
            cfg: cfg.clone(),
            plane,
            xi,
            xi_phi,
            sum_phi,
            sum_width,
            phase,
            profiles: RefCell::new(BTreeMap::new()),
            fft_forward,
            fft_inverse,
        }
    }

    pub fn config(&self) -> &TruncationConfig {
        &self.cfg
    }

    pub fn points(&self) -> usize {
        self.plane.len()
    }

    pub fn step(&self) -> f64 {
        self.plane.step
    }

    pub fn modes(&self) -> usize {
        self.cfg.hermite_cutoff
    }

    pub fn plane_axis(&self) -> &Axis {
        &self.plane
    }

    pub fn grid_node(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.plane.nodes[ix], self.plane.nodes[iy])
    }

    pub fn empty_function(&self) -> PlaneFunction {
        PlaneFunction::new(self.points(), self.step())
    }

    #[inline]
    fn half_phase(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::from_polar(1.0, 0.5 * self.plane.nodes[ix] * self.plane.nodes[iy])
    }

    #[inline]
    fn xi_slice(&self, mode: usize) -> &[f64] {
        let qxi = self.xi.len();
        &self.xi_phi[mode * qxi..(mode + 1) * qxi]
    }

    /// `phi_mode(xi_j + y_iy)` for all `j`, contiguous.
    #[inline]
    fn sum_slice(&self, mode: usize, iy: usize) -> &[f64] {
        let base = mode * self.sum_width + iy;
        &self.sum_phi[base..base + self.xi.len()]
    }

    /// Writes `phi_{j k}(x, y_iy)` for each requested `k` and every grid
    /// `x` into `out[k_index * points + ix]`.
    fn pair_rows(&self, j: usize, ks: &[usize], iy: usize, out: &mut [Complex64]) {
        let q = self.points();
        let qxi = self.xi.len();
        assert_eq!(out.len(), ks.len() * q);
        let h = self.plane.step;
        let a = self.sum_slice(j, iy);
        let mut u = vec![0.0; qxi];
        for (ki, &k) in ks.iter().enumerate() {
            let pk = self.xi_slice(k);
            for i in 0..qxi {
                u[i] = h * a[i] * pk[i];
            }
            let row = &mut out[ki * q..(ki + 1) * q];
            for (ix, slot) in row.iter_mut().enumerate() {
                let ph = &self.phase[ix * qxi..(ix + 1) * qxi];
                let mut re = 0.0;
                let mut im = 0.0;
                for (p, &uu) in ph.iter().zip(&u) {
                    re += p.re * uu;
                    im += p.im * uu;
                }
                *slot = self.half_phase(ix, iy) * Complex64::new(re, im);
            }
        }
    }

    /// The matrix coefficient profile `phi_{jk}` on the plane grid, cached.
    pub fn profile(&self, j: usize, k: usize) -> Arc<PairProfile> {
        if let Some(hit) = self.profiles.borrow().get(&(j, k)) {
            return hit.clone();
        }
        let q = self.points();
        let mut values = vec![Complex64::new(0.0, 0.0); q * q];
        for iy in 0..q {
            let row = &mut values[iy * q..(iy + 1) * q];
            self.pair_rows(j, &[k], iy, row);
        }
        let w = self.step() * self.step();
        let norm_sq: f64 = crate::sum::stable_sum(
            &values.iter().map(|v| w * v.norm_sqr() / (2.0 * PI)).collect::<Vec<_>>(),
        );
        let entry = Arc::new(PairProfile { values, norm: norm_sq.sqrt() });
        self.profiles.borrow_mut().insert((j, k), entry.clone());
        entry
    }

    /// All matrix coefficients `phi_{cl}(x, y)` for `c < cmax`, `l < lmax`
    /// at an arbitrary plane point, as `out[c * lmax + l]`.  The integration
    /// variable stays on the fixed axis; only the shifted factor is
    /// evaluated off lattice.
    pub fn phi_block_at(&self, x: f64, y: f64, cmax: usize, lmax: usize) -> Vec<Complex64> {
        assert!(cmax <= self.modes() && lmax <= self.modes());
        let qxi = self.xi.len();
        let h = self.plane.step;
        let mut out = vec![Complex64::new(0.0, 0.0); cmax * lmax];
        let mut shifted = Vec::new();
        let central = Complex64::from_polar(1.0, 0.5 * x * y);
        for (jx, &s) in self.xi.nodes.iter().enumerate() {
            hermite_eval_into(s + y, cmax, &mut shifted);
            let ph = central * Complex64::from_polar(h, x * s);
            for c in 0..cmax {
                let a = ph * shifted[c];
                let row = &mut out[c * lmax..(c + 1) * lmax];
                for (l, slot) in row.iter_mut().enumerate() {
                    *slot += a * self.xi_phi[l * qxi + jx];
                }
            }
        }
        out
    }

    /// Same block on a grid node, using only table lookups.
    pub fn phi_block_grid(&self, ix: usize, iy: usize, cmax: usize, lmax: usize) -> Vec<Complex64> {
        assert!(cmax <= self.modes() && lmax <= self.modes());
        let qxi = self.xi.len();
        let h = self.plane.step;
        let mut out = vec![Complex64::new(0.0, 0.0); cmax * lmax];
        let central = self.half_phase(ix, iy);
        let ph = &self.phase[ix * qxi..(ix + 1) * qxi];
        for (jx, &phase) in ph.iter().enumerate() {
            let base = central * (h * phase);
            for c in 0..cmax {
                let a = base * self.sum_slice(c, iy)[jx];
                let row = &mut out[c * lmax..(c + 1) * lmax];
                for (l, slot) in row.iter_mut().enumerate() {
                    *slot += a * self.xi_phi[l * qxi + jx];
                }
            }
        }
        out
    }

    /// The Schrodinger representation matrix `pi(z)`: entry `(r, c)` is
    /// `phi_{cr}(z)`.
    pub fn schrodinger_matrix(&self, z: Complex64) -> OperatorMatrix {
        let m = self.modes();
        let block = self.phi_block_at(z.re, z.im, m, m);
        OperatorMatrix::from_fn(m, m, BasisTag::Hermite, |r, c| block[c * m + r])
    }

    /// The metaplectic circle action, diagonal in the Hermite basis.
    pub fn metaplectic_diag(&self, theta: f64) -> Vec<Complex64> {
        (0..self.modes())
            .map(|k| Complex64::from_polar(1.0, k as f64 * theta))
            .collect()
    }

    /// The sector representation `rho_m(z, theta) = e^{i m theta} pi(z)
    /// mu(theta)`, entry `(r, c) = e^{i (m + c) theta} phi_{cr}(z)`, times
    /// the central phase when the point carries one.
    pub fn rho_matrix(&self, sector: i64, point: &HMGPoint) -> OperatorMatrix {
        let mut mat = self.schrodinger_matrix(point.z);
        let central = point.central_phase();
        let m = self.modes();
        for c in 0..m {
            let col = central * Complex64::from_polar(1.0, (sector as f64 + c as f64) * point.theta);
            for r in 0..m {
                mat[(r, c)] *= col;
            }
        }
        mat
    }

    /// Matrix coefficient of the sector representation:
    /// `<rho_m(z, theta) zeta, eta>`.
    pub fn fourier_wigner(
        &self,
        sector: i64,
        zeta: &[Complex64],
        eta: &[Complex64],
        point: &HMGPoint,
    ) -> Complex64 {
        let rho = self.rho_matrix(sector, point);
        let image = rho.apply(zeta);
        let terms: Vec<Complex64> = image.iter().zip(eta).map(|(a, b)| a * b.conj()).collect();
        crate::sum::stable_sum_c(&terms)
    }

    /// The same matrix coefficient as a plane decomposition: the function
    /// `(z, theta) -> <rho_m(z, theta) zeta, eta>` is a trigonometric
    /// polynomial with plane `sum_r zeta_c conj(eta_r) phi_{cr}` at circle
    /// frequency `m + c`.
    pub fn fourier_wigner_planes(
        &self,
        sector: i64,
        zeta: &[Complex64],
        eta: &[Complex64],
    ) -> PlaneFunction {
        assert_eq!(zeta.len(), self.modes());
        assert_eq!(eta.len(), self.modes());
        let mut g = self.empty_function();
        for (c, &zc) in zeta.iter().enumerate() {
            if zc.norm_sqr() == 0.0 {
                continue;
            }
            for (r, &er) in eta.iter().enumerate() {
                if er.norm_sqr() == 0.0 {
                    continue;
                }
                let profile = self.profile(c, r);
                g.add_profile(sector + c as i64, zc * er.conj(), &profile.values);
            }
        }
        g
    }

    /// Realizes a combination of basis elements `b^m_{jk}`, where
    /// `b^m_{jk}` has the single plane `(2 pi)^{-1/2} conj(phi_{jk}) /
    /// norm` at circle frequency `-(m + j)`; the grid norm in the
    /// denominator makes the realized elements exactly orthonormal under
    /// the grid inner product.
    pub fn realize(&self, combo: &SectorCombo) -> PlaneFunction {
        let mut g = self.empty_function();
        let scale = (2.0 * PI).powf(-0.5);
        for term in combo.terms() {
            let profile = self.profile(term.j, term.k);
            let coeff = term.coeff * scale / profile.norm;
            let dest = g.plane_mut(-(term.sector + term.j as i64));
            for (d, s) in dest.iter_mut().zip(&profile.values) {
                *d += coeff * s.conj();
            }
        }
        g
    }

    /// The operator matrix the transform of a realized combination should
    /// equal in the given sector: `sqrt(2 pi)` times a matrix unit at
    /// `(k, j)` for each term with that sector label.
    pub fn predicted_weyl(&self, combo: &SectorCombo, sector: i64) -> OperatorMatrix {
        let m = self.modes();
        let mut out = OperatorMatrix::zeros(m, m, BasisTag::Hermite);
        let scale = (2.0 * PI).sqrt();
        for term in combo.terms() {
            if term.sector == sector {
                out[(term.k, term.j)] += scale * term.coeff;
            }
        }
        out
    }

    /// Partial plane transforms `hat G_p(s_j; y_iy) = sum_x h^2 G_p(x, y)
    /// exp(i x (s_j + y/2))`, the per-function half of the forward
    /// transform, shared by every sector.
    pub fn weyl_plan(&self, g: &PlaneFunction) -> WeylPlan {
        assert_eq!(g.points(), self.points());
        let q = self.points();
        let qxi = self.xi.len();
        let w = g.node_weight();
        let mut hats = BTreeMap::new();
        for p in g.frequencies().collect::<Vec<_>>() {
            let plane = g.plane(p).unwrap();
            let mut hat = vec![Complex64::new(0.0, 0.0); q * qxi];
            for iy in 0..q {
                let row = &plane[iy * q..(iy + 1) * q];
                let out = &mut hat[iy * qxi..(iy + 1) * qxi];
                for (ix, &v) in row.iter().enumerate() {
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let c = w * v * self.half_phase(ix, iy);
                    let ph = &self.phase[ix * qxi..(ix + 1) * qxi];
                    for (o, p) in out.iter_mut().zip(ph) {
                        *o += c * p;
                    }
                }
            }
            hats.insert(p, hat);
        }
        WeylPlan { hats }
    }

    /// Operator matrix of one sector from a transform plan.  Column `c`
    /// reads the planes whose frequency is congruent to `-(sector + c)`
    /// modulo the circle sample count, which is exactly what the finite
    /// circle rule delivers; with the default window the congruence has at
    /// most one solution among the stored planes.
    pub fn weyl_from_plan(&self, plan: &WeylPlan, sector: i64) -> OperatorMatrix {
        let m = self.modes();
        let q = self.points();
        let qxi = self.xi.len();
        let t = self.cfg.theta_samples as i64;
        let h = self.plane.step;
        let mut out = OperatorMatrix::zeros(m, m, BasisTag::Hermite);
        let mut merged = vec![Complex64::new(0.0, 0.0); q * qxi];
        let mut target = vec![0.0; qxi];
        for c in 0..m {
            let want = (-(sector + c as i64)).rem_euclid(t);
            let matching: Vec<&Vec<Complex64>> = plan
                .hats
                .iter()
                .filter(|(p, _)| p.rem_euclid(t) == want)
                .map(|(_, hat)| hat)
                .collect();
            if matching.is_empty() {
                continue;
            }
            let hat = if matching.len() == 1 {
                matching[0].as_slice()
            } else {
                merged.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for part in &matching {
                    for (d, s) in merged.iter_mut().zip(part.iter()) {
                        *d += s;
                    }
                }
                merged.as_slice()
            };
            for iy in 0..q {
                let hrow = &hat[iy * qxi..(iy + 1) * qxi];
                let shifted = self.sum_slice(c, iy);
                for j in 0..qxi {
                    target[j] = h * shifted[j];
                }
                for r in 0..m {
                    let xr = self.xi_slice(r);
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for j in 0..qxi {
                        let u = target[j] * xr[j];
                        re += u * hrow[j].re;
                        im += u * hrow[j].im;
                    }
                    out[(r, c)] += Complex64::new(re, im);
                }
            }
        }
        out
    }

    /// Forward transform of one sector.
    pub fn weyl_transform(&self, g: &PlaneFunction, sector: i64) -> OperatorMatrix {
        self.weyl_from_plan(&self.weyl_plan(g), sector)
    }

    /// The window of sectors on which a stored function can act: every
    /// `(plane, column)` pair activates exactly one sector in this range.
    pub fn weyl_window(&self, g: &PlaneFunction) -> std::ops::RangeInclusive<i64> {
        let lo = g.frequencies().min().unwrap_or(0);
        let hi = g.frequencies().max().unwrap_or(0);
        (-hi - self.modes() as i64 + 1)..=(-lo)
    }

    /// The plain twisted transform of a single plane of samples:
    /// `integral G(z) pi(z) dz`, every column reading the same plane.
    pub fn twisted_weyl(&self, plane: &[Complex64]) -> OperatorMatrix {
        let q = self.points();
        assert_eq!(plane.len(), q * q);
        let mut probe = self.empty_function();
        *probe.plane_mut(0) = plane.to_vec();
        let plan = self.weyl_plan(&probe);
        let hat = plan.hats.get(&0).unwrap();

        let m = self.modes();
        let qxi = self.xi.len();
        let h = self.plane.step;
        let mut out = OperatorMatrix::zeros(m, m, BasisTag::Hermite);
        for c in 0..m {
            for iy in 0..q {
                let hrow = &hat[iy * qxi..(iy + 1) * qxi];
                let shifted = self.sum_slice(c, iy);
                for r in 0..m {
                    let xr = self.xi_slice(r);
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for j in 0..qxi {
                        let u = h * shifted[j] * xr[j];
                        re += u * hrow[j].re;
                        im += u * hrow[j].im;
                    }
                    out[(r, c)] += Complex64::new(re, im);
                }
            }
        }
        out
    }

    /// Both sides of the Plancherel identity: the squared function norm and
    /// `(2 pi)^{-1}` times the summed squared Hilbert-Schmidt norms over
    /// the complete sector window.
    pub fn plancherel_sides(&self, g: &PlaneFunction) -> (f64, f64) {
        let window = self.weyl_window(g);
        let span = window.end() - window.start() + 1;
        assert!(
            span <= self.cfg.theta_samples as i64,
            "sector window of length {span} would alias at {} circle samples",
            self.cfg.theta_samples
        );
        let plan = self.weyl_plan(g);
        let mut pieces = Vec::new();
        for sector in window {
            let w = self.weyl_from_plan(&plan, sector);
            pieces.push(w.hs_norm().powi(2));
        }
        let rhs = crate::sum::stable_sum(&pieces) / (2.0 * PI);
        (g.l2_norm_sq(), rhs)
    }

    /// Reconstruction from sector matrices: the inversion series
    /// `g(z, theta) = (2 pi)^{-1} sum_m tr(W_m rho_m(z, theta)^*)`
    /// evaluated as plane profiles.  Columns whose norm sits at the
    /// roundoff floor are skipped; the planes they would produce carry no
    /// mass at the tolerance of any downstream comparison.
    pub fn inversion_reconstruct(&self, mats: &BTreeMap<i64, OperatorMatrix>) -> PlaneFunction {
        let m = self.modes();
        let q = self.points();
        let qxi = self.xi.len();
        let h = self.plane.step;

        // Column norms, for pruning.
        let mut peak = 0.0f64;
        let mut col_norms: BTreeMap<(i64, usize), f64> = BTreeMap::new();
        for (&sector, w) in mats {
            assert_eq!((w.rows(), w.cols()), (m, m));
            for c in 0..m {
                let n: f64 = (0..m).map(|r| w[(r, c)].norm_sqr()).sum::<f64>().sqrt();
                peak = peak.max(n);
                col_norms.insert((sector, c), n);
            }
        }
        let floor = peak * 1e-13;

        // R_{sector, c}(s_j) = h sum_r W[(r, c)] phi_r(s_j), grouped by the
        // plane frequency they reconstruct.
        let mut groups: BTreeMap<i64, Vec<(usize, Vec<Complex64>)>> = BTreeMap::new();
        for (&sector, w) in mats {
            for c in 0..m {
                if col_norms[&(sector, c)] <= floor {
                    continue;
                }
                let mut r_fn = vec![Complex64::new(0.0, 0.0); qxi];
                for r in 0..m {
                    let coeff = w[(r, c)];
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    let xr = self.xi_slice(r);
                    for (slot, &v) in r_fn.iter_mut().zip(xr) {
                        *slot += coeff * (h * v);
                    }
                }
                groups.entry(-(sector + c as i64)).or_default().push((c, r_fn));
            }
        }

        let mut g = self.empty_function();
        let scale = 1.0 / (2.0 * PI);
        let mut k_fn = vec![Complex64::new(0.0, 0.0); qxi];
        for (&p, members) in &groups {
            let plane = g.plane_mut(p);
            for iy in 0..q {
                k_fn.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for (c, r_fn) in members {
                    let shifted = self.sum_slice(*c, iy);
                    for j in 0..qxi {
                        k_fn[j] += shifted[j] * r_fn[j];
                    }
                }
                let row = &mut plane[iy * q..(iy + 1) * q];
                for (ix, slot) in row.iter_mut().enumerate() {
                    let ph = &self.phase[ix * qxi..(ix + 1) * qxi];
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for (pp, kk) in ph.iter().zip(&k_fn) {
                        // conj(phase) * k
                        re += pp.re * kk.re + pp.im * kk.im;
                        im += pp.re * kk.im - pp.im * kk.re;
                    }
                    *slot = scale * self.half_phase(ix, iy).conj() * Complex64::new(re, im);
                }
            }
        }
        g
    }

    /// Projection onto the closed span of the matrix coefficients of one
    /// sector: the partial sum of the inversion series belonging to `m`.
    /// Planes whose frequency cannot be written as `-(m + j)` with a
    /// retained mode `j` project to zero.
    pub fn peter_weyl_project(&self, g: &PlaneFunction, sector: i64) -> PlaneFunction {
        assert_eq!(g.points(), self.points());
        let m = self.modes();
        let q = self.points();
        let w = g.node_weight();
        let scale = (2.0 * PI).powf(-0.5);
        let ks: Vec<usize> = (0..m).collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); m * q];
        let mut out = self.empty_function();

        for p in g.frequencies().collect::<Vec<_>>() {
            let j = -p - sector;
            if j < 0 || j >= m as i64 {
                continue;
            }
            let j = j as usize;
            let plane = g.plane(p).unwrap();

            // One pass accumulates, for every k, the raw inner product
            // against phi_{jk} and the squared profile norm.
            let mut raw = vec![Complex64::new(0.0, 0.0); m];
            let mut norm_sq = vec![0.0f64; m];
            let mut profile_rows: Vec<Vec<Complex64>> = vec![Vec::new(); q];
            for iy in 0..q {
                self.pair_rows(j, &ks, iy, &mut buf);
                let grow = &plane[iy * q..(iy + 1) * q];
                for k in 0..m {
                    let prow = &buf[k * q..(k + 1) * q];
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut nrm = 0.0;
                    for (gv, pv) in grow.iter().zip(prow) {
                        // <g, b> integrates g against conj(b) and conj(b)
                        // is proportional to phi_{jk} itself.
                        acc += gv * pv;
                        nrm += pv.norm_sqr();
                    }
                    raw[k] += w * acc;
                    norm_sq[k] += w * nrm / (2.0 * PI);
                }
                profile_rows[iy] = buf.clone();
            }

            // coeff_k = (2 pi)^{-1/2} raw_k / norm_k against the basis
            // element; the synthesized plane is sum_k coeff_k b_k.
            let dest = out.plane_mut(p);
            for iy in 0..q {
                let rows = &profile_rows[iy];
                let drow = &mut dest[iy * q..(iy + 1) * q];
                for k in 0..m {
                    let nk = norm_sq[k].sqrt();
                    if nk == 0.0 {
                        continue;
                    }
                    let coeff = scale * raw[k] / nk * (scale / nk);
                    let prow = &rows[k * q..(k + 1) * q];
                    for (d, s) in drow.iter_mut().zip(prow) {
                        *d += coeff * s.conj();
                    }
                }
            }
        }
        out
    }

    /// Twisted translation by `w`: `(T_w g)(z) = e^{(i/2) Im(z conj(w))}
    /// g(z - w)` applied to every plane.  The shift is realized by Fourier
    /// interpolation on the zero padded grid, so the data must decay at the
    /// box edge before and after the shift; sharply supported data should
    /// be translated by exact evaluation instead.  Under the plain twisted
    /// transform the operation obeys `W(T_w g) = W(g) pi(w)`.
    pub fn twisted_translate(&self, g: &PlaneFunction, w: Complex64) -> PlaneFunction {
        assert_eq!(g.points(), self.points());
        let q = self.points();
        let mut out = self.empty_function();
        for p in g.frequencies().collect::<Vec<_>>() {
            let plane = g.plane(p).unwrap();
            self.check_edge_decay(plane, "before a twisted translation");
            let mut shifted = self.fourier_shift(plane, w.re, w.im);
            for iy in 0..q {
                let y = self.plane.nodes[iy];
                for ix in 0..q {
                    let x = self.plane.nodes[ix];
                    let twist = Complex64::from_polar(1.0, 0.5 * (y * w.re - x * w.im));
                    shifted[iy * q + ix] *= twist;
                }
            }
            self.check_edge_decay(&shifted, "after a twisted translation");
            *out.plane_mut(p) = shifted;
        }
        out
    }

    fn check_edge_decay(&self, plane: &[Complex64], when: &str) {
        let q = self.points();
        let peak = plane.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let mut edge = 0.0f64;
        for i in 0..q {
            for j in [0usize, 1, q - 2, q - 1] {
                edge = edge.max(plane[j * q + i].norm());
                edge = edge.max(plane[i * q + j].norm());
            }
        }
        assert!(
            edge <= 1e-3 * peak.max(1e-300),
            "plane data reaches the box edge {when}: edge {edge:.3e} against peak {peak:.3e}"
        );
    }

    /// Fractional grid shift of a plane of samples by `(dx, dy)` via the
    /// zero padded discrete Fourier transform.
    fn fourier_shift(&self, plane: &[Complex64], dx: f64, dy: f64) -> Vec<Complex64> {
        let q = self.points();
        let p = 2 * q;
        let h = self.plane.step;
        let phase_for = |shift: f64| -> Vec<Complex64> {
            let s = shift / h;
            (0..p)
                .map(|k_idx| {
                    let k = if k_idx <= p / 2 { k_idx as i64 } else { k_idx as i64 - p as i64 };
                    Complex64::from_polar(1.0, -2.0 * PI * k as f64 * s / p as f64)
                })
                .collect()
        };
        let mut data = plane.to_vec();
        let mut line = vec![Complex64::new(0.0, 0.0); p];

        for (shift, along_x) in [(dx, true), (dy, false)] {
            if shift == 0.0 {
                continue;
            }
            let phases = phase_for(shift);
            for lane in 0..q {
                line.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for i in 0..q {
                    line[i] = if along_x { data[lane * q + i] } else { data[i * q + lane] };
                }
                self.fft_forward.process(&mut line);
                for (v, ph) in line.iter_mut().zip(&phases) {
                    *v *= ph;
                }
                self.fft_inverse.process(&mut line);
                let scale = 1.0 / p as f64;
                for i in 0..q {
                    let v = line[i] * scale;
                    if along_x {
                        data[lane * q + i] = v;
                    } else {
                        data[i * q + lane] = v;
                    }
                }
            }
        }
        data
    }
}
