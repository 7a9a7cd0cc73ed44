//! Projection pairs built from a spatial cut and a transform window.
//!
//! For a grid set `A` the cut projection is `E_A f = chi_A f`.  On the
//! transform side a window rank `N` keeps the matrix coefficient functions
//! whose transform occupies the first `N` rows.  For the circle extended
//! Schrodinger picture these are the normalised pair coefficients
//! `b_{jk} = (2 pi)^{-1/2} conj(phi_{jk})` at circle frequency `-j`, kept
//! for `k < N`; their transforms are `sqrt(2 pi)` times the matrix units
//! `E_{kj}`, so the compression `F_N` is exactly the orthogonal projection
//! onto the span of the `k < N` members.  For the quaternion side the
//! family is `b_{alpha beta} = conj(Phi_{alpha beta}) / sqrt(c_a)` over
//! tensor Fock monomial labels, with `beta` running through the graded
//! monomial order and `F_N` keeping the first `N` values of `beta`.
//!
//! Both families are exactly orthonormal in the continuum inner product
//! (Moyal orthogonality of the pair coefficients, Schur orthogonality of
//! the Fock coefficients), so every quantity measured here reduces to the
//! Gram matrix of the family against the cut,
//!
//! ```text
//!     gram[r][c] = <chi_A b_r, b_c>,
//! ```
//!
//! accumulated cell by cell with a tensor Gauss-Legendre rule.  The circle
//! backend is block diagonal in the Hermite row `j`: the circle average of
//! `e^{i (j' - j) theta}` vanishes for `j' != j` before any plane
//! quadrature happens, so cross row entries are exactly zero and are never
//! stored.  The quaternion backend is one dense block whose row labels are
//! extended a few monomial levels beyond the engine window, so that
//! expansions of cut vectors over the family close to working accuracy.
//!
//! Storage orientation: `gram[r][c]` puts the row label in the first slot
//! of the inner product.  Spectra, norms and ranks are invariant under the
//! resulting global conjugation, and quadratic forms are always evaluated
//! through [`quad_form`], which matches this orientation.

use std::cell::OnceCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::TruncationConfig;
use crate::hmg::HmgEngine;
use crate::matrix::{BasisTag, OperatorMatrix};
use crate::quad::{gauss_hermite_folded, Axis};
use crate::quat::{symplectic, FockBasis, Quaternion};
use crate::sets::{enlargement_sequence, tensor_gl_nodes, GridSet};
use crate::sum::{stable_sum, KahanSum, KahanSumC};

/// Transform side columns kept per block.  Twelve columns hold every
/// window rank the laboratory certifies (`N <= 8`) with headroom for the
/// certificate space to see the orthogonal complement of the window.
const WINDOW_COLS: usize = 12;

/// Per axis Gauss-Legendre order on a grid cell of the circle backend.
/// The integrands are products of two pair coefficients; on a cell of side
/// `~0.7` the worst retained pair oscillates with local frequency about
/// `kappa ~ 10`, and order eight leaves `(kappa a)^{2n} / ((2n)! (2n+1))`
/// residuals far below every tolerance used here.
const HMG_CELL_ORDER: usize = 8;

/// Per axis Gauss-Legendre order on a quaternion grid cell.  Fock
/// coefficients are polynomials times a Gaussian of scale `1/sqrt(s)`,
/// wider than the cells, so order four integrates the polynomial part of
/// every retained product exactly up to a negligible entire tail.
const QUAT_CELL_ORDER: usize = 4;

/// Extra monomial levels per variable in the extended quaternion family.
/// A cut vector spreads its expansion over neighbouring monomials by the
/// displacement series of the translated Gaussian; three extra levels push
/// the dropped mass below the certificate tolerances on unit size sets.
const EXT_LEVELS: usize = 3;

/// Hermite rows admitted to the certificate space of the circle backend.
const PENCIL_ROWS: usize = 16;

/// Relative eigenvalue floor when whitening a family Gram: directions the
/// family barely spans carry no certificate content and only amplify
/// roundoff.
const WHITEN_FLOOR: f64 = 1e-10;

/// Absolute singular value threshold for the rank of an iterated
/// contraction: the natural scale is the unit norm of the zeroth power.
const LIMIT_EPS: f64 = 1e-6;

/// Relative rank threshold for the Gram of a translated family.
const FAMILY_EPS: f64 = 1e-6;

/// Random mixtures tested against the annihilating inequality.
const TRIALS: usize = 100;

/// Tested mixtures that are exactly supported in the cut set.
const SUPPORTED_TRIALS: usize = 20;

/// Multiplicative roundoff allowance for inequalities certified through
/// eigenvalue bounds.
const SLACK: f64 = 1e-9;

/// Which realisation of the pair a laboratory instance works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Sector zero of the circle extended Schrodinger picture.
    HmgSector,
    /// The quaternion Fock picture at central modulus `a`.
    Quat,
}

impl Backend {
    pub fn label(self) -> &'static str {
        match self {
            Backend::HmgSector => "hmg-sector",
            Backend::Quat => "quat",
        }
    }
}

/// Hilbert-Schmidt data of the composition `E_A F_N`: the same norm along
/// two independent routes, and the cell count prediction.
#[derive(Clone, Debug)]
pub struct HsNorms {
    /// Double quadrature of the composition kernel: contraction of the cut
    /// Gram against the measured reference Gram of the family.
    pub kernel_sq: f64,
    /// Frobenius route: sum of the cut masses of the window members.
    pub frobenius_sq: f64,
    /// Plancherel weight times measure times window rank.
    pub predicted_sq: f64,
    /// Measure of the cut set.
    pub measure: f64,
}

/// Decay profile of the alternating compression `F_N E_A F_N`.
#[derive(Clone, Debug)]
pub struct IntersectionProfile {
    /// Largest singular value of `E_A F_N`.
    pub sigma_max: f64,
    /// Final norm ratio of the iterated compression; estimates
    /// `sigma_max^2`.
    pub contraction: f64,
    /// Successive norm ratios of the iteration.
    pub ratios: Vec<f64>,
    /// Number of singular values of the iterated power above the absolute
    /// threshold.
    pub limit_rank: usize,
    /// The power the compression was raised to.
    pub limit_power: usize,
    /// Frobenius route Hilbert-Schmidt norm squared of `E_A F_N`.
    pub hs_sq: f64,
    /// Integer part of `hs_sq`: an upper bound for the rank of any
    /// norm-one fixed space of the alternation.
    pub dim_bound: usize,
}

/// Certified strong annihilation data for one pair.
#[derive(Clone, Debug)]
pub struct AnnihilationCertificate {
    /// Largest singular value of `E_A F_N`; strict contraction means no
    /// nonzero function is fixed by cutting and windowing.
    pub sigma_max: f64,
    /// Hilbert-Schmidt norm squared of `E_A F_N` (Frobenius route).
    pub hs_sq: f64,
    /// Plancherel weight times measure times window rank.
    pub predicted_hs_sq: f64,
    /// Annihilating constant: `||g||^2 <= constant * (||E^perp g||^2 +
    /// ||F^perp g||^2)` for every `g` in the certificate space.
    pub constant: f64,
    /// Norms of the alternating iterates of one seeded start, relative to
    /// the start.
    pub decay: Vec<f64>,
    /// Worst final norm ratio over many seeded alternating iterations;
    /// below one, the iteration found no fixed direction.
    pub contraction_bound: f64,
    /// Random mixtures violating the certified inequality.
    pub violations: usize,
    pub trials: usize,
    /// Violations among mixtures exactly supported in the cut set, where
    /// the inequality reduces to a lower bound on the windowed complement.
    pub supported_violations: usize,
    pub supported_trials: usize,
    pub pass: bool,
}

/// Gram spectrum of a family of twisted translates of one cut vector.
#[derive(Clone, Debug)]
pub struct IndependenceReport {
    /// Translation applied to each member; the first is zero.
    pub shifts: Vec<Vec<f64>>,
    /// Measure budget each enlargement round was allowed to spend.
    pub budgets: Vec<f64>,
    /// Measure actually gained by each round.
    pub gains: Vec<f64>,
    /// Eigenvalues of the diagonally normalised Gram, descending.
    pub eigenvalues: Vec<f64>,
    /// Relative rank of the Gram at the family threshold.
    pub rank: usize,
}

/// The coefficients of the top singular direction of the alternating
/// compression, tagged with the block and labels it lives on.
struct RangeVector {
    block: usize,
    labels: Vec<usize>,
    coeffs: Vec<Complex64>,
}

/// Window compressions of the cut, one matrix per block, with the label
/// subsets they act on.
struct RangeBlocks {
    mats: Vec<OperatorMatrix>,
    labels: Vec<Vec<usize>>,
}

/// Certificate space data of one block: the family Gram `S`, the defect
/// form `2S - E - F`, and the window form `F` alone, all over the family
/// `[b_i, chi_A b_i]` of the block's certificate labels.
struct PencilData {
    s: OperatorMatrix,
    a: OperatorMatrix,
    f: OperatorMatrix,
}

enum Source<'a> {
    Hmg {
        eng: &'a HmgEngine,
    },
    Quat {
        basis: FockBasis,
        a_mag: f64,
        s: f64,
        root_weight: f64,
        ext_d: usize,
        betas: Vec<(usize, usize)>,
    },
}

/// A projection pair laboratory: one grid set, one backend, and the cut
/// Gram of the coefficient family, from which norms, contraction profiles
/// and annihilation certificates are read off.
pub struct ProjectionLab<'a> {
    backend: Backend,
    set: GridSet,
    measure: f64,
    weight: f64,
    window: usize,
    seed: u64,
    tag: BasisTag,
    blocks: Vec<OperatorMatrix>,
    range_pos: Vec<Vec<usize>>,
    pencil: Vec<Vec<bool>>,
    wide: OnceCell<Vec<OperatorMatrix>>,
    source: Source<'a>,
}

impl<'a> ProjectionLab<'a> {
    /// Build the circle backend laboratory for a planar grid set.  One
    /// Gram block per Hermite row `j < modes`, each over the window
    /// columns; the block of row `j` lives at circle frequency `-j`.
    pub fn hmg(eng: &'a HmgEngine, set: &GridSet) -> ProjectionLab<'a> {
        assert_eq!(set.dim(), 2, "the circle backend cuts planar sets");
        let m = eng.modes();
        let cols = WINDOW_COLS.min(m);
        let scale_sq = 1.0 / (2.0 * PI);
        let mut data = vec![vec![Complex64::new(0.0, 0.0); cols * cols]; m];
        for cell in &set.to_union().boxes {
            for (point, w) in tensor_gl_nodes(cell, HMG_CELL_ORDER) {
                let v = eng.phi_block_at(point[0], point[1], m, cols);
                let w2 = w * scale_sq;
                for (j, acc) in data.iter_mut().enumerate() {
                    let sl = &v[j * cols..(j + 1) * cols];
                    for r in 0..cols {
                        let tr = sl[r].conj() * w2;
                        for c in r..cols {
                            acc[r * cols + c] += tr * sl[c];
                        }
                    }
                }
            }
        }
        let blocks: Vec<OperatorMatrix> = data
            .into_iter()
            .map(|mut d| {
                mirror_upper(&mut d, cols);
                matrix_from(d, cols, BasisTag::HermiteSector)
            })
            .collect();
        ProjectionLab {
            backend: Backend::HmgSector,
            set: set.clone(),
            measure: set.measure(),
            weight: scale_sq,
            window: cols,
            seed: eng.config().seed,
            tag: BasisTag::HermiteSector,
            range_pos: vec![(0..cols).collect(); m],
            pencil: (0..m).map(|j| vec![j < PENCIL_ROWS; cols]).collect(),
            blocks,
            wide: OnceCell::new(),
            source: Source::Hmg { eng },
        }
    }

    /// Build the quaternion backend laboratory for a four dimensional grid
    /// set.  One dense Gram block over labels `(alpha, beta)`: `alpha`
    /// runs through the extended tensor monomials, `beta` through the
    /// graded window.
    pub fn quat(cfg: &TruncationConfig, set: &GridSet) -> ProjectionLab<'static> {
        assert_eq!(set.dim(), 4, "the quaternion backend cuts four dimensional sets");
        let a_mag = cfg.a_magnitude;
        let s = 2.0 * a_mag;
        let weight = 4.0 * a_mag * a_mag / (PI * PI);
        let root_weight = 2.0 * a_mag / PI;
        let eng_d = cfg.fock_degree;
        let ext_d = eng_d + EXT_LEVELS;
        let basis = FockBasis::new(ext_d, s, 4 * ext_d + 4);
        let window = WINDOW_COLS.min(eng_d * eng_d);
        let betas = graded_pairs(window, eng_d - 1);
        let labels = ext_d * ext_d * window;
        let mut data = vec![Complex64::new(0.0, 0.0); labels * labels];
        let mut t = vec![Complex64::new(0.0, 0.0); labels];
        for cell in &set.to_union().boxes {
            for (point, w) in tensor_gl_nodes(cell, QUAT_CELL_ORDER) {
                let q = Quaternion::new(point[0], point[1], point[2], point[3]);
                let m1 = basis.translate_matrix(q.z1());
                let m2 = basis.translate_matrix(q.z2());
                let rw = w.sqrt() * root_weight;
                let mut idx = 0;
                for a1 in 0..ext_d {
                    for a2 in 0..ext_d {
                        for &(b1, b2) in &betas {
                            t[idx] = (m1[b1 * ext_d + a1] * m2[b2 * ext_d + a2]).conj() * rw;
                            idx += 1;
                        }
                    }
                }
                for r in 0..labels {
                    let tr = t[r];
                    let row = &mut data[r * labels..(r + 1) * labels];
                    for c in r..labels {
                        row[c] += tr * t[c].conj();
                    }
                }
            }
        }
        mirror_upper(&mut data, labels);
        let eng_flags: Vec<bool> = (0..labels)
            .map(|l| {
                let alpha = l / window;
                alpha / ext_d < eng_d && alpha % ext_d < eng_d
            })
            .collect();
        ProjectionLab {
            backend: Backend::Quat,
            set: set.clone(),
            measure: set.measure(),
            weight,
            window,
            seed: cfg.seed,
            tag: BasisTag::FockMonomial,
            blocks: vec![matrix_from(data, labels, BasisTag::FockMonomial)],
            range_pos: vec![(0..labels).map(|l| l % window).collect()],
            pencil: vec![eng_flags],
            wide: OnceCell::new(),
            source: Source::Quat { basis, a_mag, s, root_weight, ext_d, betas },
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn set(&self) -> &GridSet {
        &self.set
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// The Plancherel weight of one window column: `1/(2 pi)` for the
    /// circle backend, `4 a^2 / pi^2` for the quaternion backend.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Largest window rank this laboratory certifies.
    pub fn window(&self) -> usize {
        self.window
    }

    /// The weight recovered from the measurement itself: cut mass of the
    /// rank one window divided by the measure of the set.
    pub fn fitted_weight(&self) -> f64 {
        self.frobenius_sq(1) / self.measure
    }

    /// Hilbert-Schmidt norm squared of `E_A F_N` along both routes.
    ///
    /// The kernel of `F_N` is `sum_s B_s(x) conj(B_s(y))` over the window
    /// members, so the double quadrature of the cut kernel factorises as
    ///
    /// ```text
    ///   HS^2 = sum_{s,s'} <chi_A B_s, B_s'> * conj(<B_s, B_s'>_wide)
    /// ```
    ///
    /// with the second factor measured on a wide reference grid.  The
    /// Frobenius route sums the cut masses `<chi_A B_s, B_s>` directly.
    pub fn hs_norms(&self, n: usize) -> HsNorms {
        self.check_rank(n);
        let wide = self.wide_blocks();
        let mut terms = Vec::new();
        for (b, gram) in self.blocks.iter().enumerate() {
            let idx = self.range_labels(b, n);
            let w = &wide[b];
            for &r in &idx {
                for &c in &idx {
                    terms.push((gram[(r, c)] * w[(r, c)].conj()).re);
                }
            }
        }
        HsNorms {
            kernel_sq: stable_sum(&terms),
            frobenius_sq: self.frobenius_sq(n),
            predicted_sq: self.weight * self.measure * n as f64,
            measure: self.measure,
        }
    }

    /// Largest singular value of `E_A F_N`: the root of the largest
    /// eigenvalue of the window compression of the cut.
    pub fn sigma_max(&self, n: usize) -> f64 {
        let blocks = self.range_blocks(n);
        blocks
            .mats
            .iter()
            .map(|m| m.op_norm(1e-11, self.seed).expect("compression power iteration"))
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    /// Decay profile of the alternating compression: contraction ratio,
    /// iterated power rank, and the Hilbert-Schmidt dimension bound.
    pub fn intersection(&self, n: usize) -> IntersectionProfile {
        let blocks = self.range_blocks(n);
        let sigma_sq = blocks
            .mats
            .iter()
            .map(|m| m.op_norm(1e-11, self.seed).expect("compression power iteration"))
            .fold(0.0f64, f64::max);
        assert!(sigma_sq < 1.0, "the cut against the window must contract strictly");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut x = random_block_vector(&blocks, &mut rng);
        let mut ratios = Vec::with_capacity(80);
        for _ in 0..80 {
            let y: Vec<Vec<Complex64>> =
                blocks.mats.iter().zip(&x).map(|(m, v)| m.apply(v)).collect();
            let r = block_norm(&y);
            if r == 0.0 {
                break;
            }
            ratios.push(r);
            x = y;
            let inv = 1.0 / r;
            for v in &mut x {
                for e in v {
                    *e *= inv;
                }
            }
        }
        let contraction = ratios.last().copied().unwrap_or(0.0);
        // Enough squarings that the top eigenvalue decays through 1e-9,
        // within a fixed power budget.
        let needed = if sigma_sq <= 1e-12 {
            64.0
        } else {
            (1e-9f64.ln() / sigma_sq.ln()).clamp(64.0, 4096.0)
        };
        let squarings = (needed.log2().ceil() as u32).max(6);
        let limit_rank: usize = blocks
            .mats
            .iter()
            .map(|m| {
                let mut p = m.clone();
                for _ in 0..squarings {
                    p = p.mul(&p);
                }
                p.eps_rank_abs(LIMIT_EPS)
            })
            .sum();
        let hs_sq = self.frobenius_sq(n);
        IntersectionProfile {
            sigma_max: sigma_sq.sqrt(),
            contraction,
            ratios,
            limit_rank,
            limit_power: 1usize << squarings,
            hs_sq,
            dim_bound: hs_sq.floor() as usize,
        }
    }

    /// Certify the strong annihilation inequality on the laboratory's
    /// finite certificate space and stress it with random mixtures.
    pub fn annihilation_certificate(&self, n: usize) -> AnnihilationCertificate {
        self.check_rank(n);
        let sigma_max = self.sigma_max(n);
        let hs_sq = self.frobenius_sq(n);
        let predicted_hs_sq = self.weight * self.measure * n as f64;
        let (constant, pencils) = self.pencil_constant(n);
        let (violations, trials) = self.mixture_trials(&pencils, constant);
        let (supported_violations, supported_trials) =
            self.supported_trials(&pencils, constant);
        let (decay, contraction_bound) = self.alternating_decay(n);
        let pass = sigma_max < 1.0
            && constant >= 1.0 - SLACK
            && violations == 0
            && supported_violations == 0
            && contraction_bound < 1.0;
        AnnihilationCertificate {
            sigma_max,
            hs_sq,
            predicted_hs_sq,
            constant,
            decay,
            contraction_bound,
            violations,
            trials,
            supported_violations,
            supported_trials,
            pass,
        }
    }

    /// Frobenius route: the cut masses of the window members summed.
    fn frobenius_sq(&self, n: usize) -> f64 {
        self.check_rank(n);
        let mut terms = Vec::new();
        for (b, gram) in self.blocks.iter().enumerate() {
            for &r in &self.range_labels(b, n) {
                terms.push(gram[(r, r)].re);
            }
        }
        stable_sum(&terms)
    }

    fn check_rank(&self, n: usize) {
        assert!(
            n >= 1 && n <= self.window,
            "window rank {n} outside 1..={}",
            self.window
        );
    }

    fn range_labels(&self, block: usize, n: usize) -> Vec<usize> {
        self.range_pos[block]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p < n)
            .map(|(l, _)| l)
            .collect()
    }

    fn range_blocks(&self, n: usize) -> RangeBlocks {
        self.check_rank(n);
        let mut mats = Vec::new();
        let mut labels = Vec::new();
        for (b, gram) in self.blocks.iter().enumerate() {
            let idx = self.range_labels(b, n);
            mats.push(sub_matrix(gram, &idx, self.tag));
            labels.push(idx);
        }
        RangeBlocks { mats, labels }
    }

    fn wide_blocks(&self) -> &Vec<OperatorMatrix> {
        self.wide.get_or_init(|| match &self.source {
            Source::Hmg { eng } => hmg_wide(eng, self.window),
            Source::Quat { basis, s, root_weight, ext_d, betas, .. } => {
                vec![quat_wide(basis, *s, *root_weight, *ext_d, betas)]
            }
        })
    }

    /// Assemble the certificate space forms of every block and return the
    /// annihilating constant `1 / min eig` of the whitened defect form.
    fn pencil_constant(&self, n: usize) -> (f64, Vec<PencilData>) {
        let mut lam_min = f64::INFINITY;
        let mut out = Vec::new();
        for (b, gram) in self.blocks.iter().enumerate() {
            let p: Vec<usize> = self.pencil[b]
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(l, _)| l)
                .collect();
            if p.is_empty() {
                continue;
            }
            let np = p.len();
            let dim = 2 * np;
            let g = sub_matrix(gram, &p, self.tag);
            // Family Gram S over [smooth half, cut half]: the smooth half
            // is orthonormal, every mixed or cut block is the cut Gram.
            let mut s = OperatorMatrix::zeros(dim, dim, self.tag);
            for r in 0..np {
                s[(r, r)] = Complex64::new(1.0, 0.0);
            }
            for r in 0..np {
                for c in 0..np {
                    let v = g[(r, c)];
                    s[(r, np + c)] = v;
                    s[(np + r, c)] = v;
                    s[(np + r, np + c)] = v;
                }
            }
            // Cut form: the cut of any mixture depends only on the summed
            // coefficients, so every quarter is the cut Gram again.
            let mut me = OperatorMatrix::zeros(dim, dim, self.tag);
            for r in 0..np {
                for c in 0..np {
                    let v = g[(r, c)];
                    me[(r, c)] = v;
                    me[(r, np + c)] = v;
                    me[(np + r, c)] = v;
                    me[(np + r, np + c)] = v;
                }
            }
            // Window form through the expansion over the window members of
            // this block: smooth members expand to themselves, cut members
            // to their Gram row.
            let range = self.range_labels(b, n);
            let nr = range.len();
            let mut z = vec![Complex64::new(0.0, 0.0); nr * dim];
            for (lr, &lab) in range.iter().enumerate() {
                if let Some(i) = p.iter().position(|&x| x == lab) {
                    z[lr * dim + i] = Complex64::new(1.0, 0.0);
                }
                for (i, &pi) in p.iter().enumerate() {
                    z[lr * dim + np + i] = gram[(pi, lab)];
                }
            }
            let mut f = OperatorMatrix::zeros(dim, dim, self.tag);
            for r in 0..dim {
                for c in r..dim {
                    let mut acc = KahanSumC::new();
                    for lr in 0..nr {
                        acc.add(z[lr * dim + r] * z[lr * dim + c].conj());
                    }
                    let v = acc.value();
                    f[(r, c)] = v;
                    f[(c, r)] = v.conj();
                }
            }
            let a = s.scale(Complex64::new(2.0, 0.0)).sub(&me).sub(&f);
            // Whiten by the family Gram and take the smallest eigenvalue
            // of the defect form on the directions the family spans.
            let (vals, vecs) = s.eigen_hermitian().expect("family Gram eigendecomposition");
            let top = vals.last().copied().unwrap_or(0.0);
            let kept: Vec<usize> =
                (0..dim).filter(|&i| vals[i] > WHITEN_FLOOR * top).collect();
            assert!(!kept.is_empty(), "certificate family entirely degenerate");
            let w = OperatorMatrix::from_fn(dim, kept.len(), self.tag, |r, c| {
                vecs[(r, kept[c])] / vals[kept[c]].sqrt()
            });
            let mut white = w.adjoint().mul(&a.mul(&w));
            symmetrize(&mut white);
            let lam = white.min_eigen_sym().expect("whitened defect eigenvalue");
            lam_min = lam_min.min(lam);
            out.push(PencilData { s, a, f });
        }
        assert!(
            lam_min > 1e-6,
            "defect form nearly singular: cut and window share a direction"
        );
        (1.0 / lam_min, out)
    }

    /// Random mixtures across every certificate block against
    /// `||g||^2 <= constant * (||E^perp g||^2 + ||F^perp g||^2)`.
    fn mixture_trials(&self, pencils: &[PencilData], constant: f64) -> (usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5de6_d1c2_b3a4_9587);
        let mut violations = 0;
        for _ in 0..TRIALS {
            let mut norm_sq = KahanSum::new();
            let mut defect = KahanSum::new();
            for p in pencils {
                let x = random_coeffs(&mut rng, p.s.rows());
                norm_sq.add(quad_form(&p.s, &x));
                defect.add(quad_form(&p.a, &x));
            }
            if norm_sq.value() > constant * defect.value() + SLACK * norm_sq.value() {
                violations += 1;
            }
        }
        (violations, TRIALS)
    }

    /// Mixtures with no smooth half are exactly supported in the cut set,
    /// the cut defect vanishes, and the inequality becomes a lower bound
    /// on the mass the window fails to capture.  The windowed mass equals
    /// the transform side compression mass by the transforms of the
    /// family, so this is the cut-and-bound form of the inequality.
    fn supported_trials(&self, pencils: &[PencilData], constant: f64) -> (usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x27d4_eb2f_1656_67c5);
        let mut violations = 0;
        for _ in 0..SUPPORTED_TRIALS {
            let mut norm_sq = KahanSum::new();
            let mut windowed = KahanSum::new();
            for p in pencils {
                let np = p.s.rows() / 2;
                let mut x = vec![Complex64::new(0.0, 0.0); 2 * np];
                for e in x.iter_mut().skip(np) {
                    *e = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
                norm_sq.add(quad_form(&p.s, &x));
                windowed.add(quad_form(&p.f, &x));
            }
            let complement = (norm_sq.value() - windowed.value()).max(0.0);
            if norm_sq.value() > constant * complement + SLACK * norm_sq.value() {
                violations += 1;
            }
        }
        (violations, SUPPORTED_TRIALS)
    }

    /// Iterate the alternating compression from many seeded starts.
    /// Returns the norm decay of the first start and the worst final
    /// ratio seen, which bounds any fixed direction away from norm one.
    fn alternating_decay(&self, n: usize) -> (Vec<f64>, f64) {
        let blocks = self.range_blocks(n);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x1f83_d9ab_fb41_bd6b);
        let mut decay = Vec::new();
        let mut worst: f64 = 0.0;
        for trial in 0..50 {
            let mut x = random_block_vector(&blocks, &mut rng);
            let mut running = 1.0;
            if trial == 0 {
                decay.push(running);
            }
            let mut last = 0.0;
            for it in 0..200 {
                let y: Vec<Vec<Complex64>> =
                    blocks.mats.iter().zip(&x).map(|(m, v)| m.apply(v)).collect();
                let r = block_norm(&y);
                if r == 0.0 {
                    last = 0.0;
                    break;
                }
                if trial == 0 && it < 12 {
                    running *= r;
                    decay.push(running);
                }
                last = r;
                x = y;
                let inv = 1.0 / r;
                for v in &mut x {
                    for e in v {
                        *e *= inv;
                    }
                }
            }
            worst = worst.max(last);
        }
        (decay, worst)
    }

    /// Top singular direction of the alternating compression, found by
    /// seeded power iteration on the block that carries the largest
    /// eigenvalue.
    fn top_range_vector(&self, n: usize) -> RangeVector {
        let blocks = self.range_blocks(n);
        let norms: Vec<f64> = blocks
            .mats
            .iter()
            .map(|m| m.op_norm(1e-11, self.seed).expect("compression power iteration"))
            .collect();
        let block = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("at least one block");
        let m = &blocks.mats[block];
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x7137_4491_ab1c_5ed5);
        let mut x = random_coeffs(&mut rng, m.rows());
        normalize(&mut x);
        for _ in 0..300 {
            let y = m.apply(&x);
            x = y;
            normalize(&mut x);
        }
        RangeVector { block, labels: blocks.labels[block].clone(), coeffs: x }
    }

    /// Evaluate the twisted translate by `shift` of the cut top direction
    /// at one point: the translation phase of the backend times the
    /// transported profile.  The cut itself is applied by the caller
    /// through the integration domain.
    fn transported_value(&self, top: &RangeVector, n: usize, point: &[f64], shift: &[f64]) -> Complex64 {
        match &self.source {
            Source::Hmg { eng } => {
                let (x, y) = (point[0] - shift[0], point[1] - shift[1]);
                let v = eng.phi_block_at(x, y, top.block + 1, n);
                let scale = 1.0 / (2.0 * PI).sqrt();
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &c) in top.coeffs.iter().enumerate() {
                    acc += c * v[top.block * n + k].conj();
                }
                let phase = 0.5 * (point[1] * shift[0] - point[0] * shift[1]);
                acc * scale * Complex64::from_polar(1.0, phase)
            }
            Source::Quat { basis, a_mag, root_weight, ext_d, betas, .. } => {
                let q = Quaternion::new(point[0], point[1], point[2], point[3]);
                let w = Quaternion::new(shift[0], shift[1], shift[2], shift[3]);
                let shifted = q + (-w);
                let m1 = basis.translate_matrix(shifted.z1());
                let m2 = basis.translate_matrix(shifted.z2());
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &lab) in top.labels.iter().enumerate() {
                    let c = top.coeffs[i];
                    if c.norm_sqr() < 1e-28 {
                        continue;
                    }
                    let alpha = lab / self.window;
                    let (b1, b2) = betas[lab % self.window];
                    let (a1, a2) = (alpha / ext_d, alpha % ext_d);
                    acc += c * (m1[b1 * ext_d + a1] * m2[b2 * ext_d + a2]).conj();
                }
                let phase = 2.0 * symplectic(*a_mag, q, w);
                acc * *root_weight * Complex64::from_polar(1.0, phase)
            }
        }
    }
}

/// Build a family of twisted translates of the cut top direction of the
/// pair, shifted along an enlargement sequence of the base piece inside
/// the cut set, and report the spectrum of its Gram.  Each enlargement
/// round guarantees fresh measure, so each translate keeps mass no other
/// member reaches and the Gram stays uniformly nondegenerate.
pub fn independent_family(
    lab: &ProjectionLab,
    base: &GridSet,
    eps_total: f64,
    rounds: usize,
    n: usize,
) -> IndependenceReport {
    lab.check_rank(n);
    let steps = enlargement_sequence(&lab.set, base, eps_total, rounds);
    let dim = lab.set.dim();
    let mut shifts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    shifts.extend(steps.iter().map(|s| s.shift.clone()));
    let budgets: Vec<f64> = steps.iter().map(|s| s.budget).collect();
    let gains: Vec<f64> = steps.iter().map(|s| s.measure_after - s.measure_before).collect();
    let top = lab.top_range_vector(n);
    let order = match lab.backend {
        Backend::HmgSector => HMG_CELL_ORDER,
        Backend::Quat => QUAT_CELL_ORDER,
    };
    let boxes = lab.set.to_union().boxes;
    let fam = shifts.len();
    let mut gram = OperatorMatrix::zeros(fam, fam, lab.tag);
    for l in 0..fam {
        for lp in l..fam {
            let mut acc = KahanSumC::new();
            for bl in &boxes {
                let b1 = bl.translate(&shifts[l]);
                for bc in &boxes {
                    let b2 = bc.translate(&shifts[lp]);
                    let Some(inter) = b1.intersect(&b2) else { continue };
                    for (point, w) in tensor_gl_nodes(&inter, order) {
                        let vl = lab.transported_value(&top, n, &point, &shifts[l]);
                        let vp = lab.transported_value(&top, n, &point, &shifts[lp]);
                        acc.add(vl * vp.conj() * w);
                    }
                }
            }
            let v = acc.value();
            gram[(l, lp)] = v;
            gram[(lp, l)] = v.conj();
        }
    }
    let diag: Vec<f64> = (0..fam).map(|i| gram[(i, i)].re).collect();
    let normalized = OperatorMatrix::from_fn(fam, fam, lab.tag, |r, c| {
        gram[(r, c)] / (diag[r] * diag[c]).sqrt()
    });
    let (vals, _) = normalized.eigen_hermitian().expect("family Gram eigendecomposition");
    let mut eigenvalues: Vec<f64> = vals;
    eigenvalues.reverse();
    let rank = normalized.eps_rank(FAMILY_EPS);
    IndependenceReport { shifts, budgets, gains, eigenvalues, rank }
}

/// Reference Gram of the circle family on a wide midpoint grid: one block
/// per Hermite row, each close to the identity by Moyal orthogonality.
/// The radius reaches past the classical ring of the largest retained
/// pair, the step resolves twice its oscillation band.
fn hmg_wide(eng: &HmgEngine, cols: usize) -> Vec<OperatorMatrix> {
    let m = eng.modes();
    let reach = 2.0f64.sqrt() * (((m - 1) as f64).sqrt() + ((cols - 1) as f64).sqrt()) + 2.5;
    let band = (2.0 * (m as f64 - 1.0)).sqrt() + 4.5;
    let step_target = PI / (1.45 * band);
    let mut points = (2.0 * reach / step_target).ceil() as usize;
    points += points % 2;
    let axis = Axis::midpoint(reach, points);
    let scale_sq = 1.0 / (2.0 * PI);
    let w2 = axis.step * axis.step * scale_sq;
    let mut data = vec![vec![Complex64::new(0.0, 0.0); cols * cols]; m];
    for &y in &axis.nodes {
        for &x in &axis.nodes {
            let v = eng.phi_block_at(x, y, m, cols);
            for (j, acc) in data.iter_mut().enumerate() {
                let sl = &v[j * cols..(j + 1) * cols];
                for r in 0..cols {
                    let tr = sl[r].conj() * w2;
                    for c in r..cols {
                        acc[r * cols + c] += tr * sl[c];
                    }
                }
            }
        }
    }
    data.into_iter()
        .map(|mut d| {
            mirror_upper(&mut d, cols);
            matrix_from(d, cols, BasisTag::HermiteSector)
        })
        .collect()
}

/// Reference Gram of the quaternion family, close to the identity by
/// Schur orthogonality.  The plane integral factorises per complex
/// variable, so one two dimensional table over single variable labels
/// `(alpha_i, beta_i)` determines the whole Gram.  The folded
/// Gauss-Hermite rule integrates the Gaussian weight of the coefficients
/// exactly through the largest retained polynomial degree.
fn quat_wide(
    basis: &FockBasis,
    s: f64,
    root_weight: f64,
    ext_d: usize,
    betas: &[(usize, usize)],
) -> OperatorMatrix {
    let window = betas.len();
    let b_count = betas.iter().map(|&(p, q)| p.max(q)).max().unwrap_or(0) + 1;
    let nodes = ext_d - 1 + b_count + 1;
    let rule = gauss_hermite_folded(nodes, s);
    let pairs = ext_d * b_count;
    let mut table = vec![Complex64::new(0.0, 0.0); pairs * pairs];
    for (xi, &x) in rule.nodes.iter().enumerate() {
        for (yi, &y) in rule.nodes.iter().enumerate() {
            let w2 = rule.weights[xi] * rule.weights[yi];
            let m = basis.translate_matrix(Complex64::new(x, y));
            for a in 0..ext_d {
                for b in 0..b_count {
                    let e = m[b * ext_d + a].conj() * w2;
                    let row = (a * b_count + b) * pairs;
                    for ap in 0..ext_d {
                        for bp in 0..b_count {
                            table[row + ap * b_count + bp] += e * m[bp * ext_d + ap];
                        }
                    }
                }
            }
        }
    }
    let labels = ext_d * ext_d * window;
    let weight = root_weight * root_weight;
    OperatorMatrix::from_fn(labels, labels, BasisTag::FockMonomial, |r, c| {
        let (ar, br) = (r / window, betas[r % window]);
        let (ac, bc) = (c / window, betas[c % window]);
        let p1 = (ar / ext_d) * b_count + br.0;
        let p1c = (ac / ext_d) * b_count + bc.0;
        let p2 = (ar % ext_d) * b_count + br.1;
        let p2c = (ac % ext_d) * b_count + bc.1;
        table[p1 * pairs + p1c] * table[p2 * pairs + p2c] * weight
    })
}

/// Tensor monomial pairs in graded order: total degree ascending, first
/// factor descending inside a degree, truncated to the window size and to
/// factors below the cap.
fn graded_pairs(window: usize, max_each: usize) -> Vec<(usize, usize)> {
    assert!(
        (max_each + 1) * (max_each + 1) >= window,
        "window larger than the available monomials"
    );
    let mut out = Vec::with_capacity(window);
    let mut total = 0;
    while out.len() < window {
        for p in (0..=total).rev() {
            let q = total - p;
            if p <= max_each && q <= max_each {
                out.push((p, q));
                if out.len() == window {
                    break;
                }
            }
        }
        total += 1;
    }
    out
}

/// Evaluate the quadratic form of a stored Gram on a coefficient vector:
/// `Re sum m[r][c] x_r conj(x_c)`, the squared norm of the mixture when
/// `m` is a family Gram in the module's orientation.
fn quad_form(m: &OperatorMatrix, x: &[Complex64]) -> f64 {
    let n = x.len();
    let mut acc = KahanSum::new();
    for r in 0..n {
        for c in 0..n {
            acc.add((m[(r, c)] * x[r] * x[c].conj()).re);
        }
    }
    acc.value()
}

fn sub_matrix(m: &OperatorMatrix, idx: &[usize], tag: BasisTag) -> OperatorMatrix {
    OperatorMatrix::from_fn(idx.len(), idx.len(), tag, |r, c| m[(idx[r], idx[c])])
}

fn matrix_from(data: Vec<Complex64>, n: usize, tag: BasisTag) -> OperatorMatrix {
    OperatorMatrix::from_fn(n, n, tag, |r, c| data[r * n + c])
}

fn mirror_upper(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in 0..r {
            data[r * n + c] = data[c * n + r].conj();
        }
    }
}

fn symmetrize(m: &mut OperatorMatrix) {
    let n = m.rows();
    for r in 0..n {
        for c in r..n {
            let v = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect()
}

fn random_block_vector(blocks: &RangeBlocks, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut x: Vec<Vec<Complex64>> =
        blocks.mats.iter().map(|m| random_coeffs(rng, m.rows())).collect();
    let norm = block_norm(&x);
    assert!(norm > 0.0);
    let inv = 1.0 / norm;
    for v in &mut x {
        for e in v {
            *e *= inv;
        }
    }
    x
}

fn block_norm(x: &[Vec<Complex64>]) -> f64 {
    let parts: Vec<f64> = x
        .iter()
        .flat_map(|v| v.iter().map(|e| e.norm_sqr()))
        .collect();
    stable_sum(&parts).sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let parts: Vec<f64> = x.iter().map(|e| e.norm_sqr()).collect();
    let norm = stable_sum(&parts).sqrt();
    assert!(norm > 0.0);
    let inv = 1.0 / norm;
    for e in x {
        *e *= inv;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre_on;
    use crate::quat::{QuatEngine, QuatPolynomial};
    use approx::assert_abs_diff_eq;

    fn hmg_config() -> TruncationConfig {
        TruncationConfig {
            hermite_cutoff: 16,
            buffer: 13,
            theta_samples: 32,
            quad_radius: 7.0,
            quad_points: 140,
            ..TruncationConfig::default()
        }
    }

    fn quat_config(a_mag: f64) -> TruncationConfig {
        TruncationConfig {
            fock_degree: 6,
            quat_quad_points: 8,
            a_magnitude: a_mag,
            ..TruncationConfig::default()
        }
    }

    /// Four cells of side 1/2 around the origin: the unit square, measure
    /// one.
    fn square_set() -> GridSet {
        let cells = (-1..1).flat_map(|i| (-1..1).map(move |j| vec![i, j]));
        GridSet::new(2, 0.5, cells).unwrap()
    }

    /// Sixteen cells of side 1/2 around the origin: the unit cube in four
    /// dimensions, measure one.
    fn cube_set() -> GridSet {
        let mut cells = Vec::new();
        for i in -1..1i64 {
            for j in -1..1i64 {
                for k in -1..1i64 {
                    for l in -1..1i64 {
                        cells.push(vec![i, j, k, l]);
                    }
                }
            }
        }
        GridSet::new(4, 0.5, cells).unwrap()
    }

    /// Eight cells: a slab of the unit cube, measure 1/2.
    fn slab_set() -> GridSet {
        let mut cells = Vec::new();
        for i in -1..1i64 {
            for j in -1..1i64 {
                for k in -1..1i64 {
                    cells.push(vec![i, j, k, -1]);
                }
            }
        }
        GridSet::new(4, 0.5, cells).unwrap()
    }

    /// 1-D integral of exp(-g x^2) over [lo, hi] by a dense rule that
    /// shares nothing with the sweep under test.
    fn gaussian_line(g: f64, lo: f64, hi: f64) -> f64 {
        let rule = gauss_legendre_on(40, lo, hi);
        let terms: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * (-g * x * x).exp())
            .collect();
        stable_sum(&terms)
    }

    #[test]
    fn graded_order_sorts_by_total_degree() {
        let pairs = graded_pairs(12, 5);
        assert_eq!(
            pairs,
            vec![
                (0, 0),
                (1, 0),
                (0, 1),
                (2, 0),
                (1, 1),
                (0, 2),
                (3, 0),
                (2, 1),
                (1, 2),
                (0, 3),
                (4, 0),
                (3, 1)
            ]
        );
        // A cap below the requested degrees skips the blocked corner.
        let capped = graded_pairs(4, 1);
        assert_eq!(capped, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn cut_gram_vacuum_entry_matches_direct_gaussian_quadrature() {
        // The vacuum pair coefficient is exp(-|z|^2 / 4), so the (0,0)
        // entry of the row zero block is the plain Gaussian mass of the
        // set over 2 pi, checkable without any engine table.
        let eng = HmgEngine::new(&hmg_config());
        let lab = ProjectionLab::hmg(&eng, &square_set());
        let line = gaussian_line(0.5, -0.5, 0.5);
        let want = line * line / (2.0 * PI);
        let got = lab.blocks[0][(0, 0)];
        assert_abs_diff_eq!(got.re, want, epsilon = 1e-9);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quat_cut_gram_vacuum_entry_matches_direct_gaussian_quadrature() {
        // The vacuum Fock coefficient is exp(-s |q|^2 / 2), so the vacuum
        // diagonal entry is the Gaussian mass of the cube times the
        // Plancherel weight.
        let cfg = quat_config(1.0);
        let lab = ProjectionLab::quat(&cfg, &cube_set());
        let line = gaussian_line(2.0, -0.5, 0.5);
        let want = line.powi(4) * lab.weight();
        // The per cell rule carries its own few 1e-8 relative remainder on
        // the Gaussian; the oracle rule is far below that.
        let vac = 0usize;
        let got = lab.blocks[0][(vac, vac)];
        assert_abs_diff_eq!(got.re, want, epsilon = 1e-7);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn reference_grams_are_near_the_identity() {
        let eng = HmgEngine::new(&hmg_config());
        let one_cell = GridSet::new(2, 0.5, [vec![0i64, 0]]).unwrap();
        let lab = ProjectionLab::hmg(&eng, &one_cell);
        for block in lab.wide_blocks() {
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!((block[(r, c)] - want).norm(), 0.0, epsilon = 5e-6);
                }
            }
        }
        let cfg = quat_config(1.0);
        let cell4 = GridSet::new(4, 0.5, [vec![0i64, 0, 0, 0]]).unwrap();
        let qlab = ProjectionLab::quat(&cfg, &cell4);
        let wide = &qlab.wide_blocks()[0];
        for r in 0..wide.rows() {
            for c in 0..wide.cols() {
                let want = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((wide[(r, c)] - want).norm(), 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn cut_window_certificates_hold_on_a_small_square() {
        let eng = HmgEngine::new(&hmg_config());
        let lab = ProjectionLab::hmg(&eng, &square_set());
        for n in [1usize, 3, 8] {
            let hs = lab.hs_norms(n);
            let rel = (hs.kernel_sq - hs.frobenius_sq).abs() / hs.frobenius_sq;
            assert!(rel < 2e-3, "paths disagree at rank {n}: {rel:.2e}");
            let pred = (hs.frobenius_sq - hs.predicted_sq).abs() / hs.predicted_sq;
            assert!(pred < 5e-3, "cell count prediction off at rank {n}: {pred:.2e}");
        }
        let profile = lab.intersection(4);
        assert!(profile.sigma_max < 0.8, "sigma {:.3}", profile.sigma_max);
        let target = profile.sigma_max * profile.sigma_max;
        assert!(
            (profile.contraction - target).abs() <= 0.02 * target,
            "contraction {:.6} vs sigma^2 {:.6}",
            profile.contraction,
            target
        );
        assert_eq!(profile.limit_rank, 0);
        assert!(profile.limit_rank <= profile.dim_bound);
        let cert = lab.annihilation_certificate(4);
        assert!(cert.pass, "certificate failed: {cert:?}");
        assert!(cert.constant > 1.0);
        // The two-projection angle bound: the defect eigenvalue can not
        // fall below 1 - sigma, so the constant can not exceed its
        // reciprocal.
        assert!(cert.constant * (1.0 - cert.sigma_max) <= 1.0 + 1e-6);
        assert_eq!(cert.violations, 0);
        assert_eq!(cert.supported_violations, 0);
        assert!(cert.decay.last().unwrap() < &1e-3);
    }

    #[test]
    fn quat_certificates_hold_on_a_small_cube() {
        let cfg = quat_config(1.0);
        let lab = ProjectionLab::quat(&cfg, &cube_set());
        let fitted = lab.fitted_weight();
        let want = 4.0 / (PI * PI);
        assert!(
            (fitted - want).abs() / want < 1e-3,
            "fitted weight {fitted:.6} vs {want:.6}"
        );
        for n in [1usize, 4] {
            let hs = lab.hs_norms(n);
            let rel = (hs.kernel_sq - hs.frobenius_sq).abs() / hs.frobenius_sq;
            assert!(rel < 5e-3, "paths disagree at rank {n}: {rel:.2e}");
            let fit_pred = fitted * lab.measure() * n as f64;
            let pred = (hs.frobenius_sq - fit_pred).abs() / fit_pred;
            assert!(pred < 1e-2, "cell count prediction off at rank {n}: {pred:.2e}");
        }
        let profile = lab.intersection(4);
        assert!(profile.sigma_max < 0.8, "sigma {:.3}", profile.sigma_max);
        let target = profile.sigma_max * profile.sigma_max;
        assert!(
            (profile.contraction - target).abs() <= 0.02 * target,
            "contraction {:.6} vs sigma^2 {:.6}",
            profile.contraction,
            target
        );
        assert_eq!(profile.limit_rank, 0);
        let cert = lab.annihilation_certificate(4);
        assert!(cert.pass, "certificate failed: {cert:?}");
        assert!(cert.constant > 1.0);
        assert!(cert.constant * (1.0 - cert.sigma_max) <= 1.0 + 1e-6);
    }

    #[test]
    fn twisted_translates_gain_rank_with_each_enlargement() {
        let eng = HmgEngine::new(&hmg_config());
        let set = square_set();
        let lab = ProjectionLab::hmg(&eng, &set);
        let report = independent_family(&lab, &set, 0.45, 3, 4);
        assert_eq!(report.rank, 4, "eigenvalues {:?}", report.eigenvalues);
        assert_eq!(report.shifts.len(), 4);
        for (gain, budget) in report.gains.iter().zip(&report.budgets) {
            assert!(
                *gain >= budget.min(set.measure()) / 2.0 - 1e-9,
                "gain {gain} under budget {budget}"
            );
        }
        let top = report.eigenvalues[0];
        assert!(report.eigenvalues[3] > FAMILY_EPS * top);
    }

    #[test]
    fn quat_twisted_translates_gain_rank_with_each_enlargement() {
        let cfg = quat_config(1.0);
        let set = slab_set();
        let lab = ProjectionLab::quat(&cfg, &set);
        let report = independent_family(&lab, &set, 0.2, 3, 4);
        assert_eq!(report.rank, 4, "eigenvalues {:?}", report.eigenvalues);
        let top = report.eigenvalues[0];
        assert!(report.eigenvalues[3] > FAMILY_EPS * top);
    }

    #[test]
    fn translation_phase_matches_the_circle_engine() {
        // The engine translates sampled planes by Fourier shift; the
        // family Grams use the same phase convention in closed form.
        let eng = HmgEngine::new(&hmg_config());
        let mut g = eng.empty_function();
        let q = eng.points();
        let nodes = eng.plane_axis().nodes.clone();
        {
            let plane = g.plane_mut(0);
            plane.resize(q * q, Complex64::new(0.0, 0.0));
            for (iy, &y) in nodes.iter().enumerate() {
                for (ix, &x) in nodes.iter().enumerate() {
                    plane[iy * q + ix] =
                        Complex64::new((-(x * x + y * y) / 4.0).exp(), 0.0);
                }
            }
        }
        let w = Complex64::new(0.35, -0.2);
        let moved = eng.twisted_translate(&g, w);
        let plane = moved.plane(0).unwrap();
        for (iy, ix) in [(q / 2, q / 2), (q / 2 + 3, q / 2 - 2), (q / 3, 2 * q / 3)] {
            let (x, y) = (nodes[ix], nodes[iy]);
            let phase = Complex64::from_polar(1.0, 0.5 * (y * w.re - x * w.im));
            let shifted = Complex64::new(x - w.re, y - w.im);
            let want = phase * (-shifted.norm_sqr() / 4.0).exp();
            assert_abs_diff_eq!((plane[iy * q + ix] - want).norm(), 0.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn translation_phase_matches_the_quaternion_engine() {
        let cfg = quat_config(1.0);
        let eng = QuatEngine::new(&cfg);
        let poly = QuatPolynomial::gaussian(1.0);
        let f = eng.sample(&poly);
        let shift = Quaternion::new(0.2, -0.15, 0.1, 0.05);
        let moved = eng.twisted_translate(&f, shift);
        for (n0, n1, n2, n3) in [(3, 4, 3, 4), (2, 5, 4, 3), (4, 4, 4, 4)] {
            let point = eng.grid_node([n0, n1, n2, n3]);
            let phase = Complex64::from_polar(1.0, 2.0 * symplectic(1.0, point, shift));
            let want = phase * poly.eval(point + (-shift));
            assert_abs_diff_eq!(
                (moved.value(n0, n1, n2, n3) - want).norm(),
                0.0,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn identical_runs_share_every_bit() {
        let eng = HmgEngine::new(&hmg_config());
        let set = square_set();
        let a = ProjectionLab::hmg(&eng, &set);
        let b = ProjectionLab::hmg(&eng, &set);
        let ha = a.hs_norms(3);
        let hb = b.hs_norms(3);
        assert_eq!(ha.kernel_sq.to_bits(), hb.kernel_sq.to_bits());
        assert_eq!(ha.frobenius_sq.to_bits(), hb.frobenius_sq.to_bits());
        assert_eq!(
            a.intersection(3).contraction.to_bits(),
            b.intersection(3).contraction.to_bits()
        );
    }
}
