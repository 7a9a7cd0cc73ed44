//! Function carriers on the group `C x T`: the plane decomposition used by
//! every transform kernel, the dense sample tabulation used for file
//! exchange, and symbolic combinations of matrix coefficient basis
//! elements used to build test functions with known transforms.
//!
//! A function `g(z, theta)` that is a trigonometric polynomial in theta is
//! stored as its circle decomposition `g = sum_p e^{i p theta} G_p(z)`,
//! one plane of samples per integer frequency.  All inner products use the
//! measure `dz x dtheta/(2pi)`, under which the frequencies are exactly
//! orthonormal, so a circle integral of a stored function is a finite sum
//! over planes with no quadrature error in theta.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use crate::sum::{stable_sum, KahanSumC};

/// A function on `C x T`, polynomial in the circle variable: one plane of
/// grid samples per circle frequency.  Plane data is row major over the
/// symmetric midpoint grid, `values[iy * points + ix]`.
#[derive(Clone, Debug)]
pub struct PlaneFunction {
    points: usize,
    step: f64,
    planes: BTreeMap<i64, Vec<Complex64>>,
}

impl PlaneFunction {
    pub fn new(points: usize, step: f64) -> Self {
        assert!(points > 0 && step > 0.0);
        Self { points, step, planes: BTreeMap::new() }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Quadrature weight of one plane node.
    pub fn node_weight(&self) -> f64 {
        self.step * self.step
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        self.planes.keys().copied()
    }

    pub fn plane(&self, p: i64) -> Option<&[Complex64]> {
        self.planes.get(&p).map(|v| v.as_slice())
    }

    /// Mutable access to a plane, creating it as zero if absent.
    pub fn plane_mut(&mut self, p: i64) -> &mut Vec<Complex64> {
        let n = self.points * self.points;
        self.planes.entry(p).or_insert_with(|| vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn plane_count(&self) -> usize {
        self.planes.len()
    }

    /// Adds `coeff` times a plane profile at circle frequency `p`.
    pub fn add_profile(&mut self, p: i64, coeff: Complex64, profile: &[Complex64]) {
        let dest = self.plane_mut(p);
        assert_eq!(dest.len(), profile.len());
        for (d, s) in dest.iter_mut().zip(profile) {
            *d += coeff * s;
        }
    }

    /// Drops planes whose largest entry is at most `tol` times the largest
    /// entry of the whole function.
    pub fn prune(&mut self, tol: f64) {
        let peak = self
            .planes
            .values()
            .flat_map(|v| v.iter().map(|x| x.norm()))
            .fold(0.0f64, f64::max);
        let cut = tol * peak;
        self.planes.retain(|_, v| v.iter().any(|x| x.norm() > cut));
    }

    /// Inner product in `L^2(C x T)`: plane frequencies are orthonormal
    /// under the normalized circle measure, so only shared frequencies
    /// contribute.
    pub fn l2_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.points, other.points);
        let w = self.node_weight();
        let mut acc = KahanSumC::new();
        for (p, a) in &self.planes {
            if let Some(b) = other.planes.get(p) {
                for (x, y) in a.iter().zip(b) {
                    acc.add(w * x * y.conj());
                }
            }
        }
        acc.value()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.node_weight();
        let terms: Vec<f64> = self
            .planes
            .values()
            .flat_map(|v| v.iter().map(|x| w * x.norm_sqr()))
            .collect();
        stable_sum(&terms)
    }

    /// Squared `L^2` distance, over the union of the two frequency sets.
    pub fn l2_diff_sq(&self, other: &Self) -> f64 {
        assert_eq!(self.points, other.points);
        let w = self.node_weight();
        let zero = Complex64::new(0.0, 0.0);
        let keys: std::collections::BTreeSet<i64> = self
            .frequencies()
            .chain(other.frequencies())
            .collect();
        let mut terms = Vec::new();
        for p in keys {
            let a = self.plane(p);
            let b = other.plane(p);
            for i in 0..self.points * self.points {
                let x = a.map_or(zero, |v| v[i]);
                let y = b.map_or(zero, |v| v[i]);
                terms.push(w * (x - y).norm_sqr());
            }
        }
        stable_sum(&terms)
    }
}

/// Dense tabulation of a function on `C x T`: one plane of samples per
/// equispaced circle node.  This is the file exchange form; kernels convert
/// it to a [`PlaneFunction`] by the discrete circle transform.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction2 {
    pub radius: f64,
    pub points: usize,
    pub theta_samples: usize,
    /// `values[(t * points + iy) * points + ix]`.
    pub values: Vec<Complex64>,
}

const SAMPLED2_MAGIC: &str = "sampled2";

impl SampledFunction2 {
    pub fn step(&self) -> f64 {
        2.0 * self.radius / self.points as f64
    }

    pub fn theta_node(&self, t: usize) -> f64 {
        2.0 * PI * t as f64 / self.theta_samples as f64
    }

    #[inline]
    pub fn value(&self, t: usize, iy: usize, ix: usize) -> Complex64 {
        self.values[(t * self.points + iy) * self.points + ix]
    }

    /// Tabulates a plane decomposition at the equispaced circle nodes.
    pub fn from_planes(g: &PlaneFunction, radius: f64, theta_samples: usize) -> Self {
        let points = g.points();
        assert!((2.0 * radius / points as f64 - g.step()).abs() < 1e-12 * g.step());
        let n = points * points;
        let mut values = vec![Complex64::new(0.0, 0.0); theta_samples * n];
        for t in 0..theta_samples {
            let theta = 2.0 * PI * t as f64 / theta_samples as f64;
            let slab = &mut values[t * n..(t + 1) * n];
            for p in g.frequencies().collect::<Vec<_>>() {
                let phase = Complex64::from_polar(1.0, p as f64 * theta);
                for (d, s) in slab.iter_mut().zip(g.plane(p).unwrap()) {
                    *d += phase * s;
                }
            }
        }
        Self { radius, points, theta_samples, values }
    }

    /// Partial Fourier coefficient in the circle variable: the plane
    /// `(1/T) sum_t g(., theta_t) e^{-i p theta_t}` of the trapezoidal
    /// circle rule, which is exact on trigonometric polynomials of degree
    /// below `T/2`.
    pub fn partial_fourier_t(&self, p: i64) -> Vec<Complex64> {
        let n = self.points * self.points;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let scale = 1.0 / self.theta_samples as f64;
        for t in 0..self.theta_samples {
            let phase = Complex64::from_polar(scale, -(p as f64) * self.theta_node(t));
            let slab = &self.values[t * n..(t + 1) * n];
            for (d, s) in out.iter_mut().zip(slab) {
                *d += phase * s;
            }
        }
        out
    }

    /// Full circle analysis into frequencies `-T/2 .. T/2 - 1`, dropping
    /// planes whose largest entry is at most `prune` times the overall peak.
    pub fn to_planes(&self, prune: f64) -> PlaneFunction {
        let half = self.theta_samples as i64 / 2;
        let mut g = PlaneFunction::new(self.points, self.step());
        for p in -half..half {
            *g.plane_mut(p) = self.partial_fourier_t(p);
        }
        g.prune(prune);
        g
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(
            file,
            "{SAMPLED2_MAGIC}\nradius {}\npoints {}\ntheta {}\ndata\n",
            self.radius, self.points, self.theta_samples
        )?;
        for v in &self.values {
            file.write_all(&v.re.to_le_bytes())?;
            file.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let mut raw = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut raw)?;
        let bad = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg);

        let header_end = raw
            .windows(5)
            .position(|w| w == b"data\n")
            .ok_or_else(|| bad("missing data marker"))?
            + 5;
        let header = std::str::from_utf8(&raw[..header_end]).map_err(|_| bad("header is not text"))?;
        let mut lines = header.lines();
        if lines.next() != Some(SAMPLED2_MAGIC) {
            return Err(bad("not a sampled2 file"));
        }
        let mut field = |name: &str| -> std::io::Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| bad("malformed header line"))
        };
        let radius: f64 = field("radius")?.parse().map_err(|_| bad("bad radius"))?;
        let points: usize = field("points")?.parse().map_err(|_| bad("bad points"))?;
        let theta_samples: usize = field("theta")?.parse().map_err(|_| bad("bad theta"))?;

        let body = &raw[header_end..];
        let expect = theta_samples * points * points * 16;
        if body.len() != expect {
            return Err(bad("sample payload has the wrong length"));
        }
        let values = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Self { radius, points, theta_samples, values })
    }
}

/// One term `coeff * b^m_{jk}` of a matrix coefficient combination, where
/// `b^m_{jk}` is the normalized conjugate matrix coefficient supported at
/// circle frequency `-(m + j)`.
#[derive(Clone, Copy, Debug)]
pub struct ComboTerm {
    pub sector: i64,
    pub j: usize,
    pub k: usize,
    pub coeff: Complex64,
}

/// A finite combination of matrix coefficient basis elements.  Terms are
/// kept sorted and unique in `(sector, j, k)`, so construction order does
/// not affect anything downstream.
#[derive(Clone, Debug, Default)]
pub struct SectorCombo {
    terms: Vec<ComboTerm>,
}

impl SectorCombo {
    pub fn new(terms: impl IntoIterator<Item = ComboTerm>) -> Self {
        let mut merged: BTreeMap<(i64, usize, usize), Complex64> = BTreeMap::new();
        for t in terms {
            *merged.entry((t.sector, t.j, t.k)).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .map(|((sector, j, k), coeff)| ComboTerm { sector, j, k, coeff })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[ComboTerm] {
        &self.terms
    }

    pub fn sectors(&self) -> impl Iterator<Item = i64> + '_ {
        let mut seen = std::collections::BTreeSet::new();
        self.terms.iter().filter_map(move |t| seen.insert(t.sector).then_some(t.sector))
    }

    /// Squared coefficient norm; equals the `L^2` norm of the realized
    /// function to the extent the basis elements are orthonormal.
    pub fn coeff_norm_sq(&self) -> f64 {
        stable_sum(&self.terms.iter().map(|t| t.coeff.norm_sqr()).collect::<Vec<_>>())
    }
}
