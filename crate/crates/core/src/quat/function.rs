//! Function carriers on the quaternions: symbolic polynomial times
//! Gaussian test functions with exactly known transforms, and the dense
//! grid tabulation used for file exchange between runs.
//!
//! Every test function has the shape `P(q) exp(-|a| |q|^2)` with `P` a
//! polynomial in the four real coordinates.  The Gaussian matches the
//! decay of the matrix coefficients of the representation at central
//! modulus `|a|`, so whenever `P` stays below the kept Fock degrees the
//! function lies exactly in their span and the transform identities close
//! without truncation error.

use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::Quaternion;

/// A polynomial times the standard Gaussian, `sum_t c_t q0^e0 q1^e1 q2^e2
/// q3^e3 * exp(-a |q|^2)`.  Terms are kept sorted and unique in their
/// exponent quadruple.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatPolynomial {
    a_mag: f64,
    terms: Vec<([u8; 4], Complex64)>,
}

impl QuatPolynomial {
    pub fn new(a_mag: f64, terms: impl IntoIterator<Item = ([u8; 4], Complex64)>) -> Self {
        assert!(a_mag > 0.0 && a_mag.is_finite());
        let mut merged: BTreeMap<[u8; 4], Complex64> = BTreeMap::new();
        for (e, c) in terms {
            *merged.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let terms = merged.into_iter().collect();
        Self { a_mag, terms }
    }

    /// The bare Gaussian `exp(-a |q|^2)`.
    pub fn gaussian(a_mag: f64) -> Self {
        Self::new(a_mag, [([0, 0, 0, 0], Complex64::new(1.0, 0.0))])
    }

    /// The unit norm function `(4 a^2 / pi) z1 z2 exp(-a |q|^2)`, written
    /// out in real coordinates.  Its transform is a single off diagonal
    /// matrix unit, which makes it the standard witness for the transform
    /// normalization.
    pub fn witness(a_mag: f64) -> Self {
        let scale = 4.0 * a_mag * a_mag / std::f64::consts::PI;
        // z1 z2 = (q0 + i q1)(q3 + i q2) = (q0 q3 - q1 q2) + i (q0 q2 + q1 q3).
        Self::new(
            a_mag,
            [
                ([1, 0, 0, 1], Complex64::new(scale, 0.0)),
                ([0, 1, 1, 0], Complex64::new(-scale, 0.0)),
                ([1, 0, 1, 0], Complex64::new(0.0, scale)),
                ([0, 1, 0, 1], Complex64::new(0.0, scale)),
            ],
        )
    }

    /// A random combination with total degree at most `max_degree` and
    /// coefficients in the unit square.
    pub fn random(a_mag: f64, max_degree: usize, rng: &mut impl Rng) -> Self {
        assert!(max_degree < 256);
        let count = rng.gen_range(3..=6);
        let mut terms = Vec::new();
        while terms.len() < count {
            let e: [u8; 4] = [
                rng.gen_range(0..=max_degree) as u8,
                rng.gen_range(0..=max_degree) as u8,
                rng.gen_range(0..=max_degree) as u8,
                rng.gen_range(0..=max_degree) as u8,
            ];
            if e.iter().map(|&k| k as usize).sum::<usize>() > max_degree {
                continue;
            }
            let c = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            terms.push((e, c));
        }
        Self::new(a_mag, terms)
    }

    pub fn a_magnitude(&self) -> f64 {
        self.a_mag
    }

    pub fn terms(&self) -> &[([u8; 4], Complex64)] {
        &self.terms
    }

    /// Largest total degree over the terms.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, q: Quaternion) -> Complex64 {
        let coords = [q.q0, q.q1, q.q2, q.q3];
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut mono = 1.0;
            for (x, k) in coords.iter().zip(e) {
                mono *= x.powi(*k as i32);
            }
            acc += c * mono;
        }
        acc * (-self.a_mag * q.norm_sqr()).exp()
    }

    /// The involution `f*(q) = conj(f(-q))`, under which the transform
    /// becomes the operator adjoint.  On a term it conjugates the
    /// coefficient and flips the sign by the parity of the total degree.
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| {
            let parity: usize = e.iter().map(|&k| k as usize).sum();
            let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
            (*e, sign * c.conj())
        });
        Self::new(self.a_mag, terms.collect::<Vec<_>>())
    }
}

/// Dense tabulation of a function on the quaternions over the tensor
/// Gauss-Hermite grid: the entry at flat index
/// `((n0 * points + n1) * points + n2) * points + n3`
/// holds the sample at the node whose axis coordinates are the
/// `points`-node folded Gauss-Hermite rule for weight `2 * a_magnitude`.
/// The node positions are implied by `(a_magnitude, points)`, so the file
/// format only carries those two numbers and the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction4 {
    pub a_magnitude: f64,
    pub points: usize,
    pub values: Vec<Complex64>,
}

const SAMPLED4_MAGIC: &str = "sampled4";

impl SampledFunction4 {
    #[inline]
    pub fn value(&self, n0: usize, n1: usize, n2: usize, n3: usize) -> Complex64 {
        let q = self.points;
        self.values[((n0 * q + n1) * q + n2) * q + n3]
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(
            file,
            "{SAMPLED4_MAGIC}\na {}\npoints {}\ndata\n",
            self.a_magnitude, self.points
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
        if lines.next() != Some(SAMPLED4_MAGIC) {
            return Err(bad("not a sampled4 file"));
        }
        let mut field = |name: &str| -> std::io::Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| bad("malformed header line"))
        };
        let a_magnitude: f64 = field("a")?.parse().map_err(|_| bad("bad central modulus"))?;
        let points: usize = field("points")?.parse().map_err(|_| bad("bad points"))?;
        if !(a_magnitude > 0.0 && a_magnitude.is_finite()) || points == 0 || points > 4096 {
            return Err(bad("header values out of range"));
        }

        let body = &raw[header_end..];
        let expect = points * points * points * points * 16;
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
        Ok(Self { a_magnitude, points, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn duplicate_exponents_merge() {
        let one = Complex64::new(1.0, 0.0);
        let f = QuatPolynomial::new(
            1.0,
            [([1, 0, 0, 0], one), ([0, 0, 0, 2], 2.0 * one), ([1, 0, 0, 0], 0.5 * one)],
        );
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.degree(), 2);
        let q = Quaternion::new(0.4, -0.2, 0.1, 0.3);
        let want = (1.5 * q.q0 + 2.0 * q.q3 * q.q3) * (-q.norm_sqr()).exp();
        assert_abs_diff_eq!((f.eval(q) - want).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn witness_evaluates_to_its_complex_product_form() {
        let a = 0.8;
        let f = QuatPolynomial::witness(a);
        let q = Quaternion::new(0.5, -0.3, 0.7, 0.2);
        let want = (4.0 * a * a / std::f64::consts::PI)
            * q.z1()
            * q.z2()
            * (-a * q.norm_sqr()).exp();
        assert_abs_diff_eq!((f.eval(q) - want).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn adjoint_is_conjugation_at_the_opposite_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = QuatPolynomial::random(1.0, 3, &mut rng);
        let g = f.adjoint();
        for _ in 0..10 {
            let mut r = || rng.gen::<f64>() * 2.0 - 1.0;
            let q = Quaternion::new(r(), r(), r(), r());
            assert_abs_diff_eq!((g.eval(q) - f.eval(-q).conj()).norm(), 0.0, epsilon = 1e-13);
        }
        // The involution squares to the identity.
        assert_eq!(g.adjoint(), f);
    }

    #[test]
    fn random_combinations_respect_the_degree_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let f = QuatPolynomial::random(0.5, 2, &mut rng);
            assert!(f.degree() <= 2);
            assert!(!f.terms().is_empty());
        }
    }

    #[test]
    fn sample_file_round_trips_byte_for_byte() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let points = 3;
        let values: Vec<Complex64> = (0..points * points * points * points)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let sampled = SampledFunction4 { a_magnitude: 0.5, points, values };
        let dir = std::env::temp_dir().join("weylab_sampled4_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("probe.bin");
        sampled.save(&path).unwrap();
        let loaded = SampledFunction4::load(&path).unwrap();
        assert_eq!(loaded, sampled);
        sampled.save(&path).unwrap();
        let first = std::fs::read(&path).unwrap();
        loaded.save(&path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn loader_rejects_corrupt_headers() {
        let dir = std::env::temp_dir().join("weylab_sampled4_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corrupt.bin");
        std::fs::write(&path, b"sampled4\na 1\npoints 2\ndata\nshort").unwrap();
        assert!(SampledFunction4::load(&path).is_err());
        std::fs::write(&path, b"sampled2\na 1\npoints 2\ndata\n").unwrap();
        assert!(SampledFunction4::load(&path).is_err());
        std::fs::write(&path, b"sampled4\na -1\npoints 2\ndata\n").unwrap();
        assert!(SampledFunction4::load(&path).is_err());
        std::fs::remove_file(&path).ok();
    }
}
