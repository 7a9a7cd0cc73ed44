//! Fixed order compensated reductions.
//!
//! Every quadrature in this crate collapses a large number of terms into one
//! number, and reports must reproduce bit for bit from the same
//! configuration and seed.  Plain left-to-right summation is reproducible but
//! loses up to n*eps relative accuracy on cancellative data; the pairwise
//! (balanced tree) scheme keeps the error near sqrt(log n)*eps while the
//! reduction tree, and therefore the result, depends only on the slice
//! length.  For streams too large to buffer there is a Neumaier accumulator,
//! which is sequential and exactly reproducible as long as terms arrive in a
//! fixed order.

use num_complex::Complex64;

/// Below this length a straight loop is both fastest and accurate enough.
const PAIRWISE_LEAF: usize = 32;

/// Pairwise sum of real terms in a deterministic reduction order.
pub fn stable_sum(terms: &[f64]) -> f64 {
    if terms.len() <= PAIRWISE_LEAF {
        let mut acc = 0.0;
        for &t in terms {
            acc += t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    stable_sum(&terms[..mid]) + stable_sum(&terms[mid..])
}

/// Pairwise sum of complex terms in a deterministic reduction order.
pub fn stable_sum_c(terms: &[Complex64]) -> Complex64 {
    if terms.len() <= PAIRWISE_LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in terms {
            acc += t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    stable_sum_c(&terms[..mid]) + stable_sum_c(&terms[mid..])
}

/// Neumaier compensated accumulator for real streams.
///
/// Improves on Kahan by also capturing the error when the incoming term is
/// larger than the running sum.  Sequential, so the result is a deterministic
/// function of the term order.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise Neumaier accumulator for complex streams.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSumC {
    re: KahanSum,
    im: KahanSum,
}

impl KahanSumC {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) {
        self.re.add(term.re);
        self.im.add(term.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sums_arithmetic_series_exactly() {
        let terms: Vec<f64> = (1..=10_000).map(|k| k as f64).collect();
        assert_eq!(stable_sum(&terms), 50_005_000.0);
    }

    #[test]
    fn survives_catastrophic_cancellation_in_stream() {
        let mut acc = KahanSum::new();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn complex_stream_matches_componentwise_reference() {
        let mut acc = KahanSumC::new();
        let terms: Vec<Complex64> = (0..1000)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64).cos()))
            .collect();
        for &t in &terms {
            acc.add(t);
        }
        let re: Vec<f64> = terms.iter().map(|t| t.re).collect();
        let im: Vec<f64> = terms.iter().map(|t| t.im).collect();
        let want = Complex64::new(stable_sum(&re), stable_sum(&im));
        assert!((acc.value() - want).norm() < 1e-10);
    }

    #[test]
    fn pairwise_beats_naive_on_oscillating_terms() {
        // Alternating large terms cancel to a small sum; the pairwise tree
        // must stay within a few ulps of the compensated reference.
        let terms: Vec<f64> = (0..100_001)
            .map(|k| if k % 2 == 0 { 1e8 + k as f64 } else { -1e8 } )
            .collect();
        let mut reference = KahanSum::new();
        for &t in &terms {
            reference.add(t);
        }
        let err = (stable_sum(&terms) - reference.value()).abs();
        assert!(err <= 1e-6 * reference.value().abs());
    }

    proptest! {
        #[test]
        fn pairwise_tracks_compensated_sum(terms in proptest::collection::vec(-1e6f64..1e6, 0..2000)) {
            let mut reference = KahanSum::new();
            for &t in &terms {
                reference.add(t);
            }
            let got = stable_sum(&terms);
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
            prop_assert!((got - reference.value()).abs() <= 1e-10 * scale);
        }

        #[test]
        fn complex_pairwise_is_order_stable_under_split(terms in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 64..512)) {
            let terms: Vec<Complex64> = terms.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            // Summing the halves with the same routine and adding must agree
            // with the full reduction to high accuracy.
            let mid = terms.len() / 2;
            let split = stable_sum_c(&terms[..mid]) + stable_sum_c(&terms[mid..]);
            let full = stable_sum_c(&terms);
            prop_assert!((split - full).norm() <= 1e-9);
        }
    }
}
