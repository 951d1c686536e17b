//! Sample statistics: density histograms and two-sample distribution
//! distances (Kolmogorov-Smirnov, first-order Wasserstein).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("histogram needs at least two strictly increasing bin edges")]
    EmptyBinSpec,
    #[error("distribution comparison needs non-empty sample sets")]
    EmptySampleSet,
}

/// Probability-density histogram. Densities are normalized over the
/// in-range samples: sum(density * bin_width) == 1 whenever `n_samples > 0`.
/// Out-of-range samples are never silently discarded; they are counted in
/// `n_dropped`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub bin_edges: Vec<T>,
    pub densities: Vec<T>,
    pub n_samples: u64,
    pub n_dropped: u64,
}

impl<T: Real> Histogram<T> {
    /// Bin the samples over the given edges. The final bin includes its
    /// right edge.
    pub fn from_samples(samples: &[T], bin_edges: &[T]) -> Result<Self, StatsError> {
        if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StatsError::EmptyBinSpec);
        }
        let n_bins = bin_edges.len() - 1;
        let mut counts = vec![0u64; n_bins];
        let mut dropped = 0u64;
        let lo = bin_edges[0];
        let hi = bin_edges[n_bins];
        for &s in samples {
            if s < lo || s > hi || s.is_nan() {
                dropped += 1;
                continue;
            }
            // rightmost bin whose left edge <= s
            let idx = match bin_edges.binary_search_by(|e| e.partial_cmp(&s).unwrap()) {
                Ok(i) => i.min(n_bins - 1),
                Err(i) => i - 1,
            };
            counts[idx.min(n_bins - 1)] += 1;
        }
        let n_in: u64 = counts.iter().sum();
        let densities = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if n_in == 0 {
                    T::zero()
                } else {
                    let width = bin_edges[i + 1] - bin_edges[i];
                    T::from_u64(c).unwrap() / (T::from_u64(n_in).unwrap() * width)
                }
            })
            .collect();
        Ok(Self {
            bin_edges: bin_edges.to_vec(),
            densities,
            n_samples: n_in,
            n_dropped: dropped,
        })
    }

    /// sum(density * width); 1 for any non-empty histogram.
    pub fn total_mass(&self) -> T {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .fold(T::zero(), |acc, (&d, e)| acc + d * (e[1] - e[0]))
    }

    /// Left edge of the highest-density bin.
    pub fn mode_bin(&self) -> Option<(T, T)> {
        let (idx, _) = self
            .densities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
        Some((self.bin_edges[idx], self.bin_edges[idx + 1]))
    }
}

fn sorted<T: Real>(samples: &[T]) -> Vec<T> {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Two-sample Kolmogorov-Smirnov statistic: the supremum of the absolute
/// difference between the empirical CDFs. Exactly 0 for equal multisets.
pub fn ks_statistic<T: Real>(a: &[T], b: &[T]) -> Result<T, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySampleSet);
    }
    let xs = sorted(a);
    let ys = sorted(b);
    let (n, m) = (T::from_usize(xs.len()).unwrap(), T::from_usize(ys.len()).unwrap());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = T::zero();
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        let diff = (T::from_usize(i).unwrap() / n - T::from_usize(j).unwrap() / m).abs();
        d = d.max(diff);
    }
    // after one side is exhausted the difference only shrinks back to 0
    // through the other side's remaining mass, never exceeding 1 - F
    if i < xs.len() {
        d = d.max((T::one() - T::from_usize(j).unwrap() / m).abs());
    }
    if j < ys.len() {
        d = d.max((T::one() - T::from_usize(i).unwrap() / n).abs());
    }
    Ok(d)
}

/// First-order Wasserstein distance between two empirical distributions:
/// the integral of |F_a - F_b|. Units of the samples. Exactly 0 for equal
/// multisets.
pub fn wasserstein1<T: Real>(a: &[T], b: &[T]) -> Result<T, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySampleSet);
    }
    let xs = sorted(a);
    let ys = sorted(b);
    let n = T::from_usize(xs.len()).unwrap();
    let m = T::from_usize(ys.len()).unwrap();
    let mut all: Vec<T> = xs.iter().chain(ys.iter()).copied().collect();
    all.sort_by(|p, q| p.partial_cmp(q).unwrap());
    all.dedup();
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = T::zero();
    for w in all.windows(2) {
        let v = w[0];
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let diff = (T::from_usize(i).unwrap() / n - T::from_usize(j).unwrap() / m).abs();
        total = total + diff * (w[1] - w[0]);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_bin_density() {
        let h = Histogram::from_samples(&[1.0, 1.0, 1.0], &[0.0, 2.0]).unwrap();
        assert_eq!(h.densities, vec![0.5]);
        assert_eq!(h.n_samples, 3);
        assert_eq!(h.n_dropped, 0);
    }

    #[test]
    fn empty_samples_zero_density() {
        let h = Histogram::<f64>::from_samples(&[], &[0.0, 1.0, 2.0]).unwrap();
        assert!(h.densities.iter().all(|&d| d == 0.0));
        assert_eq!(h.n_samples, 0);
    }

    #[test]
    fn out_of_range_counted_as_dropped() {
        let h = Histogram::from_samples(&[-1.0, 0.5, 3.0], &[0.0, 1.0]).unwrap();
        assert_eq!(h.n_samples, 1);
        assert_eq!(h.n_dropped, 2);
    }

    #[test]
    fn uniform_law_of_large_numbers() {
        // deterministic LCG draws over [0, 10)
        let mut state = 7u64;
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0
            })
            .collect();
        let edges: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let h = Histogram::from_samples(&samples, &edges).unwrap();
        for &d in &h.densities {
            assert!((d - 0.1).abs() < 0.01, "density {d}");
        }
    }

    #[test]
    fn bad_bin_spec_rejected() {
        assert_eq!(
            Histogram::<f64>::from_samples(&[1.0], &[0.0]),
            Err(StatsError::EmptyBinSpec)
        );
        assert_eq!(
            Histogram::<f64>::from_samples(&[1.0], &[0.0, 0.0]),
            Err(StatsError::EmptyBinSpec)
        );
    }

    #[test]
    fn ks_frozen_examples() {
        assert_eq!(ks_statistic(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(ks_statistic(&[0.0, 1.0], &[0.0, 2.0]).unwrap(), 0.5);
        assert_eq!(ks_statistic(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn wasserstein_frozen_examples() {
        assert_eq!(wasserstein1(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(wasserstein1(&[0.0, 1.0], &[0.0, 2.0]).unwrap(), 0.5);
        assert_eq!(wasserstein1(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn empty_sample_sets_rejected() {
        assert_eq!(ks_statistic::<f64>(&[], &[1.0]), Err(StatsError::EmptySampleSet));
        assert_eq!(wasserstein1::<f64>(&[1.0], &[]), Err(StatsError::EmptySampleSet));
    }

    /// Brute-force oracle: evaluate both empirical CDFs on a fine sweep of
    /// candidate points (all sample values and midpoints).
    fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        let mut pts: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        pts.iter()
            .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn ks_matches_cdf_sweep_oracle(
            a in proptest::collection::vec(-50.0..50.0f64, 1..40),
            b in proptest::collection::vec(-50.0..50.0f64, 1..40),
        ) {
            let got = ks_statistic(&a, &b).unwrap();
            let want = ks_oracle(&a, &b);
            prop_assert!((got - want).abs() < 1e-12);
        }

        #[test]
        fn wasserstein_symmetric_and_zero_on_self(
            a in proptest::collection::vec(-50.0..50.0f64, 1..40),
            b in proptest::collection::vec(-50.0..50.0f64, 1..40),
        ) {
            prop_assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
            let ab = wasserstein1(&a, &b).unwrap();
            let ba = wasserstein1(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn histogram_mass_is_one(
            samples in proptest::collection::vec(0.0..10.0f64, 1..200),
        ) {
            let edges: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
            let h = Histogram::from_samples(&samples, &edges).unwrap();
            prop_assert!((h.total_mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn wasserstein_shifted_point_mass() {
        // mass 1 at 0 vs mass 1 at d: W1 = d
        for d in [0.25f64, 1.0, 7.5] {
            let w = wasserstein1(&[0.0; 10], &vec![d; 10]).unwrap();
            assert!((w - d).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_over_f32() {
        let ks = ks_statistic(&[0.0f32, 1.0], &[0.0f32, 2.0]).unwrap();
        assert!((ks - 0.5).abs() < 1e-6);
    }
}
