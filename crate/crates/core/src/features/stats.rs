use crate::error::{Error, Result};
use crate::scalar::{total_cmp, Scalar};
use crate::stats::median_sorted;

/// Summary statistics of a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats<T> {
    pub max: T,
    pub min: T,
    pub mean: T,
    /// Unbiased (n - 1 denominator).
    pub variance: T,
    /// Adjusted Fisher-Pearson coefficient `sqrt(n(n-1))/(n-2) * m3 / m2^1.5`.
    pub skewness: T,
    /// `m4 / m2^2` with biased central moments (not excess kurtosis).
    pub kurtosis: T,
    pub median: T,
    /// Fewer than three samples, skewness forced to 0.
    pub short_window: bool,
    /// All samples equal, higher moments forced to 0.
    pub constant: bool,
}

pub fn sample_statistics<T: Scalar>(window: &[T]) -> Result<SampleStats<T>> {
    let n = window.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mut sorted = window.to_vec();
    sorted.sort_by(total_cmp);
    let (min, max) = (sorted[0], sorted[n - 1]);
    let median = median_sorted(&sorted);
    let nf = T::from_count(n);
    let mean = window.iter().copied().sum::<T>() / nf;
    let constant = max == min;
    let short_window = n < 3;

    if constant {
        return Ok(SampleStats {
            max,
            min,
            mean,
            variance: T::zero(),
            skewness: T::zero(),
            kurtosis: T::zero(),
            median,
            short_window,
            constant,
        });
    }

    let (mut s2, mut s3, mut s4) = (T::zero(), T::zero(), T::zero());
    for &x in window {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let (m2, m3, m4) = (s2 / nf, s3 / nf, s4 / nf);
    let variance = s2 / T::from_count(n - 1);
    let skewness = if short_window {
        T::zero()
    } else {
        (nf * (nf - T::one())).sqrt() / (nf - T::lit(2.0)) * m3 / m2.powf(T::lit(1.5))
    };
    let kurtosis = m4 / (m2 * m2);
    Ok(SampleStats { max, min, mean, variance, skewness, kurtosis, median, short_window, constant })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributionFeatures {
    pub variance_gt_std: bool,
    pub count_above_median: usize,
    pub count_below_median: usize,
}

/// Variance-versus-standard-deviation flag and strict counts around the median.
pub fn distribution_features<T: Scalar>(window: &[T]) -> Result<DistributionFeatures> {
    let n = window.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut sorted = window.to_vec();
    sorted.sort_by(total_cmp);
    let median = median_sorted(&sorted);
    let variance = if n < 2 || sorted[0] == sorted[n - 1] {
        T::zero()
    } else {
        let mean = window.iter().copied().sum::<T>() / T::from_count(n);
        window.iter().map(|&x| (x - mean).powi(2)).sum::<T>() / T::from_count(n - 1)
    };
    Ok(DistributionFeatures {
        variance_gt_std: variance > variance.sqrt(),
        count_above_median: window.iter().filter(|&&x| x > median).count(),
        count_below_median: window.iter().filter(|&&x| x < median).count(),
    })
}
