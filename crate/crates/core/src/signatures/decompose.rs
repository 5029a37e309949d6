//! Trend by a centered 2×24 moving average.
//!
//! The filter has 25 taps: weight 1/24 on offsets −11..=11 and 1/48 at ±12.
//! Near the ends the taps that fall outside the series are dropped and the
//! remaining weights renormalized.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const TREND_PERIOD: usize = 24;
pub const MIN_DECOMPOSE_LEN: usize = TREND_PERIOD + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub trend: Vec<T>,
    pub remainder: Vec<T>,
}

pub fn moving_average_trend<T: Scalar>(series: &[T]) -> Result<Vec<T>> {
    if series.len() < MIN_DECOMPOSE_LEN {
        return Err(Error::InsufficientData { needed: MIN_DECOMPOSE_LEN, got: series.len() });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("cannot decompose a series with non-finite values".into()));
    }
    let half = (TREND_PERIOD / 2) as isize;
    let n = series.len() as isize;
    let full = T::one() / T::from_count(TREND_PERIOD);
    let end = full / T::lit(2.0);
    Ok((0..n)
        .map(|i| {
            let (mut acc, mut wsum) = (T::zero(), T::zero());
            for k in -half..=half {
                let j = i + k;
                if j < 0 || j >= n {
                    continue;
                }
                let w = if k.abs() == half { end } else { full };
                acc += w * series[j as usize];
                wsum += w;
            }
            acc / wsum
        })
        .collect())
}

pub fn decompose<T: Scalar>(series: &[T]) -> Result<Decomposition<T>> {
    let trend = moving_average_trend(series)?;
    let remainder = series.iter().zip(&trend).map(|(&x, &t)| x - t).collect();
    Ok(Decomposition { trend, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_ramp() {
        let d = decompose(&[3.0f64; 40]).unwrap();
        assert!(d.trend.iter().all(|&t| (t - 3.0).abs() < 1e-12));
        assert!(d.remainder.iter().all(|&r| r.abs() < 1e-12));
        let ramp: Vec<f64> = (0..60).map(|i| 0.5 * i as f64 + 1.0).collect();
        let t = moving_average_trend(&ramp).unwrap();
        for i in 12..48 {
            assert!((t[i] - ramp[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn period_24_sinusoid_averages_out() {
        let s: Vec<f64> = (0..96).map(|i| 2.0 + (i as f64 * std::f64::consts::TAU / 24.0).sin()).collect();
        let t = moving_average_trend(&s).unwrap();
        for v in &t[12..84] {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn too_short() {
        assert!(decompose(&[0.0; 24]).is_err());
    }
}
