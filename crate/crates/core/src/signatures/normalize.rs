//! Min-max scaling into `[0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scales present values by the series' own min and max; missing stays missing.
/// A constant series maps to 0.5.
pub fn normalize<T: Scalar>(series: &[Option<T>]) -> Result<Vec<Option<T>>> {
    let (lo, hi) = bounds(series.iter().flatten().copied())?;
    Ok(series.iter().map(|v| v.map(|x| scale(x, lo, hi))).collect())
}

pub fn normalize_dense<T: Scalar>(series: &[T]) -> Result<Vec<T>> {
    let (lo, hi) = bounds(series.iter().copied())?;
    Ok(series.iter().map(|&x| scale(x, lo, hi)).collect())
}

fn bounds<T: Scalar>(values: impl Iterator<Item = T>) -> Result<(T, T)> {
    let mut b: Option<(T, T)> = None;
    for v in values {
        if !v.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a non-finite value".into()));
        }
        b = Some(match b {
            None => (v, v),
            Some((lo, hi)) => (lo.min(v), hi.max(v)),
        });
    }
    b.ok_or(Error::InsufficientData { needed: 1, got: 0 })
}

#[inline]
fn scale<T: Scalar>(x: T, lo: T, hi: T) -> T {
    if hi > lo {
        ((x - lo) / (hi - lo)).max(T::zero()).min(T::one())
    } else {
        T::lit(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_dense(&[2.0, 4.0, 6.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_dense(&[5.0, 5.0, 5.0]).unwrap(), vec![0.5; 3]);
        assert_eq!(normalize(&[Some(1.0), None, Some(3.0)]).unwrap(), vec![Some(0.0), None, Some(1.0)]);
        assert!(normalize::<f64>(&[None, None]).is_err());
    }
}
