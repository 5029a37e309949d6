use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ridge penalty on the lag coefficients.
pub const AR_RIDGE_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ArFit<T> {
    pub intercept: T,
    /// `coefficients[k]` multiplies `x[t - k - 1]`.
    pub coefficients: Vec<T>,
    /// The least-squares system could not be solved (non-finite input).
    pub singular: bool,
}

/// Conditional least-squares AR(p) fit of `x[t]` on `[1, x[t-1], ..., x[t-p]]`
/// with a small ridge penalty on the lag coefficients.
///
/// Columns are centered so the intercept drops out; it is recovered as
/// `mean(y) - sum(phi_k * mean(lag_k))`. The centered design, stacked with
/// `sqrt(ridge) * I`, is solved by Householder QR. A constant window
/// yields the constant as intercept and zero coefficients.
pub fn fit_ar<T: Scalar>(window: &[T], p: usize) -> Result<ArFit<T>> {
    let n = window.len();
    if n < 2 * p + 1 {
        return Err(Error::InsufficientData { needed: 2 * p + 1, got: n });
    }
    let rows = n - p;
    let rows_t = T::from_count(rows);
    let y_mean = window[p..].iter().copied().sum::<T>() / rows_t;
    if p == 0 {
        return Ok(ArFit { intercept: y_mean, coefficients: Vec::new(), singular: false });
    }
    let lag = |k: usize| &window[p - 1 - k..n - 1 - k];
    let lag_means: Vec<T> = (0..p).map(|k| lag(k).iter().copied().sum::<T>() / rows_t).collect();

    // column-major (rows + p) x p design and its right-hand side
    let m = rows + p;
    let mut a = vec![T::zero(); m * p];
    for k in 0..p {
        let col = &mut a[k * m..(k + 1) * m];
        for (c, &v) in col.iter_mut().zip(lag(k)) {
            *c = v - lag_means[k];
        }
        col[rows + k] = T::lit(AR_RIDGE_JITTER).sqrt();
    }
    let mut b: Vec<T> = window[p..].iter().map(|&v| v - y_mean).collect();
    b.resize(m, T::zero());

    match householder_solve(&mut a, &mut b, m, p) {
        Some(coefficients) => {
            let intercept = y_mean - coefficients.iter().zip(&lag_means).map(|(&c, &mu)| c * mu).sum::<T>();
            Ok(ArFit { intercept, coefficients, singular: false })
        }
        None => Ok(ArFit { intercept: y_mean, coefficients: vec![T::zero(); p], singular: true }),
    }
}

/// Least-squares solution of the column-major `m x p` system `a x = b`
/// (`m >= p`) by Householder QR. Both inputs are overwritten.
fn householder_solve<T: Scalar>(a: &mut [T], b: &mut [T], m: usize, p: usize) -> Option<Vec<T>> {
    let mut diag = vec![T::zero(); p];
    for j in 0..p {
        let (done, rest) = a.split_at_mut((j + 1) * m);
        let col = &mut done[j * m..];
        let norm = col[j..].iter().map(|&v| v * v).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return None;
        }
        let alpha = if col[j] > T::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in place of the column
        col[j] -= alpha;
        let vtv = col[j..].iter().map(|&v| v * v).sum::<T>();
        diag[j] = alpha;
        if !(vtv > T::zero()) {
            continue;
        }
        let reflect = |target: &mut [T]| {
            let dot = col[j..].iter().zip(&target[j..]).map(|(&v, &t)| v * t).sum::<T>();
            let f = (dot + dot) / vtv;
            for (t, &v) in target[j..].iter_mut().zip(&col[j..]) {
                *t -= f * v;
            }
        };
        for other in rest.chunks_mut(m) {
            reflect(other);
        }
        reflect(b);
    }
    // back substitution with R stored above the diagonal, diagonal in `diag`
    let mut x = vec![T::zero(); p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for k in i + 1..p {
            s -= a[k * m + i] * x[k];
        }
        x[i] = s / diag[i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
