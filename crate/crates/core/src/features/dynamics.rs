use crate::scalar::Scalar;

/// Mean of `|x[t+1] - x[t]|`; 0 for fewer than two samples.
pub fn mean_abs_change<T: Scalar>(window: &[T]) -> T {
    if window.len() < 2 {
        return T::zero();
    }
    let total: T = window.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    total / T::from_count(window.len() - 1)
}

/// Mean over lags `1..=n-2` of
/// `R(l) = sum_t (x[t]-mu)(x[t+l]-mu) / ((n-l) * sigma^2)` with population
/// variance. Constant or shorter-than-three windows give 0.
pub fn mean_autocorrelation<T: Scalar>(window: &[T]) -> T {
    let n = window.len();
    if n < 3 {
        return T::zero();
    }
    let first = window[0];
    if window.iter().all(|&x| x == first) {
        return T::zero();
    }
    let nf = T::from_count(n);
    let mean = window.iter().copied().sum::<T>() / nf;
    let centered: Vec<T> = window.iter().map(|&x| x - mean).collect();
    let var = centered.iter().map(|&d| d * d).sum::<T>() / nf;
    if !(var > T::zero()) {
        return T::zero();
    }
    let mut total = T::zero();
    for lag in 1..n - 1 {
        let mut s = T::zero();
        for t in 0..n - lag {
            s += centered[t] * centered[t + lag];
        }
        total += s / (T::from_count(n - lag) * var);
    }
    total / T::from_count(n - 2)
}
