//! Pearson correlation between cluster-level KPI series.

use crate::scalar::Scalar;

pub const MIN_PAIRS: usize = 3;

/// Pairwise-complete Pearson correlation; `None` with fewer than three
/// complete pairs or when either side has zero variance over those pairs.
pub fn pearson<T: Scalar>(a: &[Option<T>], b: &[Option<T>]) -> Option<T> {
    let pairs: Vec<(T, T)> = a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
    if pairs.len() < MIN_PAIRS {
        return None;
    }
    let n = T::from_count(pairs.len());
    let ma = pairs.iter().map(|p| p.0).sum::<T>() / n;
    let mb = pairs.iter().map(|p| p.1).sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in &pairs {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > T::zero() && sbb > T::zero()) {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).max(-T::one()).min(T::one()))
}

/// Symmetric matrix of pairwise correlations; the diagonal is 1 wherever the
/// series has a defined correlation with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    values: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<Option<T>>] {
        &self.values
    }
}

pub fn cluster_correlation<T: Scalar, S: AsRef<[Option<T>]>>(series: &[S]) -> CorrelationMatrix<T> {
    let k = series.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        values[i][i] = pearson(series[i].as_ref(), series[i].as_ref()).map(|_| T::one());
        for j in i + 1..k {
            let r = pearson(series[i].as_ref(), series[j].as_ref());
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix { values }
}
