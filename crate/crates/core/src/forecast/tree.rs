//! Weighted least-squares regression trees.
//!
//! Split search walks every feature in presorted order and keeps the
//! candidate with the largest weighted SSE reduction; thresholds are
//! midpoints between consecutive distinct values. Candidates are visited by
//! ascending feature index then ascending threshold and only a strictly
//! better score replaces the incumbent.

use crate::error::{Error, Result};
use crate::scalar::{total_cmp, Scalar};

pub const DEFAULT_MAX_DEPTH: usize = 3;

/// Row-major feature rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    data: Vec<T>,
    width: usize,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(width: usize) -> Self {
        Self { data: Vec::new(), width }
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::new(width);
        for r in rows {
            m.push_row(r.as_ref())?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[T]) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::LengthMismatch { left: self.width, right: row.len() });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> T {
        self.data[row * self.width + feature]
    }

    /// First `n` rows as a new matrix.
    pub fn head(&self, n: usize) -> Self {
        Self { data: self.data[..n * self.width].to_vec(), width: self.width }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<T> {
    Split { feature: usize, threshold: T, left: usize, right: usize },
    Leaf { value: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree<T> {
    nodes: Vec<TreeNode<T>>,
    max_depth: usize,
}

impl<T: Scalar> RegressionTree<T> {
    pub fn predict(&self, x: &[T]) -> T {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[TreeNode<T>] {
        &self.nodes
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[TreeNode<T>], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

/// Per-feature row orders computed once and reused across many fits on the
/// same rows with different weights.
#[derive(Debug, Clone)]
pub struct TreeFitter<'a, T> {
    targets: &'a [T],
    /// Column-major copy of the features.
    columns: Vec<T>,
    sorted: Vec<Vec<u32>>,
}

impl<'a, T: Scalar> TreeFitter<'a, T> {
    pub fn new(features: &'a FeatureMatrix<T>, targets: &'a [T]) -> Result<Self> {
        let n = features.n_rows();
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if targets.len() != n {
            return Err(Error::LengthMismatch { left: n, right: targets.len() });
        }
        let width = features.width();
        let mut columns = vec![T::zero(); width * n];
        for r in 0..n {
            for (f, &v) in features.row(r).iter().enumerate() {
                columns[f * n + r] = v;
            }
        }
        let mut keyed: Vec<(T, u32)> = Vec::with_capacity(n);
        let sorted = columns
            .chunks(n)
            .map(|col| {
                keyed.clear();
                keyed.extend(col.iter().zip(0u32..).map(|(&v, r)| (v, r)));
                keyed.sort_unstable_by(|a, b| total_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
                keyed.iter().map(|&(_, r)| r).collect()
            })
            .collect();
        Ok(Self { targets, columns, sorted })
    }

    pub fn fit(&self, weights: &[T], max_depth: usize) -> Result<RegressionTree<T>> {
        let n = self.targets.len();
        if weights.len() != n {
            return Err(Error::LengthMismatch { left: n, right: weights.len() });
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidArgument("tree weights must be finite and non-negative".into()));
        }
        if !(weights.iter().copied().sum::<T>() > T::zero()) {
            return Err(Error::InvalidArgument("tree weights sum to zero".into()));
        }
        let mut active: Vec<u32> = (0..n as u32).filter(|&r| weights[r as usize] > T::zero()).collect();
        let m = active.len();
        // per-feature orders of the active rows, `m` entries per feature
        let mut order = Vec::with_capacity(m * self.sorted.len());
        for list in &self.sorted {
            order.extend(list.iter().copied().filter(|&r| weights[r as usize] > T::zero()));
        }
        let mut builder = Builder {
            columns: &self.columns,
            n,
            m,
            left: vec![false; n],
            targets: self.targets,
            weights,
            nodes: Vec::new(),
            scratch: Vec::with_capacity(m),
            max_depth,
        };
        builder.grow(&mut order, &mut active, 0, m, 0);
        Ok(RegressionTree { nodes: builder.nodes, max_depth })
    }
}

/// Fits a single tree; see [`TreeFitter`] for repeated fits on the same rows.
pub fn fit_tree<T: Scalar>(
    features: &FeatureMatrix<T>,
    targets: &[T],
    weights: &[T],
    max_depth: usize,
) -> Result<RegressionTree<T>> {
    TreeFitter::new(features, targets)?.fit(weights, max_depth)
}

struct Builder<'a, T> {
    columns: &'a [T],
    n: usize,
    /// Rows with positive weight; stride of the flat order buffer.
    m: usize,
    /// Side of each row for the split being applied.
    left: Vec<bool>,
    targets: &'a [T],
    weights: &'a [T],
    nodes: Vec<TreeNode<T>>,
    scratch: Vec<u32>,
    max_depth: usize,
}

struct Candidate<T> {
    feature: usize,
    threshold: T,
    score: T,
}

impl<T: Scalar> Builder<'_, T> {
    /// `rows[lo..hi]` lists the node's rows; `order[f * m + lo..f * m + hi]` the same rows sorted by feature f.
    fn grow(&mut self, order: &mut [u32], rows: &mut [u32], lo: usize, hi: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        let members = &rows[lo..hi];
        let total_w: T = members.iter().map(|&r| self.weights[r as usize]).sum();
        // offset from a pivot keeps the mean exact when all targets agree
        let pivot = self.targets[members[0] as usize];
        let mean = pivot
            + members.iter().map(|&r| self.weights[r as usize] * (self.targets[r as usize] - pivot)).sum::<T>()
                / total_w;
        let sse: T =
            members.iter().map(|&r| self.weights[r as usize] * (self.targets[r as usize] - mean).powi(2)).sum();
        self.nodes.push(TreeNode::Leaf { value: mean });
        if depth >= self.max_depth || hi - lo < 2 || !(sse > T::zero()) {
            return id;
        }
        let Some(best) = self.best_split(order, members, lo, hi, mean, total_w) else {
            return id;
        };
        let reduction = best.score;
        if !(reduction > sse * T::lit(1e-12)) {
            return id;
        }

        let col = &self.columns[best.feature * self.n..(best.feature + 1) * self.n];
        let mut n_left = 0;
        for &r in members {
            let l = col[r as usize] <= best.threshold;
            self.left[r as usize] = l;
            n_left += usize::from(l);
        }
        if n_left == 0 || n_left == hi - lo {
            return id;
        }
        let left = &self.left;
        for list in order.chunks_mut(self.m) {
            stable_partition(&mut list[lo..hi], &mut self.scratch, |r| left[r as usize]);
        }
        stable_partition(&mut rows[lo..hi], &mut self.scratch, |r| left[r as usize]);
        let mid = lo + n_left;
        let left = self.grow(order, rows, lo, mid, depth + 1);
        let right = self.grow(order, rows, mid, hi, depth + 1);
        self.nodes[id] = TreeNode::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }

    /// Best split by weighted SSE reduction, computed on targets centered at the node mean.
    fn best_split(
        &self,
        order: &[u32],
        members: &[u32],
        lo: usize,
        hi: usize,
        mean: T,
        total_w: T,
    ) -> Option<Candidate<T>> {
        let total_s: T = members.iter().map(|&r| self.weights[r as usize] * (self.targets[r as usize] - mean)).sum();
        let base = total_s * total_s / total_w;
        let mut best: Option<Candidate<T>> = None;
        for (f, list) in order.chunks(self.m).enumerate() {
            let list = &list[lo..hi];
            let col = &self.columns[f * self.n..(f + 1) * self.n];
            let (mut wl, mut sl) = (T::zero(), T::zero());
            for i in 0..list.len() - 1 {
                let r = list[i] as usize;
                let w = self.weights[r];
                wl += w;
                sl += w * (self.targets[r] - mean);
                let x = col[r];
                let next = col[list[i + 1] as usize];
                if !(next > x) {
                    continue;
                }
                let wr = total_w - wl;
                if !(wl > T::zero() && wr > T::zero()) {
                    continue;
                }
                let sr = total_s - sl;
                let score = sl * sl / wl + sr * sr / wr - base;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let mut threshold = (x + next) / T::lit(2.0);
                    if !(threshold < next) {
                        threshold = x;
                    }
                    best = Some(Candidate { feature: f, threshold, score });
                }
            }
        }
        best
    }
}

fn stable_partition(slice: &mut [u32], scratch: &mut Vec<u32>, pred: impl Fn(u32) -> bool) {
    scratch.clear();
    let mut w = 0;
    for i in 0..slice.len() {
        let v = slice[i];
        if pred(v) {
            slice[w] = v;
            w += 1;
        } else {
            scratch.push(v);
        }
    }
    slice[w..].copy_from_slice(scratch);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> FeatureMatrix<f64> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        FeatureMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn one_row_is_a_leaf() {
        let x = column(&[1.0]);
        let t = fit_tree(&x, &[4.2], &[1.0], 3).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.predict(&[100.0]), 4.2);
    }

    #[test]
    fn step_function_split_at_midpoint() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| if x < 5.0 { 0.0 } else { 10.0 }).collect();
        let t = fit_tree(&column(&xs), &ys, &[1.0; 10], 3).unwrap();
        match &t.nodes()[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 4.5);
            }
            other => panic!("expected split, got {other:?}"),
        }
        for (&x, &y) in xs.iter().zip(&ys) {
            assert_eq!(t.predict(&[x]), y);
        }
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn identical_rows_give_single_leaf() {
        let x = column(&[2.0; 5]);
        let t = fit_tree(&x, &[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0; 5], 3).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.predict(&[2.0]), 3.0);
    }

    #[test]
    fn zero_weight_rows_are_ignored() {
        let x = column(&[0.0, 1.0, 2.0]);
        let t = fit_tree(&x, &[1.0, 5.0, 9.0], &[1.0, 0.0, 1.0], 3).unwrap();
        assert_eq!(t.predict(&[0.0]), 1.0);
        assert_eq!(t.predict(&[2.0]), 9.0);
        // threshold only between values carried by positive weights
        match &t.nodes()[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(*threshold, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tie_goes_to_lowest_feature() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let t = fit_tree(&x, &[0.0, 1.0], &[1.0, 1.0], 1).unwrap();
        assert!(matches!(t.nodes()[0], TreeNode::Split { feature: 0, .. }));
    }

    #[test]
    fn respects_max_depth() {
        let xs: Vec<f64> = (0..64).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.7).sin()).collect();
        for depth in 0..5 {
            let t = fit_tree(&column(&xs), &ys, &[1.0; 64], depth).unwrap();
            assert!(t.depth() <= depth);
        }
    }

    #[test]
    fn invalid_weights_rejected() {
        let x = column(&[0.0, 1.0]);
        assert!(fit_tree(&x, &[0.0, 1.0], &[0.0, 0.0], 3).is_err());
        assert!(fit_tree(&x, &[0.0, 1.0], &[-1.0, 2.0], 3).is_err());
    }
}
