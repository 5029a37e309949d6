//! Partitioning cells into K groups of similar location and user speed.
//!
//! Features are `(x_km, y_km, speed_kmh)` with x/y from an equirectangular
//! projection about the dataset centroid, each z-scored. Lloyd iterations
//! start from a seeded k-means++ draw. Inputs are processed in `cell_id`
//! order so the result does not depend on the order cells are supplied in.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distance::{LatLon, LocalProjection};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_CLUSTERS: usize = 11;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Independent k-means++ starts; the lowest final SSE wins.
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterInput<T> {
    pub cell_id: String,
    pub latitude: T,
    pub longitude: T,
    pub speed_kmh: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterOptions {
    pub max_iterations: usize,
    pub restarts: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self { max_iterations: DEFAULT_MAX_ITERATIONS, restarts: DEFAULT_RESTARTS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary<T> {
    pub cells: usize,
    pub mean_speed_kmh: T,
    pub min_lat: T,
    pub max_lat: T,
    pub min_lon: T,
    pub max_lon: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition<T> {
    pub k: usize,
    /// Cell ids in input order.
    pub cell_ids: Vec<String>,
    /// Cluster index per input cell.
    pub labels: Vec<usize>,
    pub assignments: BTreeMap<String, usize>,
    /// Centroids in standardized feature space.
    pub centroids: Vec<[T; 3]>,
    pub summaries: Vec<ClusterSummary<T>>,
    pub iterations: usize,
    pub converged: bool,
    /// Within-cluster SSE after every centroid update.
    pub objective_trace: Vec<T>,
}

impl<T: Scalar> ClusterPartition<T> {
    pub fn cluster_of(&self, cell_id: &str) -> Option<usize> {
        self.assignments.get(cell_id).copied()
    }

    /// Input indices of the cells in cluster `k`.
    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == k).collect()
    }

    pub fn objective(&self) -> T {
        self.objective_trace.last().copied().unwrap_or_else(T::zero)
    }
}

/// Projected and z-scored `(x, y, speed)` features in input order.
pub fn standardized_features<T: Scalar>(inputs: &[ClusterInput<T>]) -> Vec<[T; 3]> {
    if inputs.is_empty() {
        return Vec::new();
    }
    let n = T::from_count(inputs.len());
    let lat0 = inputs.iter().map(|c| c.latitude).sum::<T>() / n;
    let lon0 = inputs.iter().map(|c| c.longitude).sum::<T>() / n;
    let proj = LocalProjection::new(LatLon::new(lat0, lon0));
    let mut raw: Vec<[T; 3]> = inputs
        .iter()
        .map(|c| {
            let (x, y) = proj.project(LatLon::new(c.latitude, c.longitude));
            [x, y, c.speed_kmh]
        })
        .collect();
    for d in 0..3 {
        let mean = raw.iter().map(|p| p[d]).sum::<T>() / n;
        let var = raw.iter().map(|p| (p[d] - mean).powi(2)).sum::<T>() / n;
        let sd = if var > T::zero() { var.sqrt() } else { T::one() };
        for p in &mut raw {
            p[d] = (p[d] - mean) / sd;
        }
    }
    raw
}

pub fn squared_distance<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    (0..3).map(|d| (a[d] - b[d]).powi(2)).sum()
}

/// Sum of squared distances of points to their cluster means.
pub fn within_cluster_sse<T: Scalar>(points: &[[T; 3]], labels: &[usize], k: usize) -> T {
    let centroids = update_centroids(points, labels, k, &vec![[T::zero(); 3]; k]);
    points.iter().zip(labels).map(|(p, &l)| squared_distance(p, &centroids[l])).sum()
}

fn nearest<T: Scalar>(p: &[T; 3], centroids: &[[T; 3]]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(p, &centroids[0]);
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(p, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn assign<T: Scalar>(points: &[[T; 3]], centroids: &[[T; 3]]) -> Vec<usize> {
    points.iter().map(|p| nearest(p, centroids)).collect()
}

fn update_centroids<T: Scalar>(points: &[[T; 3]], labels: &[usize], k: usize, previous: &[[T; 3]]) -> Vec<[T; 3]> {
    let mut sums = vec![[T::zero(); 3]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        for d in 0..3 {
            sums[l][d] += p[d];
        }
        counts[l] += 1;
    }
    sums.iter()
        .zip(&counts)
        .zip(previous)
        .map(|((s, &c), prev)| if c == 0 { *prev } else { s.map(|v| v / T::from_count(c)) })
        .collect()
}

/// Moves the point farthest from its centroid into each empty cluster.
fn reseed_empty<T: Scalar>(points: &[[T; 3]], labels: &mut [usize], centroids: &mut [[T; 3]]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far: Option<(usize, T)> = None;
        for (i, p) in points.iter().enumerate() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = squared_distance(p, &centroids[labels[i]]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((i, _)) = far else {
            return;
        };
        labels[i] = empty;
        centroids[empty] = points[i];
    }
}

fn kmeans_pp<T: Scalar>(points: &[[T; 3]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[T; 3]> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &points[chosen[0]]).to_f64_lossy()).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p, &points[next]).to_f64_lossy();
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen.into_iter().map(|i| points[i]).collect()
}

struct LloydRun<T> {
    labels: Vec<usize>,
    centroids: Vec<[T; 3]>,
    iterations: usize,
    converged: bool,
    trace: Vec<T>,
}

impl<T: Scalar> LloydRun<T> {
    fn objective(&self) -> T {
        self.trace.last().copied().unwrap_or_else(T::zero)
    }
}

/// One k-means++ start followed by Lloyd iterations.
fn lloyd<T: Scalar>(points: &[[T; 3]], k: usize, max_iterations: usize, rng: &mut ChaCha8Rng) -> LloydRun<T> {
    let mut centroids = kmeans_pp(points, k, rng);
    let mut labels = assign(points, &centroids);
    reseed_empty(points, &mut labels, &mut centroids);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        centroids = update_centroids(points, &labels, k, &centroids);
        trace.push(points.iter().zip(&labels).map(|(p, &l)| squared_distance(p, &centroids[l])).sum());
        let mut next = assign(points, &centroids);
        reseed_empty(points, &mut next, &mut centroids);
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }
    if !converged {
        centroids = update_centroids(points, &labels, k, &centroids);
        trace.push(points.iter().zip(&labels).map(|(p, &l)| squared_distance(p, &centroids[l])).sum());
    }

    LloydRun { labels, centroids, iterations, converged, trace }
}

pub fn cluster_cells<T: Scalar>(
    inputs: &[ClusterInput<T>],
    k: usize,
    seed: u64,
    options: ClusterOptions,
) -> Result<ClusterPartition<T>> {
    let n = inputs.len();
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("K = {k} exceeds the number of cells {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inputs[a].cell_id.cmp(&inputs[b].cell_id));
    if order.windows(2).any(|w| inputs[w[0]].cell_id == inputs[w[1]].cell_id) {
        return Err(Error::InvalidArgument("duplicate cell ids in clustering input".into()));
    }
    let sorted: Vec<ClusterInput<T>> = order.iter().map(|&i| inputs[i].clone()).collect();
    let points = standardized_features(&sorted);

    if options.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LloydRun<T>> = None;
    for _ in 0..options.restarts {
        let run = lloyd(&points, k, options.max_iterations, &mut rng);
        // strict improvement only, so ties keep the earliest start
        if best.as_ref().is_none_or(|b| run.objective() < b.objective()) {
            best = Some(run);
        }
    }
    let LloydRun { labels, centroids, iterations, converged, trace } = best.expect("at least one start");

    let mut out_labels = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        out_labels[i] = labels[pos];
    }
    let summaries = (0..k).map(|j| summarize(inputs, &out_labels, j)).collect();
    Ok(ClusterPartition {
        k,
        cell_ids: inputs.iter().map(|c| c.cell_id.clone()).collect(),
        assignments: inputs.iter().zip(&out_labels).map(|(c, &l)| (c.cell_id.clone(), l)).collect(),
        labels: out_labels,
        centroids,
        summaries,
        iterations,
        converged,
        objective_trace: trace,
    })
}

fn summarize<T: Scalar>(inputs: &[ClusterInput<T>], labels: &[usize], k: usize) -> ClusterSummary<T> {
    let mut members: Vec<&ClusterInput<T>> =
        inputs.iter().zip(labels).filter(|(_, &l)| l == k).map(|(c, _)| c).collect();
    members.sort_by(|a, b| a.cell_id.cmp(&b.cell_id));
    let count = members.len();
    let fold = |f: fn(&ClusterInput<T>) -> T, pick: fn(T, T) -> T| {
        members.iter().map(|c| f(c)).reduce(pick).unwrap_or_else(T::zero)
    };
    ClusterSummary {
        cells: count,
        mean_speed_kmh: if count == 0 {
            T::zero()
        } else {
            members.iter().map(|c| c.speed_kmh).sum::<T>() / T::from_count(count)
        },
        min_lat: fold(|c| c.latitude, T::min),
        max_lat: fold(|c| c.latitude, T::max),
        min_lon: fold(|c| c.longitude, T::min),
        max_lon: fold(|c| c.longitude, T::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(id: &str, lat: f64, lon: f64, speed: f64) -> ClusterInput<f64> {
        ClusterInput { cell_id: id.into(), latitude: lat, longitude: lon, speed_kmh: speed }
    }

    #[test]
    fn single_cluster_takes_everything() {
        let cells: Vec<_> = (0..7).map(|i| input(&format!("c{i}"), 60.0 + i as f64 * 0.01, 24.0, 30.0)).collect();
        let p = cluster_cells(&cells, 1, 3, ClusterOptions::default()).unwrap();
        assert!(p.labels.iter().all(|&l| l == 0));
        assert_eq!(p.summaries[0].cells, 7);
        assert_eq!(p.summaries[0].mean_speed_kmh, 30.0);
    }

    #[test]
    fn k_above_n_is_an_error() {
        let cells = vec![input("a", 0.0, 0.0, 0.0)];
        assert!(cluster_cells(&cells, 2, 0, ClusterOptions::default()).is_err());
        assert!(cluster_cells(&cells, 0, 0, ClusterOptions::default()).is_err());
    }

    #[test]
    fn identical_points_still_give_non_empty_clusters() {
        let cells: Vec<_> = (0..5).map(|i| input(&format!("c{i}"), 1.0, 1.0, 10.0)).collect();
        let p = cluster_cells(&cells, 3, 9, ClusterOptions::default()).unwrap();
        assert!(p.summaries.iter().all(|s| s.cells > 0));
    }

    #[test]
    fn objective_never_increases() {
        let cells: Vec<_> = (0..60)
            .map(|i| {
                let f = i as f64;
                input(&format!("c{i:02}"), 60.0 + (f * 0.37).sin(), 24.0 + (f * 0.91).cos(), (f * 13.0) % 100.0)
            })
            .collect();
        let p = cluster_cells(&cells, 5, 1, ClusterOptions::default()).unwrap();
        for w in p.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
