//! Independent reference implementations used by the integration tests.
//!
//! Each function is written from the textbook definition with plain loops
//! and shares no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub const RIDGE: f64 = 1e-9;

/// `|a - b| <= tol * max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

pub fn median(x: &[f64]) -> f64 {
    let s = sorted(x);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn scaled_mad(x: &[f64]) -> f64 {
    let m = median(x);
    let dev: Vec<f64> = x.iter().map(|v| (v - m).abs()).collect();
    1.4826 * median(&dev)
}

/// Central moment of order `k` with divisor `n`.
fn moment(x: &[f64], k: i32) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n
}

/// Augmented least squares `y ~ [1, x(t-1) .. x(t-p)]` with a ridge of
/// `RIDGE` on the lag columns only, solved by QR of the stacked system
/// with one round of iterative refinement on the residual.
pub fn ar_oracle(x: &[f64], p: usize) -> (f64, Vec<f64>) {
    let n = x.len();
    let rows = n - p;
    if p == 0 {
        return (x.iter().sum::<f64>() / n as f64, vec![]);
    }
    let mut a = DMatrix::<f64>::zeros(rows + p, p + 1);
    let mut y = DVector::<f64>::zeros(rows + p);
    for r in 0..rows {
        let t = r + p;
        a[(r, 0)] = 1.0;
        for k in 1..=p {
            a[(r, k)] = x[t - k];
        }
        y[r] = x[t];
    }
    for k in 0..p {
        a[(rows + k, k + 1)] = RIDGE.sqrt();
    }
    let qr = a.clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let solve = |rhs: &DVector<f64>| r.solve_upper_triangular(&(q.transpose() * rhs)).expect("full rank");
    let mut sol = solve(&y);
    let residual = &y - &a * &sol;
    sol += solve(&residual);
    (sol[0], (1..=p).map(|k| sol[k]).collect())
}

/// Every slot of the feature vector, computed directly.
pub fn feature_oracle(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let s = sorted(x);
    let constant = s[0] == s[n - 1];
    let var = if constant { 0.0 } else { x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0) };
    let (m2, m3, m4) = (moment(x, 2), moment(x, 3), moment(x, 4));
    let skew = if constant || n < 3 { 0.0 } else { (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * m3 / m2.powf(1.5) };
    let kurt = if constant { 0.0 } else { m4 / (m2 * m2) };
    let med = median(x);
    let above = x.iter().filter(|&&v| v > med).count() as f64;
    let below = x.iter().filter(|&&v| v < med).count() as f64;
    let p = max_lag.min((n - 1) / 2);
    let (c, phi) = if constant { (mean, vec![0.0; p]) } else { ar_oracle(x, p) };
    let mac = (1..n).map(|t| (x[t] - x[t - 1]).abs()).sum::<f64>() / (nf - 1.0);
    let acf = if constant || n < 3 {
        0.0
    } else {
        let pv = m2;
        let mut tot = 0.0;
        for l in 1..=n - 2 {
            let mut acc = 0.0;
            for t in 0..n - l {
                acc += (x[t] - mean) * (x[t + l] - mean);
            }
            tot += acc / ((n - l) as f64 * pv);
        }
        tot / (n - 2) as f64
    };
    let mut out =
        vec![s[n - 1], s[0], mean, var, skew, kurt, med, if var > var.sqrt() { 1.0 } else { 0.0 }, above, below, c];
    out.extend(phi);
    out.resize(11 + max_lag, 0.0);
    out.push(mac);
    out.push(acf);
    out
}

/// Exhaustive within-cluster SSE minimum over all labelings into `k`
/// non-empty groups (restricted-growth strings).
pub fn brute_force_min_sse(points: &[[f64; 3]], k: usize) -> (f64, Vec<usize>) {
    let n = points.len();
    let mut labels = vec![0usize; n];
    let mut best = (f64::INFINITY, labels.clone());
    fn sse(points: &[[f64; 3]], labels: &[usize], k: usize) -> f64 {
        let mut total = 0.0;
        for c in 0..k {
            let members: Vec<&[f64; 3]> = points.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            let m = members.len() as f64;
            let mut centroid = [0.0; 3];
            for p in &members {
                for d in 0..3 {
                    centroid[d] += p[d] / m;
                }
            }
            for p in &members {
                total += (0..3).map(|d| (p[d] - centroid[d]).powi(2)).sum::<f64>();
            }
        }
        total
    }
    fn rec(
        i: usize,
        used: usize,
        points: &[[f64; 3]],
        labels: &mut Vec<usize>,
        k: usize,
        best: &mut (f64, Vec<usize>),
    ) {
        let n = points.len();
        if i == n {
            if used == k {
                let s = sse(points, labels, k);
                if s < best.0 {
                    *best = (s, labels.clone());
                }
            }
            return;
        }
        if k - used > n - i {
            return;
        }
        for l in 0..(used + 1).min(k) {
            labels[i] = l;
            rec(i + 1, used.max(l + 1), points, labels, k, best);
        }
    }
    rec(0, 0, points, &mut labels, k, &mut best);
    best
}

/// Per-hour-of-week median and scaled MAD over every (row, week) sample.
pub fn signature_oracle(rows: &[Vec<Option<f64>>], offset: usize) -> (Vec<f64>, Vec<f64>) {
    let mut reference = vec![f64::NAN; 168];
    let mut dispersion = vec![f64::NAN; 168];
    for h in 0..168 {
        let mut bucket = Vec::new();
        for row in rows {
            let weeks = row.len() / 168;
            for (i, slot) in row.iter().enumerate().take(weeks * 168) {
                if (offset + i) % 168 == h {
                    if let Some(v) = *slot {
                        bucket.push(v);
                    }
                }
            }
        }
        if !bucket.is_empty() {
            reference[h] = median(&bucket);
            dispersion[h] = scaled_mad(&bucket);
        }
    }
    (reference, dispersion)
}

pub fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let sbb: f64 = b.iter().map(|v| v * v).sum();
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}
