//! Weighted one-dimensional k-means used to merge the grid support of the
//! linear program into quadrature nodes.

use crate::error::{Error, Result};

/// Groups weighted support points into `n` clusters and returns, per
/// cluster, the weight-averaged location and the total weight.
///
/// The partition is the global minimizer of the weighted within-cluster sum
/// of squares, found by dynamic programming over the sorted points (in one
/// dimension optimal clusters are contiguous). On ties a boundary point goes
/// to the lower-index cluster.
pub fn cluster_support(points: &[f64], weights: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    let mut support: Vec<(f64, f64)> = points
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(x, w)| (*x, *w))
        .collect();
    if n == 0 || support.len() < n {
        return Err(Error::TooFewSupportPoints {
            found: support.len(),
            clusters: n,
        });
    }
    support.sort_by(|p, q| p.0.total_cmp(&q.0));
    let labels = optimal_partition(&support, n);

    let mut nodes = vec![0.0; n];
    let mut totals = vec![0.0; n];
    let mut members = vec![0usize; n];
    let mut last = vec![0.0; n];
    for (&(x, w), &k) in support.iter().zip(&labels) {
        nodes[k] += w * x;
        totals[k] += w;
        members[k] += 1;
        last[k] = x;
    }
    for k in 0..n {
        nodes[k] = if members[k] == 1 {
            last[k]
        } else {
            nodes[k] / totals[k]
        };
    }
    Ok((nodes, totals))
}

/// Cluster label of each sorted point.
fn optimal_partition(support: &[(f64, f64)], n: usize) -> Vec<usize> {
    let s = support.len();
    // Centered coordinates keep the prefix-sum variance formula accurate.
    let shift = support.iter().map(|p| p.0).sum::<f64>() / s as f64;
    let mut w = vec![0.0; s + 1];
    let mut wx = vec![0.0; s + 1];
    let mut wxx = vec![0.0; s + 1];
    for (i, &(x, weight)) in support.iter().enumerate() {
        let x = x - shift;
        w[i + 1] = w[i] + weight;
        wx[i + 1] = wx[i] + weight * x;
        wxx[i + 1] = wxx[i] + weight * x * x;
    }
    // cost of points i..j (inclusive)
    let cost = |i: usize, j: usize| {
        let sw = w[j + 1] - w[i];
        let swx = wx[j + 1] - wx[i];
        let swxx = wxx[j + 1] - wxx[i];
        (swxx - swx * swx / sw).max(0.0)
    };

    // best[k][j]: optimal cost of the first j+1 points in k+1 clusters;
    // start[k][j]: first point of cluster k in that solution.
    let mut best = vec![vec![f64::INFINITY; s]; n];
    let mut start = vec![vec![0usize; s]; n];
    for (j, slot) in best[0].iter_mut().enumerate() {
        *slot = cost(0, j);
    }
    for k in 1..n {
        for j in k..s {
            for i in k..=j {
                let c = best[k - 1][i - 1] + cost(i, j);
                if c <= best[k][j] {
                    best[k][j] = c;
                    start[k][j] = i;
                }
            }
        }
    }
    let mut labels = vec![0; s];
    let mut end = s - 1;
    for k in (0..n).rev() {
        let first = if k == 0 { 0 } else { start[k][end] };
        for label in labels.iter_mut().take(end + 1).skip(first) {
            *label = k;
        }
        if k > 0 {
            end = first - 1;
        }
    }
    labels
}
