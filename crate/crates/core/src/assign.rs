//! Minimum-cost assignment (Hungarian algorithm).

use num_complex::Complex;

use crate::scalar::{modulus, to_f64, Real};

/// Solves the square assignment problem for `cost[i][j]`, returning for each
/// row `i` the assigned column. Runs in O(n³).
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Matches each reference eigenvalue to an estimate by minimizing the total
/// squared distance. `result[i]` indexes into `estimates`.
pub fn match_eigenvalues<R: Real>(reference: &[Complex<R>], estimates: &[Complex<R>]) -> Vec<usize> {
    let cost: Vec<Vec<f64>> = reference
        .iter()
        .map(|a| estimates.iter().map(|b| to_f64(modulus(*a - *b)).powi(2)).collect())
        .collect();
    hungarian(&cost)
}

/// `Δ² = (1/N) Σ_j |λ_j - λ_j^est|²` under the optimal matching.
pub fn delta_squared<R: Real>(truth: &[Complex<R>], estimates: &[Complex<R>]) -> f64 {
    let m = match_eigenvalues(truth, estimates);
    let total: f64 = truth.iter().zip(&m).map(|(a, &j)| to_f64(modulus(*a - estimates[j])).powi(2)).sum();
    total / truth.len() as f64
}
