//! Gauss–Hermite rules from the Jacobi matrix (Golub–Welsch).

use crate::error::{Error, Result};

/// Nodes and weights for `∫ e^{-x²} f(x) dx ≈ Σ w_i f(x_i)`, nodes ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be positive".into()));
        }
        let mut diag = vec![0.0; order];
        let mut off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
        off.push(0.0);
        let mut first = vec![0.0; order];
        first[0] = 1.0;
        tridiagonal_ql(&mut diag, &mut off, &mut first)?;
        let mu0 = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = diag.iter().zip(&first).map(|(x, v)| (*x, mu0 * v * v)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Symmetrize to remove eigen-solver asymmetry.
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let m = n - 1 - i;
            nodes[i] = 0.5 * (pairs[i].0 - pairs[m].0);
            weights[i] = 0.5 * (pairs[i].1 + pairs[m].1);
        }
        Ok(GaussHermite { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Expectation of `f(φ)` for `φ ~ N(0, σ²)`, via `φ = √2 σ x`.
    pub fn gaussian_expectation<F: Fn(f64) -> f64>(&self, sigma: f64, f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sigma;
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(scale * x)).sum();
        s / std::f64::consts::PI.sqrt()
    }
}

const QL_MAX_SWEEPS: usize = 60;

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`, last entry unused).
/// On return `d` holds the eigenvalues and `z` the first components of the
/// matching unit eigenvectors, given `z = e₁` on entry.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
