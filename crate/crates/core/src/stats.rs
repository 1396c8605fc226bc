//! F-test machinery and wild-bootstrap confidence intervals.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::assign::match_eigenvalues;
use crate::error::{Error, Result};
use crate::pencil::{fit, PencilConfig};
use crate::rng::stream;

/// CDF of the F(d1, d2) distribution.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    let dist = fisher(d1, d2)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("F statistic {x} must be nonnegative")));
    }
    Ok(dist.cdf(x))
}

fn fisher(d1: f64, d2: f64) -> Result<FisherSnedecor> {
    if !(d1 >= 1.0 && d2 >= 1.0) {
        return Err(Error::InvalidArgument(format!("degrees of freedom ({d1}, {d2}) must be at least 1")));
    }
    FisherSnedecor::new(d1, d2).map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// p-value of the nested-model F-test
/// `F = ((RSS_s - RSS_b)/(p_b - p_s)) / (RSS_b/(n - p_b))`.
///
/// Returns 1 when the comparison carries no evidence (no extra parameters,
/// no residual degrees of freedom, or `F` not positive) and 0 when the
/// larger model fits exactly while the smaller one does not.
pub fn f_test_p_value(rss_small: f64, rss_big: f64, p_small: usize, p_big: usize, n_obs: usize) -> f64 {
    if p_big <= p_small || n_obs <= p_big {
        return 1.0;
    }
    if !(rss_big > 0.0) {
        return if rss_small > 0.0 && rss_big == 0.0 { 0.0 } else { 1.0 };
    }
    let d1 = (p_big - p_small) as f64;
    let d2 = (n_obs - p_big) as f64;
    let f = ((rss_small - rss_big) / d1) / (rss_big / d2);
    if !(f > 0.0) || !f.is_finite() {
        return if f == f64::INFINITY { 0.0 } else { 1.0 };
    }
    match fisher(d1, d2) {
        Ok(dist) => dist.sf(f),
        Err(_) => 1.0,
    }
}

/// One-sided Welch t-test p-value for `mean(a) < mean(b)`.
pub fn welch_less_p_value(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument("each sample needs at least two values".into()));
    }
    let moments = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, v)
    };
    let (na, ma, va) = moments(a);
    let (nb, mb, vb) = moments(b);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        return Ok(if ma < mb { 0.0 } else { 1.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.cdf(t))
}

/// Percentile confidence interval of one eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueCI {
    pub point: Complex<f64>,
    pub re_interval: [f64; 2],
    pub im_interval: [f64; 2],
    pub confidence: f64,
    pub replicates: usize,
}

/// Intervals plus bookkeeping of a bootstrap run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub intervals: Vec<EigenvalueCI>,
    /// Replicates whose refit failed.
    pub failures: usize,
    /// Replicates whose eigenvalues had to be re-ordered to match the point
    /// estimate.
    pub reordered: usize,
    pub replicates: usize,
    pub seed: u64,
    pub method: String,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Wild bootstrap with Gaussian multipliers: each replicate refits
/// `g*(k) = ĝ(k) + r(k) v_k` with `v_k ~ N(0, 1)`, matches its eigenvalues to
/// the point estimate by minimum-cost assignment and contributes to
/// percentile intervals of the real and imaginary parts.
pub fn wild_bootstrap_ci(g: &[f64], config: &PencilConfig, replicates: usize, confidence: f64, seed: u64) -> Result<BootstrapReport> {
    if replicates < 100 {
        return Err(Error::InvalidArgument(format!("at least 100 replicates required, got {replicates}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence {confidence} outside (0, 1)")));
    }
    let point = fit(g, config)?;
    let fitted: Vec<f64> = point.reconstruct(config.k).iter().map(|z| z.re).collect();
    let resid: Vec<f64> = g.iter().zip(&fitted).map(|(a, b)| a - b).collect();

    let draws: Vec<Option<(Vec<Complex<f64>>, bool)>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let star: Vec<f64> = fitted
                .iter()
                .zip(&resid)
                .map(|(f, r)| {
                    let v: f64 = StandardNormal.sample(&mut rng);
                    f + r * v
                })
                .collect();
            let est = fit(&star, config).ok()?.eigenvalues;
            let m = match_eigenvalues(&point.eigenvalues, &est);
            let reordered = m.iter().enumerate().any(|(i, &j)| i != j);
            Some((m.iter().map(|&j| est[j]).collect(), reordered))
        })
        .collect();

    let failures = draws.iter().filter(|d| d.is_none()).count();
    if failures * 20 > replicates {
        return Err(Error::BootstrapFailures { failed: failures, total: replicates });
    }
    let ok: Vec<&(Vec<Complex<f64>>, bool)> = draws.iter().flatten().collect();
    let reordered = ok.iter().filter(|d| d.1).count();
    let lo_q = (1.0 - confidence) / 2.0;
    let hi_q = 1.0 - lo_q;
    let intervals = point
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let mut re: Vec<f64> = ok.iter().map(|d| d.0[j].re).collect();
            let mut im: Vec<f64> = ok.iter().map(|d| d.0[j].im).collect();
            re.sort_by(f64::total_cmp);
            im.sort_by(f64::total_cmp);
            EigenvalueCI {
                point: *p,
                re_interval: [quantile(&re, lo_q), quantile(&re, hi_q)],
                im_interval: [quantile(&im, lo_q), quantile(&im, hi_q)],
                confidence,
                replicates: ok.len(),
            }
        })
        .collect();
    Ok(BootstrapReport {
        intervals,
        failures,
        reordered,
        replicates,
        seed,
        method: "wild bootstrap, Gaussian multipliers, percentile intervals, Hungarian matching".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Density of F(d1, d2) after substituting x = t², so the integrand
    // 2t·f(t²) stays bounded at t = 0 even when d1 = 1.
    fn substituted_density(t: f64, d1: f64, d2: f64) -> f64 {
        use statrs::function::beta::ln_beta;
        if t == 0.0 && d1 > 1.0 {
            return 0.0;
        }
        let ln_t = if d1 == 1.0 { 0.0 } else { (d1 - 1.0) * t.ln() };
        let ln = 2f64.ln() + ln_t + 0.5 * (d1 * d1.ln() + d2 * d2.ln()) - 0.5 * (d1 + d2) * (d1 * t * t + d2).ln()
            - ln_beta(d1 / 2.0, d2 / 2.0);
        ln.exp()
    }

    fn simpson_cdf(x: f64, d1: f64, d2: f64) -> f64 {
        let n = 20_000;
        let top = x.sqrt();
        let h = top / n as f64;
        let f = |t: f64| substituted_density(t, d1, d2);
        let mut s = f(0.0) + f(top);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn f_cdf_basic_values() {
        assert_eq!(f_cdf(0.0, 3.0, 7.0).unwrap(), 0.0);
        for d in [1.0, 2.0, 5.0, 30.0] {
            assert!((f_cdf(1.0, d, d).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!((f_cdf(4.103, 2.0, 10.0).unwrap() - simpson_cdf(4.103, 2.0, 10.0)).abs() < 1e-10);
        assert!((f_cdf(4.103, 2.0, 10.0).unwrap() - 0.95).abs() < 1e-3);
        assert!(f_cdf(1.0, 0.5, 3.0).is_err());
        assert!(f_cdf(-1.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn f_cdf_matches_quadrature_on_grid() {
        for (d1, d2) in [(1.0, 1.0), (3.0, 17.0), (4.0, 150.0)] {
            let mut prev = 0.0;
            for i in 0..50 {
                let x = 0.1 + i as f64 * 0.2;
                let c = f_cdf(x, d1, d2).unwrap();
                assert!(c >= prev);
                prev = c;
                assert!((c - simpson_cdf(x, d1, d2)).abs() < 1e-8, "d=({d1},{d2}) x={x}");
            }
        }
    }

    #[test]
    fn welch_test_direction() {
        let a: Vec<f64> = (0..30).map(|i| 1.0 + 0.01 * (i % 7) as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| 1.2 + 0.02 * (i % 5) as f64).collect();
        assert!(welch_less_p_value(&a, &b).unwrap() < 1e-6);
        assert!(welch_less_p_value(&b, &a).unwrap() > 1.0 - 1e-6);
        let p = welch_less_p_value(&a, &a).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(welch_less_p_value(&a[..1], &b).is_err());
    }

    #[test]
    fn f_test_edge_cases() {
        assert_eq!(f_test_p_value(1.0, 2.0, 4, 8, 51), 1.0);
        assert_eq!(f_test_p_value(1.0, 0.0, 4, 8, 51), 0.0);
        assert_eq!(f_test_p_value(1.0, 0.5, 8, 8, 51), 1.0);
        assert_eq!(f_test_p_value(1.0, 0.5, 4, 60, 51), 1.0);
        let p = f_test_p_value(1.0, 0.5, 4, 8, 51);
        assert!(p > 0.0 && p < 0.01);
    }

    #[test]
    fn noiseless_bootstrap_is_tight_and_reproducible() {
        let g: Vec<f64> = (0..=30).map(|k| 0.95_f64.powi(k) + 0.8 * (0.4 * k as f64).cos() * 0.9_f64.powi(k)).collect();
        let cfg = PencilConfig::new(30, 15, 3).unwrap();
        let a = wild_bootstrap_ci(&g, &cfg, 100, 0.95, 4).unwrap();
        for ci in &a.intervals {
            assert!(ci.re_interval[1] - ci.re_interval[0] < 1e-8);
            assert!(ci.im_interval[1] - ci.im_interval[0] < 1e-8);
        }
        assert_eq!(a, wild_bootstrap_ci(&g, &cfg, 100, 0.95, 4).unwrap());
        assert!(wild_bootstrap_ci(&g, &cfg, 99, 0.95, 4).is_err());
    }
}
