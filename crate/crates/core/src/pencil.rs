//! Matrix-pencil (ESPRIT) estimation of the eigenvalues behind `g(k)`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{lit, modulus, to_f64, tol, Real};
use crate::spectrum::sort_eigenvalues;
use crate::stats::f_test_p_value;

/// Pencil parameter `L`, model order `N` and largest index `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilConfig {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
}

impl PencilConfig {
    /// Requires `N ≥ 1`, `N ≤ L ≤ K - 1` and `K - L ≥ N - 1`.
    pub fn new(k: usize, l: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::PencilConfig("model order N must be at least 1".into()));
        }
        if l == 0 || l + 1 > k {
            return Err(Error::PencilConfig(format!("pencil parameter L={l} must lie in 1..=K-1 (K={k})")));
        }
        if l < n {
            return Err(Error::PencilConfig(format!("L={l} is smaller than N={n}")));
        }
        if k - l + 1 < n {
            return Err(Error::PencilConfig(format!("K-L={} leaves fewer than N={n} rows", k - l)));
        }
        Ok(PencilConfig { l, n, k })
    }

    /// `L = ⌊K/2⌋`.
    pub fn with_default_l(k: usize, n: usize) -> Result<Self> {
        Self::new(k, k / 2, n)
    }
}

/// Eigenvalue and amplitude estimates with the rms reconstruction error.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilFit<R: Real> {
    /// Sorted by descending modulus, then ascending phase.
    pub eigenvalues: Vec<Complex<R>>,
    pub amplitudes: Vec<Complex<R>>,
    pub rms: R,
    pub config: PencilConfig,
    pub warnings: Vec<String>,
}

impl<R: Real> PencilFit<R> {
    /// `Σ_j A_j λ_j^k` for `k = 0..=k_max`.
    pub fn reconstruct(&self, k_max: usize) -> Vec<Complex<R>> {
        reconstruct(&self.eigenvalues, &self.amplitudes, k_max)
    }

    /// Residual sum of squares `(K+1)·rms²`.
    pub fn rss(&self) -> f64 {
        to_f64(self.rms).powi(2) * (self.config.k + 1) as f64
    }

    pub fn max_modulus(&self) -> R {
        self.eigenvalues.iter().map(|z| modulus(*z)).fold(R::zero(), R::max)
    }
}

fn reconstruct<R: Real>(eigenvalues: &[Complex<R>], amplitudes: &[Complex<R>], k_max: usize) -> Vec<Complex<R>> {
    let mut powers: Vec<Complex<R>> = vec![Complex::new(R::one(), R::zero()); eigenvalues.len()];
    let mut out = Vec::with_capacity(k_max + 1);
    for _ in 0..=k_max {
        let mut acc = Complex::new(R::zero(), R::zero());
        for (p, a) in powers.iter().zip(amplitudes) {
            acc += *p * *a;
        }
        out.push(acc);
        for (p, l) in powers.iter_mut().zip(eigenvalues) {
            *p *= *l;
        }
    }
    out
}

/// Hankel matrix `Y[r][c] = g(r + c)` of shape `(K-L+1)×(L+1)`.
pub fn hankel<R: Real>(g: &[R], l: usize) -> Result<DMatrix<R>> {
    if g.len() < 3 || l == 0 || l + 2 > g.len() {
        return Err(Error::PencilConfig(format!("L={l} must lie in 1..=K-1 for K={}", g.len().saturating_sub(1))));
    }
    let rows = g.len() - l;
    Ok(DMatrix::from_fn(rows, l + 1, |r, c| g[r + c]))
}

fn check_signal_length<R: Real>(g: &[R], config: &PencilConfig) -> Result<()> {
    if g.len() != config.k + 1 {
        return Err(Error::PencilConfig(format!("signal has K={} but configuration says K={}", g.len().saturating_sub(1), config.k)));
    }
    Ok(())
}

/// Relative floor below which `σ_N / σ_1` marks the order as under-determined.
pub fn degeneracy_floor<R: Real>() -> R {
    lit::<R>(1e-14).max(R::default_epsilon() * lit(10.0))
}

/// Estimates `N` eigenvalues from `g(0..=K)`.
///
/// The rank-`N` truncation `Y ≈ U Σ Vᵀ` gives `G0 = U Σ W0ᵀ` and
/// `G1 = U Σ W1ᵀ`, where `W0` and `W1` are `V` without its last and first
/// row. The nonzero eigenvalues of `G1 G0⁺` coincide with those of the N×N
/// matrix `Σ W1ᵀ (Σ W0ᵀ)⁺`, which is what gets diagonalized.
pub fn pencil_eigs<R: Real>(g: &[R], config: &PencilConfig) -> Result<Vec<Complex<R>>> {
    check_signal_length(g, config)?;
    let n = config.n;
    let l = config.l;
    let y = hankel(g, l)?;
    let (sigma, v) = linalg::leading_right_singular(&y, n)?;
    let s1 = sigma.first().copied().unwrap_or(R::zero());
    let sn = sigma.get(n - 1).copied().unwrap_or(R::zero());
    if !(s1 > R::zero()) || sn < degeneracy_floor::<R>() * s1 {
        let ratio = if s1 > R::zero() { to_f64(sn / s1) } else { 0.0 };
        return Err(Error::UnderDetermined { order: n, ratio });
    }
    let w0 = v.rows(0, l);
    let w1 = v.rows(1, l);
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, sigma.iter().take(n).copied()));
    let m0 = &scale * w0.transpose();
    let m1 = &scale * w1.transpose();
    let pinv = linalg::pseudo_inverse(&m0, R::default_epsilon() * lit((l.max(n)) as f64))?;
    let compressed = m1 * pinv;
    let mut eig = linalg::real_eigenvalues(&compressed)?;
    sort_eigenvalues(&mut eig);
    Ok(eig)
}

/// Least-squares amplitudes and rms error of a fit.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeFit<R: Real> {
    pub amplitudes: Vec<Complex<R>>,
    pub rms: R,
    /// Two eigenvalues lie within 1e-12 of each other; the Vandermonde system
    /// was solved by pseudo-inverse.
    pub near_degenerate: bool,
}

/// Minimizes `Σ_k |g(k) - Σ_j A_j λ_j^k|²` over the amplitudes and returns
/// `ε_rms = √(Σ_k |…|² / (K+1))`.
pub fn fit_amplitudes<R: Real>(g: &[R], eigenvalues: &[Complex<R>]) -> Result<AmplitudeFit<R>> {
    let n = eigenvalues.len();
    if n == 0 || g.len() < n {
        return Err(Error::InvalidArgument(format!("{} samples cannot determine {n} amplitudes", g.len())));
    }
    let rows = g.len();
    let mut vander = CMatrix::<R>::zeros(rows, n);
    for (j, l) in eigenvalues.iter().enumerate() {
        let mut p = Complex::new(R::one(), R::zero());
        for k in 0..rows {
            vander[(k, j)] = p;
            p *= *l;
        }
    }
    let rhs = CVector::from_iterator(rows, g.iter().map(|x| Complex::new(*x, R::zero())));
    let rcond = R::default_epsilon() * lit(rows.max(n) as f64);
    let amps = linalg::complex_lstsq(&vander, &rhs, rcond)?;
    let resid = &vander * &amps - &rhs;
    let rss = resid.iter().map(|z| z.norm_sqr()).fold(R::zero(), |a, b| a + b);
    let rms = (rss / lit(rows as f64)).sqrt();
    let near = (0..n).any(|i| (i + 1..n).any(|j| modulus(eigenvalues[i] - eigenvalues[j]) < lit(1e-12)));
    Ok(AmplitudeFit { amplitudes: amps.iter().copied().collect(), rms, near_degenerate: near })
}

/// Eigenvalues, amplitudes and rms error for one configuration.
pub fn fit<R: Real>(g: &[R], config: &PencilConfig) -> Result<PencilFit<R>> {
    let eigenvalues = pencil_eigs(g, config)?;
    let amp = fit_amplitudes(g, &eigenvalues)?;
    let mut warnings = Vec::new();
    if amp.near_degenerate {
        warnings.push("near-duplicate eigenvalues; amplitudes from pseudo-inverse".to_string());
    }
    Ok(PencilFit { eigenvalues, amplitudes: amp.amplitudes, rms: amp.rms, config: *config, warnings })
}

/// Real parameters per eigenvalue in the F-test (complex λ and complex A).
pub const PARAMS_PER_EIGENVALUE: usize = 4;

/// Result of F-test model-order selection.
#[derive(Clone, Debug)]
pub struct ModelSelection<R: Real> {
    pub chosen: usize,
    /// Fit for every order tried; `None` when the order was under-determined.
    pub fits: Vec<(usize, Option<PencilFit<R>>)>,
    /// `(N, p)` for the comparison of order `N-1` against `N`.
    pub p_values: Vec<(usize, f64)>,
    pub alpha: f64,
}

impl<R: Real> ModelSelection<R> {
    pub fn chosen_fit(&self) -> Option<&PencilFit<R>> {
        self.fit(self.chosen)
    }

    pub fn fit(&self, n: usize) -> Option<&PencilFit<R>> {
        self.fits.iter().find(|(m, _)| *m == n).and_then(|(_, f)| f.as_ref())
    }
}

/// Fits every order in `n_min..=n_max` and compares consecutive orders with
/// an F-test using `4N` real parameters per model. The chosen order is the
/// largest `N` whose improvement over `N-1` is significant at level `alpha`,
/// so no later order improves significantly; `n_min` when none is.
///
/// Fits are kept nested in quality: when the order-`N` pencil fit has a
/// larger rms than the retained order-`N-1` fit, the latter is extended by a
/// zero eigenvalue, amplitudes are refitted, and the result (rms no larger
/// than before) replaces the pencil fit with a warning.
pub fn select_model_order<R: Real>(g: &[R], l: usize, n_min: usize, n_max: usize, alpha: f64) -> Result<ModelSelection<R>> {
    let k = g.len().saturating_sub(1);
    if n_min == 0 || n_min > n_max {
        return Err(Error::PencilConfig(format!("invalid order range {n_min}..={n_max}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("significance level {alpha} outside (0, 1)")));
    }
    PencilConfig::new(k, l, n_max)?;
    if g.len() <= PARAMS_PER_EIGENVALUE * n_max {
        return Err(Error::DegreesOfFreedom { order: n_max, samples: g.len() });
    }
    let mut fits = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let cfg = PencilConfig::new(k, l, n)?;
        let f = match fit(g, &cfg) {
            Ok(f) => Some(f),
            Err(Error::UnderDetermined { .. }) | Err(Error::NoConvergence) => None,
            Err(e) => return Err(e),
        };
        let previous = fits.iter().rev().find_map(|(_, f): &(usize, Option<PencilFit<R>>)| f.as_ref());
        let f = match (f, previous) {
            (Some(cur), Some(prev)) if cur.rms > prev.rms && prev.eigenvalues.len() + 1 == n => {
                Some(pad_with_zero(g, prev, cfg)?.filter(|p| p.rms < cur.rms).unwrap_or(cur))
            }
            (f, _) => f,
        };
        fits.push((n, f));
    }
    let mut p_values = Vec::new();
    let mut chosen = n_min;
    for w in fits.windows(2) {
        let (ns, small) = &w[0];
        let (nb, big) = &w[1];
        let p = match (small, big) {
            (Some(s), Some(b)) => f_test_p_value(
                s.rss(),
                b.rss(),
                PARAMS_PER_EIGENVALUE * ns,
                PARAMS_PER_EIGENVALUE * nb,
                g.len(),
            ),
            _ => 1.0,
        };
        if p < alpha {
            chosen = *nb;
        }
        p_values.push((*nb, p));
    }
    Ok(ModelSelection { chosen, fits, p_values, alpha })
}

fn pad_with_zero<R: Real>(g: &[R], prev: &PencilFit<R>, config: PencilConfig) -> Result<Option<PencilFit<R>>> {
    let mut eigenvalues = prev.eigenvalues.clone();
    eigenvalues.push(Complex::new(R::zero(), R::zero()));
    let amp = fit_amplitudes(g, &eigenvalues)?;
    if amp.rms > prev.rms * (R::one() + tol::<R>(1e-9)) {
        return Ok(None);
    }
    let mut warnings = prev.warnings.clone();
    warnings.push(format!(
        "order-{} pencil fit had larger rms than order {}; order-{} fit extended by a zero eigenvalue",
        config.n,
        config.n - 1,
        config.n - 1
    ));
    Ok(Some(PencilFit { eigenvalues, amplitudes: amp.amplitudes, rms: amp.rms, config, warnings }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::polar;

    fn synth(eigs: &[Complex<f64>], amps: &[Complex<f64>], k: usize) -> Vec<f64> {
        reconstruct(eigs, amps, k).iter().map(|z| z.re).collect()
    }

    #[test]
    fn config_validation() {
        assert!(PencilConfig::new(10, 5, 3).is_ok());
        assert!(matches!(PencilConfig::new(10, 5, 0), Err(Error::PencilConfig(_))));
        assert!(matches!(PencilConfig::new(10, 2, 3), Err(Error::PencilConfig(_))));
        assert!(matches!(PencilConfig::new(10, 9, 3), Err(Error::PencilConfig(_))));
        assert!(matches!(PencilConfig::new(10, 10, 3), Err(Error::PencilConfig(_))));
        assert_eq!(PencilConfig::with_default_l(51, 3).unwrap().l, 25);
    }

    #[test]
    fn hankel_layout() {
        let y = hankel(&[1.0, 2.0, 3.0, 4.0], 1).unwrap();
        assert_eq!(y, DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 3.0, 3.0, 4.0]));
        assert!(hankel(&[1.0, 2.0, 3.0, 4.0], 3).is_err());
        assert!(hankel(&[1.0, 2.0, 3.0, 4.0], 0).is_err());
    }

    #[test]
    fn hankel_rank_equals_model_order() {
        let eigs = [Complex::new(0.9, 0.0), polar(0.8, 0.3), polar(0.8, -0.3)];
        let g = synth(&eigs, &[Complex::new(1.0, 0.0); 3], 20);
        let (s, _) = linalg::svd_right(&hankel(&g, 10).unwrap()).unwrap();
        assert!(s[3] / s[0] < 1e-10 && s[2] / s[0] > 1e-6);
        let (s, _) = linalg::svd_right(&hankel(&[2.5; 12], 5).unwrap()).unwrap();
        assert!(s[1] / s[0] < 1e-12);
    }

    #[test]
    fn recovers_damped_rotation() {
        let eigs = [Complex::new(0.9, 0.0), polar(0.8, 0.3), polar(0.8, -0.3)];
        let g = synth(&eigs, &[Complex::new(1.0, 0.0); 3], 10);
        let est = pencil_eigs(&g, &PencilConfig::new(10, 5, 3).unwrap()).unwrap();
        assert!(crate::assign::delta_squared(&eigs, &est).sqrt() < 1e-9);
    }

    #[test]
    fn single_exponential() {
        let g: Vec<f64> = (0..=10).map(|k| 3.0 * 0.9_f64.powi(k)).collect();
        let f = fit(&g, &PencilConfig::new(10, 5, 1).unwrap()).unwrap();
        assert!((f.eigenvalues[0] - Complex::new(0.9, 0.0)).norm() < 1e-12);
        assert!((f.amplitudes[0] - Complex::new(3.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn interpolation_has_zero_rms() {
        let eigs = [Complex::new(0.5, 0.0), Complex::new(-0.7, 0.0)];
        let a = fit_amplitudes(&[1.0, 0.2], &eigs).unwrap();
        assert!(a.rms < 1e-15);
        assert!(fit_amplitudes(&[1.0], &eigs).is_err());
    }

    #[test]
    fn degenerate_order_is_reported() {
        let g: Vec<f64> = (0..=20).map(|k| 0.9_f64.powi(k)).collect();
        assert!(matches!(pencil_eigs(&g, &PencilConfig::new(20, 10, 3).unwrap()), Err(Error::UnderDetermined { order: 3, .. })));
    }

    #[test]
    fn selection_on_clean_three_component_signal() {
        let eigs = [Complex::new(0.95, 0.0), polar(0.9, 0.5), polar(0.9, -0.5)];
        let g = synth(&eigs, &[Complex::new(1.0, 0.0); 3], 50);
        let sel = select_model_order(&g, 25, 1, 6, 0.05).unwrap();
        assert_eq!(sel.chosen, 3);
        for (n, p) in &sel.p_values {
            if *n > 3 {
                assert!(*p >= 0.05);
            }
        }
        assert!(matches!(select_model_order(&g, 25, 1, 13, 0.05), Err(Error::DegreesOfFreedom { .. })));
    }

    #[test]
    fn f32_pencil_runs() {
        let g: Vec<f32> = (0..=20).map(|k| 0.9_f32.powi(k) + 0.5 * (-0.6_f32).powi(k)).collect();
        let f = fit(&g, &PencilConfig::new(20, 10, 2).unwrap()).unwrap();
        assert!((f.eigenvalues[0].re - 0.9).abs() < 1e-3);
        assert!((f.eigenvalues[1].re + 0.6).abs() < 1e-3);
    }
}
