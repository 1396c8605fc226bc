//! Signals from dynamics that are not a fixed channel repeated `k` times.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, DiscreteCDF, Poisson};

use crate::channels::{check_unitary, cz, rx, unitary};
use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix};
use crate::ptm::PauliTransferMatrix;
use crate::quadrature::GaussHermite;
use crate::signal::{SignalSource, SpectralSignal};

pub const DEFAULT_QUADRATURE_ORDER: usize = 100;
pub const MIN_QUADRATURE_ORDER: usize = 16;
/// Largest change under order doubling tolerated without a warning.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Change under order doubling at which refinement stops.
pub const QUADRATURE_CONVERGED: f64 = 1e-10;
pub const MAX_QUADRATURE_ORDER: usize = 25_600;
/// Poisson tail mass below which the revival sum is truncated.
pub const POISSON_TAIL: f64 = 1e-12;

/// A generated signal plus any numerical warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSignal {
    pub signal: SpectralSignal<f64>,
    pub warnings: Vec<String>,
    /// Finest quadrature order used, for quadrature-based scenarios.
    pub quadrature_order: Option<usize>,
}

/// CZ followed by an `X` rotation whose angle is drawn once per sequence
/// from `N(0, σ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCzParams {
    pub sigma_degrees: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    DEFAULT_QUADRATURE_ORDER
}

impl GaussianCzParams {
    pub fn new(sigma_degrees: f64, k: usize) -> Result<Self> {
        let p = GaussianCzParams { sigma_degrees, k, order: DEFAULT_QUADRATURE_ORDER };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(self.sigma_degrees >= 0.0) || !self.sigma_degrees.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma {} must be nonnegative", self.sigma_degrees)));
        }
        if self.order < MIN_QUADRATURE_ORDER {
            return Err(Error::InvalidArgument(format!("quadrature order {} below {MIN_QUADRATURE_ORDER}", self.order)));
        }
        Ok(())
    }
}

/// Traceless block of the transfer matrix of `(Rx(φ) ⊗ I)·CZ`.
pub fn rotated_cz_block(phi: f64) -> Result<DMatrix<f64>> {
    let u = kron(&rx(phi), &CMatrix::identity(2, 2)) * cz::<f64>();
    Ok(unitary(&u)?.t_block())
}

fn trace_powers(t: &DMatrix<f64>, k_max: usize) -> Vec<f64> {
    let n = t.nrows();
    let mut p = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            p = &p * t;
        }
        out.push(p.trace());
    }
    out
}

fn gaussian_cz_values(sigma: f64, k_max: usize, order: usize) -> Result<Vec<f64>> {
    let rule = GaussHermite::new(order)?;
    let scale = std::f64::consts::SQRT_2 * sigma;
    let per_node: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .map(|x| rotated_cz_block(scale * x).map(|t| trace_powers(&t, k_max)))
        .collect::<Result<_>>()?;
    let norm = std::f64::consts::PI.sqrt();
    Ok((0..=k_max)
        .map(|k| per_node.iter().zip(&rule.weights).map(|(v, w)| w * v[k]).sum::<f64>() / norm)
        .collect())
}

/// `g(k) = ∫ dφ P_σ(φ) Tr[T(φ)^k]` by Gauss–Hermite quadrature. Starting
/// from `params.order`, the order is doubled until two consecutive rules
/// agree to [`QUADRATURE_CONVERGED`] or [`MAX_QUADRATURE_ORDER`] is reached;
/// the finer rule is returned.
pub fn gaussian_cz_signal(params: &GaussianCzParams) -> Result<ScenarioSignal> {
    params.check()?;
    let sigma = params.sigma_degrees.to_radians();
    let mut order = params.order;
    let mut coarse = gaussian_cz_values(sigma, params.k, order)?;
    let (values, delta) = loop {
        let fine = gaussian_cz_values(sigma, params.k, 2 * order)?;
        let delta = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        order *= 2;
        if delta <= QUADRATURE_CONVERGED || 2 * order > MAX_QUADRATURE_ORDER {
            break (fine, delta);
        }
        coarse = fine;
    };
    let mut warnings = Vec::new();
    if delta > QUADRATURE_TOLERANCE {
        warnings.push(format!("quadrature of order {} differs from order {} by {delta:.3e}", order / 2, order));
    }
    Ok(ScenarioSignal {
        signal: SpectralSignal::new(values, 2, None, SignalSource::SimulatedExact)?,
        warnings,
        quadrature_order: Some(order),
    })
}

/// Resonant Jaynes–Cummings atom with a coherent field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevivalParams {
    pub nbar: f64,
    pub omega_dt: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

impl RevivalParams {
    pub fn new(nbar: f64, omega_dt: f64, k: usize) -> Result<Self> {
        let p = RevivalParams { nbar, omega_dt, k };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return Err(Error::InvalidArgument(format!("mean photon number {} must be nonnegative", self.nbar)));
        }
        if self.k < 1 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if !self.omega_dt.is_finite() {
            return Err(Error::InvalidArgument("omega_dt must be finite".into()));
        }
        Ok(())
    }
}

/// Poisson weights `p(n)` up to the first `n` whose tail mass is below `tail`.
pub fn poisson_weights(nbar: f64, tail: f64) -> Result<Vec<f64>> {
    if nbar == 0.0 {
        return Ok(vec![1.0]);
    }
    let dist = Poisson::new(nbar).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = Vec::new();
    let mut n = 0u64;
    loop {
        out.push(dist.pmf(n));
        if dist.sf(n) < tail {
            return Ok(out);
        }
        n += 1;
    }
}

fn revival_values(p: &RevivalParams, weights: &[f64]) -> Vec<f64> {
    (0..=p.k)
        .map(|k| {
            let t = k as f64 * p.omega_dt;
            0.5 * weights.iter().enumerate().map(|(n, w)| w * (t * ((n + 1) as f64).sqrt()).cos()).sum::<f64>()
        })
        .collect()
}

/// `g(k) = P_e(kΩδt) - 1/2 = (1/2) Σ_n p(n) cos(kΩδt √(n+1))`.
pub fn revival_signal(params: &RevivalParams) -> Result<ScenarioSignal> {
    params.check()?;
    let weights = poisson_weights(params.nbar, POISSON_TAIL)?;
    let values = revival_values(params, &weights);
    Ok(ScenarioSignal {
        signal: SpectralSignal::new(values, 1, None, SignalSource::SimulatedExact)?,
        warnings: Vec::new(),
        quadrature_order: None,
    })
}

/// The eigenvalues `e^{±iΩδt√(n+1)}` and amplitudes `p(n)/4` underlying
/// [`revival_signal`].
pub fn revival_components(params: &RevivalParams) -> Result<Vec<(Complex<f64>, f64)>> {
    params.check()?;
    let weights = poisson_weights(params.nbar, POISSON_TAIL)?;
    let mut out = Vec::with_capacity(2 * weights.len());
    for (n, w) in weights.iter().enumerate() {
        let phase = params.omega_dt * ((n + 1) as f64).sqrt();
        out.push((Complex::from_polar(1.0, phase), w / 4.0));
        out.push((Complex::from_polar(1.0, -phase), w / 4.0));
    }
    Ok(out)
}

/// How many compensating `V†` factors close the frame-mismatch product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameConvention {
    /// `S_k = (V†)^{k+1} (V S_0)^k`; `S_0 = V†`.
    #[default]
    ClosedForm,
    /// `S_k = (V†)^k (V S_0)^k = ∏_{i<k} (V†)^i S_0 V^i`; `S_0 = I`.
    Product,
}

/// A base channel whose frame drifts by `V` on every repetition.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMismatchParams {
    pub base_gate: PauliTransferMatrix<f64>,
    pub mismatch_unitary: CMatrix<f64>,
    pub k: usize,
    pub convention: FrameConvention,
}

impl FrameMismatchParams {
    pub fn new(base_gate: PauliTransferMatrix<f64>, mismatch_unitary: CMatrix<f64>, k: usize) -> Result<Self> {
        check_unitary(&mismatch_unitary)?;
        if mismatch_unitary.nrows() != base_gate.dimension() {
            return Err(Error::Dimension(format!(
                "mismatch unitary of dimension {} for a gate of dimension {}",
                mismatch_unitary.nrows(),
                base_gate.dimension()
            )));
        }
        Ok(FrameMismatchParams { base_gate, mismatch_unitary, k, convention: FrameConvention::ClosedForm })
    }
}

/// `g(k)` = trace of the traceless block of `S_k`.
pub fn frame_mismatch_signal(params: &FrameMismatchParams) -> Result<ScenarioSignal> {
    let v = unitary(&params.mismatch_unitary)?;
    let v_dag = v.matrix().transpose();
    let step = v.matrix() * params.base_gate.matrix();
    let n = step.nrows();
    let mut drift = match params.convention {
        FrameConvention::ClosedForm => v_dag.clone(),
        FrameConvention::Product => DMatrix::identity(n, n),
    };
    let mut body = DMatrix::<f64>::identity(n, n);
    let mut values = Vec::with_capacity(params.k + 1);
    for k in 0..=params.k {
        if k > 0 {
            drift = &drift * &v_dag;
            body = &body * &step;
        }
        let full = &drift * &body;
        values.push(full.trace() - full[(0, 0)]);
    }
    let n_qubits = (n as f64).log(4.0).round() as usize;
    Ok(ScenarioSignal {
        signal: SpectralSignal::new(values, n_qubits, None, SignalSource::SimulatedExact)?,
        warnings: Vec::new(),
        quadrature_order: None,
    })
}

/// Tolerance on `|Im λ|` for counting an estimate as real.
pub const REAL_TOLERANCE: f64 = 1e-8;

/// Reasons a fitted spectrum cannot come from a repeated TPCP map on a
/// `d`-level system; empty when none apply.
pub fn tpcp_violations(eigenvalues: &[Complex<f64>], d: usize, modulus_tolerance: f64) -> Vec<String> {
    let mut out = Vec::new();
    let n = d * d - 1;
    if n % 2 == 1 && !eigenvalues.is_empty() && eigenvalues.iter().all(|z| z.im.abs() > REAL_TOLERANCE) {
        out.push(format!(
            "no real eigenvalue: a real {n}x{n} transfer matrix must have at least one real eigenvalue"
        ));
    }
    if let Some(z) = eigenvalues.iter().find(|z| z.norm() > 1.0 + modulus_tolerance) {
        out.push(format!("eigenvalue {z} has modulus {:.6} > 1", z.norm()));
    }
    out
}

/// `true` when the fitted spectrum has no real eigenvalue although the
/// transfer-matrix block has odd dimension.
pub fn lacks_required_real_eigenvalue(eigenvalues: &[Complex<f64>], d: usize) -> bool {
    (d * d - 1) % 2 == 1 && !eigenvalues.is_empty() && eigenvalues.iter().all(|z| z.im.abs() > REAL_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{cnot, ry};
    use crate::signal::signal_nospam;

    #[test]
    fn gaussian_cz_without_noise_is_ideal_cz() {
        let p = GaussianCzParams::new(0.0, 12).unwrap();
        let s = gaussian_cz_signal(&p).unwrap();
        for (k, g) in s.signal.values().iter().enumerate() {
            let expected = 9.0 + 6.0 * if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g - expected).abs() < 1e-12, "k={k} g={g}");
        }
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn gaussian_cz_matches_direct_integration() {
        let sigma = 10f64.to_radians();
        let p = GaussianCzParams::new(10.0, 6).unwrap();
        let s = gaussian_cz_signal(&p).unwrap();
        // Trapezoid over ±8σ of the Gaussian density.
        let m = 20_000;
        let h = 16.0 * sigma / m as f64;
        let mut acc = [0.0; 7];
        for i in 0..=m {
            let phi = -8.0 * sigma + i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            let dens = (-phi * phi / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            for (a, t) in acc.iter_mut().zip(trace_powers(&rotated_cz_block(phi).unwrap(), 6)) {
                *a += w * dens * t;
            }
        }
        for (k, (a, g)) in acc.iter().zip(s.signal.values()).enumerate() {
            assert!((a * h - g).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn gaussian_cz_rejects_bad_parameters() {
        assert!(GaussianCzParams::new(-1.0, 5).is_err());
        let p = GaussianCzParams { sigma_degrees: 5.0, k: 5, order: 8 };
        assert!(gaussian_cz_signal(&p).is_err());
    }

    #[test]
    fn revival_starts_at_one_half() {
        let p = RevivalParams::new(5.0, 0.05, 10).unwrap();
        let s = revival_signal(&p).unwrap();
        assert!((s.signal.values()[0] - 0.5).abs() < 1e-12);
        let comps = revival_components(&p).unwrap();
        for k in [0usize, 3, 10] {
            let sum: Complex<f64> = comps.iter().map(|(l, a)| l.powu(k as u32) * a).sum();
            assert!((sum.re - s.signal.values()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn revival_vacuum_is_a_single_cosine() {
        let p = RevivalParams::new(0.0, 0.3, 5).unwrap();
        let s = revival_signal(&p).unwrap();
        for (k, g) in s.signal.values().iter().enumerate() {
            assert!((g - 0.5 * (0.3 * k as f64).cos()).abs() < 1e-15);
        }
        assert!(RevivalParams::new(-1.0, 0.1, 5).is_err());
        assert!(RevivalParams::new(1.0, 0.1, 0).is_err());
    }

    #[test]
    fn frame_mismatch_with_identity_is_plain_repetition() {
        let base = unitary(&cnot::<f64>()).unwrap();
        let p = FrameMismatchParams::new(base.clone(), CMatrix::identity(4, 4), 8).unwrap();
        let s = frame_mismatch_signal(&p).unwrap();
        let plain = signal_nospam(&base.t_block(), 8).unwrap();
        for (a, b) in s.signal.values().iter().zip(plain.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_mismatch_commuting_drift() {
        // Z on the control commutes with CNOT.
        let base = unitary(&cnot::<f64>()).unwrap();
        let v = kron(&crate::channels::rz(0.2), &CMatrix::identity(2, 2));
        let mut p = FrameMismatchParams::new(base.clone(), v.clone(), 10).unwrap();
        let closed = frame_mismatch_signal(&p).unwrap();
        p.convention = FrameConvention::Product;
        let product = frame_mismatch_signal(&p).unwrap();
        let plain = signal_nospam(&base.t_block(), 10).unwrap();
        let v_dag = unitary(&v.adjoint()).unwrap();
        for k in 0..=10 {
            assert!((product.signal.values()[k] - plain.values()[k]).abs() < 1e-10, "k={k}");
            let once = v_dag.compose(&base.power(k)).unwrap();
            let expected = once.t_block().trace();
            assert!((closed.signal.values()[k] - expected).abs() < 1e-10, "k={k}");
        }
        let v = kron(&CMatrix::identity(2, 2), &ry(0.1));
        assert!(FrameMismatchParams::new(base, v * Complex::new(2.0, 0.0), 3).is_err());
    }

    #[test]
    fn real_eigenvalue_predicate() {
        let four = [
            Complex::new(0.9636, 0.0328),
            Complex::new(0.9636, -0.0328),
            Complex::new(-0.9804, 0.0495),
            Complex::new(-0.9804, -0.0495),
        ];
        assert!(lacks_required_real_eigenvalue(&four, 4));
        assert!(!tpcp_violations(&four, 4, 1e-6).is_empty());
        let mut with_real = four.to_vec();
        with_real.push(Complex::new(0.99, 0.0));
        assert!(!lacks_required_real_eigenvalue(&with_real, 4));
        assert!(tpcp_violations(&with_real, 4, 1e-6).is_empty());
        assert!(!lacks_required_real_eigenvalue(&four, 3));
        assert_eq!(tpcp_violations(&[Complex::new(1.01, 0.0)], 2, 1e-6).len(), 1);
    }
}
