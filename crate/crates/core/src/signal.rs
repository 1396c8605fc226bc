//! The scalar signal `g(k)` and its generators.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::ptm::PauliTransferMatrix;
use crate::rng::stream;
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::spectrum;

/// Where a signal came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalSource {
    SimulatedExact,
    SimulatedNoisy,
    Ingested,
}

/// `g(0), …, g(K)` with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSignal<R: Real> {
    values: Vec<R>,
    pub n_qubits: usize,
    /// Shots per experiment; `None` for exact values.
    pub n_samples: Option<u64>,
    pub source: SignalSource,
}

impl<R: Real> SpectralSignal<R> {
    pub fn new(values: Vec<R>, n_qubits: usize, n_samples: Option<u64>, source: SignalSource) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("signal needs at least one value".into()));
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("g({k}) is not finite")));
        }
        Ok(SpectralSignal { values, n_qubits, n_samples, source })
    }

    /// An exact signal with no qubit attribution.
    pub fn exact(values: Vec<R>) -> Result<Self> {
        Self::new(values, 0, None, SignalSource::SimulatedExact)
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn into_values(self) -> Vec<R> {
        self.values
    }

    /// Largest repetition count `K`.
    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// First `k + 1` values.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k > self.k_max() {
            return Err(Error::InvalidArgument(format!("cannot truncate K={} signal to K={k}", self.k_max())));
        }
        Ok(SpectralSignal { values: self.values[..=k].to_vec(), ..self.clone() })
    }
}

/// Preparation and measurement maps wrapped around the repeated gate.
#[derive(Clone, Debug, PartialEq)]
pub struct SpamModel<R: Real> {
    pub prep: PauliTransferMatrix<R>,
    pub meas: PauliTransferMatrix<R>,
}

impl<R: Real> SpamModel<R> {
    /// Both maps must pass the physicality checks.
    pub fn new(prep: PauliTransferMatrix<R>, meas: PauliTransferMatrix<R>) -> Result<Self> {
        if prep.basis() != meas.basis() {
            return Err(Error::Dimension("preparation and measurement maps act on different systems".into()));
        }
        for (name, m) in [("preparation", &prep), ("measurement", &meas)] {
            let report = m.validate();
            if !report.all_ok() {
                return Err(Error::InvalidArgument(format!("{name} map is not TPCP: {}", report.notes.join("; "))));
            }
        }
        Ok(SpamModel { prep, meas })
    }

    pub fn identity(basis: BasisKind) -> Self {
        SpamModel { prep: PauliTransferMatrix::identity(basis), meas: PauliTransferMatrix::identity(basis) }
    }

    /// `T_prep · T_meas`, the matrix whose eigenbasis diagonal gives the
    /// signal amplitudes.
    pub fn amplitude_operator(&self) -> DMatrix<R> {
        self.prep.t_block() * self.meas.t_block()
    }
}

fn qubits_for_block(n: usize) -> usize {
    let mut q = 0;
    while (1usize << (2 * q)) < n + 1 {
        q += 1;
    }
    if (1usize << (2 * q)) == n + 1 {
        q
    } else {
        0
    }
}

fn check_square<R: Real>(t: &DMatrix<R>) -> Result<()> {
    if t.nrows() != t.ncols() {
        return Err(Error::Dimension(format!("{}x{} block is not square", t.nrows(), t.ncols())));
    }
    Ok(())
}

/// `g(k) = Tr[T^k]` for `k = 0..=K`.
pub fn signal_nospam<R: Real>(t: &DMatrix<R>, k_max: usize) -> Result<SpectralSignal<R>> {
    check_square(t)?;
    let n = t.nrows();
    let mut power = DMatrix::<R>::identity(n, n);
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            power = t * &power;
        }
        values.push(power.trace());
    }
    SpectralSignal::new(values, qubits_for_block(n), None, SignalSource::SimulatedExact)
}

/// `g(k) = Tr[T_meas T^k T_prep]`.
pub fn signal_spam<R: Real>(t: &DMatrix<R>, spam: &SpamModel<R>, k_max: usize) -> Result<SpectralSignal<R>> {
    check_square(t)?;
    let n = t.nrows();
    if spam.prep.matrix().nrows() != n + 1 {
        return Err(Error::Dimension(format!("SPAM maps act on a {}-dim block, gate on {n}", spam.prep.matrix().nrows() - 1)));
    }
    let t_meas = spam.meas.t_block();
    let mut current = spam.prep.t_block();
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            current = t * &current;
        }
        values.push((&t_meas * &current).trace());
    }
    SpectralSignal::new(values, qubits_for_block(n), None, SignalSource::SimulatedExact)
}

/// Eigenvalues paired with their amplitudes.
pub type Modes<R> = (Vec<Complex<R>>, Vec<Complex<R>>);

/// Eigenvalues of `T` and the amplitudes `A_j = (V⁻¹ T_prep T_meas V)_jj`
/// with which they enter the SPAM-corrupted signal. `None` when `T` is not
/// diagonalizable.
pub fn spam_amplitudes<R: Real>(t: &DMatrix<R>, spam: &SpamModel<R>) -> Result<Option<Modes<R>>> {
    let spec = spectrum(t)?;
    Ok(spec.weights(&spam.amplitude_operator()).map(|w| (spec.eigenvalues, w)))
}

/// Adds independent Gaussian noise of standard deviation `1/√n_samples` to
/// each `g(k)`. The draw for index `k` depends only on `(seed, k)`.
pub fn add_shot_noise<R: Real>(g: &SpectralSignal<R>, n_samples: u64, seed: u64) -> Result<SpectralSignal<R>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let std = 1.0 / (n_samples as f64).sqrt();
    let values = g
        .values()
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let z: f64 = StandardNormal.sample(&mut stream(seed, k as u64));
            *x + lit::<R>(std * z)
        })
        .collect();
    SpectralSignal::new(values, g.n_qubits, Some(n_samples), SignalSource::SimulatedNoisy)
}

fn leakage_projector<R: Real>() -> DMatrix<R> {
    DMatrix::from_fn(8, 8, |i, j| if i == j && i < 3 { R::one() } else { R::zero() })
}

fn check_leakage_block<R: Real>(t: &DMatrix<R>) -> Result<()> {
    if t.shape() != (8, 8) {
        return Err(Error::Dimension(format!("leakage signal needs an 8x8 block, got {}x{}", t.nrows(), t.ncols())));
    }
    Ok(())
}

/// `g(k) = Tr[Π T^k]` where `Π` projects onto the three computational
/// Gell-Mann directions.
pub fn leakage_signal<R: Real>(t: &DMatrix<R>, k_max: usize) -> Result<SpectralSignal<R>> {
    check_leakage_block(t)?;
    let mut power = DMatrix::<R>::identity(8, 8);
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            power = t * &power;
        }
        values.push(power[(0, 0)] + power[(1, 1)] + power[(2, 2)]);
    }
    SpectralSignal::new(values, 1, None, SignalSource::SimulatedExact)
}

/// Eigenvalues and amplitudes `Ã_j = (V⁻¹ Π V)_jj` of the leakage signal.
pub fn leakage_amplitudes<R: Real>(t: &DMatrix<R>) -> Result<Option<Modes<R>>> {
    check_leakage_block(t)?;
    let spec = spectrum(t)?;
    Ok(spec.weights(&leakage_projector()).map(|w| (spec.eigenvalues, w)))
}

/// Number of distinct experiments: `2ⁿ (4ⁿ - 1) (K + 1)`.
pub fn experiment_budget(n_qubits: u32, k_max: u64) -> u64 {
    let d = 1u64 << n_qubits;
    d * (d * d - 1) * (k_max + 1)
}

/// Sample standard deviation helper used by noise diagnostics.
pub fn sample_std<R: Real>(xs: &[R]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().map(|x| to_f64(*x)).sum::<f64>() / n;
    (xs.iter().map(|x| (to_f64(*x) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{self, depolarizing};

    #[test]
    fn depolarizing_signal() {
        let s = depolarizing::<f64>(1, 0.1).unwrap();
        let g = signal_nospam(&s.t_block(), 3).unwrap();
        let expected = [3.0, 2.7, 2.43, 2.187];
        for (a, b) in g.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(g.n_qubits, 1);
    }

    #[test]
    fn cnot_signal_alternates() {
        let s = channels::unitary(&channels::cnot::<f64>()).unwrap();
        let g = signal_nospam(&s.t_block(), 6).unwrap();
        for (k, x) in g.values().iter().enumerate() {
            let expected = 9.0 + 6.0 * if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((x - expected).abs() < 1e-12);
        }
        assert_eq!(g.n_qubits, 2);
    }

    #[test]
    fn identity_spam_is_exactly_nospam() {
        let s = channels::unitary(&channels::rx::<f64>(0.4)).unwrap();
        let spam = SpamModel::identity(s.basis());
        assert_eq!(signal_spam(&s.t_block(), &spam, 20).unwrap(), signal_nospam(&s.t_block(), 20).unwrap());
    }

    #[test]
    fn depolarizing_spam_scales_signal() {
        let gate = depolarizing::<f64>(1, 0.1).unwrap();
        let noise = depolarizing::<f64>(1, 0.02).unwrap();
        let spam = SpamModel::new(noise.clone(), noise).unwrap();
        let g = signal_spam(&gate.t_block(), &spam, 10).unwrap();
        for (k, x) in g.values().iter().enumerate() {
            assert!((x - 3.0 * 0.98 * 0.98 * 0.9_f64.powi(k as i32)).abs() < 1e-13);
        }
    }

    #[test]
    fn spam_rejects_nonphysical_maps() {
        let basis = BasisKind::Pauli { qubits: 1 };
        let bad = PauliTransferMatrix::from_blocks(basis, &nalgebra::DVector::zeros(3), &(DMatrix::identity(3, 3) * 1.1)).unwrap();
        assert!(SpamModel::new(bad, PauliTransferMatrix::identity(basis)).is_err());
    }

    #[test]
    fn shot_noise_is_deterministic_and_validated() {
        let g = SpectralSignal::exact(vec![1.0_f64; 20]).unwrap();
        let a = add_shot_noise(&g, 1000, 7).unwrap();
        let b = add_shot_noise(&g, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_shot_noise(&g, 1000, 8).unwrap());
        assert_eq!(a.source, SignalSource::SimulatedNoisy);
        assert!(add_shot_noise(&g, 0, 7).is_err());
    }

    #[test]
    fn shot_noise_std_matches_monte_carlo() {
        let g = SpectralSignal::exact(vec![0.0_f64; 10_000]).unwrap();
        let noisy = add_shot_noise(&g, 1000, 2024).unwrap();
        let std = sample_std(noisy.values());
        assert!((std / (1.0 / 1000f64.sqrt()) - 1.0).abs() < 0.05, "{std}");
        let huge = add_shot_noise(&g, 1 << 60, 1).unwrap();
        assert!(sample_std(huge.values()) < 1e-8);
    }

    #[test]
    fn leakage_signal_block_diagonal_case() {
        let mut t = DMatrix::<f64>::identity(8, 8) * 0.5;
        t[(0, 0)] = 0.9;
        t[(1, 2)] = 0.1;
        let g = leakage_signal(&t, 5).unwrap();
        let inner = signal_nospam(&t.view((0, 0), (3, 3)).into_owned(), 5).unwrap();
        for (a, b) in g.values().iter().zip(inner.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(g.values()[0], 3.0);
        assert!(leakage_signal(&DMatrix::<f64>::identity(3, 3), 2).is_err());
    }

    #[test]
    fn budget_counts() {
        assert_eq!(experiment_budget(1, 49), 300);
        assert_eq!(experiment_budget(2, 49), 3000);
        assert_eq!(experiment_budget(1, 0), 6);
    }
}
