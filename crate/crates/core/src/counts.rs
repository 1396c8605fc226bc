//! Measurement-count records and the count-based estimator of `g(k)`.
//!
//! Experiment `(μ, i, k)` prepares the `i`-th eigenstate of the Pauli product
//! `P_μ`, applies the gate `k` times and measures in the eigenbasis of `P_μ`.
//! Eigenstates are product states indexed by one bit per qubit (leftmost
//! qubit most significant); bit 0 selects the +1 eigenvector of that factor.
//! Identity factors are prepared and measured in the Z basis.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use rand_distr::{Binomial, Distribution};

use crate::basis::{pauli_basis, pauli_digits, BasisKind, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::ptm::PauliTransferMatrix;
use crate::rng::{key, stream};
use crate::signal::{SignalSource, SpamModel, SpectralSignal};

/// Observed outcome counts for one experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountsRecord {
    /// Traceless Pauli index `μ ∈ 1..4ⁿ`.
    pub pauli: usize,
    /// Prepared eigenstate `i ∈ 0..2ⁿ`.
    pub prep: usize,
    pub k: usize,
    /// Outcome index `j` to count.
    pub counts: BTreeMap<usize, u64>,
}

impl CountsRecord {
    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Outcome probabilities for one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    pub pauli: usize,
    pub prep: usize,
    pub k: usize,
    pub probabilities: Vec<f64>,
}

fn ket(digit: usize, bit: usize) -> [Complex<f64>; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    match digit {
        1 => [Complex::new(s, 0.0), Complex::new(sign * s, 0.0)],
        2 => [Complex::new(s, 0.0), Complex::new(0.0, sign * s)],
        _ => {
            if bit == 0 {
                [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]
            } else {
                [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]
            }
        }
    }
}

/// Density matrix of the `index`-th eigenstate of Pauli product `pauli`.
pub fn eigenstate(pauli: usize, index: usize, n_qubits: usize) -> CMatrix<f64> {
    let digits = pauli_digits(pauli, n_qubits);
    let mut state = CMatrix::from_element(1, 1, Complex::new(1.0, 0.0));
    for (q, &digit) in digits.iter().enumerate() {
        let bit = (index >> (n_qubits - 1 - q)) & 1;
        let v = ket(digit, bit);
        let col = CMatrix::from_column_slice(2, 1, &v);
        state = state.kronecker(&col);
    }
    &state * state.adjoint()
}

/// Eigenvalue of the normalized `P_μ` on its `index`-th eigenstate, `±1/√(2ⁿ)`.
pub fn eigenvalue_sign(pauli: usize, index: usize, n_qubits: usize) -> f64 {
    let digits = pauli_digits(pauli, n_qubits);
    let mut sign = 1.0;
    for (q, &digit) in digits.iter().enumerate() {
        let bit = (index >> (n_qubits - 1 - q)) & 1;
        if digit != 0 && bit == 1 {
            sign = -sign;
        }
    }
    sign / ((1usize << n_qubits) as f64).sqrt()
}

fn qubit_count(s: &PauliTransferMatrix<f64>) -> Result<usize> {
    match s.basis() {
        BasisKind::Pauli { qubits } => Ok(qubits),
        BasisKind::GellMann => Err(Error::Dimension("count simulation needs a qubit transfer matrix".into())),
    }
}

fn coefficients(rho: &CMatrix<f64>, basis: &OperatorBasis<f64>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(basis.len(), basis.elements().iter().map(|b| (b * rho).trace().re))
}

/// Probabilities of every outcome of experiment `(μ, i, k)` under
/// `𝒩_meas ∘ 𝒮^k ∘ 𝒩_prep`.
pub fn outcome_distribution(
    s: &PauliTransferMatrix<f64>,
    spam: Option<&SpamModel<f64>>,
    pauli: usize,
    prep: usize,
    k: usize,
) -> Result<OutcomeDistribution> {
    let n = qubit_count(s)?;
    let d = 1usize << n;
    if pauli == 0 || pauli >= d * d {
        return Err(Error::InvalidArgument(format!("Pauli index {pauli} is not a traceless element for {n} qubit(s)")));
    }
    if prep >= d {
        return Err(Error::InvalidArgument(format!("eigenstate index {prep} out of range for {n} qubit(s)")));
    }
    let basis = pauli_basis::<f64>(n)?;
    let mut vec = coefficients(&eigenstate(pauli, prep, n), &basis);
    if let Some(sp) = spam {
        vec = sp.prep.matrix() * vec;
    }
    vec = s.power(k).matrix() * vec;
    if let Some(sp) = spam {
        vec = sp.meas.matrix() * vec;
    }
    let mut probabilities = Vec::with_capacity(d);
    for j in 0..d {
        let proj = coefficients(&eigenstate(pauli, j, n), &basis);
        let p = proj.dot(&vec);
        if p < -1e-9 {
            return Err(Error::NegativeProbability(p));
        }
        probabilities.push(p.max(0.0));
    }
    Ok(OutcomeDistribution { pauli, prep, k, probabilities })
}

/// Samples `shots` outcomes of experiment `(μ, i, k)`. The random stream is
/// keyed by `(seed, μ, i, k)`.
pub fn simulate_counts(
    s: &PauliTransferMatrix<f64>,
    spam: Option<&SpamModel<f64>>,
    pauli: usize,
    prep: usize,
    k: usize,
    shots: u64,
    seed: u64,
) -> Result<CountsRecord> {
    let dist = outcome_distribution(s, spam, pauli, prep, k)?;
    let mut rng = stream(seed, key(&[pauli as u64, prep as u64, k as u64]));
    let mut remaining = shots;
    let mut mass = dist.probabilities.iter().sum::<f64>();
    let mut counts = BTreeMap::new();
    let last = dist.probabilities.len() - 1;
    for (j, p) in dist.probabilities.iter().enumerate() {
        let c = if j == last || remaining == 0 {
            remaining
        } else {
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
            Binomial::new(remaining, q).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(&mut rng)
        };
        counts.insert(j, c);
        remaining -= c;
        mass -= p;
    }
    Ok(CountsRecord { pauli, prep, k, counts })
}

/// Every outcome distribution needed for `k = 0..=K`.
pub fn exact_distributions(
    s: &PauliTransferMatrix<f64>,
    spam: Option<&SpamModel<f64>>,
    k_max: usize,
) -> Result<Vec<OutcomeDistribution>> {
    let n = qubit_count(s)?;
    let d = 1usize << n;
    let mut out = Vec::with_capacity((d * d - 1) * d * (k_max + 1));
    for k in 0..=k_max {
        for pauli in 1..d * d {
            for prep in 0..d {
                out.push(outcome_distribution(s, spam, pauli, prep, k)?);
            }
        }
    }
    Ok(out)
}

/// Full set of simulated records for `k = 0..=K`.
pub fn simulate_all_counts(
    s: &PauliTransferMatrix<f64>,
    spam: Option<&SpamModel<f64>>,
    k_max: usize,
    shots: u64,
    seed: u64,
) -> Result<Vec<CountsRecord>> {
    use rayon::prelude::*;
    let n = qubit_count(s)?;
    let d = 1usize << n;
    let settings: Vec<(usize, usize, usize)> =
        (0..=k_max).flat_map(|k| (1..d * d).flat_map(move |mu| (0..d).map(move |i| (mu, i, k)))).collect();
    settings.par_iter().map(|&(mu, i, k)| simulate_counts(s, spam, mu, i, k, shots, seed)).collect()
}

/// Shot bookkeeping of an ingested data set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotSummary {
    pub min: u64,
    pub max: u64,
}

impl ShotSummary {
    pub fn consistent(&self) -> bool {
        self.min == self.max
    }
}

fn combine(
    table: &HashMap<(usize, usize, usize), Vec<f64>>,
    n_qubits: usize,
    k_max: usize,
) -> Result<Vec<f64>> {
    let d = 1usize << n_qubits;
    let mut missing = Vec::new();
    let mut values = vec![0.0; k_max + 1];
    for (k, value) in values.iter_mut().enumerate() {
        for mu in 1..d * d {
            for i in 0..d {
                match table.get(&(mu, i, k)) {
                    Some(p) => {
                        let si = eigenvalue_sign(mu, i, n_qubits);
                        for (j, pj) in p.iter().enumerate() {
                            *value += si * eigenvalue_sign(mu, j, n_qubits) * pj;
                        }
                    }
                    None => missing.push((mu, i, k)),
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingSettings(missing));
    }
    Ok(values)
}

/// `ĝ(k) = Σ_μ Σ_{i,j} s_i s_j p(j|i)` from exact outcome probabilities.
pub fn estimate_g_from_distributions(
    dists: &[OutcomeDistribution],
    n_qubits: usize,
    k_max: usize,
) -> Result<SpectralSignal<f64>> {
    let table: HashMap<_, _> = dists.iter().map(|d| ((d.pauli, d.prep, d.k), d.probabilities.clone())).collect();
    SpectralSignal::new(combine(&table, n_qubits, k_max)?, n_qubits, None, SignalSource::SimulatedExact)
}

/// `ĝ(k)` from empirical frequencies. Records for the same setting are
/// pooled; records with `k > K` are ignored. Unequal shot totals are allowed
/// and reported in the returned summary.
pub fn estimate_g_from_counts(
    records: &[CountsRecord],
    n_qubits: usize,
    k_max: usize,
) -> Result<(SpectralSignal<f64>, ShotSummary)> {
    pauli_basis::<f64>(n_qubits)?;
    let d = 1usize << n_qubits;
    let mut pooled: HashMap<(usize, usize, usize), Vec<u64>> = HashMap::new();
    for r in records.iter().filter(|r| r.k <= k_max) {
        if r.pauli == 0 || r.pauli >= d * d || r.prep >= d {
            return Err(Error::InvalidArgument(format!("record (pauli {}, prep {}) out of range", r.pauli, r.prep)));
        }
        let slot = pooled.entry((r.pauli, r.prep, r.k)).or_insert_with(|| vec![0; d]);
        for (&j, &c) in &r.counts {
            if j >= d {
                return Err(Error::InvalidArgument(format!("outcome {j} out of range for {n_qubits} qubit(s)")));
            }
            slot[j] += c;
        }
    }
    let mut min = u64::MAX;
    let mut max = 0;
    let mut table = HashMap::with_capacity(pooled.len());
    for (setting, counts) in pooled {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::InvalidArgument(format!("setting {setting:?} has no shots")));
        }
        min = min.min(shots);
        max = max.max(shots);
        table.insert(setting, counts.iter().map(|c| *c as f64 / shots as f64).collect());
    }
    let values = combine(&table, n_qubits, k_max)?;
    let summary = ShotSummary { min: if max == 0 { 0 } else { min }, max };
    let signal = SpectralSignal::new(values, n_qubits, Some(max), SignalSource::Ingested)?;
    Ok((signal, summary))
}
