//! Accuracy of the pencil estimator versus `K`, `L` and shot count.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::delta_squared;
use crate::error::{Error, Result};
use crate::pencil::{fit, PencilConfig};
use crate::rng::key;
use crate::signal::{add_shot_noise, signal_nospam};
use crate::spectrum::spectrum;

/// Mean `Δ²` over trials for one `(K, L)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub n_samples: Option<u64>,
    pub mean_delta2: f64,
    /// Per-trial `Δ²`, in trial order; failed fits are skipped.
    pub delta2: Vec<f64>,
    pub failures: usize,
}

/// For each `(K, L)`, fits `trials` noisy copies of the SPAM-free signal of
/// `t` and records `Δ² = (1/N) Σ_j |λ_j - λ_j^est|²` under optimal matching.
/// The noisy signal of trial `r` at a given `K` is shared by every `L`.
/// `n_samples = None` fits the exact signal.
pub fn accuracy_sweep(
    t: &DMatrix<f64>,
    k_list: &[usize],
    l_list: &[usize],
    n_samples: Option<u64>,
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial required".into()));
    }
    let truth: Vec<Complex<f64>> = spectrum(t)?.eigenvalues;
    let n = truth.len();
    let k_max = k_list.iter().copied().max().unwrap_or(0);
    let exact = signal_nospam(t, k_max)?;
    let mut rows = Vec::new();
    for &k in k_list {
        let base = exact.truncated(k)?;
        let cells: Vec<(usize, PencilConfig)> = l_list
            .iter()
            .filter_map(|&l| PencilConfig::new(k, l, n).ok().map(|c| (l, c)))
            .collect();
        let per_trial: Vec<Vec<Option<f64>>> = (0..trials)
            .into_par_iter()
            .map(|r| {
                let g = match n_samples {
                    Some(shots) => add_shot_noise(&base, shots, key(&[seed, k as u64, r as u64]))?,
                    None => base.clone(),
                };
                Ok(cells
                    .iter()
                    .map(|(_, cfg)| fit(g.values(), cfg).ok().map(|f| delta_squared(&truth, &f.eigenvalues)))
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (c, (l, _)) in cells.iter().enumerate() {
            let delta2: Vec<f64> = per_trial.iter().filter_map(|t| t[c]).collect();
            let failures = trials - delta2.len();
            let mean_delta2 = if delta2.is_empty() { f64::NAN } else { delta2.iter().sum::<f64>() / delta2.len() as f64 };
            rows.push(SweepRow { k, l: *l, n_samples, mean_delta2, delta2, failures });
        }
    }
    Ok(rows)
}
