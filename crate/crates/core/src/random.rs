//! Random unitaries and channels for property tests and sweeps.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::{basis_for_dimension, unitary_from_hamiltonian};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::ptm::{ptm_from_kraus, PauliTransferMatrix};

fn ginibre<G: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut G) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed `d×d` unitary (QR of a Ginibre matrix with the phases of
/// `R`'s diagonal removed).
pub fn haar_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> CMatrix<f64> {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { Complex::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random Hermitian matrix from the Gaussian unitary ensemble.
pub fn gue<G: Rng + ?Sized>(d: usize, rng: &mut G) -> CMatrix<f64> {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * Complex::new(0.5, 0.0)
}

/// Kraus operators `K_j = (I ⊗ ⟨j|) W (I ⊗ |0⟩)` of a system-environment
/// unitary `W` with the environment as the second tensor factor.
pub fn stinespring_kraus(w: &CMatrix<f64>, d: usize, env: usize) -> Result<Vec<CMatrix<f64>>> {
    if w.nrows() != d * env || w.ncols() != d * env {
        return Err(Error::Dimension(format!("{}x{} dilation for d={d}, env={env}", w.nrows(), w.ncols())));
    }
    Ok((0..env).map(|j| CMatrix::from_fn(d, d, |a, b| w[(a * env + j, b * env)])).collect())
}

/// Random channel from a Haar dilation with an `env`-level environment.
pub fn random_channel<G: Rng + ?Sized>(d: usize, env: usize, rng: &mut G) -> Result<PauliTransferMatrix<f64>> {
    let basis = basis_for_dimension(d)?;
    let w = haar_unitary(d * env, rng);
    ptm_from_kraus(&stinespring_kraus(&w, d, env)?, &basis)
}

/// `target ∘ E` where `E` is generated by `exp(-i ε H)` with `H` drawn from
/// the GUE on system ⊗ environment.
pub fn perturbed_unitary_channel<G: Rng + ?Sized>(
    target: &CMatrix<f64>,
    strength: f64,
    env: usize,
    rng: &mut G,
) -> Result<PauliTransferMatrix<f64>> {
    let d = target.nrows();
    let basis = basis_for_dimension(d)?;
    let h = gue(d * env, rng) * Complex::new(strength, 0.0);
    let kraus = stinespring_kraus(&unitary_from_hamiltonian(&h), d, env)?;
    let kraus: Vec<CMatrix<f64>> = kraus.iter().map(|k| target * k).collect();
    ptm_from_kraus(&kraus, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::rng::stream;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = stream(3, 0);
        for d in [2, 4, 8] {
            let u = haar_unitary(d, &mut rng);
            assert!(max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(d, d)) < 1e-12);
        }
    }

    #[test]
    fn haar_phase_is_uniform_on_average() {
        // E[U_00] = 0 for the Haar measure; the un-corrected QR is biased.
        let mut rng = stream(4, 0);
        let m = 4000;
        let mean: Complex<f64> = (0..m).map(|_| haar_unitary(2, &mut rng)[(0, 0)]).sum::<Complex<f64>>() / m as f64;
        assert!(mean.norm() < 0.05, "{mean}");
    }

    #[test]
    fn random_channels_are_valid() {
        let mut rng = stream(5, 0);
        for env in [1, 2, 4] {
            let s = random_channel(2, env, &mut rng).unwrap();
            assert!(s.validate().all_ok(), "{:?}", s.validate());
        }
        let s = random_channel(4, 2, &mut rng).unwrap();
        assert!(s.validate().all_ok());
    }

    #[test]
    fn zero_perturbation_is_the_target() {
        let mut rng = stream(6, 0);
        let u = haar_unitary(2, &mut rng);
        let s = perturbed_unitary_channel(&u, 0.0, 2, &mut rng).unwrap();
        let t = crate::channels::unitary(&u).unwrap();
        assert!((s.matrix() - t.matrix()).amax() < 1e-12);
    }
}
