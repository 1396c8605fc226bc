//! Driven, damped qubit: Lindblad generator in the Pauli basis.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::ptm::PauliTransferMatrix;
use crate::scalar::{csqrt, lit, to_f64, Real};

/// Hamiltonian components (angular frequencies) and decay rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladParams<R: Real> {
    pub hx: R,
    pub hy: R,
    pub hz: R,
    pub gamma1: R,
    pub gamma_phi: R,
}

impl<R: Real> LindbladParams<R> {
    pub fn new(hx: R, hy: R, hz: R, gamma1: R, gamma_phi: R) -> Result<Self> {
        let p = LindbladParams { hx, hy, hz, gamma1, gamma_phi };
        p.check()?;
        Ok(p)
    }

    /// Rates only, no drive.
    pub fn decay(gamma1: R, gamma_phi: R) -> Result<Self> {
        Self::new(R::zero(), R::zero(), R::zero(), gamma1, gamma_phi)
    }

    /// `Γ2 = Γ1/2 + Γφ`.
    pub fn gamma2(&self) -> R {
        self.gamma1 * lit(0.5) + self.gamma_phi
    }

    fn check(&self) -> Result<()> {
        for (name, value) in [("gamma1", self.gamma1), ("gamma_phi", self.gamma_phi)] {
            if !(value >= R::zero()) {
                return Err(Error::NegativeRate { name, value: to_f64(value) });
            }
        }
        Ok(())
    }
}

/// The 4×4 generator `L` with `S_τ = exp(τL)`.
pub fn lindblad_generator<R: Real>(p: &LindbladParams<R>) -> Result<DMatrix<R>> {
    p.check()?;
    let g1 = p.gamma1;
    let g2 = p.gamma2();
    let z = R::zero();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        z,  z,      z,      z,
        z,  -g2,    p.hz,   p.hy,
        z,  -p.hz,  -g2,    p.hx,
        g1, -p.hy,  -p.hx,  -g1,
    ]);
    Ok(m)
}

/// `exp(τL)` as a transfer matrix.
pub fn evolve<R: Real>(p: &LindbladParams<R>, tau: R) -> Result<PauliTransferMatrix<R>> {
    if !(tau >= R::zero()) {
        return Err(Error::InvalidArgument(format!("evolution time {} must be nonnegative", to_f64(tau))));
    }
    let l = lindblad_generator(p)? * tau;
    PauliTransferMatrix::new(BasisKind::Pauli { qubits: 1 }, l.exp())
}

/// Generator eigenvalues `Ω_j` for a drive along X only:
/// `Ω1 = -Γ2` and `Ω2,3 = -(Γ1+Γ2)/2 ∓ √((Γ1-Γ2)² - 4hx²)/2`.
pub fn case3_eigenvalues<R: Real>(gamma1: R, gamma2: R, hx: R) -> [Complex<R>; 3] {
    let half: R = lit(0.5);
    let two: R = lit(2.0);
    let diff = gamma1 - gamma2;
    let disc = (diff - two * hx) * (diff + two * hx);
    let root = csqrt(Complex::new(disc, R::zero())) * half;
    let mean = Complex::new(-(gamma1 + gamma2) * half, R::zero());
    [Complex::new(-gamma2, R::zero()), mean - root, mean + root]
}

/// Drive strength `|Γ1-Γ2|/2` at which the X-driven qubit is critically damped.
pub fn critical_hx<R: Real>(gamma1: R, gamma2: R) -> R {
    (gamma1 - gamma2).abs() * lit(0.5)
}

/// Action of `exp(tL)` on the (Y, Z) block at critical damping, returned as
/// the 2×2 matrix `e^{at}(I + tN)` with `a = -(Γ1+Γ2)/2` and
/// `N = [[(Γ1-Γ2)/2, hx], [-hx, -(Γ1-Γ2)/2]]`.
pub fn critical_yz_propagator<R: Real>(gamma1: R, gamma2: R, hx: R, t: R) -> DMatrix<R> {
    let half: R = lit(0.5);
    let a = -(gamma1 + gamma2) * half;
    let d = (gamma1 - gamma2) * half;
    let scale = (a * t).exp();
    DMatrix::from_row_slice(2, 2, &[R::one() + t * d, t * hx, -t * hx, R::one() - t * d]) * scale
}

/// Transfer matrix `[[1,0,0,0],[0,1-εx,-εy,0],[0,εy,1-ε(x+2y),0],[2εx,0,0,1-2ε(x+y)]]`,
/// a first-order Lindblad step whose traceless block is not diagonalizable.
pub fn nondiag_example<R: Real>(eps: R, x: R, y: R) -> Result<PauliTransferMatrix<R>> {
    let o = R::one();
    let z = R::zero();
    let two: R = lit(2.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        o,           z,           z,                       z,
        z,           o - eps * x, -eps * y,                z,
        z,           eps * y,     o - eps * (x + two * y), z,
        two * eps * x, z,         z,                       o - two * eps * (x + y),
    ]);
    PauliTransferMatrix::new(BasisKind::Pauli { qubits: 1 }, m)
}
