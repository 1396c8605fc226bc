//! Standard gates and noise channels.

use num_complex::Complex;

use crate::basis::{pauli_basis, pauli_digits, pauli_matrices, gellmann_basis, BasisKind, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::ptm::{ptm_from_kraus, PauliTransferMatrix};
use crate::scalar::{lit, to_f64, tol, Real};

fn re<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

/// `exp(-iθX/2)`.
pub fn rx<R: Real>(theta: R) -> CMatrix<R> {
    let half = theta * lit(0.5);
    let [i, x, _, _] = pauli_matrices::<R>();
    i * re(half.cos()) - x * Complex::new(R::zero(), half.sin())
}

/// `exp(-iθY/2)`.
pub fn ry<R: Real>(theta: R) -> CMatrix<R> {
    let half = theta * lit(0.5);
    let [i, _, y, _] = pauli_matrices::<R>();
    i * re(half.cos()) - y * Complex::new(R::zero(), half.sin())
}

/// `exp(-iθZ/2)`.
pub fn rz<R: Real>(theta: R) -> CMatrix<R> {
    let half = theta * lit(0.5);
    let [i, _, _, z] = pauli_matrices::<R>();
    i * re(half.cos()) - z * Complex::new(R::zero(), half.sin())
}

/// CNOT with the leftmost (most significant) qubit as control.
pub fn cnot<R: Real>() -> CMatrix<R> {
    let mut m = CMatrix::zeros(4, 4);
    for (row, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(row, col)] = re(R::one());
    }
    m
}

pub fn cz<R: Real>() -> CMatrix<R> {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = re(-R::one());
    m
}

/// `exp(-iH)` for a Hermitian `H`.
pub fn unitary_from_hamiltonian<R: Real>(h: &CMatrix<R>) -> CMatrix<R> {
    (h * Complex::new(R::zero(), -R::one())).exp()
}

/// Basis matching a Hilbert-space dimension: Pauli for 2, 4, 8 and Gell-Mann for 3.
pub fn basis_for_dimension<R: Real>(d: usize) -> Result<OperatorBasis<R>> {
    match d {
        2 => pauli_basis(1),
        4 => pauli_basis(2),
        8 => pauli_basis(3),
        3 => Ok(gellmann_basis()),
        _ => Err(Error::Dimension(format!("no operator basis for dimension {d}"))),
    }
}

pub fn check_unitary<R: Real>(u: &CMatrix<R>) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", u.nrows(), u.ncols())));
    }
    let d = u.nrows();
    let dev = linalg::max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(d, d));
    if dev > tol::<R>(1e-10) {
        return Err(Error::NotUnitary(to_f64(dev)));
    }
    Ok(())
}

/// Transfer matrix of `ρ ↦ UρU†`.
pub fn unitary<R: Real>(u: &CMatrix<R>) -> Result<PauliTransferMatrix<R>> {
    check_unitary(u)?;
    let basis = basis_for_dimension(u.nrows())?;
    ptm_from_kraus(std::slice::from_ref(u), &basis)
}

fn check_probability<R: Real>(p: R) -> Result<()> {
    if !(p >= R::zero() && p <= R::one()) {
        return Err(Error::Probability(to_f64(p)));
    }
    Ok(())
}

/// Depolarizing channel on `n` qubits with `T = (1-p)·I`.
pub fn depolarizing<R: Real>(n: usize, p: R) -> Result<PauliTransferMatrix<R>> {
    check_probability(p)?;
    let basis = pauli_basis::<R>(n)?;
    let d = basis.dimension();
    let paulis = pauli_matrices::<R>();
    let d2: R = lit((d * d) as f64);
    let mut kraus = Vec::with_capacity(d * d);
    for index in 0..d * d {
        let digits = pauli_digits(index, n);
        let mut m = paulis[digits[0]].clone();
        for &digit in &digits[1..] {
            m = m.kronecker(&paulis[digit]);
        }
        let weight = if index == 0 { R::one() - p * (d2 - R::one()) / d2 } else { p / d2 };
        kraus.push(m * re(weight.sqrt()));
    }
    ptm_from_kraus(&kraus, &basis)
}

/// Single-qubit amplitude damping with decay probability `p`.
pub fn amplitude_damping<R: Real>(p: R) -> Result<PauliTransferMatrix<R>> {
    check_probability(p)?;
    let z = re(R::zero());
    let a0 = CMatrix::from_row_slice(2, 2, &[re(R::one()), z, z, re((R::one() - p).sqrt())]);
    let a1 = CMatrix::from_row_slice(2, 2, &[z, re(p.sqrt()), z, z]);
    ptm_from_kraus(&[a0, a1], &pauli_basis(1)?)
}

/// Named constructions available through [`channel_library`].
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec<R: Real> {
    Depolarizing { qubits: usize, p: R },
    AmplitudeDamping { p: R },
    Unitary(CMatrix<R>),
    Cz,
    Cnot,
}

pub fn channel_library<R: Real>(spec: &ChannelSpec<R>) -> Result<PauliTransferMatrix<R>> {
    match spec {
        ChannelSpec::Depolarizing { qubits, p } => depolarizing(*qubits, *p),
        ChannelSpec::AmplitudeDamping { p } => amplitude_damping(*p),
        ChannelSpec::Unitary(u) => unitary(u),
        ChannelSpec::Cz => unitary(&cz()),
        ChannelSpec::Cnot => unitary(&cnot()),
    }
}

/// Basis kind for `n` qubits.
pub fn qubits(n: usize) -> BasisKind {
    BasisKind::Pauli { qubits: n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::modulus;
    use nalgebra::DMatrix;

    fn sorted_real(ev: &[Complex<f64>]) -> Vec<f64> {
        let mut v: Vec<f64> = ev.iter().map(|z| z.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn depolarizing_block_is_scaled_identity() {
        let s = depolarizing::<f64>(1, 0.25).unwrap();
        assert!((s.t_block() - DMatrix::identity(3, 3) * 0.75).amax() < 1e-15);
        assert!(s.s_vector().amax() < 1e-15);
        let s2 = depolarizing::<f64>(2, 0.1).unwrap();
        assert!((s2.t_block() - DMatrix::identity(15, 15) * 0.9).amax() < 1e-14);
    }

    #[test]
    fn amplitude_damping_blocks() {
        let s = amplitude_damping::<f64>(0.19).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.9, 0.9, 0.81]));
        assert!((s.t_block() - expected).amax() < 1e-14);
        assert!((s.s_vector()[2] - 0.19).abs() < 1e-14);
        let ev = sorted_real(&s.spectrum().unwrap().eigenvalues);
        assert!((ev[0] - 0.81).abs() < 1e-12 && (ev[1] - 0.9).abs() < 1e-12 && (ev[2] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn probability_range_enforced() {
        assert!(matches!(depolarizing::<f64>(1, 1.2), Err(Error::Probability(_))));
        assert!(matches!(amplitude_damping::<f64>(-0.1), Err(Error::Probability(_))));
        assert!(matches!(amplitude_damping::<f64>(f64::NAN), Err(Error::Probability(_))));
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::<f64>::identity(2, 2) * Complex::new(1.1, 0.0);
        assert!(matches!(channel_library(&ChannelSpec::Unitary(m)), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn rx_quarter_turn_spectrum() {
        let s = unitary(&rx(std::f64::consts::FRAC_PI_4)).unwrap();
        let ev = s.spectrum().unwrap().eigenvalues;
        let mut phases: Vec<f64> = ev.iter().map(|z| z.im.atan2(z.re)).collect();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = std::f64::consts::FRAC_PI_4;
        assert!((phases[0] + q).abs() < 1e-12 && phases[1].abs() < 1e-12 && (phases[2] - q).abs() < 1e-12);
        assert!(ev.iter().all(|z| (modulus(*z) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn two_qubit_clifford_spectra() {
        for spec in [ChannelSpec::Cnot, ChannelSpec::Cz] {
            let s = channel_library::<f64>(&spec).unwrap();
            let ev = sorted_real(&s.spectrum().unwrap().eigenvalues);
            assert_eq!(ev.iter().filter(|x| (**x + 1.0).abs() < 1e-10).count(), 6);
            assert_eq!(ev.iter().filter(|x| (**x - 1.0).abs() < 1e-10).count(), 9);
        }
    }

    #[test]
    fn cnot_acts_as_documented() {
        let c = cnot::<f64>();
        // |10> -> |11>
        assert_eq!(c[(3, 2)].re, 1.0);
        assert_eq!(c[(1, 1)].re, 1.0);
    }

    #[test]
    fn hamiltonian_exponential_is_unitary() {
        let [_, x, _, _] = pauli_matrices::<f64>();
        let u = unitary_from_hamiltonian(&(x * Complex::new(0.3, 0.0)));
        check_unitary(&u).unwrap();
        assert!((&u - rx(0.6)).camax() < 1e-14);
    }
}
