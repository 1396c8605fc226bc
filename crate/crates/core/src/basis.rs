//! Orthonormal Hermitian operator bases.

use num_complex::Complex;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{lit, Real};

/// Which family an operator basis belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Normalized Pauli products on `n` qubits.
    Pauli { qubits: usize },
    /// Identity plus the eight normalized Gell-Mann matrices on a qutrit.
    GellMann,
}

impl BasisKind {
    pub fn dimension(self) -> usize {
        match self {
            BasisKind::Pauli { qubits } => 1 << qubits,
            BasisKind::GellMann => 3,
        }
    }

    pub fn size(self) -> usize {
        let d = self.dimension();
        d * d
    }

    pub fn build<R: Real>(self) -> Result<OperatorBasis<R>> {
        match self {
            BasisKind::Pauli { qubits } => pauli_basis(qubits),
            BasisKind::GellMann => Ok(gellmann_basis()),
        }
    }
}

/// An ordered orthonormal basis `{B_μ}` of d×d Hermitian matrices with
/// `B_0 = I/√d`.
#[derive(Clone, Debug)]
pub struct OperatorBasis<R: Real> {
    kind: BasisKind,
    elements: Vec<CMatrix<R>>,
    labels: Vec<String>,
}

impl<R: Real> OperatorBasis<R> {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    pub fn elements(&self) -> &[CMatrix<R>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Gram matrix `Tr[B_μ B_ν]`.
    pub fn gram(&self) -> CMatrix<R> {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| (&self.elements[i] * &self.elements[j]).trace())
    }
}

/// Single-qubit Pauli matrices I, X, Y, Z (unnormalized).
pub fn pauli_matrices<R: Real>() -> [CMatrix<R>; 4] {
    let z = Complex::new(R::zero(), R::zero());
    let o = Complex::new(R::one(), R::zero());
    let i = Complex::new(R::zero(), R::one());
    [
        CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Factor-major decomposition of a Pauli-basis index: one digit in 0..4 per
/// qubit, leftmost qubit first.
pub fn pauli_digits(index: usize, qubits: usize) -> Vec<usize> {
    (0..qubits).rev().map(|q| (index >> (2 * q)) & 3).collect()
}

/// Label such as `"XZ"` for a Pauli-basis index.
pub fn pauli_label(index: usize, qubits: usize) -> String {
    pauli_digits(index, qubits).into_iter().map(|d| ['I', 'X', 'Y', 'Z'][d]).collect()
}

/// Inverse of [`pauli_label`].
pub fn pauli_index(label: &str) -> Option<usize> {
    label.chars().try_fold(0usize, |acc, ch| {
        let d = match ch.to_ascii_uppercase() {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            'Z' => 3,
            _ => return None,
        };
        Some(acc * 4 + d)
    })
}

/// Normalized Pauli basis on `n` qubits, `1 ≤ n ≤ 3`.
pub fn pauli_basis<R: Real>(n: usize) -> Result<OperatorBasis<R>> {
    if !(1..=3).contains(&n) {
        return Err(Error::QubitCount(n));
    }
    let paulis = pauli_matrices::<R>();
    let d = 1usize << n;
    let norm = Complex::new(R::one() / lit::<R>(d as f64).sqrt(), R::zero());
    let mut elements = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    for index in 0..d * d {
        let digits = pauli_digits(index, n);
        let mut m = paulis[digits[0]].clone();
        for &digit in &digits[1..] {
            m = m.kronecker(&paulis[digit]);
        }
        elements.push(m * norm);
        labels.push(pauli_label(index, n));
    }
    Ok(OperatorBasis { kind: BasisKind::Pauli { qubits: n }, elements, labels })
}

/// Qutrit basis: `I/√3`, then X, Y, Z acting on levels (0,1), then the
/// off-diagonal pairs on (0,2) and (1,2), then the second diagonal element.
pub fn gellmann_basis<R: Real>() -> OperatorBasis<R> {
    let zero = Complex::new(R::zero(), R::zero());
    let s2 = R::one() / lit::<R>(2.0).sqrt();
    let re = |x: R| Complex::new(x, R::zero());
    let im = |x: R| Complex::new(R::zero(), x);
    let sym = |a: usize, b: usize| {
        let mut m = CMatrix::from_element(3, 3, zero);
        m[(a, b)] = re(s2);
        m[(b, a)] = re(s2);
        m
    };
    let asym = |a: usize, b: usize| {
        let mut m = CMatrix::from_element(3, 3, zero);
        m[(a, b)] = im(-s2);
        m[(b, a)] = im(s2);
        m
    };
    let diag = |v: [f64; 3], scale: R| {
        let mut m = CMatrix::from_element(3, 3, zero);
        for (i, x) in v.iter().enumerate() {
            m[(i, i)] = re(lit::<R>(*x) * scale);
        }
        m
    };
    let elements = vec![
        diag([1.0, 1.0, 1.0], R::one() / lit::<R>(3.0).sqrt()),
        sym(0, 1),
        asym(0, 1),
        diag([1.0, -1.0, 0.0], s2),
        sym(0, 2),
        asym(0, 2),
        sym(1, 2),
        asym(1, 2),
        diag([1.0, 1.0, -2.0], R::one() / lit::<R>(6.0).sqrt()),
    ];
    let labels = ["I", "X01", "Y01", "Z01", "X02", "Y02", "X12", "Y12", "D"].iter().map(|s| s.to_string()).collect();
    OperatorBasis { kind: BasisKind::GellMann, elements, labels }
}
