//! Pauli transfer matrices: construction, algebra and physicality checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::basis::{BasisKind, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{modulus, to_f64, tol, Real};
use crate::spectrum::{spectrum, Spectrum};

/// Transfer matrix `S_{μν} = Tr[B_μ 𝒮(B_ν)]` of a trace-preserving map.
///
/// The top row is exactly `(1, 0, …, 0)`. `T` is the lower-right block and `s`
/// the tail of the first column.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTransferMatrix<R: Real> {
    basis: BasisKind,
    matrix: DMatrix<R>,
}

fn check_shape<R: Real>(basis: BasisKind, m: &DMatrix<R>) -> Result<()> {
    let n = basis.size();
    if m.shape() != (n, n) {
        return Err(Error::Dimension(format!("expected {n}x{n} transfer matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

fn top_row_deviation<R: Real>(m: &DMatrix<R>) -> R {
    (0..m.ncols())
        .map(|j| (m[(0, j)] - if j == 0 { R::one() } else { R::zero() }).abs())
        .fold(R::zero(), R::max)
}

impl<R: Real> PauliTransferMatrix<R> {
    /// Wraps a full transfer matrix. The top row must already be
    /// `(1, 0, …, 0)` to within 1e-9; it is then snapped exactly.
    pub fn new(basis: BasisKind, mut matrix: DMatrix<R>) -> Result<Self> {
        check_shape(basis, &matrix)?;
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("transfer matrix has non-finite entries".into()));
        }
        let dev = top_row_deviation(&matrix);
        if dev > tol::<R>(1e-9) {
            return Err(Error::TopRow(to_f64(dev)));
        }
        matrix.row_mut(0).fill(R::zero());
        matrix[(0, 0)] = R::one();
        Ok(PauliTransferMatrix { basis, matrix })
    }

    pub fn identity(basis: BasisKind) -> Self {
        let n = basis.size();
        PauliTransferMatrix { basis, matrix: DMatrix::identity(n, n) }
    }

    /// Assembles `[[1, 0], [s, T]]`.
    pub fn from_blocks(basis: BasisKind, s: &DVector<R>, t: &DMatrix<R>) -> Result<Self> {
        let n = basis.size();
        if t.shape() != (n - 1, n - 1) || s.len() != n - 1 {
            return Err(Error::Dimension(format!("blocks do not fit a {n}x{n} transfer matrix")));
        }
        let mut m = DMatrix::zeros(n, n);
        m[(0, 0)] = R::one();
        m.view_mut((1, 0), (n - 1, 1)).copy_from(s);
        m.view_mut((1, 1), (n - 1, n - 1)).copy_from(t);
        Self::new(basis, m)
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    /// Hilbert-space dimension `d`.
    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn matrix(&self) -> &DMatrix<R> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<R> {
        self.matrix
    }

    /// The traceless block `T`.
    pub fn t_block(&self) -> DMatrix<R> {
        let n = self.matrix.nrows() - 1;
        self.matrix.view((1, 1), (n, n)).into_owned()
    }

    /// The non-unital vector `s`.
    pub fn s_vector(&self) -> DVector<R> {
        let n = self.matrix.nrows() - 1;
        self.matrix.view((1, 0), (n, 1)).column(0).into_owned()
    }

    /// The map `self ∘ first`, i.e. `first` is applied before `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.basis != first.basis {
            return Err(Error::Dimension("cannot compose maps in different bases".into()));
        }
        Self::new(self.basis, &self.matrix * &first.matrix)
    }

    /// `S^k` by repeated squaring.
    pub fn power(&self, k: usize) -> Self {
        let mut m = linalg::power(&self.matrix, k);
        m.row_mut(0).fill(R::zero());
        m[(0, 0)] = R::one();
        PauliTransferMatrix { basis: self.basis, matrix: m }
    }

    /// Spectrum of the traceless block.
    pub fn spectrum(&self) -> Result<Spectrum<R>> {
        spectrum(&self.t_block())
    }

    /// Choi matrix `J = Σ S_{μν} B_νᵀ ⊗ B_μ` (trace `d`).
    pub fn choi(&self) -> Result<CMatrix<R>> {
        let basis = self.basis.build::<R>()?;
        Ok(choi_matrix(&self.matrix, &basis))
    }

    pub fn validate(&self) -> ValidityReport {
        validate_matrix(self.basis, &self.matrix)
    }
}

/// `S^k` for a transfer matrix.
pub fn ptm_power<R: Real>(s: &PauliTransferMatrix<R>, k: usize) -> PauliTransferMatrix<R> {
    s.power(k)
}

fn choi_matrix<R: Real>(s: &DMatrix<R>, basis: &OperatorBasis<R>) -> CMatrix<R> {
    let d = basis.dimension();
    let mut j = CMatrix::zeros(d * d, d * d);
    let el = basis.elements();
    for nu in 0..el.len() {
        let bt = el[nu].transpose();
        let mut image = CMatrix::zeros(d, d);
        for mu in 0..el.len() {
            let w = s[(mu, nu)];
            if w != R::zero() {
                image += &el[mu] * Complex::new(w, R::zero());
            }
        }
        j += bt.kronecker(&image);
    }
    j
}

/// Transfer matrix of the channel `ρ ↦ Σ A_i ρ A_i†`.
pub fn ptm_from_kraus<R: Real>(kraus: &[CMatrix<R>], basis: &OperatorBasis<R>) -> Result<PauliTransferMatrix<R>> {
    let d = basis.dimension();
    if kraus.is_empty() {
        return Err(Error::InvalidArgument("empty Kraus set".into()));
    }
    for a in kraus {
        if a.shape() != (d, d) {
            return Err(Error::Dimension(format!("Kraus operator is {}x{}, basis needs {d}x{d}", a.nrows(), a.ncols())));
        }
    }
    let mut completeness = CMatrix::<R>::zeros(d, d);
    for a in kraus {
        completeness += a.adjoint() * a;
    }
    let deviation = linalg::max_abs_diff(&completeness, &CMatrix::identity(d, d));
    if deviation > tol::<R>(1e-10) {
        return Err(Error::NotTracePreserving(to_f64(deviation)));
    }
    let el = basis.elements();
    let n = el.len();
    let mut s = DMatrix::zeros(n, n);
    for nu in 0..n {
        let mut image = CMatrix::zeros(d, d);
        for a in kraus {
            image += a * &el[nu] * a.adjoint();
        }
        for mu in 0..n {
            s[(mu, nu)] = (&el[mu] * &image).trace().re;
        }
    }
    PauliTransferMatrix::new(basis.kind(), s)
}

/// Outcome of the physicality checks on a transfer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub tp_ok: bool,
    pub real_ok: bool,
    pub modulus_ok: bool,
    pub cp_ok: bool,
    pub worst_violation: f64,
    pub spectral_radius: f64,
    pub choi_min_eigenvalue: f64,
    pub notes: Vec<String>,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.tp_ok && self.real_ok && self.modulus_ok && self.cp_ok
    }
}

/// Checks the top row, finiteness, the spectral radius of `T` against
/// `1 + 1e-9` and complete positivity via the Choi matrix's smallest
/// eigenvalue against `-1e-9`.
///
/// `cp_ok` also requires `modulus_ok`: a genuine CP map cannot have
/// `|λ| > 1`, so a spectrum violating it means the matrix is not CP.
pub fn validate_matrix<R: Real>(basis: BasisKind, s: &DMatrix<R>) -> ValidityReport {
    let mut notes = Vec::new();
    let mut worst = 0.0_f64;
    if let Err(e) = check_shape(basis, s) {
        return ValidityReport {
            tp_ok: false,
            real_ok: false,
            modulus_ok: false,
            cp_ok: false,
            worst_violation: f64::INFINITY,
            spectral_radius: f64::NAN,
            choi_min_eigenvalue: f64::NAN,
            notes: vec![e.to_string()],
        };
    }
    let real_ok = s.iter().all(|x| x.is_finite());
    if !real_ok {
        notes.push("non-finite entries".into());
    }
    let top = to_f64(top_row_deviation(s));
    let tp_ok = top <= 1e-12_f64.max(to_f64(tol::<R>(1e-12)));
    if !tp_ok {
        notes.push(format!("top row deviates from (1, 0, ..., 0) by {top:.3e}"));
        worst = worst.max(top);
    }

    let n = s.nrows();
    let t = s.view((1, 1), (n - 1, n - 1)).into_owned();
    let mut radius = f64::NAN;
    let mut modulus_ok = false;
    if real_ok {
        match spectrum(&t) {
            Ok(spec) => {
                radius = spec.eigenvalues.iter().map(|l| to_f64(modulus(*l))).fold(0.0, f64::max);
                modulus_ok = radius <= 1.0 + to_f64(tol::<R>(1e-9));
                if !modulus_ok {
                    notes.push(format!("spectral radius {radius:.6} exceeds 1"));
                    worst = worst.max(radius - 1.0);
                }
                notes.extend(spec.warnings.iter().cloned());
            }
            Err(e) => notes.push(format!("spectrum unavailable: {e}")),
        }
    }

    let mut choi_min = f64::NAN;
    let mut choi_ok = false;
    if real_ok {
        match basis.build::<R>() {
            Ok(b) => match linalg::hermitian_eigenvalues(&choi_matrix(s, &b)) {
                Ok(ev) => {
                    choi_min = ev.first().map(|x| to_f64(*x)).unwrap_or(f64::NAN);
                    choi_ok = choi_min >= -to_f64(tol::<R>(1e-9));
                    if !choi_ok {
                        notes.push(format!("Choi matrix has eigenvalue {choi_min:.3e}"));
                        worst = worst.max(-choi_min);
                    }
                }
                Err(e) => notes.push(format!("Choi spectrum unavailable: {e}")),
            },
            Err(e) => notes.push(e.to_string()),
        }
    }
    let cp_ok = choi_ok && modulus_ok;
    ValidityReport {
        tp_ok,
        real_ok,
        modulus_ok,
        cp_ok,
        worst_violation: worst,
        spectral_radius: radius,
        choi_min_eigenvalue: choi_min,
        notes,
    }
}

pub fn validate_ptm<R: Real>(s: &PauliTransferMatrix<R>) -> ValidityReport {
    s.validate()
}
