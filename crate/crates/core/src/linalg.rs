//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{lit, modulus, to_f64, Real};

pub type CMatrix<R> = DMatrix<Complex<R>>;
pub type CVector<R> = DVector<Complex<R>>;

const MAX_ITER: usize = 10_000;

pub fn complexify<R: Real>(m: &DMatrix<R>) -> CMatrix<R> {
    m.map(|x| Complex::new(x, R::zero()))
}

/// Eigenvalues of the real 2×2 matrix [[a, b], [c, d]].
pub fn eig2x2<R: Real>(a: R, b: R, c: R, d: R) -> (Complex<R>, Complex<R>) {
    let half: R = lit(0.5);
    let p = (a + d) * half;
    let q = (a - d) * half;
    let disc = q * q + b * c;
    if disc >= R::zero() {
        let r = disc.sqrt();
        let big = if p >= R::zero() { p + r } else { p - r };
        let det = a * d - b * c;
        let small = if big != R::zero() { det / big } else { p - r };
        (Complex::new(big, R::zero()), Complex::new(small, R::zero()))
    } else {
        let r = (-disc).sqrt();
        (Complex::new(p, r), Complex::new(p, -r))
    }
}

/// All eigenvalues of a real square matrix, read off its real Schur form.
pub fn real_eigenvalues<R: Real>(m: &DMatrix<R>) -> Result<Vec<Complex<R>>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence);
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![Complex::new(m[(0, 0)], R::zero())]),
        _ => {}
    }
    let Some(schur) = Schur::try_new(m.clone(), R::default_epsilon(), MAX_ITER) else {
        return faer_eigenvalues(m);
    };
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != R::zero() {
            let (l1, l2) = eig2x2(t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            out.push(l1);
            out.push(l2);
            i += 2;
        } else {
            out.push(Complex::new(t[(i, i)], R::zero()));
            i += 1;
        }
    }
    Ok(out)
}

/// Eigenvalues by faer's Francis QR with exceptional shifts, in double
/// precision. Used when nalgebra's Schur iteration stalls, as it can on
/// orthogonal matrices.
fn faer_eigenvalues<R: Real>(m: &DMatrix<R>) -> Result<Vec<Complex<R>>> {
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| to_f64(m[(i, j)]));
    let eigs = a.eigenvalues().map_err(|_| Error::NoConvergence)?;
    Ok(eigs.into_iter().map(|z| Complex::new(lit(z.re), lit(z.im))).collect())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<R: Real>(m: &CMatrix<R>) -> Result<Vec<R>> {
    let eig = SymmetricEigen::try_new(m.clone(), R::default_epsilon(), MAX_ITER).ok_or(Error::NoConvergence)?;
    let mut v: Vec<R> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}

fn faer_svd_error(_: faer::linalg::svd::SvdError) -> Error {
    Error::NoConvergence
}

/// Thin SVD `m = U diag(s) Vᵀ` of a real matrix, singular values descending.
/// Computed in double precision.
pub fn svd_real<R: Real>(m: &DMatrix<R>) -> Result<(Vec<R>, DMatrix<R>, DMatrix<R>)> {
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| to_f64(m[(i, j)]));
    let svd = a.thin_svd().map_err(faer_svd_error)?;
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    let sv = (0..s.nrows()).map(|i| lit(s[i])).collect();
    let u = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| lit(u[(i, j)]));
    let v = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| lit(v[(i, j)]));
    Ok((sv, u, v))
}

/// Thin SVD `m = U diag(s) Vᴴ` of a complex matrix, singular values
/// descending. Computed in double precision.
pub fn svd_complex<R: Real>(m: &CMatrix<R>) -> Result<(Vec<R>, CMatrix<R>, CMatrix<R>)> {
    let a = faer::Mat::<faer::c64>::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(to_f64(z.re), to_f64(z.im))
    });
    let svd = a.thin_svd().map_err(faer_svd_error)?;
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    let back = |z: faer::c64| Complex::new(lit(z.re), lit(z.im));
    let sv = (0..s.nrows()).map(|i| lit(s[i].re)).collect();
    let u = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| back(u[(i, j)]));
    let v = CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| back(v[(i, j)]));
    Ok((sv, u, v))
}

/// Singular values (descending) and right singular vectors as columns.
pub fn svd_right<R: Real>(m: &DMatrix<R>) -> Result<(Vec<R>, DMatrix<R>)> {
    let (s, _, v) = svd_real(m)?;
    Ok((s, v))
}

/// Singular values of a complex matrix, descending.
pub fn complex_singular_values<R: Real>(m: &CMatrix<R>) -> Result<Vec<R>> {
    Ok(svd_complex(m)?.0)
}

/// Right singular vectors of a complex square matrix whose singular values
/// are at most `threshold`, returned as columns, plus all singular values.
pub fn complex_null_space<R: Real>(m: &CMatrix<R>, threshold: R) -> Result<(CMatrix<R>, Vec<R>)> {
    let (s, _, v) = svd_complex(m)?;
    let cols: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= threshold).collect();
    let null = CMatrix::from_fn(v.nrows(), cols.len(), |i, j| v[(i, cols[j])]);
    Ok((null, s))
}

/// Moore-Penrose pseudo-inverse, discarding singular values at or below
/// `rcond · σ_max`.
pub fn pseudo_inverse<R: Real>(m: &DMatrix<R>, rcond: R) -> Result<DMatrix<R>> {
    let (s, u, v) = svd_real(m)?;
    let cutoff = s.first().copied().unwrap_or(R::zero()) * rcond;
    let inv = DVector::from_iterator(s.len(), s.iter().map(|&x| if x > cutoff { R::one() / x } else { R::zero() }));
    Ok(v * DMatrix::from_diagonal(&inv) * u.transpose())
}

/// Minimum-norm least-squares solution of `a x = b`; singular values below
/// `rcond · σ_max` are discarded.
pub fn complex_lstsq<R: Real>(a: &CMatrix<R>, b: &CVector<R>, rcond: R) -> Result<CVector<R>> {
    let (s, u, v) = svd_complex(a)?;
    let cutoff = s.iter().copied().fold(R::zero(), R::max) * rcond;
    let mut utb = u.adjoint() * b;
    for (i, x) in utb.iter_mut().enumerate() {
        *x = if s[i] > cutoff { *x / Complex::new(s[i], R::zero()) } else { Complex::new(R::zero(), R::zero()) };
    }
    Ok(v * utb)
}

/// Matrix inverse of a complex square matrix, `None` when singular.
pub fn complex_inverse<R: Real>(m: &CMatrix<R>) -> Option<CMatrix<R>> {
    m.clone().try_inverse()
}

/// 2-norm condition number of a complex matrix.
pub fn complex_condition<R: Real>(m: &CMatrix<R>) -> Result<R> {
    let s = complex_singular_values(m)?;
    let max = s.first().copied().unwrap_or(R::zero());
    let min = s.last().copied().unwrap_or(R::zero());
    Ok(if min > R::zero() { max / min } else { R::max_value().unwrap_or(max / min) })
}

pub fn power<R: Real>(m: &DMatrix<R>, k: usize) -> DMatrix<R> {
    let n = m.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Kronecker product of complex matrices.
pub fn kron<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> CMatrix<R> {
    a.kronecker(b)
}

pub fn max_abs_diff<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> R {
    a.iter().zip(b.iter()).map(|(x, y)| modulus(*x - *y)).fold(R::zero(), R::max)
}

fn orthonormalize<R: Real>(m: DMatrix<R>) -> DMatrix<R> {
    m.qr().q()
}

/// Above this size the dense SVD is replaced by subspace iteration.
pub const DENSE_SVD_LIMIT: usize = 600;

/// Leading `rank` singular triplets' singular values and right singular
/// vectors (as columns) of a real matrix.
///
/// Small matrices use a dense SVD. Large ones use block subspace iteration
/// with Rayleigh-Ritz extraction, started from a fixed pseudo-random block so
/// the result is deterministic. The singular values returned have length at
/// least `rank` (all of them on the dense path).
pub fn leading_right_singular<R: Real>(m: &DMatrix<R>, rank: usize) -> Result<(Vec<R>, DMatrix<R>)> {
    let (rows, cols) = m.shape();
    let k = rank.min(rows).min(cols);
    if rows.min(cols) <= DENSE_SVD_LIMIT {
        let (s, v) = svd_right(m)?;
        return Ok((s, v.columns(0, k).into_owned()));
    }
    let block = (k + 20).min(rows.min(cols));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5bd0);
    let init = DMatrix::from_fn(cols, block, |_, _| lit::<R>(rng.random_range(-1.0..1.0)));
    let mut q = orthonormalize(init);
    let mut previous: Option<Vec<R>> = None;
    let mt = m.transpose();
    let tol: R = lit(1e-13);
    for _ in 0..100 {
        let z = orthonormalize(m * &q);
        q = orthonormalize(&mt * z);
        let b = m * &q;
        let (s, _) = svd_right(&b)?;
        let top: Vec<R> = s.iter().take(k).copied().collect();
        if let Some(prev) = &previous {
            let scale = top.first().copied().unwrap_or(R::one()).max(R::min_value().unwrap_or(R::zero()));
            let change = top.iter().zip(prev).map(|(a, b)| (*a - *b).abs()).fold(R::zero(), R::max);
            if change <= tol * scale {
                break;
            }
        }
        previous = Some(top);
    }
    let b = m * &q;
    let (s, vb) = svd_right(&b)?;
    let v = &q * vb.columns(0, k);
    Ok((s, v))
}
