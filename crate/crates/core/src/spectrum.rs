//! Eigen-decomposition of transfer-matrix blocks.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::Result;
use crate::linalg::{self, complexify, CMatrix};
use crate::scalar::{lit, modulus, phase, to_f64, tol, Real};

/// Eigenvalues of a real matrix with conjugate pairing and a
/// diagonalizability verdict.
#[derive(Clone, Debug)]
pub struct Spectrum<R: Real> {
    /// Sorted by descending modulus, then ascending phase.
    pub eigenvalues: Vec<Complex<R>>,
    pub diagonalizable: bool,
    /// `Some(j)` pairs eigenvalue `i` with its conjugate `j` (`j == i` for a
    /// real eigenvalue); `None` when no partner was found.
    pub pairing: Vec<Option<usize>>,
    /// Groups of (numerically) coincident eigenvalues.
    pub clusters: Vec<Vec<usize>>,
    /// Unit-norm eigenvectors as columns, aligned with `eigenvalues`; absent
    /// when the matrix is defective.
    pub eigenvectors: Option<CMatrix<R>>,
    /// 2-norm condition number of `eigenvectors`.
    pub condition: Option<R>,
    pub warnings: Vec<String>,
}

/// Condition-number threshold above which the eigenvector matrix is treated
/// as singular.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Sorts by descending modulus, then ascending phase in (-π, π].
pub fn sort_eigenvalues<R: Real>(values: &mut [Complex<R>]) {
    values.sort_by(|a, b| {
        let ka = (to_f64(modulus(*a)) * 1e9).round();
        let kb = (to_f64(modulus(*b)) * 1e9).round();
        kb.total_cmp(&ka).then_with(|| to_f64(phase(*a)).total_cmp(&to_f64(phase(*b))))
    });
}

/// Greedy nearest-conjugate matching.
pub fn conjugate_pairing<R: Real>(values: &[Complex<R>], tolerance: R) -> Vec<Option<usize>> {
    let n = values.len();
    let mut pairing = vec![None; n];
    for i in 0..n {
        if pairing[i].is_some() {
            continue;
        }
        if values[i].im.abs() <= tolerance {
            pairing[i] = Some(i);
            continue;
        }
        let target = values[i].conj();
        let best = (0..n)
            .filter(|&j| j != i && pairing[j].is_none())
            .map(|j| (j, modulus(values[j] - target)))
            .min_by(|a, b| to_f64(a.1).total_cmp(&to_f64(b.1)));
        if let Some((j, dist)) = best {
            if dist <= tolerance {
                pairing[i] = Some(j);
                pairing[j] = Some(i);
            }
        }
    }
    pairing
}

fn cluster<R: Real>(values: &[Complex<R>], tolerance: R) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if modulus(values[i] - values[j]) <= tolerance {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Spectrum of a real square matrix.
///
/// Eigenvalues come from the real Schur form. Eigenvalues within 1e-6 of each
/// other form a cluster; each cluster's geometric multiplicity is read off
/// the small singular values of `T - λ̄I`. A cluster whose geometric
/// multiplicity falls short of its size marks the matrix as defective;
/// otherwise the assembled eigenvector matrix must have condition number
/// below [`CONDITION_LIMIT`].
pub fn spectrum<R: Real>(t: &DMatrix<R>) -> Result<Spectrum<R>> {
    let mut eigenvalues = linalg::real_eigenvalues(t)?;
    sort_eigenvalues(&mut eigenvalues);
    let n = eigenvalues.len();
    let pair_tol = tol::<R>(1e-8);
    let pairing = conjugate_pairing(&eigenvalues, pair_tol);
    let mut warnings = Vec::new();
    let unmatched = pairing.iter().filter(|p| p.is_none()).count();
    if unmatched > 0 {
        warnings.push(format!("{unmatched} complex eigenvalue(s) without a conjugate partner"));
    }

    let scale = t.amax().max(R::one());
    let clusters = cluster(&eigenvalues, tol::<R>(1e-6) * scale);
    let tc = complexify(t);
    let mut vectors = CMatrix::<R>::zeros(n, n);
    let mut defective = false;
    for group in &clusters {
        let m = group.len();
        let mut center = Complex::new(R::zero(), R::zero());
        for &i in group {
            center += eigenvalues[i];
        }
        center /= Complex::new(lit::<R>(m as f64), R::zero());
        let spread = group.iter().map(|&i| modulus(eigenvalues[i] - center)).fold(R::zero(), R::max);
        let shifted = &tc - CMatrix::identity(n, n) * center;
        let threshold = (tol::<R>(1e-7) * scale).max(spread * lit(10.0));
        let (_, s) = linalg::complex_null_space(&shifted, R::zero())?;
        let geometric = s.iter().filter(|x| **x <= threshold).count();
        if m > 1 && geometric < m {
            defective = true;
            continue;
        }
        // The m smallest singular directions span the eigenspace.
        let cutoff = s[n - m];
        let (null, _) = linalg::complex_null_space(&shifted, cutoff)?;
        let cols = null.ncols().min(m);
        for (slot, &i) in group.iter().enumerate().take(cols) {
            let col = null.column(null.ncols() - cols + slot).into_owned();
            let norm = col.norm();
            vectors.set_column(i, &(col / Complex::new(norm, R::zero())));
        }
    }

    let (eigenvectors, condition, diagonalizable) = if defective || n == 0 {
        (None, None, n == 0)
    } else {
        let cond = linalg::complex_condition(&vectors)?;
        let ok = cond <= lit(CONDITION_LIMIT);
        (if ok { Some(vectors) } else { None }, Some(cond), ok)
    };
    Ok(Spectrum { eigenvalues, diagonalizable, pairing, clusters, eigenvectors, condition, warnings })
}

impl<R: Real> Spectrum<R> {
    /// `diag(V⁻¹ M V)`, the weight each eigenvalue carries in `Tr[T^k M]`.
    pub fn weights(&self, m: &DMatrix<R>) -> Option<Vec<Complex<R>>> {
        let v = self.eigenvectors.as_ref()?;
        let vinv = linalg::complex_inverse(v)?;
        let w = vinv * complexify(m) * v;
        Some((0..w.nrows()).map(|i| w[(i, i)]).collect())
    }

    /// Collapses per-eigenvalue weights onto clusters: one representative
    /// eigenvalue (the cluster mean) and the summed weight.
    pub fn merge_clusters(&self, weights: &[Complex<R>]) -> Vec<(Complex<R>, Complex<R>)> {
        self.clusters
            .iter()
            .map(|g| {
                let mut l = Complex::new(R::zero(), R::zero());
                let mut a = Complex::new(R::zero(), R::zero());
                for &i in g {
                    l += self.eigenvalues[i];
                    a += weights[i];
                }
                (l / Complex::new(lit::<R>(g.len() as f64), R::zero()), a)
            })
            .collect()
    }

    pub fn spectral_radius(&self) -> R {
        self.eigenvalues.iter().map(|l| modulus(*l)).fold(R::zero(), R::max)
    }

    pub fn real_count(&self) -> usize {
        self.pairing.iter().enumerate().filter(|(i, p)| **p == Some(*i)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn diagonal_spectrum() {
        let t = DMatrix::from_diagonal(&DVector::from_vec(vec![0.9, 0.81, 0.9]));
        let s = spectrum(&t).unwrap();
        assert!(s.diagonalizable);
        let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        assert!((re[0] - 0.9).abs() < 1e-15 && (re[1] - 0.9).abs() < 1e-15 && (re[2] - 0.81).abs() < 1e-15);
        assert_eq!(s.pairing, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(s.clusters.len(), 2);
    }

    #[test]
    fn jordan_block_is_defective() {
        let t = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.5]);
        let s = spectrum(&t).unwrap();
        assert!(!s.diagonalizable);
        assert!(s.eigenvectors.is_none());
    }

    #[test]
    fn rotation_pairs_conjugates() {
        let th = 0.7_f64;
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, th.cos(), -th.sin(), 0.0, th.sin(), th.cos()]);
        let s = spectrum(&t).unwrap();
        assert!(s.diagonalizable);
        assert_eq!(s.real_count(), 1);
        for (i, p) in s.pairing.iter().enumerate() {
            let j = p.unwrap();
            assert!((s.eigenvalues[j] - s.eigenvalues[i].conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let t = DMatrix::from_row_slice(3, 3, &[0.8, 0.1, 0.0, -0.2, 0.7, 0.05, 0.0, 0.3, 0.6]);
        let s = spectrum(&t).unwrap();
        let v = s.eigenvectors.clone().unwrap();
        let tv = complexify(&t) * &v;
        for j in 0..3 {
            let diff = tv.column(j) - v.column(j) * s.eigenvalues[j];
            assert!(diff.norm() < 1e-12);
        }
        let w = s.weights(&DMatrix::identity(3, 3)).unwrap();
        assert!(w.iter().all(|z| (z - Complex::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn sort_order_modulus_then_phase() {
        let mut v = vec![Complex::new(0.5, 0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), Complex::new(-0.9, 0.0)];
        sort_eigenvalues(&mut v);
        assert_eq!(v[0], Complex::new(0.0, -1.0));
        assert_eq!(v[1], Complex::new(0.0, 1.0));
        assert_eq!(v[2], Complex::new(-0.9, 0.0));
        assert_eq!(v[3], Complex::new(0.5, 0.0));
    }

    #[test]
    fn unmatched_complex_eigenvalue_reported() {
        let v = vec![Complex::new(0.5_f64, 0.2), Complex::new(0.5, -0.1)];
        assert_eq!(conjugate_pairing(&v, 1e-8), vec![None, None]);
    }
}
