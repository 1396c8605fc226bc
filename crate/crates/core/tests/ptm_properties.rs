use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

use spectomo::basis::pauli_basis;
use spectomo::channels::unitary;
use spectomo::lindblad::nondiag_example;
use spectomo::linalg::{hermitian_eigenvalues, CMatrix};
use spectomo::ptm::{ptm_from_kraus, ptm_power};
use spectomo::random::{haar_unitary, random_channel};
use spectomo::rng::stream;
use spectomo::{BasisKind, Ptm};

fn channel(seed: u64, qubits: usize, env: usize) -> Ptm {
    random_channel(1 << qubits, env, &mut stream(seed, 0)).unwrap()
}

/// Direct `Tr[P_μ S(P_ν)]` with explicitly built Pauli products.
fn direct_ptm(kraus: &[CMatrix<f64>], qubits: usize) -> DMatrix<f64> {
    let basis = pauli_basis::<f64>(qubits).unwrap();
    let e = basis.elements();
    DMatrix::from_fn(e.len(), e.len(), |m, n| {
        let out: CMatrix<f64> = kraus.iter().map(|k| k * &e[n] * k.adjoint()).fold(CMatrix::zeros(1 << qubits, 1 << qubits), |a, b| a + b);
        (&e[m] * out).trace().re
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_channels_are_tpcp_like(seed in any::<u64>(), qubits in 1usize..=2, env in 1usize..=4) {
        let s = channel(seed, qubits, env);
        let m = s.matrix();
        prop_assert_eq!(m[(0, 0)], 1.0);
        for j in 1..m.ncols() {
            prop_assert_eq!(m[(0, j)], 0.0);
        }
        let spec = s.spectrum().unwrap();
        for (i, p) in spec.pairing.iter().enumerate() {
            let j = p.expect("every eigenvalue has a conjugate partner");
            prop_assert!((spec.eigenvalues[i] - spec.eigenvalues[j].conj()).norm() < 1e-8);
        }
        prop_assert!(spec.spectral_radius() <= 1.0 + 1e-9);
        let report = s.validate();
        prop_assert!(report.all_ok(), "{:?}", report);
    }

    #[test]
    fn cp_implies_modulus_bound(entries in proptest::collection::vec(-1.2f64..1.2, 9)) {
        let t = DMatrix::from_row_slice(3, 3, &entries);
        let s = nalgebra::DVector::zeros(3);
        let p = Ptm::from_blocks(BasisKind::Pauli { qubits: 1 }, &s, &t).unwrap();
        let r = p.validate();
        prop_assert!(!r.cp_ok || r.modulus_ok);
    }

    #[test]
    fn unitary_spectrum_is_phase_differences(seed in any::<u64>(), qubits in 1usize..=2) {
        let d = 1usize << qubits;
        let u = haar_unitary(d, &mut stream(seed, 1));
        let (_, tri) = u.clone().schur().unpack();
        let phases: Vec<Complex<f64>> = (0..d).map(|i| tri[(i, i)]).collect();
        let mut expected: Vec<Complex<f64>> = vec![Complex::new(1.0, 0.0); d - 1];
        for j in 0..d {
            for l in 0..d {
                if j != l {
                    expected.push(phases[j] * phases[l].conj());
                }
            }
        }
        let got = unitary(&u).unwrap().spectrum().unwrap().eigenvalues;
        prop_assert_eq!(got.len(), expected.len());
        let mut used = vec![false; got.len()];
        for e in &expected {
            let j = (0..got.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| (got[a] - e).norm().total_cmp(&(got[b] - e).norm()))
                .unwrap();
            prop_assert!((got[j] - e).norm() < 1e-7, "{} vs {}", got[j], e);
            used[j] = true;
        }
    }

    #[test]
    fn trace_of_powers_matches_spectrum(seed in any::<u64>(), qubits in 1usize..=2) {
        let s = channel(seed, qubits, 2);
        let lam = s.spectrum().unwrap().eigenvalues;
        for k in [0usize, 1, 2, 7, 20, 50] {
            let p = ptm_power(&s, k);
            let tr = p.t_block().trace();
            let sum: Complex<f64> = lam.iter().map(|l| l.powu(k as u32)).sum();
            prop_assert!((tr - sum.re).abs() < 1e-8 && sum.im.abs() < 1e-8, "k={} {} vs {}", k, tr, sum);
        }
    }

    #[test]
    fn composition_is_a_homomorphism(seed in any::<u64>(), qubits in 1usize..=2) {
        let a = channel(seed, qubits, 2);
        let b = channel(seed.wrapping_add(1), qubits, 3);
        let ab = a.compose(&b).unwrap();
        prop_assert!((ab.matrix() - a.matrix() * b.matrix()).amax() < 1e-10);
        // Independent route: compose the Kraus operators themselves.
        let mut rng = stream(seed, 2);
        let d = 1usize << qubits;
        let w1 = haar_unitary(d * 2, &mut rng);
        let w2 = haar_unitary(d * 2, &mut rng);
        let k1 = spectomo::random::stinespring_kraus(&w1, d, 2).unwrap();
        let k2 = spectomo::random::stinespring_kraus(&w2, d, 2).unwrap();
        let basis = pauli_basis::<f64>(qubits).unwrap();
        let s1 = ptm_from_kraus(&k1, &basis).unwrap();
        let s2 = ptm_from_kraus(&k2, &basis).unwrap();
        let joint: Vec<CMatrix<f64>> = k1.iter().flat_map(|a| k2.iter().map(move |b| a * b)).collect();
        let direct = direct_ptm(&joint, qubits);
        prop_assert!((s1.compose(&s2).unwrap().matrix() - direct).amax() < 1e-10);
    }
}

#[test]
fn nondiagonalizable_trace_identity() {
    let s = nondiag_example(0.01_f64, 1.0, 1.0).unwrap();
    let spec = s.spectrum().unwrap();
    assert!(!spec.diagonalizable);
    for k in 0..=50 {
        let tr = ptm_power(&s, k).t_block().trace();
        let sum: f64 = spec.eigenvalues.iter().map(|l| l.powu(k as u32).re).sum();
        assert!((tr - sum).abs() < 1e-8, "k={k}: {tr} vs {sum}");
    }
}

#[test]
fn ptm_entries_match_direct_definition() {
    let mut rng = stream(77, 0);
    for qubits in 1..=2 {
        let d = 1usize << qubits;
        let w = haar_unitary(d * 3, &mut rng);
        let k = spectomo::random::stinespring_kraus(&w, d, 3).unwrap();
        let s = ptm_from_kraus(&k, &pauli_basis::<f64>(qubits).unwrap()).unwrap();
        assert!((s.matrix() - direct_ptm(&k, qubits)).amax() < 1e-12);
    }
}

#[test]
fn hermitian_helper_sees_choi_positivity() {
    let s = channel(5, 1, 3);
    let min = hermitian_eigenvalues(&s.choi().unwrap()).unwrap().into_iter().fold(f64::INFINITY, f64::min);
    assert!(min > -1e-12);
}
