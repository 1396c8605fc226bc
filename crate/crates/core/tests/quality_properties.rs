use num_complex::Complex;
use proptest::prelude::*;
use spectomo::channels::unitary;
use spectomo::quality::{
    entanglement_fidelity, fidelity_upper_bound_corollary, quality_report, unitarity_of_block, xi_max,
};
use spectomo::random::{haar_unitary, random_channel};
use spectomo::rng::stream;
use spectomo::spectrum::spectrum;

fn eigs(t: &nalgebra::DMatrix<f64>) -> Vec<Complex<f64>> {
    spectrum(t).unwrap().eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qubit_bounds_contain_true_values(seed in any::<u64>(), env in 1usize..5) {
        let mut rng = stream(seed, 0);
        let s = random_channel(2, env, &mut rng).unwrap();
        let u = unitary(&haar_unitary(2, &mut rng)).unwrap();
        let (ts, tu) = (s.t_block(), u.t_block());
        let r = quality_report(&eigs(&ts), &eigs(&tu), 2).unwrap();
        let f = entanglement_fidelity(&ts, &tu);
        let unit = unitarity_of_block(&ts);
        prop_assert!(f <= r.f_ent_upper + 1e-7, "F={f} bound={}", r.f_ent_upper);
        prop_assert!(unit >= r.u_lower - 1e-9, "u={unit} lower={}", r.u_lower);
        prop_assert!(unit <= r.u_upper + 1e-6, "u={unit} upper={}", r.u_upper);
        prop_assert!(r.f_ent_upper <= r.f_ent_upper_corollary + 1e-12);
    }

    #[test]
    fn report_fields_stay_in_range(seed in any::<u64>(), env in 1usize..4, two_qubits in any::<bool>()) {
        let d = if two_qubits { 4 } else { 2 };
        let mut rng = stream(seed, 1);
        let s = random_channel(d, env, &mut rng).unwrap();
        let u = unitary(&haar_unitary(d, &mut rng)).unwrap();
        let r = quality_report(&eigs(&s.t_block()), &eigs(&u.t_block()), d).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&r.xi_max));
        prop_assert!(r.u_lower <= r.u_upper + 1e-9);
        for v in [r.f_ent_upper, r.f_avg_upper, r.f_ent_upper_corollary, r.u_lower, r.u_upper] {
            prop_assert!((0.0..=1.0 + 1e-9).contains(&v), "{v} in {r:?}");
        }
        if let Some(lo) = r.u_upper_min {
            prop_assert!(lo <= r.u_upper + 1e-9);
        }
        prop_assert_eq!(r.xi_exact, d == 2);
    }

    #[test]
    fn corollary_is_invariant_under_relabeling(seed in any::<u64>(), shift in 0usize..3) {
        let mut rng = stream(seed, 2);
        let s = random_channel(2, 2, &mut rng).unwrap();
        let u = unitary(&haar_unitary(2, &mut rng)).unwrap();
        let a = eigs(&s.t_block());
        let ideal = eigs(&u.t_block());
        let mut b = a.clone();
        b.rotate_left(shift);
        let x = fidelity_upper_bound_corollary(&a, &ideal, 2).unwrap();
        let y = fidelity_upper_bound_corollary(&b, &ideal, 2).unwrap();
        prop_assert!((x.value - y.value).abs() < 1e-12);
        let conj: Vec<Complex<f64>> = a.iter().map(|z| z.conj()).collect();
        let ideal_conj: Vec<Complex<f64>> = ideal.iter().map(|z| z.conj()).collect();
        let xa = xi_max(&a, &ideal).unwrap().value;
        let xc = xi_max(&conj, &ideal_conj).unwrap().value;
        prop_assert!((xa - xc).abs() < 1e-12);
    }
}

#[test]
fn bounds_are_tight_for_the_target_itself() {
    let mut rng = stream(99, 0);
    for _ in 0..20 {
        let u = unitary(&haar_unitary(2, &mut rng)).unwrap();
        let e = eigs(&u.t_block());
        let r = quality_report(&e, &e, 2).unwrap();
        assert!((r.f_ent_upper - 1.0).abs() < 1e-7, "{r:?}");
        assert!((r.u_lower - 1.0).abs() < 1e-9);
    }
}
