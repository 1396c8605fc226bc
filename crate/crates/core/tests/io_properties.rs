use std::collections::BTreeMap;

use num_complex::Complex;
use proptest::prelude::*;
use spectomo::counts::CountsRecord;
use spectomo::io::{
    counts_from_jsonl, counts_to_jsonl, footprint_rows, ptm_from_json, ptm_to_json, signal_from_csv, signal_from_json,
    signal_to_csv, signal_to_json,
};
use spectomo::random::random_channel;
use spectomo::rng::stream;
use spectomo::signal::{SignalSource, SpectralSignal};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1.0f64..1.0, Just(0.0), Just(-0.0)]
}

proptest! {
    #[test]
    fn signal_csv_round_trips_exactly(values in proptest::collection::vec(finite(), 1..80)) {
        let text = signal_to_csv(&values).unwrap();
        prop_assert_eq!(signal_from_csv(&text).unwrap(), values.clone());
        prop_assert_eq!(signal_to_csv(&values).unwrap(), text);
    }

    #[test]
    fn signal_json_round_trips_exactly(
        values in proptest::collection::vec(finite(), 1..60),
        n_qubits in 1usize..4,
        shots in proptest::option::of(1u64..100_000),
    ) {
        let source = if shots.is_some() { SignalSource::SimulatedNoisy } else { SignalSource::SimulatedExact };
        let s = SpectralSignal::new(values, n_qubits, shots, source).unwrap();
        let text = signal_to_json(&s).unwrap();
        let back = signal_from_json(&text).unwrap();
        prop_assert_eq!(back.values(), s.values());
        prop_assert_eq!(back.n_qubits, s.n_qubits);
        prop_assert_eq!(back.n_samples, s.n_samples);
        prop_assert_eq!(signal_to_json(&back).unwrap(), text);
    }

    #[test]
    fn ptm_json_round_trips_exactly(seed in any::<u64>(), two_qubits in any::<bool>()) {
        let d = if two_qubits { 4 } else { 2 };
        let s = random_channel(d, 2, &mut stream(seed, 0)).unwrap();
        let back = ptm_from_json(&ptm_to_json(&s).unwrap()).unwrap();
        prop_assert_eq!(back.matrix(), s.matrix());
        prop_assert_eq!(back.basis(), s.basis());
    }

    #[test]
    fn counts_jsonl_round_trips(
        n_qubits in 1usize..3,
        recs in proptest::collection::vec((1usize..16, 0usize..4, 0usize..50, proptest::collection::btree_map(0usize..4, 1u64..5000, 1..4)), 1..20),
    ) {
        let dim = 1usize << n_qubits;
        let records: Vec<CountsRecord> = recs
            .into_iter()
            .map(|(p, prep, k, counts)| CountsRecord {
                pauli: 1 + (p - 1) % (dim * dim - 1),
                prep: prep % dim,
                k,
                counts: counts.into_iter().map(|(j, c)| (j % dim, c)).collect::<BTreeMap<_, _>>(),
            })
            .collect();
        let text = counts_to_jsonl(&records, n_qubits).unwrap();
        let (back, n) = counts_from_jsonl(&text).unwrap();
        prop_assert_eq!(n, n_qubits);
        prop_assert_eq!(back, records);
    }

    #[test]
    fn footprint_rows_are_polar_forms(pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0), 1..12)) {
        let e: Vec<Complex<f64>> = pts.iter().map(|p| Complex::new(p.0, p.1)).collect();
        let a: Vec<Complex<f64>> = pts.iter().map(|p| Complex::new(p.2, 0.0)).collect();
        for (row, z) in footprint_rows(&e, &a).iter().zip(&e) {
            let back = Complex::from_polar(row.modulus, row.phase_degrees.to_radians());
            prop_assert!((back - z).norm() < 1e-12);
            prop_assert!((row.modulus - z.norm()).abs() < 1e-15);
            prop_assert!(row.phase_degrees.abs() <= 180.0);
        }
    }
}

#[test]
fn malformed_inputs_report_line_numbers() {
    let err = signal_from_csv("k,g\n0,1.0\n2,0.5\n").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
    let err = counts_from_jsonl("{\"pauli\":\"X\",\"prep\":0,\"k\":0,\"counts\":{\"0\":5}}\n\nnot json\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("line 3"), "{err}");
    let err = counts_from_jsonl("{\"pauli\":\"I\",\"prep\":0,\"k\":0,\"counts\":{\"0\":5}}\n").unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
}
