use num_complex::Complex;
use proptest::prelude::*;
use spectomo::assign::match_eigenvalues;
use spectomo::channels::{amplitude_damping, rx, unitary};
use spectomo::pencil::{fit, PencilConfig};
use spectomo::signal::{add_shot_noise, signal_nospam};
use spectomo::spectrum::spectrum;
use spectomo::stats::{f_cdf, f_test_p_value, wild_bootstrap_ci};

proptest! {
    #[test]
    fn f_cdf_is_monotone_and_bounded(a in 0.0f64..50.0, b in 0.0f64..50.0, d1 in 1u32..60, d2 in 1u32..60) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (d1, d2) = (d1 as f64, d2 as f64);
        let (p, q) = (f_cdf(lo, d1, d2).unwrap(), f_cdf(hi, d1, d2).unwrap());
        prop_assert!(p <= q + 1e-15, "cdf({lo})={p} > cdf({hi})={q}");
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
    }

    #[test]
    fn f_test_p_value_decreases_with_improvement(
        rss_small in 0.1f64..10.0,
        frac_a in 0.01f64..1.0,
        frac_b in 0.01f64..1.0,
        n_small in 1usize..5,
    ) {
        let (better, worse) = if frac_a <= frac_b { (frac_a, frac_b) } else { (frac_b, frac_a) };
        let (ps, pb) = (4 * n_small, 4 * (n_small + 1));
        let p_better = f_test_p_value(rss_small, rss_small * better, ps, pb, 60);
        let p_worse = f_test_p_value(rss_small, rss_small * worse, ps, pb, 60);
        prop_assert!((0.0..=1.0).contains(&p_better));
        prop_assert!(p_better <= p_worse + 1e-15);
        prop_assert_eq!(f_test_p_value(rss_small, rss_small, ps, pb, 60), 1.0);
    }
}

#[test]
fn bootstrap_intervals_cover_the_truth() {
    let t = unitary(&rx(0.3_f64)).unwrap().t_block() * amplitude_damping(0.08_f64).unwrap().t_block();
    let truth = spectrum(&t).unwrap().eigenvalues;
    let k = 50;
    let exact = signal_nospam(&t, k).unwrap();
    let cfg = PencilConfig::new(k, 25, 3).unwrap();
    let experiments = 200;
    let (mut hits_re, mut hits_im, mut total_re, mut total_im) = (0, 0, 0, 0);
    for e in 0..experiments {
        let g = add_shot_noise(&exact, 1000, 10_000 + e).unwrap();
        let report = wild_bootstrap_ci(g.values(), &cfg, 200, 0.95, e).unwrap();
        let points: Vec<Complex<f64>> = report.intervals.iter().map(|c| c.point).collect();
        let m = match_eigenvalues(&truth, &points);
        for (z, &j) in truth.iter().zip(&m) {
            let ci = &report.intervals[j];
            total_re += 1;
            hits_re += usize::from(ci.re_interval[0] <= z.re && z.re <= ci.re_interval[1]);
            if z.im.abs() > 1e-12 {
                total_im += 1;
                hits_im += usize::from(ci.im_interval[0] <= z.im && z.im <= ci.im_interval[1]);
            }
        }
    }
    let cov_re = hits_re as f64 / total_re as f64;
    let cov_im = hits_im as f64 / total_im as f64;
    println!("coverage re {cov_re:.3}, im {cov_im:.3}");
    assert!(cov_re >= 0.9 && cov_im >= 0.9, "coverage re {cov_re:.3}, im {cov_im:.3}");
}

#[test]
fn rx_quarter_turn_intervals_are_narrow() {
    let t = unitary(&rx(std::f64::consts::FRAC_PI_4)).unwrap().t_block();
    let g = add_shot_noise(&signal_nospam(&t, 50).unwrap(), 8192, 17).unwrap();
    let cfg = PencilConfig::with_default_l(50, 3).unwrap();
    let point = fit(g.values(), &cfg).unwrap();
    let report = wild_bootstrap_ci(g.values(), &cfg, 500, 0.95, 3).unwrap();
    assert_eq!(report.failures, 0);
    for (ci, p) in report.intervals.iter().zip(&point.eigenvalues) {
        assert_eq!(ci.point, *p);
        let half_re = (ci.re_interval[1] - ci.re_interval[0]) / 2.0;
        let half_im = (ci.im_interval[1] - ci.im_interval[0]) / 2.0;
        assert!(half_re < 0.005 && half_im < 0.005, "{ci:?}");
    }
}
