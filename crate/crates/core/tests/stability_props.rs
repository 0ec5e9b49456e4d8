use std::f64::consts::PI;

use cnbs::fdcore::cn_heat_solve_from;
use cnbs::stability::{amp_cn, amp_explicit, explicit_heat_solve, sample_amplification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Discrete sine coefficient of mode `m` on the interior nodes.
fn sine_coefficient(values: &[f64], m: usize) -> f64 {
    let n = values.len() - 1;
    (1..n).map(|i| values[i] * (m as f64 * PI * i as f64 / n as f64).sin()).sum::<f64>() * 2.0 / n as f64
}

#[test]
fn cn_factor_below_one_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10_000 {
        let c = 100.0 * (1.0 - rng.random::<f64>()); // (0, 100]
        let theta = PI * (1.0 - rng.random::<f64>()); // (0, pi]
        let a = amp_cn(c, theta);
        assert!(a.abs() < 1.0, "C={c} theta={theta}: A={a}");
    }
}

#[test]
fn explicit_lower_bound_iff_half() {
    // theta = pi is the extremum: A = 1 - 4C
    for c in [0.1, 0.25, 0.4, 0.5] {
        assert!(amp_explicit(c, PI) >= -1.0);
        assert!(sample_amplification(c, 256, amp_explicit).iter().all(|s| s.a_value >= -1.0 - 1e-15));
    }
    for c in [0.5 + 1e-9, 0.51, 0.6, 1.0, 10.0] {
        assert!(amp_explicit(c, PI) < -1.0);
        assert!(sample_amplification(c, 256, amp_explicit).iter().any(|s| s.a_value < -1.0));
    }
}

#[test]
fn cn_factor_equals_one_step_fourier_ratio() {
    for m in 1..=3usize {
        for &(n_space, dt) in &[(10usize, 0.01), (16, 0.1), (25, 0.0005)] {
            let h = 1.0 / n_space as f64;
            let hist = cn_heat_solve_from(|x| (m as f64 * PI * x).sin(), n_space, 1, dt).unwrap();
            let ratio = sine_coefficient(&hist[1].values, m) / sine_coefficient(&hist[0].values, m);
            let c = dt / (h * h);
            let theta = m as f64 * PI * h;
            let a = amp_cn(c, theta);
            assert!((ratio - a).abs() <= 1e-10, "m={m} n={n_space}: {ratio} vs {a}");

            // the 4C variant does not describe a single step
            let s2 = (0.5 * theta).sin().powi(2);
            let four_c = (1.0 - 4.0 * c * s2) / (1.0 + 4.0 * c * s2);
            assert!((ratio - four_c).abs() > 1e-6);
        }
    }
}

#[test]
fn explicit_scheme_decays_below_half() {
    let hist = explicit_heat_solve(20, 200, 0.4).unwrap();
    let maxes: Vec<f64> = hist.iter().map(|g| g.max_abs()).collect();
    for w in maxes.windows(2) {
        assert!(w[1] < w[0]);
    }
    // single sine mode: each step multiplies by A(pi h)
    let a = amp_explicit(0.4, PI / 20.0);
    let predicted = maxes[0] * a.powi(200);
    assert!((maxes[200] - predicted).abs() <= 1e-9 * predicted);
}

#[test]
fn explicit_scheme_blows_up_above_half() {
    let hist = explicit_heat_solve(20, 200, 0.6).unwrap();
    let growth = hist[200].max_abs() / hist[0].max_abs();
    assert!(growth > 1e3, "growth {growth:e}");
    // the highest mode grows by at most |A(theta_max)| per step
    let bound = amp_explicit(0.6, 19.0 * PI / 20.0).abs().powi(200);
    assert!(growth < bound);
}

#[test]
fn explicit_zero_ratio_is_identity() {
    let hist = explicit_heat_solve(15, 50, 0.0).unwrap();
    assert!(hist.iter().all(|g| g.values == hist[0].values));
}
