use std::f64::consts::PI;

use proptest::prelude::*;
use spinclone::cloner::{clone_fidelity, BlankPolicy, FidelitySeries};
use spinclone::disorder::{disorder_ensemble, sample_offsets, DisorderSpec};
use spinclone::{BlochInput, CloneTask, Topology};

/// Blank fidelity of a 1 -> M XY star at its optimum, from the
/// one-excitation amplitudes: the hub empties and the symmetric blank mode
/// receives the input amplitude `beta` up to a phase of `-i`.
fn xy_star_oracle(m: usize, theta: f64) -> f64 {
    let (a2, b2) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
    let mf = m as f64;
    // blank reduced state: rho00 = a2 + b2 (1 - 1/M), rho11 = b2 / M, |rho01| = a b / sqrt M
    let rho00 = a2 + b2 * (1.0 - 1.0 / mf);
    let rho11 = b2 / mf;
    let coh = (a2 * b2).sqrt() / mf.sqrt();
    a2 * rho00 + b2 * rho11 + 2.0 * (a2 * b2).sqrt() * coh
}

fn star(m: usize, lambda: f64, theta: f64, phi: f64) -> CloneTask {
    CloneTask::new(Topology::Star { m }, lambda, BlochInput::new(theta, phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fidelities_are_probabilities(
        m in 2usize..5,
        lambda in -1.5..1.5f64,
        theta in 0.0..PI,
        phi in 0.0..2.0 * PI,
        b in -2.0..2.0f64,
        t in 0.0..10.0f64,
    ) {
        let f = clone_fidelity(&star(m, lambda, theta, phi), b, t).unwrap();
        prop_assert_eq!(f.per_site.len(), m);
        for v in &f.per_site {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(v));
        }
        let mean = f.per_site.iter().sum::<f64>() / m as f64;
        prop_assert!((f.mean - mean).abs() < 1e-14);
    }

    #[test]
    fn star_blanks_are_interchangeable(m in 2usize..5, theta in 0.0..PI, b in -2.0..2.0f64, t in 0.0..10.0f64) {
        let f = clone_fidelity(&star(m, 1.0, theta, 0.3), b, t).unwrap();
        for v in &f.per_site {
            prop_assert!((v - f.mean).abs() < 1e-10);
        }
    }

    #[test]
    fn excitation_conserving_dynamics_is_phase_covariant(
        lambda in -1.0..1.0f64,
        theta in 0.0..PI,
        phi in 0.0..2.0 * PI,
        b in -2.0..2.0f64,
        t in 0.0..8.0f64,
    ) {
        let a = clone_fidelity(&star(3, lambda, theta, 0.0), b, t).unwrap().mean;
        let c = clone_fidelity(&star(3, lambda, theta, phi), b, t).unwrap().mean;
        prop_assert!((a - c).abs() < 1e-10);
    }

    #[test]
    fn spectral_series_matches_direct_evolution(theta in 0.0..PI, b in -2.0..2.0f64, t in 0.0..10.0f64) {
        let task = CloneTask::new(Topology::Tree { k: 2, j: 0 }, 0.4, BlochInput::new(theta, 1.1).unwrap());
        let series = FidelitySeries::new(&task).unwrap();
        let direct = clone_fidelity(&task, b, t).unwrap().mean;
        prop_assert!((series.eval(b, t) - direct).abs() < 1e-10);
    }

    #[test]
    fn xy_star_optimum_matches_amplitude_oracle(m in 1usize..6, theta in 0.0..PI) {
        let mf = m as f64;
        let task = star(m, 0.0, theta, 0.0).with_blank_policy(BlankPolicy::Zero);
        let f = clone_fidelity(&task, mf.sqrt() / 2.0, PI / mf.sqrt()).unwrap().mean;
        prop_assert!((f - xy_star_oracle(m, theta)).abs() < 1e-10);
    }

    #[test]
    fn offsets_stay_within_amplitude(
        n in 1usize..12,
        eps in 0.0..0.5f64,
        mu in -1.0..1.0f64,
        seed in any::<u64>(),
        index in 0u64..1000,
    ) {
        let spec = DisorderSpec::new(eps, mu, 1, seed).unwrap();
        let o = sample_offsets(n, &spec, index);
        prop_assert_eq!(o.len(), n);
        prop_assert!(o.iter().all(|x| x.abs() <= eps));
        prop_assert_eq!(o, sample_offsets(n, &spec, index));
    }

    #[test]
    fn extreme_correlations_fix_the_sign_pattern(n in 2usize..12, seed in any::<u64>(), index in 0u64..100) {
        let same = sample_offsets(n, &DisorderSpec::new(0.2, 1.0, 1, seed).unwrap(), index);
        prop_assert!(same.windows(2).all(|w| w[0] * w[1] >= 0.0));
        let alt = sample_offsets(n, &DisorderSpec::new(0.2, -1.0, 1, seed).unwrap(), index);
        prop_assert!(alt.windows(2).all(|w| w[0] * w[1] <= 0.0));
        // common random numbers: magnitudes do not depend on the correlation
        for (a, b) in same.iter().zip(&alt) {
            prop_assert_eq!(a.abs(), b.abs());
        }
    }
}

#[test]
fn zero_disorder_reproduces_the_clean_network() {
    let task = star(3, 0.0, PI / 2.0, 0.0);
    let (b, t) = (3f64.sqrt() / 2.0, PI / 3f64.sqrt());
    let clean = clone_fidelity(&task, b, t).unwrap().mean;
    let report = disorder_ensemble(&task, b, t, &DisorderSpec::new(0.0, 0.3, 16, 5).unwrap()).unwrap();
    assert!((report.mean - clean).abs() < 1e-12);
    assert!(report.stderr < 1e-12);
}

#[test]
fn disorder_lowers_the_optimum_on_average() {
    let task = star(2, 0.0, PI / 2.0, 0.0);
    let (b, t) = (2f64.sqrt() / 2.0, PI / 2f64.sqrt());
    let clean = clone_fidelity(&task, b, t).unwrap().mean;
    let report = disorder_ensemble(&task, b, t, &DisorderSpec::new(0.2, 0.0, 200, 9).unwrap()).unwrap();
    assert!(report.mean < clean);
    assert!(report.trace.iter().all(|f| *f <= clean + 1e-12));
}
