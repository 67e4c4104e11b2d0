use std::collections::BTreeMap;
use std::time::Instant;

use dfs_oneway::noise::{full_pd_schedule, NoiseSchedule};
use dfs_oneway::protocol::Probe;
use dfs_oneway::qcore::sampling::{haar_state, random_channel};
use dfs_oneway::qcore::{state_fidelity, DensityMatrix, KrausChannel};
use dfs_oneway::resource::{build_dfs_cluster, ResourceKind};
use dfs_oneway::tomography::{
    kraus_from_chi, linear_inversion_state, mle_state, process_fidelity, qpt_chi, rounded_dataset,
    settings_overcomplete, simulate_counts, ChiMatrix, FidelityConvention, MleOptions, Slicing,
    TomographyDataset,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn monotone(history: &[f64]) -> bool {
    history.windows(2).all(|w| w[1] >= w[0])
}

fn singlet() -> DensityMatrix {
    dfs_oneway::resource::singlet_pair().to_density()
}

#[test]
fn mle_on_rounded_singlet_data() {
    let d = rounded_dataset(&singlet(), &settings_overcomplete(2).unwrap(), 1e6).unwrap();
    let out = mle_state(&d, &MleOptions::default()).unwrap();
    assert!(monotone(&out.diagnostics.log_likelihood));
    assert!(state_fidelity(&out.state, &singlet()).unwrap() >= 0.9999);
}

#[test]
fn mle_on_rounded_four_qubit_dfs_data() {
    let rho = build_dfs_cluster(2, None).unwrap().to_density();
    let d = rounded_dataset(&rho, &settings_overcomplete(4).unwrap(), 1e6).unwrap();
    assert_eq!(d.records.len(), 1296);
    let start = Instant::now();
    let out = mle_state(&d, &MleOptions::default()).unwrap();
    let f = state_fidelity(&out.state, &rho).unwrap();
    assert!(monotone(&out.diagnostics.log_likelihood));
    assert!(
        f >= 0.999,
        "fidelity {f} after {} iterations in {:?}",
        out.diagnostics.iterations,
        start.elapsed()
    );
}

#[test]
fn mle_of_maximally_mixed_counts() {
    let mixed = DensityMatrix::maximally_mixed(1);
    let d = simulate_counts(&mixed, &settings_overcomplete(1).unwrap(), 1e4, 42, Slicing::ExactChannel, None)
        .unwrap();
    let out = mle_state(&d, &MleOptions::default()).unwrap();
    assert!(monotone(&out.diagnostics.log_likelihood));
    assert!(out.state.trace_distance(&mixed) <= 0.01);
}

#[test]
fn mle_is_consistent_on_random_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let settings = settings_overcomplete(2).unwrap();
    for i in 0..10 {
        let rho = haar_state(&mut rng, 2).to_density();
        for (mean, bound) in [(1e4, 0.99), (1e6, 0.999)] {
            let d = simulate_counts(&rho, &settings, mean, 42 + i, Slicing::ExactChannel, None).unwrap();
            let out = mle_state(&d, &MleOptions::default()).unwrap();
            assert!(monotone(&out.diagnostics.log_likelihood));
            let f = state_fidelity(&out.state, &rho).unwrap();
            assert!(f >= bound, "state {i} mean {mean}: fidelity {f}");
        }
    }
}

#[test]
fn linear_inversion_on_finite_counts_is_hermitian_with_unit_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rho = haar_state(&mut rng, 2).to_density();
    let d = simulate_counts(&rho, &settings_overcomplete(2).unwrap(), 100.0, 9, Slicing::ExactChannel, None).unwrap();
    let m = linear_inversion_state(&d).unwrap();
    assert!(m.hermiticity_error() < 1e-12);
    assert!((m.trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn slicing_preserves_expected_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let settings = settings_overcomplete(4).unwrap();
    let cases: [(NoiseSchedule, DensityMatrix); 2] = [
        (full_pd_schedule(ResourceKind::Dfs, &[0, 2]), haar_state(&mut rng, 4).to_density()),
        (full_pd_schedule(ResourceKind::Standard, &[0, 3]), haar_state(&mut rng, 4).to_density()),
    ];
    for (schedule, rho) in &cases {
        let exact = simulate_counts(rho, &settings, f64::INFINITY, 0, Slicing::ExactChannel, Some(schedule)).unwrap();
        let sliced = simulate_counts(rho, &settings, f64::INFINITY, 0, Slicing::QuarterSlices, Some(schedule)).unwrap();
        for (a, b) in exact.records.iter().zip(&sliced.records) {
            assert_eq!(a.setting, b.setting);
            assert!((a.count - b.count).abs() < 1e-12);
        }
    }
}

/// Two-sample statistic `Σ (a−b)²/(a+b)` over settings with any counts,
/// pooled over seeds, against the χ² quantile at the 0.001 level.
#[test]
fn sliced_and_exact_counts_are_statistically_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = haar_state(&mut rng, 2).to_density();
    let schedule = full_pd_schedule(ResourceKind::Standard, &[0, 1]);
    let settings = settings_overcomplete(2).unwrap();
    let mut stat = 0.0;
    let mut dof = 0usize;
    for seed in 0..100u64 {
        let a = simulate_counts(&rho, &settings, 1000.0, seed, Slicing::ExactChannel, Some(&schedule)).unwrap();
        let b = simulate_counts(&rho, &settings, 1000.0, seed + 10_000, Slicing::QuarterSlices, Some(&schedule))
            .unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            let s = x.count + y.count;
            if s > 0.0 {
                stat += (x.count - y.count).powi(2) / s;
                dof += 1;
            }
        }
    }
    let critical = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < critical, "statistic {stat} exceeds {critical} at {dof} dof");
}

#[test]
fn qpt_roundtrip_on_random_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let ch = random_channel(&mut rng, 2, 1 + i % 4);
        let outputs: BTreeMap<Probe, DensityMatrix> = Probe::ALL
            .iter()
            .map(|p| (*p, ch.apply(&p.logical().density()).unwrap()))
            .collect();
        let r = qpt_chi(&outputs).unwrap();
        assert!(!r.cp_flag);
        let k = kraus_from_chi(&r.chi).unwrap();
        assert!(k.completeness_deviation() < 1e-8);
        for _ in 0..20 {
            let rho = haar_state(&mut rng, 1).to_density();
            let d = k.apply(&rho).unwrap().trace_distance(&ch.apply(&rho).unwrap());
            assert!(d <= 1e-6, "channel {i}: trace distance {d}");
        }
    }
}

#[test]
fn dataset_json_roundtrip_keeps_reconstruction() {
    let d = simulate_counts(&singlet(), &settings_overcomplete(2).unwrap(), 500.0, 7, Slicing::ExactChannel, None)
        .unwrap();
    let text = serde_json::to_string(&d).unwrap();
    let back = TomographyDataset::from_json(&text).unwrap();
    let a = mle_state(&d, &MleOptions::default()).unwrap();
    let b = mle_state(&back, &MleOptions::default()).unwrap();
    assert_eq!(a.state, b.state);
}

#[test]
fn pure_state_oracle_for_process_fidelity() {
    // Choi of a unitary is pure: fidelity with the depolarizing Choi I/4 is ½
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dep = ChiMatrix::from_channel(&KrausChannel::fully_depolarizing()).unwrap();
    for _ in 0..10 {
        let u = dfs_oneway::qcore::sampling::haar_unitary(&mut rng, 2);
        let chi = ChiMatrix::from_channel(&KrausChannel::unitary(u).unwrap()).unwrap();
        let f = process_fidelity(&chi, &dep, FidelityConvention::Sqrt).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn process_fidelity_is_symmetric(seed in any::<u64>(), ka in 1usize..5, kb in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ChiMatrix::from_channel(&random_channel(&mut rng, 2, ka)).unwrap();
        let b = ChiMatrix::from_channel(&random_channel(&mut rng, 2, kb)).unwrap();
        for conv in [FidelityConvention::Sqrt, FidelityConvention::Squared] {
            let ab = process_fidelity(&a, &b, conv).unwrap();
            let ba = process_fidelity(&b, &a, conv).unwrap();
            prop_assert!((ab - ba).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((process_fidelity(&a, &a, conv).unwrap() - 1.0).abs() < 1e-8);
            if (ab - 1.0).abs() < 1e-12 {
                prop_assert!(a.choi().max_abs_diff(&b.choi()) < 1e-8);
            }
        }
    }

    #[test]
    fn chi_from_channel_is_valid(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chi = ChiMatrix::from_channel(&random_channel(&mut rng, 2, k)).unwrap();
        prop_assert!((chi.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(chi.matrix().hermitian_eigenvalues()[0] > -1e-10);
    }
}
