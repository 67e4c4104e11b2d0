use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use dfs_oneway::noise::full_pd_schedule;
use dfs_oneway::protocol::{
    decode_logical, derive_byproduct_table, measure, run_transfer, LogicalQubit, MeasurementSetting,
    Policy, Probe, TransferInput, TransferSetup,
};
use dfs_oneway::qcore::sampling::haar_state;
use dfs_oneway::qcore::{hadamard, pauli_x, rz, state_fidelity, DensityMatrix};
use dfs_oneway::resource::ResourceKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALPHAS: [f64; 6] = [0.0, FRAC_PI_4, -FRAC_PI_4, FRAC_PI_2, -FRAC_PI_2, PI];

fn random_inputs(seed: u64, n: usize) -> Vec<LogicalQubit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| LogicalQubit::from_state(&haar_state(&mut rng, 1)).unwrap())
        .collect()
}

/// `H R_z(α) ρ R_z(α)† H`, optionally followed by `σ_x`.
fn expected_output(q: &LogicalQubit, alpha: f64, extra_x: bool) -> DensityMatrix {
    let mut u = &hadamard() * &rz(alpha);
    if extra_x {
        u = &pauli_x() * &u;
    }
    q.density().conjugate_by(&u)
}

fn assert_close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) {
    let f = state_fidelity(a, b).unwrap();
    assert!((1.0 - f).abs() < tol, "fidelity {f}");
}

#[test]
fn every_corrected_standard_branch_applies_h_rz() {
    for alpha in ALPHAS {
        let table = derive_byproduct_table(ResourceKind::Standard, alpha).unwrap();
        for q in random_inputs(1, 20) {
            let setup = TransferSetup::new(ResourceKind::Standard, TransferInput::Direct(q), alpha).unwrap();
            let branches = setup.branches(&setup.resource.to_density()).unwrap();
            assert_eq!(branches.len(), 2);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            let expected = expected_output(&q, alpha, false);
            for b in &branches {
                assert_close(&b.corrected_logical(ResourceKind::Standard, &table).unwrap(), &expected, 1e-10);
            }
        }
    }
}

#[test]
fn every_corrected_dfs_branch_applies_x_h_rz() {
    for alpha in ALPHAS {
        let table = derive_byproduct_table(ResourceKind::Dfs, alpha).unwrap();
        for q in random_inputs(2, 20) {
            let setup = TransferSetup::new(ResourceKind::Dfs, TransferInput::Direct(q), alpha).unwrap();
            let branches = setup.branches(&setup.resource.to_density()).unwrap();
            assert_eq!(branches.len(), 4);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            let expected = expected_output(&q, alpha, true);
            for b in &branches {
                assert_close(&b.corrected_logical(ResourceKind::Dfs, &table).unwrap(), &expected, 1e-10);
            }
        }
    }
}

#[test]
fn reference_correction_is_identity() {
    for kind in [ResourceKind::Standard, ResourceKind::Dfs] {
        for alpha in ALPHAS {
            let table = derive_byproduct_table(kind, alpha).unwrap();
            let zeros = vec![0u8; if kind == ResourceKind::Dfs { 2 } else { 1 }];
            assert_eq!(table.correction(&zeros), Some(dfs_oneway::protocol::LogicalPauli::I));
        }
    }
}

#[test]
fn probes_through_clean_resources() {
    for probe in Probe::ALL {
        let q = probe.logical();
        let std_out = run_transfer(
            ResourceKind::Standard,
            TransferInput::Probe(probe),
            0.0,
            None,
            Policy::PostselectReference,
        )
        .unwrap();
        assert_close(&std_out.logical_output, &expected_output(&q, 0.0, false), 1e-12);

        let dfs_out = run_transfer(
            ResourceKind::Dfs,
            TransferInput::Probe(probe),
            0.0,
            None,
            Policy::PostselectReference,
        )
        .unwrap();
        assert!(dfs_out.leakage < 1e-10);
        assert_close(&dfs_out.logical_output, &expected_output(&q, 0.0, true), 1e-12);

        // the measurement pattern and the direct encoding agree
        let direct = run_transfer(
            ResourceKind::Dfs,
            TransferInput::Direct(q),
            0.0,
            None,
            Policy::PostselectReference,
        )
        .unwrap();
        assert_close(&direct.logical_output, &dfs_out.logical_output, 1e-12);
    }
}

#[test]
fn dfs_equals_standard_up_to_sigma_x() {
    let x = pauli_x();
    let mut inputs: Vec<TransferInput> = Probe::ALL.iter().map(|p| TransferInput::Probe(*p)).collect();
    inputs.extend(random_inputs(3, 20).into_iter().map(TransferInput::Direct));
    for input in inputs {
        let s = run_transfer(ResourceKind::Standard, input, 0.0, None, Policy::PostselectReference).unwrap();
        let d = run_transfer(ResourceKind::Dfs, input, 0.0, None, Policy::PostselectReference).unwrap();
        assert_close(&d.logical_output, &s.logical_output.conjugate_by(&x), 1e-12);
    }
}

#[test]
fn full_symmetric_dephasing_does_not_change_dfs_output() {
    let mut inputs: Vec<TransferInput> = Probe::ALL.iter().map(|p| TransferInput::Probe(*p)).collect();
    inputs.extend(random_inputs(4, 3).into_iter().map(TransferInput::Direct));
    for alpha in ALPHAS {
        for &input in &inputs {
            let setup = TransferSetup::new(ResourceKind::Dfs, input, alpha).unwrap();
            let clean = run_transfer(ResourceKind::Dfs, input, alpha, None, Policy::PostselectReference).unwrap();
            let noisy = run_transfer(
                ResourceKind::Dfs,
                input,
                alpha,
                Some(&setup.full_pd_schedule()),
                Policy::PostselectReference,
            )
            .unwrap();
            assert!(noisy.physical_output.trace_distance(&clean.physical_output) < 1e-12);
        }
    }
}

#[test]
fn full_dephasing_collapses_standard_output() {
    let mixed = DensityMatrix::maximally_mixed(1);
    for probe in Probe::ALL {
        let schedule = full_pd_schedule(ResourceKind::Standard, &[0, 3]);
        let out = run_transfer(
            ResourceKind::Standard,
            TransferInput::Probe(probe),
            0.0,
            Some(&schedule),
            Policy::PostselectReference,
        )
        .unwrap();
        assert!(out.logical_output.trace_distance(&mixed) < 1e-12, "{probe}");
    }
}

#[test]
fn feedforward_matches_postselection_without_noise() {
    for kind in [ResourceKind::Standard, ResourceKind::Dfs] {
        for q in random_inputs(5, 20) {
            let input = TransferInput::Direct(q);
            let post = run_transfer(kind, input, 0.3, None, Policy::PostselectReference).unwrap();
            let ff = run_transfer(kind, input, 0.3, None, Policy::FeedforwardAverage).unwrap();
            assert!(ff.logical_output.trace_distance(&post.logical_output) < 1e-10);
            assert!((ff.kept_probability - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn encode_measurements_have_expected_rates() {
    // DFS: 1b computational splits the cluster evenly
    let rho = dfs_oneway::resource::build_dfs_cluster(2, None).unwrap().to_density();
    let b = measure(&rho, &MeasurementSetting::computational(1)).unwrap();
    assert!((b[0].probability - 0.5).abs() < 1e-12 && (b[1].probability - 0.5).abs() < 1e-12);
    // probe-pattern reference branches: ¼ for DFS, ⅛ for the linear cluster
    for probe in Probe::ALL {
        let d = run_transfer(ResourceKind::Dfs, TransferInput::Probe(probe), 0.0, None, Policy::PostselectReference)
            .unwrap();
        assert!((d.reference_probability - 0.25).abs() < 1e-12, "{probe}");
        let s = run_transfer(
            ResourceKind::Standard,
            TransferInput::Probe(probe),
            0.0,
            None,
            Policy::PostselectReference,
        )
        .unwrap();
        assert!((s.reference_probability - 0.125).abs() < 1e-12, "{probe}");
    }
}

#[test]
fn decode_rejects_wrong_sizes() {
    assert!(decode_logical(&DensityMatrix::maximally_mixed(1)).is_err());
    assert!(decode_logical(&DensityMatrix::maximally_mixed(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_rotates_by_alpha(seed in any::<u64>(), alpha in -PI..PI) {
        let q = random_inputs(seed, 1)[0];
        for kind in [ResourceKind::Standard, ResourceKind::Dfs] {
            let out = run_transfer(kind, TransferInput::Direct(q), alpha, None, Policy::FeedforwardAverage).unwrap();
            let expected = expected_output(&q, alpha, kind == ResourceKind::Dfs);
            let f = state_fidelity(&out.logical_output, &expected).unwrap();
            prop_assert!((1.0 - f).abs() < 1e-10);
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one(seed in any::<u64>(), alpha in -PI..PI) {
        let q = random_inputs(seed, 1)[0];
        for kind in [ResourceKind::Standard, ResourceKind::Dfs] {
            let setup = TransferSetup::new(kind, TransferInput::Direct(q), alpha).unwrap();
            let total: f64 = setup.branches(&setup.resource.to_density()).unwrap().iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }
    }
}
