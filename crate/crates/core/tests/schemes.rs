use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xdof::channel::{sample_network, NetworkConfig};
use xdof::misox::{misox_config, misox_trial};
use xdof::ria::{self, plan_ria, ria_trial_with_plan, RiaPayload};
use xdof::scheme::Transcript;
use xdof::stia2::{stia_case, stia_trial, DEFAULT_TIMING};

#[test]
fn ria_ratio_precoders_per_phase() {
    for k in 2..=5 {
        let plan = plan_ria(k, 8, 2).unwrap();
        let net = NetworkConfig::symmetric(k, k, 1, 1, 8, 2, 21);
        let process = sample_network(net, plan.blocks_needed()).unwrap();
        let payload = RiaPayload::random(&mut ChaCha8Rng::seed_from_u64(21), k);
        let tr = ria::run_ria(&plan, &process, &payload).unwrap();
        for j in 0..k {
            let in_phase: Vec<_> = tr.precoders.iter().filter(|r| r.stream == j).collect();
            assert_eq!(in_phase.len(), (k - 1) * (k - 1), "K={k} phase {j}");
            for p in (0..k).filter(|&p| p != j) {
                assert_eq!(in_phase.iter().filter(|r| r.tx == p).count(), k - 1);
            }
            assert!(in_phase.iter().all(|r| r.tx != j));
        }
        assert_eq!(tr.side_info.len(), k * (k - 1));
    }
}

#[test]
fn ria_phase_order_does_not_matter() {
    let plan = plan_ria(3, 8, 2).unwrap();
    for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0], [2, 1, 0]] {
        let permuted = plan.permute_phases(&order).unwrap();
        for t in 0..20 {
            let o = ria_trial_with_plan(&permuted, 8, t).unwrap();
            assert!(o.success(), "order {order:?} trial {t}");
            assert_eq!(Rational64::new(o.symbols as i64, o.slots as i64), Rational64::new(5, 4));
        }
    }
    assert!(plan.permute_phases(&[0, 0, 1]).is_err());
}

#[test]
fn trials_are_reproducible() {
    let cfg = stia_case(5, 2).unwrap();
    assert_eq!(stia_trial(&cfg, DEFAULT_TIMING, 3, 4).unwrap(), stia_trial(&cfg, DEFAULT_TIMING, 3, 4).unwrap());
    assert_ne!(stia_trial(&cfg, DEFAULT_TIMING, 3, 4).unwrap(), stia_trial(&cfg, DEFAULT_TIMING, 3, 5).unwrap());
    let m = misox_config(2, 3).unwrap();
    assert_eq!(misox_trial(&m, (12, 5), 1, 0).unwrap(), misox_trial(&m, (12, 5), 1, 0).unwrap());
}

#[test]
fn longer_feedback_delay_still_decodes() {
    for (tc, tfb) in [(3, 2), (10, 9), (20, 1)] {
        let cfg = stia_case(5, 3).unwrap();
        assert!(stia_trial(&cfg, (tc, tfb), 1, 0).unwrap().success());
        let plan = plan_ria(4, tc, tfb).unwrap();
        assert!(ria_trial_with_plan(&plan, 1, 0).unwrap().success());
        let m = misox_config(3, 3).unwrap();
        assert!(misox_trial(&m, (tc, tfb), 1, 0).unwrap().success());
    }
}

#[test]
fn transcript_round_trips_through_json() {
    let plan = plan_ria(3, 8, 2).unwrap();
    let net = NetworkConfig::symmetric(3, 3, 1, 1, 8, 2, 4);
    let process = sample_network(net, plan.blocks_needed()).unwrap();
    let payload = RiaPayload::random(&mut ChaCha8Rng::seed_from_u64(4), 3);
    let tr = ria::run_ria(&plan, &process, &payload).unwrap();
    let back: Transcript = serde_json::from_str(&tr.to_json()).unwrap();
    assert_eq!(back, tr);
}

#[test]
fn misox_ratios_follow_the_plateau_formula() {
    for (m, n) in [(2, 3), (3, 3), (2, 4), (4, 3)] {
        let cfg = misox_config(m, n).unwrap();
        let (mi, ni) = (m as i64, n as i64);
        let expected = Rational64::new(mi * ni * (ni - 1), mi * (ni - 1) + 1);
        for t in 0..10 {
            let o = misox_trial(&cfg, (8, 2), 2, t).unwrap();
            assert!(o.success());
            assert_eq!(Rational64::new(o.symbols as i64, o.slots as i64), expected, "({m},{n})");
        }
    }
    assert_eq!(xdof::dof::theorem3_region(2, 4, Rational64::from_integer(0)).unwrap().dof, Rational64::new(24, 7));
}
