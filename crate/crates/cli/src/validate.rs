//! The `validate` subcommand: a fast self-check of the module invariants,
//! one pass/fail line per property.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvbft_core::churn::sample_churn_delta;
use cvbft_core::experiments::{run_latency_mc, slots_to_ms, ChurnMeans, Scenario, SlotProfile};
use cvbft_core::gossip::{latency_closed_form, mean_field_trace, GossipParams};
use cvbft_core::quorum::{required_nodes, QuorumInput};
use cvbft_core::spatial::{sample_snapshot, snapshot_counts, Region};
use cvbft_core::stats::{ks_statistic, regularized_incomplete_beta};
use cvbft_core::TrialOutcome;

pub fn run() -> bool {
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("{name}: {}", if ok { "pass" } else { "FAIL" });
        all_ok &= ok;
    };

    check(
        "quorum classic reduction (n_min = 3f+1)",
        (0..=100u64).all(|f| {
            required_nodes(QuorumInput {
                faulty: f,
                delta_legit: 0,
                delta_faulty: 0,
            })
            .n_min
                == 3 * f + 1
        }),
    );

    let grid_ok = [1u64, 5, 45, 85, 125].iter().all(|&n| {
        [0.1, 0.25, 0.5, 0.75, 0.9].iter().all(|&pf| {
            let p = GossipParams::new(n, pf).unwrap();
            mean_field_trace(&p).latency == latency_closed_form(&p)
        })
    });
    check("gossip closed form equals iteration on grid", grid_ok);

    let spot = |n, pf| {
        latency_closed_form(&GossipParams::new(n, pf).unwrap())
            .slots()
            .unwrap()
    };
    check("gossip spot latencies T(5,0.5)=7, T(5,0.25)=2", spot(5, 0.5) == 7 && spot(5, 0.25) == 2);

    let mono_ok = [0.1, 0.25, 0.5, 0.75, 0.9].iter().all(|&pf| {
        let lats: Vec<u32> = [1u64, 5, 45, 85, 125].iter().map(|&n| spot(n, pf)).collect();
        lats.windows(2).all(|w| w[1] <= w[0])
    });
    check("gossip latency nonincreasing in N", mono_ok);

    let betainc_ok = [0.0, 0.25, 0.5, 1.0]
        .iter()
        .all(|&x| (regularized_incomplete_beta(x, 1.0, 1.0).unwrap() - x).abs() <= 1e-8)
        && (regularized_incomplete_beta(0.5, 2.0, 2.0).unwrap() - 0.5).abs() <= 1e-8
        && (regularized_incomplete_beta(0.25, 2.0, 1.0).unwrap() - 0.0625).abs() <= 1e-8;
    check("incomplete beta closed forms", betainc_ok);

    let ks_ok = {
        let xs = [0.2, 0.8, 0.5, 0.3];
        let mut rev = xs;
        rev.reverse();
        (ks_statistic(&xs, 2.0, 3.0).unwrap() - ks_statistic(&rev, 2.0, 3.0).unwrap()).abs()
            < 1e-15
    };
    check("KS statistic reorder-invariant", ks_ok);

    let thinning_ok = {
        let region = Region::new(1.0).unwrap();
        let mut faulty = 0u64;
        let mut total = 0u64;
        for s in 0..2000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let snap = sample_snapshot(100.0, 0.25, region, &mut rng).unwrap();
            let (t, f) = snapshot_counts(&snap);
            total += t as u64;
            faulty += f as u64;
        }
        let frac = faulty as f64 / total as f64;
        let se = (0.25 * 0.75 / total as f64).sqrt();
        (frac - 0.25).abs() < 3.0 * se
    };
    check("PPP thinning fraction", thinning_ok);

    let skellam_ok = {
        let (a, b) = (5.0, 1.0);
        let nets: Vec<f64> = (0..5000u64)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                sample_churn_delta(a, b, &mut rng).unwrap().net as f64
            })
            .collect();
        let n = nets.len() as f64;
        let mean = nets.iter().sum::<f64>() / n;
        let var = nets.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean - (a - b)).abs() < 3.0 * ((a + b) / n).sqrt() && (var - (a + b)).abs() < 0.1 * (a + b)
    };
    check("Skellam net-count moments", skellam_ok);

    let mut scenario = Scenario::new(25.0, 6, 500, 13);
    scenario.legit_churn = ChurnMeans::new(2.0, 1.0);
    scenario.faulty_churn = ChurnMeans::new(1.0, 1.0);
    let a = run_latency_mc(&scenario).unwrap();
    let b = run_latency_mc(&scenario).unwrap();
    check("Monte Carlo seed determinism", a == b);
    check(
        "trial accounting",
        a.converged_trials() + a.infeasible_trials + a.nonconvergent_trials == scenario.trials,
    );
    let replay_ok = a.per_trial_log.iter().all(|r| match r.outcome {
        TrialOutcome::Latency(t) => {
            let p = GossipParams::with_epsilon(
                r.n_eff as u64,
                r.f_eff as f64 / r.n_eff as f64,
                scenario.epsilon,
            )
            .unwrap();
            latency_closed_form(&p).slots() == Some(t)
        }
        _ => true,
    });
    check("trial-log replay integrity", replay_ok);

    check(
        "slot-to-ms conversion",
        slots_to_ms(5, SlotProfile::Cv2x50) == 250.0
            && slots_to_ms(5, SlotProfile::Cv2x100) == 500.0
            && slots_to_ms(5, SlotProfile::Cv2x200) == 1000.0
            && slots_to_ms(5, SlotProfile::Dsrc100) == 500.0,
    );

    all_ok
}
