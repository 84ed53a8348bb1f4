//! Monte Carlo pipelines gluing churn, quorum, and gossip together:
//! latency distributions under churn scenarios, dissemination curves, and
//! slot-to-millisecond conversion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::churn::sample_churn_delta;
use crate::error::{Error, Result};
use crate::gossip::{
    latency_closed_form, mean_field_trace, ConsensusLatency, GossipParams, GossipTrace,
};
use crate::randutil::{poisson_tail, truncated_poisson};

/// Arrival/departure Poisson means for one population over the window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChurnMeans {
    pub arrival: f64,
    pub departure: f64,
}

impl ChurnMeans {
    pub fn new(arrival: f64, departure: f64) -> Self {
        Self { arrival, departure }
    }

    pub fn net_mean(&self) -> f64 {
        self.arrival - self.departure
    }
}

/// One latency-distribution experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Expected baseline node count (λ_N); ignored when `fixed_n` is set.
    pub base_intensity: f64,
    /// Baseline faulty count f, fixed per experiment.
    pub base_faulty: u64,
    pub legit_churn: ChurnMeans,
    pub faulty_churn: ChurnMeans,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    /// Deterministic-N override for regression tests: skips the Poisson draw
    /// and the feasibility conditioning.
    pub fixed_n: Option<u64>,
}

impl Scenario {
    pub fn new(base_intensity: f64, base_faulty: u64, trials: u64, seed: u64) -> Self {
        Self {
            base_intensity,
            base_faulty,
            legit_churn: ChurnMeans::default(),
            faulty_churn: ChurnMeans::default(),
            epsilon: crate::gossip::DEFAULT_EPSILON,
            trials,
            seed,
            fixed_n: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ParameterDomain("trials must be >= 1".into()));
        }
        if !(self.base_intensity >= 0.0) || !self.base_intensity.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "base intensity must be nonnegative, got {}",
                self.base_intensity
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Latency(u32),
    Infeasible,
    NotConverged,
}

/// One trial of the latency Monte Carlo, replayable from its fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: u64,
    pub faulty: u64,
    pub delta_legit: i64,
    pub delta_faulty: i64,
    pub n_eff: i64,
    pub f_eff: u64,
    pub outcome: TrialOutcome,
    /// Poisson draws a rejection sampler would have spent on the
    /// feasibility conditioning.
    pub resamples: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    /// Latencies of converged trials, in trial order.
    pub latencies: Vec<u32>,
    pub infeasible_trials: u64,
    pub nonconvergent_trials: u64,
    pub per_trial_log: Vec<TrialRecord>,
}

impl ScenarioOutcome {
    pub fn converged_trials(&self) -> u64 {
        self.latencies.len() as u64
    }

    pub fn median_latency(&self) -> f64 {
        if self.latencies.is_empty() {
            return f64::NAN;
        }
        let mut xs = self.latencies.clone();
        xs.sort_unstable();
        let n = xs.len();
        if n % 2 == 1 {
            xs[n / 2] as f64
        } else {
            (xs[n / 2 - 1] as f64 + xs[n / 2] as f64) / 2.0
        }
    }

    pub fn mean_latency(&self) -> f64 {
        if self.latencies.is_empty() {
            return f64::NAN;
        }
        self.latencies.iter().map(|&t| t as f64).sum::<f64>() / self.latencies.len() as f64
    }

    /// Trial log CSV with exact header
    /// `trial,N,f,delta_N,delta_f,N_eff,f_eff,latency_slots`.
    pub fn trial_log_csv(&self) -> String {
        let mut out = String::from("trial,N,f,delta_N,delta_f,N_eff,f_eff,latency_slots\n");
        for r in &self.per_trial_log {
            let latency = match r.outcome {
                TrialOutcome::Latency(t) => t.to_string(),
                TrialOutcome::Infeasible => "infeasible".to_string(),
                TrialOutcome::NotConverged => "nonconvergent".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{latency}\n",
                r.trial, r.n, r.faulty, r.delta_legit, r.delta_faulty, r.n_eff, r.f_eff
            ));
        }
        out
    }

    /// Summary CSV with exact header
    /// `scenario,trials,converged,infeasible,nonconvergent,median_latency,mean_latency`.
    pub fn summary_csv(&self, scenario_name: &str) -> String {
        let trials =
            self.converged_trials() + self.infeasible_trials + self.nonconvergent_trials;
        format!(
            "scenario,trials,converged,infeasible,nonconvergent,median_latency,mean_latency\n\
             {scenario_name},{trials},{},{},{},{},{}\n",
            self.converged_trials(),
            self.infeasible_trials,
            self.nonconvergent_trials,
            self.median_latency(),
            self.mean_latency()
        )
    }
}

/// Per-trial effective parameters and closed-form latency.
///
/// Baseline N is Poisson(λ_N) conditioned on N >= 3f + 1; churn deltas come
/// from the count mode; effective totals N_eff = N + δ_N + δ_f and
/// f_eff = max(0, f + δ_f) feed the dissemination closed form with
/// p_eff = f_eff / N_eff.
pub fn run_latency_mc(scenario: &Scenario) -> Result<ScenarioOutcome> {
    scenario.validate()?;
    let threshold = 3 * scenario.base_faulty + 1;
    let acceptance = if scenario.fixed_n.is_some() {
        1.0
    } else {
        let p = poisson_tail(scenario.base_intensity, threshold);
        if p < 1e-6 {
            return Err(Error::ScenarioDegenerate { acceptance: p });
        }
        p
    };

    let records: Vec<Result<TrialRecord>> = (0..scenario.trials)
        .into_par_iter()
        .map(|trial| run_trial(scenario, trial, threshold, acceptance))
        .collect();

    let mut log = Vec::with_capacity(records.len());
    for r in records {
        log.push(r?);
    }

    let mut latencies = Vec::new();
    let mut infeasible = 0;
    let mut nonconvergent = 0;
    for r in &log {
        match r.outcome {
            TrialOutcome::Latency(t) => latencies.push(t),
            TrialOutcome::Infeasible => infeasible += 1,
            TrialOutcome::NotConverged => nonconvergent += 1,
        }
    }
    Ok(ScenarioOutcome {
        latencies,
        infeasible_trials: infeasible,
        nonconvergent_trials: nonconvergent,
        per_trial_log: log,
    })
}

fn run_trial(
    scenario: &Scenario,
    trial: u64,
    threshold: u64,
    acceptance: f64,
) -> Result<TrialRecord> {
    // one ChaCha stream per trial: results are identical regardless of
    // execution order or worker count
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(trial.wrapping_add(1));

    let (n, resamples) = match scenario.fixed_n {
        Some(n) => (n, 0),
        None => {
            let n = truncated_poisson(&mut rng, scenario.base_intensity, threshold, acceptance);
            // count of draws a rejection sampler would have used (geometric)
            let u: f64 = rng.random();
            let resamples = if acceptance >= 1.0 - 1e-15 {
                1
            } else {
                ((1.0 - u).ln() / (1.0 - acceptance).ln()).floor() as u64 + 1
            };
            (n, resamples)
        }
    };

    let legit = sample_churn_delta(
        scenario.legit_churn.arrival,
        scenario.legit_churn.departure,
        &mut rng,
    )?;
    let faulty = sample_churn_delta(
        scenario.faulty_churn.arrival,
        scenario.faulty_churn.departure,
        &mut rng,
    )?;

    let n_eff = n as i64 + legit.net + faulty.net;
    let f_eff = (scenario.base_faulty as i64 + faulty.net).max(0) as u64;

    let outcome = if n_eff <= f_eff as i64 || n_eff < 3 * f_eff as i64 + 1 {
        TrialOutcome::Infeasible
    } else {
        let p_eff = f_eff as f64 / n_eff as f64;
        let params = GossipParams::with_epsilon(n_eff as u64, p_eff, scenario.epsilon)?;
        match latency_closed_form(&params) {
            ConsensusLatency::Slots(t) => TrialOutcome::Latency(t),
            ConsensusLatency::NotConverged => TrialOutcome::NotConverged,
        }
    };

    Ok(TrialRecord {
        trial,
        n,
        faulty: scenario.base_faulty,
        delta_legit: legit.net,
        delta_faulty: faulty.net,
        n_eff,
        f_eff,
        outcome,
        resamples,
    })
}

/// One mean-field trace per N, each run to its own convergence slot.
pub fn dissemination_curves(
    n_values: &[u64],
    fault_prob: f64,
    epsilon: f64,
) -> Result<Vec<GossipTrace>> {
    n_values
        .iter()
        .map(|&n| Ok(mean_field_trace(&GossipParams::with_epsilon(n, fault_prob, epsilon)?)))
        .collect()
}

/// Inter-message timing profiles mapping a slot to wall-clock time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotProfile {
    Cv2x50,
    Cv2x100,
    Cv2x200,
    Dsrc100,
}

impl SlotProfile {
    pub const ALL: [SlotProfile; 4] = [
        SlotProfile::Cv2x50,
        SlotProfile::Cv2x100,
        SlotProfile::Cv2x200,
        SlotProfile::Dsrc100,
    ];

    pub fn slot_ms(&self) -> f64 {
        match self {
            SlotProfile::Cv2x50 => 50.0,
            SlotProfile::Cv2x100 => 100.0,
            SlotProfile::Cv2x200 => 200.0,
            SlotProfile::Dsrc100 => 100.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SlotProfile::Cv2x50 => "cv2x50",
            SlotProfile::Cv2x100 => "cv2x100",
            SlotProfile::Cv2x200 => "cv2x200",
            SlotProfile::Dsrc100 => "dsrc100",
        }
    }
}

impl std::str::FromStr for SlotProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cv2x50" | "cv2x_50" => Ok(SlotProfile::Cv2x50),
            "cv2x100" | "cv2x_100" => Ok(SlotProfile::Cv2x100),
            "cv2x200" | "cv2x_200" => Ok(SlotProfile::Cv2x200),
            "dsrc100" | "dsrc_100" | "dsrc" => Ok(SlotProfile::Dsrc100),
            other => Err(Error::ParameterDomain(format!(
                "unknown slot profile '{other}'"
            ))),
        }
    }
}

/// Slot count to milliseconds under the profile's inter-message period.
pub fn slots_to_ms(latency_slots: u32, profile: SlotProfile) -> f64 {
    latency_slots as f64 * profile.slot_ms()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_churn(base_intensity: f64, f: u64, trials: u64, seed: u64) -> Scenario {
        Scenario::new(base_intensity, f, trials, seed)
    }

    #[test]
    fn deterministic_mode_matches_closed_form() {
        let mut s = zero_churn(0.0, 18, 50, 3);
        s.fixed_n = Some(55);
        let out = run_latency_mc(&s).unwrap();
        let expect = latency_closed_form(
            &GossipParams::with_epsilon(55, 18.0 / 55.0, 1e-5).unwrap(),
        )
        .slots()
        .unwrap();
        assert_eq!(out.converged_trials(), 50);
        assert!(out.latencies.iter().all(|&t| t == expect));
    }

    #[test]
    fn degenerate_scenario_rejected() {
        // P[Poisson(25) >= 55] ~ 1.5e-7 < 1e-6
        let s = zero_churn(25.0, 18, 10, 1);
        assert!(matches!(
            run_latency_mc(&s),
            Err(Error::ScenarioDegenerate { .. })
        ));
    }

    #[test]
    fn accounting_and_determinism() {
        let mut s = zero_churn(25.0, 6, 2000, 11);
        s.legit_churn = ChurnMeans::new(5.0, 1.0);
        s.faulty_churn = ChurnMeans::new(1.0, 1.0);
        let a = run_latency_mc(&s).unwrap();
        let b = run_latency_mc(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trial_log_csv(), b.trial_log_csv());
        assert_eq!(
            a.converged_trials() + a.infeasible_trials + a.nonconvergent_trials,
            s.trials
        );
    }

    #[test]
    fn replay_integrity() {
        let mut s = zero_churn(25.0, 6, 1000, 5);
        s.faulty_churn = ChurnMeans::new(5.0, 1.0);
        let out = run_latency_mc(&s).unwrap();
        for r in &out.per_trial_log {
            if let TrialOutcome::Latency(t) = r.outcome {
                let params = GossipParams::with_epsilon(
                    r.n_eff as u64,
                    r.f_eff as f64 / r.n_eff as f64,
                    s.epsilon,
                )
                .unwrap();
                assert_eq!(latency_closed_form(&params), ConsensusLatency::Slots(t));
            }
        }
    }

    #[test]
    fn baseline_n_respects_conditioning() {
        let s = zero_churn(25.0, 6, 3000, 2);
        let out = run_latency_mc(&s).unwrap();
        assert!(out.per_trial_log.iter().all(|r| r.n >= 19));
        assert!(out.per_trial_log.iter().all(|r| r.resamples >= 1));
    }

    #[test]
    fn curves_shapes() {
        let traces = dissemination_curves(&[5, 45, 85, 125], 0.5, 1e-5).unwrap();
        assert_eq!(traces.len(), 4);
        let latencies: Vec<u32> = traces
            .iter()
            .map(|t| t.latency.slots().unwrap())
            .collect();
        assert!(latencies.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(latencies[0], 7);
        assert!(dissemination_curves(&[], 0.5, 1e-5).unwrap().is_empty());
    }

    #[test]
    fn slot_conversion() {
        assert_eq!(slots_to_ms(5, SlotProfile::Cv2x50), 250.0);
        assert_eq!(slots_to_ms(5, SlotProfile::Cv2x100), 500.0);
        assert_eq!(slots_to_ms(5, SlotProfile::Cv2x200), 1000.0);
        assert_eq!(slots_to_ms(5, SlotProfile::Dsrc100), 500.0);
        assert_eq!(slots_to_ms(0, SlotProfile::Cv2x200), 0.0);
    }

    #[test]
    fn summary_csv_shape() {
        let mut s = zero_churn(0.0, 0, 4, 1);
        s.fixed_n = Some(10);
        let out = run_latency_mc(&s).unwrap();
        let csv = out.summary_csv("demo");
        assert!(csv.starts_with(
            "scenario,trials,converged,infeasible,nonconvergent,median_latency,mean_latency\n"
        ));
        assert!(csv.contains("demo,4,4,0,0,0,0\n"));
    }
}
