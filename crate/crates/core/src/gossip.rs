//! Mean-field block dissemination, its consensus-latency closed form, and an
//! agent-based gossip engine for cross-validation.
//!
//! The uninformed fraction follows r̄_t = r̄_{t-1} · p_f^(N(1-p_f)) with
//! r̄_0 = p_f, so r̄_t = p_f^(1 + t·N(1-p_f)); latency is the first slot at
//! which r̄_t drops to the threshold ε.

use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const DEFAULT_MAX_SLOTS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GossipParams {
    pub n_total: u64,
    pub fault_prob: f64,
    pub epsilon: f64,
    pub max_slots: u32,
}

impl GossipParams {
    pub fn new(n_total: u64, fault_prob: f64) -> Result<Self> {
        Self::with_epsilon(n_total, fault_prob, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(n_total: u64, fault_prob: f64, epsilon: f64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::ParameterDomain("n_total must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&fault_prob) {
            return Err(Error::ParameterDomain(format!(
                "fault probability must lie in [0,1], got {fault_prob}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "epsilon must lie in (0,1), got {epsilon}"
            )));
        }
        Ok(Self {
            n_total,
            fault_prob,
            epsilon,
            max_slots: DEFAULT_MAX_SLOTS,
        })
    }

    /// The per-slot non-reception exponent N(1 - p_f), kept real-valued.
    pub fn sender_exponent(&self) -> f64 {
        self.n_total as f64 * (1.0 - self.fault_prob)
    }
}

/// Slots until the uninformed fraction reaches the threshold, or a marker
/// when the recurrence cannot get there (p_f = 1, or past the horizon).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsensusLatency {
    Slots(u32),
    NotConverged,
}

impl ConsensusLatency {
    pub fn slots(&self) -> Option<u32> {
        match self {
            ConsensusLatency::Slots(t) => Some(*t),
            ConsensusLatency::NotConverged => None,
        }
    }
}

/// Per-slot informed fractions r_t (t = 0, 1, ...) and the resulting latency.
#[derive(Debug, Clone, PartialEq)]
pub struct GossipTrace {
    pub informed: Vec<f64>,
    pub latency: ConsensusLatency,
}

impl GossipTrace {
    /// Trace CSV with exact header `t,r,r_bar`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,r,r_bar\n");
        for (t, r) in self.informed.iter().enumerate() {
            out.push_str(&format!("{t},{r},{}\n", 1.0 - r));
        }
        out
    }
}

/// Iterates the mean-field recurrence until the uninformed fraction falls to
/// epsilon or the slot horizon runs out.
pub fn mean_field_trace(params: &GossipParams) -> GossipTrace {
    let mut uninformed = params.fault_prob;
    let mut informed = vec![1.0 - uninformed];
    if uninformed <= params.epsilon {
        return GossipTrace {
            informed,
            latency: ConsensusLatency::Slots(0),
        };
    }
    let decay = params.fault_prob.powf(params.sender_exponent());
    for t in 1..=params.max_slots {
        uninformed *= decay;
        informed.push(1.0 - uninformed);
        if uninformed <= params.epsilon {
            return GossipTrace {
                informed,
                latency: ConsensusLatency::Slots(t),
            };
        }
    }
    GossipTrace {
        informed,
        latency: ConsensusLatency::NotConverged,
    }
}

/// Closed-form latency: 0 when p_f <= ε, otherwise
/// ceil((ln ε / ln p_f - 1) / (N(1 - p_f))), from r̄_t = p_f^(1 + t·N(1-p_f)).
pub fn latency_closed_form(params: &GossipParams) -> ConsensusLatency {
    if params.fault_prob <= params.epsilon {
        return ConsensusLatency::Slots(0);
    }
    if params.fault_prob >= 1.0 {
        return ConsensusLatency::NotConverged;
    }
    let t = ((params.epsilon.ln() / params.fault_prob.ln() - 1.0) / params.sender_exponent()).ceil();
    if t > params.max_slots as f64 {
        ConsensusLatency::NotConverged
    } else {
        ConsensusLatency::Slots(t as u32)
    }
}

/// Which nodes count as senders in the agent-based engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenderPolicy {
    /// All round(N(1-p_f)) capable nodes send every slot, matching the
    /// mean-field recurrence in expectation.
    AllCapable,
    /// Only capable nodes that already hold the block send.
    InformedOnly,
}

/// Simulates individual nodes: each starts informed with probability
/// 1 - p_f; per slot an uninformed node stays uninformed with probability
/// p_f^S where S is the sender count under the chosen policy. The capable
/// sender count is round-half-up of N(1 - p_f).
pub fn agent_based_trace<R: Rng + ?Sized>(
    params: &GossipParams,
    policy: SenderPolicy,
    rng: &mut R,
) -> GossipTrace {
    let n = params.n_total as usize;
    let capable = (params.sender_exponent() + 0.5).floor() as usize;
    let capable = capable.min(n);

    // capable nodes are the first `capable` indices; informed status is
    // drawn independently of capability
    let mut informed: Vec<bool> = (0..n)
        .map(|_| rng.random::<f64>() >= params.fault_prob)
        .collect();

    let fraction = |informed: &[bool]| informed.iter().filter(|&&b| b).count() as f64 / n as f64;

    let mut trace = vec![fraction(&informed)];
    let done = |r: f64| 1.0 - r <= params.epsilon;
    if done(trace[0]) {
        return GossipTrace {
            informed: trace,
            latency: ConsensusLatency::Slots(0),
        };
    }

    for t in 1..=params.max_slots {
        let senders = match policy {
            SenderPolicy::AllCapable => capable,
            SenderPolicy::InformedOnly => {
                informed[..capable].iter().filter(|&&b| b).count()
            }
        };
        let survival = params.fault_prob.powi(senders as i32);
        for node in informed.iter_mut() {
            if !*node && rng.random::<f64>() >= survival {
                *node = true;
            }
        }
        let r = fraction(&informed);
        trace.push(r);
        if done(r) {
            return GossipTrace {
                informed: trace,
                latency: ConsensusLatency::Slots(t),
            };
        }
    }
    GossipTrace {
        informed: trace,
        latency: ConsensusLatency::NotConverged,
    }
}
