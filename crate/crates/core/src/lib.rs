//! Stochastic analysis of BFT consensus feasibility and latency in a
//! vehicular network whose membership churns.
//!
//! The crate models a node population dropped as a Poisson point process
//! and thinned into legitimate/faulty roles ([`spatial`]), population churn
//! as M/M/1 arrivals and departures or independent Poisson counts
//! ([`churn`]), the mobility-adjusted quorum rule ([`quorum`]), mean-field
//! gossip dissemination with a latency closed form ([`gossip`]), Monte Carlo
//! experiment pipelines ([`experiments`]), and beta-distribution fitting of
//! latency samples ([`stats`]).

pub mod churn;
pub mod error;
pub mod experiments;
pub mod gossip;
pub mod quorum;
mod randutil;
pub mod spatial;
pub mod stats;

pub use churn::{ChurnConfig, ChurnDelta};
pub use error::{Error, Result};
pub use experiments::{ChurnMeans, Scenario, ScenarioOutcome, SlotProfile, TrialOutcome};
pub use gossip::{ConsensusLatency, GossipParams, GossipTrace, SenderPolicy};
pub use quorum::{Dispersion, QuorumInput, QuorumRequirement, QuorumSample};
pub use randutil::{ln_gamma, poisson_tail};
pub use spatial::{NetworkSnapshot, Region, Role};
pub use stats::{BetaFit, Histogram};
