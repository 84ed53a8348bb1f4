use thiserror::Error;

/// Errors shared across the simulator modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// M/M/1 utilization is at or above 1; the queue has no stationary regime.
    #[error("unstable queue: utilization {utilization} >= 1")]
    UnstableQueue { utilization: f64 },

    /// Not enough samples for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// All samples equal; variance-based operations are undefined.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    /// Sample moments lie outside the feasible region of the fitted family.
    #[error("moment-infeasible fit: variance {variance} >= m(1-m) = {bound}")]
    MomentInfeasible { variance: f64, bound: f64 },

    /// The feasibility-conditioning acceptance probability is too small to sample.
    #[error("degenerate scenario: feasibility acceptance probability {acceptance} < 1e-6")]
    ScenarioDegenerate { acceptance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
