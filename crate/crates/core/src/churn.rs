//! Arrival/departure churn for a node population: a faithful M/M/1
//! discrete-event mode and the Poisson-count shortcut used by the
//! Monte Carlo experiments.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::randutil::poisson_count;

/// M/M/1 churn parameters. The observation window opens after the warm-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChurnConfig {
    pub arrival_rate_hz: f64,
    pub service_rate_hz: f64,
    pub window_s: f64,
    pub warmup_s: f64,
}

impl ChurnConfig {
    pub fn new(arrival_rate_hz: f64, service_rate_hz: f64, window_s: f64) -> Result<Self> {
        // Burke's theorem holds at stationarity; default warm-up of 100
        // mean service times gets well past the transient.
        let cfg = Self {
            arrival_rate_hz,
            service_rate_hz,
            window_s,
            warmup_s: 100.0 / service_rate_hz,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_warmup(mut self, warmup_s: f64) -> Result<Self> {
        self.warmup_s = warmup_s;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.arrival_rate_hz >= 0.0) {
            return Err(Error::ParameterDomain(format!(
                "arrival rate must be nonnegative, got {}",
                self.arrival_rate_hz
            )));
        }
        if !(self.service_rate_hz > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "service rate must be positive, got {}",
                self.service_rate_hz
            )));
        }
        if !(self.window_s > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "window must be positive, got {}",
                self.window_s
            )));
        }
        if !(self.warmup_s >= 0.0) {
            return Err(Error::ParameterDomain(format!(
                "warmup must be nonnegative, got {}",
                self.warmup_s
            )));
        }
        Ok(())
    }

    pub fn utilization(&self) -> f64 {
        self.arrival_rate_hz / self.service_rate_hz
    }
}

/// Net population flow over a window: `net = arrivals - departures`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChurnDelta {
    pub arrivals: u64,
    pub departures: u64,
    pub net: i64,
}

impl ChurnDelta {
    pub fn new(arrivals: u64, departures: u64) -> Self {
        Self {
            arrivals,
            departures,
            net: arrivals as i64 - departures as i64,
        }
    }
}

/// Runs a single-server FIFO queue with exponential interarrival and service
/// times, discards the warm-up, and counts arrival and service-completion
/// events inside the window.
pub fn simulate_mm1_window<R: Rng + ?Sized>(config: &ChurnConfig, rng: &mut R) -> Result<ChurnDelta> {
    config.validate()?;
    if config.arrival_rate_hz == 0.0 {
        return Ok(ChurnDelta::default());
    }
    let utilization = config.utilization();
    if utilization >= 1.0 {
        return Err(Error::UnstableQueue { utilization });
    }

    let interarrival = Exp::new(config.arrival_rate_hz).expect("positive rate");
    let service = Exp::new(config.service_rate_hz).expect("positive rate");
    let window_open = config.warmup_s;
    let window_close = config.warmup_s + config.window_s;

    let mut next_arrival = interarrival.sample(rng);
    let mut next_departure = f64::INFINITY;
    let mut in_system: u64 = 0;
    let mut arrivals: u64 = 0;
    let mut departures: u64 = 0;

    loop {
        if next_arrival <= next_departure {
            let now = next_arrival;
            if now > window_close {
                break;
            }
            in_system += 1;
            if in_system == 1 {
                next_departure = now + service.sample(rng);
            }
            if now > window_open {
                arrivals += 1;
            }
            next_arrival = now + interarrival.sample(rng);
        } else {
            let now = next_departure;
            if now > window_close {
                break;
            }
            in_system -= 1;
            next_departure = if in_system > 0 {
                now + service.sample(rng)
            } else {
                f64::INFINITY
            };
            if now > window_open {
                departures += 1;
            }
        }
    }
    Ok(ChurnDelta::new(arrivals, departures))
}

/// Independent Poisson arrival and departure counts (the Lemma 1 shortcut);
/// the net is Skellam-distributed and may be negative.
pub fn sample_churn_delta<R: Rng + ?Sized>(
    arrival_mean: f64,
    departure_mean: f64,
    rng: &mut R,
) -> Result<ChurnDelta> {
    for (name, m) in [("arrival", arrival_mean), ("departure", departure_mean)] {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "{name} mean must be nonnegative, got {m}"
            )));
        }
    }
    let arrivals = poisson_count(rng, arrival_mean);
    let departures = poisson_count(rng, departure_mean);
    Ok(ChurnDelta::new(arrivals, departures))
}

/// Per-trial delta CSV: `trial,population,arrivals,departures,net`
/// with population in {legit, faulty}.
pub fn deltas_to_csv(rows: &[(u64, &str, ChurnDelta)]) -> String {
    let mut out = String::from("trial,population,arrivals,departures,net\n");
    for (trial, population, d) in rows {
        out.push_str(&format!(
            "{trial},{population},{},{},{}\n",
            d.arrivals, d.departures, d.net
        ));
    }
    out
}
