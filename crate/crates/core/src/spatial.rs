//! Poisson-point-process node drops in a square region, thinned into
//! legitimate and faulty roles.

use rand::Rng;

use crate::error::{Error, Result};
use crate::randutil::poisson_count;

/// The square deployment region, `side_m` meters on a side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    side_m: f64,
}

impl Region {
    pub fn new(side_m: f64) -> Result<Self> {
        if !(side_m > 0.0) || !side_m.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "region side must be positive and finite, got {side_m}"
            )));
        }
        Ok(Self { side_m })
    }

    pub fn side_m(&self) -> f64 {
        self.side_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Legitimate,
    Faulty,
}

impl Role {
    /// CSV token, `legit` or `faulty`.
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Legitimate => "legit",
            Role::Faulty => "faulty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x_m: f64,
    pub y_m: f64,
    pub role: Role,
}

/// A realized node drop: positions plus roles, in generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    pub region: Region,
    pub nodes: Vec<Node>,
}

impl NetworkSnapshot {
    /// CSV with exact header `x,y,role`; full round-trip float rendering.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,role\n");
        for n in &self.nodes {
            out.push_str(&format!("{},{},{}\n", n.x_m, n.y_m, n.role.as_str()));
        }
        out
    }
}

/// Samples a homogeneous PPP drop over the region and thins each node into
/// the faulty role with probability `fault_prob`.
///
/// `intensity` is the expected node count for the whole region, so the
/// region side affects geometry only.
pub fn sample_snapshot<R: Rng + ?Sized>(
    intensity: f64,
    fault_prob: f64,
    region: Region,
    rng: &mut R,
) -> Result<NetworkSnapshot> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    if !(0.0..=1.0).contains(&fault_prob) {
        return Err(Error::ParameterDomain(format!(
            "fault probability must lie in [0,1], got {fault_prob}"
        )));
    }
    let count = poisson_count(rng, intensity);
    let side = region.side_m();
    let mut nodes = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let x_m = rng.random::<f64>() * side;
        let y_m = rng.random::<f64>() * side;
        let role = if rng.random::<f64>() < fault_prob {
            Role::Faulty
        } else {
            Role::Legitimate
        };
        nodes.push(Node { x_m, y_m, role });
    }
    Ok(NetworkSnapshot { region, nodes })
}

/// Total and faulty node counts of a snapshot.
pub fn snapshot_counts(snapshot: &NetworkSnapshot) -> (usize, usize) {
    let faulty = snapshot
        .nodes
        .iter()
        .filter(|n| n.role == Role::Faulty)
        .count();
    (snapshot.nodes.len(), faulty)
}
