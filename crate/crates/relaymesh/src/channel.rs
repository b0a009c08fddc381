//! Network parameters, node geometry, and path loss models.
//!
//! Nodes are numbered `1..=T` as in the channel definition: node 1 transmits
//! only, node `T` receives only, and nodes `2..T-1` do both. A
//! [`RelayNetwork`] stores the transmit powers `P_1 .. P_{T-1}`, the receiver
//! noise variances `N_2 .. N_T`, and a dense `T x T` gain matrix in linear
//! units; entries that have no physical meaning (into node 1, out of node
//! `T`, the diagonal) are pinned to zero.
//!
//! Gains can be given explicitly or derived from node positions through one
//! of three path loss laws:
//!
//! ```text
//! free space   lambda = G / (4 pi f d)^2
//! simplified   lambda = kappa * d^(-eta)            (diverges at d = 0)
//! modified     lambda = kappa * (1 + d)^(-eta)      (bounded, -> SPL as d grows)
//! ```
//!
//! The exponent satisfies `eta >= 2`, with equality for free space.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Path loss
// ---------------------------------------------------------------------------

/// Distance-to-gain law, in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum PathLossModel {
    /// Free-space (Friis) law `G / (4 pi f d)^2`.
    Friis { gain: f64, frequency: f64 },
    /// Simplified power law `kappa * d^(-eta)`; invalid at `d = 0`.
    Spl { kappa: f64, eta: f64 },
    /// Modified power law `kappa * (1 + d)^(-eta)`; bounded by `kappa`.
    Mpl { kappa: f64, eta: f64 },
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PathLossModel::Friis { gain, frequency } => {
                require_positive("antenna gain", gain)?;
                require_positive("carrier frequency", frequency)
            }
            PathLossModel::Spl { kappa, eta } | PathLossModel::Mpl { kappa, eta } => {
                require_positive("kappa", kappa)?;
                if !eta.is_finite() || eta < 2.0 {
                    return Err(Error::InvalidParameter {
                        name: "eta",
                        requirement: "finite and >= 2",
                        value: eta,
                    });
                }
                Ok(())
            }
        }
    }

    /// Channel gain at distance `d >= 0`.
    ///
    /// Friis and SPL diverge as `d -> 0` and reject `d = 0`; MPL is defined
    /// everywhere and equals `kappa` at zero distance.
    pub fn gain(&self, d: f64) -> Result<f64> {
        self.validate()?;
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidParameter {
                name: "distance",
                requirement: "finite and >= 0",
                value: d,
            });
        }
        match *self {
            PathLossModel::Friis { gain, frequency } => {
                if d == 0.0 {
                    return Err(Error::DivergentGain { model: "friis" });
                }
                let denom = 4.0 * PI * frequency * d;
                Ok(gain / (denom * denom))
            }
            PathLossModel::Spl { kappa, eta } => {
                if d == 0.0 {
                    return Err(Error::DivergentGain { model: "spl" });
                }
                Ok(kappa * d.powf(-eta))
            }
            PathLossModel::Mpl { kappa, eta } => Ok(kappa * (1.0 + d).powf(-eta)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PathLossModel::Friis { .. } => "friis",
            PathLossModel::Spl { .. } => "spl",
            PathLossModel::Mpl { .. } => "mpl",
        }
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            requirement: "finite and > 0",
            value,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Node coordinates, one entry per node in node order `1..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Positions {
    /// Collinear layout: scalar coordinate per node.
    Line(Vec<f64>),
    /// Planar layout: `(x, y)` per node.
    Plane(Vec<(f64, f64)>),
}

impl Positions {
    pub fn len(&self) -> usize {
        match self {
            Positions::Line(v) => v.len(),
            Positions::Plane(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Euclidean distance between nodes at 0-based indices `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match self {
            Positions::Line(v) => (v[a] - v[b]).abs(),
            Positions::Plane(v) => {
                let (dx, dy) = (v[a].0 - v[b].0, v[a].1 - v[b].1);
                dx.hypot(dy)
            }
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            Positions::Line(v) => v.iter().all(|x| x.is_finite()),
            Positions::Plane(v) => v.iter().all(|p| p.0.is_finite() && p.1.is_finite()),
        }
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// A validated `T`-node Gaussian relay network.
///
/// Construction enforces: `T >= 2`, strictly positive finite powers and
/// noises, nonnegative finite gains, and zero gain on every meaningless
/// entry (into the source, out of the destination, the diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct RelayNetwork {
    node_count: usize,
    /// `powers[i]` is the power of node `i + 1`, nodes `1..=T-1`.
    powers: Vec<f64>,
    /// `noises[j]` is the noise variance at node `j + 2`, nodes `2..=T`.
    noises: Vec<f64>,
    /// Row-major `T x T`; `gains[(i-1)*T + (j-1)]` is the gain from node `i`
    /// to node `j` (1-based node ids).
    gains: Vec<f64>,
    /// Retained when the network was built from geometry, so sweeps can move
    /// nodes and rebuild.
    geometry: Option<(Positions, PathLossModel)>,
}

impl RelayNetwork {
    /// Builds a network from an explicit gain matrix.
    ///
    /// `gains` is `T x T` row-major with `gains[i][j]` the gain from node
    /// `i + 1` to node `j + 1`.
    pub fn new(powers: Vec<f64>, noises: Vec<f64>, gains: Vec<Vec<f64>>) -> Result<Self> {
        let t = powers.len() + 1;
        if t < 2 {
            return Err(Error::InvalidNetwork(
                "need at least a source and a destination (T >= 2)".into(),
            ));
        }
        if noises.len() != t - 1 {
            return Err(Error::InvalidNetwork(format!(
                "expected {} noise variances for T = {t}, got {}",
                t - 1,
                noises.len()
            )));
        }
        if gains.len() != t || gains.iter().any(|row| row.len() != t) {
            return Err(Error::InvalidNetwork(format!(
                "gain matrix must be {t} x {t}"
            )));
        }
        for (i, &p) in powers.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "power of node {} must be finite and > 0, got {p}",
                    i + 1
                )));
            }
        }
        for (j, &n) in noises.iter().enumerate() {
            if !n.is_finite() || n <= 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "noise at node {} must be finite and > 0, got {n}",
                    j + 2
                )));
            }
        }
        let mut flat = Vec::with_capacity(t * t);
        for (i, row) in gains.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if !g.is_finite() || g < 0.0 {
                    return Err(Error::InvalidNetwork(format!(
                        "gain {} -> {} must be finite and >= 0, got {g}",
                        i + 1,
                        j + 1
                    )));
                }
                let meaningless = j == 0 || i == t - 1 || i == j;
                if meaningless && g != 0.0 {
                    return Err(Error::InvalidNetwork(format!(
                        "gain {} -> {} must be 0: node 1 never receives, node {t} \
                         never transmits, nodes do not hear themselves",
                        i + 1,
                        j + 1
                    )));
                }
                flat.push(g);
            }
        }
        Ok(Self {
            node_count: t,
            powers,
            noises,
            gains: flat,
            geometry: None,
        })
    }

    /// Builds a network by evaluating a path loss model on node positions.
    ///
    /// Every transmitter-receiver pair must be at a distance where the model
    /// is defined, so co-located distinct nodes are rejected under Friis and
    /// SPL but fine under MPL.
    pub fn from_geometry(
        powers: Vec<f64>,
        noises: Vec<f64>,
        positions: Positions,
        model: PathLossModel,
    ) -> Result<Self> {
        model.validate()?;
        let t = powers.len() + 1;
        if positions.len() != t {
            return Err(Error::InvalidNetwork(format!(
                "expected {t} node positions, got {}",
                positions.len()
            )));
        }
        if !positions.all_finite() {
            return Err(Error::InvalidNetwork(
                "node positions must be finite".into(),
            ));
        }
        let mut gains = vec![vec![0.0; t]; t];
        for i in 0..t - 1 {
            for j in 1..t {
                if i == j {
                    continue;
                }
                gains[i][j] = model.gain(positions.distance(i, j))?;
            }
        }
        let mut net = Self::new(powers, noises, gains)?;
        net.geometry = Some((positions, model));
        Ok(net)
    }

    /// Number of nodes `T`.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Transmit power of node `i`, `1 <= i <= T-1`.
    pub fn power(&self, node: usize) -> f64 {
        assert!(
            node >= 1 && node < self.node_count,
            "node {node} has no transmit power"
        );
        self.powers[node - 1]
    }

    /// Noise variance at node `j`, `2 <= j <= T`.
    pub fn noise(&self, node: usize) -> f64 {
        assert!(
            node >= 2 && node <= self.node_count,
            "node {node} has no receiver noise"
        );
        self.noises[node - 2]
    }

    /// Gain from node `from` to node `to` (1-based ids).
    pub fn gain(&self, from: usize, to: usize) -> f64 {
        assert!(from >= 1 && from <= self.node_count && to >= 1 && to <= self.node_count);
        self.gains[(from - 1) * self.node_count + (to - 1)]
    }

    /// Relay node ids, `2..=T-1` (empty for a two-node network).
    pub fn relays(&self) -> impl Iterator<Item = usize> + Clone {
        2..self.node_count
    }

    pub fn relay_count(&self) -> usize {
        self.node_count - 2
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noises(&self) -> &[f64] {
        &self.noises
    }

    /// Gain matrix as nested rows, `T x T`.
    pub fn gain_rows(&self) -> Vec<Vec<f64>> {
        (0..self.node_count)
            .map(|i| self.gains[i * self.node_count..(i + 1) * self.node_count].to_vec())
            .collect()
    }

    /// Geometry this network was built from, if any.
    pub fn geometry(&self) -> Option<(&Positions, PathLossModel)> {
        self.geometry.as_ref().map(|(p, m)| (p, *m))
    }

    /// Copy of the network with the power of node `node` replaced.
    pub fn with_power(&self, node: usize, power: f64) -> Result<Self> {
        if node < 1 || node >= self.node_count {
            return Err(Error::InvalidNetwork(format!(
                "node {node} has no transmit power"
            )));
        }
        if !power.is_finite() || power <= 0.0 {
            return Err(Error::InvalidNetwork(format!(
                "power of node {node} must be finite and > 0, got {power}"
            )));
        }
        let mut net = self.clone();
        net.powers[node - 1] = power;
        Ok(net)
    }
}

// ---------------------------------------------------------------------------
