//! Achievable rates and cut-set bounds for Gaussian multiple-relay networks.
//!
//! A network has `T` nodes on a shared Gaussian channel: node 1 is the source,
//! node `T` the destination, and nodes `2..T-1` are relays. Each receiver sees
//!
//! ```text
//! Y_j = sum_i sqrt(lambda_ij) X_i + Z_j,   Z_j ~ N(0, N_j)
//! ```
//!
//! with per-node power constraints `E[X_i^2] <= P_i` and link gains
//! `lambda_ij >= 0`. Everything downstream is a deterministic function of
//! those parameters; all rates are in bits per channel use unless converted
//! at an output boundary.
//!
//! Module map:
//!
//! * [`channel`] - network parameters, geometry, and path loss models.
//! * [`gaussian`] - covariance matrices, log-determinants, and the
//!   broadcast-cut mutual information quantities.
//! * [`rates`] - closed-form single-relay (`T = 3`) strategy rates.
//! * [`cf`] - the general compress-and-forward machinery: quantization-noise
//!   constraints over set partitions and the iterative profile optimizer.
//! * [`optim`] - scalar search primitives (golden section, bisection) and
//!   set-partition enumeration.
//! * [`experiment`] - parameter sweeps, asymptotic probes, and power
//!   thresholds with deterministic CSV output.
//! * [`verify`] - seeded randomized invariant suites.
//! * [`config`] - JSON configuration parsing shared by the CLI and tests.

pub mod cf;
pub mod channel;
pub mod config;
pub mod experiment;
pub mod gaussian;
pub mod optim;
pub mod rates;
pub mod verify;

pub use cf::{
    cf_constraints_check, cf_rate_given_q, enumerate_constraints, lambda_det, optimize_cf_q,
    psi_det, ConstraintCheck, ConstraintInstance, ConstraintMode, QuantizationProfile,
};
pub use channel::{PathLossModel, Positions, RelayNetwork};
pub use gaussian::{
    broadcast_cut_capacity, broadcast_mi_t3, broadcast_mi_t4_beta, log_det2, CovarianceMatrix,
};
pub use rates::{
    cf_single_relay, cutset_single_relay, df_single_relay, l_of, multihop_tdma, Binding,
    RateResult, StrategyKind,
};

use thiserror::Error;

/// Errors for every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter violated its domain (sign, range, finiteness).
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// Free-space and simplified path loss have no finite gain at d = 0.
    #[error("path loss gain diverges at d = 0 under the {model} model")]
    DivergentGain { model: &'static str },
    /// Network-level validation failure (dimensions, sign, structure).
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    /// An operation got a network of the wrong size.
    #[error("operation requires T = {expected} nodes, network has {actual}")]
    WrongNodeCount { expected: usize, actual: usize },
    /// Matrix input was not symmetric.
    #[error("matrix not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {delta:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },
    /// Matrix input was not positive definite.
    #[error("matrix not positive definite: pivot {pivot:e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    /// Relay-set enumeration would explode combinatorially.
    #[error("relay count {count} exceeds the enumeration cap {cap}")]
    EnumerationCap { count: usize, cap: usize },
    /// Set-partition enumeration above the hard size cap.
    #[error("set partition size {n} exceeds the cap {cap}")]
    PartitionCap { n: usize, cap: usize },
    /// A bracketed search found no feasible point.
    #[error("no feasible value in [{lo:e}, {hi:e}]")]
    Infeasible { lo: f64, hi: f64 },
    /// An objective produced NaN, so the search result would be meaningless.
    #[error("objective returned NaN at argument {arg}")]
    NanObjective { arg: f64 },
    /// A quantization-noise profile cannot be made feasible at any finite Q.
    #[error("no finite quantization profile is feasible: {0}")]
    InfeasibleProfile(String),
    /// Power threshold search hit its ceiling before reaching the target.
    #[error(
        "target fraction {target} unreachable below P2 = {ceiling:e} \
         (achieved {achieved} at the ceiling)"
    )]
    TargetUnreachable {
        target: f64,
        ceiling: f64,
        achieved: f64,
    },
    /// Sweep definition rejected before evaluation.
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    /// Unknown asymptotic-probe case identifier.
    #[error("unknown probe case `{0}` (expected 1a, 1b, 1c, 2..6 for SPL or 7, 8 for MPL)")]
    UnknownCase(String),
    /// Probe called with a path loss family that contradicts the case.
    #[error("probe case {case} requires the {required} model")]
    WrongModelFamily {
        case: &'static str,
        required: &'static str,
    },
    /// Configuration file errors (I/O, JSON shape, cross-field checks).
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Largest relay set the constraint enumeration accepts by default.
///
/// Instances grow like Bell numbers times routing choices; 8 relays is the
/// last size where a full forall-check stays interactive.
pub const DEFAULT_RELAY_CAP: usize = 8;
