//! Closed-form achievable rates and the cut-set bound for one relay.
//!
//! All four quantities below are for the three-node network (source 1,
//! relay 2, destination 3) and use `L(x) = 1/2 log2(1 + x)`:
//!
//! ```text
//! cut set   max_a min{ L((P1 l13/N3 + P1 l12/N2)(1-a)),
//!                      L((P1 l13 + P2 l23 + 2 sqrt(a l13 l23 P1 P2)) / N3) }
//! DF        max_a min{ L(P1 l12 (1-a) / N2),  same second term }
//! CF        L(P1 l13/N3 + P1 l12/(N2 + Q)),
//!             Q = ((l13 N2 + l12 N3) P1 + N2 N3) / (P2 l23)
//! multihop  max_a min{ (1-a) L(P1 l12 / ((1-a) N2)),  a L(P2 l23 / (a N3)) }
//! ```
//!
//! In the CF compression noise `Q`, the observation SNR term carries the
//! source power `P1`: that is what the Wyner-Ziv balance for the relay's
//! quantized observation yields. A transcription that puts `P2` in that
//! numerator circulates as well; it is dimensionally plausible but does not
//! follow from the derivation, and the two disagree whenever `P1 != P2`.
//!
//! The searches over the time-sharing/correlation fraction `a` run on
//! `[0, 1]`; the objectives are minima of one nonincreasing and one
//! nondecreasing term, hence quasi-concave. Ties resolve to the smallest
//! `a`, so degenerate networks (a dead link making one term constant)
//! report `a = 0`.

use serde::Serialize;

use crate::optim::{golden_max, SearchSpec};
use crate::{Error, RelayNetwork, Result};

/// Relative tolerance under which the two min-terms count as balanced.
const BINDING_TOL: f64 = 1e-9;

/// `L(x) = 1/2 log2(1 + x)`, the Gaussian rate of an SNR.
pub fn l_of(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter {
            name: "snr",
            requirement: ">= 0",
            value: x,
        });
    }
    Ok(0.5 * (1.0 + x).log2())
}

// ---------------------------------------------------------------------------
// Result types
// ---------------------------------------------------------------------------

/// Which relaying strategy (or bound) a rate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    CutSet,
    DecodeForward,
    CompressForward,
    /// Compress-and-forward through the general quantization-noise
    /// constraint machinery (any relay count).
    CompressForwardGeneral,
    MultihopTdma,
    /// Broadcast-cut capacity, the unbounded-relay-power reference.
    BroadcastCut,
}

impl StrategyKind {
    /// Short tag used in CSV columns and CLI strategy lists.
    pub fn tag(self) -> &'static str {
        match self {
            StrategyKind::CutSet => "CS",
            StrategyKind::DecodeForward => "DF",
            StrategyKind::CompressForward => "CF",
            StrategyKind::CompressForwardGeneral => "CF_T2",
            StrategyKind::MultihopTdma => "MH",
            StrategyKind::BroadcastCut => "Cinf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cs" => Ok(StrategyKind::CutSet),
            "df" => Ok(StrategyKind::DecodeForward),
            "cf" => Ok(StrategyKind::CompressForward),
            "cf_t2" => Ok(StrategyKind::CompressForwardGeneral),
            "mh" => Ok(StrategyKind::MultihopTdma),
            "cinf" => Ok(StrategyKind::BroadcastCut),
            _ => Err(Error::Config(format!(
                "unknown strategy `{s}` (expected CS, DF, CF, CF_T2, MH, or Cinf)"
            ))),
        }
    }

    /// All strategies in canonical output order.
    pub fn all() -> [StrategyKind; 6] {
        [
            StrategyKind::CutSet,
            StrategyKind::DecodeForward,
            StrategyKind::CompressForward,
            StrategyKind::CompressForwardGeneral,
            StrategyKind::MultihopTdma,
            StrategyKind::BroadcastCut,
        ]
    }
}

/// Which term of a min (or which constraint) determined the rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// No minimum was involved (single-expression rates).
    None,
    /// The source-side (broadcast) term was strictly smaller.
    BroadcastTerm,
    /// The destination-side (multiple-access) term was strictly smaller.
    MacTerm,
    /// Both terms agree at the optimum within tolerance.
    Balanced,
    /// Multihop: the source-to-relay hop limited the rate.
    SourceHop,
    /// Multihop: the relay-to-destination hop limited the rate.
    RelayHop,
    /// The named quantization-noise constraint was tight (smallest slack).
    Constraint { instance: String, slack: f64 },
}

/// A computed rate plus the optimizer state that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    pub strategy: StrategyKind,
    /// Bits per channel use.
    pub rate: f64,
    /// Time-sharing / correlation fraction, for the strategies that have one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Quantization noise per relay (node order `2..=T-1`), when applicable.
    /// `+inf` means the relay's observation is discarded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    pub binding: Binding,
    /// False only when an iterative optimizer stopped on its sweep cap.
    pub converged: bool,
}

impl RateResult {
    fn simple(strategy: StrategyKind, rate: f64) -> Self {
        RateResult {
            strategy,
            rate,
            alpha: None,
            q: None,
            binding: Binding::None,
            converged: true,
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

struct SingleRelay {
    p1: f64,
    p2: f64,
    n2: f64,
    n3: f64,
    l12: f64,
    l13: f64,
    l23: f64,
}

fn single_relay(net: &RelayNetwork) -> Result<SingleRelay> {
    if net.node_count() != 3 {
        return Err(Error::WrongNodeCount {
            expected: 3,
            actual: net.node_count(),
        });
    }
    Ok(SingleRelay {
        p1: net.power(1),
        p2: net.power(2),
        n2: net.noise(2),
        n3: net.noise(3),
        l12: net.gain(1, 2),
        l13: net.gain(1, 3),
        l23: net.gain(2, 3),
    })
}

impl SingleRelay {
    /// Multiple-access term of the cut-set and DF rates.
    fn mac_term(&self, alpha: f64) -> f64 {
        let coherent = 2.0 * (alpha * self.l13 * self.l23 * self.p1 * self.p2).sqrt();
        let snr = (self.p1 * self.l13 + self.p2 * self.l23 + coherent) / self.n3;
        0.5 * (1.0 + snr).log2()
    }
}

/// Maximizes `min(first(a), second(a))` over `a` in `[0, 1]` and classifies
/// which term binds at the optimum.
fn max_min_over_alpha<F, G>(
    strategy: StrategyKind,
    first: F,
    second: G,
    low_label: Binding,
    high_label: Binding,
) -> Result<RateResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let spec = SearchSpec::unit_alpha();
    let best = golden_max(spec, |a| first(a).min(second(a)))?;
    let (f, g) = (first(best.arg), second(best.arg));
    let binding = if (f - g).abs() <= BINDING_TOL * f.abs().max(g.abs()).max(1.0) {
        Binding::Balanced
    } else if f < g {
        low_label
    } else {
        high_label
    };
    Ok(RateResult {
        strategy,
        rate: best.value,
        alpha: Some(best.arg),
        q: None,
        binding,
        converged: true,
    })
}

// ---------------------------------------------------------------------------
// The four single-relay quantities
// ---------------------------------------------------------------------------

/// Cut-set upper bound for the three-node network.
pub fn cutset_single_relay(net: &RelayNetwork) -> Result<RateResult> {
    let sr = single_relay(net)?;
    let broadcast_snr = sr.p1 * sr.l13 / sr.n3 + sr.p1 * sr.l12 / sr.n2;
    max_min_over_alpha(
        StrategyKind::CutSet,
        move |a| 0.5 * (1.0 + broadcast_snr * (1.0 - a)).log2(),
        move |a| sr.mac_term(a),
        Binding::BroadcastTerm,
        Binding::MacTerm,
    )
}

/// Decode-and-forward rate: the relay must decode, so the source-side term
/// sees only the source-to-relay link.
pub fn df_single_relay(net: &RelayNetwork) -> Result<RateResult> {
    let sr = single_relay(net)?;
    let relay_snr = sr.p1 * sr.l12 / sr.n2;
    max_min_over_alpha(
        StrategyKind::DecodeForward,
        move |a| 0.5 * (1.0 + relay_snr * (1.0 - a)).log2(),
        move |a| sr.mac_term(a),
        Binding::BroadcastTerm,
        Binding::MacTerm,
    )
}

/// Compress-and-forward rate with the closed-form quantization noise.
///
/// A dead relay-to-destination link (`l23 = 0`) forces infinite compression
/// noise: the relay's observation is useless and the rate degrades to the
/// direct link alone.
pub fn cf_single_relay(net: &RelayNetwork) -> Result<RateResult> {
    let sr = single_relay(net)?;
    let direct = sr.p1 * sr.l13 / sr.n3;
    let (q, rate) = if sr.l23 == 0.0 {
        (f64::INFINITY, l_of(direct)?)
    } else {
        let q = ((sr.l13 * sr.n2 + sr.l12 * sr.n3) * sr.p1 + sr.n2 * sr.n3) / (sr.p2 * sr.l23);
        (q, l_of(direct + sr.p1 * sr.l12 / (sr.n2 + q))?)
    };
    Ok(RateResult {
        q: Some(vec![q]),
        ..RateResult::simple(StrategyKind::CompressForward, rate)
    })
}

/// Time-division multihop rate: the source talks to the relay for a fraction
/// `1 - a` of the time, the relay forwards for the remaining `a`, and the
/// destination ignores the direct link.
pub fn multihop_tdma(net: &RelayNetwork) -> Result<RateResult> {
    let sr = single_relay(net)?;
    let hop1 = sr.p1 * sr.l12 / sr.n2;
    let hop2 = sr.p2 * sr.l23 / sr.n3;
    max_min_over_alpha(
        StrategyKind::MultihopTdma,
        move |a| scaled_rate(1.0 - a, hop1),
        move |a| scaled_rate(a, hop2),
        Binding::SourceHop,
        Binding::RelayHop,
    )
}

/// `t * L(x / t)` extended by continuity: zero when the time share or the
/// SNR vanishes.
fn scaled_rate(t: f64, x: f64) -> f64 {
    if t <= 0.0 || x <= 0.0 {
        return 0.0;
    }
    t * 0.5 * (1.0 + x / t).log2()
}

// ---------------------------------------------------------------------------
