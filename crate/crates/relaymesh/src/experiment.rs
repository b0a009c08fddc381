//! Parameter sweeps, asymptotic regime probes, and power thresholds.
//!
//! Everything here drives the single-relay (`T = 3`) strategies over grids
//! of relay position or power and reports each rate's normalized gap to the
//! cut-set bound,
//!
//! ```text
//! gap = 1 - R / R_CS   (clamped to [0, 1])
//! ```
//!
//! together with `log10(gap)`, where an exactly-zero gap is rendered as the
//! `-inf` sentinel. The gap definition and the log transform are this
//! crate's documented choice of normalization for plot-ready output.
//!
//! [`asymptotic_probe`] replaces symbolic limits with finite probes: each
//! case drives the relay position and/or power along a geometric sequence
//! (or, for the position-grid cases, across a fixed grid), and the gap
//! trajectory is classified as `approaches` / `bounded_away` / `unknown`
//! under explicit thresholds. A verdict is evidence about a trend, not a
//! proof; the `unknown` outcome is deliberately reachable.
//!
//! Grid points are mutually independent, so evaluation order is free;
//! output order always follows grid order, and the implementation runs
//! sequentially, which makes determinism trivial.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cf::{optimize_cf_q, ConstraintMode};
use crate::gaussian::broadcast_cut_capacity;
use crate::rates::{
    cf_single_relay, cutset_single_relay, df_single_relay, multihop_tdma, Binding, RateResult,
    StrategyKind,
};
use crate::{Error, PathLossModel, Positions, RelayNetwork, Result, DEFAULT_RELAY_CAP};

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Which scalar a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// Source-relay distance on a collinear layout (relay moves, endpoints
    /// stay).
    D12,
    /// Relay-destination distance on a collinear layout.
    D23,
    /// Relay transmit power.
    P2,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::D12 => "d12",
            SweepVariable::D23 => "d23",
            SweepVariable::P2 => "P2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d12" => Ok(SweepVariable::D12),
            "d23" => Ok(SweepVariable::D23),
            "p2" => Ok(SweepVariable::P2),
            _ => Err(Error::InvalidSweep(format!(
                "unknown sweep variable `{s}` (expected d12, d23, or p2)"
            ))),
        }
    }
}

/// A fully specified sweep: base network, swept scalar, grid, strategy set.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Three-node template. Distance sweeps require it to carry collinear
    /// geometry (built via [`RelayNetwork::from_geometry`] with
    /// [`Positions::Line`]); power sweeps accept any template.
    pub base: RelayNetwork,
    pub variable: SweepVariable,
    /// Swept values, strictly increasing.
    pub grid: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    /// Routing quantifier for the general compress-and-forward optimizer.
    pub mode: ConstraintMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base.node_count() != 3 {
            return Err(Error::WrongNodeCount {
                expected: 3,
                actual: self.base.node_count(),
            });
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidSweep("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep("sweep grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSweep(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        if self.strategies.is_empty() {
            return Err(Error::InvalidSweep("no strategies selected".into()));
        }
        match self.variable {
            SweepVariable::P2 => {
                if self.grid[0] <= 0.0 {
                    return Err(Error::InvalidSweep(
                        "relay powers must be strictly positive".into(),
                    ));
                }
            }
            SweepVariable::D12 | SweepVariable::D23 => {
                let (x1, x3) = self.line_endpoints()?;
                let d13 = (x3 - x1).abs();
                if d13 == 0.0 {
                    return Err(Error::InvalidSweep(
                        "source and destination are co-located".into(),
                    ));
                }
                if self.grid[0] < 0.0 || self.grid[self.grid.len() - 1] > d13 {
                    return Err(Error::InvalidSweep(format!(
                        "{} values must stay within the source-destination span {d13}",
                        self.variable.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Selected strategies in canonical order, deduplicated.
    pub fn selected(&self) -> Vec<StrategyKind> {
        StrategyKind::all()
            .into_iter()
            .filter(|s| self.strategies.contains(s))
            .collect()
    }

    fn line_endpoints(&self) -> Result<(f64, f64)> {
        let (positions, _) = self.base.geometry().ok_or_else(|| {
            Error::InvalidSweep(format!(
                "{} sweeps need a network built from geometry",
                self.variable.name()
            ))
        })?;
        match positions {
            Positions::Line(coords) => Ok((coords[0], coords[2])),
            Positions::Plane(_) => Err(Error::InvalidSweep(
                "distance sweeps are defined for collinear layouts only".into(),
            )),
        }
    }

    /// The network at one grid point.
    pub fn network_at(&self, value: f64) -> Result<RelayNetwork> {
        match self.variable {
            SweepVariable::P2 => self.base.with_power(2, value),
            SweepVariable::D12 | SweepVariable::D23 => {
                let (x1, x3) = self.line_endpoints()?;
                let (_, model) = self.base.geometry().expect("checked by line_endpoints");
                let dir = (x3 - x1).signum();
                let relay = match self.variable {
                    SweepVariable::D12 => x1 + dir * value,
                    _ => x3 - dir * value,
                };
                RelayNetwork::from_geometry(
                    self.base.powers().to_vec(),
                    self.base.noises().to_vec(),
                    Positions::Line(vec![x1, relay, x3]),
                    model,
                )
            }
        }
    }
}

/// One strategy's outcome at one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyEntry {
    pub strategy: StrategyKind,
    pub result: RateResult,
    /// Normalized gap to the cut-set bound; `None` for the bound itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// `log10(gap)`, `-inf` when the gap is exactly zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log10_gap: Option<f64>,
}

/// All selected strategies evaluated at one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub swept: f64,
    pub entries: Vec<StrategyEntry>,
}

impl SweepRow {
    pub fn entry(&self, strategy: StrategyKind) -> Option<&StrategyEntry> {
        self.entries.iter().find(|e| e.strategy == strategy)
    }
}

/// `1 - rate/reference`, clamped to `[0, 1]`; zero when the reference is
/// degenerate.
pub fn normalized_gap(rate: f64, reference: f64) -> f64 {
    if reference <= 0.0 {
        return 0.0;
    }
    (1.0 - rate / reference).clamp(0.0, 1.0)
}

fn log10_gap(gap: f64) -> f64 {
    if gap == 0.0 {
        f64::NEG_INFINITY
    } else {
        gap.log10()
    }
}

/// Evaluates one strategy on one network.
///
/// The single-relay strategies require `T = 3`; the general
/// compress-and-forward optimizer and the broadcast-cut reference accept any
/// size.
pub fn evaluate_strategy(
    net: &RelayNetwork,
    strategy: StrategyKind,
    mode: ConstraintMode,
) -> Result<RateResult> {
    match strategy {
        StrategyKind::CutSet => cutset_single_relay(net),
        StrategyKind::DecodeForward => df_single_relay(net),
        StrategyKind::CompressForward => cf_single_relay(net),
        StrategyKind::CompressForwardGeneral => optimize_cf_q(net, mode, DEFAULT_RELAY_CAP),
        StrategyKind::MultihopTdma => multihop_tdma(net),
        StrategyKind::BroadcastCut => Ok(RateResult {
            strategy: StrategyKind::BroadcastCut,
            rate: broadcast_cut_capacity(net),
            alpha: None,
            q: None,
            binding: Binding::None,
            converged: true,
        }),
    }
}

/// Runs a sweep: one row per grid point, in grid order.
///
/// The cut-set bound is evaluated at every point regardless of the strategy
/// selection, since it is the gap reference.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let strategies = spec.selected();
    let mut rows = Vec::with_capacity(spec.grid.len());
    for &value in &spec.grid {
        let net = spec.network_at(value)?;
        let cutset = cutset_single_relay(&net)?;
        let mut entries = Vec::with_capacity(strategies.len());
        for &strategy in &strategies {
            let result = if strategy == StrategyKind::CutSet {
                cutset.clone()
            } else {
                evaluate_strategy(&net, strategy, spec.mode)?
            };
            let (gap, log_gap) = if strategy == StrategyKind::CutSet {
                (None, None)
            } else {
                let g = normalized_gap(result.rate, cutset.rate);
                (Some(g), Some(log10_gap(g)))
            };
            entries.push(StrategyEntry {
                strategy,
                result,
                gap,
                log10_gap: log_gap,
            });
        }
        rows.push(SweepRow {
            swept: value,
            entries,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// CSV / gnuplot output
// ---------------------------------------------------------------------------

/// 12 significant digits, `.` separator, `inf`/`-inf` sentinels.
fn fmt_value(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:.11e}")
    }
}

fn model_desc(model: &PathLossModel) -> String {
    match *model {
        PathLossModel::Friis { gain, frequency } => {
            format!("friis gain={gain} frequency={frequency}")
        }
        PathLossModel::Spl { kappa, eta } => format!("spl kappa={kappa} eta={eta}"),
        PathLossModel::Mpl { kappa, eta } => format!("mpl kappa={kappa} eta={eta}"),
    }
}

fn tags(strategies: &[StrategyKind]) -> String {
    strategies
        .iter()
        .map(|s| s.tag())
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes sweep rows as CSV: a `#` parameter header (no timestamps, so two
/// runs of the same spec are bit-identical), a column-name row, then one row
/// per grid point with 12-significant-digit values.
pub fn write_sweep_csv<W: Write>(spec: &SweepSpec, rows: &[SweepRow], mut out: W) -> io::Result<()> {
    let strategies = spec.selected();
    writeln!(out, "# swept variable: {}", spec.variable.name())?;
    writeln!(out, "# strategies: {}", tags(&strategies))?;
    writeln!(out, "# constraint mode: {}", spec.mode.name())?;
    writeln!(out, "# powers: {:?}", spec.base.powers())?;
    writeln!(out, "# noises: {:?}", spec.base.noises())?;
    match spec.base.geometry() {
        Some((Positions::Line(coords), model)) => {
            writeln!(out, "# geometry: line {:?}", coords)?;
            writeln!(out, "# path loss: {}", model_desc(&model))?;
        }
        Some((Positions::Plane(coords), model)) => {
            writeln!(out, "# geometry: plane {:?}", coords)?;
            writeln!(out, "# path loss: {}", model_desc(&model))?;
        }
        None => writeln!(out, "# gains: explicit {:?}", spec.base.gain_rows())?,
    }

    let mut header = vec!["swept".to_string()];
    header.extend(strategies.iter().map(|s| format!("R_{}", s.tag())));
    let gapped: Vec<StrategyKind> = strategies
        .iter()
        .copied()
        .filter(|&s| s != StrategyKind::CutSet)
        .collect();
    header.extend(gapped.iter().map(|s| format!("gap_{}", s.tag())));
    header.extend(gapped.iter().map(|s| format!("log10_gap_{}", s.tag())));
    writeln!(out, "{}", header.join(","))?;

    for row in rows {
        let mut fields = vec![fmt_value(row.swept)];
        for &s in &strategies {
            let e = row.entry(s).expect("row covers every selected strategy");
            fields.push(fmt_value(e.result.rate));
        }
        for &s in &gapped {
            let e = row.entry(s).expect("row covers every selected strategy");
            fields.push(fmt_value(e.gap.expect("non-reference strategies carry a gap")));
        }
        for &s in &gapped {
            let e = row.entry(s).expect("row covers every selected strategy");
            fields.push(fmt_value(
                e.log10_gap.expect("non-reference strategies carry a log gap"),
            ));
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Writes two-column plot files per strategy into `dir`: `<tag>.dat` with
/// `swept rate`, and `gap_<tag>.dat` with `swept log10_gap` for every
/// strategy that has a gap.
pub fn write_gnuplot_files(spec: &SweepSpec, rows: &[SweepRow], dir: &Path) -> io::Result<()> {
    for &s in &spec.selected() {
        let mut rate_file = std::fs::File::create(dir.join(format!("{}.dat", s.tag())))?;
        writeln!(rate_file, "# R_{} vs {}", s.tag(), spec.variable.name())?;
        for row in rows {
            let e = row.entry(s).expect("row covers every selected strategy");
            writeln!(rate_file, "{} {}", fmt_value(row.swept), fmt_value(e.result.rate))?;
        }
        if s != StrategyKind::CutSet {
            let mut gap_file = std::fs::File::create(dir.join(format!("gap_{}.dat", s.tag())))?;
            writeln!(gap_file, "# log10 gap of {} vs {}", s.tag(), spec.variable.name())?;
            for row in rows {
                let e = row.entry(s).expect("row covers every selected strategy");
                writeln!(
                    gap_file,
                    "{} {}",
                    fmt_value(row.swept),
                    fmt_value(e.log10_gap.expect("gap present off the reference"))
                )?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Asymptotic probes
// ---------------------------------------------------------------------------

/// The ten probed regimes. Cases `1a..6` live in the unbounded-gain
/// (simplified path loss) world, `7..8` in the bounded-gain (modified)
/// world. All use the collinear unit layout `d13 = 1`, `P1 = 1`, `N = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    C1a,
    C1b,
    C1c,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
}

impl CaseId {
    pub const ALL: [CaseId; 10] = [
        CaseId::C1a,
        CaseId::C1b,
        CaseId::C1c,
        CaseId::C2,
        CaseId::C3,
        CaseId::C4,
        CaseId::C5,
        CaseId::C6,
        CaseId::C7,
        CaseId::C8,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1a" => Ok(CaseId::C1a),
            "1b" => Ok(CaseId::C1b),
            "1c" => Ok(CaseId::C1c),
            "2" => Ok(CaseId::C2),
            "3" => Ok(CaseId::C3),
            "4" => Ok(CaseId::C4),
            "5" => Ok(CaseId::C5),
            "6" => Ok(CaseId::C6),
            "7" => Ok(CaseId::C7),
            "8" => Ok(CaseId::C8),
            other => Err(Error::UnknownCase(other.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseId::C1a => "1a",
            CaseId::C1b => "1b",
            CaseId::C1c => "1c",
            CaseId::C2 => "2",
            CaseId::C3 => "3",
            CaseId::C4 => "4",
            CaseId::C5 => "5",
            CaseId::C6 => "6",
            CaseId::C7 => "7",
            CaseId::C8 => "8",
        }
    }

    /// Path loss family the case is defined under.
    pub fn required_model(self) -> &'static str {
        match self {
            CaseId::C7 | CaseId::C8 => "mpl",
            _ => "spl",
        }
    }

    /// Grid cases scan relay positions; the rest follow a limit sequence.
    pub fn is_grid(self) -> bool {
        matches!(self, CaseId::C5 | CaseId::C8)
    }

    pub fn description(self) -> &'static str {
        match self {
            CaseId::C1a => "relay toward the source, P2 outgrowing the source-relay gain",
            CaseId::C1b => "relay toward the source, P2 tracking the source-relay gain",
            CaseId::C1c => "relay toward the source, P2 lagging the source-relay gain",
            CaseId::C2 => "midpoint relay, P2 unbounded",
            CaseId::C3 => "relay toward the destination jointly with P2 unbounded",
            CaseId::C4 => "relay toward the source at fixed P2",
            CaseId::C5 => "central relay positions at fixed P2",
            CaseId::C6 => "relay toward the destination at fixed P2",
            CaseId::C7 => "midpoint relay, P2 unbounded, bounded gains",
            CaseId::C8 => "relay positions at fixed P2, bounded gains",
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Classification thresholds for probe trajectories.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeThresholds {
    /// A final gap below this (with a nonincreasing tail) reads `approaches`.
    pub approach: f64,
    /// A final gap at or above this (once settled) reads `bounded_away`.
    pub floor: f64,
    /// Relative movement on the last step below this counts as settled; a
    /// still-moving large gap stays `unknown` rather than `bounded_away`.
    pub settle: f64,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        ProbeThresholds {
            approach: 1e-3,
            floor: 1e-2,
            settle: 0.05,
        }
    }
}

impl ProbeThresholds {
    fn validate(&self) -> Result<()> {
        if !(self.approach > 0.0 && self.approach.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "approach threshold",
                requirement: "finite and > 0",
                value: self.approach,
            });
        }
        if !(self.floor > self.approach && self.floor.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "bounded-away floor",
                requirement: "finite and > the approach threshold",
                value: self.floor,
            });
        }
        if !(self.settle > 0.0 && self.settle.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "settle threshold",
                requirement: "finite and > 0",
                value: self.settle,
            });
        }
        Ok(())
    }
}

/// What a probe concluded for one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The gap shrinks below the approach threshold.
    Approaches,
    /// The gap settles at or above the floor.
    BoundedAway,
    /// Neither reading is supported by the evidence.
    Unknown,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Approaches => "approaches",
            Verdict::BoundedAway => "bounded_away",
            Verdict::Unknown => "unknown",
        }
    }
}

/// One probe evaluation: the driven parameter and the observed gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbePoint {
    pub parameter: f64,
    pub gap: f64,
}

/// A classified gap trajectory for one strategy under one case.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticVerdict {
    pub case: CaseId,
    pub strategy: StrategyKind,
    pub verdict: Verdict,
    pub evidence: Vec<ProbePoint>,
}

/// Probes one asymptotic case and classifies the decode-and-forward and
/// compress-and-forward gap trajectories (returned in that order).
///
/// `model` supplies `kappa`/`eta` and must belong to the case's family;
/// cases `1a..6` are defined under simplified path loss, `7..8` under the
/// modified law.
pub fn asymptotic_probe(
    case: CaseId,
    model: &PathLossModel,
    thresholds: &ProbeThresholds,
) -> Result<Vec<AsymptoticVerdict>> {
    model.validate()?;
    thresholds.validate()?;
    let family_ok = match case.required_model() {
        "spl" => matches!(model, PathLossModel::Spl { .. }),
        _ => matches!(model, PathLossModel::Mpl { .. }),
    };
    if !family_ok {
        return Err(Error::WrongModelFamily {
            case: case.name(),
            required: case.required_model(),
        });
    }

    let points = probe_points(case, model)?;
    let mut df_evidence = Vec::with_capacity(points.len());
    let mut cf_evidence = Vec::with_capacity(points.len());
    for (parameter, net) in &points {
        let reference = cutset_single_relay(net)?.rate;
        let df = df_single_relay(net)?.rate;
        let cf = cf_single_relay(net)?.rate;
        df_evidence.push(ProbePoint {
            parameter: *parameter,
            gap: normalized_gap(df, reference),
        });
        cf_evidence.push(ProbePoint {
            parameter: *parameter,
            gap: normalized_gap(cf, reference),
        });
    }

    let classify = |evidence: &[ProbePoint]| {
        if case.is_grid() {
            classify_grid(evidence, thresholds)
        } else {
            classify_sequence(evidence, thresholds)
        }
    };
    Ok(vec![
        AsymptoticVerdict {
            case,
            strategy: StrategyKind::DecodeForward,
            verdict: classify(&df_evidence),
            evidence: df_evidence,
        },
        AsymptoticVerdict {
            case,
            strategy: StrategyKind::CompressForward,
            verdict: classify(&cf_evidence),
            evidence: cf_evidence,
        },
    ])
}

/// Probe networks per case: collinear `[0, d12, 1]`, `P1 = 1`, unit noises.
/// Limit cases deepen six steps (one decade per step); grid cases scan nine
/// relay positions.
fn probe_points(case: CaseId, model: &PathLossModel) -> Result<Vec<(f64, RelayNetwork)>> {
    let net_at = |d12: f64, p2: f64| -> Result<RelayNetwork> {
        RelayNetwork::from_geometry(
            vec![1.0, p2],
            vec![1.0, 1.0],
            Positions::Line(vec![0.0, d12, 1.0]),
            *model,
        )
    };
    let decades = (1..=6).map(|k| 10f64.powi(k));
    let linspace = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    };

    let mut points = Vec::new();
    match case {
        // d12 -> 0 with P2 coupled to the diverging source-relay gain.
        CaseId::C1a | CaseId::C1b | CaseId::C1c => {
            for scale in decades {
                let d12 = 1.0 / scale;
                let lambda12 = model.gain(d12)?;
                let p2 = match case {
                    CaseId::C1a => lambda12 * scale,
                    CaseId::C1b => lambda12,
                    _ => lambda12 / scale,
                };
                points.push((d12, net_at(d12, p2)?));
            }
        }
        CaseId::C2 | CaseId::C7 => {
            for p2 in decades {
                points.push((p2, net_at(0.5, p2)?));
            }
        }
        CaseId::C3 => {
            for scale in decades {
                let d23 = 1.0 / scale;
                points.push((d23, net_at(1.0 - d23, scale)?));
            }
        }
        CaseId::C4 => {
            for scale in decades {
                let d12 = 1.0 / scale;
                points.push((d12, net_at(d12, 1.0)?));
            }
        }
        CaseId::C6 => {
            for scale in decades {
                let d23 = 1.0 / scale;
                points.push((d23, net_at(1.0 - d23, 1.0)?));
            }
        }
        // Position grids at fixed power. The unbounded-gain case keeps to
        // central positions, where neither strategy is near the bound; the
        // bounded-gain case scans nearly the whole segment.
        CaseId::C5 => {
            for d12 in linspace(0.4, 0.6, 9) {
                points.push((d12, net_at(d12, 1.0)?));
            }
        }
        CaseId::C8 => {
            for d12 in linspace(0.1, 0.9, 9) {
                points.push((d12, net_at(d12, 1.0)?));
            }
        }
    }
    Ok(points)
}

/// Limit-sequence reading: `approaches` needs the final gap under the
/// threshold and a nonincreasing tail (three steps, with absolute fuzz so a
/// tail of exact zeros counts); `bounded_away` needs the final gap at or
/// above the floor and (nearly) no movement on the last step. A large gap
/// still shrinking fast stays `unknown`.
fn classify_sequence(evidence: &[ProbePoint], thresholds: &ProbeThresholds) -> Verdict {
    let n = evidence.len();
    if n < 2 {
        return Verdict::Unknown;
    }
    let last = evidence[n - 1].gap;
    let tail_start = n.saturating_sub(4);
    let tail_nonincreasing = evidence[tail_start..]
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap + 1e-12);
    if last < thresholds.approach && tail_nonincreasing {
        return Verdict::Approaches;
    }
    if last >= thresholds.floor {
        let previous = evidence[n - 2].gap;
        if (last - previous).abs() <= thresholds.settle * last {
            return Verdict::BoundedAway;
        }
    }
    Verdict::Unknown
}

/// Grid reading: the verdict must hold across every scanned position.
fn classify_grid(evidence: &[ProbePoint], thresholds: &ProbeThresholds) -> Verdict {
    let max = evidence.iter().map(|p| p.gap).fold(f64::NEG_INFINITY, f64::max);
    let min = evidence.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    if max < thresholds.approach {
        Verdict::Approaches
    } else if min >= thresholds.floor {
        Verdict::BoundedAway
    } else {
        Verdict::Unknown
    }
}

// ---------------------------------------------------------------------------
// Power threshold
// ---------------------------------------------------------------------------

/// Relay-power search ceiling, as a multiple of the source power.
const THRESHOLD_CEILING_FACTOR: f64 = 1e6;

/// Smallest relay power `P2 >= P1` at which compress-and-forward reaches
/// `target` times the cut-set bound, for the relay placed `d23` away from
/// the destination on `base`'s collinear layout.
///
/// Bisection in log space, relative tolerance `1e-6`, over
/// `[P1, 1e6 * P1]`. The floor is the source power: below it both rates
/// collapse toward the direct link and their ratio is no longer monotone,
/// while the regime of interest is a relay at least as strong as the
/// source. A target no strategy reaches by the ceiling is reported as
/// unreachable together with the fraction achieved there.
pub fn power_threshold(base: &RelayNetwork, d23: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter {
            name: "target fraction",
            requirement: "in (0, 1)",
            value: target,
        });
    }
    if base.node_count() != 3 {
        return Err(Error::WrongNodeCount {
            expected: 3,
            actual: base.node_count(),
        });
    }
    if !d23.is_finite() || d23 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "d23",
            requirement: "finite and >= 0",
            value: d23,
        });
    }
    let (positions, model) = base.geometry().ok_or_else(|| {
        Error::InvalidNetwork("power_threshold needs a network built from geometry".into())
    })?;
    let (x1, x3) = match positions {
        Positions::Line(coords) => (coords[0], coords[2]),
        Positions::Plane(_) => {
            return Err(Error::InvalidNetwork(
                "power_threshold is defined for collinear layouts only".into(),
            ))
        }
    };
    let dir = (x3 - x1).signum();
    let repositioned = RelayNetwork::from_geometry(
        base.powers().to_vec(),
        base.noises().to_vec(),
        Positions::Line(vec![x1, x3 - dir * d23, x3]),
        model,
    )?;

    // Infallible after validation: probes stay strictly positive and the
    // network stays a valid three-node net.
    let ratio = |p2: f64| -> f64 {
        let net = repositioned
            .with_power(2, p2)
            .expect("positive probe power");
        let cf = cf_single_relay(&net).expect("valid three-node network").rate;
        let cs = cutset_single_relay(&net)
            .expect("valid three-node network")
            .rate;
        cf / cs
    };

    let p1 = base.power(1);
    let (floor, ceiling) = (p1, THRESHOLD_CEILING_FACTOR * p1);
    let achieved_at_ceiling = ratio(ceiling);
    if achieved_at_ceiling < target {
        return Err(Error::TargetUnreachable {
            target,
            ceiling,
            achieved: achieved_at_ceiling,
        });
    }
    // Absolute tolerance in log space is relative tolerance on P2.
    let log_threshold = crate::optim::bisect_min_feasible(
        |log_p2: f64| ratio(log_p2.exp()) >= target,
        floor.ln(),
        ceiling.ln(),
        1e-6,
    )?;
    Ok(log_threshold.exp())
}

// ---------------------------------------------------------------------------
