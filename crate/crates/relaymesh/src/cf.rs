//! Compress-and-forward for any number of relays.
//!
//! Each relay `i` quantizes its observation with noise variance `Q_i` and
//! ships the digest onward; the destination decodes the source message from
//! the direct link plus every compressed observation. The achievable rate
//! for a noise profile `Q` is
//!
//! ```text
//! R(Q) = 1/2 log2( 1 + sum_{i in R} l_1i P1 / (N_i + Q_i) + l_1T P1 / N_T )
//! ```
//!
//! and a profile is admissible when, for every nonempty relay subset `S`,
//! every set partition `{B_1..B_M}` of `S`, and every routing choice
//! `r(m) in {2..T} \ B_m`,
//!
//! ```text
//! prod_{i in S} Q_i  >=  Lambda(S) / prod_m (1 + sum_{i in B_m} l_{i,r(m)} P_i
//!                                               / (l_{1,r(m)} P1 + N_{r(m)}))
//! ```
//!
//! where `Lambda(S)` is the determinant of the matrix with diagonal
//! `l_{1,s} P1 + N_s + Q_s` and off-diagonal `sqrt(l_{1,s} l_{1,s'}) P1`.
//! The right side prices the forwarding load: the better the relays in `S`
//! can push bits toward their routing targets, the less quantization noise
//! they need to carry.
//!
//! The routing quantifier can be read universally or existentially;
//! [`ConstraintMode`] exposes both, and the universal reading is the default
//! since it is never looser. Setting `Q_i = +inf` silences relay `i`: it
//! drops out of the rate, the constraint families, and the enumeration.
//!
//! [`optimize_cf_q`] drives every `Q_i` down against the constraint set by
//! per-coordinate bisection until the profile stops moving. Lowering one
//! coordinate never invalidates constraints that exclude it (their left and
//! right sides do not mention `Q_i`), so feasibility is preserved sweep to
//! sweep while the rate climbs.

use serde::{Deserialize, Serialize};

use crate::optim::set_partitions;
use crate::rates::{Binding, RateResult, StrategyKind};
use crate::{Error, RelayNetwork, Result};

/// Relative convergence tolerance for the profile optimizer.
const Q_REL_TOL: f64 = 1e-9;
/// Coordinate-descent sweep cap; hitting it flags non-convergence.
const MAX_SWEEPS: usize = 500;
/// Initial quantization noise, as a multiple of the largest receiver noise.
const INIT_Q_FACTOR: f64 = 1e6;
/// Every feasible profile the optimizer handles starts below this; beyond it
/// the constraint set is treated as genuinely infeasible.
const MAX_INIT_Q: f64 = 1e250;

// ---------------------------------------------------------------------------
// Quantization profiles
// ---------------------------------------------------------------------------

/// Per-relay quantization noise variances, in relay node order `2..=T-1`.
///
/// Entries are strictly positive; `+inf` marks a silenced relay.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationProfile(Vec<f64>);

impl QuantizationProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &q in &values {
            if q.is_nan() || q <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "quantization noise",
                    requirement: "> 0 (or +inf to silence the relay)",
                    value: q,
                });
            }
        }
        Ok(Self(values))
    }

    /// The same noise on every relay of `net`.
    pub fn uniform(net: &RelayNetwork, q: f64) -> Result<Self> {
        Self::new(vec![q; net.relay_count()])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Noise at relay `node` (node id, `2 <= node <= T-1`).
    pub fn q_of(&self, node: usize) -> f64 {
        self.0[node - 2]
    }

    fn check_len(&self, net: &RelayNetwork) -> Result<()> {
        if self.0.len() != net.relay_count() {
            return Err(Error::InvalidNetwork(format!(
                "profile has {} entries, network has {} relays",
                self.0.len(),
                net.relay_count()
            )));
        }
        Ok(())
    }
}

/// How the routing quantifier in the admissibility condition is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMode {
    /// Every (partition, routing) instance of every subset must hold.
    ForAll,
    /// Each subset needs at least one holding (partition, routing) instance.
    Exists,
}

impl ConstraintMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forall" => Ok(ConstraintMode::ForAll),
            "exists" => Ok(ConstraintMode::Exists),
            _ => Err(Error::Config(format!(
                "unknown constraint mode `{s}` (expected forall or exists)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintMode::ForAll => "forall",
            ConstraintMode::Exists => "exists",
        }
    }
}

// ---------------------------------------------------------------------------
// Determinants
// ---------------------------------------------------------------------------

/// Determinant by LU elimination with partial pivoting; `data` is row-major
/// `dim x dim` scratch.
fn det_lu(dim: usize, data: &mut [f64]) -> f64 {
    let mut det = 1.0;
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&a, &b| {
                data[a * dim + col]
                    .abs()
                    .total_cmp(&data[b * dim + col].abs())
            })
            .unwrap();
        let pivot = data[pivot_row * dim + col];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..dim {
                data.swap(col * dim + j, pivot_row * dim + j);
            }
            det = -det;
        }
        det *= pivot;
        for row in col + 1..dim {
            let factor = data[row * dim + col] / pivot;
            for j in col..dim {
                data[row * dim + j] -= factor * data[col * dim + j];
            }
        }
    }
    det
}

fn subset_matrix(net: &RelayNetwork, subset: &[usize], q: impl Fn(usize) -> f64) -> Vec<f64> {
    let p1 = net.power(1);
    let d = subset.len();
    let mut m = vec![0.0; d * d];
    for (a, &sa) in subset.iter().enumerate() {
        for (b, &sb) in subset.iter().enumerate() {
            m[a * d + b] = if a == b {
                net.gain(1, sa) * p1 + net.noise(sa) + q(sa)
            } else {
                (net.gain(1, sa) * net.gain(1, sb)).sqrt() * p1
            };
        }
    }
    m
}

fn validate_subset(net: &RelayNetwork, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidNetwork("subset must be nonempty".into()));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidNetwork(
            "subset node ids must be strictly ascending".into(),
        ));
    }
    for &s in subset {
        if s < 2 || s >= net.node_count() {
            return Err(Error::InvalidNetwork(format!("node {s} is not a relay")));
        }
    }
    Ok(())
}

/// Determinant of the compressed-observation covariance block for the relay
/// subset `subset` (ascending node ids): diagonal `l_1s P1 + N_s + Q_s`,
/// off-diagonal `sqrt(l_1s l_1s') P1`.
pub fn lambda_det(net: &RelayNetwork, subset: &[usize], profile: &QuantizationProfile) -> Result<f64> {
    profile.check_len(net)?;
    validate_subset(net, subset)?;
    for &s in subset {
        if !profile.q_of(s).is_finite() {
            return Err(Error::InvalidParameter {
                name: "quantization noise",
                requirement: "finite on every subset member",
                value: f64::INFINITY,
            });
        }
    }
    let mut m = subset_matrix(net, subset, |s| profile.q_of(s));
    Ok(det_lu(subset.len(), &mut m))
}

/// Determinant of the same form taken over every receiver `2..=T`, with the
/// destination contributing no quantization noise.
pub fn psi_det(net: &RelayNetwork, profile: &QuantizationProfile) -> Result<f64> {
    profile.check_len(net)?;
    let t = net.node_count();
    for node in net.relays() {
        if !profile.q_of(node).is_finite() {
            return Err(Error::InvalidParameter {
                name: "quantization noise",
                requirement: "finite on every relay",
                value: f64::INFINITY,
            });
        }
    }
    let receivers: Vec<usize> = (2..=t).collect();
    let q = |node: usize| if node == t { 0.0 } else { profile.q_of(node) };
    let mut m = {
        let p1 = net.power(1);
        let d = receivers.len();
        let mut m = vec![0.0; d * d];
        for (a, &sa) in receivers.iter().enumerate() {
            for (b, &sb) in receivers.iter().enumerate() {
                m[a * d + b] = if a == b {
                    net.gain(1, sa) * p1 + net.noise(sa) + q(sa)
                } else {
                    (net.gain(1, sa) * net.gain(1, sb)).sqrt() * p1
                };
            }
        }
        m
    };
    Ok(det_lu(receivers.len(), &mut m))
}

/// Achievable compress-and-forward rate for a fixed noise profile.
///
/// Silenced relays (`Q = +inf`) contribute nothing. Applies to any `T >= 2`;
/// with no relays this is the direct-link rate.
pub fn cf_rate_given_q(net: &RelayNetwork, profile: &QuantizationProfile) -> Result<f64> {
    profile.check_len(net)?;
    let t = net.node_count();
    let p1 = net.power(1);
    let mut snr = net.gain(1, t) * p1 / net.noise(t);
    for i in net.relays() {
        let q = profile.q_of(i);
        if q.is_finite() {
            snr += net.gain(1, i) * p1 / (net.noise(i) + q);
        }
    }
    Ok(0.5 * (1.0 + snr).log2())
}

// ---------------------------------------------------------------------------
// Constraint instances
// ---------------------------------------------------------------------------

/// One admissibility inequality: a relay subset, a partition of it, and a
/// routing target per block.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintInstance {
    /// Relay node ids, ascending.
    pub subset: Vec<usize>,
    /// Partition blocks of `subset`, each ascending, ordered by smallest
    /// element.
    pub blocks: Vec<Vec<usize>>,
    /// Routing target per block (`routes[m]` decodes block `m`).
    pub routes: Vec<usize>,
}

impl ConstraintInstance {
    /// Product of forwarding-capacity factors on the right-hand side.
    pub fn denominator(&self, net: &RelayNetwork) -> f64 {
        let p1 = net.power(1);
        self.blocks
            .iter()
            .zip(&self.routes)
            .map(|(block, &r)| {
                let forwarded: f64 = block.iter().map(|&i| net.gain(i, r) * net.power(i)).sum();
                1.0 + forwarded / (net.gain(1, r) * p1 + net.noise(r))
            })
            .product()
    }

    /// Left side: product of quantization noises over the subset.
    pub fn lhs(&self, profile: &QuantizationProfile) -> f64 {
        self.subset.iter().map(|&s| profile.q_of(s)).product()
    }

    /// Right side: `Lambda(subset) / denominator`.
    pub fn rhs(&self, net: &RelayNetwork, profile: &QuantizationProfile) -> Result<f64> {
        Ok(lambda_det(net, &self.subset, profile)? / self.denominator(net))
    }

    /// `lhs / rhs`; at least 1 when the inequality holds.
    pub fn slack(&self, net: &RelayNetwork, profile: &QuantizationProfile) -> Result<f64> {
        Ok(self.lhs(profile) / self.rhs(net, profile)?)
    }

    pub fn label(&self) -> String {
        let fmt_set = |s: &[usize]| {
            s.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let blocks = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", fmt_set(b)))
            .collect::<String>();
        let routes = self
            .routes
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("S={{{}}} B={} r=({})", fmt_set(&self.subset), blocks, routes)
    }
}

/// Calls `f` for every (subset, partition, routing) instance over `relays`,
/// in deterministic order: subsets by ascending bitmask, partitions in
/// restricted-growth lexicographic order, routings lexicographic. `f`
/// returns false to stop; the visitor then returns false.
fn visit_instances<F>(net: &RelayNetwork, relays: &[usize], f: &mut F) -> Result<bool>
where
    F: FnMut(&ConstraintInstance) -> bool,
{
    let t = net.node_count();
    for mask in 1u64..(1u64 << relays.len()) {
        let subset: Vec<usize> = relays
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &node)| node)
            .collect();
        if !visit_subset_instances(t, &subset, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn visit_subset_instances<F>(t: usize, subset: &[usize], f: &mut F) -> Result<bool>
where
    F: FnMut(&ConstraintInstance) -> bool,
{
    for partition in set_partitions(subset.len())? {
        let blocks: Vec<Vec<usize>> = partition
            .iter()
            .map(|b| b.iter().map(|&k| subset[k]).collect())
            .collect();
        let candidates: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| (2..=t).filter(|r| !b.contains(r)).collect())
            .collect();
        if candidates.iter().any(|c| c.is_empty()) {
            continue; // no legal routing target (cannot happen for T >= 3)
        }
        let mut idx = vec![0usize; blocks.len()];
        'routings: loop {
            let instance = ConstraintInstance {
                subset: subset.to_vec(),
                blocks: blocks.clone(),
                routes: idx
                    .iter()
                    .zip(&candidates)
                    .map(|(&i, c)| c[i])
                    .collect(),
            };
            if !f(&instance) {
                return Ok(false);
            }
            // odometer over routing targets, rightmost digit fastest
            let mut pos = blocks.len();
            loop {
                if pos == 0 {
                    break 'routings; // wrapped past the leftmost digit
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    Ok(true)
}

/// Every admissibility instance for the full relay set of `net`.
///
/// Refuses networks with more than `cap` relays; the instance count grows
/// like Bell numbers times routing choices.
pub fn enumerate_constraints(net: &RelayNetwork, cap: usize) -> Result<Vec<ConstraintInstance>> {
    let relays: Vec<usize> = net.relays().collect();
    if relays.len() > cap {
        return Err(Error::EnumerationCap {
            count: relays.len(),
            cap,
        });
    }
    let mut out = Vec::new();
    visit_instances(net, &relays, &mut |inst| {
        out.push(inst.clone());
        true
    })?;
    Ok(out)
}

/// Outcome of checking a profile against the admissibility constraints.
#[derive(Debug, Clone)]
pub struct ConstraintCheck {
    pub passed: bool,
    pub mode: ConstraintMode,
    /// The decisive instance and its slack: under `ForAll`, the instance
    /// with least slack overall; under `Exists`, the best instance of the
    /// worst subset. `None` when every relay is silenced (vacuous pass).
    pub tightest: Option<(ConstraintInstance, f64)>,
}

/// Checks `profile` against every constraint family, honoring silenced
/// relays and the routing-quantifier `mode`.
pub fn cf_constraints_check(
    net: &RelayNetwork,
    profile: &QuantizationProfile,
    mode: ConstraintMode,
    cap: usize,
) -> Result<ConstraintCheck> {
    profile.check_len(net)?;
    let active: Vec<usize> = net.relays().filter(|&i| profile.q_of(i).is_finite()).collect();
    if active.len() > cap {
        return Err(Error::EnumerationCap {
            count: active.len(),
            cap,
        });
    }
    if active.is_empty() {
        return Ok(ConstraintCheck {
            passed: true,
            mode,
            tightest: None,
        });
    }

    let mut passed = true;
    let mut tightest: Option<(ConstraintInstance, f64)> = None;
    match mode {
        ConstraintMode::ForAll => {
            let mut err = None;
            visit_instances(net, &active, &mut |inst| {
                match inst.slack(net, profile) {
                    Ok(slack) => {
                        if slack < 1.0 {
                            passed = false;
                        }
                        if tightest.as_ref().map_or(true, |(_, s)| slack < *s) {
                            tightest = Some((inst.clone(), slack));
                        }
                        true
                    }
                    Err(e) => {
                        err = Some(e);
                        false
                    }
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
        }
        ConstraintMode::Exists => {
            // Group marching: instances arrive subset-major, so track the
            // best slack per subset and close each group as it changes.
            let mut current: Option<(Vec<usize>, ConstraintInstance, f64)> = None;
            let mut err = None;
            let close =
                |entry: Option<(Vec<usize>, ConstraintInstance, f64)>,
                 passed: &mut bool,
                 tightest: &mut Option<(ConstraintInstance, f64)>| {
                    if let Some((_, inst, best)) = entry {
                        if best < 1.0 {
                            *passed = false;
                        }
                        if tightest.as_ref().map_or(true, |(_, s)| best < *s) {
                            *tightest = Some((inst, best));
                        }
                    }
                };
            visit_instances(net, &active, &mut |inst| {
                let slack = match inst.slack(net, profile) {
                    Ok(s) => s,
                    Err(e) => {
                        err = Some(e);
                        return false;
                    }
                };
                match &mut current {
                    Some((subset, best_inst, best)) if *subset == inst.subset => {
                        if slack > *best {
                            *best = slack;
                            *best_inst = inst.clone();
                        }
                    }
                    _ => {
                        close(current.take(), &mut passed, &mut tightest);
                        current = Some((inst.subset.clone(), inst.clone(), slack));
                    }
                }
                true
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            close(current.take(), &mut passed, &mut tightest);
        }
    }
    Ok(ConstraintCheck {
        passed,
        mode,
        tightest,
    })
}

// ---------------------------------------------------------------------------
// Profile optimization
// ---------------------------------------------------------------------------

/// Fast feasibility test used inside the coordinate bisection. Only subsets
/// containing `focus` (an active-relay node id) are checked when given,
/// since the others do not mention the moving coordinate.
fn feasible(
    net: &RelayNetwork,
    active: &[usize],
    q: &dyn Fn(usize) -> f64,
    mode: ConstraintMode,
    focus: Option<usize>,
) -> Result<bool> {
    let t = net.node_count();
    for mask in 1u64..(1u64 << active.len()) {
        let subset: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &node)| node)
            .collect();
        if let Some(focus) = focus {
            if !subset.contains(&focus) {
                continue;
            }
        }
        let lhs: f64 = subset.iter().map(|&s| q(s)).product();
        let mut lambda = subset_matrix(net, &subset, &q);
        let lam = det_lu(subset.len(), &mut lambda);
        let mut subset_ok = mode == ConstraintMode::ForAll;
        visit_subset_instances(t, &subset, &mut |inst| {
            let holds = lhs * inst.denominator(net) >= lam;
            match mode {
                ConstraintMode::ForAll if !holds => {
                    subset_ok = false;
                    false // first violation settles the subset
                }
                ConstraintMode::Exists if holds => {
                    subset_ok = true;
                    false // first witness settles the subset
                }
                _ => true,
            }
        })?;
        if !subset_ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relays that can never satisfy their singleton constraint at any finite
/// noise, because some (or under `Exists`, every) routing target receives
/// nothing from them. These must be silenced up front.
fn doomed_relays(net: &RelayNetwork, mode: ConstraintMode) -> Vec<usize> {
    let t = net.node_count();
    net.relays()
        .filter(|&i| {
            let mut targets = (2..=t).filter(|&r| r != i);
            let dead = |r: usize| net.gain(i, r) * net.power(i) == 0.0;
            match mode {
                ConstraintMode::ForAll => targets.any(dead),
                ConstraintMode::Exists => targets.all(dead),
            }
        })
        .collect()
}

/// Walks down from `start` (which must pass) by factors of 16 until `probe`
/// fails, then closes in by geometric-mean bisection to the smallest
/// passing value, relative tolerance [`Q_REL_TOL`].
fn descend_min_feasible(
    start: f64,
    mut probe: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    let mut good = start;
    let mut bad = None;
    while bad.is_none() {
        let lower = good / 16.0;
        if lower < 1e-300 {
            break; // threshold numerically zero; keep `good`
        }
        if probe(lower)? {
            good = lower;
        } else {
            bad = Some(lower);
        }
    }
    if let Some(mut bad) = bad {
        while good / bad > 1.0 + Q_REL_TOL {
            let mid = (good * bad).sqrt();
            if mid <= bad || mid >= good {
                break;
            }
            if probe(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    Ok(good)
}

/// Minimizes the quantization noise profile, maximizing
/// [`cf_rate_given_q`] subject to [`cf_constraints_check`].
///
/// Starts every active relay at `1e6 * max(N)` (grown geometrically until
/// admissible), first shrinks the whole profile by a common factor, then
/// repeatedly bisects each coordinate down to the smallest feasible value
/// given the others (relative tolerance `1e-9`), sweeping until the profile
/// moves by less than `1e-9` relative or 500 sweeps elapse; the latter is
/// reported as `converged = false`. The ray pass matters: the product
/// constraints make the feasible set nonconvex, and pure coordinate descent
/// from a uniform start can wedge into an asymmetric corner — one relay's
/// noise racing to its singleton floor while the joint constraint then pins
/// the others far above the symmetric face. Relays that cannot reach their
/// routing targets are silenced before the descent. The result is
/// deterministic.
pub fn optimize_cf_q(
    net: &RelayNetwork,
    mode: ConstraintMode,
    cap: usize,
) -> Result<RateResult> {
    let relay_count = net.relay_count();
    if relay_count > cap {
        return Err(Error::EnumerationCap {
            count: relay_count,
            cap,
        });
    }

    let doomed = doomed_relays(net, mode);
    let active: Vec<usize> = net.relays().filter(|i| !doomed.contains(i)).collect();

    let mut q_by_node = vec![f64::INFINITY; relay_count];
    let mut converged = true;

    if !active.is_empty() {
        // Large enough uniform noise always satisfies the constraints once
        // doomed relays are silenced (every forwarding factor then strictly
        // exceeds one), but the needed scale grows with the gains — so grow
        // geometrically until the profile is admissible.
        let mut init = INIT_Q_FACTOR * net.noises().iter().cloned().fold(0.0f64, f64::max);
        loop {
            for &i in &active {
                q_by_node[i - 2] = init;
            }
            let q = |node: usize| q_by_node[node - 2];
            if feasible(net, &active, &q, mode, None)? {
                break;
            }
            init *= 256.0;
            if init > MAX_INIT_Q {
                return Err(Error::InfeasibleProfile(format!(
                    "constraints fail even at Q = {:e} on every active relay",
                    init / 256.0
                )));
            }
        }

        // Ray pass: shrink every active coordinate by one common factor.
        let base = q_by_node.clone();
        let scale = descend_min_feasible(1.0, |s| {
            let q = |node: usize| base[node - 2] * s;
            feasible(net, &active, &q, mode, None)
        })?;
        for &i in &active {
            q_by_node[i - 2] *= scale;
        }

        converged = false;
        for _sweep in 0..MAX_SWEEPS {
            let mut max_rel_change = 0.0f64;
            for &i in &active {
                let current = q_by_node[i - 2];
                let good = descend_min_feasible(current, |candidate| {
                    let q = |node: usize| {
                        if node == i {
                            candidate
                        } else {
                            q_by_node[node - 2]
                        }
                    };
                    feasible(net, &active, &q, mode, Some(i))
                })?;
                let rel_change = (current - good).abs() / current;
                max_rel_change = max_rel_change.max(rel_change);
                q_by_node[i - 2] = good;
            }
            if max_rel_change < Q_REL_TOL {
                converged = true;
                break;
            }
        }
    }

    let profile = QuantizationProfile::new(q_by_node.clone())?;
    let rate = cf_rate_given_q(net, &profile)?;
    let check = cf_constraints_check(net, &profile, mode, cap)?;
    debug_assert!(check.passed, "optimizer must land on a feasible profile");
    let binding = match check.tightest {
        Some((inst, slack)) => Binding::Constraint {
            instance: inst.label(),
            slack,
        },
        None => Binding::None,
    };
    Ok(RateResult {
        strategy: StrategyKind::CompressForwardGeneral,
        rate,
        alpha: None,
        q: Some(q_by_node),
        binding,
        converged,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_t3() -> RelayNetwork {
        RelayNetwork::new(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![
                vec![0.0, 1.0, 1.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, 0.0],
            ],
        )
        .unwrap()
    }

    fn unit_t4() -> RelayNetwork {
        RelayNetwork::new(
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![
                vec![0.0, 1.0, 1.0, 1.0],
                vec![0.0, 0.0, 1.0, 1.0],
                vec![0.0, 1.0, 0.0, 1.0],
                vec![0.0, 0.0, 0.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn lambda_det_on_small_subsets() {
        let net = unit_t3();
        let p = QuantizationProfile::new(vec![1.0]).unwrap();
        // single relay: 1x1 matrix [P1 l12 + N2 + Q2] = [3]
        assert_eq!(lambda_det(&net, &[2], &p).unwrap(), 3.0);

        let net4 = unit_t4();
        let p4 = QuantizationProfile::new(vec![1.0, 1.0]).unwrap();
        // [[3,1],[1,3]] -> 8
        assert!((lambda_det(&net4, &[2, 3], &p4).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_det_with_negligible_source_power_is_diagonal() {
        let net = RelayNetwork::new(
            vec![1e-12, 1.0, 1.0],
            vec![2.0, 3.0, 1.0],
            unit_t4().gain_rows(),
        )
        .unwrap();
        let p = QuantizationProfile::new(vec![1.0, 1.0]).unwrap();
        let det = lambda_det(&net, &[2, 3], &p).unwrap();
        assert!((det - 3.0 * 4.0).abs() < 1e-9, "det = {det}");
    }

    #[test]
    fn lambda_det_validates_inputs() {
        let net = unit_t3();
        let p = QuantizationProfile::new(vec![1.0]).unwrap();
        assert!(lambda_det(&net, &[], &p).is_err());
        assert!(lambda_det(&net, &[3], &p).is_err()); // destination, not relay
        let silenced = QuantizationProfile::new(vec![f64::INFINITY]).unwrap();
        assert!(lambda_det(&net, &[2], &silenced).is_err());
    }

    #[test]
    fn psi_det_on_the_unit_network() {
        let net = unit_t3();
        let p = QuantizationProfile::new(vec![1.0]).unwrap();
        // [[3, 1], [1, 2]] -> 5
        assert!((psi_det(&net, &p).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cf_rate_given_q_anchors() {
        let net4 = unit_t4();
        let p = QuantizationProfile::new(vec![1.0, 1.0]).unwrap();
        let r = cf_rate_given_q(&net4, &p).unwrap();
        assert!((r - 0.5 * 3f64.log2()).abs() < 1e-12, "rate {r}");

        // silencing everything leaves the direct link
        let silenced = QuantizationProfile::new(vec![f64::INFINITY; 2]).unwrap();
        let r = cf_rate_given_q(&net4, &silenced).unwrap();
        assert!((r - 0.5).abs() < 1e-12);

        // vanishing noise recovers the broadcast cut
        let tiny = QuantizationProfile::new(vec![1e-13; 2]).unwrap();
        let r = cf_rate_given_q(&net4, &tiny).unwrap();
        let cinf = crate::broadcast_cut_capacity(&net4);
        assert!((r - cinf).abs() < 1e-10, "{r} vs {cinf}");
    }

    #[test]
    fn quantization_profile_validation() {
        assert!(QuantizationProfile::new(vec![0.0]).is_err());
        assert!(QuantizationProfile::new(vec![-1.0]).is_err());
        assert!(QuantizationProfile::new(vec![f64::NAN]).is_err());
        assert!(QuantizationProfile::new(vec![f64::INFINITY, 1.0]).is_ok());
        let net = unit_t3();
        let p = QuantizationProfile::new(vec![1.0, 1.0]).unwrap();
        assert!(cf_rate_given_q(&net, &p).is_err()); // wrong length
    }

    #[test]
    fn enumeration_counts_and_order() {
        // T = 3: one subset, one partition, one routing target (node 3).
        let t3 = enumerate_constraints(&unit_t3(), 8).unwrap();
        assert_eq!(t3.len(), 1);
        assert_eq!(t3[0].subset, vec![2]);
        assert_eq!(t3[0].blocks, vec![vec![2]]);
        assert_eq!(t3[0].routes, vec![3]);

        // T = 4: subsets {2}, {3}, {2,3} in bitmask order.
        //   {2}: routes {3,4}            -> 2
        //   {3}: routes {2,4}            -> 2
        //   {2,3}: {{2,3}} -> route {4}  -> 1
        //          {{2},{3}} -> 2 x 2    -> 4
        let t4 = enumerate_constraints(&unit_t4(), 8).unwrap();
        assert_eq!(t4.len(), 9);
        assert_eq!(t4[0].subset, vec![2]);
        assert_eq!(t4[0].routes, vec![3]);
        assert_eq!(t4[1].routes, vec![4]);
        assert_eq!(t4[2].subset, vec![3]);
        assert_eq!(t4[4].subset, vec![2, 3]);
        assert_eq!(t4[4].blocks, vec![vec![2, 3]]);
        assert_eq!(t4[4].routes, vec![4]);
        // the four split routings, lexicographic
        assert_eq!(t4[5].routes, vec![3, 2]);
        assert_eq!(t4[6].routes, vec![3, 4]);
        assert_eq!(t4[7].routes, vec![4, 2]);
        assert_eq!(t4[8].routes, vec![4, 4]);
    }

    #[test]
    fn enumeration_respects_the_cap() {
        assert!(matches!(
            enumerate_constraints(&unit_t4(), 1),
            Err(Error::EnumerationCap { count: 2, cap: 1 })
        ));
    }

    #[test]
    fn single_relay_constraint_threshold_is_four() {
        // Q2 (1 + l23 P2 / (l13 P1 + N3)) >= l12 P1 + N2 + Q2
        // with unit parameters: Q2 * 1.5 >= 2 + Q2  =>  Q2 >= 4.
        let net = unit_t3();
        for (q, expect) in [(4.0, true), (3.999, false), (1e9, true)] {
            let p = QuantizationProfile::new(vec![q]).unwrap();
            let check = cf_constraints_check(&net, &p, ConstraintMode::ForAll, 8).unwrap();
            assert_eq!(check.passed, expect, "Q = {q}");
            let (inst, slack) = check.tightest.unwrap();
            assert_eq!(inst.label(), "S={2} B={2} r=(3)");
            // slack = Q * denom / Lambda = 1.5 Q / (2 + Q); crosses 1 at Q = 4
            let expect_slack = 1.5 * q / (2.0 + q);
            assert!((slack - expect_slack).abs() < 1e-12, "slack {slack}");
        }
    }

    #[test]
    fn silenced_relays_make_the_check_vacuous() {
        let net = unit_t3();
        let p = QuantizationProfile::new(vec![f64::INFINITY]).unwrap();
        let check = cf_constraints_check(&net, &p, ConstraintMode::ForAll, 8).unwrap();
        assert!(check.passed);
        assert!(check.tightest.is_none());
    }

    #[test]
    fn optimizer_reaches_the_single_relay_threshold() {
        let net = unit_t3();
        for mode in [ConstraintMode::ForAll, ConstraintMode::Exists] {
            let r = optimize_cf_q(&net, mode, 8).unwrap();
            assert!(r.converged);
            let q = r.q.as_ref().unwrap()[0];
            assert!((q - 4.0).abs() < 1e-6, "Q = {q} under {mode:?}");
            let expect = 0.5 * (2.2f64).log2();
            assert!((r.rate - expect).abs() < 1e-7, "rate {}", r.rate);
            match &r.binding {
                Binding::Constraint { instance, slack } => {
                    assert_eq!(instance, "S={2} B={2} r=(3)");
                    assert!((slack - 1.0).abs() < 1e-6, "slack {slack}");
                }
                other => panic!("unexpected binding {other:?}"),
            }
        }
    }

    #[test]
    fn optimizer_tracks_the_closed_form_threshold() {
        // Q* = (l12 P1 + N2)(l13 P1 + N3) / (l23 P2) for one relay.
        let net = RelayNetwork::new(
            vec![2.0, 5.0],
            vec![0.5, 2.0],
            vec![
                vec![0.0, 3.0, 0.25],
                vec![0.0, 0.0, 1.5],
                vec![0.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let expect = (3.0 * 2.0 + 0.5) * (0.25 * 2.0 + 2.0) / (1.5 * 5.0);
        let r = optimize_cf_q(&net, ConstraintMode::ForAll, 8).unwrap();
        let q = r.q.as_ref().unwrap()[0];
        assert!(
            (q - expect).abs() < 1e-6 * expect,
            "Q = {q}, closed form {expect}"
        );
    }

    #[test]
    fn optimizer_silences_a_relay_with_no_outgoing_link() {
        let net = RelayNetwork::new(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![
                vec![0.0, 1.0, 1.0],
                vec![0.0, 0.0, 0.0], // relay cannot reach the destination
                vec![0.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let r = optimize_cf_q(&net, ConstraintMode::ForAll, 8).unwrap();
        assert_eq!(r.q, Some(vec![f64::INFINITY]));
        assert!((r.rate - 0.5).abs() < 1e-12);
        assert_eq!(r.binding, Binding::None);
        assert!(r.converged);
    }

    #[test]
    fn optimizer_approaches_the_broadcast_cut_at_large_relay_power() {
        let net = unit_t3().with_power(2, 1e6).unwrap();
        let r = optimize_cf_q(&net, ConstraintMode::ForAll, 8).unwrap();
        let q = r.q.as_ref().unwrap()[0];
        assert!((q - 4e-6).abs() < 1e-9, "Q = {q}");
        let cinf = crate::broadcast_cut_capacity(&net);
        assert!(cinf - r.rate > 0.0 && cinf - r.rate < 1e-5, "gap {}", cinf - r.rate);
    }

    #[test]
    fn optimizer_rejects_oversized_relay_sets() {
        assert!(matches!(
            optimize_cf_q(&unit_t4(), ConstraintMode::ForAll, 1),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn constraint_rhs_is_nonincreasing_in_relay_power() {
        let net = unit_t4();
        let p = QuantizationProfile::new(vec![1.0, 1.0]).unwrap();
        let boosted = net.with_power(2, 2.0).unwrap();
        for inst in enumerate_constraints(&net, 8).unwrap() {
            let before = inst.rhs(&net, &p).unwrap();
            let after = inst.rhs(&boosted, &p).unwrap();
            assert!(
                after <= before + 1e-12,
                "rhs grew with relay power at {}",
                inst.label()
            );
        }
    }
}
