//! Shared oracles for the integration suites.
//!
//! Everything here recomputes a library quantity by an independent route —
//! brute-force grids instead of golden-section search, cofactor expansions
//! and the matrix determinant lemma instead of LU/Cholesky factorizations,
//! hand-reduced closed forms instead of the constraint machinery — so a bug
//! would have to appear twice, in different shapes, to slip through.

#![allow(dead_code)] // each test binary uses its own slice of this module

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaymesh::RelayNetwork;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One positive scalar in the moderate range every randomized suite uses.
pub fn draw(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.1..=10.0)
}

/// Random fully-connected three-node network.
pub fn random_t3(rng: &mut ChaCha8Rng) -> RelayNetwork {
    let powers = vec![draw(rng), draw(rng)];
    let noises = vec![draw(rng), draw(rng)];
    let gains = vec![
        vec![0.0, draw(rng), draw(rng)],
        vec![0.0, 0.0, draw(rng)],
        vec![0.0, 0.0, 0.0],
    ];
    RelayNetwork::new(powers, noises, gains).expect("random T=3 parameters are valid")
}

/// Random four-node network with both relays hearing the source, each
/// other, and reaching the destination.
pub fn random_t4(rng: &mut ChaCha8Rng) -> RelayNetwork {
    let powers = vec![draw(rng), draw(rng), draw(rng)];
    let noises = vec![draw(rng), draw(rng), draw(rng)];
    let gains = vec![
        vec![0.0, draw(rng), draw(rng), draw(rng)],
        vec![0.0, 0.0, draw(rng), draw(rng)],
        vec![0.0, draw(rng), 0.0, draw(rng)],
        vec![0.0, 0.0, 0.0, 0.0],
    ];
    RelayNetwork::new(powers, noises, gains).expect("random T=4 parameters are valid")
}

// ---------------------------------------------------------------------------
// Brute-force maximization
// ---------------------------------------------------------------------------

/// Maximum of `f` on `[lo, hi]` by a 100_001-point pass plus two 1001-point
/// refinements around the incumbent bracket.
///
/// The final bracket spans ~8e-12 of the original interval, which pins the
/// max of a kinked objective with O(1) slopes to well below 1e-8 — a raw
/// dense grid alone can undershoot a kink by slope * step and is not enough.
pub fn grid_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let mut best = f64::NEG_INFINITY;
    for points in [100_001usize, 1001, 1001] {
        let step = (hi - lo) / (points - 1) as f64;
        let mut best_k = 0usize;
        let mut pass_best = f64::NEG_INFINITY;
        for k in 0..points {
            let x = (lo + step * k as f64).min(hi);
            let v = f(x);
            if v > pass_best {
                pass_best = v;
                best_k = k;
            }
        }
        best = best.max(pass_best);
        let bracket_lo = lo + step * best_k.saturating_sub(1) as f64;
        let bracket_hi = (lo + step * (best_k + 1) as f64).min(hi);
        lo = bracket_lo;
        hi = bracket_hi;
    }
    best
}

// ---------------------------------------------------------------------------
// Determinant oracles
// ---------------------------------------------------------------------------

pub fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `det(diag(d) + p * v v^T)` by the matrix determinant lemma:
/// `prod(d) * (1 + p * sum(v_i^2 / d_i))`.
pub fn rank_one_det(d: &[f64], v: &[f64], p: f64) -> f64 {
    assert_eq!(d.len(), v.len());
    let base: f64 = d.iter().product();
    let shift: f64 = d.iter().zip(v).map(|(&di, &vi)| vi * vi / di).sum();
    base * (1.0 + p * shift)
}

// ---------------------------------------------------------------------------
// Closed-form three-node anchors
// ---------------------------------------------------------------------------

fn l(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

fn t3_params(net: &RelayNetwork) -> (f64, f64, f64, f64, f64, f64, f64) {
    assert_eq!(net.node_count(), 3, "closed-form oracles are three-node");
    (
        net.power(1),
        net.power(2),
        net.noise(2),
        net.noise(3),
        net.gain(1, 2),
        net.gain(1, 3),
        net.gain(2, 3),
    )
}

/// Cut-set bound: grid max over the coherent power split of
/// min(broadcast side, multiple-access side).
pub fn oracle_cs(net: &RelayNetwork) -> f64 {
    let (p1, p2, n2, n3, l12, l13, l23) = t3_params(net);
    grid_max(0.0, 1.0, |a| {
        let broadcast = l((l13 / n3 + l12 / n2) * p1 * (1.0 - a));
        let mac = l((p1 * l13 + p2 * l23 + 2.0 * (a * l13 * l23 * p1 * p2).sqrt()) / n3);
        broadcast.min(mac)
    })
}

/// Decode-and-forward: like the cut-set bound but the broadcast side keeps
/// only the source-relay link.
pub fn oracle_df(net: &RelayNetwork) -> f64 {
    let (p1, p2, n2, n3, l12, l13, l23) = t3_params(net);
    grid_max(0.0, 1.0, |a| {
        let decode = l(p1 * l12 * (1.0 - a) / n2);
        let mac = l((p1 * l13 + p2 * l23 + 2.0 * (a * l13 * l23 * p1 * p2).sqrt()) / n3);
        decode.min(mac)
    })
}

/// Single-relay compress-and-forward quantization noise, closed form.
/// A severed relay-destination link sends it to infinity.
pub fn oracle_cf_q(net: &RelayNetwork) -> f64 {
    let (p1, p2, n2, n3, l12, l13, l23) = t3_params(net);
    ((l13 * n2 + l12 * n3) * p1 + n2 * n3) / (p2 * l23)
}

/// Single-relay compress-and-forward rate, closed form (no search).
pub fn oracle_cf(net: &RelayNetwork) -> f64 {
    let (p1, _, n2, n3, l12, l13, _) = t3_params(net);
    let q = oracle_cf_q(net);
    l(p1 * l13 / n3 + p1 * l12 / (n2 + q))
}

/// Non-cooperative two-hop time sharing; both terms vanish at their
/// endpoint by continuity.
pub fn oracle_mh(net: &RelayNetwork) -> f64 {
    let (p1, p2, n2, n3, l12, _, l23) = t3_params(net);
    grid_max(0.0, 1.0, |a| {
        let src = if a >= 1.0 {
            0.0
        } else {
            (1.0 - a) * l(p1 * l12 / ((1.0 - a) * n2))
        };
        let relay = if a <= 0.0 {
            0.0
        } else {
            a * l(p2 * l23 / (a * n3))
        };
        src.min(relay)
    })
}

/// Admissibility threshold for the lone relay's quantization noise under
/// the general constraint family, hand-reduced:
/// `(l12 P1 + N2)(l13 P1 + N3) / (l23 P2)`.
pub fn oracle_general_q_threshold(net: &RelayNetwork) -> f64 {
    let (p1, p2, n2, n3, l12, l13, l23) = t3_params(net);
    (l12 * p1 + n2) * (l13 * p1 + n3) / (l23 * p2)
}
