//! Scalar search primitives and set-partition enumeration.
//!
//! The rate optimizations in this crate reduce to three small problems:
//!
//! * maximizing a quasi-concave objective on a closed interval (the
//!   time-sharing / correlation parameter searches),
//! * finding the smallest argument where a monotone predicate flips to true
//!   (quantization-noise tightening, power thresholds),
//! * enumerating every set partition of a small index set (the
//!   compress-and-forward constraint families).
//!
//! All three are deterministic: same inputs, same outputs, no global state.

use crate::{Error, Result};

/// Golden ratio step factor, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Hard cap on set-partition ground-set size. Bell(12) = 4_213_597 is the
/// largest count that still enumerates in well under a second.
pub const MAX_PARTITION_ELEMENTS: usize = 12;

// ---------------------------------------------------------------------------
// Golden-section maximization
// ---------------------------------------------------------------------------

/// Search interval and tolerance for [`golden_max`].
#[derive(Debug, Clone, Copy)]
pub struct SearchSpec {
    pub lo: f64,
    pub hi: f64,
    /// Absolute tolerance on the argument.
    pub tol: f64,
}

impl SearchSpec {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter {
                name: "search interval",
                requirement: "finite with lo < hi",
                value: hi - lo,
            });
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tol",
                requirement: "finite and > 0",
                value: tol,
            });
        }
        Ok(Self { lo, hi, tol })
    }

    /// Unit interval with the argument tolerance used by the strategy rates.
    pub fn unit_alpha() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            tol: 1e-10,
        }
    }

    /// Iterations needed to shrink `hi - lo` below `tol` by golden steps.
    pub fn iteration_bound(&self) -> usize {
        let ratio = (self.hi - self.lo) / self.tol;
        if ratio <= 1.0 {
            return 2;
        }
        (ratio.ln() / (1.0 / INV_PHI).ln()).ceil() as usize + 2
    }
}

/// Result of a scalar maximization.
#[derive(Debug, Clone, Copy)]
pub struct GoldenMax {
    /// Argument of the maximum. Ties resolve to the smallest argument the
    /// search can certify, so degenerate (flat) objectives report `lo`.
    pub arg: f64,
    pub value: f64,
    /// Golden-section iterations consumed; bounded by
    /// [`SearchSpec::iteration_bound`].
    pub iterations: usize,
}

/// Maximizes a quasi-concave `f` on `[spec.lo, spec.hi]`.
///
/// The objectives this crate feeds in are minima of one nonincreasing and one
/// nondecreasing term, which are quasi-concave but kinked, so only function
/// values are used. A 1001-point guard grid catches numerical violations of
/// unimodality: if any grid point beats the golden-section result, the search
/// re-runs on the bracket around the best grid point. Evaluations never leave
/// the interval. Returns an error as soon as `f` yields NaN.
pub fn golden_max<F: FnMut(f64) -> f64>(spec: SearchSpec, mut f: F) -> Result<GoldenMax> {
    let mut best = golden_core(spec, &mut f)?;

    // Guard grid against non-unimodal numerics; also anchors tie-breaking.
    const GUARD_POINTS: usize = 1001;
    let step = (spec.hi - spec.lo) / (GUARD_POINTS - 1) as f64;
    let mut grid_best_idx = 0usize;
    let mut grid_best_val = f64::NEG_INFINITY;
    for k in 0..GUARD_POINTS {
        let x = if k + 1 == GUARD_POINTS {
            spec.hi
        } else {
            spec.lo + step * k as f64
        };
        let v = eval(&mut f, x)?;
        if v > grid_best_val {
            grid_best_val = v;
            grid_best_idx = k;
        }
    }
    if grid_best_val > best.value {
        let lo = spec.lo + step * grid_best_idx.saturating_sub(1) as f64;
        let hi = (spec.lo + step * (grid_best_idx + 1) as f64).min(spec.hi);
        let refined = golden_core(SearchSpec { lo, hi, ..spec }, &mut f)?;
        if refined.value > best.value {
            best = GoldenMax {
                iterations: best.iterations + refined.iterations,
                ..refined
            };
        }
    }

    // Flat-top objectives (one term constant) have a plateau of maximizers;
    // report the left endpoint when it attains the optimum.
    let at_lo = eval(&mut f, spec.lo)?;
    if at_lo >= best.value - 1e-12 * best.value.abs().max(1.0) && at_lo >= best.value - 1e-300 {
        return Ok(GoldenMax {
            arg: spec.lo,
            value: at_lo.max(best.value),
            iterations: best.iterations,
        });
    }
    Ok(best)
}

fn golden_core<F: FnMut(f64) -> f64>(spec: SearchSpec, f: &mut F) -> Result<GoldenMax> {
    let (mut lo, mut hi) = (spec.lo, spec.hi);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(f, x1)?;
    let mut f2 = eval(f, x2)?;
    let mut iterations = 0usize;

    while hi - lo > spec.tol {
        iterations += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(f, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(f, x1)?;
        }
    }

    let mid = 0.5 * (lo + hi);
    let fmid = eval(f, mid)?;
    let (arg, value) = if f1 >= f2 && f1 >= fmid {
        (x1, f1)
    } else if f2 >= fmid {
        (x2, f2)
    } else {
        (mid, fmid)
    };
    Ok(GoldenMax {
        arg,
        value,
        iterations,
    })
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::NanObjective { arg: x });
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Monotone bisection
// ---------------------------------------------------------------------------

/// Finds the smallest `x` in `[lo, hi]` with `pred(x)` true, to absolute
/// tolerance `tol`, assuming `pred` is monotone (false then true).
///
/// Returns `lo` when the predicate already holds there, and
/// [`Error::Infeasible`] when it fails at `hi`.
pub fn bisect_min_feasible<P: FnMut(f64) -> bool>(
    mut pred: P,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "bisection interval",
            requirement: "finite with lo <= hi",
            value: hi - lo,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            requirement: "> 0",
            value: tol,
        });
    }
    if pred(lo) {
        return Ok(lo);
    }
    if !pred(hi) {
        return Err(Error::Infeasible { lo, hi });
    }
    let (mut bad, mut good) = (lo, hi);
    while good - bad > tol {
        let mid = 0.5 * (bad + good);
        if mid <= bad || mid >= good {
            break; // interval below float resolution
        }
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

// ---------------------------------------------------------------------------
// Set partitions
// ---------------------------------------------------------------------------

/// Iterator over all set partitions of `{0, 1, .., n-1}`.
///
/// Partitions are produced in lexicographic order of their restricted-growth
/// strings: the string `a` assigns element `i` to block `a[i]`, with
/// `a[0] = 0` and `a[i] <= max(a[..i]) + 1`. Blocks therefore come out
/// ordered by their smallest element. The count over all partitions equals
/// the Bell number B(n).
pub fn set_partitions(n: usize) -> Result<SetPartitions> {
    if n == 0 || n > MAX_PARTITION_ELEMENTS {
        return Err(Error::PartitionCap {
            n,
            cap: MAX_PARTITION_ELEMENTS,
        });
    }
    Ok(SetPartitions {
        rgs: vec![0; n],
        fresh: true,
    })
}

#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    fresh: bool,
}

impl SetPartitions {
    fn blocks(&self) -> Vec<Vec<usize>> {
        let nblocks = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (elem, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(elem);
        }
        blocks
    }

    /// Advances to the next restricted-growth string; false once exhausted.
    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        // Rightmost position that can still be incremented.
        for i in (1..n).rev() {
            let prefix_max = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for j in i + 1..n {
                    self.rgs[j] = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.fresh {
            self.fresh = false;
            return Some(self.blocks());
        }
        if self.advance() {
            Some(self.blocks())
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_smooth_maximum() {
        let spec = SearchSpec::new(0.0, 1.0, 1e-10).unwrap();
        let out = golden_max(spec, |x| -(x - 0.3) * (x - 0.3)).unwrap();
        assert!((out.arg - 0.3).abs() < 1e-8, "arg = {}", out.arg);
        assert!(out.value > -1e-16, "value = {}", out.value);
    }

    #[test]
    fn golden_finds_kinked_maximum() {
        // min of a decreasing and an increasing line, crossing at x = 0.4.
        let spec = SearchSpec::unit_alpha();
        let out = golden_max(spec, |x| (1.0 - x).min(1.5 * x)).unwrap();
        assert!((out.arg - 0.4).abs() < 1e-8, "arg = {}", out.arg);
        assert!((out.value - 0.6).abs() < 1e-9, "value = {}", out.value);
    }

    #[test]
    fn golden_reports_lo_on_flat_objective() {
        let spec = SearchSpec::unit_alpha();
        let out = golden_max(spec, |_| 2.5).unwrap();
        assert_eq!(out.arg, 0.0);
        assert_eq!(out.value, 2.5);
    }

    #[test]
    fn golden_respects_iteration_bound() {
        let spec = SearchSpec::new(0.0, 1.0, 1e-10).unwrap();
        let out = golden_max(spec, |x| -(x - 0.77) * (x - 0.77)).unwrap();
        assert!(
            out.iterations <= spec.iteration_bound(),
            "{} iterations exceed bound {}",
            out.iterations,
            spec.iteration_bound()
        );
    }

    #[test]
    fn golden_rejects_nan_objective() {
        let spec = SearchSpec::unit_alpha();
        let err = golden_max(spec, |x| if x > 0.5 { f64::NAN } else { x }).unwrap_err();
        assert!(matches!(err, Error::NanObjective { .. }));
    }

    #[test]
    fn golden_rejects_bad_interval() {
        assert!(SearchSpec::new(1.0, 0.0, 1e-10).is_err());
        assert!(SearchSpec::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bisect_locates_step() {
        let x = bisect_min_feasible(|x| x >= 4.0, 0.0, 1e6, 1e-9).unwrap();
        assert!((x - 4.0).abs() <= 1e-9 + 1e-12, "x = {x}");
    }

    #[test]
    fn bisect_returns_lo_when_always_true() {
        let x = bisect_min_feasible(|_| true, 2.0, 10.0, 1e-9).unwrap();
        assert_eq!(x, 2.0);
    }

    #[test]
    fn bisect_errors_when_never_true() {
        let err = bisect_min_feasible(|_| false, 0.0, 10.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn partitions_of_three_elements() {
        let got: Vec<_> = set_partitions(3).unwrap().collect();
        let expect: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0, 1, 2]],
            vec![vec![0, 1], vec![2]],
            vec![vec![0, 2], vec![1]],
            vec![vec![0], vec![1, 2]],
            vec![vec![0], vec![1], vec![2]],
        ];
        assert_eq!(got, expect);
    }

    #[test]
    fn partition_counts_match_bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140];
        for (i, &b) in bell.iter().enumerate() {
            let n = i + 1;
            assert_eq!(set_partitions(n).unwrap().count(), b, "Bell({n})");
        }
    }

    #[test]
    fn partitions_cover_and_are_disjoint() {
        for partition in set_partitions(5).unwrap() {
            let mut seen = vec![false; 5];
            for block in &partition {
                assert!(!block.is_empty());
                for &e in block {
                    assert!(!seen[e], "element {e} repeated");
                    seen[e] = true;
                }
            }
            assert!(seen.iter().all(|&s| s), "partition must cover the set");
        }
    }

    #[test]
    fn partitions_reject_zero_and_oversized_sets() {
        assert!(set_partitions(0).is_err());
        assert!(set_partitions(MAX_PARTITION_ELEMENTS + 1).is_err());
    }
}
