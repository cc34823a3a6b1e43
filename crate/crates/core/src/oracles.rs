//! Independent brute-force oracles used by the test suites. These are kept
//! deliberately naive and separate from the algorithm implementations they
//! check; only use them at desk scale.

use crate::geom::{dominates, strictly_inside_triangle, Instance};
use crate::rank::rank_profile;

fn weight(elems: usize, n: usize) -> f64 {
    if elems == 0 {
        0.0
    } else {
        (elems as f64 / n as f64) * (n as f64 / elems as f64).log2()
    }
}

/// Exhaustive minimum over all contiguous partitions of the rank list,
/// checking feasibility of each interval directly. Exponential in the number
/// of distinct ranks.
pub fn quicksort_entropy_exhaustive(values: &[i64]) -> f64 {
    let n = values.len();
    let rp = rank_profile(values);
    let k = rp.distinct_ranks();
    let seq = &rp.rank_of_position;
    let counts = rp.rank_counts();
    assert!(k <= 20, "oracle limited to 20 distinct ranks");

    let feasible = |lo: usize, hi: usize| -> bool {
        let sub: Vec<usize> = seq.iter().copied().filter(|&r| r >= lo && r <= hi).collect();
        sub.windows(2).all(|w| w[0] <= w[1]) || sub.windows(2).all(|w| w[0] >= w[1])
    };

    let mut best = f64::INFINITY;
    // Bits of `mask` mark a boundary after each rank.
    for mask in 0u32..(1 << (k.max(1) - 1)) {
        let mut lo = 1usize;
        let mut total = 0.0;
        let mut ok = true;
        for hi in 1..=k {
            let boundary = hi == k || (mask >> (hi - 1)) & 1 == 1;
            if boundary {
                if !feasible(lo, hi) {
                    ok = false;
                    break;
                }
                let elems: usize = (lo..=hi).map(|r| counts[r - 1]).sum();
                total += weight(elems, n);
                lo = hi + 1;
            }
        }
        if ok && total < best {
            best = total;
        }
    }
    best
}

/// Exhaustive minimum over all partitions of the positions into contiguous
/// monotone runs.
pub fn timsort_entropy_exhaustive(values: &[i64]) -> f64 {
    let n = values.len();
    assert!(n <= 20, "oracle limited to n <= 20");
    let is_run = |lo: usize, hi: usize| -> bool {
        let sub = &values[lo - 1..hi];
        sub.windows(2).all(|w| w[0] <= w[1]) || sub.windows(2).all(|w| w[0] >= w[1])
    };
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << (n.max(1) - 1)) {
        let mut lo = 1usize;
        let mut total = 0.0;
        let mut ok = true;
        for hi in 1..=n {
            let boundary = hi == n || (mask >> (hi - 1)) & 1 == 1;
            if boundary {
                if !is_run(lo, hi) {
                    ok = false;
                    break;
                }
                total += weight(hi - lo + 1, n);
                lo = hi + 1;
            }
        }
        if ok && total < best {
            best = total;
        }
    }
    best
}

/// Positions of the Pareto-maximal points, ordered by increasing x. O(n^2).
pub fn pareto_front_oracle(inst: &Instance) -> Vec<usize> {
    let pts = inst.points();
    let mut front: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            !pts.iter()
                .enumerate()
                .any(|(j, &q)| j != i && dominates(q, pts[i]))
        })
        .collect();
    front.sort_by_key(|&i| pts[i].x);
    front
}

/// Positions of the convex hull vertices (unordered set, returned sorted by
/// position). A point is on the hull iff it is not strictly inside any
/// triangle of other points. O(n^4) as written; desk scale only.
pub fn hull_set_oracle(inst: &Instance) -> Vec<usize> {
    let pts = inst.points();
    let n = pts.len();
    (0..n)
        .filter(|&i| {
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        if a == i || b == i || c == i {
                            continue;
                        }
                        if strictly_inside_triangle(pts[i], pts[a], pts[b], pts[c]) {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .collect()
}
