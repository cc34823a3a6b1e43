//! Computable entropy measures for scalar lists: quicksort entropy (optimal
//! respectful partition of the rank list), TimSort entropy (optimal run
//! partition), multiset entropy, and the information-theoretic lower bound of
//! a size vector.

use thiserror::Error;

use crate::rank::rank_profile;

/// A sequence of part sizes (s_1, ..., s_k) with sum n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeVector {
    pub sizes: Vec<usize>,
}

impl SizeVector {
    pub fn new(sizes: Vec<usize>) -> Self {
        SizeVector { sizes }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("size vector sums to {got}, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("size vector contains an empty part")]
    EmptyPart,
}

/// Result of an entropy computation: the value in bits, one achieving
/// partition (inclusive 1-based intervals; ranks for the quicksort entropy,
/// positions for the TimSort entropy, rank singletons for the multiset
/// entropy), the element count of each part, and the induced universe lower
/// bound log2(n! / prod s_i!).
#[derive(Clone, Debug, serde::Serialize)]
pub struct EntropyReport {
    pub value_bits: f64,
    pub partition: Vec<(usize, usize)>,
    pub part_sizes: Vec<usize>,
    pub lower_bound_bits: f64,
}

fn weight(elems: usize, n: usize) -> f64 {
    if elems == 0 || n == 0 {
        0.0
    } else {
        (elems as f64 / n as f64) * ((n as f64 / elems as f64).log2())
    }
}

/// Entropy of a size vector: sum (s_i/n) log2(n/s_i).
pub fn size_vector_entropy(sizes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    sizes.iter().map(|&s| weight(s, n)).sum()
}

fn log2_factorial(m: usize) -> f64 {
    (2..=m).map(|i| (i as f64).log2()).sum()
}

/// log2(n!) - sum log2(s_i!), the information-theoretic lower bound for the
/// universe defined by the size vector.
pub fn universe_lower_bound(s: &SizeVector, n: usize) -> Result<f64, EntropyError> {
    if s.sizes.contains(&0) {
        return Err(EntropyError::EmptyPart);
    }
    let got = s.total();
    if got != n {
        return Err(EntropyError::SizeMismatch { got, expected: n });
    }
    Ok(log2_factorial(n) - s.sizes.iter().map(|&x| log2_factorial(x)).sum::<f64>())
}

/// Minimum of sum (|R_i|/n) log2(n/|R_i|) over respectful partitions of the
/// rank list into contiguous intervals, by interval DP. |R_i| counts elements
/// whose rank lies in the interval; an interval is increasing-feasible iff the
/// subsequence of elements with ranks in it is non-decreasing in rank
/// (equal-rank items impose no constraint), and symmetrically for decreasing.
pub fn quicksort_entropy(values: &[i64]) -> EntropyReport {
    let n = values.len();
    if n == 0 {
        return EntropyReport {
            value_bits: 0.0,
            partition: vec![],
            part_sizes: vec![],
            lower_bound_bits: 0.0,
        };
    }
    let rp = rank_profile(values);
    let k = rp.distinct_ranks();
    let seq = &rp.rank_of_position; // rank per position
    let counts = rp.rank_counts();
    let mut pref = vec![0usize; k + 1];
    for r in 1..=k {
        pref[r] = pref[r - 1] + counts[r - 1];
    }

    // Feasibility of rank interval [lo, hi] (1-based, inclusive).
    let feasible = |lo: usize, hi: usize, increasing: bool| -> bool {
        let mut prev: Option<usize> = None;
        for &r in seq {
            if r < lo || r > hi {
                continue;
            }
            if let Some(p) = prev {
                if increasing {
                    if r < p {
                        return false;
                    }
                } else if r > p {
                    return false;
                }
            }
            prev = Some(r);
        }
        true
    };

    // Earliest feasible start per right endpoint; monotone in hi.
    let mut inc_start = vec![1usize; k + 1];
    let mut dec_start = vec![1usize; k + 1];
    for hi in 1..=k {
        let mut lo = if hi == 1 { 1 } else { inc_start[hi - 1] };
        while !feasible(lo, hi, true) {
            lo += 1;
        }
        inc_start[hi] = lo;
        let mut lo = if hi == 1 { 1 } else { dec_start[hi - 1] };
        while !feasible(lo, hi, false) {
            lo += 1;
        }
        dec_start[hi] = lo;
    }

    interval_dp(
        k,
        n,
        |hi| inc_start[hi].min(dec_start[hi]),
        |lo, hi| pref[hi] - pref[lo - 1],
    )
}

/// Minimum of sum (|I_i|/n) log2(n/|I_i|) over ordered partitions into
/// contiguous monotone runs, by interval DP over positions.
pub fn timsort_entropy(values: &[i64]) -> EntropyReport {
    let n = values.len();
    if n == 0 {
        return EntropyReport {
            value_bits: 0.0,
            partition: vec![],
            part_sizes: vec![],
            lower_bound_bits: 0.0,
        };
    }
    // Earliest start of a non-decreasing (resp. non-increasing) run ending at j.
    let mut inc_start = vec![1usize; n + 1];
    let mut dec_start = vec![1usize; n + 1];
    for j in 2..=n {
        inc_start[j] = if values[j - 2] <= values[j - 1] {
            inc_start[j - 1]
        } else {
            j
        };
        dec_start[j] = if values[j - 2] >= values[j - 1] {
            dec_start[j - 1]
        } else {
            j
        };
    }
    interval_dp(n, n, |j| inc_start[j].min(dec_start[j]), |lo, hi| hi - lo + 1)
}

/// sum (|I_i|/n) log2(n/|I_i|) over maximal equal-value groups. Order
/// independent.
pub fn multiset_entropy(values: &[i64]) -> EntropyReport {
    let n = values.len();
    let rp = rank_profile(values);
    let sizes = rp.rank_counts();
    let value_bits = size_vector_entropy(&sizes);
    let lower = universe_lower_bound(&SizeVector::new(sizes.clone()), n).unwrap_or(0.0);
    EntropyReport {
        value_bits,
        partition: (1..=sizes.len()).map(|r| (r, r)).collect(),
        part_sizes: sizes,
        lower_bound_bits: lower,
    }
}

/// Shared DP core: minimize sum of weight(count(lo, hi)) over partitions of
/// [1, k] into intervals with lo >= min_start(hi).
fn interval_dp(
    k: usize,
    n: usize,
    min_start: impl Fn(usize) -> usize,
    count: impl Fn(usize, usize) -> usize,
) -> EntropyReport {
    let mut cost = vec![f64::INFINITY; k + 1];
    let mut from = vec![0usize; k + 1];
    cost[0] = 0.0;
    for hi in 1..=k {
        for lo in min_start(hi)..=hi {
            let c = cost[lo - 1] + weight(count(lo, hi), n);
            if c < cost[hi] {
                cost[hi] = c;
                from[hi] = lo;
            }
        }
    }
    let mut partition = Vec::new();
    let mut part_sizes = Vec::new();
    let mut hi = k;
    while hi > 0 {
        let lo = from[hi];
        partition.push((lo, hi));
        part_sizes.push(count(lo, hi));
        hi = lo - 1;
    }
    partition.reverse();
    part_sizes.reverse();
    let lower = universe_lower_bound(&SizeVector::new(part_sizes.clone()), n).unwrap_or(0.0);
    EntropyReport {
        value_bits: cost[k],
        partition,
        part_sizes,
        lower_bound_bits: lower,
    }
}
