//! Rank utilities for scalar lists. Duplicates share a rank; ranks are
//! contiguous integers starting at 1.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    /// rank_of_position[i] is the 1-based rank of the value at position i.
    pub rank_of_position: Vec<usize>,
    /// positions_of_rank[r-1] lists the positions holding rank r, in input order.
    pub positions_of_rank: Vec<Vec<usize>>,
}

impl RankProfile {
    pub fn distinct_ranks(&self) -> usize {
        self.positions_of_rank.len()
    }

    /// Number of elements carrying each rank.
    pub fn rank_counts(&self) -> Vec<usize> {
        self.positions_of_rank.iter().map(|v| v.len()).collect()
    }
}

pub fn rank_profile(values: &[i64]) -> RankProfile {
    let mut sorted: Vec<i64> = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let rank_of = |v: i64| sorted.binary_search(&v).expect("value present") + 1;
    let rank_of_position: Vec<usize> = values.iter().map(|&v| rank_of(v)).collect();
    let mut positions_of_rank = vec![Vec::new(); sorted.len()];
    for (i, &r) in rank_of_position.iter().enumerate() {
        positions_of_rank[r - 1].push(i);
    }
    RankProfile {
        rank_of_position,
        positions_of_rank,
    }
}
