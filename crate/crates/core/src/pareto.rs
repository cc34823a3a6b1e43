//! Truncated Pareto-front computation with witness output, the linear-time
//! verifier, and the (truncated) quadrant tree whose depth cost bounds the
//! meter total on region-respecting inputs.

use thiserror::Error;

use crate::geom::{dominates, Instance, Point};
use crate::meter::CostMeter;
use crate::region::RegionSet;
use crate::select::median_by;

/// Positions of the Pareto-maximal points, ordered by increasing x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontList {
    pub indices: Vec<usize>,
}

/// One entry per input position: None for front points, otherwise the position
/// of a dominating point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParetoWitnessList {
    pub witnesses: Vec<Option<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParetoError {
    #[error("two points share an x-coordinate")]
    SharedX,
    #[error("two points share a y-coordinate")]
    SharedY,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParetoCertError {
    #[error("front index {0} out of range or repeated")]
    BadFrontIndex(usize),
    #[error("front is not strictly increasing in x at position {0}")]
    FrontNotIncreasingX(usize),
    #[error("front is not strictly decreasing in y at position {0}")]
    FrontNotDecreasingY(usize),
    #[error("witness of point {0} is invalid")]
    BadWitnessIndex(usize),
    #[error("witness of point {0} does not dominate it")]
    WitnessDoesNotDominate(usize),
    #[error("front point {0} carries a witness")]
    FrontPointHasWitness(usize),
    #[error("sentinel count {got} does not match front size {front}")]
    SentinelCountMismatch { got: usize, front: usize },
}

fn check_distinct_coords(inst: &Instance) -> Result<(), ParetoError> {
    let mut xs: Vec<i64> = inst.points().iter().map(|p| p.x).collect();
    let mut ys: Vec<i64> = inst.points().iter().map(|p| p.y).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(ParetoError::SharedX);
    }
    if ys.windows(2).any(|w| w[0] == w[1]) {
        return Err(ParetoError::SharedY);
    }
    Ok(())
}

/// Compute the Pareto front and a witness list. Every x/y comparison is
/// recorded in `meter`; each recursive call also touches each element once.
pub fn pareto_front(
    inst: &Instance,
    meter: &mut CostMeter,
) -> Result<(FrontList, ParetoWitnessList), ParetoError> {
    check_distinct_coords(inst)?;
    let n = inst.len();
    let mut witnesses = vec![None; n];
    let mut front = Vec::new();
    let items: Vec<(usize, Point)> = inst.points().iter().copied().enumerate().collect();
    rec(items, meter, &mut front, &mut witnesses);
    Ok((FrontList { indices: front }, ParetoWitnessList { witnesses }))
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum SortedAs {
    IncX,
    DecX,
    IncY,
    DecY,
}

/// Single forward pass deciding whether the point sequence is monotone in one
/// of the four axis orders, at two comparisons per adjacent pair, breaking as
/// soon as all four directions are ruled out.
pub(crate) fn sorted_direction(items: &[(usize, Point)], meter: &mut CostMeter) -> Option<SortedAs> {
    let mut inc_x = true;
    let mut dec_x = true;
    let mut inc_y = true;
    let mut dec_y = true;
    for w in items.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        meter.compare_n(2);
        if a.x < b.x {
            dec_x = false;
        } else {
            inc_x = false;
        }
        if a.y < b.y {
            dec_y = false;
        } else {
            inc_y = false;
        }
        if !inc_x && !dec_x && !inc_y && !dec_y {
            return None;
        }
    }
    if inc_x {
        Some(SortedAs::IncX)
    } else if dec_x {
        Some(SortedAs::DecX)
    } else if inc_y {
        Some(SortedAs::IncY)
    } else if dec_y {
        Some(SortedAs::DecY)
    } else {
        None
    }
}

/// Front of a list sorted by increasing x: right-to-left scan keeping the
/// running max-y point, which dominates everything it eliminates.
fn front_of_x_sorted(
    items: &[(usize, Point)],
    meter: &mut CostMeter,
    front: &mut Vec<usize>,
    witnesses: &mut [Option<usize>],
) {
    let mut collected = Vec::new();
    let (mut best_pos, mut best_pt) = *items.last().unwrap();
    collected.push(best_pos);
    for &(pos, pt) in items.iter().rev().skip(1) {
        meter.compare();
        if pt.y > best_pt.y {
            collected.push(pos);
            best_pos = pos;
            best_pt = pt;
        } else {
            witnesses[pos] = Some(best_pos);
        }
    }
    collected.reverse();
    front.extend(collected);
}

/// Front of a list sorted by decreasing y: left-to-right scan keeping the
/// running max-x point; front points emerge in increasing x directly.
fn front_of_y_sorted_desc(
    items: &[(usize, Point)],
    meter: &mut CostMeter,
    front: &mut Vec<usize>,
    witnesses: &mut [Option<usize>],
) {
    let (mut best_pos, mut best_pt) = items[0];
    front.push(best_pos);
    for &(pos, pt) in items.iter().skip(1) {
        meter.compare();
        if pt.x > best_pt.x {
            front.push(pos);
            best_pos = pos;
            best_pt = pt;
        } else {
            witnesses[pos] = Some(best_pos);
        }
    }
}

fn rec(
    items: Vec<(usize, Point)>,
    meter: &mut CostMeter,
    front: &mut Vec<usize>,
    witnesses: &mut Vec<Option<usize>>,
) {
    meter.touch(items.len() as u64);
    if items.is_empty() {
        return;
    }
    if items.len() == 1 {
        front.push(items[0].0);
        return;
    }
    if let Some(dir) = sorted_direction(&items, meter) {
        match dir {
            SortedAs::IncX => front_of_x_sorted(&items, meter, front, witnesses),
            SortedAs::DecX => {
                let rev: Vec<_> = items.iter().rev().copied().collect();
                front_of_x_sorted(&rev, meter, front, witnesses);
            }
            SortedAs::DecY => front_of_y_sorted_desc(&items, meter, front, witnesses),
            SortedAs::IncY => {
                let rev: Vec<_> = items.iter().rev().copied().collect();
                front_of_y_sorted_desc(&rev, meter, front, witnesses);
            }
        }
        return;
    }

    let m = median_by(&items, &mut |a: &(usize, Point), b: &(usize, Point)| {
        meter.compare();
        a.1.x.cmp(&b.1.x)
    })
    .1
    .x;

    // Representative: the max-y point among those with x >= m.
    let mut q: Option<(usize, Point)> = None;
    for &(pos, pt) in &items {
        meter.compare();
        if pt.x >= m {
            if let Some((_, qp)) = q {
                meter.compare();
                debug_assert_ne!(pt.y, qp.y);
                if pt.y > qp.y {
                    q = Some((pos, pt));
                }
            } else {
                q = Some((pos, pt));
            }
        }
    }
    let (q_pos, q_pt) = q.expect("median guarantees a point with x >= m");

    let mut upper = Vec::new();
    let mut right = Vec::new();
    for &(pos, pt) in &items {
        if pos == q_pos {
            continue;
        }
        meter.compare();
        if pt.y > q_pt.y {
            upper.push((pos, pt));
        } else {
            meter.compare();
            if pt.x > q_pt.x {
                right.push((pos, pt));
            } else {
                witnesses[pos] = Some(q_pos);
            }
        }
    }

    rec(upper, meter, front, witnesses);
    front.push(q_pos);
    rec(right, meter, front, witnesses);
}

/// Linear-time certificate check for a front/witness pair.
pub fn verify_pareto(
    inst: &Instance,
    front: &FrontList,
    witnesses: &ParetoWitnessList,
) -> Result<(), ParetoCertError> {
    let n = inst.len();
    let mut is_front = vec![false; n];
    for &f in &front.indices {
        if f >= n || is_front[f] {
            return Err(ParetoCertError::BadFrontIndex(f));
        }
        is_front[f] = true;
    }
    for (k, w) in front.indices.windows(2).enumerate() {
        let (a, b) = (inst.get(w[0]), inst.get(w[1]));
        if a.x >= b.x {
            return Err(ParetoCertError::FrontNotIncreasingX(k));
        }
        if a.y <= b.y {
            return Err(ParetoCertError::FrontNotDecreasingY(k));
        }
    }
    if witnesses.witnesses.len() != n {
        return Err(ParetoCertError::SentinelCountMismatch {
            got: witnesses.witnesses.len(),
            front: front.indices.len(),
        });
    }
    let mut sentinels = 0usize;
    for (i, w) in witnesses.witnesses.iter().enumerate() {
        match w {
            None => {
                sentinels += 1;
                if !is_front[i] {
                    // Counted below via the sentinel/front cardinality check,
                    // but a front point with a witness is reported precisely.
                }
            }
            Some(wi) => {
                if *wi >= n || *wi == i {
                    return Err(ParetoCertError::BadWitnessIndex(i));
                }
                if is_front[i] {
                    return Err(ParetoCertError::FrontPointHasWitness(i));
                }
                if !dominates(inst.get(*wi), inst.get(i)) {
                    return Err(ParetoCertError::WitnessDoesNotDominate(i));
                }
            }
        }
    }
    if sentinels != front.indices.len() {
        return Err(ParetoCertError::SentinelCountMismatch {
            got: sentinels,
            front: front.indices.len(),
        });
    }
    Ok(())
}

/// One node of a (truncated) quadrant tree. Internal nodes carry the
/// representative q; truncated leaves do not.
#[derive(Clone, Debug)]
pub struct QuadrantNode {
    pub rep: Option<usize>,
    pub population: Vec<usize>,
    pub depth: usize,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Recursion tree of the modified front algorithm where the sortedness test is
/// replaced by "all remaining points lie in a single region". Depends only on
/// the point set and the regions, not on the input order.
#[derive(Clone, Debug)]
pub struct QuadrantTree {
    pub nodes: Vec<QuadrantNode>,
    pub root: Option<usize>,
    /// u(p): index of the node whose population holds position p.
    pub node_of_point: Vec<usize>,
}

impl QuadrantTree {
    pub fn depth_of_point(&self, p: usize) -> usize {
        self.nodes[self.node_of_point[p]].depth
    }
}

pub fn build_quadrant_tree(inst: &Instance, regions: &RegionSet) -> Result<QuadrantTree, ParetoError> {
    check_distinct_coords(inst)?;
    let mut tree = QuadrantTree {
        nodes: Vec::new(),
        root: None,
        node_of_point: vec![usize::MAX; inst.len()],
    };
    let all: Vec<usize> = (0..inst.len()).collect();
    tree.root = build_rec(inst, regions, all, 0, &mut tree);
    Ok(tree)
}

fn build_rec(
    inst: &Instance,
    regions: &RegionSet,
    points: Vec<usize>,
    depth: usize,
    tree: &mut QuadrantTree,
) -> Option<usize> {
    if points.is_empty() {
        return None;
    }
    let truncate = points.len() > 1 && {
        let first = regions.region_of(inst.get(points[0]));
        first.is_some() && points[1..].iter().all(|&p| regions.region_of(inst.get(p)) == first)
    };
    if truncate || points.len() == 1 && regions.region_of(inst.get(points[0])).is_some() {
        let id = tree.nodes.len();
        for &p in &points {
            tree.node_of_point[p] = id;
        }
        tree.nodes.push(QuadrantNode { rep: None, population: points, depth, left: None, right: None });
        return Some(id);
    }

    let m = median_by(&points, &mut |a: &usize, b: &usize| {
        inst.get(*a).x.cmp(&inst.get(*b).x)
    });
    let m = inst.get(m).x;
    let q_pos = points
        .iter()
        .copied()
        .filter(|&p| inst.get(p).x >= m)
        .max_by_key(|&p| inst.get(p).y)
        .expect("median guarantees a point with x >= m");
    let q_pt = inst.get(q_pos);

    let mut upper = Vec::new();
    let mut right = Vec::new();
    let mut population = vec![q_pos];
    for &p in &points {
        if p == q_pos {
            continue;
        }
        let pt = inst.get(p);
        if pt.y > q_pt.y {
            upper.push(p);
        } else if pt.x > q_pt.x {
            right.push(p);
        } else {
            population.push(p);
        }
    }

    let id = tree.nodes.len();
    for &p in &population {
        tree.node_of_point[p] = id;
    }
    tree.nodes.push(QuadrantNode { rep: Some(q_pos), population, depth, left: None, right: None });
    let left = build_rec(inst, regions, upper, depth + 1, tree);
    let right = build_rec(inst, regions, right, depth + 1, tree);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    Some(id)
}

/// Sum over all points of the depth of the node eliminating them.
pub fn depth_cost(tree: &QuadrantTree) -> u64 {
    tree.nodes
        .iter()
        .map(|n| (n.depth as u64) * (n.population.len() as u64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::oracles::pareto_front_oracle;
    use crate::region::{Rect, RegionKind, RegionSet};

    fn inst(pts: &[(i64, i64)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn run(i: &Instance) -> (FrontList, ParetoWitnessList) {
        let mut meter = CostMeter::new();
        pareto_front(i, &mut meter).unwrap()
    }

    #[test]
    fn antichain_everything_is_front() {
        for perm in [[0usize, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let base = [(1i64, 3i64), (2, 2), (3, 1)];
            let pts: Vec<_> = perm.iter().map(|&i| base[i]).collect();
            let i = inst(&pts);
            let (f, w) = run(&i);
            let mut by_x: Vec<usize> = (0..3).collect();
            by_x.sort_by_key(|&k| i.get(k).x);
            assert_eq!(f.indices, by_x);
            assert!(w.witnesses.iter().all(|x| x.is_none()));
            assert!(verify_pareto(&i, &f, &w).is_ok());
        }
    }

    #[test]
    fn single_domination_pair() {
        let i = inst(&[(1, 1), (2, 2)]);
        let (f, w) = run(&i);
        assert_eq!(f.indices, vec![1]);
        assert_eq!(w.witnesses, vec![Some(1), None]);
    }

    fn random_instance(next: &mut impl FnMut() -> u64, n: usize, range: u64) -> Instance {
        loop {
            let pts: Vec<Point> = (0..n)
                .map(|_| Point::new((next() % range) as i64, (next() % range) as i64))
                .collect();
            if let Ok(i) = Instance::new(pts.clone()) {
                if check_distinct_coords(&i).is_ok() {
                    return i;
                }
            }
        }
    }

    fn rng(mut state: u64) -> impl FnMut() -> u64 {
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        }
    }

    #[test]
    fn matches_domination_oracle_on_random_instances() {
        let mut next = rng(0xabcdef12345);
        for _ in 0..50 {
            let i = random_instance(&mut next, 10, 1000);
            let (f, w) = run(&i);
            assert_eq!(f.indices, pareto_front_oracle(&i), "{:?}", i.points());
            for (k, wit) in w.witnesses.iter().enumerate() {
                if let Some(wi) = wit {
                    assert!(dominates(i.get(*wi), i.get(k)));
                }
            }
            assert!(verify_pareto(&i, &f, &w).is_ok());
        }
    }

    #[test]
    fn front_set_is_order_oblivious() {
        let mut next = rng(777);
        let i = random_instance(&mut next, 12, 500);
        let (f0, _) = run(&i);
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..i.len()).collect();
            for k in (1..perm.len()).rev() {
                perm.swap(k, (next() % (k as u64 + 1)) as usize);
            }
            let shuffled = i.reordered(&perm);
            let (f, _) = run(&shuffled);
            let set0: Vec<Point> = f0.indices.iter().map(|&k| i.get(k)).collect();
            let set1: Vec<Point> = f.indices.iter().map(|&k| shuffled.get(k)).collect();
            assert_eq!(set0, set1);
        }
    }

    #[test]
    fn verifier_rejects_broken_certificates() {
        let mut next = rng(42424242);
        let i = random_instance(&mut next, 10, 1000);
        let (f, w) = run(&i);
        assert!(verify_pareto(&i, &f, &w).is_ok());

        // Witness redirected to a non-dominating index.
        if let Some(k) = w.witnesses.iter().position(|x| x.is_some()) {
            let mut bad = w.clone();
            let target = (0..i.len())
                .find(|&j| j != k && !dominates(i.get(j), i.get(k)))
                .unwrap();
            bad.witnesses[k] = Some(target);
            assert!(verify_pareto(&i, &f, &bad).is_err());
        }

        // Front index dropped and replaced by a (bogus) witness.
        if f.indices.len() >= 2 {
            let mut bad_f = f.clone();
            let dropped = bad_f.indices.pop().unwrap();
            let mut bad_w = w.clone();
            bad_w.witnesses[dropped] = Some(bad_f.indices[0]);
            assert!(verify_pareto(&i, &bad_f, &bad_w).is_err());
        }

        // Self-witness.
        if let Some(k) = w.witnesses.iter().position(|x| x.is_some()) {
            let mut bad = w.clone();
            bad.witnesses[k] = Some(k);
            assert_eq!(verify_pareto(&i, &f, &bad), Err(ParetoCertError::BadWitnessIndex(k)));
        }
    }

    #[test]
    fn quadrant_tree_antichain_no_regions() {
        let i = inst(&[(1, 4), (2, 3), (3, 2), (4, 1)]);
        let t = build_quadrant_tree(&i, &RegionSet::empty(RegionKind::Rectangles)).unwrap();
        let root = &t.nodes[t.root.unwrap()];
        // Median x (lower) is 2; max-y among x >= 2 is (2,3).
        assert_eq!(root.rep, Some(1));
        assert!(t.nodes.len() <= i.len());
        let covered: usize = t.nodes.iter().map(|n| n.population.len()).sum();
        assert_eq!(covered, i.len());
    }

    #[test]
    fn quadrant_tree_single_region_truncates_immediately() {
        let i = inst(&[(1, 4), (2, 3), (3, 2), (4, 1)]);
        let r = RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 0, xmax: 10, ymax: 10 }]).unwrap();
        let t = build_quadrant_tree(&i, &r).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.nodes[0].depth, 0);
        assert_eq!(depth_cost(&t), 0);
    }

    /// Independent replay of the recursion that only tracks depths, with a
    /// sort-based median.
    fn depth_sum_replay(pts: Vec<Point>, depth: u64) -> u64 {
        if pts.is_empty() {
            return 0;
        }
        if pts.len() == 1 {
            return depth;
        }
        let mut xs: Vec<i64> = pts.iter().map(|p| p.x).collect();
        xs.sort_unstable();
        let m = xs[(xs.len() - 1) / 2];
        let q = *pts.iter().filter(|p| p.x >= m).max_by_key(|p| p.y).unwrap();
        let mut upper = Vec::new();
        let mut right = Vec::new();
        let mut here = 0u64;
        for &p in &pts {
            if p == q {
                here += 1;
            } else if p.y > q.y {
                upper.push(p);
            } else if p.x > q.x {
                right.push(p);
            } else {
                here += 1;
            }
        }
        here * depth + depth_sum_replay(upper, depth + 1) + depth_sum_replay(right, depth + 1)
    }

    #[test]
    fn depth_cost_matches_replay_oracle() {
        let mut next = rng(31337);
        for _ in 0..20 {
            let i = random_instance(&mut next, 8, 100);
            let t = build_quadrant_tree(&i, &RegionSet::empty(RegionKind::Rectangles)).unwrap();
            assert_eq!(depth_cost(&t), depth_sum_replay(i.points().to_vec(), 0), "{:?}", i.points());
        }
    }

    #[test]
    fn meter_total_bounded_by_depth_cost_on_respecting_inputs() {
        // Points sorted by x inside one rectangle plus free points outside.
        let i = inst(&[(1, 10), (2, 12), (3, 14), (4, 16), (100, 200), (101, 1)]);
        let r = RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 0, xmax: 50, ymax: 50 }]).unwrap();
        let t = build_quadrant_tree(&i, &r).unwrap();
        let mut meter = CostMeter::new();
        let (f, w) = pareto_front(&i, &mut meter).unwrap();
        assert!(verify_pareto(&i, &f, &w).is_ok());
        let bound = 40 * (i.len() as u64 + depth_cost(&t));
        assert!(meter.total() <= bound, "{} > {}", meter.total(), bound);
    }
}
