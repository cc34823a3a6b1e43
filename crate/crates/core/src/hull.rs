//! Truncated upper-hull recursion with Kirkpatrick–Seidel bridge finding and
//! triangle witnesses, full-hull assembly, the linear-time verifier, and the
//! quadrangle tree with its partial order and region permutation.

use thiserror::Error;

use crate::geom::{orientation, signed_area2, strictly_inside_triangle, Instance, Orientation, Point};
use crate::meter::CostMeter;
use crate::pareto::{sorted_direction, SortedAs};
use crate::region::{CompassFunction, PointGroups, RegionSet};
use crate::select::median_by;

/// Positions of the hull vertices in counterclockwise cyclic order, starting
/// at the lexicographically smallest point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullList {
    pub indices: Vec<usize>,
}

/// One entry per input position: None for hull vertices, otherwise three
/// positions whose triangle strictly contains the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullWitnessList {
    pub triples: Vec<Option<[usize; 3]>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HullError {
    #[error("two points share an x-coordinate")]
    SharedX,
    #[error("two points share a y-coordinate")]
    SharedY,
    #[error("empty instance")]
    Empty,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HullCertError {
    #[error("hull index {0} out of range or repeated")]
    BadHullIndex(usize),
    #[error("hull corner {0} is not strictly convex counterclockwise")]
    NotConvex(usize),
    #[error("witness of point {0} is invalid")]
    BadWitnessIndex(usize),
    #[error("witness triangle of point {0} does not strictly contain it")]
    NotContained(usize),
    #[error("hull vertex {0} carries a witness")]
    HullPointHasWitness(usize),
    #[error("sentinel count {got} does not match hull size {hull}")]
    SentinelCountMismatch { got: usize, hull: usize },
}

type Item = (usize, Point);

fn check_distinct_coords(inst: &Instance) -> Result<(), HullError> {
    let mut xs: Vec<i64> = inst.points().iter().map(|p| p.x).collect();
    let mut ys: Vec<i64> = inst.points().iter().map(|p| p.y).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(HullError::SharedX);
    }
    if ys.windows(2).any(|w| w[0] == w[1]) {
        return Err(HullError::SharedY);
    }
    Ok(())
}

/// Compute the convex hull and a triangle-witness list. Orientation tests and
/// coordinate comparisons are recorded in `meter`.
pub fn convex_hull(
    inst: &Instance,
    meter: &mut CostMeter,
) -> Result<(HullList, HullWitnessList), HullError> {
    let n = inst.len();
    if n == 0 {
        return Err(HullError::Empty);
    }
    check_distinct_coords(inst)?;
    let mut witnesses = vec![None; n];
    if n <= 2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| inst.get(i));
        return Ok((HullList { indices: order }, HullWitnessList { triples: witnesses }));
    }

    let items: Vec<Item> = inst.points().iter().copied().enumerate().collect();
    let mut pl = items[0];
    let mut pr = items[0];
    for &it in &items[1..] {
        meter.compare_n(2);
        if it.1.x < pl.1.x {
            pl = it;
        }
        if it.1.x > pr.1.x {
            pr = it;
        }
    }

    let mut upper_interior = Vec::new();
    let mut lower_interior = Vec::new();
    for &(pos, pt) in &items {
        if pos == pl.0 || pos == pr.0 {
            continue;
        }
        meter.orient();
        match orientation(pl.1, pr.1, pt) {
            Orientation::CounterClockwise => upper_interior.push((pos, pt)),
            Orientation::Clockwise => lower_interior.push((pos, pt)),
            Orientation::Collinear => panic!("three collinear points; input not in general position"),
        }
    }

    let mut upper_between = Vec::new();
    hull_rec(pl, pr, upper_interior, meter, &mut upper_between, &mut witnesses);

    // Lower hull: reflect across the x-axis and reuse the upper-hull
    // recursion. Containment witnesses are reflection invariant.
    let refl = |(pos, pt): Item| (pos, Point::new(pt.x, -pt.y));
    let mut lower_between = Vec::new();
    hull_rec(
        refl(pl),
        refl(pr),
        lower_interior.into_iter().map(refl).collect(),
        meter,
        &mut lower_between,
        &mut witnesses,
    );

    // Counterclockwise from the lexicographic minimum, which is the min-x
    // point: lower chain left-to-right, then the max-x point, then the upper
    // chain right-to-left.
    let mut indices = vec![pl.0];
    indices.extend(lower_between);
    indices.push(pr.0);
    indices.extend(upper_between.into_iter().rev());
    Ok((HullList { indices }, HullWitnessList { triples: witnesses }))
}

/// Upper-hull recursion. `interior` holds the points strictly above the line
/// pl-pr, in input order; hull vertices strictly between the anchors are
/// appended to `out` left to right.
fn hull_rec(
    pl: Item,
    pr: Item,
    interior: Vec<Item>,
    meter: &mut CostMeter,
    out: &mut Vec<usize>,
    witnesses: &mut [Option<[usize; 3]>],
) {
    meter.touch(interior.len() as u64 + 2);
    if interior.is_empty() {
        return;
    }
    if let Some(dir) = sorted_direction(&interior, meter) {
        match dir {
            SortedAs::IncX => base_x_sorted(pl, pr, &interior, meter, out, witnesses),
            SortedAs::DecX => {
                let rev: Vec<Item> = interior.iter().rev().copied().collect();
                base_x_sorted(pl, pr, &rev, meter, out, witnesses);
            }
            SortedAs::DecY => base_y_sorted(pl, pr, &interior, meter, out, witnesses),
            SortedAs::IncY => {
                let rev: Vec<Item> = interior.iter().rev().copied().collect();
                base_y_sorted(pl, pr, &rev, meter, out, witnesses);
            }
        }
        return;
    }

    let a = median_by(&interior, &mut |p: &Item, q: &Item| {
        meter.compare();
        p.1.x.cmp(&q.1.x)
    })
    .1
    .x;

    let mut candidates = Vec::with_capacity(interior.len() + 2);
    candidates.push(pl);
    candidates.push(pr);
    candidates.extend(interior.iter().copied());
    let (pi, pj) = find_bridge(&candidates, a, meter);
    assert!(
        pi.0 != pl.0 || pj.0 != pr.0,
        "bridge equals the base edge while interior points lie above it"
    );

    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let mut s_star = Vec::new();
    'points: for &(pos, pt) in &interior {
        if pos == pi.0 || pos == pj.0 {
            continue;
        }
        if pi.0 != pl.0 {
            meter.orient();
            if orientation(pl.1, pi.1, pt) == Orientation::CounterClockwise {
                s1.push((pos, pt));
                continue 'points;
            }
        }
        if pj.0 != pr.0 {
            meter.orient();
            if orientation(pj.1, pr.1, pt) == Orientation::CounterClockwise {
                s2.push((pos, pt));
                continue 'points;
            }
        }
        s_star.push((pos, pt));
    }

    for &(pos, pt) in &s_star {
        give_witness(pos, pt, &[pl, pi, pj, pr], meter, witnesses);
    }

    if pi.0 != pl.0 {
        hull_rec(pl, pi, s1, meter, out, witnesses);
        out.push(pi.0);
    } else {
        debug_assert!(s1.is_empty());
    }
    if pj.0 != pr.0 {
        out.push(pj.0);
        hull_rec(pj, pr, s2, meter, out, witnesses);
    } else {
        debug_assert!(s2.is_empty());
    }
}

/// Assign `pos` a witness triangle whose corners come from `corners`
/// (duplicates allowed; they collapse). The point is strictly inside the
/// convex hull of the corners, so some corner triple strictly contains it.
fn give_witness(
    pos: usize,
    pt: Point,
    corners: &[Item],
    meter: &mut CostMeter,
    witnesses: &mut [Option<[usize; 3]>],
) {
    let mut distinct: Vec<Item> = Vec::with_capacity(4);
    for &c in corners {
        if !distinct.iter().any(|d| d.0 == c.0) {
            distinct.push(c);
        }
    }
    let k = distinct.len();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                meter.orient_n(3);
                if strictly_inside_triangle(pt, distinct[i].1, distinct[j].1, distinct[l].1) {
                    witnesses[pos] = Some([distinct[i].0, distinct[j].0, distinct[l].0]);
                    return;
                }
            }
        }
    }
    panic!("no witness triangle among quadrangle corners; input not in general position");
}

/// Base case for interior sorted by increasing x: monotone-chain upper hull of
/// anchors plus interior, then vertical-strip witnesses.
fn base_x_sorted(
    pl: Item,
    pr: Item,
    interior: &[Item],
    meter: &mut CostMeter,
    out: &mut Vec<usize>,
    witnesses: &mut [Option<[usize; 3]>],
) {
    let mut chain: Vec<Item> = vec![pl];
    for &it in interior.iter().chain(std::iter::once(&pr)) {
        while chain.len() >= 2 {
            meter.orient();
            if orientation(chain[chain.len() - 2].1, chain[chain.len() - 1].1, it.1)
                != Orientation::Clockwise
            {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(it);
    }
    out.extend(chain[1..chain.len() - 1].iter().map(|it| it.0));

    // Witnesses: walk eliminated points (increasing x) against chain edges.
    let mut e = 0usize;
    let mut on_chain = 0usize; // pointer into chain for membership, both x-sorted
    for &(pos, pt) in interior {
        while on_chain < chain.len() && chain[on_chain].1.x < pt.x {
            on_chain += 1;
        }
        if on_chain < chain.len() && chain[on_chain].0 == pos {
            continue;
        }
        while e + 1 < chain.len() && chain[e + 1].1.x < pt.x {
            e += 1;
        }
        give_witness(pos, pt, &[pl, chain[e], chain[e + 1], pr], meter, witnesses);
    }
}

/// Base case for interior sorted by decreasing y: full hull of anchors plus
/// interior by a y-monotone chain scan, then horizontal-slab witnesses against
/// the two y-monotone boundary chains.
fn base_y_sorted(
    pl: Item,
    pr: Item,
    interior: &[Item],
    meter: &mut CostMeter,
    out: &mut Vec<usize>,
    witnesses: &mut [Option<[usize; 3]>],
) {
    // Merge the anchors into the y-sorted sequence.
    let mut all: Vec<Item> = Vec::with_capacity(interior.len() + 2);
    let (hi, lo) = if pl.1.y > pr.1.y { (pl, pr) } else { (pr, pl) };
    let mut hi = Some(hi);
    let mut lo = Some(lo);
    for &it in interior {
        if let Some(h) = hi {
            meter.compare();
            if h.1.y > it.1.y {
                all.push(h);
                hi = None;
            }
        }
        if let Some(l) = lo {
            meter.compare();
            if l.1.y > it.1.y {
                all.push(l);
                lo = None;
            }
        }
        all.push(it);
    }
    if let Some(h) = hi {
        all.push(h);
    }
    if let Some(l) = lo {
        all.push(l);
    }
    debug_assert!(all.windows(2).all(|w| w[0].1.y > w[1].1.y));

    // Two y-monotone chains of the full hull, scanned top to bottom.
    let mut east: Vec<Item> = Vec::new();
    let mut west: Vec<Item> = Vec::new();
    for &it in &all {
        while east.len() >= 2 {
            meter.orient();
            if orientation(east[east.len() - 2].1, east[east.len() - 1].1, it.1)
                != Orientation::Clockwise
            {
                east.pop();
            } else {
                break;
            }
        }
        east.push(it);
        while west.len() >= 2 {
            meter.orient();
            if orientation(west[west.len() - 2].1, west[west.len() - 1].1, it.1)
                != Orientation::CounterClockwise
            {
                west.pop();
            } else {
                break;
            }
        }
        west.push(it);
    }
    // Counterclockwise cycle: east chain bottom-to-top, then west interior
    // top-to-bottom.
    let mut cycle: Vec<Item> = east.iter().rev().copied().collect();
    cycle.extend(west[1..west.len() - 1].iter().copied());

    // The upper chain runs counterclockwise from pr around the top to pl.
    let start = cycle.iter().position(|it| it.0 == pr.0).expect("pr is a hull vertex");
    let mut upper_rl: Vec<Item> = Vec::new();
    let mut k = start;
    loop {
        upper_rl.push(cycle[k]);
        if cycle[k].0 == pl.0 {
            break;
        }
        k = (k + 1) % cycle.len();
    }
    out.extend(upper_rl[1..upper_rl.len() - 1].iter().rev().map(|it| it.0));

    // Boundary chains of the region between the base edge and the upper
    // chain: from the top vertex, forward in the cycle descends the left side
    // and backward descends the right side, each ending at the bottom vertex.
    let top = (0..cycle.len()).max_by_key(|&i| cycle[i].1.y).unwrap();
    let bottom = (0..cycle.len()).min_by_key(|&i| cycle[i].1.y).unwrap();
    let m = cycle.len();
    let mut left_chain: Vec<Item> = Vec::new();
    let mut k = top;
    loop {
        left_chain.push(cycle[k]);
        if k == bottom {
            break;
        }
        k = (k + 1) % m;
    }
    let mut right_chain: Vec<Item> = Vec::new();
    let mut k = top;
    loop {
        right_chain.push(cycle[k]);
        if k == bottom {
            break;
        }
        k = (k + m - 1) % m;
    }

    let hull_pos: std::collections::HashSet<usize> = cycle.iter().map(|it| it.0).collect();
    let mut li = 0usize;
    let mut ri = 0usize;
    for &(pos, pt) in &all {
        if hull_pos.contains(&pos) {
            continue;
        }
        while li + 1 < left_chain.len() && left_chain[li + 1].1.y > pt.y {
            li += 1;
        }
        while ri + 1 < right_chain.len() && right_chain[ri + 1].1.y > pt.y {
            ri += 1;
        }
        give_witness(
            pos,
            pt,
            &[left_chain[li], left_chain[li + 1], right_chain[ri], right_chain[ri + 1]],
            meter,
            witnesses,
        );
    }
}

fn slope_cmp(p: (Point, Point), q: (Point, Point)) -> std::cmp::Ordering {
    // Both pairs ordered by increasing x, so both dx are positive.
    let (dy1, dx1) = ((p.1.y - p.0.y) as i128, (p.1.x - p.0.x) as i128);
    let (dy2, dx2) = ((q.1.y - q.0.y) as i128, (q.1.x - q.0.x) as i128);
    (dy1 * dx2).cmp(&(dy2 * dx1))
}

/// Upper-hull bridge: the hull edge of `candidates` crossing the vertical
/// line x = a, by deterministic pairing-and-pruning with exact slope
/// comparisons. Returns the edge as (left endpoint, right endpoint).
pub fn find_bridge(candidates: &[Item], a: i64, meter: &mut CostMeter) -> (Item, Item) {
    let mut cand: Vec<Item> = candidates.to_vec();
    assert!(cand.iter().any(|it| it.1.x <= a) && cand.iter().any(|it| it.1.x > a));
    loop {
        meter.touch(cand.len() as u64);
        if cand.len() == 2 {
            let (p, q) = (cand[0], cand[1]);
            meter.compare();
            return if p.1.x < q.1.x { (p, q) } else { (q, p) };
        }

        let mut pairs: Vec<(Item, Item)> = Vec::with_capacity(cand.len() / 2);
        let mut leftover: Option<Item> = None;
        for chunk in cand.chunks(2) {
            if chunk.len() == 1 {
                leftover = Some(chunk[0]);
            } else {
                meter.compare();
                if chunk[0].1.x < chunk[1].1.x {
                    pairs.push((chunk[0], chunk[1]));
                } else {
                    pairs.push((chunk[1], chunk[0]));
                }
            }
        }

        let kp = median_by(&pairs, &mut |p: &(Item, Item), q: &(Item, Item)| {
            meter.compare();
            slope_cmp((p.0 .1, p.1 .1), (q.0 .1, q.1 .1))
        });
        let (kdy, kdx) = ((kp.1 .1.y - kp.0 .1.y) as i128, (kp.1 .1.x - kp.0 .1.x) as i128);

        // Extreme points in direction normal to slope K: maximize y*kdx - x*kdy.
        let value = |p: Point| p.y as i128 * kdx - p.x as i128 * kdy;
        let mut best = value(cand[0].1);
        let mut pk = cand[0];
        let mut pm = cand[0];
        for &it in &cand[1..] {
            let v = value(it.1);
            meter.compare();
            if v > best {
                best = v;
                pk = it;
                pm = it;
            } else if v == best {
                meter.compare_n(2);
                if it.1.x < pk.1.x {
                    pk = it;
                }
                if it.1.x > pm.1.x {
                    pm = it;
                }
            }
        }

        if pk.1.x <= a && pm.1.x > a {
            return (pk, pm);
        }

        let mut next: Vec<Item> = Vec::with_capacity(cand.len());
        if pm.1.x <= a {
            // The bridge slope is strictly below K: the left point of any pair
            // at least as steep as K cannot be a bridge endpoint.
            for &(p, q) in &pairs {
                meter.compare();
                if slope_cmp((p.1, q.1), (kp.0 .1, kp.1 .1)).is_ge() {
                    next.push(q);
                } else {
                    next.push(p);
                    next.push(q);
                }
            }
        } else {
            // The bridge slope is strictly above K: the right point of any
            // pair at most as steep as K cannot be a bridge endpoint.
            for &(p, q) in &pairs {
                meter.compare();
                if slope_cmp((p.1, q.1), (kp.0 .1, kp.1 .1)).is_le() {
                    next.push(p);
                } else {
                    next.push(p);
                    next.push(q);
                }
            }
        }
        if let Some(l) = leftover {
            next.push(l);
        }
        debug_assert!(next.len() < cand.len());
        cand = next;
    }
}

/// Linear-time certificate check for a hull/witness pair.
pub fn verify_hull(
    inst: &Instance,
    hull: &HullList,
    witnesses: &HullWitnessList,
) -> Result<(), HullCertError> {
    let n = inst.len();
    let mut on_hull = vec![false; n];
    for &h in &hull.indices {
        if h >= n || on_hull[h] {
            return Err(HullCertError::BadHullIndex(h));
        }
        on_hull[h] = true;
    }
    let k = hull.indices.len();
    if k >= 3 {
        for i in 0..k {
            let a = inst.get(hull.indices[i]);
            let b = inst.get(hull.indices[(i + 1) % k]);
            let c = inst.get(hull.indices[(i + 2) % k]);
            if orientation(a, b, c) != Orientation::CounterClockwise {
                return Err(HullCertError::NotConvex(i));
            }
        }
    }
    if witnesses.triples.len() != n {
        return Err(HullCertError::SentinelCountMismatch {
            got: witnesses.triples.len(),
            hull: k,
        });
    }
    let mut sentinels = 0usize;
    for (i, w) in witnesses.triples.iter().enumerate() {
        match w {
            None => sentinels += 1,
            Some([a, b, c]) => {
                if on_hull[i] {
                    return Err(HullCertError::HullPointHasWitness(i));
                }
                if *a >= n || *b >= n || *c >= n || a == b || b == c || a == c {
                    return Err(HullCertError::BadWitnessIndex(i));
                }
                if !strictly_inside_triangle(inst.get(i), inst.get(*a), inst.get(*b), inst.get(*c)) {
                    return Err(HullCertError::NotContained(i));
                }
            }
        }
    }
    if sentinels != k {
        return Err(HullCertError::SentinelCountMismatch { got: sentinels, hull: k });
    }
    Ok(())
}

/// One node of a (truncated) quadrangle tree.
#[derive(Clone, Debug)]
pub struct QuadrangleNode {
    /// Rooted edge (left anchor, right anchor) of the subproblem.
    pub edge: (usize, usize),
    /// Bridge endpoints (pi, pj) for expanded nodes; None for truncated
    /// leaves and for the synthetic root.
    pub bridge: Option<(usize, usize)>,
    pub population: Vec<usize>,
    pub depth: usize,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub parent: Option<usize>,
    /// True for the lower-hull subtree, whose geometry is reflected.
    pub reflected: bool,
}

/// Recursion tree of the modified hull algorithm where the sortedness test is
/// replaced by "all remaining points lie in a single region". The synthetic
/// root at depth 0 holds the two extreme-x points; the upper and lower
/// subtrees hang below it.
#[derive(Clone, Debug)]
pub struct QuadrangleTree {
    pub nodes: Vec<QuadrangleNode>,
    pub root: usize,
    /// u(p): node whose population holds position p.
    pub node_of_point: Vec<usize>,
    /// Signed distance numerator of each point to its node's rooted edge;
    /// larger means deeper inside the halfplane. Shared denominator within a
    /// node keeps comparisons exact.
    pub halfplane_key: Vec<i128>,
}

impl QuadrangleTree {
    pub fn depth_of_point(&self, p: usize) -> usize {
        self.nodes[self.node_of_point[p]].depth
    }

    pub fn is_strict_ancestor(&self, u: usize, v: usize) -> bool {
        let mut cur = self.nodes[v].parent;
        while let Some(w) = cur {
            if w == u {
                return true;
            }
            cur = self.nodes[w].parent;
        }
        false
    }

    /// The strict partial order: p before q iff u(p) is a strict ancestor of
    /// u(q), or both share a node and q lies strictly deeper in its halfplane.
    pub fn precedes(&self, p: usize, q: usize) -> bool {
        let (u, v) = (self.node_of_point[p], self.node_of_point[q]);
        if u == v {
            self.halfplane_key[p] < self.halfplane_key[q]
        } else {
            self.is_strict_ancestor(u, v)
        }
    }
}

pub fn build_quadrangle_tree(inst: &Instance, regions: &RegionSet) -> Result<QuadrangleTree, HullError> {
    build_quadrangle_tree_grouped(inst, &PointGroups::from_regions(inst, regions))
}

/// Same tree, but region membership given directly as point groups. Used for
/// refined region sets that have no geometric description.
pub fn build_quadrangle_tree_grouped(
    inst: &Instance,
    groups: &PointGroups,
) -> Result<QuadrangleTree, HullError> {
    let n = inst.len();
    if n == 0 {
        return Err(HullError::Empty);
    }
    check_distinct_coords(inst)?;
    let items: Vec<Item> = inst.points().iter().copied().enumerate().collect();
    let pl = *items.iter().min_by_key(|it| it.1.x).unwrap();
    let pr = *items.iter().max_by_key(|it| it.1.x).unwrap();

    let mut tree = QuadrangleTree {
        nodes: Vec::new(),
        root: 0,
        node_of_point: vec![usize::MAX; n],
        halfplane_key: vec![0; n],
    };
    let mut root_pop = vec![pl.0];
    if pr.0 != pl.0 {
        root_pop.push(pr.0);
    }
    for &p in &root_pop {
        tree.node_of_point[p] = 0;
    }
    tree.nodes.push(QuadrangleNode {
        edge: (pl.0, pr.0),
        bridge: None,
        population: root_pop,
        depth: 0,
        left: None,
        right: None,
        parent: None,
        reflected: false,
    });

    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &(pos, pt) in &items {
        if pos == pl.0 || pos == pr.0 {
            continue;
        }
        match orientation(pl.1, pr.1, pt) {
            Orientation::CounterClockwise => upper.push((pos, pt)),
            Orientation::Clockwise => lower.push((pos, pt)),
            Orientation::Collinear => panic!("three collinear points; input not in general position"),
        }
    }
    let refl = |(pos, pt): Item| (pos, Point::new(pt.x, -pt.y));
    let left = tree_rec(groups, pl, pr, upper, 1, Some(0), false, &mut tree);
    let right = tree_rec(
        groups,
        refl(pl),
        refl(pr),
        lower.into_iter().map(refl).collect(),
        1,
        Some(0),
        true,
        &mut tree,
    );
    tree.nodes[0].left = left;
    tree.nodes[0].right = right;
    Ok(tree)
}

#[allow(clippy::too_many_arguments)]
fn tree_rec(
    groups: &PointGroups,
    pl: Item,
    pr: Item,
    interior: Vec<Item>,
    depth: usize,
    parent: Option<usize>,
    reflected: bool,
    tree: &mut QuadrangleTree,
) -> Option<usize> {
    if interior.is_empty() {
        return None;
    }
    let key = |pt: Point| signed_area2(pl.1, pr.1, pt);
    let truncate = {
        let first = groups.group_of[interior[0].0];
        first.is_some() && interior[1..].iter().all(|it| groups.group_of[it.0] == first)
    };
    if truncate {
        let id = tree.nodes.len();
        for &(pos, pt) in &interior {
            tree.node_of_point[pos] = id;
            tree.halfplane_key[pos] = key(pt);
        }
        tree.nodes.push(QuadrangleNode {
            edge: (pl.0, pr.0),
            bridge: None,
            population: interior.iter().map(|it| it.0).collect(),
            depth,
            left: None,
            right: None,
            parent,
            reflected,
        });
        return Some(id);
    }

    let a = median_by(&interior, &mut |p: &Item, q: &Item| p.1.x.cmp(&q.1.x)).1.x;
    let mut candidates = Vec::with_capacity(interior.len() + 2);
    candidates.push(pl);
    candidates.push(pr);
    candidates.extend(interior.iter().copied());
    let mut scratch = CostMeter::new();
    let (pi, pj) = find_bridge(&candidates, a, &mut scratch);

    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let mut population = Vec::new();
    'points: for &(pos, pt) in &interior {
        if pos == pi.0 || pos == pj.0 {
            population.push((pos, pt));
            continue;
        }
        if pi.0 != pl.0 && orientation(pl.1, pi.1, pt) == Orientation::CounterClockwise {
            s1.push((pos, pt));
            continue 'points;
        }
        if pj.0 != pr.0 && orientation(pj.1, pr.1, pt) == Orientation::CounterClockwise {
            s2.push((pos, pt));
            continue 'points;
        }
        population.push((pos, pt));
    }

    let id = tree.nodes.len();
    for &(pos, pt) in &population {
        tree.node_of_point[pos] = id;
        tree.halfplane_key[pos] = key(pt);
    }
    tree.nodes.push(QuadrangleNode {
        edge: (pl.0, pr.0),
        bridge: Some((pi.0, pj.0)),
        population: population.iter().map(|it| it.0).collect(),
        depth,
        left: None,
        right: None,
        parent,
        reflected,
    });
    let left = if pi.0 != pl.0 {
        tree_rec(groups, pl, pi, s1, depth + 1, Some(id), reflected, tree)
    } else {
        None
    };
    let right = if pj.0 != pr.0 {
        tree_rec(groups, pj, pr, s2, depth + 1, Some(id), reflected, tree)
    } else {
        None
    };
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    Some(id)
}

/// Sum over all points of the depth of the node eliminating them.
pub fn quadrangle_depth_cost(tree: &QuadrangleTree) -> u64 {
    tree.nodes
        .iter()
        .map(|n| (n.depth as u64) * (n.population.len() as u64))
        .sum()
}

/// A compass-induced rearrangement rho of the tree order plus a linear
/// extension of the permuted order.
#[derive(Clone, Debug)]
pub struct QuadrangleOrder {
    /// rho[q] = p: the point taking q's place in the permuted order.
    pub rho: Vec<usize>,
    /// A linear extension of the permuted partial order, as positions from
    /// first to last.
    pub linear: Vec<usize>,
}

/// Within every (node, region) class, match the points sorted by the tree
/// order against the same points sorted by the region's compass order; outside
/// regions rho is the identity. Ties in the halfplane key are broken by
/// position index to fix one linearization.
pub fn quadrangle_order(
    tree: &QuadrangleTree,
    inst: &Instance,
    regions: &RegionSet,
    kappa: &CompassFunction,
) -> QuadrangleOrder {
    quadrangle_order_grouped(tree, inst, &PointGroups::from_regions(inst, regions), kappa)
}

/// [`quadrangle_order`] with membership given as point groups.
pub fn quadrangle_order_grouped(
    tree: &QuadrangleTree,
    inst: &Instance,
    groups: &PointGroups,
    kappa: &CompassFunction,
) -> QuadrangleOrder {
    assert_eq!(kappa.assignment.len(), groups.len());
    let n = inst.len();
    let mut rho: Vec<usize> = (0..n).collect();
    for node in &tree.nodes {
        for (r, order) in kappa.assignment.iter().enumerate() {
            let members: Vec<usize> = node
                .population
                .iter()
                .copied()
                .filter(|&p| groups.group_of[p] == Some(r))
                .collect();
            if members.len() < 2 {
                continue;
            }
            let mut by_tree = members.clone();
            by_tree.sort_by_key(|&p| (tree.halfplane_key[p], p));
            let mut by_compass = members;
            by_compass.sort_by_key(|&p| (order.key(inst.get(p)), p));
            for (q, p) in by_tree.iter().zip(by_compass.iter()) {
                rho[*q] = *p;
            }
        }
    }

    let mut rho_inv = vec![0usize; n];
    for (q, &p) in rho.iter().enumerate() {
        rho_inv[p] = q;
    }

    // Preorder over nodes keeps ancestors first; within a node, order by the
    // halfplane key of the preimage.
    let mut linear = Vec::with_capacity(n);
    let mut stack = vec![tree.root];
    while let Some(u) = stack.pop() {
        let node = &tree.nodes[u];
        let mut pop = node.population.clone();
        pop.sort_by_key(|&p| (tree.halfplane_key[rho_inv[p]], rho_inv[p]));
        linear.extend(pop);
        if let Some(r) = node.right {
            stack.push(r);
        }
        if let Some(l) = node.left {
            stack.push(l);
        }
    }
    QuadrangleOrder { rho, linear }
}

/// The permuted strict partial order on points induced by rho.
pub fn quadrangle_kappa_precedes(tree: &QuadrangleTree, order: &QuadrangleOrder, p: usize, q: usize) -> bool {
    let mut rho_inv = vec![usize::MAX; order.rho.len()];
    for (a, &b) in order.rho.iter().enumerate() {
        rho_inv[b] = a;
    }
    tree.precedes(rho_inv[p], rho_inv[q])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::hull_set_oracle;
    use crate::region::AxisOrder;
    use crate::region::{RegionKind, Triangle};

    fn inst(pts: &[(i64, i64)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn run(i: &Instance) -> (HullList, HullWitnessList) {
        let mut meter = CostMeter::new();
        convex_hull(i, &mut meter).unwrap()
    }

    fn rng(mut state: u64) -> impl FnMut() -> u64 {
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        }
    }

    fn random_instance(next: &mut impl FnMut() -> u64, n: usize, range: u64) -> Instance {
        'outer: loop {
            let pts: Vec<Point> = (0..n)
                .map(|_| Point::new((next() % range) as i64, (next() % range) as i64))
                .collect();
            let i = match Instance::new(pts) {
                Ok(i) => i,
                Err(_) => continue,
            };
            if check_distinct_coords(&i).is_err() {
                continue;
            }
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        if orientation(i.get(a), i.get(b), i.get(c)) == Orientation::Collinear {
                            continue 'outer;
                        }
                    }
                }
            }
            return i;
        }
    }

    #[test]
    fn triangle_all_on_hull() {
        let i = inst(&[(0, 0), (5, 1), (2, 7)]);
        let (h, w) = run(&i);
        assert_eq!(h.indices.len(), 3);
        assert!(w.triples.iter().all(|t| t.is_none()));
        assert!(verify_hull(&i, &h, &w).is_ok());
        assert_eq!(h.indices[0], 0); // lexicographic minimum first
    }

    #[test]
    fn tiny_instances() {
        let i = inst(&[(3, 4)]);
        let (h, w) = run(&i);
        assert_eq!(h.indices, vec![0]);
        assert!(verify_hull(&i, &h, &w).is_ok());
        let i = inst(&[(5, 2), (1, 7)]);
        let (h, w) = run(&i);
        assert_eq!(h.indices, vec![1, 0]);
        assert!(verify_hull(&i, &h, &w).is_ok());
    }

    #[test]
    fn square_with_center_gets_containing_witness() {
        let i = inst(&[(0, 0), (7, 1), (8, 9), (1, 8), (4, 5)]);
        let (h, w) = run(&i);
        assert!(verify_hull(&i, &h, &w).is_ok());
        assert_eq!(h.indices.len(), 4);
        let t = w.triples[4].expect("center is not a hull vertex");
        assert!(strictly_inside_triangle(i.get(4), i.get(t[0]), i.get(t[1]), i.get(t[2])));
    }

    #[test]
    fn matches_brute_force_oracle_on_random_instances() {
        let mut next = rng(0x5eed);
        for _ in 0..50 {
            let i = random_instance(&mut next, 12, 64);
            let (h, w) = run(&i);
            assert!(verify_hull(&i, &h, &w).is_ok(), "{:?}", i.points());
            let mut got: Vec<usize> = h.indices.clone();
            got.sort_unstable();
            assert_eq!(got, hull_set_oracle(&i), "{:?}", i.points());
        }
    }

    #[test]
    fn hull_set_is_order_oblivious() {
        let mut next = rng(99);
        let i = random_instance(&mut next, 10, 64);
        let (h0, _) = run(&i);
        let set0: std::collections::BTreeSet<Point> = h0.indices.iter().map(|&k| i.get(k)).collect();
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..i.len()).collect();
            for k in (1..perm.len()).rev() {
                perm.swap(k, (next() % (k as u64 + 1)) as usize);
            }
            let shuffled = i.reordered(&perm);
            let (h, _) = run(&shuffled);
            let set1: std::collections::BTreeSet<Point> =
                h.indices.iter().map(|&k| shuffled.get(k)).collect();
            assert_eq!(set0, set1);
        }
    }

    #[test]
    fn verifier_rejects_broken_certificates() {
        let mut next = rng(2024);
        let i = random_instance(&mut next, 10, 64);
        let (h, w) = run(&i);
        assert!(verify_hull(&i, &h, &w).is_ok());

        let mut rev = h.clone();
        rev.indices.reverse();
        assert!(verify_hull(&i, &rev, &w).is_err());

        let mut dropped = h.clone();
        dropped.indices.pop();
        assert!(verify_hull(&i, &dropped, &w).is_err());

        // Redirect one witness corner so the triangle no longer contains the
        // point; search all witnessed points for a breaking replacement.
        let mutant = w.triples.iter().enumerate().find_map(|(k, t)| {
            let t = (*t)?;
            (0..i.len())
                .find(|&j| {
                    !t.contains(&j)
                        && j != k
                        && !strictly_inside_triangle(i.get(k), i.get(j), i.get(t[1]), i.get(t[2]))
                })
                .map(|j| (k, [j, t[1], t[2]]))
        });
        let (k, triple) = mutant.expect("some corner replacement breaks containment");
        let mut bad = w.clone();
        bad.triples[k] = Some(triple);
        assert!(verify_hull(&i, &h, &bad).is_err());
    }

    #[test]
    fn bridge_of_two_points() {
        let s = vec![(0usize, Point::new(0, 0)), (1usize, Point::new(10, 3))];
        let mut meter = CostMeter::new();
        let (p, q) = find_bridge(&s, 4, &mut meter);
        assert_eq!((p.0, q.0), (0, 1));
    }

    #[test]
    fn bridge_on_parabola_arc() {
        // Concave arc: y = -(2i-9)^2 + i for i = 1..8, all upper-hull vertices.
        let pts: Vec<Item> = (1..=8i64)
            .map(|i| ((i - 1) as usize, Point::new(i, -(2 * i - 9).pow(2) + i)))
            .collect();
        let mut meter = CostMeter::new();
        let (p, q) = find_bridge(&pts, 4, &mut meter);
        assert_eq!((p.0, q.0), (3, 4));
    }

    #[test]
    fn bridge_endpoints_are_hull_edge_crossing_the_line() {
        let mut next = rng(0xb41d6e);
        for _ in 0..300 {
            let n = (next() % 30 + 4) as usize;
            let i = random_instance(&mut next, n, 128);
            let items: Vec<Item> = i.points().iter().copied().enumerate().collect();
            let pl = *items.iter().min_by_key(|it| it.1.x).unwrap();
            let pr = *items.iter().max_by_key(|it| it.1.x).unwrap();
            let mut s: Vec<Item> = vec![pl, pr];
            for &it in &items {
                if it.0 != pl.0
                    && it.0 != pr.0
                    && orientation(pl.1, pr.1, it.1) == Orientation::CounterClockwise
                {
                    s.push(it);
                }
            }
            // Any a strictly inside the x-range.
            let a = pl.1.x + ((pr.1.x - pl.1.x) / 2).max(1) - 1;
            if !s.iter().any(|it| it.1.x <= a) || !s.iter().any(|it| it.1.x > a) {
                continue;
            }
            let mut meter = CostMeter::new();
            let (p, q) = find_bridge(&s, a, &mut meter);
            assert!(p.1.x <= a && q.1.x > a);
            // Supporting edge: every candidate lies strictly below the line,
            // except the endpoints.
            for &it in &s {
                if it.0 == p.0 || it.0 == q.0 {
                    continue;
                }
                assert_eq!(
                    orientation(p.1, q.1, it.1),
                    Orientation::Clockwise,
                    "{:?} above bridge {:?}-{:?}",
                    it,
                    p,
                    q
                );
            }
        }
    }

    #[test]
    fn quadrangle_tree_single_region_truncates() {
        // Anchors on the base, everything else above inside one region.
        let i = inst(&[(0, 0), (20, 1), (5, 7), (9, 6), (12, 8)]);
        let r = RegionSet::triangles(vec![Triangle {
            a: Point::new(3, 4),
            b: Point::new(16, 4),
            c: Point::new(9, 20),
        }])
        .unwrap();
        let t = build_quadrangle_tree(&i, &r).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[t.root].population, vec![0, 1]);
        let leaf = t.nodes[t.root].left.unwrap();
        assert_eq!(t.nodes[leaf].depth, 1);
        assert!(t.nodes[leaf].bridge.is_none());
        assert_eq!(quadrangle_depth_cost(&t), 3);
    }

    #[test]
    fn quadrangle_tree_populations_partition_points() {
        let mut next = rng(7171);
        for _ in 0..20 {
            let i = random_instance(&mut next, 11, 128);
            let t = build_quadrangle_tree(&i, &RegionSet::empty(RegionKind::Triangles)).unwrap();
            let mut seen = vec![0usize; i.len()];
            for node in &t.nodes {
                for &p in &node.population {
                    seen[p] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "{seen:?}");
            for p in 0..i.len() {
                assert!(t.nodes[t.node_of_point[p]].population.contains(&p));
            }
        }
    }

    #[test]
    fn quadrangle_tree_convex_polygon_populations_hold_hull_vertices() {
        // Convex octagon, general position. Every population point is a hull
        // vertex; each node holds at most its two bridge endpoints.
        let i = inst(&[(0, 3), (4, 0), (10, 1), (15, 5), (16, 10), (12, 14), (5, 15), (1, 9)]);
        assert_eq!(hull_set_oracle(&i).len(), 8);
        let t = build_quadrangle_tree(&i, &RegionSet::empty(RegionKind::Triangles)).unwrap();
        for node in &t.nodes[1..] {
            assert!(!node.population.is_empty() && node.population.len() <= 2, "{node:?}");
        }
        assert_eq!(t.nodes[t.root].population.len(), 2);
        let covered: usize = t.nodes.iter().map(|n| n.population.len()).sum();
        assert_eq!(covered, 8);
    }

    /// Independent replay computing only the depth sum, using a sort-based
    /// median and a monotone-chain bridge oracle.
    fn depth_sum_replay(pl: Point, pr: Point, interior: Vec<Point>, depth: u64) -> u64 {
        if interior.is_empty() {
            return 0;
        }
        let mut xs: Vec<i64> = interior.iter().map(|p| p.x).collect();
        xs.sort_unstable();
        let a = xs[(xs.len() - 1) / 2];
        // Bridge by full upper hull of the subproblem.
        let mut all = interior.clone();
        all.push(pl);
        all.push(pr);
        all.sort_by_key(|p| p.x);
        let mut chain: Vec<Point> = Vec::new();
        for &p in &all {
            while chain.len() >= 2
                && orientation(chain[chain.len() - 2], chain[chain.len() - 1], p)
                    != Orientation::Clockwise
            {
                chain.pop();
            }
            chain.push(p);
        }
        let e = (0..chain.len() - 1)
            .find(|&e| chain[e].x <= a && chain[e + 1].x > a)
            .unwrap();
        let (pi, pj) = (chain[e], chain[e + 1]);
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        let mut here = 0u64;
        for &p in &interior {
            if p == pi || p == pj {
                here += 1;
            } else if pi != pl && orientation(pl, pi, p) == Orientation::CounterClockwise {
                s1.push(p);
            } else if pj != pr && orientation(pj, pr, p) == Orientation::CounterClockwise {
                s2.push(p);
            } else {
                here += 1;
            }
        }
        let mut total = here * depth;
        if pi != pl {
            total += depth_sum_replay(pl, pi, s1, depth + 1);
        }
        if pj != pr {
            total += depth_sum_replay(pj, pr, s2, depth + 1);
        }
        total
    }

    #[test]
    fn quadrangle_depth_cost_matches_replay_oracle() {
        let mut next = rng(0xdeed);
        for _ in 0..20 {
            let i = random_instance(&mut next, 9, 100);
            let t = build_quadrangle_tree(&i, &RegionSet::empty(RegionKind::Triangles)).unwrap();
            let items: Vec<Item> = i.points().iter().copied().enumerate().collect();
            let pl = *items.iter().min_by_key(|it| it.1.x).unwrap();
            let pr = *items.iter().max_by_key(|it| it.1.x).unwrap();
            let mut upper = Vec::new();
            let mut lower = Vec::new();
            for &(pos, pt) in &items {
                if pos == pl.0 || pos == pr.0 {
                    continue;
                }
                match orientation(pl.1, pr.1, pt) {
                    Orientation::CounterClockwise => upper.push(pt),
                    _ => lower.push(Point::new(pt.x, -pt.y)),
                }
            }
            let expected = depth_sum_replay(pl.1, pr.1, upper, 1)
                + depth_sum_replay(
                    Point::new(pl.1.x, -pl.1.y),
                    Point::new(pr.1.x, -pr.1.y),
                    lower,
                    1,
                );
            assert_eq!(quadrangle_depth_cost(&t), expected, "{:?}", i.points());
        }
    }

    #[test]
    fn quadrangle_order_identity_without_regions() {
        let mut next = rng(555);
        let i = random_instance(&mut next, 8, 64);
        let t = build_quadrangle_tree(&i, &RegionSet::empty(RegionKind::Triangles)).unwrap();
        let regions = RegionSet::empty(RegionKind::Triangles);
        let kappa = CompassFunction { assignment: vec![] };
        let ord = quadrangle_order(&t, &i, &regions, &kappa);
        assert_eq!(ord.rho, (0..i.len()).collect::<Vec<_>>());
        assert_eq!(ord.linear.len(), i.len());
        // The linear order extends the tree order.
        for a in 0..i.len() {
            for b in 0..i.len() {
                if t.precedes(a, b) {
                    let pa = ord.linear.iter().position(|&x| x == a).unwrap();
                    let pb = ord.linear.iter().position(|&x| x == b).unwrap();
                    assert!(pa < pb);
                }
            }
        }
    }

    #[test]
    fn quadrangle_order_matches_compass_within_region() {
        // Base anchors plus three points stacked inside one region; the
        // region's points share a node (truncated leaf).
        let i = inst(&[(0, 0), (20, 1), (6, 5), (9, 8), (13, 4)]);
        let r = RegionSet::triangles(vec![Triangle {
            a: Point::new(3, 3),
            b: Point::new(17, 2),
            c: Point::new(10, 20),
        }])
        .unwrap();
        let t = build_quadrangle_tree(&i, &r).unwrap();
        for order in AxisOrder::ALL {
            let kappa = CompassFunction { assignment: vec![order] };
            let ord = quadrangle_order(&t, &i, &r, &kappa);
            // Property: within the region, the linear order lists the points
            // in the compass order.
            let members: Vec<usize> = ord
                .linear
                .iter()
                .copied()
                .filter(|&p| r.region_of(i.get(p)).is_some())
                .collect();
            for w in members.windows(2) {
                assert!(
                    order.le(i.get(w[0]), i.get(w[1])),
                    "{order:?}: {:?} before {:?}",
                    i.get(w[0]),
                    i.get(w[1])
                );
            }
            // Cross-node pairs keep the original tree order.
            for a in 0..i.len() {
                for b in 0..i.len() {
                    if t.node_of_point[a] != t.node_of_point[b] {
                        assert_eq!(
                            quadrangle_kappa_precedes(&t, &ord, a, b),
                            t.precedes(a, b)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn meter_total_bounded_on_respecting_inputs() {
        let i = inst(&[(0, 0), (20, 1), (6, 5), (9, 8), (13, 4), (3, 19), (18, 17)]);
        let t = build_quadrangle_tree(&i, &RegionSet::empty(RegionKind::Triangles)).unwrap();
        let mut meter = CostMeter::new();
        let (h, w) = convex_hull(&i, &mut meter).unwrap();
        assert!(verify_hull(&i, &h, &w).is_ok());
        let bound = 60 * (i.len() as u64 + quadrangle_depth_cost(&t));
        assert!(meter.total() <= bound, "{} > {}", meter.total(), bound);
    }
}
