//! Universe (P, R) machinery at desk scale: the linear order from the red/blue
//! digraph, region refinement along the quadrant tree, exhaustive enumeration
//! of respecting inputs, witness classes, ordered normalized downdrafts, the
//! injective map Phi, and numeric verification of the counting bounds.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::geom::{dominates, strictly_inside_triangle, Instance};
use crate::hull::{
    build_quadrangle_tree_grouped, convex_hull, quadrangle_depth_cost, quadrangle_order_grouped,
};
use crate::meter::CostMeter;
use crate::oracles::{hull_set_oracle, pareto_front_oracle};
use crate::pareto::{build_quadrant_tree, depth_cost, QuadrantTree};
use crate::region::{
    observed_compass, respects, CompassFunction, PointGroups, Rect, Region, RegionKind, RegionSet,
};

/// Which of the two witnessed problems a universe is enumerated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Problem {
    Pareto,
    Hull,
}

/// Hard cap on permutation enumeration.
pub const MAX_ENUM_N: usize = 8;
/// Cap on witness-list combinations per input and downdrafts per compass
/// function; exceeded only outside the supported desk scale.
pub const MAX_COMBINATIONS: u128 = 4_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UniverseError {
    #[error("instance of {n} points exceeds enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("combination count exceeds {0} for one input")]
    CombinationExplosion(u128),
    #[error("order digraph has a cycle")]
    Cycle,
    #[error("input does not respect the region set")]
    NotRespecting,
    #[error("invalid witness entry at position {0}")]
    BadWitness(usize),
    #[error("no corner of the witness triangle at position {0} succeeds the point in the tree order")]
    NoCorner(usize),
    #[error("region set has the wrong kind for this problem")]
    WrongKind,
}

/// Topological order of the red/blue digraph: red edges run from each point to
/// every point dominating it; blue edges run within each region by increasing
/// x (x-sorted regions) or increasing y (y-sorted regions). Parallel red/blue
/// duplicates collapse; opposite-direction conflicts cannot occur. Ties are
/// broken by smallest position, fixing one deterministic order.
pub fn linear_order_l(
    inst: &Instance,
    regions: &RegionSet,
    kappa: &CompassFunction,
) -> Result<Vec<usize>, UniverseError> {
    linear_order_l_grouped(inst, &PointGroups::from_regions(inst, regions), kappa)
}

/// [`linear_order_l`] with membership given as point groups.
pub fn linear_order_l_grouped(
    inst: &Instance,
    groups: &PointGroups,
    kappa: &CompassFunction,
) -> Result<Vec<usize>, UniverseError> {
    assert_eq!(kappa.assignment.len(), groups.len());
    let n = inst.len();
    let mut adj = vec![vec![false; n]; n];
    for q in 0..n {
        for p in 0..n {
            if p != q && dominates(inst.get(p), inst.get(q)) {
                adj[q][p] = true;
            }
        }
    }
    for (g, members) in groups.groups.iter().enumerate() {
        let by_x = kappa.assignment[g].by_x();
        for &p in members {
            for &q in members {
                if p == q {
                    continue;
                }
                let (a, b) = (inst.get(p), inst.get(q));
                let before = if by_x { a.x < b.x } else { a.y < b.y };
                if before {
                    adj[p][q] = true;
                }
            }
        }
    }

    let mut indeg = vec![0usize; n];
    for row in &adj {
        for (v, &e) in row.iter().enumerate() {
            if e {
                indeg[v] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    for _ in 0..n {
        let u = (0..n)
            .find(|&u| !done[u] && indeg[u] == 0)
            .ok_or(UniverseError::Cycle)?;
        done[u] = true;
        order.push(u);
        for (v, &e) in adj[u].iter().enumerate() {
            if e {
                indeg[v] -= 1;
            }
        }
    }
    Ok(order)
}

/// Split every rectangle along the quadrant tree: at each node, the piece
/// inside the representative's quadrant stays put, the piece above the
/// representative goes to the left child, the piece to its right goes to the
/// right child, and the open dominating area is discarded. Pieces holding no
/// point of P are dropped.
pub fn refine_regions(inst: &Instance, regions: &RegionSet, tree: &QuadrantTree) -> RegionSet {
    assert_eq!(regions.kind, RegionKind::Rectangles);
    let mut out: Vec<Rect> = Vec::new();
    let mut keep = |r: Rect| {
        if !r.is_empty() && inst.points().iter().any(|&p| r.contains(p)) {
            out.push(r);
        }
    };
    for reg in &regions.regions {
        let Region::Rect(rect) = reg else { unreachable!("rectangle kind") };
        let mut stack = vec![(*rect, tree.root)];
        while let Some((r, node)) = stack.pop() {
            if r.is_empty() {
                continue;
            }
            let Some(u) = node else {
                keep(r);
                continue;
            };
            let nd = &tree.nodes[u];
            let Some(rep) = nd.rep else {
                keep(r);
                continue;
            };
            let q = inst.get(rep);
            keep(Rect { xmax: r.xmax.min(q.x), ymax: r.ymax.min(q.y), ..r });
            stack.push((Rect { xmax: r.xmax.min(q.x), ymin: r.ymin.max(q.y + 1), ..r }, nd.left));
            stack.push((Rect { xmin: r.xmin.max(q.x + 1), ymax: r.ymax.min(q.y), ..r }, nd.right));
        }
    }
    RegionSet::rectangles(out).expect("refined pieces stay pairwise disjoint")
}

/// Exhaustive counts for one universe.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct UniverseCensus {
    pub problem: Problem,
    pub n: usize,
    /// |I_{P,R}|: orderings that respect the region set.
    pub inputs_count: u64,
    /// Distinct output index lists over all respecting inputs.
    pub outputs_count: u64,
    /// max_W |V(P, R, W)|.
    pub v_max: u64,
    pub ond_max: u64,
    /// 4^|R|.
    pub compass_count: u64,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn extremal_mask(inst: &Instance, problem: Problem) -> Vec<bool> {
    let ex = match problem {
        Problem::Pareto => pareto_front_oracle(inst),
        Problem::Hull => hull_set_oracle(inst),
    };
    let mut mask = vec![false; inst.len()];
    for p in ex {
        mask[p] = true;
    }
    mask
}

fn output_list(inst: &Instance, problem: Problem) -> Vec<usize> {
    match problem {
        Problem::Pareto => pareto_front_oracle(inst),
        Problem::Hull => {
            let mut meter = CostMeter::new();
            convex_hull(inst, &mut meter).expect("enumeration instances are valid").0.indices
        }
    }
}

/// All valid witness lists per input: for each position, a dominator position
/// (Pareto) or a sorted triple of positions whose triangle strictly contains
/// the point (hull); -1 sentinels at extremal positions. Serialized as flat
/// i64 vectors: length n for Pareto, 3n for hull.
fn witness_options(inst: &Instance, extremal: &[bool], problem: Problem) -> Vec<Vec<Vec<i64>>> {
    let n = inst.len();
    (0..n)
        .map(|i| {
            if extremal[i] {
                return vec![match problem {
                    Problem::Pareto => vec![-1],
                    Problem::Hull => vec![-1, -1, -1],
                }];
            }
            let pt = inst.get(i);
            match problem {
                Problem::Pareto => (0..n)
                    .filter(|&w| w != i && dominates(inst.get(w), pt))
                    .map(|w| vec![w as i64])
                    .collect(),
                Problem::Hull => {
                    let mut opts = Vec::new();
                    for a in 0..n {
                        for b in a + 1..n {
                            for c in b + 1..n {
                                if strictly_inside_triangle(pt, inst.get(a), inst.get(b), inst.get(c))
                                {
                                    opts.push(vec![a as i64, b as i64, c as i64]);
                                }
                            }
                        }
                    }
                    opts
                }
            }
        })
        .collect()
}

/// Witness classes V(P, R, W): maps each serialized witness list to the
/// permutations (position -> point id in `base`) realizing it.
pub fn witness_classes(
    base: &Instance,
    regions: &RegionSet,
    problem: Problem,
) -> Result<HashMap<Vec<i64>, Vec<Vec<usize>>>, UniverseError> {
    let n = base.len();
    if n > MAX_ENUM_N {
        return Err(UniverseError::TooLarge { n, limit: MAX_ENUM_N });
    }
    let mut classes: HashMap<Vec<i64>, Vec<Vec<usize>>> = HashMap::new();
    for perm in permutations(n) {
        let inst = base.reordered(&perm);
        if !respects(&inst, regions) {
            continue;
        }
        let extremal = extremal_mask(&inst, problem);
        let options = witness_options(&inst, &extremal, problem);
        let count: u128 = options.iter().map(|o| o.len() as u128).product();
        if count > MAX_COMBINATIONS {
            return Err(UniverseError::CombinationExplosion(MAX_COMBINATIONS));
        }
        let mut idx = vec![0usize; n];
        loop {
            let w: Vec<i64> = (0..n).flat_map(|i| options[i][idx[i]].iter().copied()).collect();
            classes.entry(w).or_default().push(perm.clone());
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < options[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    Ok(classes)
}

/// Enumerate all n! orderings, filter by respect, collect outputs and witness
/// classes, and compute the census (including ond_max for the same universe).
pub fn enumerate_universe(
    base: &Instance,
    regions: &RegionSet,
    problem: Problem,
) -> Result<UniverseCensus, UniverseError> {
    let n = base.len();
    if n > MAX_ENUM_N {
        return Err(UniverseError::TooLarge { n, limit: MAX_ENUM_N });
    }
    let mut inputs_count = 0u64;
    let mut outputs: HashSet<Vec<usize>> = HashSet::new();
    for perm in permutations(n) {
        let inst = base.reordered(&perm);
        if !respects(&inst, regions) {
            continue;
        }
        inputs_count += 1;
        outputs.insert(output_list(&inst, problem));
    }
    let classes = witness_classes(base, regions, problem)?;
    let v_max = classes.values().map(|v| v.len() as u64).max().unwrap_or(0);
    let ond = enumerate_ond(base, regions, problem)?;
    Ok(UniverseCensus {
        problem,
        n,
        inputs_count,
        outputs_count: outputs.len() as u64,
        v_max,
        compass_count: 4u64.pow(regions.len() as u32),
        ond_max: ond.ond_max,
    })
}

/// Downdraft census per compass function.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct OndReport {
    pub ond_max: u64,
    pub per_kappa: Vec<u64>,
}

pub fn enumerate_ond(
    inst: &Instance,
    regions: &RegionSet,
    problem: Problem,
) -> Result<OndReport, UniverseError> {
    enumerate_ond_grouped(inst, &PointGroups::from_regions(inst, regions), problem)
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Count ordered normalized downdrafts per compass function and return the
/// maximum. Pareto uses the red/blue linear order; hull uses the quadrangle
/// tree order permuted per kappa. Normalization is checked non-strictly
/// (equal images allowed); fiber orders are counted as linear extensions with
/// each region's members in their fixed relative order.
pub fn enumerate_ond_grouped(
    inst: &Instance,
    groups: &PointGroups,
    problem: Problem,
) -> Result<OndReport, UniverseError> {
    let n = inst.len();
    if n > MAX_ENUM_N {
        return Err(UniverseError::TooLarge { n, limit: MAX_ENUM_N });
    }
    let extremal = extremal_mask(inst, problem);
    let movers: Vec<usize> = (0..n).filter(|&p| !extremal[p]).collect();
    let tree = match problem {
        Problem::Pareto => None,
        Problem::Hull => {
            Some(build_quadrangle_tree_grouped(inst, groups).map_err(|_| UniverseError::WrongKind)?)
        }
    };

    let mut per_kappa = Vec::new();
    for kappa in CompassFunction::all_for(groups.len()) {
        // rank: a linear order compatible with the downdraft relation;
        // prec[p][q]: q is a valid image for p.
        let mut prec = vec![vec![false; n]; n];
        let mut rank = vec![0usize; n];
        match (problem, &tree) {
            (Problem::Pareto, _) => {
                let l = linear_order_l_grouped(inst, groups, &kappa)?;
                for (i, &p) in l.iter().enumerate() {
                    rank[p] = i;
                }
                for p in 0..n {
                    for q in 0..n {
                        prec[p][q] = p != q && dominates(inst.get(q), inst.get(p));
                    }
                }
            }
            (Problem::Hull, Some(tree)) => {
                let order = quadrangle_order_grouped(tree, inst, groups, &kappa);
                for (i, &p) in order.linear.iter().enumerate() {
                    rank[p] = i;
                }
                let mut rho_inv = vec![0usize; n];
                for (q, &p) in order.rho.iter().enumerate() {
                    rho_inv[p] = q;
                }
                for p in 0..n {
                    for q in 0..n {
                        prec[p][q] = p != q && tree.precedes(rho_inv[p], rho_inv[q]);
                    }
                }
            }
            (Problem::Hull, None) => unreachable!(),
        }

        let options: Vec<Vec<usize>> =
            movers.iter().map(|&p| (0..n).filter(|&q| prec[p][q]).collect()).collect();
        let combos: u128 = options.iter().map(|o| o.len() as u128).product();
        if combos > MAX_COMBINATIONS {
            return Err(UniverseError::CombinationExplosion(MAX_COMBINATIONS));
        }
        let mut total: u128 = 0;
        if options.iter().all(|o| !o.is_empty()) {
            let mut idx = vec![0usize; movers.len()];
            loop {
                let mut psi = vec![usize::MAX; n];
                for (k, &p) in movers.iter().enumerate() {
                    psi[p] = options[k][idx[k]];
                }
                if normalized(&psi, groups, &rank, &movers) {
                    total += fiber_orderings(&psi, groups, &movers);
                }
                let mut pos = 0;
                loop {
                    if pos == movers.len() {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < options[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == movers.len() {
                    break;
                }
            }
        }
        per_kappa.push(total as u64);
    }
    Ok(OndReport { ond_max: per_kappa.iter().copied().max().unwrap_or(1), per_kappa })
}

/// Condition A, non-strict: same-region movers in rank order must map to
/// weakly rank-ordered images.
fn normalized(psi: &[usize], groups: &PointGroups, rank: &[usize], movers: &[usize]) -> bool {
    for members in &groups.groups {
        let mut ms: Vec<usize> = members.iter().copied().filter(|&p| psi[p] != usize::MAX).collect();
        ms.sort_by_key(|&p| rank[p]);
        for w in ms.windows(2) {
            if rank[psi[w[0]]] > rank[psi[w[1]]] {
                return false;
            }
        }
    }
    let _ = movers;
    true
}

/// Number of fiber orders satisfying Condition B: per fiber, f! divided by the
/// factorials of the per-region member counts (members outside all regions are
/// unconstrained singletons).
fn fiber_orderings(psi: &[usize], groups: &PointGroups, movers: &[usize]) -> u128 {
    let mut fibers: HashMap<usize, Vec<usize>> = HashMap::new();
    for &p in movers {
        fibers.entry(psi[p]).or_default().push(p);
    }
    let mut total: u128 = 1;
    for members in fibers.values() {
        let mut count = factorial(members.len());
        let mut per_group: HashMap<usize, usize> = HashMap::new();
        for &p in members {
            if let Some(g) = groups.group_of[p] {
                *per_group.entry(g).or_insert(0) += 1;
            }
        }
        for &c in per_group.values() {
            count /= factorial(c);
        }
        total *= count;
    }
    total
}

/// The image Phi(I): everything needed to distinguish inputs within one
/// witness class. Points are identified by their ids in the base instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhiImage {
    pub kappa: Vec<crate::region::AxisOrder>,
    /// (point, image, fiber rank) per mover, sorted by point.
    pub psi: Vec<(usize, usize, usize)>,
    /// The front or hull output as an index list.
    pub output: Vec<usize>,
    /// Hull only: chosen corner position per input position, -1 at hull
    /// positions.
    pub corners: Vec<i64>,
}

/// Construct Phi(I) = (kappa, ordered normalized downdraft, output list[,
/// corner assignment]) for one input of a witness class. `perm[i]` is the base
/// id of the point at position i; `witness` is the serialized witness list.
pub fn phi_map(
    base: &Instance,
    regions: &RegionSet,
    perm: &[usize],
    witness: &[i64],
    problem: Problem,
) -> Result<PhiImage, UniverseError> {
    let n = base.len();
    let inst = base.reordered(perm);
    let kappa = observed_compass(&inst, regions).ok_or(UniverseError::NotRespecting)?;
    let groups = PointGroups::from_regions(base, regions);
    let extremal = extremal_mask(base, problem);

    // phi over base ids, and the position realizing each domain point.
    let mut phi = vec![usize::MAX; n];
    let mut pos_of = vec![usize::MAX; n];
    let mut corners = Vec::new();
    let rank: Vec<usize>;
    match problem {
        Problem::Pareto => {
            if witness.len() != n {
                return Err(UniverseError::BadWitness(0));
            }
            for i in 0..n {
                let w = witness[i];
                if w < 0 {
                    if !extremal[perm[i]] {
                        return Err(UniverseError::BadWitness(i));
                    }
                    continue;
                }
                let w = w as usize;
                if w >= n || w == i || !dominates(inst.get(w), inst.get(i)) {
                    return Err(UniverseError::BadWitness(i));
                }
                phi[perm[i]] = perm[w];
                pos_of[perm[i]] = i;
            }
            let l = linear_order_l_grouped(base, &groups, &kappa)?;
            let mut r = vec![0usize; n];
            for (i, &p) in l.iter().enumerate() {
                r[p] = i;
            }
            rank = r;
        }
        Problem::Hull => {
            if witness.len() != 3 * n {
                return Err(UniverseError::BadWitness(0));
            }
            let tree =
                build_quadrangle_tree_grouped(base, &groups).map_err(|_| UniverseError::WrongKind)?;
            let order = quadrangle_order_grouped(&tree, base, &groups, &kappa);
            let mut r = vec![0usize; n];
            for (i, &p) in order.linear.iter().enumerate() {
                r[p] = i;
            }
            rank = r;
            corners = vec![-1i64; n];
            for i in 0..n {
                let t = &witness[3 * i..3 * i + 3];
                if t[0] < 0 {
                    if !extremal[perm[i]] {
                        return Err(UniverseError::BadWitness(i));
                    }
                    continue;
                }
                let tri: Vec<usize> = t.iter().map(|&v| v as usize).collect();
                if tri.iter().any(|&v| v >= n)
                    || !strictly_inside_triangle(
                        inst.get(i),
                        inst.get(tri[0]),
                        inst.get(tri[1]),
                        inst.get(tri[2]),
                    )
                {
                    return Err(UniverseError::BadWitness(i));
                }
                let c = *tri
                    .iter()
                    .find(|&&c| tree.precedes(perm[i], perm[c]))
                    .ok_or(UniverseError::NoCorner(i))?;
                corners[i] = c as i64;
                // Conjugate by rho: the permuted input is rho(I), and phi maps
                // rho(I[i]) to rho(I[C(i)]).
                phi[order.rho[perm[i]]] = order.rho[perm[c]];
                pos_of[order.rho[perm[i]]] = i;
            }
        }
    }

    // sigma per region: movers sorted by rank matched with the same set sorted
    // by (rank of image, rank), then psi = phi . sigma.
    let mut sigma: Vec<usize> = (0..n).collect();
    for members in &groups.groups {
        let movers: Vec<usize> =
            members.iter().copied().filter(|&p| phi[p] != usize::MAX).collect();
        let mut by_rank = movers.clone();
        by_rank.sort_by_key(|&p| rank[p]);
        let mut by_image = movers;
        by_image.sort_by_key(|&q| (rank[phi[q]], rank[q]));
        for (p, q) in by_rank.iter().zip(by_image.iter()) {
            sigma[*p] = *q;
        }
    }
    let domain: Vec<usize> = (0..n).filter(|&p| phi[p] != usize::MAX).collect();
    let mut psi = vec![usize::MAX; n];
    for &p in &domain {
        psi[p] = phi[sigma[p]];
    }

    // Fiber ranks from input positions: sigma^{-1} of the point at position i
    // precedes sigma^{-1} of the one at position j iff i < j.
    let mut fibers: HashMap<usize, Vec<usize>> = HashMap::new();
    for &p in &domain {
        fibers.entry(psi[p]).or_default().push(p);
    }
    let mut fiber_rank = vec![0usize; n];
    for members in fibers.values_mut() {
        members.sort_by_key(|&p| pos_of[sigma[p]]);
        for (k, &p) in members.iter().enumerate() {
            fiber_rank[p] = k;
        }
    }

    let output = output_list(&inst, problem);
    Ok(PhiImage {
        kappa: kappa.assignment,
        psi: domain.iter().map(|&p| (p, psi[p], fiber_rank[p])).collect(),
        output,
        corners,
    })
}

/// Outcome of the counting checks for one universe.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BoundsReport {
    /// v_max <= outputs * ond_max * 4^n (Pareto) or * 4^n * 3^n (hull).
    pub counting_holds: bool,
    pub counting_slack_bits: f64,
    /// ond_max(P, R') * 2^{sum of depths} * prod |r' cap P|! <= n^n on the
    /// refined region set.
    pub refined_holds: bool,
    pub refined_slack_bits: f64,
    pub refined_region_sizes: Vec<usize>,
    pub refined_depth_sum: u64,
    pub refined_ond_max: u64,
}

fn log2_big(v: &BigUint) -> f64 {
    if v == &BigUint::from(0u32) {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 52 {
        v.to_f64().unwrap().log2()
    } else {
        let shift = bits - 52;
        (v >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

/// Verify the output-counting bound for the census and the quadrant/quadrangle
/// tree downdraft bound on the refined region set, in exact integers.
pub fn check_counting_bounds(
    base: &Instance,
    regions: &RegionSet,
    census: &UniverseCensus,
) -> Result<BoundsReport, UniverseError> {
    let n = census.n;
    let mut rhs = BigUint::from(census.outputs_count)
        * BigUint::from(census.ond_max)
        * BigUint::from(4u32).pow(n as u32);
    if census.problem == Problem::Hull {
        rhs *= BigUint::from(3u32).pow(n as u32);
    }
    let lhs = BigUint::from(census.v_max);
    let counting_holds = lhs <= rhs;
    let counting_slack_bits = log2_big(&rhs) - log2_big(&lhs);

    // Refined region set and its tree.
    let (refined_groups, depth_sum, refined_ond) = match census.problem {
        Problem::Pareto => {
            let tree = build_quadrant_tree(base, regions).map_err(|_| UniverseError::WrongKind)?;
            let refined = refine_regions(base, regions, &tree);
            let tree2 =
                build_quadrant_tree(base, &refined).map_err(|_| UniverseError::WrongKind)?;
            let groups = PointGroups::from_regions(base, &refined);
            let ond = enumerate_ond(base, &refined, Problem::Pareto)?;
            (groups, depth_cost(&tree2), ond)
        }
        Problem::Hull => {
            let tree = build_quadrangle_tree_grouped(base, &PointGroups::from_regions(base, regions))
                .map_err(|_| UniverseError::WrongKind)?;
            // Refinement for hull: split each region's points by tree node;
            // this leaves the quadrangle tree unchanged.
            let mut split: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
            let rs = PointGroups::from_regions(base, regions);
            for p in 0..base.len() {
                if let Some(g) = rs.group_of[p] {
                    split.entry((g, tree.node_of_point[p])).or_default().push(p);
                }
            }
            let mut keys: Vec<(usize, usize)> = split.keys().copied().collect();
            keys.sort_unstable();
            let groups = PointGroups::from_groups(
                base.len(),
                keys.into_iter().map(|k| split.remove(&k).unwrap()).collect(),
            );
            let tree2 = build_quadrangle_tree_grouped(base, &groups)
                .map_err(|_| UniverseError::WrongKind)?;
            let ond = enumerate_ond_grouped(base, &groups, Problem::Hull)?;
            (groups, quadrangle_depth_cost(&tree2), ond)
        }
    };
    let sizes: Vec<usize> = refined_groups.groups.iter().map(|g| g.len()).collect();
    let mut lhs2 = BigUint::from(refined_ond.ond_max) * (BigUint::from(1u32) << depth_sum);
    for &s in &sizes {
        lhs2 *= (1..=s as u64).map(BigUint::from).product::<BigUint>().max(BigUint::from(1u32));
    }
    let rhs2 = BigUint::from(n).pow(n as u32);
    Ok(BoundsReport {
        counting_holds,
        counting_slack_bits,
        refined_holds: lhs2 <= rhs2,
        refined_slack_bits: log2_big(&rhs2) - log2_big(&lhs2),
        refined_region_sizes: sizes,
        refined_depth_sum: depth_sum,
        refined_ond_max: refined_ond.ond_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::region::{AxisOrder, RegionKind, Triangle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(pts: &[(i64, i64)]) -> Instance {
        Instance::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn no_regions() -> RegionSet {
        RegionSet::empty(RegionKind::Rectangles)
    }

    #[test]
    fn linear_order_on_domination_chain_is_domination_order() {
        let i = inst(&[(3, 3), (1, 1), (2, 2)]);
        let kappa = CompassFunction { assignment: vec![] };
        let l = linear_order_l(&i, &no_regions(), &kappa).unwrap();
        assert_eq!(l, vec![1, 2, 0]);
    }

    #[test]
    fn linear_order_on_antichain_is_deterministic() {
        let i = inst(&[(1, 5), (2, 4), (3, 3)]);
        let kappa = CompassFunction { assignment: vec![] };
        let l = linear_order_l(&i, &no_regions(), &kappa).unwrap();
        assert_eq!(l, vec![0, 1, 2]);
    }

    #[test]
    fn linear_order_follows_x_in_x_sorted_region() {
        // Three incomparable points in one region; under an x-sorted kappa the
        // region's order in L must be increasing x, even for DecX.
        let i = inst(&[(3, 3), (1, 5), (2, 4), (10, 1)]);
        let r = RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 2, xmax: 4, ymax: 6 }]).unwrap();
        for kappa in [AxisOrder::IncX, AxisOrder::DecX] {
            let l = linear_order_l(&i, &r, &CompassFunction { assignment: vec![kappa] }).unwrap();
            let rank = |p: usize| l.iter().position(|&q| q == p).unwrap();
            assert!(rank(1) < rank(2) && rank(2) < rank(0));
        }
    }

    #[test]
    fn linear_order_never_cycles_fuzzed() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
        for _ in 0..500 {
            let n = rng.gen_range(2..=12);
            let mut xs: Vec<i64> = (0..n as i64).collect();
            let mut ys: Vec<i64> = (0..n as i64).collect();
            for k in (1..n).rev() {
                xs.swap(k, rng.gen_range(0..=k));
                ys.swap(k, rng.gen_range(0..=k));
            }
            let i = inst(&xs.iter().zip(&ys).map(|(&x, &y)| (x, y)).collect::<Vec<_>>());
            let mut rects = Vec::new();
            let k = rng.gen_range(0..=3);
            // Disjoint vertical strips.
            let mut cuts: Vec<i64> = vec![-1, n as i64];
            for _ in 0..k {
                cuts.push(rng.gen_range(0..n as i64));
            }
            cuts.sort_unstable();
            cuts.dedup();
            for w in cuts.windows(2) {
                if w[0] < w[1] {
                    rects.push(Rect { xmin: w[0] + 1, ymin: 0, xmax: w[1], ymax: n as i64 });
                }
            }
            let r = RegionSet::rectangles(rects).unwrap();
            for kappa in CompassFunction::all_for(r.len()).into_iter().take(4) {
                assert!(linear_order_l(&i, &r, &kappa).is_ok());
            }
        }
    }

    #[test]
    fn refine_keeps_region_clear_of_all_representatives() {
        // Region in the far top-left, above and left of every representative:
        // never split, never clipped.
        let i = inst(&[(10, 1), (11, 2), (12, 3), (1, 20), (2, 21)]);
        let rect = Rect { xmin: 0, ymin: 19, xmax: 3, ymax: 22 };
        let r = RegionSet::rectangles(vec![rect]).unwrap();
        let tree = build_quadrant_tree(&i, &r).unwrap();
        let refined = refine_regions(&i, &r, &tree);
        assert_eq!(refined.regions, vec![Region::Rect(rect)]);
    }

    #[test]
    fn refine_splits_root_quadrant_region() {
        let i = inst(&[(1, 1), (2, 4), (3, 2), (4, 3)]);
        let rect = Rect { xmin: 0, ymin: 0, xmax: 5, ymax: 5 };
        let r = RegionSet::rectangles(vec![rect]).unwrap();
        let tree = build_quadrant_tree(&i, &r).unwrap();
        let refined = refine_regions(&i, &r, &tree);
        assert!(!refined.regions.is_empty() && refined.regions.len() <= 6);
        // Partition is preserved: every point stays in exactly one piece.
        for &p in i.points() {
            assert_eq!(refined.regions.iter().filter(|r| r.contains(p)).count(), 1);
        }
    }

    #[test]
    fn refined_regions_respect_tree_populations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(3..=10);
            let mut xs: Vec<i64> = (0..n as i64).collect();
            let mut ys: Vec<i64> = (0..n as i64).collect();
            for k in (1..n).rev() {
                xs.swap(k, rng.gen_range(0..=k));
                ys.swap(k, rng.gen_range(0..=k));
            }
            let i = inst(&xs.iter().zip(&ys).map(|(&x, &y)| (x, y)).collect::<Vec<_>>());
            let rect = Rect { xmin: 0, ymin: 0, xmax: n as i64, ymax: n as i64 };
            let r = RegionSet::rectangles(vec![rect]).unwrap();
            let tree = build_quadrant_tree(&i, &r).unwrap();
            let refined = refine_regions(&i, &r, &tree);
            for members in refined.memberships(&i) {
                assert!(!members.is_empty());
                let nodes: HashSet<usize> =
                    members.iter().map(|&p| tree.node_of_point[p]).collect();
                assert_eq!(nodes.len(), 1, "refined region spans tree nodes");
            }
        }
    }

    #[test]
    fn census_two_incomparable_points() {
        let i = inst(&[(1, 2), (2, 1)]);
        let c = enumerate_universe(&i, &no_regions(), Problem::Pareto).unwrap();
        assert_eq!(c.inputs_count, 2);
        // Both points are on the front; the two orderings produce different
        // index lists.
        assert_eq!(c.outputs_count, 2);
        assert_eq!(c.v_max, 2);
        assert_eq!(c.compass_count, 1);
        assert_eq!(c.ond_max, 1);
    }

    #[test]
    fn census_chain_of_two() {
        let i = inst(&[(1, 1), (2, 2)]);
        let c = enumerate_universe(&i, &no_regions(), Problem::Pareto).unwrap();
        assert_eq!(c.inputs_count, 2);
        assert_eq!(c.outputs_count, 2);
        assert_eq!(c.v_max, 1);
        assert_eq!(c.ond_max, 1);
    }

    #[test]
    fn census_with_region_counts_respecting_inputs() {
        let i = inst(&[(1, 4), (2, 5), (3, 6), (9, 1)]);
        let r = RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 3, xmax: 4, ymax: 7 }]).unwrap();
        let c = enumerate_universe(&i, &r, Problem::Pareto).unwrap();
        // The 3 region points are a chain: monotone in all four orders only
        // when sorted by x ascending or descending, i.e. 2 of 3! relative
        // orders; 24 * 2/6 = 8.
        assert_eq!(c.inputs_count, 8);
        assert!(c.v_max <= c.inputs_count);
    }

    #[test]
    fn ond_chain_of_two_is_one() {
        let i = inst(&[(1, 1), (2, 2)]);
        let r = enumerate_ond(&i, &no_regions(), Problem::Pareto).unwrap();
        assert_eq!(r.per_kappa, vec![1]);
        assert_eq!(r.ond_max, 1);
    }

    #[test]
    fn ond_antichain_is_one() {
        let i = inst(&[(1, 3), (2, 2), (3, 1)]);
        let r = enumerate_ond(&i, &no_regions(), Problem::Pareto).unwrap();
        assert_eq!(r.ond_max, 1);
    }

    #[test]
    fn ond_matches_hand_enumeration() {
        // Front = {(4,4)}. Downdraft images: (1,1) -> one of (3,2),(2,3),(4,4);
        // (3,2) -> (4,4); (2,3) -> (4,4). With image (4,4) for all three, the
        // single fiber has 3! orders; the other two downdrafts each have a
        // 2-fiber and a 1-fiber: 2! each. Total 6 + 2 + 2 = 10.
        let i = inst(&[(1, 1), (3, 2), (2, 3), (4, 4)]);
        let r = enumerate_ond(&i, &no_regions(), Problem::Pareto).unwrap();
        assert_eq!(r.per_kappa, vec![10]);
    }

    #[test]
    fn phi_injective_on_pareto_universe() {
        let i = inst(&[(1, 5), (2, 2), (4, 4), (5, 1), (3, 3)]);
        let r = RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 0, xmax: 3, ymax: 6 }]).unwrap();
        let classes = witness_classes(&i, &r, Problem::Pareto).unwrap();
        assert!(classes.values().any(|v| v.len() > 1));
        for (w, perms) in &classes {
            let mut seen = HashSet::new();
            for perm in perms {
                let img = phi_map(&i, &r, perm, w, Problem::Pareto).unwrap();
                assert!(seen.insert(img), "Phi not injective on witness class");
            }
        }
    }

    #[test]
    fn phi_injective_on_hull_universe() {
        let i = inst(&[(0, 0), (6, 1), (3, 7), (2, 2), (4, 3)]);
        let r = RegionSet::triangles(vec![Triangle {
            a: Point::new(1, 1),
            b: Point::new(5, 2),
            c: Point::new(3, 5),
        }])
        .unwrap();
        let classes = witness_classes(&i, &r, Problem::Hull).unwrap();
        assert!(classes.values().any(|v| v.len() > 1));
        for (w, perms) in &classes {
            let mut seen = HashSet::new();
            for perm in perms {
                let img = phi_map(&i, &r, perm, w, Problem::Hull).unwrap();
                assert!(seen.insert(img), "Phi not injective on witness class");
            }
        }
    }

    #[test]
    fn counting_bounds_hold_on_small_universes() {
        let cases: Vec<(Instance, RegionSet, Problem)> = vec![
            (inst(&[(1, 1), (2, 2)]), no_regions(), Problem::Pareto),
            (inst(&[(1, 3), (2, 2), (3, 1)]), no_regions(), Problem::Pareto),
            (
                inst(&[(1, 5), (2, 2), (4, 4), (5, 1), (3, 3)]),
                RegionSet::rectangles(vec![Rect { xmin: 0, ymin: 0, xmax: 3, ymax: 6 }]).unwrap(),
                Problem::Pareto,
            ),
            (
                inst(&[(0, 0), (6, 1), (3, 7), (2, 2), (4, 3)]),
                RegionSet::triangles(vec![Triangle {
                    a: Point::new(1, 1),
                    b: Point::new(5, 2),
                    c: Point::new(3, 5),
                }])
                .unwrap(),
                Problem::Hull,
            ),
        ];
        for (i, r, problem) in cases {
            let census = enumerate_universe(&i, &r, problem).unwrap();
            let report = check_counting_bounds(&i, &r, &census).unwrap();
            assert!(report.counting_holds, "counting bound failed: {census:?} {report:?}");
            assert!(report.refined_holds, "refined bound failed: {census:?} {report:?}");
            assert!(report.counting_slack_bits >= 0.0 && report.refined_slack_bits >= 0.0);
            // Multinomial lower bound on the number of respecting inputs.
            let sizes: Vec<usize> =
                r.memberships(&i).iter().map(|m| m.len()).collect();
            let mut lo = factorial(i.len()) as f64;
            for s in sizes {
                lo /= factorial(s) as f64;
            }
            assert!(lo.log2() <= (census.inputs_count as f64).log2() + 1e-9);
        }
    }
}
