//! Deterministic input generators, the instrumented benchmark runner, and
//! scaling reports relating measured operation counts to entropy bounds.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::entropy::{size_vector_entropy, universe_lower_bound, SizeVector};
use crate::geom::{strictly_inside_triangle, GeomError, Instance, Point, COORD_LIMIT};
use crate::hull::convex_hull;
use crate::io::write_points;
use crate::meter::CostMeter;
use crate::pareto::pareto_front;
use crate::region::{Rect, RegionError, RegionSet, Triangle};
use crate::sort::truncated_quicksort;
use crate::{verify_hull, verify_pareto};

/// Modulus for the parabola trick: points (t, t^2 mod PRIME) with all t below
/// PRIME/2 are pairwise distinct in x and y and contain no collinear triple
/// (a line meets the parabola over the prime field in at most two points, and
/// an exact integer collinearity would survive reduction). 2^19 - 1.
pub const MODULAR_PRIME: i64 = 524_287;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Family {
    Sorted,
    Reversed,
    InterleavedHalves,
    EvensThenOdds,
    /// k equal-size ascending runs of contiguous values, block order shuffled.
    Runs { k: usize },
    /// Random distinct grid coordinates in random order; no regions.
    GridRandom,
    /// `arcs` triangle clusters; every cluster has `cluster_size` points
    /// except the first, which absorbs the remainder.
    CircleArcClusters { arcs: usize, cluster_size: usize },
    /// k rectangle regions along an anti-diagonal, each holding an x-sorted
    /// subsequence.
    ParetoRegions { k: usize },
    /// k triangle clusters of equal size, each holding an x-sorted
    /// subsequence.
    HullRegions { k: usize },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Sorted => "sorted".into(),
            Family::Reversed => "reversed".into(),
            Family::InterleavedHalves => "interleaved-halves".into(),
            Family::EvensThenOdds => "evens-then-odds".into(),
            Family::Runs { k } => format!("runs({k})"),
            Family::GridRandom => "grid-random".into(),
            Family::CircleArcClusters { arcs, cluster_size } => {
                format!("circle-arc-clusters({arcs},{cluster_size})")
            }
            Family::ParetoRegions { k } => format!("pareto-regions({k})"),
            Family::HullRegions { k } => format!("hull-regions({k})"),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            Family::Sorted
                | Family::Reversed
                | Family::InterleavedHalves
                | Family::EvensThenOdds
                | Family::Runs { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum Generated {
    Scalars(Vec<i64>),
    Geometric { instance: Instance, regions: RegionSet },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    #[error("coordinate budget exhausted while placing cluster triangles")]
    RetryBudget,
    #[error("algorithm/input kind mismatch for family {0}")]
    KindMismatch(String),
    #[error("verification failed for {family} n={n} seed={seed}: {detail}\n{dump}")]
    Verification { family: String, n: usize, seed: u64, detail: String, dump: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

fn split_equal(n: usize, k: usize) -> Vec<usize> {
    let base = n / k;
    (0..k).map(|j| base + usize::from(j < n % k)).collect()
}

impl GeneratorSpec {
    /// The part sizes of the structural decomposition the family realizes;
    /// used for the universe bound, never as a per-instance entropy claim.
    pub fn part_sizes(&self) -> Vec<usize> {
        let n = self.n;
        match &self.family {
            Family::Sorted => vec![n],
            Family::Reversed | Family::EvensThenOdds | Family::GridRandom => vec![1; n],
            Family::InterleavedHalves => vec![n - n / 2, n / 2],
            Family::Runs { k } | Family::ParetoRegions { k } | Family::HullRegions { k } => {
                split_equal(n, *k)
            }
            Family::CircleArcClusters { arcs, cluster_size } => {
                let mut sizes = vec![*cluster_size; *arcs];
                sizes[0] = n - cluster_size * (arcs - 1);
                sizes
            }
        }
    }

    /// Universe bound in bits: sum of (s/n) log2 (n/s) over the decomposition.
    pub fn bound_bits(&self) -> f64 {
        size_vector_entropy(&self.part_sizes())
    }

    pub fn generate(&self) -> Result<Generated, HarnessError> {
        let n = self.n;
        if n == 0 {
            return Err(HarnessError::BadSpec("n must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match &self.family {
            Family::Sorted => Ok(Generated::Scalars((1..=n as i64).collect())),
            Family::Reversed => Ok(Generated::Scalars((1..=n as i64).rev().collect())),
            Family::InterleavedHalves => Ok(Generated::Scalars(
                (0..n as i64).map(|i| if i % 2 == 0 { i } else { n as i64 + i }).collect(),
            )),
            Family::EvensThenOdds => {
                let mut v: Vec<i64> = (1..=n as i64).filter(|x| x % 2 == 0).collect();
                v.extend((1..=n as i64).filter(|x| x % 2 == 1));
                Ok(Generated::Scalars(v))
            }
            Family::Runs { k } => {
                if *k == 0 || *k > n {
                    return Err(HarnessError::BadSpec(format!("runs k={k} out of range")));
                }
                let sizes = split_equal(n, *k);
                let mut order: Vec<usize> = (0..*k).collect();
                order.shuffle(&mut rng);
                let mut starts = vec![0i64; *k];
                let mut acc = 1i64;
                for (j, &s) in sizes.iter().enumerate() {
                    starts[j] = acc;
                    acc += s as i64;
                }
                let mut v = Vec::with_capacity(n);
                for &j in &order {
                    v.extend(starts[j]..starts[j] + sizes[j] as i64);
                }
                Ok(Generated::Scalars(v))
            }
            Family::GridRandom => {
                let mut ys: Vec<i64> = (1..=n as i64).collect();
                ys.shuffle(&mut rng);
                let mut pts: Vec<Point> =
                    (0..n).map(|i| Point::new(i as i64 + 1, ys[i])).collect();
                pts.shuffle(&mut rng);
                Ok(Generated::Geometric {
                    instance: Instance::new(pts)?,
                    regions: RegionSet::empty(crate::region::RegionKind::Rectangles),
                })
            }
            Family::ParetoRegions { k } => {
                if *k == 0 || *k > n {
                    return Err(HarnessError::BadSpec(format!("regions k={k} out of range")));
                }
                let sizes = split_equal(n, *k);
                let stride = *sizes.iter().max().unwrap() as i64;
                let mut clusters: Vec<Vec<Point>> = Vec::with_capacity(*k);
                let mut rects = Vec::with_capacity(*k);
                for (j, &m) in sizes.iter().enumerate() {
                    let x0 = j as i64 * stride;
                    let y0 = (*k - 1 - j) as i64 * stride;
                    let mut ys: Vec<i64> = (0..m as i64).collect();
                    ys.shuffle(&mut rng);
                    clusters.push(
                        (0..m as i64).map(|t| Point::new(x0 + t, y0 + ys[t as usize])).collect(),
                    );
                    rects.push(Rect {
                        xmin: x0,
                        ymin: y0,
                        xmax: x0 + m as i64 - 1,
                        ymax: y0 + m as i64 - 1,
                    });
                }
                let pts = interleave(clusters, &mut rng);
                Ok(Generated::Geometric {
                    instance: Instance::new(pts)?,
                    regions: RegionSet::rectangles(rects)?,
                })
            }
            Family::HullRegions { k } => {
                if *k == 0 || n < 3 * k {
                    return Err(HarnessError::BadSpec(format!(
                        "hull regions need at least 3 points each, got n={n}, k={k}"
                    )));
                }
                triangle_clusters(&split_equal(n, *k), &mut rng)
            }
            Family::CircleArcClusters { arcs, cluster_size } => {
                if *arcs == 0 || *cluster_size < 3 || cluster_size * (arcs - 1) + 3 > n {
                    return Err(HarnessError::BadSpec(format!(
                        "cluster spec arcs={arcs} size={cluster_size} infeasible for n={n}"
                    )));
                }
                triangle_clusters(&self.part_sizes(), &mut rng)
            }
        }
    }
}

/// Concatenate clusters in a random global order while preserving each
/// cluster's internal order.
fn interleave(clusters: Vec<Vec<Point>>, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut ids: Vec<usize> = clusters
        .iter()
        .enumerate()
        .flat_map(|(j, c)| std::iter::repeat_n(j, c.len()))
        .collect();
    ids.shuffle(rng);
    let mut cursors = vec![0usize; clusters.len()];
    let mut out = Vec::with_capacity(ids.len());
    for j in ids {
        out.push(clusters[j][cursors[j]]);
        cursors[j] += 1;
    }
    out
}

/// Clusters of points on the modular parabola, in disjoint x-strips, each
/// enclosed by a tall triangle region. Gaps between strips leave room for the
/// triangles to stay disjoint.
fn triangle_clusters(sizes: &[usize], rng: &mut ChaCha8Rng) -> Result<Generated, HarnessError> {
    let p = MODULAR_PRIME;
    let k = sizes.len();
    let gap = |a: usize, b: usize| (a.max(b) / 8).max(64) as i64;
    let mut strips = Vec::with_capacity(k);
    let mut t = 0i64;
    for (j, &w) in sizes.iter().enumerate() {
        let a = t;
        let b = t + w as i64 - 1;
        strips.push((a, b));
        t = b + 1 + if j + 1 < k { gap(w, sizes[j + 1]) } else { 0 };
    }
    if 2 * t >= p {
        return Err(HarnessError::BadSpec(format!("total size {t} too large for the modulus")));
    }

    let mut clusters = Vec::with_capacity(k);
    let mut tris = Vec::with_capacity(k);
    for (j, &(a, b)) in strips.iter().enumerate() {
        let pts: Vec<Point> = (a..=b).map(|t| Point::new(t, (t * t) % p)).collect();
        let dl = if j == 0 { gap(sizes[j], sizes[j]) / 2 } else { gap(sizes[j - 1], sizes[j]) / 2 };
        let dr = if j + 1 == k {
            gap(sizes[j], sizes[j]) / 2
        } else {
            gap(sizes[j], sizes[j + 1]) / 2
        };
        let base_l = Point::new(a - dl.max(1), -2);
        let base_r = Point::new(b + dr.max(1), -1);
        let cx = (a + b) / 2;
        let mut h = 4 * p;
        let tri = loop {
            let tri = Triangle { a: base_l, b: base_r, c: Point::new(cx, h) };
            if pts.iter().all(|&q| strictly_inside_triangle(q, tri.a, tri.b, tri.c)) {
                break tri;
            }
            h = h.saturating_mul(2);
            if h > COORD_LIMIT {
                return Err(HarnessError::RetryBudget);
            }
        };
        clusters.push(pts);
        tris.push(tri);
    }
    let pts = interleave(clusters, rng);
    Ok(Generated::Geometric {
        instance: Instance::new(pts)?,
        regions: RegionSet::triangles(tris)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Algorithm {
    Sort,
    Pareto,
    Hull,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Sort => "sort",
            Algorithm::Pareto => "pareto",
            Algorithm::Hull => "hull",
        }
    }
}

/// One verified, instrumented run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BenchRecord {
    pub family: String,
    pub algorithm: String,
    pub n: usize,
    pub seed: u64,
    /// Universe bound in bits (decomposition entropy), not a per-instance H.
    pub universe_bound_bits: f64,
    /// log2(n! / prod s_i!) for the decomposition.
    pub lower_bound_bits: f64,
    pub comparisons: u64,
    pub orientation_tests: u64,
    pub elements_touched: u64,
    pub total: u64,
    pub wall_ns: u128,
}

/// Generate, run the instrumented algorithm, verify the output, and record.
pub fn run_one(algorithm: Algorithm, spec: &GeneratorSpec) -> Result<BenchRecord, HarnessError> {
    let generated = spec.generate()?;
    let mut meter = CostMeter::new();
    let start = Instant::now();
    match (algorithm, &generated) {
        (Algorithm::Sort, Generated::Scalars(values)) => {
            let out = truncated_quicksort(values, &mut meter);
            let mut want = values.clone();
            want.sort_unstable();
            if out != want {
                return Err(verification_failure(spec, "sorted output mismatch".into(), || {
                    crate::io::write_scalars(values)
                }));
            }
        }
        (Algorithm::Pareto, Generated::Geometric { instance, .. }) => {
            let (front, witness) = pareto_front(instance, &mut meter).map_err(|e| {
                verification_failure(spec, e.to_string(), || write_points(instance))
            })?;
            verify_pareto(instance, &front, &witness).map_err(|e| {
                verification_failure(spec, e.to_string(), || write_points(instance))
            })?;
        }
        (Algorithm::Hull, Generated::Geometric { instance, .. }) => {
            let (hull, witness) = convex_hull(instance, &mut meter).map_err(|e| {
                verification_failure(spec, e.to_string(), || write_points(instance))
            })?;
            verify_hull(instance, &hull, &witness).map_err(|e| {
                verification_failure(spec, e.to_string(), || write_points(instance))
            })?;
        }
        _ => return Err(HarnessError::KindMismatch(spec.family.label())),
    }
    let wall_ns = start.elapsed().as_nanos();
    let sizes = spec.part_sizes();
    let lower = universe_lower_bound(&SizeVector::new(sizes), spec.n).unwrap_or(0.0);
    Ok(BenchRecord {
        family: spec.family.label(),
        algorithm: algorithm.label().to_string(),
        n: spec.n,
        seed: spec.seed,
        universe_bound_bits: spec.bound_bits(),
        lower_bound_bits: lower,
        comparisons: meter.comparisons,
        orientation_tests: meter.orientation_tests,
        elements_touched: meter.elements_touched,
        total: meter.total(),
        wall_ns,
    })
}

fn verification_failure(
    spec: &GeneratorSpec,
    detail: String,
    dump: impl FnOnce() -> String,
) -> HarnessError {
    HarnessError::Verification {
        family: spec.family.label(),
        n: spec.n,
        seed: spec.seed,
        detail,
        dump: dump(),
    }
}

/// Run every spec `repeats` times (seed advanced per repeat) and collect
/// verified records.
pub fn bench(
    algorithm: Algorithm,
    specs: &[GeneratorSpec],
    repeats: usize,
) -> Result<Vec<BenchRecord>, HarnessError> {
    let mut records = Vec::with_capacity(specs.len() * repeats);
    for spec in specs {
        for r in 0..repeats.max(1) {
            let s = GeneratorSpec { seed: spec.seed + r as u64, ..spec.clone() };
            records.push(run_one(algorithm, &s)?);
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "# benchrecord v1\nfamily,algorithm,n,seed,universe_bound_bits,lower_bound_bits,comparisons,orientation_tests,elements_touched,total,wall_ns\n";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{},{},{},{},{}\n",
            r.family,
            r.algorithm,
            r.n,
            r.seed,
            r.universe_bound_bits,
            r.lower_bound_bits,
            r.comparisons,
            r.orientation_tests,
            r.elements_touched,
            r.total,
            r.wall_ns
        ));
    }
    out
}

/// Per (family, algorithm): the largest fitted constant C in
/// total <= C * n * (1 + bound_bits), plus a monotonicity flag.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ScalingRow {
    pub family: String,
    pub algorithm: String,
    pub max_c: f64,
    pub monotone_in_n: bool,
}

pub fn scaling_report(records: &[BenchRecord]) -> Vec<ScalingRow> {
    let mut keys: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.family.clone(), r.algorithm.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(family, algorithm)| {
            let mut group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.family == family && r.algorithm == algorithm)
                .collect();
            group.sort_by_key(|r| r.n);
            let max_c = group
                .iter()
                .map(|r| r.total as f64 / (r.n as f64 * (1.0 + r.universe_bound_bits)))
                .fold(0.0, f64::max);
            let monotone_in_n =
                group.windows(2).all(|w| w[0].n == w[1].n || w[0].total <= w[1].total);
            ScalingRow { family, algorithm, max_c, monotone_in_n }
        })
        .collect()
}
