//! Region sets (disjoint axis-aligned rectangles or disjoint triangles),
//! compass functions, and the respect relation between an input order and a
//! region set.

use thiserror::Error;

use crate::geom::{signed_area2, Instance, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub xmin: i64,
    pub ymin: i64,
    pub xmax: i64,
    pub ymax: i64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        self.xmin <= p.x && p.x <= self.xmax && self.ymin <= p.y && p.y <= self.ymax
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.xmin <= other.xmax
            && other.xmin <= self.xmax
            && self.ymin <= other.ymax
            && other.ymin <= self.ymax
    }

    pub fn is_empty(&self) -> bool {
        self.xmin > self.xmax || self.ymin > self.ymax
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        let d1 = signed_area2(self.a, self.b, p);
        let d2 = signed_area2(self.b, self.c, p);
        let d3 = signed_area2(self.c, self.a, p);
        (d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0)
    }

    fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    pub fn intersects(&self, other: &Triangle) -> bool {
        let ea = self.edges();
        let eb = other.edges();
        for &(p1, p2) in &ea {
            for &(q1, q2) in &eb {
                if segments_intersect(p1, p2, q1, q2) {
                    return true;
                }
            }
        }
        other.vertices().iter().any(|&v| self.contains(v))
            || self.vertices().iter().any(|&v| other.contains(v))
    }

    fn edges(&self) -> [(Point, Point); 3] {
        [(self.a, self.b), (self.b, self.c), (self.c, self.a)]
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    signed_area2(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = signed_area2(q1, q2, p1).signum();
    let d2 = signed_area2(q1, q2, p2).signum();
    let d3 = signed_area2(p1, p2, q1).signum();
    let d4 = signed_area2(p1, p2, q2).signum();
    if d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0 {
        return true;
    }
    on_segment(q1, q2, p1) || on_segment(q1, q2, p2) || on_segment(p1, p2, q1) || on_segment(p1, p2, q2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Rect(Rect),
    Triangle(Triangle),
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Rect(r) => r.contains(p),
            Region::Triangle(t) => t.contains(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Rectangles,
    Triangles,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("regions {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("region {0} has the wrong kind for this set")]
    KindMismatch(usize),
    #[error("rectangle {0} is empty")]
    EmptyRect(usize),
}

/// Pairwise disjoint regions of one kind defining a universe (P, R).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSet {
    pub kind: RegionKind,
    pub regions: Vec<Region>,
}

impl RegionSet {
    pub fn empty(kind: RegionKind) -> Self {
        RegionSet { kind, regions: vec![] }
    }

    pub fn rectangles(rects: Vec<Rect>) -> Result<Self, RegionError> {
        for (i, r) in rects.iter().enumerate() {
            if r.is_empty() {
                return Err(RegionError::EmptyRect(i));
            }
        }
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                if rects[i].intersects(&rects[j]) {
                    return Err(RegionError::Overlap(i, j));
                }
            }
        }
        Ok(RegionSet {
            kind: RegionKind::Rectangles,
            regions: rects.into_iter().map(Region::Rect).collect(),
        })
    }

    pub fn triangles(tris: Vec<Triangle>) -> Result<Self, RegionError> {
        for i in 0..tris.len() {
            for j in i + 1..tris.len() {
                if tris[i].intersects(&tris[j]) {
                    return Err(RegionError::Overlap(i, j));
                }
            }
        }
        Ok(RegionSet {
            kind: RegionKind::Triangles,
            regions: tris.into_iter().map(Region::Triangle).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Index of the region containing `p`, if any. Regions are disjoint so at
    /// most one matches.
    pub fn region_of(&self, p: Point) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(p))
    }

    /// Per-region point positions of an instance, in position order.
    pub fn memberships(&self, inst: &Instance) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.regions.len()];
        for (i, &p) in inst.points().iter().enumerate() {
            if let Some(r) = self.region_of(p) {
                m[r].push(i);
            }
        }
        m
    }
}

/// Region membership reduced to point positions: which group (if any) each
/// position belongs to. Geometric region sets induce groups, and refinement
/// procedures can produce groups with no geometric description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointGroups {
    pub group_of: Vec<Option<usize>>,
    pub groups: Vec<Vec<usize>>,
}

impl PointGroups {
    pub fn from_regions(inst: &Instance, regions: &RegionSet) -> Self {
        let group_of: Vec<Option<usize>> =
            inst.points().iter().map(|&p| regions.region_of(p)).collect();
        let mut groups = vec![Vec::new(); regions.len()];
        for (i, g) in group_of.iter().enumerate() {
            if let Some(g) = g {
                groups[*g].push(i);
            }
        }
        PointGroups { group_of, groups }
    }

    pub fn from_groups(n: usize, groups: Vec<Vec<usize>>) -> Self {
        let mut group_of = vec![None; n];
        for (g, members) in groups.iter().enumerate() {
            for &p in members {
                assert!(group_of[p].is_none(), "point {p} in two groups");
                group_of[p] = Some(g);
            }
        }
        PointGroups { group_of, groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// One of the four axis-monotone orders a compass function may assign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisOrder {
    IncX,
    DecX,
    IncY,
    DecY,
}

impl AxisOrder {
    pub const ALL: [AxisOrder; 4] = [AxisOrder::IncX, AxisOrder::DecX, AxisOrder::IncY, AxisOrder::DecY];

    /// Whether the sequence of points is monotone under this order (strict
    /// monotonicity follows from general position; ties allowed here).
    pub fn is_sorted(&self, pts: &[Point]) -> bool {
        pts.windows(2).all(|w| self.le(w[0], w[1]))
    }

    pub fn le(&self, p: Point, q: Point) -> bool {
        match self {
            AxisOrder::IncX => p.x <= q.x,
            AxisOrder::DecX => p.x >= q.x,
            AxisOrder::IncY => p.y <= q.y,
            AxisOrder::DecY => p.y >= q.y,
        }
    }

    /// Key such that sorting by the key ascending realizes the order.
    pub fn key(&self, p: Point) -> i64 {
        match self {
            AxisOrder::IncX => p.x,
            AxisOrder::DecX => -p.x,
            AxisOrder::IncY => p.y,
            AxisOrder::DecY => -p.y,
        }
    }

    pub fn by_x(&self) -> bool {
        matches!(self, AxisOrder::IncX | AxisOrder::DecX)
    }
}

/// A compass function: one axis order per region.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompassFunction {
    pub assignment: Vec<AxisOrder>,
}

impl CompassFunction {
    pub fn all_for(region_count: usize) -> Vec<CompassFunction> {
        let mut out = vec![CompassFunction { assignment: vec![] }];
        for _ in 0..region_count {
            let mut next = Vec::with_capacity(out.len() * 4);
            for cf in &out {
                for &o in &AxisOrder::ALL {
                    let mut a = cf.assignment.clone();
                    a.push(o);
                    next.push(CompassFunction { assignment: a });
                }
            }
            out = next;
        }
        out
    }
}

/// True iff, for every region, the subsequence of `inst` inside it is monotone
/// in one of the four axis orders.
pub fn respects(inst: &Instance, regions: &RegionSet) -> bool {
    for members in regions.memberships(inst) {
        let pts: Vec<Point> = members.iter().map(|&i| inst.get(i)).collect();
        if !AxisOrder::ALL.iter().any(|o| o.is_sorted(&pts)) {
            return false;
        }
    }
    true
}

/// The axis order observed for each region of a respecting input, using the
/// fixed precedence IncX, DecX, IncY, DecY when several match. None if some
/// region is not monotone.
pub fn observed_compass(inst: &Instance, regions: &RegionSet) -> Option<CompassFunction> {
    let mut assignment = Vec::with_capacity(regions.len());
    for members in regions.memberships(inst) {
        let pts: Vec<Point> = members.iter().map(|&i| inst.get(i)).collect();
        let order = AxisOrder::ALL.iter().copied().find(|o| o.is_sorted(&pts))?;
        assignment.push(order);
    }
    Some(CompassFunction { assignment })
}
