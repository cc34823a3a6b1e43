//! Exact planar primitives: points with integer coordinates, the orientation
//! predicate, domination, and general-position checking.
//!
//! All predicates are evaluated in 128-bit integer arithmetic. Coordinates are
//! restricted to 32 signed bits so that 3x3 orientation determinants cannot
//! overflow.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest magnitude allowed for a coordinate.
pub const COORD_LIMIT: i64 = i32::MAX as i64;

/// A planar point with exact integer coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn in_range(&self) -> bool {
        self.x.abs() <= COORD_LIMIT && self.y.abs() <= COORD_LIMIT
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
    Collinear,
}

/// Sign of the exact determinant (b-a) x (c-a).
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let d = (b.x - a.x) as i128 * (c.y - a.y) as i128 - (b.y - a.y) as i128 * (c.x - a.x) as i128;
    match d.signum() {
        1 => Orientation::CounterClockwise,
        -1 => Orientation::Clockwise,
        _ => Orientation::Collinear,
    }
}

/// Raw signed doubled area of triangle (a, b, c); positive for counterclockwise.
pub fn signed_area2(a: Point, b: Point, c: Point) -> i128 {
    (b.x - a.x) as i128 * (c.y - a.y) as i128 - (b.y - a.y) as i128 * (c.x - a.x) as i128
}

/// `p` dominates `q` when p.x >= q.x and p.y >= q.y. Reflexive.
pub fn dominates(p: Point, q: Point) -> bool {
    p.x >= q.x && p.y >= q.y
}

/// True iff `p` lies strictly inside the triangle (a, b, c).
pub fn strictly_inside_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = signed_area2(a, b, p);
    let d2 = signed_area2(b, c, p);
    let d3 = signed_area2(c, a, p);
    (d1 > 0 && d2 > 0 && d3 > 0) || (d1 < 0 && d2 < 0 && d3 < 0)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("coordinate out of range at position {0}: {1}")]
    CoordinateOutOfRange(usize, Point),
    #[error("points {0} and {1} share an x-coordinate")]
    SharedX(usize, usize),
    #[error("points {0} and {1} share a y-coordinate")]
    SharedY(usize, usize),
    #[error("points {0}, {1}, {2} are collinear")]
    Collinear(usize, usize, usize),
    #[error("instance is empty")]
    Empty,
}

/// An ordered list of planar points: the input list I.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    points: Vec<Point>,
}

impl Instance {
    pub fn new(points: Vec<Point>) -> Result<Self, GeomError> {
        for (i, p) in points.iter().enumerate() {
            if !p.in_range() {
                return Err(GeomError::CoordinateOutOfRange(i, *p));
            }
        }
        Ok(Instance { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Point {
        self.points[i]
    }

    /// Same point set, different order.
    pub fn reordered(&self, perm: &[usize]) -> Instance {
        Instance {
            points: perm.iter().map(|&i| self.points[i]).collect(),
        }
    }
}

/// Checks that no two points share an x- or y-coordinate and no three points
/// are collinear. Collinearity uses normalized direction hashing per anchor,
/// O(n^2) expected.
pub fn general_position_check(inst: &Instance) -> Result<(), GeomError> {
    let pts = inst.points();
    let n = pts.len();
    let mut by_x: HashMap<i64, usize> = HashMap::with_capacity(n);
    let mut by_y: HashMap<i64, usize> = HashMap::with_capacity(n);
    for (i, p) in pts.iter().enumerate() {
        if let Some(&j) = by_x.get(&p.x) {
            return Err(GeomError::SharedX(j, i));
        }
        if let Some(&j) = by_y.get(&p.y) {
            return Err(GeomError::SharedY(j, i));
        }
        by_x.insert(p.x, i);
        by_y.insert(p.y, i);
    }
    // Two points collinear with anchor i iff their direction vectors from i
    // span the same line through i.
    for i in 0..n {
        let mut dirs: HashMap<(i64, i64), usize> = HashMap::with_capacity(n);
        for j in 0..n {
            if j == i {
                continue;
            }
            let dir = canonical_direction(pts[j].x - pts[i].x, pts[j].y - pts[i].y);
            if let Some(&k) = dirs.get(&dir) {
                return Err(GeomError::Collinear(i, k, j));
            }
            dirs.insert(dir, j);
        }
    }
    Ok(())
}

fn canonical_direction(mut dx: i64, mut dy: i64) -> (i64, i64) {
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    if g != 0 {
        dx /= g;
        dy /= g;
    }
    // Opposite rays lie on the same line through the anchor.
    if dx < 0 || (dx == 0 && dy < 0) {
        dx = -dx;
        dy = -dy;
    }
    (dx, dy)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
