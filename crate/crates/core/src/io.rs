//! Text formats shared by the CLI: scalar lists (one integer per line), point
//! lists (`x y` per line), rectangle and triangle region files, and witness
//! lists (-1 sentinels for unwitnessed positions).

use thiserror::Error;

use crate::geom::{GeomError, Instance, Point};
use crate::hull::HullWitnessList;
use crate::pareto::ParetoWitnessList;
use crate::region::{Rect, RegionError, RegionSet, Triangle};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {0}: expected {1} integers")]
    BadLine(usize, usize),
    #[error("line {0}: {1}")]
    BadInt(usize, #[source] std::num::ParseIntError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

fn parse_lines(text: &str, per_line: usize) -> Result<Vec<Vec<i64>>, IoError> {
    let mut rows = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        let vals = vals.map_err(|e| IoError::BadInt(no + 1, e))?;
        if vals.len() != per_line {
            return Err(IoError::BadLine(no + 1, per_line));
        }
        rows.push(vals);
    }
    Ok(rows)
}

pub fn read_scalars(text: &str) -> Result<Vec<i64>, IoError> {
    Ok(parse_lines(text, 1)?.into_iter().map(|r| r[0]).collect())
}

pub fn write_scalars(values: &[i64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

pub fn read_points(text: &str) -> Result<Instance, IoError> {
    let pts = parse_lines(text, 2)?.into_iter().map(|r| Point::new(r[0], r[1])).collect();
    Ok(Instance::new(pts)?)
}

pub fn write_points(inst: &Instance) -> String {
    inst.points().iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
}

/// One rectangle per line: `xmin ymin xmax ymax`.
pub fn read_rects(text: &str) -> Result<RegionSet, IoError> {
    let rects = parse_lines(text, 4)?
        .into_iter()
        .map(|r| Rect { xmin: r[0], ymin: r[1], xmax: r[2], ymax: r[3] })
        .collect();
    Ok(RegionSet::rectangles(rects)?)
}

/// One triangle per line: `ax ay bx by cx cy`.
pub fn read_triangles(text: &str) -> Result<RegionSet, IoError> {
    let tris = parse_lines(text, 6)?
        .into_iter()
        .map(|r| Triangle {
            a: Point::new(r[0], r[1]),
            b: Point::new(r[2], r[3]),
            c: Point::new(r[4], r[5]),
        })
        .collect();
    Ok(RegionSet::triangles(tris)?)
}

/// One line per position: the witness index, or -1 on the front.
pub fn write_pareto_witnesses(w: &ParetoWitnessList) -> String {
    w.witnesses
        .iter()
        .map(|o| format!("{}\n", o.map_or(-1, |v| v as i64)))
        .collect()
}

/// One line per position: `a b c`, or `-1 -1 -1` on the hull.
pub fn write_hull_witnesses(w: &HullWitnessList) -> String {
    w.triples
        .iter()
        .map(|o| match o {
            Some([a, b, c]) => format!("{a} {b} {c}\n"),
            None => "-1 -1 -1\n".to_string(),
        })
        .collect()
}

pub fn read_pareto_witnesses(text: &str) -> Result<ParetoWitnessList, IoError> {
    let witnesses = parse_lines(text, 1)?
        .into_iter()
        .map(|r| if r[0] < 0 { None } else { Some(r[0] as usize) })
        .collect();
    Ok(ParetoWitnessList { witnesses })
}

pub fn read_hull_witnesses(text: &str) -> Result<HullWitnessList, IoError> {
    let triples = parse_lines(text, 3)?
        .into_iter()
        .map(|r| {
            if r[0] < 0 {
                None
            } else {
                Some([r[0] as usize, r[1] as usize, r[2] as usize])
            }
        })
        .collect();
    Ok(HullWitnessList { triples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_roundtrip() {
        let i = read_points("1 2\n3 4\n\n# comment\n5 -6\n").unwrap();
        assert_eq!(i.len(), 3);
        assert_eq!(write_points(&i), "1 2\n3 4\n5 -6\n");
    }

    #[test]
    fn scalars_roundtrip() {
        let v = read_scalars("3\n1\n-2\n").unwrap();
        assert_eq!(v, vec![3, 1, -2]);
        assert_eq!(write_scalars(&v), "3\n1\n-2\n");
    }

    #[test]
    fn witness_roundtrip() {
        let w = read_pareto_witnesses("-1\n2\n0\n").unwrap();
        assert_eq!(w.witnesses, vec![None, Some(2), Some(0)]);
        assert_eq!(write_pareto_witnesses(&w), "-1\n2\n0\n");
        let h = read_hull_witnesses("-1 -1 -1\n0 1 2\n").unwrap();
        assert_eq!(h.triples, vec![None, Some([0, 1, 2])]);
        assert_eq!(write_hull_witnesses(&h), "-1 -1 -1\n0 1 2\n");
    }

    #[test]
    fn bad_input_is_reported_with_line_numbers() {
        assert!(matches!(read_points("1 2\n3\n"), Err(IoError::BadLine(2, 2))));
        assert!(matches!(read_scalars("x\n"), Err(IoError::BadInt(1, _))));
    }

    #[test]
    fn region_files_parse() {
        let r = read_rects("0 0 5 5\n10 0 15 5\n").unwrap();
        assert_eq!(r.len(), 2);
        let t = read_triangles("0 0 4 0 2 3\n").unwrap();
        assert_eq!(t.len(), 1);
    }
}
