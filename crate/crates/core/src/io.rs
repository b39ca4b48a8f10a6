//! Text forms of points and point sets.
//!
//! A point is written `([c0,...],[c0,...])`. A point-set file starts with the
//! field's text form on its own line, followed by one point per line. Blank
//! lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Point, PointSet};

pub fn format_point(field: &Field, pt: Point) -> String {
    format!("({},{})", field.format_elem(pt.0), field.format_elem(pt.1))
}

pub fn parse_point(field: &Field, s: &str) -> Result<Point> {
    let bad = || Error::Parse(format!("malformed point {s:?}"));
    let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let split = inner.find("],").ok_or_else(bad)?;
    let (a, b) = (&inner[..=split], &inner[split + 2..]);
    Ok(Point(field.parse_elem(a.trim())?, field.parse_elem(b.trim())?))
}

pub fn write_point_set(e: &PointSet) -> String {
    let f = e.field();
    let mut out = format!("{f}\n");
    for pt in e.points() {
        out.push_str(&format_point(f, pt));
        out.push('\n');
    }
    out
}

pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("missing field header".into()))?;
    let field: Field = header.parse()?;
    let points = lines.map(|l| parse_point(&field, l)).collect::<Result<Vec<_>>>()?;
    PointSet::new(&field, points)
}
