//! Line-oriented text format: `# scale=m dim=d`, then one point per line.
//!
//! Coordinates are written with the shortest round-trip decimal
//! representation, so reading back reproduces every value bit for bit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Scale};
use crate::scalar::Real;

use super::{PointSet1D, PointSet2D};

#[derive(Clone, Debug, PartialEq)]
pub enum AnyPointSet<T> {
    Line(PointSet1D<T>),
    Plane(PointSet2D<T>),
}

impl<T: Real> PointSet1D<T> {
    pub fn to_text(&self) -> String {
        let mut out = format!("# scale={} dim=1\n", self.scale().m());
        for p in self.points() {
            writeln!(out, "{p}").unwrap();
        }
        out
    }
}

impl<T: Real> PointSet2D<T> {
    pub fn to_text(&self) -> String {
        let mut out = format!("# scale={} dim=2\n", self.scale().m());
        for p in self.points() {
            writeln!(out, "{} {}", p.x, p.y).unwrap();
        }
        out
    }
}

impl<T: Real> AnyPointSet<T> {
    pub fn to_text(&self) -> String {
        match self {
            AnyPointSet::Line(p) => p.to_text(),
            AnyPointSet::Plane(p) => p.to_text(),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_field(header: &str, key: &str) -> Result<u32> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| parse_err(1, format!("missing `{key}=` in header")))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad `{key}`: {e}")))
}

pub fn parse_point_set<T: Real>(text: &str) -> Result<AnyPointSet<T>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix('#'))
        .ok_or_else(|| parse_err(1, "expected `# scale=m dim=d` header"))?;
    let scale = Scale::new(header_field(header, "scale")?)?;
    let dim = header_field(header, "dim")?;
    let mut coords: Vec<Vec<T>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<T>()
                    .map_err(|_| parse_err(i + 2, format!("bad coordinate `{tok}`")))
            })
            .collect::<Result<Vec<T>>>()?;
        if row.len() != dim as usize {
            return Err(parse_err(i + 2, format!("expected {dim} coordinates")));
        }
        coords.push(row);
    }
    match dim {
        1 => Ok(AnyPointSet::Line(PointSet1D::new(
            coords.into_iter().map(|r| r[0]).collect(),
            scale,
        )?)),
        2 => Ok(AnyPointSet::Plane(PointSet2D::new(
            coords.into_iter().map(|r| Point2::new(r[0], r[1])).collect(),
            scale,
        )?)),
        d => Err(parse_err(1, format!("unsupported dim={d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{gen_figure3_set, gen_random_ds_set};

    #[test]
    fn figure3_round_trip() {
        let f = gen_figure3_set::<f64>(Scale::new(6).unwrap()).unwrap();
        let back = parse_point_set::<f64>(&f.to_text()).unwrap();
        assert_eq!(back, AnyPointSet::Plane(f));
    }

    #[test]
    fn f32_line_round_trip() {
        let a = gen_random_ds_set::<f32>(Scale::new(12).unwrap(), 0.5, 3).unwrap();
        let text = a.to_text();
        assert!(text.starts_with("# scale=12 dim=1\n"));
        assert_eq!(parse_point_set::<f32>(&text).unwrap(), AnyPointSet::Line(a));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_point_set::<f64>("0.5\n").is_err());
        assert!(parse_point_set::<f64>("# scale=4 dim=2\n0.5\n").is_err());
        assert!(parse_point_set::<f64>("# scale=4 dim=1\nabc\n").is_err());
        assert!(parse_point_set::<f64>("# scale=4 dim=3\n").is_err());
    }
}
