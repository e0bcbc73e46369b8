//! Polygon text format: `polygon <V>` followed by `V` lines `x y`.

use std::io::{BufRead, Write};

use super::point::Point2;
use super::polygon::DomainPolygon;
use crate::{Error, Real, Result};

pub fn write_polygon<T: Real, W: Write>(poly: &DomainPolygon<T>, mut w: W) -> Result<()> {
    writeln!(w, "polygon {}", poly.len())?;
    for v in poly.vertices() {
        writeln!(w, "{:e} {:e}", v.x.as_f64(), v.y.as_f64())?;
    }
    Ok(())
}

pub fn read_polygon<T: Real, R: BufRead>(r: R, family: &str, sampling_h: T) -> Result<DomainPolygon<T>> {
    let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty polygon file".into(),
    })?;
    let header = header?;
    let count = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["polygon", n] => n.parse::<usize>().map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?,
        _ => {
            return Err(Error::Parse {
                line,
                msg: format!("expected `polygon <V>`, got `{header}`"),
            })
        }
    };
    let mut verts = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, text) = lines.next().ok_or(Error::Parse {
            line: line + verts.len() + 1,
            msg: "missing vertex".into(),
        })?;
        let text = text?;
        let xy: Vec<f64> = text
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        if xy.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `x y`, got `{text}`"),
            });
        }
        verts.push(Point2::from_f64(xy[0], xy[1]));
    }
    DomainPolygon::new(verts, family, sampling_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn polygon_text_roundtrip_is_exact() {
        let poly = build_domain::<f64>(DomainSpec::DiscUnionSquare, 0.1).unwrap();
        let mut buf = Vec::new();
        write_polygon(&poly, &mut buf).unwrap();
        assert!(buf.starts_with(format!("polygon {}\n", poly.len()).as_bytes()));
        let back = read_polygon::<f64, _>(buf.as_slice(), "disc-square", 0.1).unwrap();
        assert_eq!(back.vertices(), poly.vertices());
    }

    #[test]
    fn malformed_input() {
        assert!(read_polygon::<f64, _>("poly 3\n".as_bytes(), "x", 1.0).is_err());
        assert!(read_polygon::<f64, _>("polygon 3\n0 0\n1 0\n".as_bytes(), "x", 1.0).is_err());
        assert!(read_polygon::<f64, _>("polygon 3\n0 0\n1 0\n0 a\n".as_bytes(), "x", 1.0).is_err());
    }
}
