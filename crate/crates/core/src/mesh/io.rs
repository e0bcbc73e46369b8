//! Mesh text format: `mesh <N> <T>`, then `N` lines `x y b` (boundary flag
//! 0/1), then `T` lines `i j k` (0-based, counter-clockwise).

use std::io::{BufRead, Write};

use super::trimesh::TriMesh;
use crate::geometry::Point2;
use crate::{Error, Real, Result};

pub fn write_mesh<T: Real, W: Write>(mesh: &TriMesh<T>, mut w: W) -> Result<()> {
    writeln!(w, "mesh {} {}", mesh.num_nodes(), mesh.num_triangles())?;
    for (p, &b) in mesh.nodes().iter().zip(mesh.boundary_flags()) {
        writeln!(w, "{:e} {:e} {}", p.x.as_f64(), p.y.as_f64(), u8::from(b))?;
    }
    for [i, j, k] in mesh.triangles() {
        writeln!(w, "{i} {j} {k}")?;
    }
    Ok(())
}

pub fn read_mesh<T: Real, R: BufRead>(r: R) -> Result<TriMesh<T>> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
        let (line, text) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        Ok((line, text?.split_whitespace().map(String::from).collect()))
    };
    let num = |line: usize, s: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|e| Error::Parse {
            line,
            msg: format!("`{s}`: {e}"),
        })
    };
    let idx = |line: usize, s: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line,
            msg: format!("`{s}`: {e}"),
        })
    };

    let (line, head) = next("header")?;
    if head.len() != 3 || head[0] != "mesh" {
        return Err(Error::Parse {
            line,
            msg: "expected `mesh <N> <T>`".into(),
        });
    }
    let (n, t) = (idx(line, &head[1])?, idx(line, &head[2])?);
    let mut nodes = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, f) = next("node")?;
        if f.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: "expected `x y b`".into(),
            });
        }
        nodes.push(Point2::from_f64(num(line, &f[0])?, num(line, &f[1])?));
        flags.push(match f[2].as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("boundary flag must be 0 or 1, got `{other}`"),
                })
            }
        });
    }
    let mut tris = Vec::with_capacity(t);
    for _ in 0..t {
        let (line, f) = next("triangle")?;
        if f.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: "expected `i j k`".into(),
            });
        }
        tris.push([idx(line, &f[0])?, idx(line, &f[1])?, idx(line, &f[2])?]);
    }
    TriMesh::from_parts(nodes, tris, Some(flags), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::trimesh::tests::two_triangle_square;

    #[test]
    fn roundtrip() {
        let m = two_triangle_square();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("mesh 4 2\n0e0 0e0 1\n"));
        let back: TriMesh<f64> = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.nodes(), m.nodes());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn rejects_bad_flags_and_truncation() {
        assert!(read_mesh::<f64, _>("mesh 3 1\n0 0 1\n1 0 1\n0 1 2\n0 1 2\n".as_bytes()).is_err());
        assert!(read_mesh::<f64, _>("mesh 3 1\n0 0 1\n1 0 1\n".as_bytes()).is_err());
        assert!(read_mesh::<f64, _>("mesh 3 1\n0 0 1\n1 0 1\n0 1 0\n0 1 2\n".as_bytes()).is_err());
        assert!(read_mesh::<f64, _>("mesh 3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n".as_bytes()).is_ok());
    }
}
