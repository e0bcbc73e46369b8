use super::trimesh::TriMesh;
use crate::geometry::{Containment, DomainPolygon, Point2};
use crate::{Error, Real, Result};

/// Right-triangle lattice of pitch `pitch` over the bounding box of `poly`,
/// keeping the triangles whose centroid lies inside. Matches the domain
/// exactly only for axis-aligned polygons with vertices on the lattice.
pub fn lattice_mesh<T: Real>(poly: &DomainPolygon<T>, pitch: T) -> Result<TriMesh<T>> {
    if !(pitch > T::zero()) {
        return Err(Error::InvalidArgument(format!("pitch must be positive, got {pitch}")));
    }
    let b = poly.bounds();
    let nx = (b.width() / pitch).round().to_usize().unwrap_or(0);
    let ny = (b.height() / pitch).round().to_usize().unwrap_or(0);
    if nx == 0 || ny == 0 {
        return Err(Error::Meshing("pitch exceeds the domain size".into()));
    }
    let at = |i: usize, j: usize| {
        Point2::new(
            b.min.x + pitch * T::from_usize_lossy(i),
            b.min.y + pitch * T::from_usize_lossy(j),
        )
    };
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::new();
    let third = T::one() / T::lit(3.0);
    for j in 0..ny {
        for i in 0..nx {
            for tri in [
                [id(i, j), id(i + 1, j), id(i + 1, j + 1)],
                [id(i, j), id(i + 1, j + 1), id(i, j + 1)],
            ] {
                let c = tri
                    .iter()
                    .map(|&k| at(k % (nx + 1), k / (nx + 1)))
                    .fold(Point2::new(T::zero(), T::zero()), |a, p| a + p)
                    * third;
                if poly.contains(c) == Containment::Interior {
                    tris.push(tri);
                }
            }
        }
    }
    let mut remap = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let mut nodes = Vec::new();
    for tri in tris.iter_mut() {
        for k in tri.iter_mut() {
            if remap[*k] == usize::MAX {
                remap[*k] = nodes.len();
                nodes.push(at(*k % (nx + 1), *k / (nx + 1)));
            }
            *k = remap[*k];
        }
    }
    let mesh = TriMesh::from_parts(nodes, tris, None, 0)?;
    mesh.check_against(poly)?;
    Ok(mesh)
}
