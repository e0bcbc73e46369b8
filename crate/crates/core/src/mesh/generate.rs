//! Quasi-uniform mesh generation: boundary samples at step `h`, a hexagonal
//! lattice of pitch `h` inside, constrained Delaunay triangulation, then a few
//! sweeps of Laplacian smoothing with re-triangulation.

use spade::{ConstrainedDelaunayTriangulation, Point2 as SpadePoint, Triangulation};

use super::trimesh::TriMesh;
use crate::geometry::{Containment, DomainPolygon, Point2};
use crate::{Error, Real, Result};

/// Minimum interior angle (degrees) a generated mesh must reach.
pub const MIN_ANGLE_DEG: f64 = 15.0;

/// Lattice points closer than this fraction of `h` to the boundary are dropped.
const BOUNDARY_CLEARANCE: f64 = 0.55;
const SMOOTHING_SWEEPS: usize = 6;

/// Triangulates `poly` with target edge length `target_h`.
pub fn generate_mesh<T: Real>(poly: &DomainPolygon<T>, target_h: T) -> Result<TriMesh<T>> {
    if !(target_h > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "target_h must be positive, got {target_h}"
        )));
    }
    let h = target_h.as_f64();

    let boundary = sample_boundary(poly, h);
    let nb = boundary.len();
    let mut interior = lattice_points(poly, h);
    if interior.is_empty() {
        return Err(Error::Meshing(format!("target_h = {h} leaves no interior nodes")));
    }

    let mut tris = triangulate(poly, &boundary, &interior)?;
    for _ in 0..SMOOTHING_SWEEPS {
        smooth(poly, h, nb, &boundary, &mut interior, &tris);
        tris = triangulate(poly, &boundary, &interior)?;
    }

    let nodes: Vec<Point2<T>> = boundary.iter().chain(interior.iter()).map(|p| p.cast()).collect();
    let mesh = TriMesh::from_parts(nodes, tris, None, 0)?;
    if let Some(i) = (0..nb).find(|&i| !mesh.is_boundary(i)) {
        return Err(Error::Meshing(format!(
            "boundary sample {i} was not recovered as a boundary node"
        )));
    }
    if mesh.num_nodes() - mesh.interior_nodes().count() != nb {
        return Err(Error::Meshing("a lattice node ended up on the boundary".into()));
    }
    mesh.check_against(poly)?;
    let worst = mesh.min_angle_deg().as_f64();
    if worst < MIN_ANGLE_DEG {
        return Err(Error::Meshing(format!(
            "minimum angle {worst:.2} deg below {MIN_ANGLE_DEG} deg"
        )));
    }
    Ok(mesh)
}

/// Polygon vertices plus equally spaced points on every edge longer than `h`.
fn sample_boundary<T: Real>(poly: &DomainPolygon<T>, h: f64) -> Vec<Point2<f64>> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = poly.edge(i);
        let (a, b) = (a.cast::<f64>(), b.cast::<f64>());
        let n = ((a.dist(b) / h).round() as usize).max(1);
        for k in 0..n {
            out.push(a.lerp(b, k as f64 / n as f64));
        }
    }
    out
}

fn lattice_points<T: Real>(poly: &DomainPolygon<T>, h: f64) -> Vec<Point2<f64>> {
    let b = poly.bounds();
    let (x0, y0) = (b.min.x.as_f64(), b.min.y.as_f64());
    let (x1, y1) = (b.max.x.as_f64(), b.max.y.as_f64());
    let dy = h * 3f64.sqrt() / 2.0;
    let ny = ((y1 - y0) / dy).ceil() as i64;
    let nx = ((x1 - x0) / h).ceil() as i64;
    // centre the lattice in the bounding box
    let oy = y0 + 0.5 * ((y1 - y0) - ny as f64 * dy);
    let ox = x0 + 0.5 * ((x1 - x0) - nx as f64 * h);
    let mut out = Vec::new();
    for j in 0..=ny {
        let y = oy + j as f64 * dy;
        let shift = if j % 2 == 0 { 0.0 } else { 0.5 * h };
        for i in -1..=nx {
            let p = Point2::new(ox + i as f64 * h + shift, y);
            let q: Point2<T> = p.cast();
            if poly.contains(q) == Containment::Interior
                && poly.distance_to_boundary(q).as_f64() >= BOUNDARY_CLEARANCE * h
            {
                out.push(p);
            }
        }
    }
    out
}

fn triangulate<T: Real>(
    poly: &DomainPolygon<T>,
    boundary: &[Point2<f64>],
    interior: &[Point2<f64>],
) -> Result<Vec<[usize; 3]>> {
    let mut cdt = ConstrainedDelaunayTriangulation::<SpadePoint<f64>>::new();
    let mut handles = Vec::with_capacity(boundary.len() + interior.len());
    for p in boundary.iter().chain(interior) {
        let h = cdt
            .insert(SpadePoint::new(p.x, p.y))
            .map_err(|e| Error::Meshing(format!("insertion failed: {e:?}")))?;
        if h.index() != handles.len() {
            return Err(Error::Meshing(format!("duplicate mesh point ({}, {})", p.x, p.y)));
        }
        handles.push(h);
    }
    let nb = boundary.len();
    for i in 0..nb {
        let (a, b) = (handles[i], handles[(i + 1) % nb]);
        if cdt.can_add_constraint(a, b) {
            cdt.add_constraint(a, b);
        } else {
            return Err(Error::Meshing(format!(
                "boundary segment {i} crosses another constraint"
            )));
        }
    }
    let all: Vec<Point2<f64>> = boundary.iter().chain(interior).copied().collect();
    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        let mut tri = face.vertices().map(|v| v.fix().index());
        let [a, b, c] = tri.map(|i| all[i]);
        let centroid = Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        if poly.contains(centroid.cast::<T>()) != Containment::Interior {
            continue;
        }
        if (b - a).cross(c - a) < 0.0 {
            tri.swap(1, 2);
        }
        tris.push(tri);
    }
    Ok(tris)
}

/// One Laplacian sweep over interior nodes; moves that would bring a node too
/// close to the boundary are rejected.
fn smooth<T: Real>(
    poly: &DomainPolygon<T>,
    h: f64,
    nb: usize,
    boundary: &[Point2<f64>],
    interior: &mut [Point2<f64>],
    tris: &[[usize; 3]],
) {
    let n = nb + interior.len();
    let mut sum = vec![Point2::new(0.0, 0.0); n];
    let mut cnt = vec![0usize; n];
    for tri in tris {
        for k in 0..3 {
            let i = tri[k];
            for l in 1..3 {
                let j = tri[(k + l) % 3];
                let p = if j < nb { boundary[j] } else { interior[j - nb] };
                sum[i] = sum[i] + p;
                cnt[i] += 1;
            }
        }
    }
    for (k, p) in interior.iter_mut().enumerate() {
        let i = nb + k;
        if cnt[i] == 0 {
            continue;
        }
        let target = sum[i] * (1.0 / cnt[i] as f64);
        let q: Point2<T> = target.cast();
        if poly.contains(q) == Containment::Interior && poly.distance_to_boundary(q).as_f64() >= 0.3 * h {
            *p = target;
        }
    }
}
