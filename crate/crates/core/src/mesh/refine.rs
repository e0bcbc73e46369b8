use std::collections::HashMap;

use super::trimesh::TriMesh;
use crate::{Real, Result};

/// Red refinement: every triangle is split into four through its edge
/// midpoints. Boundary midpoints stay on the straight boundary segments, so
/// the meshed domain is unchanged.
pub fn refine_uniform<T: Real>(mesh: &TriMesh<T>) -> Result<TriMesh<T>> {
    let mut nodes = mesh.nodes().to_vec();
    nodes.reserve(mesh.edges().len());
    let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(mesh.edges().len());
    let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<_>| -> usize {
        *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let p = mesh.nodes()[a].midpoint(mesh.nodes()[b]);
            nodes.push(p);
            nodes.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for &[a, b, c] in mesh.triangles() {
        let ab = midpoint(a, b, &mut nodes);
        let bc = midpoint(b, c, &mut nodes);
        let ca = midpoint(c, a, &mut nodes);
        triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    TriMesh::from_parts(nodes, triangles, None, mesh.level() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::trimesh::tests::two_triangle_square;

    #[test]
    fn counts_and_area() {
        let m0 = two_triangle_square();
        let m1 = refine_uniform(&m0).unwrap();
        assert_eq!(m1.num_triangles(), 4 * m0.num_triangles());
        assert_eq!(m1.num_nodes(), m0.num_nodes() + m0.edges().len());
        assert_eq!(m1.level(), 1);
        assert!((m1.area() - 1.0).abs() < 1e-15);
        // midpoints of boundary edges are boundary nodes, the diagonal midpoint is not
        assert_eq!(m1.interior_nodes().collect::<Vec<_>>().len(), 1);
        let m2 = refine_uniform(&m1).unwrap();
        assert_eq!(m2.num_nodes(), 25);
        assert!((m2.min_angle_deg() - 45.0).abs() < 1e-12);
    }

    #[test]
    fn lshape_levels() {
        use crate::geometry::{build_domain, DomainSpec};
        let poly = build_domain::<f64>(DomainSpec::LShape, 0.25).unwrap();
        let mut mesh = crate::mesh::generate_mesh(&poly, 0.25).unwrap();
        for _ in 0..3 {
            let next = refine_uniform(&mesh).unwrap();
            let growth = next.num_nodes() as f64 / mesh.num_nodes() as f64;
            assert!(growth > 3.0 && growth < 4.0, "{growth}");
            // halving is exact for the edge halves but not for the new interior
            // edges, whose lengths follow the parent triangle's opposite sides
            let ratio = next.average_edge_length() / mesh.average_edge_length();
            assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
            next.check_against(&poly).unwrap();
            assert_eq!(next.level(), mesh.level() + 1);
            mesh = next;
        }
    }
}
