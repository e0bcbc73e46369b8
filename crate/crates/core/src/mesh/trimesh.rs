use crate::geometry::{Aabb, BucketGrid, DomainPolygon, Point2};
use crate::{Error, Real, Result};

/// Barycentric tolerance below which a point still counts as inside a triangle.
pub const LOCATE_TOL: f64 = 1e-10;

/// P1 evaluation record: a containing triangle and its barycentric weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationStencil<T> {
    pub triangle: usize,
    pub node_ids: [usize; 3],
    pub weights: [T; 3],
}

impl<T: Real> InterpolationStencil<T> {
    /// Stencil that reads a single node.
    pub fn at_node(triangle: usize, node_ids: [usize; 3], local: usize) -> Self {
        let mut weights = [T::zero(); 3];
        weights[local] = T::one();
        Self {
            triangle,
            node_ids,
            weights,
        }
    }

    #[inline]
    pub fn apply(&self, u: &[T]) -> T {
        self.weights[0] * u[self.node_ids[0]]
            + self.weights[1] * u[self.node_ids[1]]
            + self.weights[2] * u[self.node_ids[2]]
    }
}

/// Conforming triangulation with boundary markers and a point locator.
#[derive(Debug, Clone)]
pub struct TriMesh<T> {
    nodes: Vec<Point2<T>>,
    triangles: Vec<[usize; 3]>,
    boundary_node: Vec<bool>,
    edges: Vec<[usize; 2]>,
    boundary_edges: Vec<[usize; 2]>,
    level: usize,
    locator: BucketGrid<T>,
}

impl<T: Real> TriMesh<T> {
    /// Assembles and validates a mesh. Boundary flags are derived from the
    /// edges that belong to a single triangle; if `boundary_node` is given it
    /// must agree with them.
    pub fn from_parts(
        nodes: Vec<Point2<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_node: Option<Vec<bool>>,
        level: usize,
    ) -> Result<Self> {
        let n = nodes.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let mut used = vec![false; n];
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing node")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a node")));
            }
            let [a, b, c] = tri.map(|i| nodes[i]);
            if (b - a).cross(c - a) <= T::zero() {
                return Err(Error::InvalidMesh(format!("triangle {t} is not counter-clockwise")));
            }
            for &i in tri {
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("node {i} belongs to no triangle")));
        }

        // (min, max, directed-first) per half edge; sorting groups twins
        let mut half: Vec<(usize, usize, [usize; 2])> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [c, a]])
            .map(|[a, b]| (a.min(b), a.max(b), [a, b]))
            .collect();
        half.sort_unstable();
        let mut edges = Vec::with_capacity(half.len() / 2 + 1);
        let mut boundary_edges = Vec::new();
        let mut k = 0;
        while k < half.len() {
            let mut j = k + 1;
            while j < half.len() && half[j].0 == half[k].0 && half[j].1 == half[k].1 {
                j += 1;
            }
            match j - k {
                1 => boundary_edges.push(half[k].2),
                2 if half[k].2 != half[k + 1].2 => {}
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is not conforming",
                        half[k].0, half[k].1
                    )))
                }
            }
            edges.push([half[k].0, half[k].1]);
            k = j;
        }

        let mut derived = vec![false; n];
        for &[a, b] in &boundary_edges {
            derived[a] = true;
            derived[b] = true;
        }
        if let Some(given) = boundary_node {
            if given.len() != n {
                return Err(Error::InvalidMesh("boundary flag count mismatch".into()));
            }
            if let Some(i) = (0..n).find(|&i| given[i] != derived[i]) {
                return Err(Error::InvalidMesh(format!(
                    "boundary flag of node {i} disagrees with the mesh topology"
                )));
            }
        }

        let mean_edge =
            edges.iter().map(|&[a, b]| nodes[a].dist(nodes[b])).sum::<T>() / T::from_usize_lossy(edges.len());
        let bounds = Aabb::from_points(nodes.iter().copied());
        let tol = T::geom_tol();
        let boxes: Vec<Aabb<T>> = triangles
            .iter()
            .map(|tri| Aabb::from_points(tri.iter().map(|&i| nodes[i])).inflate(tol))
            .collect();
        let locator = BucketGrid::build(bounds.inflate(tol), mean_edge * T::lit(2.0), &boxes);

        Ok(Self {
            nodes,
            triangles,
            boundary_node: derived,
            edges,
            boundary_edges,
            level,
            locator,
        })
    }

    pub fn nodes(&self) -> &[Point2<T>] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unique edges as `(min, max)` node pairs, sorted.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Boundary edges, oriented as in their triangle (domain on the left).
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary_node
    }

    #[inline]
    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary_node[node]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.boundary_node[i])
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        (b - a).cross(c - a) * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Mean length of the unique edges.
    pub fn average_edge_length(&self) -> T {
        self.edges
            .iter()
            .map(|&[a, b]| self.nodes[a].dist(self.nodes[b]))
            .sum::<T>()
            / T::from_usize_lossy(self.edges.len())
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> T {
        let mut worst = T::infinity();
        for tri in &self.triangles {
            for k in 0..3 {
                let p = self.nodes[tri[k]];
                let a = self.nodes[tri[(k + 1) % 3]] - p;
                let b = self.nodes[tri[(k + 2) % 3]] - p;
                worst = worst.min(a.cross(b).atan2(a.dot(b)));
            }
        }
        worst.to_degrees()
    }

    /// Barycentric coordinates of `p` in triangle `t`.
    pub fn barycentric(&self, t: usize, p: Point2<T>) -> [T; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        let area2 = (b - a).cross(c - a);
        [
            (b - p).cross(c - p) / area2,
            (c - p).cross(a - p) / area2,
            (a - p).cross(b - p) / area2,
        ]
    }

    /// Finds a triangle containing `p`. Points on shared edges may resolve to
    /// either neighbour; weights within tolerance of the simplex are clamped
    /// and renormalised.
    pub fn locate_point(&self, p: Point2<T>) -> Result<InterpolationStencil<T>> {
        let tol = T::tol(LOCATE_TOL);
        let mut best: Option<(usize, [T; 3], T)> = None;
        for &t in self.locator.at(p) {
            let w = self.barycentric(t, p);
            let lo = w[0].min(w[1]).min(w[2]);
            if lo >= T::zero() {
                return Ok(InterpolationStencil {
                    triangle: t,
                    node_ids: self.triangles[t],
                    weights: w,
                });
            }
            if best.is_none_or(|(_, _, b)| lo > b) {
                best = Some((t, w, lo));
            }
        }
        match best {
            Some((t, w, lo)) if lo >= -tol => {
                let w = w.map(|x| x.max(T::zero()).min(T::one()));
                let s = w[0] + w[1] + w[2];
                Ok(InterpolationStencil {
                    triangle: t,
                    node_ids: self.triangles[t],
                    weights: w.map(|x| x / s),
                })
            }
            _ => Err(Error::PointNotFound {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            }),
        }
    }

    /// Evaluates the P1 interpolant of nodal values `u` at `p`.
    pub fn interpolate(&self, u: &[T], p: Point2<T>) -> Result<T> {
        Ok(self.locate_point(p)?.apply(u))
    }

    /// Checks that boundary nodes lie on `poly` and that the triangles tile it.
    pub fn check_against(&self, poly: &DomainPolygon<T>) -> Result<()> {
        let tol = T::geom_tol();
        for (i, &p) in self.nodes.iter().enumerate() {
            if self.boundary_node[i] && poly.distance_to_boundary(p) > tol {
                return Err(Error::InvalidMesh(format!(
                    "boundary node {i} is off the domain boundary"
                )));
            }
        }
        let (a, pa) = (self.area(), poly.area());
        if (a - pa).abs() > T::tol(1e-10) * pa {
            return Err(Error::InvalidMesh(format!(
                "mesh area {a} differs from domain area {pa}"
            )));
        }
        Ok(())
    }
}
