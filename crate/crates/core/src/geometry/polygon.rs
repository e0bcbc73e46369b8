use super::point::{segment_distance, Aabb, BucketGrid, Point2};
use crate::{Error, Real, Result};

/// Classification of a point against a closed polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Interior,
    Boundary,
    Exterior,
}

impl Containment {
    /// True for interior and boundary points (membership in the closed set).
    pub fn is_inside_closed(self) -> bool {
        !matches!(self, Containment::Exterior)
    }
}

/// Simple, counter-clockwise polygon used as the computational domain.
///
/// Immutable once built; all queries take `&self` and may run concurrently.
#[derive(Debug, Clone)]
pub struct DomainPolygon<T> {
    vertices: Vec<Point2<T>>,
    family: String,
    sampling_h: T,
    bounds: Aabb<T>,
    edge_grid: BucketGrid<T>,
}

impl<T: Real> DomainPolygon<T> {
    /// Validates and indexes a polygon. Fails unless the vertex loop is simple,
    /// counter-clockwise and of positive area.
    pub fn new(vertices: Vec<Point2<T>>, family: impl Into<String>, sampling_h: T) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Domain(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Domain("non-finite vertex".into()));
        }
        let area = signed_area(&vertices);
        if area <= T::zero() {
            return Err(Error::Domain(
                "polygon must be counter-clockwise with positive area".into(),
            ));
        }
        let bounds = Aabb::from_points(vertices.iter().copied());
        let tol = T::geom_tol();
        let boxes: Vec<Aabb<T>> = (0..n)
            .map(|i| Aabb::from_points([vertices[i], vertices[(i + 1) % n]]).inflate(tol))
            .collect();
        let mean_edge = (0..n).map(|i| vertices[i].dist(vertices[(i + 1) % n])).sum::<T>() / T::from_usize_lossy(n);
        let cell = mean_edge.max(bounds.width().max(bounds.height()) / T::lit(256.0));
        let edge_grid = BucketGrid::build(bounds.inflate(tol), cell, &boxes);
        let poly = Self {
            vertices,
            family: family.into(),
            sampling_h,
            bounds,
            edge_grid,
        };
        poly.check_simple()?;
        Ok(poly)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.len();
        let tol = T::geom_tol();
        for i in 0..n {
            let (a, b) = self.edge(i);
            if a.dist(b) <= tol {
                return Err(Error::Domain(format!("repeated vertex at index {i}")));
            }
            let (_, c) = self.edge((i + 1) % n);
            // adjacent edges must not fold back onto each other
            if (b - a).cross(c - b).abs() <= tol * a.dist(b) && (b - a).dot(c - b) < T::zero() {
                return Err(Error::Domain(format!("edges {i} and {} overlap", (i + 1) % n)));
            }
        }
        let mut cand = Vec::new();
        for i in 0..n {
            let (a, b) = self.edge(i);
            self.edge_grid
                .in_box(&Aabb::from_points([a, b]).inflate(tol), &mut cand);
            for &j in &cand {
                if j <= i || j == (i + 1) % n || i == (j + 1) % n {
                    continue;
                }
                let (c, d) = self.edge(j);
                if segments_touch(a, b, c, d, tol) {
                    return Err(Error::Domain(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn sampling_h(&self) -> T {
        self.sampling_h
    }

    pub fn bounds(&self) -> Aabb<T> {
        self.bounds
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (cyclically).
    #[inline]
    pub fn edge(&self, i: usize) -> (Point2<T>, Point2<T>) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> T {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.dist(b)
            })
            .sum()
    }

    /// True when every turn is a left turn up to `tol`.
    pub fn is_convex(&self, tol: T) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let (a, b) = self.edge(i);
            let (_, c) = self.edge((i + 1) % n);
            (b - a).cross(c - b) >= -tol
        })
    }

    /// Distance from `p` to the polygon boundary.
    pub fn distance_to_boundary(&self, p: Point2<T>) -> T {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(p, a, b)
            })
            .fold(T::infinity(), T::min)
    }

    /// Classifies `p`; points within `1e-12` of an edge count as boundary.
    pub fn contains(&self, p: Point2<T>) -> Containment {
        let tol = T::geom_tol();
        for &i in self.edge_grid.at(p) {
            let (a, b) = self.edge(i);
            if segment_distance(p, a, b) <= tol {
                return Containment::Boundary;
            }
        }
        // crossing number with a horizontal ray towards +x
        let mut inside = false;
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Interior
        } else {
            Containment::Exterior
        }
    }

    /// Largest `t <= max_len` such that the whole segment from `origin` to
    /// `origin + t * dir` stays in the closed polygon. `dir` must be a unit vector.
    ///
    /// A ray grazing a re-entrant vertex or running along an edge is not clipped
    /// there; only an actual excursion into the exterior stops it.
    pub fn clip_ray(&self, origin: Point2<T>, dir: Point2<T>, max_len: T) -> Result<T> {
        if self.contains(origin) != Containment::Interior {
            return Err(Error::OriginNotInterior {
                x: origin.x.as_f64(),
                y: origin.y.as_f64(),
            });
        }
        let tol = T::geom_tol();
        let end = origin + dir * max_len;
        let mut cand = Vec::new();
        self.edge_grid
            .in_box(&Aabb::from_points([origin, end]).inflate(tol), &mut cand);

        let mut hits: Vec<T> = Vec::new();
        for &i in &cand {
            let (a, b) = self.edge(i);
            ray_edge_params(origin, dir, max_len, a, b, tol, &mut hits);
        }
        if hits.is_empty() {
            return Ok(max_len);
        }
        hits.sort_by(|a, b| a.partial_cmp(b).expect("finite hit parameters"));
        hits.push(max_len);

        let half = T::lit(0.5);
        let mut prev = T::zero();
        for &t in &hits {
            let t = t.min(max_len);
            if t - prev <= tol {
                continue;
            }
            let mid = origin + dir * ((prev + t) * half);
            if self.contains(mid) == Containment::Exterior {
                return Ok(prev);
            }
            prev = t;
        }
        Ok(max_len)
    }
}

/// Parameters `t in [0, max_len]` where the ray meets segment `[a, b]`,
/// including both ends of a collinear overlap.
fn ray_edge_params<T: Real>(
    p: Point2<T>,
    d: Point2<T>,
    max_len: T,
    a: Point2<T>,
    b: Point2<T>,
    tol: T,
    out: &mut Vec<T>,
) {
    let e = b - a;
    let elen = e.norm();
    let denom = d.cross(e);
    let ap = a - p;
    let in_range = |t: T| t >= -tol && t <= max_len + tol;
    if denom.abs() > tol * elen {
        let t = ap.cross(e) / denom;
        let s = ap.cross(d) / denom;
        let s_tol = tol / elen;
        if s >= -s_tol && s <= T::one() + s_tol && in_range(t) {
            out.push(t.max(T::zero()));
        }
    } else if ap.cross(d).abs() <= tol {
        for q in [a, b] {
            let t = (q - p).dot(d);
            if in_range(t) {
                out.push(t.max(T::zero()));
            }
        }
    }
}

fn orient<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a)
}

/// Closed-segment intersection test with absolute tolerance.
pub(crate) fn segments_touch<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: Point2<T>, tol: T) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let strictly = |x: T, y: T| (x > T::zero() && y < T::zero()) || (x < T::zero() && y > T::zero());
    if strictly(d1, d2) && strictly(d3, d4) {
        return true;
    }
    segment_distance(a, c, d) <= tol
        || segment_distance(b, c, d) <= tol
        || segment_distance(c, a, b) <= tol
        || segment_distance(d, a, b) <= tol
}

/// Shoelace signed area (positive for counter-clockwise loops).
pub fn signed_area<T: Real>(pts: &[Point2<T>]) -> T {
    let n = pts.len();
    let mut s = T::zero();
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    s * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(lo: f64, hi: f64) -> DomainPolygon<f64> {
        let v = vec![
            Point2::new(lo, lo),
            Point2::new(hi, lo),
            Point2::new(hi, hi),
            Point2::new(lo, hi),
        ];
        DomainPolygon::new(v, "square", 1.0).unwrap()
    }

    #[test]
    fn rejects_clockwise_and_self_intersecting() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(DomainPolygon::new(cw, "x", 1.0).is_err());
        // bow-tie with positive net area
        let bow = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(1.0, -1.0),
            Point2::new(0.0, 2.0),
        ];
        assert!(DomainPolygon::new(bow, "x", 1.0).is_err());
    }

    #[test]
    fn containment_square() {
        let sq = square(-1.0, 1.0);
        assert_eq!(sq.contains(Point2::new(0.0, 0.0)), Containment::Interior);
        assert_eq!(sq.contains(Point2::new(1.0, 0.0)), Containment::Boundary);
        assert_eq!(sq.contains(Point2::new(1.0, 1.0)), Containment::Boundary);
        assert_eq!(sq.contains(Point2::new(1.0 + 1e-9, 0.0)), Containment::Exterior);
        assert_eq!(sq.area(), 4.0);
        assert!(sq.is_convex(1e-12));
    }

    #[test]
    fn clip_ray_unit_square() {
        let sq = square(0.0, 1.0);
        let o = Point2::new(0.5, 0.5);
        let e = Point2::new(1.0, 0.0);
        assert!((sq.clip_ray(o, e, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sq.clip_ray(o, e, 0.3).unwrap(), 0.3);
        assert!(sq.clip_ray(Point2::new(1.0, 0.5), e, 1.0).is_err());
        assert!(sq.clip_ray(Point2::new(2.0, 0.5), e, 1.0).is_err());
    }

    #[test]
    fn ray_through_vertex_of_convex_polygon_exits_there() {
        let sq = square(0.0, 1.0);
        let d = Point2::new(1.0, 1.0) * (0.5f64).sqrt();
        let t = sq.clip_ray(Point2::new(0.5, 0.5), d, 5.0).unwrap();
        assert!((t - 0.5 * 2f64.sqrt()).abs() < 1e-14);
    }
}
