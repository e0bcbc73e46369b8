use std::ops::{Add, Mul, Neg, Sub};

use crate::Real;

/// Point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    #[inline]
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_f64(x: f64, y: f64) -> Self {
        Self::new(T::lit(x), T::lit(y))
    }

    /// Unit vector at angle `theta` (radians) from the first axis.
    #[inline]
    pub fn unit(theta: T) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    /// Counter-clockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    #[inline]
    pub fn midpoint(self, o: Self) -> Self {
        self.lerp(o, T::lit(0.5))
    }

    pub fn cast<U: Real>(self) -> Point2<U> {
        Point2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == T::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).max(T::zero()).min(T::one());
    p.dist(a + ab * t)
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Real> Aabb<T> {
    pub fn from_points<I: IntoIterator<Item = Point2<T>>>(pts: I) -> Self {
        let mut min = Point2::new(T::infinity(), T::infinity());
        let mut max = Point2::new(T::neg_infinity(), T::neg_infinity());
        for p in pts {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Self { min, max }
    }

    pub fn inflate(self, d: T) -> Self {
        Self {
            min: Point2::new(self.min.x - d, self.min.y - d),
            max: Point2::new(self.max.x + d, self.max.y + d),
        }
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

/// Uniform bucket grid over a bounding box. Items are registered by their
/// bounding boxes; queries return candidate item indices.
#[derive(Debug, Clone)]
pub(crate) struct BucketGrid<T> {
    origin: Point2<T>,
    cell: T,
    nx: usize,
    ny: usize,
    start: Vec<usize>,
    items: Vec<usize>,
}

impl<T: Real> BucketGrid<T> {
    pub(crate) fn build(bounds: Aabb<T>, cell: T, boxes: &[Aabb<T>]) -> Self {
        let cell = cell.max(T::epsilon());
        let nx = ((bounds.width() / cell).ceil().to_usize().unwrap_or(1)).clamp(1, 4096);
        let ny = ((bounds.height() / cell).ceil().to_usize().unwrap_or(1)).clamp(1, 4096);
        let mut grid = Self {
            origin: bounds.min,
            cell,
            nx,
            ny,
            start: vec![0; nx * ny + 1],
            items: Vec::new(),
        };
        let mut counts = vec![0usize; nx * ny];
        for b in boxes {
            let (i0, j0, i1, j1) = grid.cell_range(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    counts[j * nx + i] += 1;
                }
            }
        }
        for (c, &n) in counts.iter().enumerate() {
            grid.start[c + 1] = grid.start[c] + n;
        }
        let mut fill = grid.start.clone();
        grid.items = vec![0; grid.start[nx * ny]];
        for (k, b) in boxes.iter().enumerate() {
            let (i0, j0, i1, j1) = grid.cell_range(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let c = j * nx + i;
                    grid.items[fill[c]] = k;
                    fill[c] += 1;
                }
            }
        }
        grid
    }

    fn coord(&self, v: T, o: T, n: usize) -> usize {
        let c = ((v - o) / self.cell).floor();
        if c <= T::zero() {
            0
        } else {
            c.to_usize().unwrap_or(n - 1).min(n - 1)
        }
    }

    fn cell_range(&self, b: &Aabb<T>) -> (usize, usize, usize, usize) {
        (
            self.coord(b.min.x, self.origin.x, self.nx),
            self.coord(b.min.y, self.origin.y, self.ny),
            self.coord(b.max.x, self.origin.x, self.nx),
            self.coord(b.max.y, self.origin.y, self.ny),
        )
    }

    /// Candidates whose registered box may contain `p`.
    pub(crate) fn at(&self, p: Point2<T>) -> &[usize] {
        let i = self.coord(p.x, self.origin.x, self.nx);
        let j = self.coord(p.y, self.origin.y, self.ny);
        let c = j * self.nx + i;
        &self.items[self.start[c]..self.start[c + 1]]
    }

    /// Candidates whose registered box may intersect `b`, deduplicated into `out`.
    pub(crate) fn in_box(&self, b: &Aabb<T>, out: &mut Vec<usize>) {
        out.clear();
        let (i0, j0, i1, j1) = self.cell_range(b);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = j * self.nx + i;
                out.extend_from_slice(&self.items[self.start[c]..self.start[c + 1]]);
            }
        }
        if j1 > j0 || i1 > i0 {
            out.sort_unstable();
            out.dedup();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_algebra() {
        let a = Point2::<f64>::new(1.0, 2.0);
        let b = Point2::new(3.0, -1.0);
        assert_eq!(a.dot(b), 1.0);
        assert_eq!(a.cross(b), -7.0);
        assert_eq!(a.perp(), Point2::new(-2.0, 1.0));
        assert_eq!(a.midpoint(b), Point2::new(2.0, 0.5));
    }

    #[test]
    fn segment_distance_cases() {
        let a = Point2::<f64>::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        assert_eq!(segment_distance(Point2::new(0.5, 2.0), a, b), 2.0);
        assert_eq!(segment_distance(Point2::new(-3.0, 4.0), a, b), 5.0);
    }

    #[test]
    fn grid_returns_registered_items() {
        let boxes = vec![
            Aabb::from_points([Point2::new(0.0, 0.0), Point2::new(0.1, 0.1)]),
            Aabb::from_points([Point2::new(0.5, 0.5), Point2::new(0.9, 0.9)]),
        ];
        let bounds = Aabb::from_points([Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)]);
        let g = BucketGrid::build(bounds, 0.25, &boxes);
        assert!(g.at(Point2::new(0.05, 0.05)).contains(&0));
        assert!(g.at(Point2::new(0.7, 0.7)).contains(&1));
        let mut out = Vec::new();
        g.in_box(&bounds, &mut out);
        assert_eq!(out, vec![0, 1]);
    }
}
