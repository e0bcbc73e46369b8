//! The Bellman form of the simple Monge-Ampere operator,
//!
//! ```text
//! H(A, f) = sup_{B >= 0, tr B = 1} ( -B:A + f sqrt(det B) ),
//! ```
//!
//! with controls parametrised by a direction angle `theta` and the eigenvalue
//! `lambda` of `B` on `e(theta)`. The maximisation over `lambda` is done in
//! closed form, so only the angle set is discrete.

use std::f64::consts::PI;

use crate::geometry::Point2;
use crate::{Error, Real, Result};

/// Symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> SymMatrix2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Self { xx, xy, yy }
    }

    pub fn diag(a: T, b: T) -> Self {
        Self::new(a, T::zero(), b)
    }

    /// Symmetric part of a general 2x2 matrix given row-major.
    pub fn symmetrize(m: [[T; 2]; 2]) -> Self {
        Self::new(m[0][0], (m[0][1] + m[1][0]) * T::lit(0.5), m[1][1])
    }

    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mean = self.trace() * half;
        let rad = ((self.xx - self.yy) * half).hypot(self.xy);
        (mean - rad, mean + rad)
    }

    /// Quadratic form `e^T A e`.
    pub fn quad(&self, e: Point2<T>) -> T {
        self.xx * e.x * e.x + T::lit(2.0) * self.xy * e.x * e.y + self.yy * e.y * e.y
    }
}

/// Equispaced angles `theta_j = j pi / n` in `[0, pi)` with their unit vectors
/// and orthogonal complements.
#[derive(Debug, Clone)]
pub struct DirectionSet<T> {
    angles: Vec<T>,
    dirs: Vec<Point2<T>>,
    perps: Vec<Point2<T>>,
}

impl<T: Real> DirectionSet<T> {
    pub fn new(n_theta: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::InvalidArgument("n_theta must be at least 1".into()));
        }
        let angles: Vec<T> = (0..n_theta).map(|j| T::lit(j as f64 * PI / n_theta as f64)).collect();
        // exact axis vectors where the angle is a multiple of pi/2
        let unit = |j: usize, quarter: usize| -> Point2<T> {
            let num = 2 * j + quarter * n_theta;
            if num.is_multiple_of(n_theta) {
                match (num / n_theta) % 4 {
                    0 => Point2::new(T::one(), T::zero()),
                    1 => Point2::new(T::zero(), T::one()),
                    2 => Point2::new(-T::one(), T::zero()),
                    _ => Point2::new(T::zero(), -T::one()),
                }
            } else {
                Point2::unit(T::lit((j as f64 / n_theta as f64 + quarter as f64 / 2.0) * PI))
            }
        };
        let dirs = (0..n_theta).map(|j| unit(j, 0)).collect();
        let perps = (0..n_theta).map(|j| unit(j, 1)).collect();
        Ok(Self { angles, dirs, perps })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angle(&self, j: usize) -> T {
        self.angles[j]
    }

    /// `e(theta_j)`.
    pub fn dir(&self, j: usize) -> Point2<T> {
        self.dirs[j]
    }

    /// `e(theta_j + pi/2)`.
    pub fn perp(&self, j: usize) -> Point2<T> {
        self.perps[j]
    }
}

/// A point of the control set: `B = lambda e e^T + (1 - lambda) e' e'^T`
/// with `e = e(theta_j)` and `e' = e(theta_j + pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlChoice<T> {
    pub angle_index: usize,
    pub lambda: T,
}

impl<T: Real> ControlChoice<T> {
    pub fn new(angle_index: usize, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(Self { angle_index, lambda })
    }

    /// `sqrt(det B)`.
    pub fn sqrt_det(&self) -> T {
        (self.lambda * (T::one() - self.lambda)).sqrt()
    }

    pub fn matrix(&self, dirs: &DirectionSet<T>) -> SymMatrix2<T> {
        let e = dirs.dir(self.angle_index);
        let p = dirs.perp(self.angle_index);
        let (l, m) = (self.lambda, T::one() - self.lambda);
        SymMatrix2::new(
            l * e.x * e.x + m * p.x * p.x,
            l * e.x * e.y + m * p.x * p.y,
            l * e.y * e.y + m * p.y * p.y,
        )
    }
}

/// Value and maximiser of
/// `sup_{lambda in [0,1]} -lambda d1 - (1 - lambda) d2 + f sqrt(lambda (1 - lambda))`.
///
/// With `s = d2 - d1` and `r = |(s, f)|`: value `-(d1 + d2)/2 + r/2`,
/// `lambda* = 1/2 + s/(2r)`; `lambda* = 1/2` when `s = f = 0`.
#[inline]
pub fn pair_sup<T: Real>(d1: T, d2: T, f: T) -> Result<(T, T)> {
    if f < T::zero() || f.is_nan() {
        return Err(Error::InvalidArgument(format!("f must be nonnegative, got {f}")));
    }
    Ok(pair_sup_unchecked(d1, d2, f))
}

#[inline]
pub(crate) fn pair_sup_unchecked<T: Real>(d1: T, d2: T, f: T) -> (T, T) {
    let half = T::lit(0.5);
    let s = d2 - d1;
    let r = s.hypot(f);
    if r == T::zero() {
        return (-d1, half);
    }
    let value = -(d1 + d2) * half + r * half;
    let lambda = (half + s / (r + r)).max(T::zero()).min(T::one());
    (value, lambda)
}

/// `H(A, f)` evaluated exactly through the eigenvalues of `A`: the optimal `B`
/// shares the eigenvectors of `A`.
pub fn hamiltonian_exact<T: Real>(a: SymMatrix2<T>, f: T) -> Result<T> {
    let (a1, a2) = a.eigenvalues();
    Ok(pair_sup(a1, a2, f)?.0)
}

/// Test oracle: the supremum restricted to the grid
/// `theta_j = j pi / n_theta`, `lambda_l = l / (n_lambda - 1)`.
pub fn hamiltonian_bruteforce<T: Real>(a: SymMatrix2<T>, f: T, n_theta: usize, n_lambda: usize) -> Result<T> {
    if f < T::zero() {
        return Err(Error::InvalidArgument(format!("f must be nonnegative, got {f}")));
    }
    if n_theta < 1 || n_lambda < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid sizes need n_theta >= 1 and n_lambda >= 2, got {n_theta} and {n_lambda}"
        )));
    }
    let dirs = DirectionSet::new(n_theta)?;
    let mut best = T::neg_infinity();
    for j in 0..n_theta {
        let qe = a.quad(dirs.dir(j));
        let qp = a.quad(dirs.perp(j));
        for l in 0..n_lambda {
            let lambda = T::from_usize_lossy(l) / T::from_usize_lossy(n_lambda - 1);
            let v = -(lambda * qe + (T::one() - lambda) * qp) + f * (lambda * (T::one() - lambda)).sqrt();
            best = best.max(v);
        }
    }
    Ok(best)
}
