use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bellman::DirectionSet;
use crate::geometry::{DomainPolygon, Point2};
use crate::mesh::{InterpolationStencil, TriMesh};
use crate::{Error, Real, Result};

/// How arms are shortened when the nominal stencil would leave the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClipMode {
    /// Each arm is clipped independently; the second difference uses unequal arms.
    #[default]
    Asymmetric,
    /// Both arms of a direction are shortened to the shorter of the two.
    Symmetric,
}

impl FromStr for ClipMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric" => Ok(ClipMode::Asymmetric),
            "symmetric" => Ok(ClipMode::Symmetric),
            other => Err(Error::InvalidArgument(format!("unknown clip mode `{other}`"))),
        }
    }
}

impl fmt::Display for ClipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClipMode::Asymmetric => "asymmetric",
            ClipMode::Symmetric => "symmetric",
        })
    }
}

/// Where an arm ends: inside the mesh (P1 interpolation of nodal values) or
/// on the domain boundary (Dirichlet data evaluated at that point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint<T> {
    Interior(InterpolationStencil<T>),
    Boundary { point: Point2<T>, value: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilArm<T> {
    pub length: T,
    pub endpoint: Endpoint<T>,
}

impl<T: Real> StencilArm<T> {
    /// Value at the arm's endpoint for nodal values `u`.
    #[inline]
    pub fn value(&self, u: &[T]) -> T {
        match &self.endpoint {
            Endpoint::Interior(s) => s.apply(u),
            Endpoint::Boundary { value, .. } => *value,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self.endpoint, Endpoint::Boundary { .. })
    }
}

/// Index of an arm within the four arms stored per (node, angle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmSlot {
    /// `+e(theta)`
    Forward = 0,
    /// `-e(theta)`
    Backward = 1,
    /// `+e(theta + pi/2)`
    PerpForward = 2,
    /// `-e(theta + pi/2)`
    PerpBackward = 3,
}

/// Clipped wide stencils for every interior node and every direction pair.
#[derive(Debug, Clone)]
pub struct StencilTable<T> {
    n_nodes: usize,
    interior: Vec<usize>,
    row_of: Vec<Option<usize>>,
    n_theta: usize,
    arms: Vec<[StencilArm<T>; 4]>,
    m: T,
    h: T,
    clip: ClipMode,
}

impl<T: Real> StencilTable<T> {
    pub fn num_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Interior nodes in row order.
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn num_rows(&self) -> usize {
        self.interior.len()
    }

    /// Matrix row of `node`, `None` for boundary nodes.
    pub fn row_of(&self, node: usize) -> Option<usize> {
        self.row_of[node]
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// The four arms `[+e, -e, +e', -e']` of `row` for angle index `j`.
    #[inline]
    pub fn arms(&self, row: usize, j: usize) -> &[StencilArm<T>; 4] {
        &self.arms[row * self.n_theta + j]
    }

    pub fn multiplier(&self) -> T {
        self.m
    }

    pub fn mesh_size(&self) -> T {
        self.h
    }

    /// Nominal arm length `m h`.
    pub fn k_nominal(&self) -> T {
        self.m * self.h
    }

    pub fn clip_mode(&self) -> ClipMode {
        self.clip
    }

    /// Iterates `(node, direction, arm)` for every stored arm.
    pub fn iter_arms<'a>(
        &'a self,
        dirs: &'a DirectionSet<T>,
    ) -> impl Iterator<Item = (usize, Point2<T>, &'a StencilArm<T>)> + 'a {
        (0..self.num_rows()).flat_map(move |row| {
            (0..self.n_theta).flat_map(move |j| {
                let (e, p) = (dirs.dir(j), dirs.perp(j));
                let node = self.interior[row];
                let arms = self.arms(row, j);
                [
                    (node, e, &arms[0]),
                    (node, -e, &arms[1]),
                    (node, p, &arms[2]),
                    (node, -p, &arms[3]),
                ]
            })
        })
    }
}

/// Builds the clipped stencils with nominal arm length `k = m h`, `h` the
/// mean edge length of `mesh`. Clipped arms end on the boundary and carry
/// `g` at the clip point; unclipped arms are located in the mesh.
pub fn build_stencils<T, G>(
    mesh: &TriMesh<T>,
    poly: &DomainPolygon<T>,
    dirs: &DirectionSet<T>,
    m: T,
    clip: ClipMode,
    g: G,
) -> Result<StencilTable<T>>
where
    T: Real,
    G: Fn(Point2<T>) -> T + Sync,
{
    if !(m >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "stencil multiplier must be >= 1, got {m}"
        )));
    }
    let h = mesh.average_edge_length();
    let k = m * h;
    let tol = T::geom_tol();
    let interior: Vec<usize> = mesh.interior_nodes().collect();
    let mut row_of = vec![None; mesh.num_nodes()];
    for (r, &i) in interior.iter().enumerate() {
        row_of[i] = Some(r);
    }
    let n_theta = dirs.len();

    let make_arm = |x: Point2<T>, d: Point2<T>, len: T, clipped: bool| -> Result<StencilArm<T>> {
        let p = x + d * len;
        let endpoint = if clipped {
            Endpoint::Boundary { point: p, value: g(p) }
        } else {
            Endpoint::Interior(mesh.locate_point(p)?)
        };
        Ok(StencilArm { length: len, endpoint })
    };
    let pair = |node: usize, x: Point2<T>, d: Point2<T>| -> Result<[StencilArm<T>; 2]> {
        let fwd = poly.clip_ray(x, d, k)?;
        let bwd = poly.clip_ray(x, -d, k)?;
        if !(fwd > T::zero() && bwd > T::zero()) {
            return Err(Error::Stencil {
                node,
                reason: "clipped arm has zero length".into(),
            });
        }
        let (fc, bc) = (fwd < k - tol, bwd < k - tol);
        match clip {
            ClipMode::Asymmetric => Ok([make_arm(x, d, fwd, fc)?, make_arm(x, -d, bwd, bc)?]),
            ClipMode::Symmetric => {
                let len = fwd.min(bwd);
                Ok([
                    make_arm(x, d, len, fc && fwd <= len)?,
                    make_arm(x, -d, len, bc && bwd <= len)?,
                ])
            }
        }
    };

    let arms: Vec<Vec<[StencilArm<T>; 4]>> = interior
        .par_iter()
        .map(|&node| {
            let x = mesh.nodes()[node];
            (0..n_theta)
                .map(|j| {
                    let [a, b] = pair(node, x, dirs.dir(j))?;
                    let [c, d] = pair(node, x, dirs.perp(j))?;
                    Ok([a, b, c, d])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(StencilTable {
        n_nodes: mesh.num_nodes(),
        interior,
        row_of,
        n_theta,
        arms: arms.into_iter().flatten().collect(),
        m,
        h,
        clip,
    })
}
