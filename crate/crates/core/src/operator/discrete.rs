use rayon::prelude::*;

use super::stencil::{StencilArm, StencilTable};
use crate::bellman::{pair_sup_unchecked, ControlChoice, DirectionSet};
use crate::geometry::Point2;
use crate::mesh::TriMesh;
use crate::sparse::CsrMatrix;
use crate::{Error, Real, Result};

/// Weights `(c+, c0, c-)` of the unequal-arm second difference
/// `c+ v+ - c0 v + c- v-`; all positive, with `c+ + c- = c0`.
#[inline]
pub fn difference_weights<T: Real>(k_fwd: T, k_bwd: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let sum = k_fwd + k_bwd;
    (two / (k_fwd * sum), two / (k_fwd * k_bwd), two / (k_bwd * sum))
}

/// Second difference along one direction with possibly unequal arms; reduces
/// to `(v+ - 2v + v-)/k^2` for equal arms.
pub fn second_difference<T: Real>(node_value: T, fwd: &StencilArm<T>, bwd: &StencilArm<T>, u: &[T]) -> Result<T> {
    if !(fwd.length > T::zero() && bwd.length > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "arm lengths must be positive, got {} and {}",
            fwd.length, bwd.length
        )));
    }
    Ok(second_difference_unchecked(node_value, fwd, bwd, u))
}

#[inline]
fn second_difference_unchecked<T: Real>(v: T, fwd: &StencilArm<T>, bwd: &StencilArm<T>, u: &[T]) -> T {
    let (cp, c0, cm) = difference_weights(fwd.length, bwd.length);
    cp * fwd.value(u) - c0 * v + cm * bwd.value(u)
}

/// Discrete residual with the maximising control per interior row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualResult<T> {
    /// `F_i` per interior row.
    pub values: Vec<T>,
    pub active_angle: Vec<usize>,
    pub active_lambda: Vec<T>,
    /// Gap between the best angle value and the best value over the other
    /// direction pairs (infinite when there is none); small gaps flag
    /// near-ties of the argmax.
    pub margin: Vec<T>,
}

impl<T: Real> ResidualResult<T> {
    pub fn controls(&self) -> Vec<ControlChoice<T>> {
        self.active_angle
            .iter()
            .zip(&self.active_lambda)
            .map(|(&angle_index, &lambda)| ControlChoice { angle_index, lambda })
            .collect()
    }

    pub fn norm_inf(&self) -> T {
        crate::sparse::norm_inf(&self.values)
    }
}

fn check_inputs<T: Real>(stencils: &StencilTable<T>, dirs: &DirectionSet<T>, u: &[T], f: &[T]) -> Result<()> {
    let n = stencils.num_nodes();
    if u.len() != n || f.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected nodal vectors of length {n}, got u: {}, f: {}",
            u.len(),
            f.len()
        )));
    }
    if dirs.len() != stencils.n_theta() {
        return Err(Error::InvalidArgument(
            "direction set does not match the stencil table".into(),
        ));
    }
    Ok(())
}

/// `F_i(u) = max_j pair_sup(D_j u, D_j' u, f_i)` over the direction pairs;
/// ties go to the smallest angle index.
pub fn residual<T: Real>(
    stencils: &StencilTable<T>,
    dirs: &DirectionSet<T>,
    u: &[T],
    f_values: &[T],
) -> Result<ResidualResult<T>> {
    check_inputs(stencils, dirs, u, f_values)?;
    if let Some(&i) = stencils.interior_nodes().iter().find(|&&i| !(f_values[i] >= T::zero())) {
        return Err(Error::InvalidArgument(format!("f is negative at interior node {i}")));
    }
    let rows: Vec<(T, usize, T, T)> = stencils
        .interior_nodes()
        .par_iter()
        .enumerate()
        .map(|(row, &node)| {
            let v = u[node];
            let f = f_values[node];
            let n = stencils.n_theta();
            let mut best = (T::neg_infinity(), 0, T::zero());
            let mut vals = Vec::with_capacity(n);
            for j in 0..n {
                let a = stencils.arms(row, j);
                let d1 = second_difference_unchecked(v, &a[0], &a[1], u);
                let d2 = second_difference_unchecked(v, &a[2], &a[3], u);
                let (val, lambda) = pair_sup_unchecked(d1, d2, f);
                if val > best.0 {
                    best = (val, j, lambda);
                }
                vals.push(val);
            }
            // angle j + n/2 carries the same direction pair as j
            let mirror = n.is_multiple_of(2).then(|| (best.1 + n / 2) % n);
            let second = vals
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != best.1 && Some(j) != mirror)
                .fold(T::neg_infinity(), |m, (_, &x)| m.max(x));
            (best.0, best.1, best.2, best.0 - second)
        })
        .collect();
    let mut out = ResidualResult {
        values: Vec::with_capacity(rows.len()),
        active_angle: Vec::with_capacity(rows.len()),
        active_lambda: Vec::with_capacity(rows.len()),
        margin: Vec::with_capacity(rows.len()),
    };
    for (v, j, l, gap) in rows {
        out.values.push(v);
        out.active_angle.push(j);
        out.active_lambda.push(l);
        out.margin.push(gap);
    }
    Ok(out)
}

/// Frozen-control linearisation `L(u) = A u_I + offset + source` over the
/// interior unknowns `u_I`, where
/// `L_i(u) = -lambda_i D_{j_i} u - (1 - lambda_i) D_{j_i}' u + f_i sqrt(lambda_i (1 - lambda_i))`.
#[derive(Debug, Clone)]
pub struct LinearizedOperator<T> {
    /// Interior-by-interior matrix (the semi-smooth Jacobian).
    pub matrix: CsrMatrix<T>,
    /// Contribution of boundary nodes and boundary endpoint data.
    pub offset: Vec<T>,
    /// `f_i sqrt(lambda_i (1 - lambda_i))`.
    pub source: Vec<T>,
}

impl<T: Real> LinearizedOperator<T> {
    /// Evaluates `L` at the interior values `u_interior`.
    pub fn apply(&self, u_interior: &[T]) -> Vec<T> {
        let mut y = self.matrix.mul_vec(u_interior);
        for ((yi, &o), &s) in y.iter_mut().zip(&self.offset).zip(&self.source) {
            *yi += o + s;
        }
        y
    }
}

/// Assembles the Jacobian of the residual for the frozen controls `active`.
pub fn jacobian<T: Real>(
    stencils: &StencilTable<T>,
    dirs: &DirectionSet<T>,
    u: &[T],
    f_values: &[T],
    active: &[ControlChoice<T>],
) -> Result<LinearizedOperator<T>> {
    check_inputs(stencils, dirs, u, f_values)?;
    let nrows = stencils.num_rows();
    if active.len() != nrows {
        return Err(Error::InvalidArgument(format!(
            "active-control table has {} entries for {nrows} rows",
            active.len()
        )));
    }
    if let Some(c) = active
        .iter()
        .find(|c| c.angle_index >= stencils.n_theta() || !(c.lambda >= T::zero() && c.lambda <= T::one()))
    {
        return Err(Error::InvalidArgument(format!("inconsistent active control {c:?}")));
    }

    // per row: matrix entries, boundary offset, source
    type Row<T> = (Vec<(usize, T)>, T, T);
    let rows: Vec<Row<T>> = stencils
        .interior_nodes()
        .par_iter()
        .enumerate()
        .map(|(row, &node)| {
            let c = active[row];
            let arms = stencils.arms(row, c.angle_index);
            let mut entries: Vec<(usize, T)> = Vec::with_capacity(13);
            let mut offset = T::zero();
            let mut diag = T::zero();
            for (weight, pair) in [(c.lambda, &arms[0..2]), (T::one() - c.lambda, &arms[2..4])] {
                if weight == T::zero() {
                    continue;
                }
                let (cp, c0, cm) = difference_weights(pair[0].length, pair[1].length);
                diag += weight * c0;
                for (arm, coef) in [(&pair[0], cp), (&pair[1], cm)] {
                    let scale = -weight * coef;
                    match &arm.endpoint {
                        super::Endpoint::Boundary { value, .. } => offset += scale * *value,
                        super::Endpoint::Interior(s) => {
                            for (&k, &w) in s.node_ids.iter().zip(&s.weights) {
                                if w == T::zero() {
                                    continue;
                                }
                                match stencils.row_of(k) {
                                    Some(col) => entries.push((col, scale * w)),
                                    None => offset += scale * w * u[k],
                                }
                            }
                        }
                    }
                }
            }
            entries.push((row, diag));
            (entries, offset, f_values[node] * c.sqrt_det())
        })
        .collect();

    let mut entries = Vec::with_capacity(nrows);
    let mut offset = Vec::with_capacity(nrows);
    let mut source = Vec::with_capacity(nrows);
    for (e, o, s) in rows {
        entries.push(e);
        offset.push(o);
        source.push(s);
    }
    Ok(LinearizedOperator {
        matrix: CsrMatrix::from_rows(nrows, entries)?,
        offset,
        source,
    })
}

/// Discrete HJB operator: stencils, directions and source samples bundled.
#[derive(Debug, Clone)]
pub struct DiscreteOperator<T> {
    pub stencils: StencilTable<T>,
    pub dirs: DirectionSet<T>,
    /// `f` at every mesh node.
    pub f_values: Vec<T>,
}

impl<T: Real> DiscreteOperator<T> {
    pub fn new(stencils: StencilTable<T>, dirs: DirectionSet<T>, f_values: Vec<T>) -> Result<Self> {
        if f_values.len() != stencils.num_nodes() {
            return Err(Error::InvalidArgument("f_values length does not match the mesh".into()));
        }
        Ok(Self {
            stencils,
            dirs,
            f_values,
        })
    }

    pub fn residual(&self, u: &[T]) -> Result<ResidualResult<T>> {
        residual(&self.stencils, &self.dirs, u, &self.f_values)
    }

    pub fn jacobian(&self, u: &[T], active: &[ControlChoice<T>]) -> Result<LinearizedOperator<T>> {
        jacobian(&self.stencils, &self.dirs, u, &self.f_values, active)
    }

    /// Gathers the interior entries of a nodal vector in row order.
    pub fn interior_values(&self, u: &[T]) -> Vec<T> {
        self.stencils.interior_nodes().iter().map(|&i| u[i]).collect()
    }
}

/// Samples `field` at every mesh node.
pub fn sample_nodes<T: Real, F: Fn(Point2<T>) -> T>(mesh: &TriMesh<T>, field: F) -> Vec<T> {
    mesh.nodes().iter().map(|&p| field(p)).collect()
}
