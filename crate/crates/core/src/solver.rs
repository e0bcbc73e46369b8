//! Semi-smooth Newton iteration for the discrete Bellman system.
//!
//! Each step freezes the maximising controls of the current iterate, which
//! makes the step identical to one round of Howard's policy iteration.

use crate::bellman::ControlChoice;
use crate::error::{Error, Result};
use crate::operator::DiscreteOperator;
use crate::sparse::{norm_inf, solve_sparse};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonConfig<T> {
    /// Stop once the infinity norm of the update drops below this.
    pub step_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            step_tol: T::lit(5e-8),
            max_iter: 50,
        }
    }
}

impl<T: Real> NewtonConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_tol > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "step_tol must be positive, got {}",
                self.step_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport<T> {
    pub iterations: usize,
    /// Infinity norm of each update.
    pub step_norms: Vec<T>,
    /// Infinity norm of the residual at the start of each iteration.
    pub residual_norms: Vec<T>,
    /// Residual of the returned iterate.
    pub final_residual_norm: T,
    /// Number of rows whose active angle differs from the previous iteration.
    pub policy_changes: Vec<usize>,
    pub converged: bool,
}

/// Solves the linear problem obtained by freezing angle 0 with weight 1/2 at
/// every interior node. Boundary nodes keep the values of `g_nodes`.
pub fn initial_guess<T: Real>(op: &DiscreteOperator<T>, g_nodes: &[T]) -> Result<Vec<T>> {
    let frozen = vec![
        ControlChoice {
            angle_index: 0,
            lambda: T::lit(0.5)
        };
        op.stencils.num_rows()
    ];
    let lin = op.jacobian(g_nodes, &frozen)?;
    let rhs: Vec<T> = lin.offset.iter().zip(&lin.source).map(|(&o, &s)| -(o + s)).collect();
    let x = solve_sparse(&lin.matrix, &rhs)?;
    let mut u = g_nodes.to_vec();
    for (&node, v) in op.stencils.interior_nodes().iter().zip(x) {
        u[node] = v;
    }
    Ok(u)
}

/// Runs full Newton steps from `u0` until the update is below `cfg.step_tol`
/// or `cfg.max_iter` steps were taken. Non-convergence is reported through
/// `NewtonReport::converged`, not as an error.
pub fn newton_solve<T: Real>(
    op: &DiscreteOperator<T>,
    u0: &[T],
    cfg: &NewtonConfig<T>,
) -> Result<(Vec<T>, NewtonReport<T>)> {
    cfg.validate()?;
    if u0.len() != op.stencils.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "initial iterate has {} values for {} nodes",
            u0.len(),
            op.stencils.num_nodes()
        )));
    }
    let mut u = u0.to_vec();
    let mut report = NewtonReport {
        iterations: 0,
        step_norms: Vec::new(),
        residual_norms: Vec::new(),
        final_residual_norm: T::zero(),
        policy_changes: Vec::new(),
        converged: false,
    };
    let mut previous: Option<Vec<usize>> = None;
    let mut res = op.residual(&u)?;
    while report.iterations < cfg.max_iter {
        report.residual_norms.push(res.norm_inf());
        if let Some(prev) = &previous {
            report
                .policy_changes
                .push(prev.iter().zip(&res.active_angle).filter(|(a, b)| a != b).count());
        }
        let lin = op.jacobian(&u, &res.controls())?;
        let rhs: Vec<T> = res.values.iter().map(|&v| -v).collect();
        let delta = solve_sparse(&lin.matrix, &rhs)?;
        for (&node, &d) in op.stencils.interior_nodes().iter().zip(&delta) {
            u[node] += d;
        }
        let step = norm_inf(&delta);
        report.step_norms.push(step);
        report.iterations += 1;
        previous = Some(std::mem::take(&mut res.active_angle));
        res = op.residual(&u)?;
        if step < cfg.step_tol {
            report.converged = true;
            break;
        }
    }
    report.final_residual_norm = res.norm_inf();
    Ok((u, report))
}
