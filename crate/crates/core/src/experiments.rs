//! Catalog of benchmark problems and the convergence-study driver.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::bellman::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{build_domain, DomainPolygon, DomainSpec, Point2};
use crate::mesh::{generate_mesh, refine_uniform, TriMesh};
use crate::operator::{build_stencils, sample_nodes, ClipMode, DiscreteOperator};
use crate::solver::{initial_guess, newton_solve, NewtonConfig, NewtonReport};

/// Points within this distance of a boundary segment count as lying on it.
const SEGMENT_TOL: f64 = 1e-9;

/// Scalar fields available to problem definitions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Field {
    Const(f64),
    /// `a x1 + b x2 + c`.
    Affine {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `(x1^2 + x2^2)^2`.
    RadialQuartic,
    /// `8 sqrt(3) (x1^2 + x2^2)`, the right-hand side matching `RadialQuartic`.
    RadialQuarticSource,
    /// `x1^4 - 1`.
    QuarticMinusOne,
    /// `x2 (1 - x2)` on the vertical segment `{x1} x (0, 1)`, `x1^4 - 1` elsewhere.
    BumpOnVerticalSegment {
        x1: f64,
    },
    /// `x2^2 - 1` where `x1 > x2`, `1 - x1^2` otherwise.
    BentSquareBoundary,
    /// `x2^2 - 1`.
    ParabolicTrough,
}

impl Field {
    pub fn eval(&self, p: Point2<f64>) -> f64 {
        let (x, y) = (p.x, p.y);
        match *self {
            Field::Const(c) => c,
            Field::Affine { a, b, c } => a * x + b * y + c,
            Field::RadialQuartic => (x * x + y * y).powi(2),
            Field::RadialQuarticSource => 8.0 * 3f64.sqrt() * (x * x + y * y),
            Field::QuarticMinusOne => x.powi(4) - 1.0,
            Field::BumpOnVerticalSegment { x1 } => {
                if (x - x1).abs() <= SEGMENT_TOL && y > 0.0 && y < 1.0 {
                    y * (1.0 - y)
                } else {
                    x.powi(4) - 1.0
                }
            }
            Field::BentSquareBoundary => {
                if x > y {
                    y * y - 1.0
                } else {
                    1.0 - x * x
                }
            }
            Field::ParabolicTrough => y * y - 1.0,
        }
    }
}

/// Subdomain on which errors are measured; inequalities are strict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Omega {
    Everywhere,
    X1Below(f64),
    X1Above(f64),
    /// The open box `(-a, a)^2`.
    CentredBox(f64),
}

impl Omega {
    pub fn contains(&self, p: Point2<f64>) -> bool {
        match *self {
            Omega::Everywhere => true,
            Omega::X1Below(t) => p.x < t,
            Omega::X1Above(t) => p.x > t,
            Omega::CentredBox(a) => p.x.abs() < a && p.y.abs() < a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub solution: Field,
    pub omega: Omega,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemData {
    pub f: Field,
    pub g: Field,
    pub reference: Option<Reference>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    /// Most experiments use one domain; the bent-square family sweeps seven.
    pub domains: Vec<DomainSpec>,
    pub data: ProblemData,
    /// Target size of the level-0 mesh, also the boundary sampling step.
    pub h0: f64,
    pub levels: Vec<usize>,
    pub multipliers: Vec<f64>,
    pub n_theta: usize,
    pub newton: NewtonConfig<f64>,
    pub clip: ClipMode,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return Err(Error::InvalidArgument(format!("{}: no domains", self.name)));
        }
        for d in &self.domains {
            d.validate()?;
        }
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::InvalidArgument(format!("{}: h0 must be positive", self.name)));
        }
        if self.levels.is_empty() || self.multipliers.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{}: empty level or multiplier list",
                self.name
            )));
        }
        if let Some(m) = self.multipliers.iter().find(|&&m| !(m >= 1.0 && m.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "{}: multiplier {m} is below 1",
                self.name
            )));
        }
        if self.n_theta == 0 {
            return Err(Error::InvalidArgument(format!(
                "{}: n_theta must be positive",
                self.name
            )));
        }
        self.newton.validate()
    }

    /// CSV label of the rows computed on `domain`.
    pub fn label(&self, domain: DomainSpec) -> String {
        if self.domains.len() == 1 {
            self.name.clone()
        } else {
            format!("{}:{domain}", self.name)
        }
    }
}

pub const DEFAULT_N_THETA: usize = 32;
pub const STUDY_MULTIPLIERS: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

fn spec(name: &str, domains: Vec<DomainSpec>, data: ProblemData, h0: f64, multipliers: &[f64]) -> ExperimentSpec {
    ExperimentSpec {
        name: name.into(),
        domains,
        data,
        h0,
        levels: vec![0, 1, 2, 3],
        multipliers: multipliers.to_vec(),
        n_theta: DEFAULT_N_THETA,
        newton: NewtonConfig::default(),
        clip: ClipMode::Asymmetric,
    }
}

/// The five benchmark experiments with desk-scale defaults (levels 0 to 3).
pub fn catalog() -> Vec<ExperimentSpec> {
    let ridge = |omega| {
        Some(Reference {
            solution: Field::QuarticMinusOne,
            omega,
        })
    };
    vec![
        spec(
            "quartic-lshape",
            vec![DomainSpec::LShape],
            ProblemData {
                f: Field::RadialQuarticSource,
                g: Field::RadialQuartic,
                reference: Some(Reference {
                    solution: Field::RadialQuartic,
                    omega: Omega::Everywhere,
                }),
            },
            0.25,
            &STUDY_MULTIPLIERS,
        ),
        spec(
            "bakelman-disc-square",
            vec![DomainSpec::DiscUnionSquare],
            ProblemData {
                f: Field::Const(0.0),
                g: Field::BumpOnVerticalSegment { x1: 1.0 },
                reference: ridge(Omega::X1Below(0.95)),
            },
            0.22,
            &STUDY_MULTIPLIERS,
        ),
        spec(
            "nonconvex-lshape",
            vec![DomainSpec::LShape],
            ProblemData {
                f: Field::Const(0.0),
                g: Field::BumpOnVerticalSegment { x1: -1.0 },
                reference: ridge(Omega::X1Above(-0.95)),
            },
            0.25,
            &STUDY_MULTIPLIERS,
        ),
        spec(
            "heart",
            vec![DomainSpec::Heart],
            ProblemData {
                f: Field::Const(1.0),
                g: Field::Const(0.0),
                reference: None,
            },
            0.13,
            &[8.0],
        ),
        spec(
            "bent-square",
            vec![
                DomainSpec::BentSquareConvex { c: 3.0 },
                DomainSpec::BentSquareConvex { c: 10.0 },
                DomainSpec::BentSquareConvex { c: 100.0 },
                DomainSpec::Square,
                DomainSpec::BentSquareConcave { c: 100.0 },
                DomainSpec::BentSquareConcave { c: 10.0 },
                DomainSpec::BentSquareConcave { c: 3.0 },
            ],
            ProblemData {
                f: Field::Const(0.0),
                g: Field::BentSquareBoundary,
                reference: Some(Reference {
                    solution: Field::ParabolicTrough,
                    omega: Omega::CentredBox(0.75),
                }),
            },
            0.16,
            &[4.0, 8.0, 16.0],
        ),
    ]
}

pub fn find_experiment(name: &str) -> Result<ExperimentSpec> {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment `{name}`")))
}

/// `max |u - ref|` over the nodes in `omega`, divided by `max |ref|` there.
pub fn rel_linf_error(mesh: &TriMesh<f64>, u: &[f64], reference: Field, omega: Omega) -> Result<f64> {
    if u.len() != mesh.num_nodes() {
        return Err(Error::InvalidArgument("solution length does not match the mesh".into()));
    }
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    let mut any = false;
    for (p, &v) in mesh.nodes().iter().zip(u) {
        if omega.contains(*p) {
            let r = reference.eval(*p);
            err = err.max((v - r).abs());
            scale = scale.max(r.abs());
            any = true;
        }
    }
    if !any {
        return Err(Error::InvalidArgument(
            "no mesh node lies in the error subdomain".into(),
        ));
    }
    if scale == 0.0 {
        return Err(Error::InvalidArgument(
            "reference vanishes on the error subdomain".into(),
        ));
    }
    Ok(err / scale)
}

/// Mesh of `poly` after `level` uniform refinements of the initial mesh.
pub fn level_mesh(poly: &DomainPolygon<f64>, h0: f64, level: usize) -> Result<TriMesh<f64>> {
    let mut mesh = generate_mesh(poly, h0)?;
    for _ in 0..level {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

/// How the Newton iteration is started.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Start {
    /// Solution of the frozen-control linear problem.
    #[default]
    FrozenControl,
    /// Boundary data with zero interior values.
    ZeroInterior,
}

#[derive(Clone, Debug)]
pub struct SolveSettings {
    pub m: f64,
    pub n_theta: usize,
    pub clip: ClipMode,
    pub newton: NewtonConfig<f64>,
    pub start: Start,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: Vec<f64>,
    pub report: NewtonReport<f64>,
    pub operator: DiscreteOperator<f64>,
}

/// Assembles the scheme for `data` on `mesh` and runs Newton.
pub fn solve_problem(
    poly: &DomainPolygon<f64>,
    mesh: &TriMesh<f64>,
    data: &ProblemData,
    settings: &SolveSettings,
) -> Result<Solution> {
    let dirs = DirectionSet::new(settings.n_theta)?;
    let g = |p: Point2<f64>| data.g.eval(p);
    let stencils = build_stencils(mesh, poly, &dirs, settings.m, settings.clip, g)?;
    let f = sample_nodes(mesh, |p| data.f.eval(p));
    let operator = DiscreteOperator::new(stencils, dirs, f)?;
    let g_nodes = sample_nodes(mesh, g);
    let u0 = match settings.start {
        Start::FrozenControl => initial_guess(&operator, &g_nodes)?,
        Start::ZeroInterior => {
            let mut u = g_nodes;
            for &i in operator.stencils.interior_nodes() {
                u[i] = 0.0;
            }
            u
        }
    };
    let (u, report) = newton_solve(&operator, &u0, &settings.newton)?;
    Ok(Solution { u, report, operator })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub experiment: String,
    pub domain: DomainSpec,
    pub level: usize,
    pub dofs: usize,
    pub h: f64,
    pub m: f64,
    /// Relative error on the experiment's subdomain.
    pub rel_linf_error: Option<f64>,
    /// Relative error against the reference over all nodes.
    pub full_rel_linf_error: Option<f64>,
    pub newton_iterations: usize,
    pub converged: bool,
    /// `max |u|` over the nodes.
    pub solution_max: f64,
    pub wall_time_s: f64,
}

/// Runs every (domain, level, multiplier) cell of `spec`. Records come out
/// ordered by domain, then level, then multiplier as listed in the spec.
pub fn run_study(spec: &ExperimentSpec) -> Result<Vec<ConvergenceRecord>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &domain in &spec.domains {
        let poly = build_domain(domain, spec.h0)?;
        let max_level = spec.levels.iter().copied().max().unwrap_or(0);
        let mut meshes = vec![generate_mesh(&poly, spec.h0)?];
        for l in 1..=max_level {
            let next = refine_uniform(&meshes[l - 1])?;
            meshes.push(next);
        }
        let cells: Vec<(usize, f64)> = spec
            .levels
            .iter()
            .flat_map(|&l| spec.multipliers.iter().map(move |&m| (l, m)))
            .collect();
        let label = spec.label(domain);
        let records: Vec<Result<ConvergenceRecord>> = cells
            .par_iter()
            .map(|&(level, m)| {
                let mesh = &meshes[level];
                let settings = SolveSettings {
                    m,
                    n_theta: spec.n_theta,
                    clip: spec.clip,
                    newton: spec.newton,
                    start: Start::FrozenControl,
                };
                let t0 = Instant::now();
                let sol = solve_problem(&poly, mesh, &spec.data, &settings)?;
                let wall = t0.elapsed().as_secs_f64();
                let (err, full) = match spec.data.reference {
                    Some(r) => (
                        Some(rel_linf_error(mesh, &sol.u, r.solution, r.omega)?),
                        Some(rel_linf_error(mesh, &sol.u, r.solution, Omega::Everywhere)?),
                    ),
                    None => (None, None),
                };
                Ok(ConvergenceRecord {
                    experiment: label.clone(),
                    domain,
                    level,
                    dofs: mesh.num_nodes(),
                    h: mesh.average_edge_length(),
                    m,
                    rel_linf_error: err,
                    full_rel_linf_error: full,
                    newton_iterations: sol.report.iterations,
                    converged: sol.report.converged,
                    solution_max: sol.u.iter().fold(0.0f64, |a, v| a.max(v.abs())),
                    wall_time_s: wall,
                })
            })
            .collect();
        for r in records {
            out.push(r?);
        }
    }
    Ok(out)
}

/// The record with the smallest error among those of `experiment` at
/// `level`; ties go to the smallest multiplier.
pub fn best_m<'a>(records: &'a [ConvergenceRecord], experiment: &str, level: usize) -> Option<&'a ConvergenceRecord> {
    records
        .iter()
        .filter(|r| r.experiment == experiment && r.level == level && r.rel_linf_error.is_some())
        .min_by(|a, b| {
            let (ea, eb) = (a.rel_linf_error.unwrap(), b.rel_linf_error.unwrap());
            ea.total_cmp(&eb).then(a.m.total_cmp(&b.m))
        })
}

pub const CSV_HEADER: &str = "experiment,level,dofs,h,m,rel_linf_error,newton_iters,converged,wall_time_s";

/// Writes the records as CSV. Wall times vary between runs, so the column
/// is left empty unless `timings` is set.
pub fn write_csv<W: Write>(mut w: W, records: &[ConvergenceRecord], timings: bool) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let err = r.rel_linf_error.map(|e| format!("{e:.5e}")).unwrap_or_default();
        let wall = if timings {
            format!("{:.3}", r.wall_time_s)
        } else {
            String::new()
        };
        writeln!(
            w,
            "{},{},{},{:.5e},{},{},{},{},{}",
            r.experiment, r.level, r.dofs, r.h, r.m, err, r.newton_iterations, r.converged, wall
        )?;
    }
    Ok(())
}

impl fmt::Display for ConvergenceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} level {} dofs {} h {:.4} m {}: ",
            self.experiment, self.level, self.dofs, self.h, self.m
        )?;
        match self.rel_linf_error {
            Some(e) => write!(f, "error {e:.3e}")?,
            None => write!(f, "no reference")?,
        }
        write!(f, ", {} Newton steps", self.newton_iterations)?;
        if !self.converged {
            write!(f, " (not converged)")?;
        }
        Ok(())
    }
}
