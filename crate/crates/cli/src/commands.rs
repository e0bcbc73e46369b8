use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use monge_hjb::experiments::{
    best_m, catalog, find_experiment, level_mesh, rel_linf_error, run_study, write_csv, ExperimentSpec, Field,
    ProblemData, SolveSettings, Start, DEFAULT_N_THETA,
};
use monge_hjb::geometry::{build_domain, read_polygon, write_polygon, DomainSpec};
use monge_hjb::mesh::{generate_mesh, read_mesh, refine_uniform, write_mesh};
use monge_hjb::solver::NewtonConfig;
use monge_hjb::{Error, Mesh, Polygon};

use crate::args::{parse_levels, parse_list, DomainArgs, MeshArgs, SolveArgs, SolverArgs, StartArg, StudyArgs};

/// Coarse mesh size when neither the flag nor an experiment provides one.
const DEFAULT_H0: f64 = 0.25;

#[derive(Debug)]
pub enum Failure {
    /// Newton (or its linear solves) did not converge.
    Solver(String),
    /// Bad input, configuration or I/O.
    Input(String),
    /// Standard output was closed by the reader, e.g. `| head`.
    Closed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LinearSolve(_) => Failure::Solver(e.to_string()),
            Error::Io(io) => io.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::BrokenPipe => Failure::Closed,
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn domain_spec(args: &DomainArgs) -> Result<Option<DomainSpec>, Failure> {
    match &args.domain {
        None => Ok(None),
        Some(name) => {
            // accept both `--domain bent-square-convex --c 3` and `--domain bent-square-convex-c3`
            let spec = match args.c {
                Some(_) => DomainSpec::from_name(name, args.c)?,
                None => name.parse()?,
            };
            if args.c.is_some()
                && !matches!(
                    spec,
                    DomainSpec::BentSquareConvex { .. } | DomainSpec::BentSquareConcave { .. }
                )
            {
                return Err(input(format!("--c does not apply to domain {spec}")));
            }
            Ok(Some(spec))
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(input(format!("--{name} must be positive, got {v}")))
    }
}

fn newton_config(s: &SolverArgs) -> Result<NewtonConfig<f64>, Failure> {
    let cfg = NewtonConfig {
        step_tol: s.step_tol,
        max_iter: s.max_iter,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn domains() -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "domain families:")?;
    for name in DomainSpec::family_names() {
        let note = if name.starts_with("bent-square") {
            "  (needs --c > 1)"
        } else {
            ""
        };
        writeln!(out, "  {name}{note}")?;
    }
    writeln!(out, "experiments:")?;
    for spec in catalog() {
        let doms: Vec<String> = spec.domains.iter().map(|d| d.to_string()).collect();
        let ms: Vec<String> = spec.multipliers.iter().map(|m| m.to_string()).collect();
        writeln!(
            out,
            "  {:<22} domains {}; h0 {}; m {}",
            spec.name,
            doms.join(", "),
            spec.h0,
            ms.join(",")
        )?;
    }
    Ok(())
}

pub fn mesh(args: &MeshArgs) -> Result<(), Failure> {
    let h0 = positive("h0", args.domain.h0.unwrap_or(DEFAULT_H0))?;
    let poly: Polygon = match (&args.polygon, domain_spec(&args.domain)?) {
        (Some(path), None) => read_polygon(open(path)?, "file", h0)?,
        (None, Some(spec)) => build_domain(spec, h0)?,
        (Some(_), Some(_)) => return Err(input("give either --polygon or --domain, not both")),
        (None, None) => return Err(input("mesh needs --domain or --polygon")),
    };
    let mut mesh = generate_mesh(&poly, h0)?;
    for _ in 0..args.refine {
        mesh = refine_uniform(&mesh)?;
    }
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        write_mesh(&mesh, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.polygon_out {
        let mut w = create(path)?;
        write_polygon(&poly, &mut w)?;
        w.flush()?;
    }
    let mut out = io::stdout().lock();
    writeln!(out, "nodes {}", mesh.num_nodes())?;
    writeln!(out, "triangles {}", mesh.num_triangles())?;
    writeln!(out, "h {:.6e}", mesh.average_edge_length())?;
    writeln!(out, "area {:.12}", mesh.area())?;
    writeln!(out, "min_angle_deg {:.2}", mesh.min_angle_deg())?;
    Ok(())
}

/// Domain, data, coarse mesh size and default angle count of a solve.
fn solve_problem_setup(args: &SolveArgs) -> Result<(DomainSpec, ProblemData, f64, usize), Failure> {
    let dom = domain_spec(&args.domain)?;
    match &args.experiment {
        Some(name) => {
            let spec = find_experiment(name)?;
            let domain = match (dom, spec.domains.as_slice()) {
                (None, [only]) => *only,
                (None, _) => {
                    let list: Vec<String> = spec.domains.iter().map(|d| d.to_string()).collect();
                    return Err(input(format!(
                        "{name} has several domains; pick one with --domain ({})",
                        list.join(", ")
                    )));
                }
                (Some(d), list) if list.contains(&d) => d,
                (Some(d), _) => return Err(input(format!("domain {d} is not part of experiment {name}"))),
            };
            Ok((domain, spec.data, args.domain.h0.unwrap_or(spec.h0), spec.n_theta))
        }
        None => {
            let domain = dom.ok_or_else(|| input("solve needs --experiment or --domain"))?;
            let f = args.f_const.unwrap_or(0.0);
            if !(f >= 0.0 && f.is_finite()) {
                return Err(input(format!("--f-const must be non-negative, got {f}")));
            }
            let g = match &args.g_affine {
                None => Field::Const(0.0),
                Some(text) => match parse_list(text).map_err(input)?.as_slice() {
                    &[a, b, c] => Field::Affine { a, b, c },
                    _ => return Err(input("--g-affine takes three numbers a,b,c")),
                },
            };
            let data = ProblemData {
                f: Field::Const(f),
                g,
                reference: None,
            };
            Ok((domain, data, args.domain.h0.unwrap_or(DEFAULT_H0), DEFAULT_N_THETA))
        }
    }
}

pub fn write_solution<W: Write>(mut w: W, mesh: &Mesh, u: &[f64]) -> io::Result<()> {
    writeln!(w, "solution {}", mesh.num_nodes())?;
    for (p, v) in mesh.nodes().iter().zip(u) {
        writeln!(w, "{:e} {:e} {:e}", p.x, p.y, v)?;
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let (domain, data, h0, n_theta) = solve_problem_setup(args)?;
    let h0 = positive("h0", h0)?;
    if !(args.m >= 1.0 && args.m.is_finite()) {
        return Err(input(format!("--m must be at least 1, got {}", args.m)));
    }
    let poly: Polygon = build_domain(domain, h0)?;
    let mesh = match &args.mesh {
        Some(path) => {
            let mut mesh: Mesh = read_mesh(open(path)?)?;
            mesh.check_against(&poly)?;
            for _ in 0..args.refine {
                mesh = refine_uniform(&mesh)?;
            }
            mesh
        }
        None => level_mesh(&poly, h0, args.refine)?,
    };
    let settings = SolveSettings {
        m: args.m,
        n_theta: args.solver.ntheta.unwrap_or(n_theta),
        clip: args.solver.clip.into(),
        newton: newton_config(&args.solver)?,
        start: match args.start {
            StartArg::Frozen => Start::FrozenControl,
            StartArg::Zero => Start::ZeroInterior,
        },
    };
    if settings.n_theta == 0 {
        return Err(input("--ntheta must be positive"));
    }
    let sol = monge_hjb::experiments::solve_problem(&poly, &mesh, &data, &settings)?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        write_solution(&mut w, &mesh, &sol.u)?;
        w.flush()?;
    }
    let rep = &sol.report;
    let mut out = io::stdout().lock();
    writeln!(out, "domain {domain}")?;
    writeln!(out, "dofs {}", mesh.num_nodes())?;
    writeln!(out, "h {:.6e}", mesh.average_edge_length())?;
    writeln!(out, "m {}", settings.m)?;
    writeln!(out, "newton_iterations {}", rep.iterations)?;
    writeln!(
        out,
        "final_step_norm {:.3e}",
        rep.step_norms.last().copied().unwrap_or(0.0)
    )?;
    writeln!(out, "final_residual_norm {:.3e}", rep.final_residual_norm)?;
    writeln!(out, "converged {}", rep.converged)?;
    if let Some(r) = data.reference {
        let err = rel_linf_error(&mesh, &sol.u, r.solution, r.omega)?;
        writeln!(out, "rel_linf_error {err:.5e}")?;
    }
    if rep.converged {
        Ok(())
    } else {
        Err(Failure::Solver(format!(
            "Newton did not converge in {} iterations",
            rep.iterations
        )))
    }
}

fn study_spec(args: &StudyArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = find_experiment(&args.experiment)?;
    if let Some(l) = &args.levels {
        spec.levels = parse_levels(l).map_err(input)?;
    }
    if let Some(m) = &args.m {
        spec.multipliers = parse_list(m).map_err(input)?;
    }
    if let Some(h0) = args.h0 {
        spec.h0 = positive("h0", h0)?;
    }
    if let Some(d) = &args.domain {
        let d: DomainSpec = d.parse()?;
        if !spec.domains.contains(&d) {
            return Err(input(format!("domain {d} is not part of experiment {}", spec.name)));
        }
        spec.domains = vec![d];
    }
    if let Some(n) = args.solver.ntheta {
        spec.n_theta = n;
    }
    spec.newton = newton_config(&args.solver)?;
    spec.clip = args.solver.clip.into();
    spec.validate()?;
    Ok(spec)
}

pub fn study(args: &StudyArgs) -> Result<(), Failure> {
    let spec = study_spec(args)?;
    // labels depend on the catalog's domain count, not on a --domain filter
    let full = find_experiment(&args.experiment)?;
    let mut records = run_study(&spec)?;
    for r in &mut records {
        r.experiment = full.label(r.domain);
    }
    let mut out = io::stdout().lock();
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_csv(&mut w, &records, args.timings)?;
            w.flush()?;
            for d in &spec.domains {
                let label = full.label(*d);
                for &level in &spec.levels {
                    if let Some(b) = best_m(&records, &label, level) {
                        writeln!(out, "best {b}")?;
                    }
                }
            }
        }
        None => write_csv(&mut out, &records, args.timings)?,
    }
    let failed = records.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        return Err(Failure::Solver(format!("{failed} study cells did not converge")));
    }
    Ok(())
}
