//! Acceptance criteria. Each test prints one PASS/FAIL line with the
//! measured numbers, then asserts.

use std::io::Write;
use std::time::Instant;

use monge_hjb::bellman::{hamiltonian_bruteforce, hamiltonian_exact, SymMatrix2};
use monge_hjb::experiments::{
    best_m, find_experiment, level_mesh, rel_linf_error, run_study, solve_problem, write_csv, ConvergenceRecord,
    ExperimentSpec, Omega, SolveSettings, Start,
};
use monge_hjb::geometry::{build_domain, Containment, DomainSpec};
use monge_hjb::operator::Endpoint;
use monge_hjb::{Mesh, Operator, Polygon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    // written to the raw handle so the line survives libtest's output capture
    let _ = writeln!(std::io::stderr(), "criterion {id:>2} [{verdict}] {name}: {detail}");
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn settings(spec: &ExperimentSpec, m: f64, start: Start) -> SolveSettings {
    SolveSettings {
        m,
        n_theta: spec.n_theta,
        clip: spec.clip,
        newton: spec.newton,
        start,
    }
}

fn problem(spec: &ExperimentSpec, domain: DomainSpec, level: usize) -> (Polygon, Mesh) {
    let poly = build_domain(domain, spec.h0).unwrap();
    let mesh = level_mesh(&poly, spec.h0, level).unwrap();
    (poly, mesh)
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
}

#[test]
fn criterion_01_hamiltonian_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_below = 0.0f64;
    let mut worst_above = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let a = SymMatrix2::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        let f = rng.random_range(0.0..5.0);
        let exact = hamiltonian_exact(a, f).unwrap();
        let brute = hamiltonian_bruteforce(a, f, 256, 4001).unwrap();
        worst_below = worst_below.max(exact - brute);
        worst_above = worst_above.max(brute - exact);
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = worst_below <= 5e-3 && worst_above <= 1e-12 && secs < 30.0;
    report(
        1,
        "brute-force Hamiltonian brackets the closed form",
        ok,
        &format!("max gap below {worst_below:.3e} (<= 5e-3), max excess {worst_above:.3e} (<= 1e-12), {secs:.1}s"),
    );
}

#[test]
fn criterion_02_zero_level_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a1, a2): (f64, f64) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
        let h = hamiltonian_exact(SymMatrix2::diag(a1, a2), 2.0 * (a1 * a2).sqrt()).unwrap();
        worst = worst.max(h.abs());
    }
    report(
        2,
        "H(diag(a1,a2), 2 sqrt(a1 a2)) = 0",
        worst <= 1e-12,
        &format!("max |H| {worst:.3e} (<= 1e-12)"),
    );
}

fn lshape_operator(level: usize, m: f64) -> (Mesh, Operator, Vec<f64>) {
    let spec = find_experiment("quartic-lshape").unwrap();
    let (poly, mesh) = problem(&spec, DomainSpec::LShape, level);
    let sol = solve_problem(
        &poly,
        &mesh,
        &spec.data,
        &SolveSettings {
            newton: monge_hjb::Newton {
                step_tol: 1.0,
                max_iter: 1,
            },
            ..settings(&spec, m, Start::ZeroInterior)
        },
    )
    .unwrap();
    let g: Vec<f64> = mesh.nodes().iter().map(|&p| spec.data.g.eval(p)).collect();
    (mesh, sol.operator, g)
}

fn random_state(op: &Operator, g: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut u = g.to_vec();
    for &i in op.stencils.interior_nodes() {
        u[i] += rng.random_range(-0.5..0.5);
    }
    u
}

#[test]
fn criterion_03_monotonicity() {
    let (mesh, op, g) = lshape_operator(1, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let rows = op.stencils.num_rows();
    let mut violations = 0;
    let mut worst_off = f64::NEG_INFINITY;
    let mut min_diag = f64::INFINITY;
    for _ in 0..200 {
        let u = random_state(&op, &g, &mut rng);
        let res = op.residual(&u).unwrap();
        let row = rng.random_range(0..rows);
        let node = op.stencils.interior_nodes()[row];
        // a neighbour that actually enters the row, or any other node half of the time
        let lin = op.jacobian(&u, &res.controls()).unwrap();
        let (cols, vals) = lin.matrix.row(row);
        let other = if rng.random_bool(0.5) && cols.len() > 1 {
            let c = cols[rng.random_range(0..cols.len())];
            op.stencils.interior_nodes()[c]
        } else {
            rng.random_range(0..mesh.num_nodes())
        };
        if other == node {
            continue;
        }
        let mut up = u.clone();
        up[other] += rng.random_range(0.01..1.0);
        let after = op.residual(&up).unwrap().values[row];
        let unorm = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let scale = 1.0 + res.values[row].abs() + unorm;
        if after > res.values[row] + 1e-12 * scale {
            violations += 1;
        }
        for (&c, &v) in cols.iter().zip(vals) {
            if c == row {
                min_diag = min_diag.min(v);
            } else {
                worst_off = worst_off.max(v);
            }
        }
    }
    let ok = violations == 0 && worst_off <= 1e-14 && min_diag > 0.0;
    report(
        3,
        "residual monotone, Jacobian has M-matrix signs",
        ok,
        &format!(
            "{violations} increases, max off-diagonal {worst_off:.3e} (<= 1e-14), min diagonal {min_diag:.3e} (> 0)"
        ),
    );
}

#[test]
fn criterion_04_jacobian_matches_finite_differences() {
    let (_, op, g) = lshape_operator(0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let eps = 1e-7;
    let (mut used, mut skipped) = (0, 0);
    let mut worst = 0.0f64;
    while used < 20 {
        let u = random_state(&op, &g, &mut rng);
        let r0 = op.residual(&u).unwrap();
        if r0.margin.iter().any(|&m| m < 1e-9) {
            skipped += 1;
            continue;
        }
        let lin = op.jacobian(&u, &r0.controls()).unwrap();
        let mut dir = vec![0.0; u.len()];
        for &i in op.stencils.interior_nodes() {
            dir[i] = rng.random_range(-1.0..1.0);
        }
        let up: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + eps * b).collect();
        let r1 = op.residual(&up).unwrap();
        let jd = lin.matrix.mul_vec(&op.interior_values(&dir));
        let fd: Vec<f64> = r1.values.iter().zip(&r0.values).map(|(a, b)| (a - b) / eps).collect();
        let diff = fd.iter().zip(&jd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = jd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(diff / scale);
        used += 1;
    }
    report(
        4,
        "Jacobian agrees with finite differences",
        worst <= 1e-5,
        &format!("worst relative mismatch {worst:.3e} (<= 1e-5) over {used} states, {skipped} near-tie states skipped"),
    );
}

fn study(name: &str, levels: &[usize], ms: &[f64]) -> (ExperimentSpec, Vec<ConvergenceRecord>) {
    let mut spec = find_experiment(name).unwrap();
    spec.levels = levels.to_vec();
    spec.multipliers = ms.to_vec();
    let recs = run_study(&spec).unwrap();
    (spec, recs)
}

#[test]
fn criterion_05_quartic_lshape_convergence() {
    let t0 = Instant::now();
    let (_, recs) = study("quartic-lshape", &[0, 1, 2, 3], &[2.0]);
    let secs = t0.elapsed().as_secs_f64();
    let target = [6.28e-2, 3.48e-2, 1.83e-2, 1.34e-2];
    let errs: Vec<f64> = recs.iter().map(|r| r.rel_linf_error.unwrap()).collect();
    let iters: Vec<usize> = recs.iter().map(|r| r.newton_iterations).collect();
    let within = errs.iter().zip(target).all(|(e, p)| *e >= p / 2.0 && *e <= p * 2.0);
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let iters_ok = recs.iter().all(|r| r.converged && r.newton_iterations <= 12);
    let ok = within && decreasing && iters_ok && secs < 120.0;
    report(
        5,
        "quartic L-shape errors, m = 2",
        ok,
        &format!(
            "errors [{}] vs [{}] (factor 2), strictly decreasing {decreasing}, Newton {iters:?} (<= 12), {secs:.1}s",
            sci(&errs),
            sci(&target)
        ),
    );
}

#[test]
fn criterion_06_boundary_layer_localisation() {
    let (_, recs) = study("bakelman-disc-square", &[3], &[16.0]);
    let r = &recs[0];
    let local = r.rel_linf_error.unwrap();
    let full = r.full_rel_linf_error.unwrap();
    let target = 4.5e-3;
    let ok = r.converged && local >= target / 3.0 && local <= target * 3.0 && full >= 5.0 * local;
    report(
        6,
        "disc-square error localised away from the bump",
        ok,
        &format!(
            "{} DoFs: L-inf(omega) {local:.3e} vs {target:.1e} (factor 3), L-inf(all) {full:.3e} (>= 5x), {} Newton",
            r.dofs, r.newton_iterations
        ),
    );
}

#[test]
fn criterion_07_nonconvex_lshape() {
    let (spec, recs) = study("nonconvex-lshape", &[1, 2, 3], &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
    let at16 = recs.iter().find(|r| r.level == 3 && r.m == 16.0).unwrap();
    let e16 = at16.rel_linf_error.unwrap();
    let target = 1.249e-3;
    let best: Vec<&ConvergenceRecord> = (1..=3).map(|l| best_m(&recs, &spec.name, l).unwrap()).collect();
    let best_err: Vec<f64> = best.iter().map(|r| r.rel_linf_error.unwrap()).collect();
    // the best cells reproduce the reference to rounding, so compare with a rounding allowance
    let monotone = best_err.windows(2).all(|w| w[1] <= w[0] + 1e-14);
    let ok = e16 >= target / 3.0 && e16 <= target * 3.0 && monotone && recs.iter().all(|r| r.converged);
    report(
        7,
        "non-convex data on the L-shape",
        ok,
        &format!(
            "level 3, m = 16: {e16:.3e} vs {target:.3e} (factor 3); best-m errors levels 1-3 [{}] at m {:?}, non-increasing {monotone}",
            sci(&best_err),
            best.iter().map(|r| r.m).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_08_heart_robustness() {
    let spec = find_experiment("heart").unwrap();
    let (poly, mesh) = problem(&spec, DomainSpec::Heart, 3);
    let sol = solve_problem(&poly, &mesh, &spec.data, &settings(&spec, 8.0, Start::FrozenControl)).unwrap();
    let rep = &sol.report;
    let last = *rep.step_norms.last().unwrap();
    let st = &sol.operator.stencils;
    let mut bad_segments = 0;
    let mut arms = 0;
    for (node, d, arm) in st.iter_arms(&sol.operator.dirs) {
        let x = mesh.nodes()[node];
        arms += 1;
        let inside = (1..=8).all(|s| poly.contains(x + d * (arm.length * s as f64 / 8.0)) != Containment::Exterior);
        let end_ok = match arm.endpoint {
            Endpoint::Boundary { point, .. } => poly.distance_to_boundary(point) <= 1e-10,
            Endpoint::Interior(_) => true,
        };
        if !inside || !end_ok {
            bad_segments += 1;
        }
    }
    let dofs_ok = (5_000..=20_000).contains(&mesh.num_nodes());
    let ok = rep.converged && last < 5e-8 && rep.iterations <= 25 && bad_segments == 0 && dofs_ok;
    report(
        8,
        "heart domain with cusp",
        ok,
        &format!(
            "{} DoFs, {} Newton (<= 25), last step {last:.2e}, {bad_segments} of {arms} arms leave the domain",
            mesh.num_nodes(),
            rep.iterations
        ),
    );
}

#[test]
fn criterion_09_bent_square_family() {
    let spec = find_experiment("bent-square").unwrap();
    let recs = run_study(&ExperimentSpec {
        levels: vec![3],
        ..spec.clone()
    })
    .unwrap();
    let mut lines = Vec::new();
    let mut all_ok = true;
    let mut iters = Vec::new();
    for d in &spec.domains {
        let label = spec.label(*d);
        let b = best_m(&recs, &label, 3).unwrap();
        let e = b.rel_linf_error.unwrap();
        all_ok &= e <= 1e-2 && b.converged;
        iters.push(b.newton_iterations);
        lines.push(format!(
            "{d}: {e:.3e} (m {}, {} DoFs, {} Newton)",
            b.m, b.dofs, b.newton_iterations
        ));
    }
    let convex_max = iters[..3].iter().max().unwrap();
    let concave_min = iters[4..].iter().min().unwrap();
    let trend = *concave_min + 2 >= *convex_max;
    report(
        9,
        "bent squares match x2^2 - 1 on (-3/4, 3/4)^2",
        all_ok,
        &format!(
            "errors (<= 1e-2): {}; concave Newton >= convex - 2: {trend} (recorded only)",
            lines.join("; ")
        ),
    );
}

fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

#[test]
fn criterion_10_uniqueness_and_bounds() {
    let mut worst_diff = 0.0f64;
    let mut worst_spread = 0.0f64;
    let mut notes = Vec::new();
    for name in [
        "quartic-lshape",
        "bakelman-disc-square",
        "nonconvex-lshape",
        "heart",
        "bent-square",
    ] {
        let spec = find_experiment(name).unwrap();
        for &domain in &spec.domains {
            let mut norms = Vec::new();
            for level in 0..=3 {
                let (poly, mesh) = problem(&spec, domain, level);
                for m in [2.0, 4.0, 8.0] {
                    let a = solve_problem(&poly, &mesh, &spec.data, &settings(&spec, m, Start::FrozenControl)).unwrap();
                    assert!(a.report.converged);
                    norms.push(sup_norm(&a.u));
                    if level <= 2 {
                        let b =
                            solve_problem(&poly, &mesh, &spec.data, &settings(&spec, m, Start::ZeroInterior)).unwrap();
                        assert!(b.report.converged);
                        let d = a.u.iter().zip(&b.u).fold(0.0f64, |x, (p, q)| x.max((p - q).abs()));
                        worst_diff = worst_diff.max(d);
                    }
                }
            }
            let hi = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
            let spread = (hi - lo) / hi;
            worst_spread = worst_spread.max(spread);
            notes.push(format!("{}: {spread:.3}", spec.label(domain)));
        }
    }
    let ok = worst_diff <= 1e-6 && worst_spread < 0.2;
    report(
        10,
        "unique discrete solution, mesh-independent bound",
        ok,
        &format!(
            "max difference between starts {worst_diff:.3e} (<= 1e-6); relative spread of max|u| (< 0.2): {}",
            notes.join(", ")
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let mut spec = find_experiment("nonconvex-lshape").unwrap();
    spec.levels = vec![0, 1, 2];
    spec.multipliers = vec![2.0, 8.0];
    let csv = |recs: &[ConvergenceRecord]| {
        let mut buf = Vec::new();
        write_csv(&mut buf, recs, false).unwrap();
        buf
    };
    let a = csv(&run_study(&spec).unwrap());
    let b = csv(&run_study(&spec).unwrap());
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = csv(&single.install(|| run_study(&spec)).unwrap());
    let ok = a == b && a == c;
    report(
        11,
        "study output is byte-identical across reruns",
        ok,
        &format!(
            "{} bytes; rerun identical {}, single-thread identical {}",
            a.len(),
            a == b,
            a == c
        ),
    );
}

#[test]
fn omega_subsets_have_nodes() {
    // guards the error measurements above against empty subdomains
    for (name, level) in [("bakelman-disc-square", 0), ("nonconvex-lshape", 0), ("bent-square", 0)] {
        let spec = find_experiment(name).unwrap();
        let r = spec.data.reference.unwrap();
        let (_, mesh) = problem(&spec, spec.domains[0], level);
        let zero = vec![0.0; mesh.num_nodes()];
        assert!(rel_linf_error(&mesh, &zero, r.solution, r.omega).is_ok());
        assert!(rel_linf_error(&mesh, &zero, r.solution, Omega::Everywhere).is_ok());
    }
}

#[test]
fn direction_count_sensitivity() {
    let mut spec = find_experiment("quartic-lshape").unwrap();
    let (poly, mesh) = problem(&spec, DomainSpec::LShape, 2);
    let r = spec.data.reference.unwrap();
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        spec.n_theta = n;
        let sol = solve_problem(&poly, &mesh, &spec.data, &settings(&spec, 2.0, Start::FrozenControl)).unwrap();
        assert!(sol.report.converged, "n_theta {n}");
        errs.push(rel_linf_error(&mesh, &sol.u, r.solution, r.omega).unwrap());
    }
    let _ = writeln!(
        std::io::stderr(),
        "n_theta 8, 16, 32 on quartic-lshape level 2, m = 2: errors [{}]",
        sci(&errs)
    );
    assert!(errs.iter().all(|e| e.is_finite() && *e < 1.0));
}
