//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Everything runs by default (roughly an hour on one core). Set
//! `SLICEFEM_ACCEPTANCE=1,5,7` to run a subset while developing.

use std::cell::RefCell;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicefem::balance::{balance_rho_newton, BoundarySide};
use slicefem::femspace::eval::{scalar_at, scalar_at_point, velocity_at};
use slicefem::femspace::project::{project_scalar, project_scalar_with, project_velocity};
use slicefem::femspace::{DofMap, Field, SpaceTag};
use slicefem::forms::{exner, Assembler, ModelParams, PhysicalConstants, Spaces, State};
use slicefem::mesh::{ExtrudedMesh, FacetKind};
use slicefem::solver::{AsmPreconditioner, Preconditioner, SolverConfig, TimeStepper};
use slicefem::testcases::diagnostics::w_extrema;
use slicefem::testcases::init::nodal_values;
use slicefem::testcases::{compute_diagnostics, CaseName, Perturbation, Setup, TestcaseSpec};

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, what: &str, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} [{id}] {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

/// Largest per-step relative mass change seen by any run.
struct MassLog {
    worst: f64,
    runs: Vec<String>,
}

thread_local! {
    static MASS: RefCell<MassLog> = const { RefCell::new(MassLog { worst: 0.0, runs: Vec::new() }) };
}

struct Run {
    setup: Setup,
    state: State,
    newton: Vec<usize>,
    gmres: Vec<usize>,
    max_abs_w: f64,
}

impl Run {
    fn mean_gmres(&self) -> f64 {
        self.gmres.iter().sum::<usize>() as f64 / self.gmres.len() as f64
    }
}

/// Step a testcase `steps` times, recording iteration counts, |w| and mass drift.
fn run(label: &str, spec: &TestcaseSpec, steps: usize) -> Run {
    let t0 = Instant::now();
    let setup = spec.initialize().expect("initialisation");
    let asm = Assembler::new(setup.spaces.clone(), setup.params.clone()).unwrap();
    let st = TimeStepper::new(asm, SolverConfig::default()).unwrap();
    let mut x = setup.state.to_vector();
    let mut mass = st.assembler.total_mass(&x);
    let (mut newton, mut gmres) = (Vec::new(), Vec::new());
    let mut worst_mass = 0.0f64;
    let (w0, w1) = w_extrema(&setup.state.u, &setup.spaces);
    let mut max_abs_w = w0.abs().max(w1.abs());
    for _ in 0..steps {
        let (xn, stats) = st.step(&x, spec.dt).unwrap_or_else(|e| panic!("{label}: {e}"));
        let m = st.assembler.total_mass(&xn);
        worst_mass = worst_mass.max(((m - mass) / mass).abs());
        mass = m;
        newton.push(stats.newton_its);
        gmres.push(stats.gmres_its);
        let s = State::from_vector(&setup.spaces, &xn).unwrap();
        let (lo, hi) = w_extrema(&s.u, &setup.spaces);
        max_abs_w = max_abs_w.max(lo.abs()).max(hi.abs());
        x = xn;
    }
    let state = State::from_vector(&setup.spaces, &x).unwrap();
    MASS.with(|l| {
        let mut l = l.borrow_mut();
        l.worst = l.worst.max(worst_mass);
        l.runs.push(format!("{label} {worst_mass:.2e}"));
    });
    println!(
        "  .. {label}: {steps} steps in {:.0} s, mean Newton {:.2}, mean GMRES {:.1}",
        t0.elapsed().as_secs_f64(),
        newton.iter().sum::<usize>() as f64 / steps.max(1) as f64,
        gmres.iter().sum::<usize>() as f64 / steps.max(1) as f64
    );
    Run {
        setup,
        state,
        newton,
        gmres,
        max_abs_w,
    }
}

fn criterion_1(r: &mut Report) {
    let mut spec = TestcaseSpec::new(CaseName::GwNh);
    spec.perturbation = Perturbation::None;
    spec.initial_wind = 0.0;
    let out = run("rest state 150x5", &spec, 100);
    r.line("1", out.max_abs_w <= 1e-6, "rest state stays at rest over 100 steps", format!("max |w| = {:.2e} m/s (limit 1e-6)", out.max_abs_w));
}

fn criterion_2(r: &mut Report) {
    let c = PhysicalConstants::standard();
    let mut errs = Vec::new();
    for nl in [32, 64] {
        let spaces = Spaces::new(ExtrudedMesh::new(2, nl, 2000.0, 6400.0, 0.0).unwrap(), false);
        let theta = project_scalar(|_, _| 300.0, &spaces.theta, &spaces.mesh, 6).unwrap();
        let b = balance_rho_newton(&spaces, &theta, 1.0, BoundarySide::Bottom, c).unwrap();
        let m = &spaces.mesh;
        let mut worst = 0.0f64;
        for cell in 0..m.num_cells() {
            for p in [[-1.0, -1.0], [0.0, -0.5], [1.0, 0.0], [0.3, 0.5], [0.0, 1.0]] {
                let g = m.corners(cell).geometry(p);
                let pi = exner(
                    scalar_at(&b.rho, &spaces.density, &g, cell, p).0,
                    scalar_at(&theta, &spaces.theta, &g, cell, p).0,
                    &c,
                )
                .unwrap()
                .0;
                let exact = 1.0 - c.g * g.point[1] / (c.cp * 300.0);
                worst = worst.max((pi - exact).abs() / exact);
            }
        }
        errs.push(worst);
    }
    let ratio = errs[0] / errs[1];
    r.line(
        "2",
        errs[1] <= 1e-5 && (ratio >= 3.6 || errs[1] < 1e-13),
        "isentropic balance matches the analytic Exner profile",
        format!("error 32 layers {:.2e}, 64 layers {:.2e} (limit 1e-5), ratio {ratio:.2} (limit 3.6)", errs[0], errs[1]),
    );
}

fn criterion_3(r: &mut Report) {
    MASS.with(|l| {
        let l = l.borrow();
        if l.runs.is_empty() {
            println!("SKIP [3] mass conservation: no runs were executed");
            return;
        }
        r.line(
            "3",
            l.worst <= 1e-8,
            "per-step relative mass change over every run",
            format!("worst {:.2e} (limit 1e-8) over {}", l.worst, l.runs.join(", ")),
        );
    });
}

fn criterion_4(r: &mut Report) {
    let setup = TestcaseSpec::new(CaseName::Straka).initialize().unwrap();
    let asm = Assembler::new(setup.spaces.clone(), setup.params.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let old = setup.state.to_vector();
    let sp = &setup.spaces;
    let mut new = old.clone();
    for (i, v) in new.iter_mut().enumerate() {
        *v += if i < sp.offset_rho() {
            rng.gen_range(-2.0..2.0)
        } else if i < sp.offset_theta() {
            *v * rng.gen_range(-1e-3..1e-3)
        } else {
            rng.gen_range(-0.5..0.5)
        };
    }
    for &d in asm.constrained() {
        new[d] = 0.0;
    }
    let dt = setup.spec.dt;
    let jac = asm.jacobian(&new, &old, dt).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut v: Vec<f64> = (0..new.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for &d in asm.constrained() {
            v[d] = 0.0;
        }
        let jv = jac.mul_vec(&v);
        let eps = 1e-6;
        let shifted = |s: f64| -> Vec<f64> { new.iter().zip(&v).map(|(a, b)| a + s * eps * b).collect() };
        let rp = asm.residual(&shifted(1.0), &old, dt).unwrap();
        let rm = asm.residual(&shifted(-1.0), &old, dt).unwrap();
        let err: f64 = rp
            .iter()
            .zip(&rm)
            .zip(&jv)
            .map(|((p, m), j)| ((p - m) / (2.0 * eps) - j).powi(2))
            .sum::<f64>()
            .sqrt();
        let nrm = jv.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(err / nrm);
    }
    r.line("4", worst <= 1e-6, "Jacobian matches central differences on a perturbed density-current state", format!("worst relative error {worst:.2e} over 10 directions (limit 1e-6)"));
}

/// Right edge of the rightmost cell with a nodal perturbation below `level`.
fn contour_front(theta: &Field, theta_b: &Field, spaces: &Spaces, level: f64) -> f64 {
    let m = &spaces.mesh;
    let mut front = m.x_offset();
    for cell in 0..m.num_cells() {
        let a = nodal_values(theta, spaces, cell);
        let b = nodal_values(theta_b, spaces, cell);
        if a.iter().zip(&b).any(|(x, y)| x - y < level) {
            front = front.max(m.line_x(m.cell_position(cell).0 + 1));
        }
    }
    front
}

fn criterion_5(r: &mut Report) {
    for (dx, front_ref, min_ref) in [(800.0, 14800.0, -11.64), (400.0, 15000.0, -13.46)] {
        let spec = TestcaseSpec::straka(dx).unwrap();
        let out = run(&format!("density current {dx} m"), &spec, spec.num_steps());
        let d = compute_diagnostics(&out.state, &out.setup.theta_b, &out.setup.spaces, out.setup.params.quad_degree);
        let front_ok = (d.front_location - front_ref).abs() <= 800.0;
        let min_ok = (d.theta_perturbation_min - min_ref).abs() <= 1.5;
        let one_kelvin = contour_front(&out.state.theta, &out.setup.theta_b, &out.setup.spaces, -1.0);
        r.line(
            &format!("5/{dx}m"),
            front_ok && min_ok,
            &format!("density current at {dx} m after 15 min"),
            format!(
                "front {:.0} m (expected {front_ref} +- 800, {}), dtheta min {:.2} K (expected {min_ref} +- 1.5, {}); front of the -1 K contour {one_kelvin:.0} m, dtheta max {:.3} K",
                d.front_location,
                if front_ok { "ok" } else { "out of range" },
                d.theta_perturbation_min,
                if min_ok { "ok" } else { "out of range" },
                d.theta_perturbation_max
            ),
        );
    }
}

/// Shared by criteria 6 and 7a/b.
fn gravity_wave_run() -> Run {
    let spec = TestcaseSpec::new(CaseName::GwNh);
    run("gravity wave 150x5", &spec, spec.num_steps())
}

fn criterion_6(r: &mut Report, gw: &Run) {
    let (lo, hi) = w_extrema(&gw.state.u, &gw.setup.spaces);
    let wmax = lo.abs().max(hi.abs());
    // Largest |w| at cell centres beyond 50 km from the origin, on either side.
    let sp = &gw.setup.spaces;
    let (mut left, mut right) = (0.0f64, 0.0f64);
    for cell in 0..sp.mesh.num_cells() {
        let g = sp.mesh.corners(cell).geometry([0.0, 0.0]);
        let w = velocity_at(&gw.state.u, &sp.velocity, &g, cell, [0.0, 0.0]).0[1].abs();
        if g.point[0] > 5e4 {
            right = right.max(w);
        } else if g.point[0] < -5e4 {
            left = left.max(w);
        }
    }
    let far = 5e-5;
    r.line(
        "6",
        (1.5e-3..=1e-2).contains(&wmax) && left > far && right > far,
        "gravity wave at 3000 s has the right amplitude and spreads both ways",
        format!("|w|max {wmax:.3e} m/s (range [1.5e-3, 1e-2]); |w| beyond x < -50 km {left:.2e}, beyond x > 50 km {right:.2e} (need > {far:.0e})"),
    );
}

fn criterion_7ab(r: &mut Report, gw: &Run) {
    let worst_newton = gw.newton[1..].iter().copied().max().unwrap_or(0);
    r.line("7a", worst_newton <= 4, "Newton iterations per step on the gravity wave after step 1", format!("max {worst_newton} (limit 4), first step {}", gw.newton[0]));
    let mean = gw.mean_gmres();
    r.line("7b", (15.0..=60.0).contains(&mean), "mean GMRES iterations per step on the gravity wave", format!("{mean:.2} (range [15, 60])"));
}

fn criterion_7c(r: &mut Report) {
    let mut means = Vec::new();
    for dt in [8.0, 40.0] {
        let mut spec = TestcaseSpec::new(CaseName::Schar);
        spec.dt = dt;
        means.push(run(&format!("Schar dt {dt}"), &spec, 50).mean_gmres());
    }
    let ratio = means[1] / means[0];
    r.line(
        "7c",
        (3.5..=7.5).contains(&ratio),
        "Schar GMRES growth from dt 8 s to 40 s over 50 steps",
        format!("mean {:.1} and {:.1}, ratio {ratio:.2} (range [3.5, 7.5])", means[0], means[1]),
    );
}

fn criterion_7d(r: &mut Report, gw: &Run) {
    let mut spec = TestcaseSpec::new(CaseName::GwNh);
    spec.ncols = 75;
    spec.dt = 24.0;
    let coarse = run("gravity wave 75x5 dt 24", &spec, spec.num_steps()).mean_gmres();
    let fine = gw.mean_gmres();
    let rel = (coarse - fine).abs() / fine;
    r.line("7d", rel < 0.2, "GMRES counts at fixed Courant number are mesh independent", format!("75x5 {coarse:.2}, 150x5 {fine:.2}, difference {:.1}% (limit 20%)", 100.0 * rel));
}

/// L2 norm of the difference of two theta fields on a shared sampling grid.
fn theta_l2_diff(a: &Run, b: &Run) -> f64 {
    let (sa, sb) = (&a.setup.spaces, &b.setup.spaces);
    let (lx, h, x0) = (sa.mesh.lx(), sa.mesh.height(), sa.mesh.x_offset());
    let (nx, nz) = (2400, 80);
    let (dx, dz) = (lx / nx as f64, h / nz as f64);
    let mut sum = 0.0;
    for i in 0..nx {
        for k in 0..nz {
            let (x, z) = (x0 + (i as f64 + 0.5) * dx, (k as f64 + 0.5) * dz);
            let d = scalar_at_point(&a.state.theta, &sa.theta, &sa.mesh, x, z) - scalar_at_point(&b.state.theta, &sb.theta, &sb.mesh, x, z);
            sum += d * d * dx * dz;
        }
    }
    sum.sqrt()
}

fn criterion_8(r: &mut Report) {
    // The unbalanced initial state launches acoustic waves; steps near the
    // operational 12 s leave them unresolved in time and the measured order
    // then reflects that rather than the spatial discretisation.
    let runs: Vec<Run> = [(75, 2.0), (150, 1.0), (300, 0.5)]
        .into_iter()
        .map(|(nc, dt)| {
            let mut spec = TestcaseSpec::new(CaseName::GwNh);
            spec.ncols = nc;
            spec.dt = dt;
            spec.t_end = 300.0;
            run(&format!("convergence {nc}x5 dt {dt}"), &spec, spec.num_steps())
        })
        .collect();
    let e_coarse = theta_l2_diff(&runs[0], &runs[2]);
    let e_mid = theta_l2_diff(&runs[1], &runs[2]);
    let d_coarse = theta_l2_diff(&runs[0], &runs[1]);
    let against_finest = (e_coarse / e_mid).log2();
    // Differences of successive solutions cancel the unknown exact solution.
    let three_grid = (d_coarse / e_mid).log2();
    r.line(
        "8",
        against_finest >= 1.8,
        "theta converges at second order on the gravity wave",
        format!(
            "L2 errors vs 300 columns {e_coarse:.3e}, {e_mid:.3e}, order {against_finest:.2} (limit 1.8); three-grid estimate {three_grid:.2}"
        ),
    );
}

fn hilly(ncols: usize, nlayers: usize, h: f64) -> ExtrudedMesh {
    ExtrudedMesh::new(ncols, nlayers, 6000.0, 3000.0, -3000.0)
        .unwrap()
        .apply_terrain(|x| h * (-(x / 1500.0).powi(2)).exp())
        .unwrap()
}

fn random_field(dm: &DofMap, rng: &mut ChaCha8Rng) -> Field {
    Field::from_coefficients(dm, (0..dm.num_global()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn facet_point(f: usize, t: f64) -> [f64; 2] {
    match f {
        0 => [-1.0, t],
        1 => [1.0, t],
        2 => [t, -1.0],
        _ => [t, 1.0],
    }
}

/// Largest jump of the RT1 normal component and of theta over horizontal facets.
fn continuity_jumps(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mesh = hilly(4, 3, rng.gen_range(0.0..600.0));
    let vm = DofMap::new(SpaceTag::VelocityRt1, &mesh);
    let tm = DofMap::new(SpaceTag::ThetaSpace, &mesh);
    let (u, th) = (random_field(&vm, rng), random_field(&tm, rng));
    let (mut du, mut dth) = (0.0f64, 0.0f64);
    for f in mesh.facets().iter().filter(|f| f.is_interior()) {
        let minus = f.minus_cell.unwrap();
        for t in [-0.8, 0.1, 0.7] {
            let (xp, xm) = (facet_point(f.local_facet_ids[0], t), facet_point(f.local_facet_ids[1], t));
            let (gp, gm) = (mesh.corners(f.plus_cell).geometry(xp), mesh.corners(minus).geometry(xm));
            let (up, um) = (velocity_at(&u, &vm, &gp, f.plus_cell, xp).0, velocity_at(&u, &vm, &gm, minus, xm).0);
            du = du.max(((up[0] - um[0]) * f.normal[0] + (up[1] - um[1]) * f.normal[1]).abs());
            if f.kind == FacetKind::InteriorHorizontal {
                dth = dth.max((scalar_at(&th, &tm, &gp, f.plus_cell, xp).0 - scalar_at(&th, &tm, &gm, minus, xm).0).abs());
            }
        }
    }
    (du, dth)
}

/// Change in the theta residual rows when the edge-stabilisation constant is
/// multiplied by 16, relative to their size, on a flat mesh.
fn stabilisation_change(theta: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    let spaces = Spaces::new(ExtrudedMesh::new(6, 4, 6000.0, 2000.0, -3000.0).unwrap(), false);
    let m = &spaces.mesh;
    let s = State {
        u: project_velocity(|x, z| [8.0 + 1e-4 * z, 0.3 * (x / 2000.0).sin()], &spaces.velocity, m, 6, true).unwrap(),
        u_y: None,
        rho: project_scalar(|_, z| 1.1 - 5e-5 * z, &spaces.density, m, 6).unwrap(),
        theta: project_scalar(theta, &spaces.theta, m, 6).unwrap(),
    };
    let x = s.to_vector();
    let rows = |c0: f64| {
        let mut p = ModelParams::new(PhysicalConstants::standard());
        p.c0 = c0;
        let r = Assembler::new(spaces.clone(), p).unwrap().residual(&x, &x, 10.0).unwrap();
        r[spaces.offset_theta()..].to_vec()
    };
    let c0 = ModelParams::new(PhysicalConstants::standard()).c0;
    let (a, b) = (rows(c0), rows(16.0 * c0));
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(&b).fold(0.0f64, |s, (p, q)| s.max((p - q).abs())) / scale
}

/// Cover multiplicity range and worst linearity defect of the column preconditioner.
fn patch_properties() -> ((usize, usize), f64) {
    let mut spec = TestcaseSpec::new(CaseName::GwNh);
    spec.ncols = 30;
    let setup = spec.initialize().unwrap();
    let asm = Assembler::new(setup.spaces.clone(), setup.params.clone()).unwrap();
    let st = TimeStepper::new(asm, SolverConfig::default()).unwrap();
    let n = st.assembler.num_dofs();
    let mut count = vec![0usize; n];
    for p in st.preconditioner_template().patches() {
        for &d in &p.dof_indices {
            count[d] += 1;
        }
    }
    let free: Vec<usize> = (0..n).filter(|d| !st.assembler.is_constrained(*d)).map(|d| count[d]).collect();
    let range = (*free.iter().min().unwrap(), *free.iter().max().unwrap());
    let x = setup.state.to_vector();
    let mut pc: AsmPreconditioner = st.preconditioner_template().clone();
    pc.factor(&st.assembler.jacobian(&x, &x, spec.dt).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (r1, r2): (Vec<f64>, Vec<f64>) = (0..n).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unzip();
    let mix: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| 0.7 * a - 2.3 * b).collect();
    let (mut z1, mut z2, mut zm) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    pc.apply(&r1, &mut z1);
    pc.apply(&r2, &mut z2);
    pc.apply(&mix, &mut zm);
    let scale = zm.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let defect = (0..n).map(|i| (zm[i] - 0.7 * z1[i] + 2.3 * z2[i]).abs()).fold(0.0, f64::max) / scale;
    (range, defect)
}

fn projection_idempotence(rng: &mut ChaCha8Rng) -> f64 {
    let mesh = hilly(3, 3, rng.gen_range(0.0..600.0));
    let mut worst = 0.0f64;
    for tag in [SpaceTag::ThetaSpace, SpaceTag::DensityDgq1] {
        let dm = DofMap::new(tag, &mesh);
        let f = random_field(&dm, rng);
        let g = project_scalar_with(|c, xi, _| scalar_at(&f, &dm, &mesh.corners(c).geometry(xi), c, xi).0, &dm, &mesh, 6).unwrap();
        for (a, b) in f.coefficients.iter().zip(&g.coefficients) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

fn criterion_9(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut du, mut dth, mut proj) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..8 {
        let (a, b) = continuity_jumps(&mut rng);
        du = du.max(a);
        dth = dth.max(b);
        proj = proj.max(projection_idempotence(&mut rng));
    }
    r.line("9a", du <= 1e-10, "RT1 normal components are continuous on terrain meshes", format!("largest jump {du:.1e} over 8 random fields (limit 1e-10)"));
    r.line("9b", dth <= 1e-10, "theta is continuous across horizontal facets", format!("largest jump {dth:.1e} (limit 1e-10)"));
    let affine = |x: f64, z: f64| 290.0 + 2e-4 * x + 4e-3 * z;
    let stab = stabilisation_change(affine);
    let curved = stabilisation_change(move |x, z| affine(x, z) + 1e-8 * x * x);
    r.line(
        "9c",
        stab <= 1e-9,
        "edge stabilisation vanishes on affine theta",
        format!("relative change of theta rows with 16x the constant {stab:.1e} (limit 1e-9, round-off); {curved:.1e} with a quadratic term"),
    );
    let (range, defect) = patch_properties();
    r.line(
        "9d",
        range.0 >= 1 && range.1 <= 2 && defect <= 1e-12,
        "column patches cover each free dof once or twice and apply linearly",
        format!("multiplicity {}..{}, linearity defect {defect:.1e} (limit 1e-12)", range.0, range.1),
    );
    r.line("9e", proj <= 1e-10, "projection onto the scalar spaces is idempotent", format!("largest coefficient change {proj:.1e} (limit 1e-10)"));
}

fn main() {
    let selected: Option<Vec<String>> = std::env::var("SLICEFEM_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect());
    let want = |id: &str| selected.as_ref().is_none_or(|s| s.iter().any(|t| t == id));
    let start = Instant::now();
    let mut r = Report { failures: 0 };

    if want("2") {
        criterion_2(&mut r);
    }
    if want("4") {
        criterion_4(&mut r);
    }
    if want("9") {
        criterion_9(&mut r);
    }
    if want("1") {
        criterion_1(&mut r);
    }
    if want("6") || want("7") {
        let gw = gravity_wave_run();
        if want("6") {
            criterion_6(&mut r, &gw);
        }
        if want("7") {
            criterion_7ab(&mut r, &gw);
            criterion_7d(&mut r, &gw);
            criterion_7c(&mut r);
        }
    }
    if want("8") {
        criterion_8(&mut r);
    }
    if want("5") {
        criterion_5(&mut r);
    }
    if want("3") {
        criterion_3(&mut r);
    }
    println!(
        "acceptance: {} failing line(s), {:.0} s total",
        r.failures,
        start.elapsed().as_secs_f64()
    );
}
