use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicefem::femspace::project::{project_scalar, project_velocity};
use slicefem::forms::{Assembler, ModelParams, PhysicalConstants, Spaces, State};
use slicefem::mesh::ExtrudedMesh;
use slicefem::solver::dense::DenseLu;
use slicefem::solver::{gmres, AsmPreconditioner, GmresConfig, Preconditioner, SolverConfig, TimeStepper};
use slicefem::testcases::{CaseName, Perturbation, Setup, TestcaseSpec};

fn small(name: CaseName, ncols: usize, nlayers: usize) -> TestcaseSpec {
    let mut s = TestcaseSpec::new(name);
    s.ncols = ncols;
    s.nlayers = nlayers;
    s
}

fn stepper(setup: &Setup) -> TimeStepper {
    let asm = Assembler::new(setup.spaces.clone(), setup.params.clone()).unwrap();
    TimeStepper::new(asm, SolverConfig::default()).unwrap()
}

fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn patches_cover_each_free_dof_once_or_twice() {
    for (name, nc) in [(CaseName::GwNh, 6), (CaseName::GwH, 5), (CaseName::Schar, 4)] {
        let setup = small(name, nc, 3).initialize().unwrap();
        let st = stepper(&setup);
        let pc = st.preconditioner_template();
        let mut count = vec![0usize; st.assembler.num_dofs()];
        for p in pc.patches() {
            for &d in &p.dof_indices {
                count[d] += 1;
            }
        }
        for (d, c) in count.iter().enumerate() {
            if st.assembler.is_constrained(d) {
                assert_eq!(*c, 0, "{name}: constrained dof {d} in a patch");
            } else {
                assert!((1..=2).contains(c), "{name}: dof {d} covered {c} times");
            }
        }
        assert_eq!(pc.uncovered(), st.assembler.constrained());
        assert_eq!(pc.patches().len(), nc);
    }
}

#[test]
fn schwarz_apply_is_linear() {
    for (name, nc, dt) in [(CaseName::GwNh, 30, 12.0), (CaseName::GwH, 150, 100.0)] {
        check_linearity(small(name, nc, 5).initialize().unwrap(), dt);
    }
}

fn check_linearity(setup: Setup, dt: f64) {
    let st = stepper(&setup);
    let x = setup.state.to_vector();
    let jac = st.assembler.jacobian(&x, &x, dt).unwrap();
    let mut pc: AsmPreconditioner = st.preconditioner_template().clone();
    pc.factor(&jac).unwrap();
    let n = x.len();
    let (r1, r2) = (random(n, 1), random(n, 2));
    let (a, b) = (0.7, -2.3);
    let mix: Vec<f64> = r1.iter().zip(&r2).map(|(p, q)| a * p + b * q).collect();
    let (mut z1, mut z2, mut zm) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    pc.apply(&r1, &mut z1);
    pc.apply(&r2, &mut z2);
    pc.apply(&mix, &mut zm);
    let scale = zm.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        assert!((zm[i] - (a * z1[i] + b * z2[i])).abs() <= 1e-12 * scale);
    }
}

struct ExactInverse(DenseLu);

impl Preconditioner for ExactInverse {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        self.0.solve(z);
    }
}

#[test]
fn gmres_with_exact_inverse_takes_one_iteration() {
    let setup = small(CaseName::GwNh, 4, 2).initialize().unwrap();
    let st = stepper(&setup);
    let x = setup.state.to_vector();
    let jac = st.assembler.jacobian(&x, &x, 12.0).unwrap();
    let n = x.len();
    let pc = ExactInverse(DenseLu::factor(n, jac.to_dense()).unwrap());
    let b = random(n, 5);
    let mut sol = vec![0.0; n];
    let stats = gmres(&jac, &b, &mut sol, &pc, &GmresConfig { tol_rel: 1e-10, ..Default::default() }).unwrap();
    assert_eq!(stats.iterations, 1);
    let r = jac.mul_vec(&sol);
    let err = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
}

#[test]
fn schwarz_solve_reduces_a_column_system_to_one_iteration() {
    // A single patch covering every free dof makes the preconditioner exact.
    let setup = small(CaseName::GwNh, 2, 3).initialize().unwrap();
    let st = stepper(&setup);
    let x = setup.state.to_vector();
    let jac = st.assembler.jacobian(&x, &x, 12.0).unwrap();
    let free: Vec<usize> = (0..x.len()).filter(|d| !st.assembler.is_constrained(*d)).collect();
    let patch = slicefem::solver::asm::make_patch(0, free, st.assembler.pattern());
    let mut pc = AsmPreconditioner::new(x.len(), vec![patch]);
    pc.factor(&jac).unwrap();
    let b = random(x.len(), 8);
    let mut sol = vec![0.0; x.len()];
    let stats = gmres(&jac, &b, &mut sol, &pc, &GmresConfig { tol_rel: 1e-6, ..Default::default() }).unwrap();
    assert!(stats.iterations <= 2, "{}", stats.iterations);
}

#[test]
fn rest_state_stays_at_rest() {
    let mut spec = small(CaseName::GwNh, 30, 5);
    spec.perturbation = Perturbation::None;
    spec.initial_wind = 0.0;
    let setup = spec.initialize().unwrap();
    let st = stepper(&setup);
    let mut x = setup.state.to_vector();
    let nu = setup.spaces.velocity.num_global();
    for _ in 0..10 {
        let (xn, stats) = st.step(&x, spec.dt).unwrap();
        assert!(stats.newton_its <= 1);
        x = xn;
    }
    let umax = x[..nu].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(umax <= 1e-6, "{umax}");
}

#[test]
fn steps_conserve_mass() {
    for name in [CaseName::GwNh, CaseName::Schar, CaseName::Straka] {
        let setup = small(name, 12, 4).initialize().unwrap();
        let st = stepper(&setup);
        let mut x = setup.state.to_vector();
        for _ in 0..3 {
            let m0 = st.assembler.total_mass(&x);
            let (xn, _) = st.step(&x, setup.spec.dt).unwrap();
            let m1 = st.assembler.total_mass(&xn);
            let tol = st.config.newton_tol_abs;
            assert!((m1 - m0).abs() <= 10.0 * tol * m0, "{name}: {}", (m1 - m0) / m0);
            x = xn;
        }
    }
}

#[test]
fn midpoint_rule_is_reversible() {
    // Without the background wind: with it, the backward solve has to undo
    // upwind dissipation and Newton stalls on upwind switches where w changes sign.
    let mut spec = small(CaseName::GwNh, 30, 5);
    spec.initial_wind = 0.0;
    let setup = spec.initialize().unwrap();
    let st = stepper(&setup);
    let x0 = setup.state.to_vector();
    let (x1, _) = st.step(&x0, 12.0).unwrap();
    let (back, _) = st.step(&x1, -12.0).unwrap();
    let diff: Vec<f64> = back.iter().zip(&x0).map(|(a, b)| a - b).collect();
    let moved: Vec<f64> = x1.iter().zip(&x0).map(|(a, b)| a - b).collect();
    let rms = |v: &[f64]| (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt();
    assert!(rms(&diff) <= 10.0 * st.config.newton_tol_abs, "{}", rms(&diff));
    assert!(rms(&moved) > 1e3 * rms(&diff));
}

#[test]
fn uniform_flow_without_gravity_is_steady() {
    let mesh = ExtrudedMesh::new(8, 4, 8000.0, 2000.0, -4000.0).unwrap();
    let spaces = Spaces::new(mesh, false);
    let m = &spaces.mesh;
    let state = State {
        u: project_velocity(|_, _| [12.0, 0.0], &spaces.velocity, m, 4, true).unwrap(),
        u_y: None,
        rho: project_scalar(|_, _| 1.1, &spaces.density, m, 4).unwrap(),
        theta: project_scalar(|_, _| 300.0, &spaces.theta, m, 4).unwrap(),
    };
    let mut params = ModelParams::new(PhysicalConstants::standard().with_gravity(0.0));
    params.nu = 50.0;
    params.theta_diffusivity = 50.0;
    let st = TimeStepper::new(Assembler::new(spaces.clone(), params).unwrap(), SolverConfig::default()).unwrap();
    let x0 = state.to_vector();
    let (x1, stats) = st.step(&x0, 30.0).unwrap();
    assert_eq!(stats.newton_its, 0);
    for (a, b) in x1.iter().zip(&x0) {
        assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
    }
}

#[test]
fn zero_time_step_is_rejected() {
    let setup = small(CaseName::GwNh, 4, 2).initialize().unwrap();
    let st = stepper(&setup);
    assert!(st.step(&setup.state.to_vector(), 0.0).is_err());
}
