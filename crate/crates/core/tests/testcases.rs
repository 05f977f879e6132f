use std::f64::consts::PI;

use slicefem::femspace::eval::velocity_at_point;
use slicefem::forms::{Assembler, PhysicalConstants};
use slicefem::solver::{SolverConfig, TimeStepper};
use slicefem::testcases::diagnostics::{front_location, perturbation_extrema};
use slicefem::testcases::{Absorbing, CaseName, Orography, Perturbation, Stratification, TestcaseSpec};

#[test]
fn named_cases_carry_the_published_constants() {
    let std = PhysicalConstants::standard();
    assert_eq!(
        (std.g, std.n, std.f, std.cp, std.r, std.p0),
        (9.810616, 1e-2, 1e-4, 1004.5, 287.0, 1e5)
    );
    // (name, columns, layers, dt, L, H, t_end, f, u0)
    let table = [
        (CaseName::GwNh, 150, 5, 12.0, 3e5, 1e4, 3000.0, 0.0, 20.0),
        (CaseName::GwH, 300, 10, 100.0, 6e6, 1e4, 60000.0, 1e-4, 20.0),
        (CaseName::MtnNh, 180, 70, 5.0, 144000.0, 35000.0, 9000.0, 0.0, 10.0),
        (CaseName::MtnH, 100, 60, 20.0, 240000.0, 50000.0, 15000.0, 1e-4, 20.0),
        (CaseName::Straka, 64, 8, 4.0, 51200.0, 6400.0, 900.0, 0.0, 0.0),
        (CaseName::Schar, 100, 50, 8.0, 1e5, 3e4, 18000.0, 0.0, 10.0),
    ];
    for (name, nc, nl, dt, lx, h, t_end, f, u0) in table {
        let s = TestcaseSpec::new(name);
        assert_eq!((s.ncols, s.nlayers, s.dt, s.lx, s.height, s.t_end), (nc, nl, dt, lx, h, t_end), "{name}");
        assert_eq!((s.constants.f, s.initial_wind), (f, u0), "{name}");
        assert_eq!(s.constants.g, std.g);
        s.validate().unwrap();
    }

    let gw = |n| TestcaseSpec::new(n).perturbation;
    assert_eq!(gw(CaseName::GwNh), Perturbation::GravityWave { dtheta0: 1e-2, a: 5e3 });
    assert_eq!(gw(CaseName::GwH), Perturbation::GravityWave { dtheta0: 1e-2, a: 1e5 });
    assert_eq!(TestcaseSpec::new(CaseName::GwH).balance_forcing, [0.0, -20.0 * 1e-4, 0.0]);

    let st = TestcaseSpec::new(CaseName::Straka);
    assert_eq!(
        st.perturbation,
        Perturbation::ColdBubble { amplitude: -15.0, x_c: 0.0, x_r: 4000.0, z_c: 3000.0, z_r: 2000.0 }
    );
    assert_eq!((st.nu, st.theta_diffusivity), (75.0, 75.0));
    assert_eq!(st.stratification, Stratification::Isentropic { theta0: 300.0 });

    let nh = TestcaseSpec::new(CaseName::MtnNh);
    assert_eq!(nh.orography, Orography::Agnesi { a: 1e4, h: 1.0 });
    assert_eq!(nh.absorbing, Some(Absorbing { z_b: 2.5e4, mu_bar_dt: 0.15 }));
    let h = TestcaseSpec::new(CaseName::MtnH);
    assert_eq!(h.orography, Orography::Agnesi { a: 1e3, h: 1.0 });
    assert_eq!(h.absorbing, Some(Absorbing { z_b: 3e4, mu_bar_dt: 0.3 }));
    assert_eq!(h.stratification, Stratification::Isothermal { t_surf: 250.0 });
    let sc = TestcaseSpec::new(CaseName::Schar);
    assert_eq!(sc.orography, Orography::Schar { h_m: 250.0, lambda: 4e3, a: 5e3 });
    assert_eq!(sc.absorbing.unwrap().z_b, 2e4);
}

#[test]
fn density_current_resolutions_follow_the_cell_width() {
    for (dx, nc, nl, dt) in [(800.0, 64, 8, 4.0), (400.0, 128, 16, 2.0), (200.0, 256, 32, 1.0), (100.0, 512, 64, 0.5)] {
        let s = TestcaseSpec::straka(dx).unwrap();
        assert_eq!((s.ncols, s.nlayers, s.dt), (nc, nl, dt));
    }
    assert!(TestcaseSpec::straka(300.0).is_err());
    assert_eq!(TestcaseSpec::new(CaseName::GwNh).num_steps(), 250);
    assert_eq!(TestcaseSpec::straka(400.0).unwrap().num_steps(), 450);
}

#[test]
fn profiles_match_their_closed_forms() {
    let c = PhysicalConstants::standard();
    let gw = TestcaseSpec::new(CaseName::GwNh);
    assert_eq!(gw.stratification.theta(0.0, &c), 300.0);
    assert!((gw.perturbation.delta_theta(0.0, 5000.0, 1e4) - 1e-2).abs() < 1e-15);
    assert!((gw.perturbation.delta_theta(5e3, 5000.0, 1e4) - 5e-3).abs() < 1e-15);
    let st = TestcaseSpec::new(CaseName::Straka).perturbation;
    assert_eq!(st.delta_t(0.0, 3000.0), -15.0);
    assert_eq!(st.delta_t(4000.0, 3000.0), 0.0);
    assert_eq!(st.delta_t(0.0, 500.0), 0.0);

    let agnesi = TestcaseSpec::new(CaseName::MtnNh).orography;
    assert_eq!(agnesi.height(0.0), 1.0);
    assert!((agnesi.height(1e4) - 0.5).abs() < 1e-15);

    let schar = TestcaseSpec::new(CaseName::Schar).orography;
    assert!((schar.height(0.0) - 250.0).abs() < 1e-12);
    assert!(schar.height(2000.0).abs() < 1e-12);
    for x in [-7300.0f64, 1234.5, 5000.0, 31000.0] {
        let direct = 250.0 * (-(x * x) / 25e6).exp() * (PI * x / 4000.0).cos().powi(2);
        assert!((schar.height(x) - direct).abs() <= 1e-12, "{x}");
    }
}

#[test]
fn sponge_rises_monotonically_to_its_amplitude() {
    for name in [CaseName::MtnNh, CaseName::MtnH, CaseName::Schar] {
        let spec = TestcaseSpec::new(name);
        let params = spec.model_params();
        let a = spec.absorbing.unwrap();
        let mu_bar = spec.mu_bar().unwrap();
        assert_eq!(params.mu(0.0), 0.0);
        assert_eq!(params.mu(a.z_b), 0.0);
        assert!((params.mu(spec.height) - mu_bar).abs() <= 1e-14 * mu_bar);
        let n = 2000;
        let mut prev = 0.0;
        for i in 1..=n {
            let z = a.z_b + (spec.height - a.z_b) * i as f64 / n as f64;
            let m = params.mu(z);
            assert!(m >= prev, "{name} not monotone at {z}");
            // Continuity: the largest step is bounded by the slope of the squared sine.
            assert!(m - prev <= mu_bar * PI / (2.0 * n as f64) + 1e-15);
            prev = m;
        }
        assert!(params.mu(a.z_b - 1.0) == 0.0 && params.mu(a.z_b + 1e-9) < 1e-20);
    }
}

#[test]
fn perturbation_diagnostics_on_known_states() {
    let setup = TestcaseSpec::new(CaseName::Straka).initialize().unwrap();
    let sp = &setup.spaces;
    let tb = &setup.theta_b;

    assert_eq!(perturbation_extrema(tb, tb), (0.0, 0.0));
    assert_eq!(front_location(tb, tb, sp), -25600.0);

    // One cold cell spanning [14400, 15200].
    let col = ((14400.0 + 25600.0) / 800.0) as usize;
    let cell = sp.mesh.cell_index(col, 2);
    assert_eq!((sp.mesh.line_x(col), sp.mesh.line_x(col + 1)), (14400.0, 15200.0));
    let mut th = tb.clone();
    for &d in sp.theta.cell_dofs(cell) {
        th.coefficients[d] -= 0.5;
    }
    assert_eq!(front_location(&th, tb, sp), 15200.0);
    assert_eq!(perturbation_extrema(&th, tb), (-0.5, 0.0));

    // The initial bubble: Π < 1 at the centre enlarges the anomaly beyond 15 K.
    let (lo, hi) = perturbation_extrema(&setup.state.theta, tb);
    let c = setup.spec.constants;
    let pi_c = 1.0 - c.g * 3000.0 / (c.cp * 300.0);
    assert!((-17.0..=-14.0).contains(&lo), "{lo}");
    assert!((lo + 15.0 / pi_c).abs() < 0.5, "{lo} vs {}", -15.0 / pi_c);
    // The L2 projection of the bubble overshoots slightly on its warm side.
    assert!(hi.abs() < 0.5, "{hi}");
}

#[test]
fn gravity_wave_without_wind_stays_symmetric() {
    let mut spec = TestcaseSpec::new(CaseName::GwNh);
    spec.ncols = 60;
    spec.initial_wind = 0.0;
    let setup = spec.initialize().unwrap();
    let asm = Assembler::new(setup.spaces.clone(), setup.params.clone()).unwrap();
    let st = TimeStepper::new(asm, SolverConfig::default()).unwrap();
    let (x1, _) = st.step(&setup.state.to_vector(), spec.dt).unwrap();
    let state = slicefem::forms::State::from_vector(&setup.spaces, &x1).unwrap();
    let (sp, m) = (&setup.spaces, &setup.spaces.mesh);
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for i in 0..=240 {
        let x = 1.5e5 * i as f64 / 241.0;
        for z in [1000.0, 3333.0, 5000.0, 8100.0] {
            let a = velocity_at_point(&state.u, &sp.velocity, m, x, z)[1];
            let b = velocity_at_point(&state.u, &sp.velocity, m, -x, z)[1];
            worst = worst.max((a - b).abs());
            largest = largest.max(a.abs());
        }
    }
    assert!(largest > 1e-6, "{largest}");
    assert!(worst <= 1e-8, "{worst}");
}
