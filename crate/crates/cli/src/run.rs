use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use slicefem::forms::{Assembler, State};
use slicefem::io::{read_checkpoint, sample_fields, write_binary, write_checkpoint, write_columnar, SampleGrid};
use slicefem::solver::TimeStepper;
use slicefem::testcases::{compute_diagnostics, Setup};

use crate::config::RunConfig;

pub const BUILD_ID: &str = env!("SLICEFEM_BUILD_ID");

/// One row of the diagnostics CSV.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    pub newton_its: usize,
    pub gmres_its: usize,
    pub gmres_failures: usize,
    pub final_residual: f64,
    pub mass: f64,
    pub mass_change: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub front_location: f64,
}

/// Totals reported at the end of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub case: String,
    pub steps: usize,
    pub wall_seconds: f64,
    pub newton_per_step: f64,
    pub gmres_per_step: f64,
    pub gmres_failures: usize,
    pub max_w: f64,
}

impl RunSummary {
    pub fn line(&self) -> String {
        format!(
            "{}: {} steps, {:.2} s wall, Newton its per step {:.3}, GMRES its per step {:.3}, GMRES failures {}, max |w| {:.4e} m/s",
            self.case,
            self.steps,
            self.wall_seconds,
            self.newton_per_step,
            self.gmres_per_step,
            self.gmres_failures,
            self.max_w
        )
    }
}

struct Outputs<'a> {
    dir: PathBuf,
    cfg: &'a RunConfig,
    setup: &'a Setup,
}

impl Outputs<'_> {
    fn metadata(&self, step: usize, time: f64) -> Vec<(&'static str, String)> {
        let s = &self.setup.spec;
        vec![
            ("testcase", s.name.to_string()),
            ("build", BUILD_ID.to_string()),
            ("resolution", format!("{} x {}", s.ncols, s.nlayers)),
            ("dt", format!("{}", s.dt)),
            ("step", step.to_string()),
            ("time", format!("{time}")),
        ]
    }

    fn fields(&self, state: &State, step: usize, time: f64) -> Result<()> {
        let sp = &self.setup.spaces;
        let nx = self.cfg.sample_nx.unwrap_or(4 * sp.mesh.ncols() + 1);
        let nz = self.cfg.sample_nz.unwrap_or(4 * sp.mesh.nlayers() + 1);
        let grid = SampleGrid::covering(sp, nx, nz);
        let f = sample_fields(state, &self.setup.theta_b, sp, &self.setup.params.constants, grid)?;
        if f.clamped > 0 {
            eprintln!(
                "warning: {} sample points lie outside the deformed domain and were clamped",
                f.clamped
            );
        }
        let path = self.dir.join(format!("fields_{step:06}.txt"));
        let w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        write_columnar(w, &f, &self.metadata(step, time))?;
        if self.cfg.binary == Some(true) {
            let path = self.dir.join(format!("fields_{step:06}.bin"));
            write_binary(BufWriter::new(File::create(&path)?), &f)?;
        }
        Ok(())
    }

    fn checkpoint(&self, name: &str, state: &State, step: usize, time: f64) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        write_checkpoint(&mut w, step, time, state)?;
        w.flush()?;
        Ok(path)
    }
}

/// Execute a configured run, writing outputs into the configured directory.
pub fn run(cfg: &RunConfig, quiet: bool) -> Result<RunSummary> {
    let start = Instant::now();
    let spec = cfg.testcase()?;
    let solver = cfg.solver()?;
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let setup = spec.initialize().context("initialising the testcase")?;
    let deg = setup.params.quad_degree;
    let out = Outputs {
        dir: dir.clone(),
        cfg,
        setup: &setup,
    };
    let assembler = Assembler::new(setup.spaces.clone(), setup.params.clone())?;
    let stepper = TimeStepper::new(assembler, solver)?;

    let nsteps = spec.num_steps();
    let (mut state, first) = match &cfg.resume {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            let c = read_checkpoint(std::io::BufReader::new(f), &setup.spaces)?;
            (c.state, c.step + 1)
        }
        None => (setup.state.clone(), 1),
    };
    let d0 = compute_diagnostics(&state, &setup.theta_b, &setup.spaces, deg);
    let mut prev_mass = d0.total_mass;
    let csv_path = dir.join("diagnostics.csv");
    let mut csv = if first > 1 && csv_path.exists() {
        let f = fs::OpenOptions::new().append(true).open(&csv_path)?;
        csv::WriterBuilder::new().has_headers(false).from_writer(f)
    } else {
        csv::WriterBuilder::new().from_writer(File::create(&csv_path)?)
    };
    if first == 1 {
        out.fields(&state, 0, 0.0)?;
    }

    let (mut newton, mut gmres, mut failures) = (0usize, 0usize, 0usize);
    let mut max_w = d0.w_max.abs().max(d0.w_min.abs());
    let output_every = cfg.output_every.unwrap_or(0);
    let checkpoint_every = cfg.checkpoint_every.unwrap_or(0);
    for step in first..=nsteps {
        let x = state.to_vector();
        let (xn, st) = match stepper.step(&x, spec.dt) {
            Ok(r) => r,
            Err(e) => {
                let t = (step - 1) as f64 * spec.dt;
                let p = out.checkpoint("checkpoint_last_good.bin", &state, step - 1, t)?;
                csv.flush()?;
                return Err(anyhow::Error::new(e).context(format!(
                    "step {step} failed; last good state saved to {}",
                    p.display()
                )));
            }
        };
        state = State::from_vector(&setup.spaces, &xn)?;
        let time = step as f64 * spec.dt;
        let d = compute_diagnostics(&state, &setup.theta_b, &setup.spaces, deg);
        newton += st.newton_its;
        gmres += st.gmres_its;
        failures += st.gmres_failures;
        max_w = max_w.max(d.w_max.abs()).max(d.w_min.abs());
        csv.serialize(DiagnosticsRow {
            step,
            time,
            newton_its: st.newton_its,
            gmres_its: st.gmres_its,
            gmres_failures: st.gmres_failures,
            final_residual: st.final_residual,
            mass: d.total_mass,
            mass_change: (d.total_mass - prev_mass) / prev_mass,
            theta_min: d.theta_perturbation_min,
            theta_max: d.theta_perturbation_max,
            w_min: d.w_min,
            w_max: d.w_max,
            front_location: d.front_location,
        })?;
        prev_mass = d.total_mass;
        if !quiet {
            println!(
                "step {step}/{nsteps} t = {time} s: Newton {} GMRES {} w [{:.3e}, {:.3e}]",
                st.newton_its, st.gmres_its, d.w_min, d.w_max
            );
        }
        if output_every > 0 && step % output_every == 0 && step != nsteps {
            out.fields(&state, step, time)?;
        }
        if checkpoint_every > 0 && step % checkpoint_every == 0 {
            out.checkpoint(&format!("checkpoint_{step:06}.bin"), &state, step, time)?;
        }
    }
    csv.flush()?;
    let t_end = nsteps as f64 * spec.dt;
    if nsteps >= first {
        out.fields(&state, nsteps, t_end)?;
    }
    out.checkpoint("checkpoint_final.bin", &state, nsteps, t_end)?;
    let taken = (nsteps + 1).saturating_sub(first);
    let per = |v: usize| if taken > 0 { v as f64 / taken as f64 } else { 0.0 };
    let summary = RunSummary {
        case: spec.name.to_string(),
        steps: taken,
        wall_seconds: start.elapsed().as_secs_f64(),
        newton_per_step: per(newton),
        gmres_per_step: per(gmres),
        gmres_failures: failures,
        max_w,
    };
    write_summary(&dir, &summary)?;
    Ok(summary)
}

fn write_summary(dir: &Path, s: &RunSummary) -> Result<()> {
    let mut f = File::create(dir.join("summary.txt"))?;
    writeln!(f, "{}", s.line())?;
    Ok(())
}
