use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use slicefem::solver::SolverConfig;
use slicefem::testcases::{BubbleDensity, CaseName, TestcaseSpec};

/// Run configuration. Every field except `case` is an optional override of
/// the testcase defaults; the same keys are accepted from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Option<String>,
    pub ncols: Option<usize>,
    pub nlayers: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    /// Write sampled fields every this many steps (0 = only at the end).
    pub output_every: Option<usize>,
    pub checkpoint_every: Option<usize>,
    pub newton_tol: Option<f64>,
    pub gmres_tol: Option<f64>,
    pub gmres_restart: Option<usize>,
    pub sample_nx: Option<usize>,
    pub sample_nz: Option<usize>,
    pub binary: Option<bool>,
    /// Drop the initial perturbation (rest-state style runs).
    pub no_perturbation: Option<bool>,
    pub initial_wind: Option<f64>,
    pub bubble_density: Option<BubbleDensity>,
    /// Continue from a checkpoint written by an earlier run of the same case.
    pub resume: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            case,
            ncols,
            nlayers,
            dt,
            t_end,
            threads,
            out_dir,
            output_every,
            checkpoint_every,
            newton_tol,
            gmres_tol,
            gmres_restart,
            sample_nx,
            sample_nz,
            binary,
            no_perturbation,
            initial_wind,
            bubble_density,
            resume
        )
    }

    pub fn case_name(&self) -> Result<CaseName> {
        let Some(name) = &self.case else {
            bail!("no testcase given (see `slicefem list-cases`)");
        };
        Ok(name.parse()?)
    }

    /// Testcase description with all overrides applied and validated.
    pub fn testcase(&self) -> Result<TestcaseSpec> {
        let mut spec = TestcaseSpec::new(self.case_name()?);
        if let Some(n) = self.ncols {
            spec.ncols = n;
        }
        if let Some(n) = self.nlayers {
            spec.nlayers = n;
        }
        if let Some(dt) = self.dt {
            spec.dt = dt;
        }
        if let Some(t) = self.t_end {
            spec.t_end = t;
        }
        if self.no_perturbation == Some(true) {
            spec.perturbation = slicefem::testcases::Perturbation::None;
        }
        if let Some(u) = self.initial_wind {
            spec.initial_wind = u;
        }
        if let Some(b) = self.bubble_density {
            spec.bubble_density = b;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let mut c = SolverConfig::default();
        if let Some(t) = self.newton_tol {
            c.newton_tol_abs = t;
        }
        if let Some(t) = self.gmres_tol {
            c.gmres_tol_rel = t;
        }
        if let Some(r) = self.gmres_restart {
            c.gmres_restart = r;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("output"))
    }
}
