//! Python bindings: build a testcase, step it, and read diagnostics and
//! sampled fields back as plain Python values.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use slicefem::forms::{exner as exner_rs, Assembler, PhysicalConstants, State};
use slicefem::io::{sample_fields, SampleGrid};
use slicefem::solver::{SolverConfig, TimeStepper};
use slicefem::testcases::{compute_diagnostics, CaseName, Setup, TestcaseSpec};
use slicefem::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::InvalidMesh(_) | Error::TerrainOutOfRange { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Configuration of one benchmark run.
#[pyclass(module = "slicefem_py", name = "Testcase", skip_from_py_object)]
#[derive(Clone)]
struct PyTestcase {
    spec: TestcaseSpec,
}

#[pymethods]
impl PyTestcase {
    #[new]
    #[pyo3(signature = (name, ncols=None, nlayers=None, dt=None, t_end=None))]
    fn new(name: &str, ncols: Option<usize>, nlayers: Option<usize>, dt: Option<f64>, t_end: Option<f64>) -> PyResult<Self> {
        let mut spec = TestcaseSpec::new(name.parse::<CaseName>().map_err(to_py)?);
        if let Some(v) = ncols {
            spec.ncols = v;
        }
        if let Some(v) = nlayers {
            spec.nlayers = v;
        }
        if let Some(v) = dt {
            spec.dt = v;
        }
        if let Some(v) = t_end {
            spec.t_end = v;
        }
        spec.validate().map_err(to_py)?;
        Ok(PyTestcase { spec })
    }

    /// Density current with square cells of width `dx`.
    #[staticmethod]
    fn straka(dx: f64) -> PyResult<Self> {
        Ok(PyTestcase {
            spec: TestcaseSpec::straka(dx).map_err(to_py)?,
        })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.spec.name.as_str()
    }

    #[getter]
    fn ncols(&self) -> usize {
        self.spec.ncols
    }

    #[getter]
    fn nlayers(&self) -> usize {
        self.spec.nlayers
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.spec.dt
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.spec.t_end
    }

    #[getter]
    fn lx(&self) -> f64 {
        self.spec.lx
    }

    #[getter]
    fn height(&self) -> f64 {
        self.spec.height
    }

    #[getter]
    fn initial_wind(&self) -> f64 {
        self.spec.initial_wind
    }

    fn num_steps(&self) -> usize {
        self.spec.num_steps()
    }

    /// Orography height at `x`.
    fn surface_height(&self, x: f64) -> f64 {
        self.spec.orography.height(x)
    }

    fn __repr__(&self) -> String {
        format!(
            "Testcase('{}', ncols={}, nlayers={}, dt={}, t_end={})",
            self.spec.name, self.spec.ncols, self.spec.nlayers, self.spec.dt, self.spec.t_end
        )
    }
}

/// A balanced initial state and the stepper that advances it.
#[pyclass(module = "slicefem_py", name = "Simulation")]
struct PySimulation {
    setup: Setup,
    stepper: TimeStepper,
    x: Vec<f64>,
    step: usize,
    newton: Vec<usize>,
    gmres: Vec<usize>,
}

impl PySimulation {
    fn state(&self) -> PyResult<State> {
        State::from_vector(&self.setup.spaces, &self.x).map_err(to_py)
    }
}

#[pymethods]
impl PySimulation {
    #[new]
    #[pyo3(signature = (testcase, newton_tol=None, gmres_tol=None))]
    fn new(py: Python<'_>, testcase: &PyTestcase, newton_tol: Option<f64>, gmres_tol: Option<f64>) -> PyResult<Self> {
        let mut config = SolverConfig::default();
        if let Some(t) = newton_tol {
            config.newton_tol_abs = t;
        }
        if let Some(t) = gmres_tol {
            config.gmres_tol_rel = t;
        }
        let spec = testcase.spec.clone();
        let (setup, stepper) = py
            .detach(|| -> slicefem::Result<_> {
                let setup = spec.initialize()?;
                let asm = Assembler::new(setup.spaces.clone(), setup.params.clone())?;
                let stepper = TimeStepper::new(asm, config)?;
                Ok((setup, stepper))
            })
            .map_err(to_py)?;
        let x = setup.state.to_vector();
        Ok(PySimulation {
            setup,
            stepper,
            x,
            step: 0,
            newton: Vec::new(),
            gmres: Vec::new(),
        })
    }

    /// Advance `n` steps; returns `(newton_its, gmres_its)` for each.
    #[pyo3(signature = (n=1))]
    fn advance(&mut self, py: Python<'_>, n: usize) -> PyResult<Vec<(usize, usize)>> {
        let dt = self.setup.spec.dt;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (xn, st) = py.detach(|| self.stepper.step(&self.x, dt)).map_err(to_py)?;
            self.x = xn;
            self.step += 1;
            self.newton.push(st.newton_its);
            self.gmres.push(st.gmres_its);
            out.push((st.newton_its, st.gmres_its));
        }
        Ok(out)
    }

    #[getter]
    fn step(&self) -> usize {
        self.step
    }

    #[getter]
    fn time(&self) -> f64 {
        self.step as f64 * self.setup.spec.dt
    }

    #[getter]
    fn num_dofs(&self) -> usize {
        self.x.len()
    }

    /// Monolithic coefficient vector `(u | u_y | rho | theta)`.
    fn state_vector(&self) -> Vec<f64> {
        self.x.clone()
    }

    fn total_mass(&self) -> f64 {
        self.stepper.assembler.total_mass(&self.x)
    }

    /// Mean Newton and GMRES iterations per step so far.
    fn iteration_means(&self) -> (f64, f64) {
        let n = self.newton.len().max(1) as f64;
        (
            self.newton.iter().sum::<usize>() as f64 / n,
            self.gmres.iter().sum::<usize>() as f64 / n,
        )
    }

    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.state()?;
        let d = compute_diagnostics(&s, &self.setup.theta_b, &self.setup.spaces, self.setup.params.quad_degree);
        let out = PyDict::new(py);
        out.set_item("theta_perturbation_min", d.theta_perturbation_min)?;
        out.set_item("theta_perturbation_max", d.theta_perturbation_max)?;
        out.set_item("front_location", d.front_location)?;
        out.set_item("w_min", d.w_min)?;
        out.set_item("w_max", d.w_max)?;
        out.set_item("total_mass", d.total_mass)?;
        Ok(out)
    }

    /// Fields on a uniform `nx` by `nz` grid, x fastest.
    fn sample<'py>(&self, py: Python<'py>, nx: usize, nz: usize) -> PyResult<Bound<'py, PyDict>> {
        let s = self.state()?;
        let sp = &self.setup.spaces;
        let f = sample_fields(&s, &self.setup.theta_b, sp, &self.setup.params.constants, SampleGrid::covering(sp, nx, nz))
            .map_err(to_py)?;
        let out = PyDict::new(py);
        out.set_item("x", f.x)?;
        out.set_item("z", f.z)?;
        out.set_item("w", f.w)?;
        out.set_item("dtheta", f.dtheta)?;
        out.set_item("rho", f.rho)?;
        out.set_item("pi", f.pi)?;
        out.set_item("clamped", f.clamped)?;
        Ok(out)
    }
}

/// Names of the built-in testcases.
#[pyfunction]
fn list_cases() -> Vec<(&'static str, &'static str)> {
    CaseName::ALL.iter().map(|c| (c.as_str(), c.description())).collect()
}

/// Exner pressure for density and potential temperature, standard constants.
#[pyfunction]
fn exner(rho: f64, theta: f64) -> PyResult<f64> {
    Ok(exner_rs(rho, theta, &PhysicalConstants::standard()).map_err(to_py)?.0)
}

#[pymodule]
fn slicefem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTestcase>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(list_cases, m)?)?;
    m.add_function(wrap_pyfunction!(exner, m)?)?;
    Ok(())
}
