//! Python bindings over the JSON problem description used by the command line.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use frozen_sl::cli::{self, Command, OutputFormat, RunConfig};
use frozen_sl::continuum::{char_fn, find_real_eigs};
use frozen_sl::finite::{char_value, eigs_finite, predicted_count};
use frozen_sl::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config { .. } | Error::InvalidProblem(_) | Error::InvalidTimeScale(_) | Error::NotInScale(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn output_format(name: &str) -> PyResult<OutputFormat> {
    match name {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        "text" => Ok(OutputFormat::Text),
        other => Err(PyValueError::new_err(format!("unknown output format {other:?}"))),
    }
}

/// A boundary value problem parsed from its JSON description.
#[pyclass(module = "frozen_sl_py", frozen)]
struct Problem {
    config: RunConfig,
}

#[pymethods]
impl Problem {
    #[new]
    fn new(config_json: &str) -> PyResult<Self> {
        Ok(Problem {
            config: cli::parse_config(config_json).map_err(py_err)?,
        })
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.config.spec.ts.is_finite()
    }

    /// `(eigenvalue, multiplicity)` pairs. Finite scales give the full
    /// spectrum; two-interval scales give the real eigenvalues in the
    /// configured scan range.
    fn eigenvalues(&self, py: Python<'_>) -> PyResult<Vec<(Complex64, usize)>> {
        let config = &self.config;
        let sp = py
            .detach(|| {
                if config.spec.ts.is_finite() {
                    eigs_finite(&config.spec, config.solver.tol, cli::arithmetic(config))
                } else {
                    find_real_eigs(
                        &config.spec,
                        cli::lambda_min(config),
                        cli::lambda_max(config),
                        config.solver.tol,
                    )
                    .map(|scan| scan.spectrum)
                }
            })
            .map_err(py_err)?;
        Ok(sp.eigenvalues.iter().map(|e| (e.value, e.multiplicity)).collect())
    }

    /// Characteristic function at `lam`.
    fn char_fn(&self, lam: Complex64) -> PyResult<Complex64> {
        let spec = &self.config.spec;
        if spec.ts.is_finite() {
            char_value(spec, lam).map_err(py_err)
        } else {
            char_fn(spec, lam).map_err(py_err)
        }
    }

    /// `(n - 2, exact)`: the eigenvalue count and whether it is attained.
    fn predicted_count(&self) -> PyResult<(usize, bool)> {
        let p = predicted_count(&self.config.spec, cli::arithmetic(&self.config)).map_err(py_err)?;
        Ok((p.count, p.exact))
    }

    /// Output of a command-line command, as the binary would print it.
    #[pyo3(signature = (command, output = "json"))]
    fn run(&self, py: Python<'_>, command: &str, output: &str) -> PyResult<String> {
        let command: Command = command.parse().map_err(PyValueError::new_err)?;
        let mut config = self.config.clone();
        config.output = output_format(output)?;
        let report = py.detach(|| cli::run(&config, command)).map_err(py_err)?;
        Ok(report.render(config.output))
    }
}

/// Run one command on a JSON problem description and return its JSON output.
#[pyfunction]
fn run(py: Python<'_>, command: &str, config_json: &str) -> PyResult<String> {
    Problem::new(config_json)?.run(py, command, "json")
}

#[pymodule]
fn frozen_sl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
