//! Python bindings for the random-matrix laboratory.
//!
//! Ensembles are described with the same mini-grammar as the CLI config
//! files, so a cell block like `ensemble = band\ndist = rademacher\n...`
//! works identically from Python and from `rmtlab run --config`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rmtlab::curie_weiss::{self, CwParams};
use rmtlab::ensembles;
use rmtlab::harness;
use rmtlab::laws::{self, MixtureSc};
use rmtlab::moments;
use rmtlab::sampling::{derive_stream, ScalarDist};
use rmtlab::spectra::{self, Esd};
use rmtlab::Error;

fn pyerr(err: Error) -> PyErr {
    match err {
        Error::Config(_) | Error::Domain(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse_dist(name: &str) -> PyResult<ScalarDist> {
    let d = match name {
        "rademacher" => ScalarDist::Rademacher,
        "gaussian" => ScalarDist::StdGaussian,
        other => match other.strip_prefix("two-point:") {
            Some(t) => ScalarDist::TwoPoint(
                t.parse()
                    .map_err(|_| PyValueError::new_err(format!("bad bias '{t}'")))?,
            ),
            None => {
                return Err(PyValueError::new_err(format!(
                    "unknown distribution '{name}'"
                )))
            }
        },
    };
    d.validate().map_err(pyerr)?;
    Ok(d)
}

/// Exact Catalan number C_l.
#[pyfunction]
fn catalan(l: u32) -> u128 {
    moments::catalan(l)
}

/// Classify an index tuple by its closed-walk multigraph.
#[pyfunction]
fn classify(py: Python<'_>, walk: Vec<usize>) -> PyResult<Py<pyo3::types::PyDict>> {
    if walk.is_empty() || walk.len() > moments::MAX_WALK {
        return Err(PyValueError::new_err("walk length must lie in 1..=16"));
    }
    let c = moments::classify(&walk);
    let d = pyo3::types::PyDict::new(py);
    d.set_item("distinct_vertices", c.distinct_vertices)?;
    d.set_item("single_edges", c.single_edges)?;
    d.set_item("all_double", c.all_double)?;
    d.set_item("in_ik", c.in_ik)?;
    Ok(d.into())
}

/// Exhaustive count of tree-like tuples, and its closed form.
#[pyfunction]
fn count_ik(n: usize, k: usize) -> PyResult<u64> {
    moments::count_ik(n, k).map_err(pyerr)
}

#[pyfunction]
fn count_ik_closed_form(n: usize, k: usize) -> u128 {
    moments::count_ik_closed_form(n, k)
}

/// Exact finite-N expected trace moment. Models: `iid:<dist>`,
/// `full-cw:<beta>`, `spin:<w>:<tau>,...`, `toeplitz:<dist>`,
/// `band:<dist>:<half_width>[:periodic]`.
#[pyfunction]
fn expected_trace_moment(model: &str, n: usize, k: usize) -> PyResult<f64> {
    let model = if let Some(d) = model.strip_prefix("iid:") {
        moments::CorrelationModel::IidCentered(parse_dist(d)?)
    } else if let Some(b) = model.strip_prefix("full-cw:") {
        moments::CorrelationModel::FullCw {
            beta: b
                .parse()
                .map_err(|_| PyValueError::new_err(format!("bad beta '{b}'")))?,
        }
    } else if let Some(atoms) = model.strip_prefix("spin:") {
        let atoms = atoms
            .split(',')
            .map(|pair| {
                let (w, t) = pair
                    .split_once(':')
                    .ok_or_else(|| PyValueError::new_err("atoms look like w:tau,w:tau"))?;
                Ok((
                    w.trim().parse().map_err(|_| PyValueError::new_err("bad weight"))?,
                    t.trim().parse().map_err(|_| PyValueError::new_err("bad bias"))?,
                ))
            })
            .collect::<PyResult<Vec<(f64, f64)>>>()?;
        moments::CorrelationModel::ExchangeableSpin { atoms }
    } else if let Some(d) = model.strip_prefix("toeplitz:") {
        moments::CorrelationModel::ToeplitzDiagonal(parse_dist(d)?)
    } else if let Some(rest) = model.strip_prefix("band:") {
        let mut parts = rest.split(':');
        let dist = parse_dist(parts.next().unwrap_or(""))?;
        let half_width: usize = parts
            .next()
            .and_then(|b| b.parse().ok())
            .ok_or_else(|| PyValueError::new_err("band model needs a half-width"))?;
        let periodic = matches!(parts.next(), Some("periodic") | Some("true"));
        moments::CorrelationModel::BandedIid {
            dist,
            half_width,
            periodic,
        }
    } else {
        return Err(PyValueError::new_err(format!("unknown model '{model}'")));
    };
    moments::expected_trace_moment(&model, n, k).map_err(pyerr)
}

/// Positive root of tanh(beta m) = m (0 for beta <= 1).
#[pyfunction]
fn solve_m(beta: f64) -> f64 {
    curie_weiss::solve_m(beta)
}

/// Limiting bulk variance 1 - m(beta)^2.
#[pyfunction]
fn cw_variance(beta: f64) -> f64 {
    laws::cw_variance(beta)
}

/// Exact magnetization distribution: (total spins, probabilities).
#[pyfunction]
fn magnetization_pmf(beta: f64, spins: usize) -> PyResult<(Vec<i64>, Vec<f64>)> {
    let params = CwParams::new(beta, spins).map_err(pyerr)?;
    let pmf = curie_weiss::magnetization_pmf(&params);
    Ok(pmf.support().unzip())
}

#[pyfunction]
fn exact_joint_moment(beta: f64, spins: usize, l: usize) -> PyResult<f64> {
    let params = CwParams::new(beta, spins).map_err(pyerr)?;
    curie_weiss::exact_joint_moment(&params, l).map_err(pyerr)
}

#[pyfunction]
fn hs_joint_moment(beta: f64, spins: usize, l: usize) -> PyResult<f64> {
    let params = CwParams::new(beta, spins).map_err(pyerr)?;
    curie_weiss::hs_joint_moment(&params, l).map_err(pyerr)
}

#[pyfunction]
fn asymptotic_joint_moment(beta: f64, spins: usize, l: usize) -> PyResult<f64> {
    curie_weiss::asymptotic_joint_moment(beta, spins, l).map_err(pyerr)
}

/// One exact Curie-Weiss sample of `spins` signs.
#[pyfunction]
fn sample_cw(beta: f64, spins: usize, seed: u64) -> PyResult<Vec<f64>> {
    let params = CwParams::new(beta, spins).map_err(pyerr)?;
    let mut stream = derive_stream(seed, &[("py-cw", 0)]);
    Ok(curie_weiss::sample_cw(&params, &mut stream))
}

#[pyfunction]
fn sc_pdf(v: f64, x: f64) -> f64 {
    laws::sc_pdf(v, x)
}

#[pyfunction]
fn sc_cdf(v: f64, x: f64) -> f64 {
    laws::sc_cdf(v, x)
}

#[pyfunction]
fn sc_moment(v: f64, k: u32) -> f64 {
    laws::sc_moment(v, k)
}

#[pyfunction]
fn mixture_moment(components: Vec<(f64, f64)>, k: u32) -> PyResult<f64> {
    Ok(MixtureSc::new(components).map_err(pyerr)?.moment(k))
}

#[pyfunction]
fn mixture_cdf(components: Vec<(f64, f64)>, x: f64) -> PyResult<f64> {
    Ok(MixtureSc::new(components).map_err(pyerr)?.cdf(x))
}

/// Wrap-around index distance min(|i-j|, N-|i-j|), 1-based.
#[pyfunction]
fn wrap_dist(i: usize, j: usize, n: usize) -> PyResult<usize> {
    ensembles::wrap_dist(i, j, n).map_err(pyerr)
}

/// Squared double integral of a step profile given as (end, value) pairs.
#[pyfunction]
fn profile_phi(steps: Vec<(f64, f64)>) -> PyResult<f64> {
    ensembles::Profile::from_steps(steps)
        .and_then(|p| p.phi())
        .map_err(pyerr)
}

/// Upper-triangle filling bijection as a list of (i, j), 0-based.
#[pyfunction]
fn filling_map(n: usize, order: &str) -> PyResult<Vec<(usize, usize)>> {
    let order = match order {
        "diagonal" => ensembles::FillingOrder::Diagonal,
        "row-by-row" => ensembles::FillingOrder::RowByRow,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown filling '{other}' (diagonal | row-by-row)"
            )))
        }
    };
    Ok(ensembles::filling_map(n, order))
}

/// Sample a symmetric matrix. `cell` is a block of `field = value` lines
/// like the CLI config cells, e.g. "ensemble = wigner\ndist = rademacher".
#[pyfunction]
fn sample_matrix(cell: &str, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let spec = harness::config::parse_ensemble_block(cell).map_err(pyerr)?;
    let stream = derive_stream(seed, &[("py-matrix", 0)]);
    let m = ensembles::build(&spec, n, &stream).map_err(pyerr)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect())
}

/// The ensemble's natural spectral normalization.
#[pyfunction]
fn norm_factor(cell: &str, n: usize) -> PyResult<f64> {
    let spec = harness::config::parse_ensemble_block(cell).map_err(pyerr)?;
    ensembles::norm_factor(&spec, n).map_err(pyerr)
}

/// Eigenvalues (ascending) of a symmetric matrix given as nested lists;
/// the upper triangle is taken as the truth.
#[pyfunction]
fn eigenvalues(matrix: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let mut m = ensembles::SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, matrix[i][j]);
        }
    }
    let spectrum = spectra::eig_sym(&m).map_err(pyerr)?;
    Ok(spectrum.eigenvalues().to_vec())
}

/// Kolmogorov-Smirnov distance of a sample against `sc:<v>`, `cw:<beta>`
/// or `mix:<w>:<v>,...`.
#[pyfunction]
fn ks_distance(values: Vec<f64>, law: &str) -> PyResult<f64> {
    let law = harness::config::parse_law_spec(law)
        .map_err(pyerr)?
        .ok_or_else(|| PyValueError::new_err("a concrete law is required"))?;
    Ok(Esd::from_values(values).ks(|x| law.cdf(x)))
}

/// Sample moment of a value list.
#[pyfunction]
fn esd_moment(values: Vec<f64>, k: u32) -> f64 {
    Esd::from_values(values).moment(k)
}

/// Names of the built-in experiment presets.
#[pyfunction]
fn preset_names() -> Vec<String> {
    harness::preset_names().iter().map(|s| s.to_string()).collect()
}

/// Run a preset (optionally overriding seed/out/threads) and return the
/// report as a JSON string; artifacts are written to the output dir.
#[pyfunction]
#[pyo3(signature = (name, out_dir=None, seed=None, threads=None))]
fn run_preset(
    name: &str,
    out_dir: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut cfg = harness::preset(name).map_err(pyerr)?;
    if let Some(dir) = out_dir {
        cfg.out_dir = dir.into();
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let output = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?
            .install(|| harness::run(&cfg)),
        None => harness::run(&cfg),
    }
    .map_err(pyerr)?;
    harness::emit(&output, &cfg).map_err(pyerr)?;
    Ok(output.report.to_json())
}

/// Run an experiment from config text and return the report JSON.
#[pyfunction]
#[pyo3(signature = (text, emit_files=false))]
fn run_config(text: &str, emit_files: bool) -> PyResult<String> {
    let cfg = harness::config::parse_config(text).map_err(pyerr)?;
    let output = harness::run(&cfg).map_err(pyerr)?;
    if emit_files {
        harness::emit(&output, &cfg).map_err(pyerr)?;
    }
    Ok(output.report.to_json())
}

#[pymodule]
fn rmtlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(catalan, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(count_ik, m)?)?;
    m.add_function(wrap_pyfunction!(count_ik_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(expected_trace_moment, m)?)?;
    m.add_function(wrap_pyfunction!(solve_m, m)?)?;
    m.add_function(wrap_pyfunction!(cw_variance, m)?)?;
    m.add_function(wrap_pyfunction!(magnetization_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(exact_joint_moment, m)?)?;
    m.add_function(wrap_pyfunction!(hs_joint_moment, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_joint_moment, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cw, m)?)?;
    m.add_function(wrap_pyfunction!(sc_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(sc_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(sc_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(wrap_dist, m)?)?;
    m.add_function(wrap_pyfunction!(profile_phi, m)?)?;
    m.add_function(wrap_pyfunction!(filling_map, m)?)?;
    m.add_function(wrap_pyfunction!(sample_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(norm_factor, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(esd_moment, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
