//! Python bindings for the dtasep crate: the tableau bijection, particle
//! simulation, exact transition laws, and the Fredholm-determinant
//! multipoint probabilities (float backend).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dtasep::combinatorics::{self, Partition, Tableau};
use dtasep::dpp::{multipoint_prob_kernel, BiorthSystem, KernelRoute};
use dtasep::drsk::{self, BitMatrix};
use dtasep::dynamics::{enumerate_transition, ParticleConfig, Rates};
use dtasep::error::Error;
use dtasep::hitting::HittingKernel;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_route(route: &str) -> PyResult<KernelRoute> {
    match route {
        "biorthogonal" => Ok(KernelRoute::Biorthogonal),
        "hitting" => Ok(KernelRoute::Hitting),
        other => Err(PyValueError::new_err(format!(
            "route must be 'biorthogonal' or 'hitting', got '{other}'"
        ))),
    }
}

fn rates_from(p: Vec<f64>, q: Vec<f64>) -> PyResult<Rates<f64>> {
    Rates::new(p, q).map_err(err)
}

fn config_from(y: Vec<i64>) -> PyResult<ParticleConfig> {
    ParticleConfig::new(y).map_err(err)
}

/// Dual-column RSK: maps a {0,1} matrix (list of rows) to the tableau pair
/// (P, Q) as lists of rows.
#[pyfunction]
fn drsk_forward(matrix: Vec<Vec<u8>>) -> PyResult<(Vec<Vec<u32>>, Vec<Vec<u32>>)> {
    let w = BitMatrix::from_rows(&matrix).map_err(err)?;
    let (p, q) = drsk::drsk_forward(&w);
    Ok((p.rows().to_vec(), q.rows().to_vec()))
}

/// Inverse dual-column RSK: rebuilds the {0,1} matrix of the given
/// dimensions from the tableau pair.
#[pyfunction]
fn drsk_inverse(
    p: Vec<Vec<u32>>,
    q: Vec<Vec<u32>>,
    rows: usize,
    cols: usize,
) -> PyResult<Vec<Vec<u32>>> {
    let p = Tableau::new(p).map_err(err)?;
    let q = Tableau::new(q).map_err(err)?;
    let w = drsk::drsk_inverse(&p, &q, rows, cols).map_err(err)?;
    Ok((1..=rows)
        .map(|i| (1..=cols).map(|j| u32::from(w.get(i, j))).collect())
        .collect())
}

/// Left edge of a column-strict tableau: the number of k's in row k.
#[pyfunction]
fn left_edge(rows: Vec<Vec<u32>>) -> PyResult<Vec<i64>> {
    let t = Tableau::new(rows).map_err(err)?;
    Ok(combinatorics::left_edge(&t).map_err(err)?.parts().to_vec())
}

/// Schur polynomial of the given shape evaluated at the given variables.
#[pyfunction]
fn schur(shape: Vec<i64>, xs: Vec<f64>) -> PyResult<f64> {
    let la = Partition::new(shape).map_err(err)?;
    Ok(combinatorics::schur(&la, &xs))
}

/// One seeded trajectory of the particle system: returns positions at
/// times 0..=t.
#[pyfunction]
#[pyo3(signature = (y, p, q, t, seed, replica = 0))]
fn simulate_trajectory(
    y: Vec<i64>,
    p: Vec<f64>,
    q: Vec<f64>,
    t: usize,
    seed: u64,
    replica: u64,
) -> PyResult<Vec<Vec<i64>>> {
    let rates = rates_from(p, q)?;
    let y0 = config_from(y)?;
    let traj = dtasep::dynamics::simulate(&y0, &rates, t, seed, replica);
    Ok(traj.into_iter().map(|c| c.positions().to_vec()).collect())
}

/// Exhaustive exact transition law at time t, as (positions, probability)
/// pairs sorted by configuration.
#[pyfunction]
fn transition_law(
    y: Vec<i64>,
    p: Vec<f64>,
    q: Vec<f64>,
    t: usize,
) -> PyResult<Vec<(Vec<i64>, f64)>> {
    let rates = rates_from(p, q)?;
    let y0 = config_from(y)?;
    let law = enumerate_transition(&y0, &rates, t).map_err(err)?;
    Ok(law
        .into_iter()
        .map(|(cfg, prob)| (cfg.positions().to_vec(), prob))
        .collect())
}

/// Multipoint probability P(Y_{k_i}(t) >= s_i for all i) via the Fredholm
/// determinant of the chosen kernel route.
#[pyfunction]
#[pyo3(signature = (y, p, q, t, query, route = "hitting"))]
fn multipoint_probability(
    y: Vec<i64>,
    p: Vec<f64>,
    q: Vec<f64>,
    t: usize,
    query: Vec<(usize, i64)>,
    route: &str,
) -> PyResult<f64> {
    let rates = rates_from(p, q)?;
    let y0 = config_from(y)?;
    let route = parse_route(route)?;
    let res = multipoint_prob_kernel(&y0, &rates, t, &query, route).map_err(err)?;
    Ok(res.value)
}

/// One entry K(m, x; n, xp) of the correlation kernel.
#[pyfunction]
#[pyo3(signature = (y, p, q, t, m, x, n, xp, route = "biorthogonal"))]
#[allow(clippy::too_many_arguments)]
fn kernel_entry(
    y: Vec<i64>,
    p: Vec<f64>,
    q: Vec<f64>,
    t: usize,
    m: usize,
    x: i64,
    n: usize,
    xp: i64,
    route: &str,
) -> PyResult<f64> {
    let rates = rates_from(p, q)?;
    let y0 = config_from(y)?;
    match parse_route(route)? {
        KernelRoute::Biorthogonal => {
            let sys = BiorthSystem::new(&y0, &rates, 0, t).map_err(err)?;
            Ok(sys.correlation_kernel(m, x, n, xp))
        }
        KernelRoute::Hitting => {
            let hk = HittingKernel::new(&y0, &rates, t).map_err(err)?;
            Ok(hk.entry(m, x, n, xp))
        }
    }
}

#[pymodule]
fn dtasep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(drsk_forward, m)?)?;
    m.add_function(wrap_pyfunction!(drsk_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(left_edge, m)?)?;
    m.add_function(wrap_pyfunction!(schur, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(transition_law, m)?)?;
    m.add_function(wrap_pyfunction!(multipoint_probability, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_entry, m)?)?;
    Ok(())
}
