//! Python bindings. The `*_impl` functions hold the logic so they can be
//! tested from Rust without an interpreter.

use std::sync::Arc;

use bsnet_core::cli::verification_checks;
use bsnet_core::fock::{enumerate_basis, OccupationVector};
use bsnet_core::lift::{evolve_density, evolve_state, Backend, StateVector};
use bsnet_core::mesh::NetworkSpec;
use bsnet_core::states::{mixed_input, partial_trace, probability, TargetKind, TargetState};
use bsnet_core::sweep::{find_extrema, sweep_theta, ExtremumKind, GridSpec, SweepConfig};
use bsnet_core::{CMatrix, Complex64, Error, Result};

pub const DEFAULT_TARGETS: &str = "psi+,psi-,phi+,phi-,noon+,noon-";

/// `(target, kind, theta, value)` for one refined extremum.
pub type ExtremumRow = (String, String, f64, f64);

/// Grid, one column per target, and every extremum found.
pub type SweepTable = (Vec<f64>, Vec<(String, Vec<f64>)>, Vec<ExtremumRow>);

fn targets(spec: &str, noon_n: u32) -> Result<Vec<TargetKind>> {
    spec.split(',').map(|t| TargetKind::parse(t, noon_n)).collect()
}

fn parse_backend(s: &str) -> Result<Backend> {
    s.parse().map_err(Error::Parse)
}

pub fn basis_impl(modes: usize, photons: usize) -> Result<Vec<Vec<u32>>> {
    Ok(enumerate_basis(modes, photons)?
        .states()
        .iter()
        .map(|s| s.as_slice().to_vec())
        .collect())
}

pub fn permanent_impl(rows: &[Vec<Complex64>]) -> Result<Complex64> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: bad.len(),
        });
    }
    bsnet_core::lift::permanent(&CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn evolve_impl(input: &[u32], theta: f64, backend: &str) -> Result<Vec<(Vec<u32>, Complex64)>> {
    let backend = parse_backend(backend)?;
    let occ = OccupationVector::new(input.to_vec())?;
    let basis = Arc::new(enumerate_basis(occ.modes(), occ.total())?);
    let start = StateVector::basis_state(basis.clone(), &occ)?;
    let out = evolve_state(&start, &NetworkSpec::chain(occ.modes(), theta), backend)?;
    Ok(basis
        .states()
        .iter()
        .zip(out.amplitudes().iter())
        .map(|(s, a)| (s.as_slice().to_vec(), *a))
        .collect())
}

pub fn probabilities_impl(
    modes: usize,
    photons: usize,
    theta: f64,
    keep: (usize, usize),
    target_spec: &str,
    noon_n: Option<u32>,
    backend: &str,
) -> Result<Vec<(String, f64)>> {
    let backend = parse_backend(backend)?;
    let rho = evolve_density(
        &mixed_input(modes, photons)?,
        &NetworkSpec::chain(modes, theta),
        backend,
    )?;
    let red = partial_trace(&rho, keep)?;
    targets(target_spec, noon_n.unwrap_or(photons as u32))?
        .into_iter()
        .map(|t| Ok((t.to_string(), probability(&red, &TargetState::new(t)?)?)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_impl(
    modes: usize,
    photons: usize,
    keep: (usize, usize),
    target_spec: &str,
    grid: (f64, f64, usize),
    noon_n: Option<u32>,
    backend: &str,
) -> Result<SweepTable> {
    let mut config = SweepConfig::new(
        modes,
        photons,
        keep,
        targets(target_spec, noon_n.unwrap_or(photons as u32))?,
    );
    config.grid = GridSpec::new(grid.0, grid.1, grid.2)?;
    config.backend = parse_backend(backend)?;
    let result = sweep_theta(&config)?;
    let mut extrema = Vec::new();
    for &t in &config.targets {
        for e in find_extrema(&result, t)? {
            let kind = if e.kind == ExtremumKind::Max { "max" } else { "min" };
            extrema.push((t.to_string(), kind.to_string(), e.theta_star, e.value));
        }
    }
    let columns = result
        .columns
        .iter()
        .map(|c| (c.target.to_string(), c.values.clone()))
        .collect();
    Ok((result.grid, columns, extrema))
}

pub fn verify_impl(modes: usize, photons: usize, seed: u64) -> Result<Vec<(String, f64, bool)>> {
    if modes > bsnet_core::cli::VERIFY_MAX_MODES {
        return Err(Error::Parse(format!(
            "verify supports at most {} modes",
            bsnet_core::cli::VERIFY_MAX_MODES
        )));
    }
    Ok(verification_checks(modes, photons, seed)?
        .into_iter()
        .map(|c| {
            let ok = c.passed();
            (c.name, c.max_deviation, ok)
        })
        .collect())
}

#[pyo3::pymodule]
mod bsnet {
    use std::f64::consts::TAU;

    use pyo3::exceptions::PyValueError;
    use pyo3::prelude::*;

    use super::*;

    fn py_err(e: Error) -> PyErr {
        PyValueError::new_err(e.to_string())
    }

    /// Occupation vectors of the m-mode, n-photon basis in canonical order.
    #[pyfunction]
    fn basis(modes: usize, photons: usize) -> PyResult<Vec<Vec<u32>>> {
        basis_impl(modes, photons).map_err(py_err)
    }

    /// Permanent of a square complex matrix given as nested lists.
    #[pyfunction]
    fn permanent(matrix: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
        permanent_impl(&matrix).map_err(py_err)
    }

    /// Amplitudes of a pure Fock input after the equal-angle chain.
    #[pyfunction]
    #[pyo3(signature = (input, theta, backend = "permanent"))]
    fn evolve(input: Vec<u32>, theta: f64, backend: &str) -> PyResult<Vec<(Vec<u32>, Complex64)>> {
        evolve_impl(&input, theta, backend).map_err(py_err)
    }

    /// Target probabilities for the mixed input on the kept port pair.
    #[pyfunction]
    #[pyo3(signature = (modes, photons, theta, keep = (1, 2), targets = DEFAULT_TARGETS, noon_n = None, backend = "permanent"))]
    fn probabilities(
        modes: usize,
        photons: usize,
        theta: f64,
        keep: (usize, usize),
        targets: &str,
        noon_n: Option<u32>,
        backend: &str,
    ) -> PyResult<Vec<(String, f64)>> {
        probabilities_impl(modes, photons, theta, keep, targets, noon_n, backend).map_err(py_err)
    }

    /// Returns `(grid, columns, extrema)`.
    #[pyfunction]
    #[pyo3(signature = (modes, photons, keep = (1, 2), targets = DEFAULT_TARGETS, lo = 0.0, hi = TAU, count = 1001, noon_n = None, backend = "permanent"))]
    #[allow(clippy::too_many_arguments)]
    fn sweep(
        modes: usize,
        photons: usize,
        keep: (usize, usize),
        targets: &str,
        lo: f64,
        hi: f64,
        count: usize,
        noon_n: Option<u32>,
        backend: &str,
    ) -> PyResult<SweepTable> {
        sweep_impl(modes, photons, keep, targets, (lo, hi, count), noon_n, backend).map_err(py_err)
    }

    /// `(check, max deviation, passed)` for each cross-check.
    #[pyfunction]
    #[pyo3(signature = (modes, photons, seed = 0))]
    fn verify(modes: usize, photons: usize, seed: u64) -> PyResult<Vec<(String, f64, bool)>> {
        verify_impl(modes, photons, seed).map_err(py_err)
    }
}
