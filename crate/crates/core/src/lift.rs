//! Lifting single-particle transfer matrices to the fixed-photon-number
//! Fock space.
//!
//! Two numerical routes are provided and kept independent of each other:
//! matrix permanents of replicated sub-matrices, and sequential two-mode
//! substitution with binomial re-expansion. A third, symbolic route lives
//! in [`crate::symop`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{binomial, factorial, FockBasis, OccupationVector};
use crate::mesh::{compose_chain, BeamSplitterSpec, NetworkSpec, TransferMatrix};
use crate::states::{DensityBasis, DensityOperator};
use crate::{symop, CMatrix, CVector, ONE, ZERO};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Permanent,
    Sequential,
    Symbolic,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Permanent, Backend::Sequential, Backend::Symbolic];

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Permanent => "permanent",
            Backend::Sequential => "sequential",
            Backend::Symbolic => "symbolic",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "permanent" | "perm" => Ok(Backend::Permanent),
            "sequential" | "seq" => Ok(Backend::Sequential),
            "symbolic" | "sym" => Ok(Backend::Symbolic),
            other => Err(format!("unknown backend '{other}' (permanent|sequential|symbolic)")),
        }
    }
}

/// Pure state over a fixed-photon-number basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// The basis state `|occ⟩`.
    pub fn basis_state(basis: Arc<FockBasis>, occ: &OccupationVector) -> Result<Self> {
        let p = basis.index_of(occ)?;
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[p] = ONE;
        Ok(StateVector { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Amplitude of `occ`, zero when it lies outside the basis.
    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        self.basis.position(occ).map_or(ZERO, |p| self.amplitudes[p])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::from_parts(DensityBasis::Full(self.basis.clone()), m)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Square operator over a fixed-photon-number basis.
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    matrix: CMatrix,
}

impl FockOperator {
    pub fn new(basis: Arc<FockBasis>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        Ok(FockOperator { basis, matrix })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `⟨out|U|in⟩`.
    pub fn element(&self, out: &OccupationVector, input: &OccupationVector) -> Result<Complex64> {
        Ok(self.matrix[(self.basis.index_of(out)?, self.basis.index_of(input)?)])
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_same_basis(&self.basis, state.basis())?;
        StateVector::new(self.basis.clone(), &self.matrix * state.amplitudes())
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        match rho.basis() {
            DensityBasis::Full(b) => check_same_basis(&self.basis, b)?,
            DensityBasis::Reduced(_) => {
                return Err(Error::BasisMismatch("cannot evolve a reduced density operator".into()))
            }
        }
        let m = &self.matrix * rho.matrix() * self.matrix.adjoint();
        Ok(DensityOperator::from_parts(rho.basis().clone(), m))
    }
}

fn check_same_basis(a: &FockBasis, b: &FockBasis) -> Result<()> {
    if a != b {
        return Err(Error::BasisMismatch(format!(
            "({} modes, {} photons) vs ({} modes, {} photons)",
            a.modes(),
            a.photons(),
            b.modes(),
            b.photons()
        )));
    }
    Ok(())
}

/// Matrix permanent by Ryser's inclusion–exclusion formula, visiting the
/// column subsets in Gray-code order so each step updates the row sums with
/// a single column.
pub fn permanent(a: &CMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(ONE);
    }
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        let added = gray & (1 << j) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[(i, j)];
            } else {
                *s -= a[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// Mode indices (0-based) repeated by occupation.
fn replicated_modes(occ: &OccupationVector) -> Vec<usize> {
    occ.as_slice()
        .iter()
        .enumerate()
        .flat_map(|(k, &v)| std::iter::repeat_n(k, v as usize))
        .collect()
}

/// Fock-space operator of `t` via permanents:
/// `⟨out|Û|in⟩ = perm(T[in-modes, out-modes]) / sqrt(Π in_k! Π out_k!)`,
/// where the sub-matrix takes row `k` of `T` once per photon in input mode
/// `k` and column `p` once per photon in output mode `p`.
pub fn lift_unitary(t: &TransferMatrix, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    if t.modes() != basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            found: t.modes(),
        });
    }
    let dim = basis.len();
    let reps: Vec<(Vec<usize>, f64)> = basis
        .states()
        .iter()
        .map(|s| (replicated_modes(s), (s.factorial_product() as f64).sqrt()))
        .collect();
    let tm = t.matrix();
    let columns: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let (rows, norm_in) = &reps[j];
            reps.iter()
                .map(|(cols, norm_out)| {
                    let sub = CMatrix::from_fn(rows.len(), cols.len(), |r, c| tm[(rows[r], cols[c])]);
                    permanent(&sub).expect("square by photon-number conservation") / (norm_in * norm_out)
                })
                .collect()
        })
        .collect();
    let matrix = CMatrix::from_fn(dim, dim, |i, j| columns[j][i]);
    FockOperator::new(basis.clone(), matrix)
}

/// Applies one beam splitter by substituting
/// `a_a† → cosθ a_a† + i sinθ a_b†`, `a_b† → i sinθ a_a† + cosθ a_b†`
/// into every basis monomial and re-expanding binomially.
pub fn apply_bs_sequential(state: &StateVector, spec: &BeamSplitterSpec) -> Result<StateVector> {
    let basis = state.basis();
    spec.validate(basis.modes())?;
    let (t, r) = spec.coefficients();
    let (ma, mb) = (spec.mode_a - 1, spec.mode_b - 1);
    let n = basis.photons();
    let t_pow: Vec<Complex64> = (0..=n).map(|e| t.powu(e as u32)).collect();
    let r_pow: Vec<Complex64> = (0..=n).map(|e| r.powu(e as u32)).collect();
    let mut out = CVector::zeros(basis.len());
    let mut scratch: Vec<u32> = Vec::with_capacity(basis.modes());
    for (idx, occ) in basis.states().iter().enumerate() {
        let amp = state.amplitudes()[idx];
        if amp == ZERO {
            continue;
        }
        let (p, q) = (occ[ma] as usize, occ[mb] as usize);
        let in_norm = ((factorial(p) * factorial(q)) as f64).sqrt();
        for i in 0..=p {
            for j in 0..=q {
                // i photons of a_a† stay in a (t), p-i reflect to b (r);
                // j photons of a_b† reflect to a (r), q-j stay in b (t)
                let s = i + j;
                let u = p + q - s;
                let weight =
                    (binomial(p, i) * binomial(q, j)) as f64 * ((factorial(s) * factorial(u)) as f64).sqrt() / in_norm;
                let coeff = t_pow[i + q - j] * r_pow[p - i + j] * weight;
                scratch.clear();
                scratch.extend_from_slice(occ.as_slice());
                scratch[ma] = s as u32;
                scratch[mb] = u as u32;
                let target = basis.position(&scratch).expect("photon number is conserved");
                out[target] += amp * coeff;
            }
        }
    }
    StateVector::new(basis.clone(), out)
}

fn check_network(network: &NetworkSpec, basis: &FockBasis) -> Result<()> {
    network.validate()?;
    if network.modes != basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            found: network.modes,
        });
    }
    Ok(())
}

/// The Fock-space operator of a whole network, built by the chosen backend.
pub fn network_operator(network: &NetworkSpec, basis: &Arc<FockBasis>, backend: Backend) -> Result<FockOperator> {
    check_network(network, basis)?;
    match backend {
        Backend::Permanent => lift_unitary(&compose_chain(network)?, basis),
        Backend::Symbolic => symop::lift_symbolic(&compose_chain(network)?, basis),
        Backend::Sequential => {
            let dim = basis.len();
            let columns = basis
                .states()
                .par_iter()
                .map(|occ| {
                    let start = StateVector::basis_state(basis.clone(), occ)?;
                    network
                        .splitters
                        .iter()
                        .try_fold(start, |s, bs| apply_bs_sequential(&s, bs))
                })
                .collect::<Result<Vec<_>>>()?;
            let matrix = CMatrix::from_fn(dim, dim, |i, j| columns[j].amplitudes()[i]);
            FockOperator::new(basis.clone(), matrix)
        }
    }
}

/// `U|ψ⟩` for the whole network.
pub fn evolve_state(state: &StateVector, network: &NetworkSpec, backend: Backend) -> Result<StateVector> {
    check_network(network, state.basis())?;
    match backend {
        Backend::Sequential => network
            .splitters
            .iter()
            .try_fold(state.clone(), |s, bs| apply_bs_sequential(&s, bs)),
        _ => network_operator(network, state.basis(), backend)?.apply(state),
    }
}

/// `U ρ U†` for the whole network.
pub fn evolve_density(rho: &DensityOperator, network: &NetworkSpec, backend: Backend) -> Result<DensityOperator> {
    let basis = match rho.basis() {
        DensityBasis::Full(b) => b.clone(),
        DensityBasis::Reduced(_) => {
            return Err(Error::BasisMismatch("cannot evolve a reduced density operator".into()))
        }
    };
    network_operator(network, &basis, backend)?.conjugate(rho)
}
