//! Single-particle transfer matrices for beam splitters and chains.
//!
//! Row convention throughout: `a_k† ↦ Σ_p T[k][p] a_p†`. Applying splitter
//! `A` and then splitter `B` is the substitution `T = T_A · T_B`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMatrix, ZERO};

/// A two-mode beam splitter on 1-based modes `mode_a < mode_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    #[serde(rename = "a")]
    pub mode_a: usize,
    #[serde(rename = "b")]
    pub mode_b: usize,
    pub theta: f64,
}

impl BeamSplitterSpec {
    pub fn new(mode_a: usize, mode_b: usize, theta: f64) -> Self {
        BeamSplitterSpec { mode_a, mode_b, theta }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::NonFiniteAngle(self.theta));
        }
        if self.mode_a >= self.mode_b {
            return Err(Error::InvalidSplitterPair {
                a: self.mode_a,
                b: self.mode_b,
            });
        }
        for index in [self.mode_a, self.mode_b] {
            if index == 0 || index > modes {
                return Err(Error::ModeOutOfRange { index, modes });
            }
        }
        Ok(())
    }

    /// Transmission `cos θ` and reflection `i sin θ`.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.theta.cos(), 0.0),
            Complex64::new(0.0, self.theta.sin()),
        )
    }
}

/// An ordered list of splitters, applied first to last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub modes: usize,
    pub splitters: Vec<BeamSplitterSpec>,
}

impl NetworkSpec {
    /// Nearest-neighbour chain (1,2), (2,3), …, (m−1,m) sharing one angle.
    pub fn chain(modes: usize, theta: f64) -> Self {
        let splitters = (1..modes).map(|a| BeamSplitterSpec::new(a, a + 1, theta)).collect();
        NetworkSpec { modes, splitters }
    }

    /// Same topology with every splitter set to `theta`.
    pub fn with_angle(&self, theta: f64) -> Self {
        NetworkSpec {
            modes: self.modes,
            splitters: self
                .splitters
                .iter()
                .map(|s| BeamSplitterSpec { theta, ..*s })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidModeCount(0));
        }
        self.splitters.iter().try_for_each(|s| s.validate(self.modes))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let net: NetworkSpec = serde_json::from_str(text)?;
        net.validate()?;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serialization is infallible")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// m×m single-particle unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix(CMatrix);

impl TransferMatrix {
    pub fn identity(modes: usize) -> Self {
        TransferMatrix(CMatrix::identity(modes, modes))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(TransferMatrix(m))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Coefficients of the image of `a_k†` (1-based `k`).
    pub fn row(&self, k: usize) -> Vec<Complex64> {
        self.0.row(k - 1).iter().copied().collect()
    }

    pub fn get(&self, k: usize, p: usize) -> Complex64 {
        self.0[(k, p)]
    }

    /// Substitution `self` first, then `next`.
    pub fn then(&self, next: &TransferMatrix) -> TransferMatrix {
        TransferMatrix(&self.0 * &next.0)
    }
}

pub fn bs_transfer(modes: usize, spec: &BeamSplitterSpec) -> Result<TransferMatrix> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    spec.validate(modes)?;
    let (t, r) = spec.coefficients();
    let (a, b) = (spec.mode_a - 1, spec.mode_b - 1);
    let mut m = CMatrix::identity(modes, modes);
    m[(a, a)] = t;
    m[(a, b)] = r;
    m[(b, a)] = r;
    m[(b, b)] = t;
    Ok(TransferMatrix(m))
}

pub fn compose_chain(network: &NetworkSpec) -> Result<TransferMatrix> {
    network.validate()?;
    network
        .splitters
        .iter()
        .try_fold(TransferMatrix::identity(network.modes), |acc, s| {
            Ok(acc.then(&bs_transfer(network.modes, s)?))
        })
}

fn ipow(z: Complex64, e: usize) -> Complex64 {
    z.powu(e as u32)
}

/// Closed-form image of `a_k†` under the equal-angle nearest-neighbour chain:
///
/// `a_{k−1}† i sinθ + Σ_{p=k}^{m−1} (i sinθ)^{p−k} cosθ^{2−δ(1,k)} a_p†
///  + (i sinθ)^{m−k} cosθ^{1−δ(1,k)} a_m†`
///
/// Terms referencing `a_0†` or empty sums are zero. Index `p−1` of the
/// returned vector holds the coefficient of `a_p†`.
pub fn closed_form_column(modes: usize, k: usize, theta: f64) -> Result<Vec<Complex64>> {
    closed_form_coefficients(modes, k, theta.cos(), Complex64::new(0.0, theta.sin()))
}

/// The same nested-chain expansion with an arbitrary reflection factor;
/// `i sinθ` gives creation operators and `−i sinθ` annihilation operators.
pub(crate) fn closed_form_coefficients(modes: usize, k: usize, cos: f64, refl: Complex64) -> Result<Vec<Complex64>> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if k == 0 || k > modes {
        return Err(Error::ModeOutOfRange { index: k, modes });
    }
    let c = Complex64::new(cos, 0.0);
    let first = usize::from(k == 1);
    let mut coeffs = vec![ZERO; modes];
    if k >= 2 {
        coeffs[k - 2] += refl;
    }
    for p in k..modes {
        coeffs[p - 1] += ipow(refl, p - k) * ipow(c, 2 - first);
    }
    coeffs[modes - 1] += ipow(refl, modes - k) * ipow(c, 1 - first);
    Ok(coeffs)
}

/// Coefficients of one creation operator collected across all transformed
/// operators, each tagged with the index of the transformed operator it
/// came from.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledSum {
    pub terms: Vec<(usize, Complex64)>,
}

impl LabelledSum {
    pub fn sum(&self) -> Complex64 {
        self.terms.iter().map(|(_, v)| v).sum()
    }

    /// Terms whose value is not exactly zero.
    pub fn nonzero(&self) -> impl Iterator<Item = &(usize, Complex64)> {
        self.terms.iter().filter(|(_, v)| *v != ZERO)
    }
}

/// Labelled coefficient sum of `a_k†`:
///
/// `Σ_{j=1}^{k} [(i sinθ)^{k−j} cosθ^{2−δ(j,1)−δ(k,m)}]_j + [(i sinθ)^{1−δ(k,m)}]_{k+1}`
///
/// The label-`k+1` term is dropped for `k = m`, where it would reference a
/// mode that does not exist.
pub fn closed_form_f(modes: usize, k: usize, theta: f64) -> Result<LabelledSum> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if k == 0 || k > modes {
        return Err(Error::ModeOutOfRange { index: k, modes });
    }
    let c = Complex64::new(theta.cos(), 0.0);
    let is = Complex64::new(0.0, theta.sin());
    let last = usize::from(k == modes);
    let mut terms: Vec<(usize, Complex64)> = (1..=k)
        .map(|j| {
            let cos_exp = 2 - usize::from(j == 1) - last;
            (j, ipow(is, k - j) * ipow(c, cos_exp))
        })
        .collect();
    if k < modes {
        terms.push((k + 1, is));
    }
    Ok(LabelledSum { terms })
}

/// Column sums of a transfer matrix: for column `k`, the total weight of
/// `a_k†` across all transformed operators.
pub fn column_sum(t: &TransferMatrix, k: usize) -> Complex64 {
    t.matrix().column(k - 1).iter().sum()
}
