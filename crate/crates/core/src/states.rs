//! Mixed inputs, two-mode reductions and Bell/NOON target fidelities.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, hardcore_vectors, FockBasis};
use crate::{CMatrix, CVector, ZERO};

/// Two-mode occupations with total `0..=max_photons`, ordered by total and
/// then lexicographically descending: `|00⟩, |10⟩, |01⟩, |20⟩, |11⟩, …`.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    max_photons: usize,
    states: Vec<[u32; 2]>,
    index: HashMap<[u32; 2], usize>,
}

impl ReducedBasis {
    pub fn new(max_photons: usize) -> Self {
        let mut states = Vec::with_capacity((max_photons + 1) * (max_photons + 2) / 2);
        for total in 0..=max_photons as u32 {
            for first in (0..=total).rev() {
                states.push([first, total - first]);
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        ReducedBasis {
            max_photons,
            states,
            index,
        }
    }

    pub fn max_photons(&self) -> usize {
        self.max_photons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[[u32; 2]] {
        &self.states
    }

    pub fn position(&self, occ: [u32; 2]) -> Option<usize> {
        self.index.get(&occ).copied()
    }
}

impl PartialEq for ReducedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.max_photons == other.max_photons
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityBasis {
    Full(Arc<FockBasis>),
    Reduced(Arc<ReducedBasis>),
}

impl DensityBasis {
    pub fn len(&self) -> usize {
        match self {
            DensityBasis::Full(b) => b.len(),
            DensityBasis::Reduced(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    basis: DensityBasis,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(basis: DensityBasis, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        Ok(DensityOperator { basis, matrix })
    }

    pub(crate) fn from_parts(basis: DensityBasis, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), basis.len());
        DensityOperator { basis, matrix }
    }

    pub fn basis(&self) -> &DensityBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        crate::max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|⟨v|ρ|w⟩|` between reduced states of different total photon
    /// number. Zero for full-basis operators.
    pub fn max_cross_sector(&self) -> f64 {
        let DensityBasis::Reduced(b) = &self.basis else {
            return 0.0;
        };
        let mut worst = 0.0f64;
        for (i, v) in b.states().iter().enumerate() {
            for (j, w) in b.states().iter().enumerate() {
                if v[0] + v[1] != w[0] + w[1] {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }
}

/// Uniform mixture over every hard-core placement of `photons` photons.
pub fn mixed_input(modes: usize, photons: usize) -> Result<DensityOperator> {
    let vectors = hardcore_vectors(modes, photons)?;
    let basis = Arc::new(enumerate_basis(modes, photons)?);
    let weight = Complex64::new(1.0 / vectors.len() as f64, 0.0);
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for v in &vectors {
        let p = basis.index_of(v)?;
        m[(p, p)] = weight;
    }
    Ok(DensityOperator::from_parts(DensityBasis::Full(basis), m))
}

/// Traces out every mode except `keep` (1-based, in the given order).
pub fn partial_trace(rho: &DensityOperator, keep: (usize, usize)) -> Result<DensityOperator> {
    let DensityBasis::Full(full) = rho.basis() else {
        return Err(Error::BasisMismatch("partial trace needs a full-basis operator".into()));
    };
    let modes = full.modes();
    let (ka, kb) = keep;
    for index in [ka, kb] {
        if index == 0 || index > modes {
            return Err(Error::ModeOutOfRange { index, modes });
        }
    }
    if ka == kb {
        return Err(Error::InvalidKeepPair(ka, kb));
    }
    let (ia, ib) = (ka - 1, kb - 1);
    let reduced = Arc::new(ReducedBasis::new(full.photons()));

    // group full-basis indices by environment occupation
    let mut groups: HashMap<Vec<u32>, Vec<(usize, usize)>> = HashMap::new();
    for (p, s) in full.states().iter().enumerate() {
        let env: Vec<u32> = s
            .as_slice()
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != ia && k != ib)
            .map(|(_, &v)| v)
            .collect();
        let r = reduced
            .position([s[ia], s[ib]])
            .expect("kept occupations never exceed the total");
        groups.entry(env).or_default().push((p, r));
    }

    let mut out = CMatrix::zeros(reduced.len(), reduced.len());
    for members in groups.values() {
        for &(p, r) in members {
            for &(q, s) in members {
                out[(r, s)] += rho.matrix()[(p, q)];
            }
        }
    }
    Ok(DensityOperator::from_parts(DensityBasis::Reduced(reduced), out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    NoonPlus(u32),
    NoonMinus(u32),
}

impl TargetKind {
    /// Parses `psi+`, `psi-`, `phi+`, `phi-`, `noon+`, `noon-`; NOON kinds
    /// take `noon_n` photons.
    pub fn parse(s: &str, noon_n: u32) -> Result<Self> {
        let kind = match s.trim().to_ascii_lowercase().as_str() {
            "psi+" | "psi_plus" => TargetKind::PsiPlus,
            "psi-" | "psi_minus" => TargetKind::PsiMinus,
            "phi+" | "phi_plus" => TargetKind::PhiPlus,
            "phi-" | "phi_minus" => TargetKind::PhiMinus,
            "noon+" | "noon_plus" => TargetKind::NoonPlus(noon_n),
            "noon-" | "noon_minus" => TargetKind::NoonMinus(noon_n),
            other => return Err(Error::MissingColumn(other.to_string())),
        };
        Ok(kind)
    }

    /// CSV column name, e.g. `p_psi_plus`.
    pub fn column(&self) -> &'static str {
        match self {
            TargetKind::PsiPlus => "p_psi_plus",
            TargetKind::PsiMinus => "p_psi_minus",
            TargetKind::PhiPlus => "p_phi_plus",
            TargetKind::PhiMinus => "p_phi_minus",
            TargetKind::NoonPlus(_) => "p_noon_plus",
            TargetKind::NoonMinus(_) => "p_noon_minus",
        }
    }

    /// The six kinds in canonical column order.
    pub fn all(noon_n: u32) -> [TargetKind; 6] {
        [
            TargetKind::PsiPlus,
            TargetKind::PsiMinus,
            TargetKind::PhiPlus,
            TargetKind::PhiMinus,
            TargetKind::NoonPlus(noon_n),
            TargetKind::NoonMinus(noon_n),
        ]
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::PsiPlus => write!(f, "psi+"),
            TargetKind::PsiMinus => write!(f, "psi-"),
            TargetKind::PhiPlus => write!(f, "phi+"),
            TargetKind::PhiMinus => write!(f, "phi-"),
            TargetKind::NoonPlus(n) => write!(f, "noon+({n})"),
            TargetKind::NoonMinus(n) => write!(f, "noon-({n})"),
        }
    }
}

/// A two-component two-mode target `(|x⟩ ± |y⟩)/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetState {
    kind: TargetKind,
    components: [([u32; 2], Complex64); 2],
}

impl TargetState {
    pub fn new(kind: TargetKind) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Complex64::new(h, 0.0);
        let minus = Complex64::new(-h, 0.0);
        let components = match kind {
            TargetKind::PsiPlus => [([1, 0], plus), ([0, 1], plus)],
            TargetKind::PsiMinus => [([1, 0], plus), ([0, 1], minus)],
            TargetKind::PhiPlus => [([0, 0], plus), ([1, 1], plus)],
            TargetKind::PhiMinus => [([0, 0], plus), ([1, 1], minus)],
            TargetKind::NoonPlus(0) | TargetKind::NoonMinus(0) => return Err(Error::EmptyNoon),
            TargetKind::NoonPlus(n) => [([n, 0], plus), ([0, n], plus)],
            TargetKind::NoonMinus(n) => [([n, 0], plus), ([0, n], minus)],
        };
        Ok(TargetState { kind, components })
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn components(&self) -> &[([u32; 2], Complex64); 2] {
        &self.components
    }

    /// Amplitudes over `basis`. Components outside it (more photons than the
    /// basis holds) are dropped.
    pub fn on_basis(&self, basis: &ReducedBasis) -> CVector {
        let mut v = CVector::zeros(basis.len());
        for &(occ, a) in &self.components {
            if let Some(p) = basis.position(occ) {
                v[p] += a;
            }
        }
        v
    }
}

/// `⟨t|ρ|t⟩` without the physicality check.
pub fn expectation(rho_red: &DensityOperator, target: &TargetState) -> Result<Complex64> {
    let DensityBasis::Reduced(basis) = rho_red.basis() else {
        return Err(Error::BasisMismatch(
            "targets are scored on reduced two-mode states".into(),
        ));
    };
    let mut acc = ZERO;
    for &(x, ax) in target.components() {
        let Some(i) = basis.position(x) else { continue };
        for &(y, ay) in target.components() {
            let Some(j) = basis.position(y) else { continue };
            acc += ax.conj() * rho_red.element(i, j) * ay;
        }
    }
    Ok(acc)
}

/// Fidelity of the reduced state with the pure target, clamped to `[0, 1]`.
pub fn probability(rho_red: &DensityOperator, target: &TargetState) -> Result<f64> {
    const TOL: f64 = 1e-10;
    let e = expectation(rho_red, target)?;
    if e.im.abs() > TOL || e.re < -TOL || e.re > 1.0 + TOL {
        return Err(Error::NonPhysical(format!("fidelity {e} for target {}", target.kind())));
    }
    Ok(e.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::OccupationVector;
    use crate::lift::StateVector;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reduced_basis_layout() {
        let b = ReducedBasis::new(2);
        assert_eq!(b.states(), &[[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]);
        for n in 0..8 {
            assert_eq!(ReducedBasis::new(n).len(), (n + 1) * (n + 2) / 2);
        }
    }

    #[test]
    fn mixed_input_three_two() {
        let rho = mixed_input(3, 2).unwrap();
        let DensityBasis::Full(b) = rho.basis() else { panic!() };
        for v in [[1, 0, 1], [1, 1, 0], [0, 1, 1]] {
            let p = b.position(&v).unwrap();
            assert!(approx(rho.element(p, p).re, 1.0 / 3.0, 1e-15));
        }
        assert!(approx(rho.trace().re, 1.0, 1e-15));
        let nonzero = rho.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn mixed_input_pure_and_six() {
        let rho = mixed_input(3, 3).unwrap();
        assert_eq!(rho.matrix().len(), 100);
        let DensityBasis::Full(b) = rho.basis() else { panic!() };
        assert_eq!(
            rho.element(b.position(&[1, 1, 1]).unwrap(), b.position(&[1, 1, 1]).unwrap())
                .re,
            1.0
        );
        let rho = mixed_input(4, 2).unwrap();
        let diag: Vec<f64> = rho
            .matrix()
            .diagonal()
            .iter()
            .map(|z| z.re)
            .filter(|&x| x > 0.0)
            .collect();
        assert_eq!(diag.len(), 6);
        assert!(diag.iter().all(|&x| approx(x, 1.0 / 6.0, 1e-15)));
        assert!(mixed_input(2, 3).is_err());
    }

    #[test]
    fn trace_of_identity_evolution() {
        let rho = mixed_input(3, 2).unwrap();
        let red = partial_trace(&rho, (1, 2)).unwrap();
        let DensityBasis::Reduced(b) = red.basis() else {
            panic!()
        };
        for occ in [[1, 0], [1, 1], [0, 1]] {
            let p = b.position(occ).unwrap();
            assert!(approx(red.element(p, p).re, 1.0 / 3.0, 1e-15));
        }
        assert!(approx(red.trace().re, 1.0, 1e-15));
        let nonzero = red.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn pure_product_reduction() {
        let b = Arc::new(enumerate_basis(3, 2).unwrap());
        let s = StateVector::basis_state(b, &OccupationVector::new(vec![1, 0, 1]).unwrap()).unwrap();
        let red = partial_trace(&s.projector(), (1, 3)).unwrap();
        let DensityBasis::Reduced(rb) = red.basis() else {
            panic!()
        };
        let p = rb.position([1, 1]).unwrap();
        assert_eq!(red.element(p, p).re, 1.0);
        assert!(approx(red.trace().re, 1.0, 1e-15));
    }

    #[test]
    fn keep_pair_validation() {
        let rho = mixed_input(3, 2).unwrap();
        assert_eq!(partial_trace(&rho, (2, 2)).unwrap_err(), Error::InvalidKeepPair(2, 2));
        assert!(matches!(partial_trace(&rho, (1, 4)), Err(Error::ModeOutOfRange { .. })));
        assert!(matches!(partial_trace(&rho, (0, 1)), Err(Error::ModeOutOfRange { .. })));
        let red = partial_trace(&rho, (1, 2)).unwrap();
        assert!(partial_trace(&red, (1, 2)).is_err());
    }

    #[test]
    fn target_amplitudes() {
        let b = ReducedBasis::new(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = TargetState::new(TargetKind::PsiPlus).unwrap().on_basis(&b);
        assert_eq!(psi[b.position([1, 0]).unwrap()].re, h);
        assert_eq!(psi[b.position([0, 1]).unwrap()].re, h);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let phi = TargetState::new(TargetKind::PhiMinus).unwrap().on_basis(&b);
        assert_eq!(phi[b.position([0, 0]).unwrap()].re, h);
        assert_eq!(phi[b.position([1, 1]).unwrap()].re, -h);
        assert_eq!(
            TargetState::new(TargetKind::NoonPlus(1)).unwrap().on_basis(&b),
            TargetState::new(TargetKind::PsiPlus).unwrap().on_basis(&b)
        );
        assert_eq!(
            TargetState::new(TargetKind::NoonMinus(0)).unwrap_err(),
            Error::EmptyNoon
        );
    }

    #[test]
    fn identity_network_fidelity() {
        let red = partial_trace(&mixed_input(3, 2).unwrap(), (1, 2)).unwrap();
        let p = probability(&red, &TargetState::new(TargetKind::PsiPlus).unwrap()).unwrap();
        assert!(approx(p, 1.0 / 3.0, 1e-15));
        let full = mixed_input(3, 2).unwrap();
        assert!(matches!(
            probability(&full, &TargetState::new(TargetKind::PsiPlus).unwrap()),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn target_names() {
        for k in TargetKind::all(3) {
            let short = k.to_string();
            let short = short.split('(').next().unwrap();
            assert_eq!(TargetKind::parse(short, 3).unwrap(), k);
        }
        assert!(TargetKind::parse("bell", 2).is_err());
    }
}
