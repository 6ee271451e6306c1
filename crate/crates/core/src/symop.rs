//! Normal-ordered bosonic operator polynomials.
//!
//! A polynomial is a sparse map from monomials
//! `Π_p (a_p†)^{c_p} Π_p a_p^{d_p}` (all creators left of all annihilators)
//! to complex coefficients. Products are re-normal-ordered with
//! `[a_p, a_q†] = δ_pq`, so expanding a product of transformed operators and
//! applying it to the vacuum yields the evolved state exactly, with no
//! separate bookkeeping of which factor contributed which term.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{binomial, enumerate_basis, factorial, hardcore_vectors, FockBasis};
use crate::lift::{FockOperator, StateVector};
use crate::mesh::{closed_form_coefficients, TransferMatrix};
use crate::states::{DensityBasis, DensityOperator};
use crate::{CMatrix, CVector, ONE, ZERO};

const PRUNE: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub create: Vec<u32>,
    pub annihilate: Vec<u32>,
}

impl Monomial {
    fn identity(modes: usize) -> Self {
        Monomial {
            create: vec![0; modes],
            annihilate: vec![0; modes],
        }
    }

    pub fn is_creation_only(&self) -> bool {
        self.annihilate.iter().all(|&d| d == 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPolynomial {
    modes: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl OperatorPolynomial {
    pub fn zero(modes: usize) -> Self {
        OperatorPolynomial {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(modes: usize) -> Self {
        let mut p = Self::zero(modes);
        p.terms.insert(Monomial::identity(modes), ONE);
        p
    }

    /// `Σ_p coeffs[p] a_{p+1}†`.
    pub fn linear_creation(coeffs: &[Complex64]) -> Self {
        Self::linear(coeffs, true)
    }

    /// `Σ_p coeffs[p] a_{p+1}`.
    pub fn linear_annihilation(coeffs: &[Complex64]) -> Self {
        Self::linear(coeffs, false)
    }

    fn linear(coeffs: &[Complex64], creation: bool) -> Self {
        let modes = coeffs.len();
        let mut p = Self::zero(modes);
        for (k, &c) in coeffs.iter().enumerate() {
            let mut mono = Monomial::identity(modes);
            if creation {
                mono.create[k] = 1;
            } else {
                mono.annihilate[k] = 1;
            }
            p.add_term(mono, c);
        }
        p
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, create: &[u32], annihilate: &[u32]) -> Complex64 {
        let key = Monomial {
            create: create.to_vec(),
            annihilate: annihilate.to_vec(),
        };
        self.terms.get(&key).copied().unwrap_or(ZERO)
    }

    fn add_term(&mut self, mono: Monomial, c: Complex64) {
        let slot = self.terms.entry(mono).or_insert(ZERO);
        *slot += c;
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() > PRUNE);
        self
    }

    pub fn scale(&self, s: Complex64) -> Self {
        OperatorPolynomial {
            modes: self.modes,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
        .prune()
    }

    /// Normal-ordered product `self · rhs`.
    pub fn mul(&self, rhs: &OperatorPolynomial) -> Result<OperatorPolynomial> {
        if self.modes != rhs.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: rhs.modes,
            });
        }
        let mut out = Self::zero(self.modes);
        for (ml, cl) in &self.terms {
            for (mr, cr) in &rhs.terms {
                multiply_monomials(ml, mr, cl * cr, &mut out);
            }
        }
        Ok(out.prune())
    }

    /// Amplitudes of `self |0⟩` over `basis`. Terms with annihilators vanish
    /// on the vacuum; the surviving `Π (a_p†)^{c_p}` contribute
    /// `sqrt(Π c_p!)` to `|c⟩`.
    pub fn vacuum_amplitudes(&self, basis: &FockBasis) -> Result<CVector> {
        if basis.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: basis.modes(),
                found: self.modes,
            });
        }
        let mut amps = CVector::zeros(basis.len());
        for (mono, c) in &self.terms {
            if !mono.is_creation_only() {
                continue;
            }
            let p = basis.position(&mono.create).ok_or_else(|| {
                Error::BasisMismatch(format!(
                    "term {:?} has {} photons, basis holds {}",
                    mono.create,
                    mono.create.iter().sum::<u32>(),
                    basis.photons()
                ))
            })?;
            let norm: u128 = mono.create.iter().map(|&e| factorial(e as usize)).product();
            amps[p] += c * (norm as f64).sqrt();
        }
        Ok(amps)
    }
}

/// Accumulates `(Π c^α a^β)(Π c^γ a^δ)` into `out`. Per mode,
/// `a^β (a†)^γ = Σ_k C(β,k) C(γ,k) k! (a†)^{γ−k} a^{β−k}`, and distinct
/// modes commute.
fn multiply_monomials(left: &Monomial, right: &Monomial, coeff: Complex64, out: &mut OperatorPolynomial) {
    let modes = left.create.len();
    let mut create = vec![0u32; modes];
    let mut annihilate = vec![0u32; modes];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        p: usize,
        left: &Monomial,
        right: &Monomial,
        weight: f64,
        create: &mut Vec<u32>,
        annihilate: &mut Vec<u32>,
        coeff: Complex64,
        out: &mut OperatorPolynomial,
    ) {
        if p == create.len() {
            out.add_term(
                Monomial {
                    create: create.clone(),
                    annihilate: annihilate.clone(),
                },
                coeff * weight,
            );
            return;
        }
        let (beta, gamma) = (left.annihilate[p] as usize, right.create[p] as usize);
        for k in 0..=beta.min(gamma) {
            let w = (binomial(beta, k) * binomial(gamma, k) * factorial(k)) as f64;
            create[p] = left.create[p] + (gamma - k) as u32;
            annihilate[p] = (beta - k) as u32 + right.annihilate[p];
            rec(p + 1, left, right, weight * w, create, annihilate, coeff, out);
        }
    }
    rec(0, left, right, 1.0, &mut create, &mut annihilate, coeff, out);
}

fn check_mode(modes: usize, k: usize) -> Result<()> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if k == 0 || k > modes {
        return Err(Error::ModeOutOfRange { index: k, modes });
    }
    Ok(())
}

/// Image of `a_k†` under the equal-angle chain, from the closed-form
/// nested expansion.
pub fn transformed_creation(modes: usize, k: usize, theta: f64) -> Result<OperatorPolynomial> {
    check_mode(modes, k)?;
    let coeffs = closed_form_coefficients(modes, k, theta.cos(), Complex64::new(0.0, theta.sin()))?;
    Ok(OperatorPolynomial::linear_creation(&coeffs).prune())
}

/// Image of `a_k` under the equal-angle chain: the same expansion with
/// reflection factor `−i sinθ`.
pub fn transformed_annihilation(modes: usize, k: usize, theta: f64) -> Result<OperatorPolynomial> {
    check_mode(modes, k)?;
    let coeffs = closed_form_coefficients(modes, k, theta.cos(), Complex64::new(0.0, -theta.sin()))?;
    Ok(OperatorPolynomial::linear_annihilation(&coeffs).prune())
}

/// Normal-ordered product of `factors`, left to right. The empty product
/// is the identity on `modes` modes.
pub fn expand_product(modes: usize, factors: &[OperatorPolynomial]) -> Result<OperatorPolynomial> {
    factors
        .iter()
        .try_fold(OperatorPolynomial::one(modes), |acc, f| acc.mul(f))
}

fn check_channels(modes: usize, photons: usize, channels: &[usize]) -> Result<()> {
    let bad = || Error::InvalidChannels {
        modes,
        channels: channels.to_vec(),
    };
    if photons > modes {
        return Err(Error::TooManyPhotons { modes, photons });
    }
    if channels.len() != modes - photons {
        return Err(bad());
    }
    if channels.iter().any(|&k| k == 0 || k > modes) || channels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(())
}

/// Evolved `a_{k_1} … a_{k_{m−n}} a_1† … a_m† |0⟩` for the equal-angle
/// chain, i.e. the hard-core input with zeros at `zero_channels`.
pub fn general_output_state(modes: usize, photons: usize, zero_channels: &[usize], theta: f64) -> Result<StateVector> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    check_channels(modes, photons, zero_channels)?;
    let mut factors = Vec::with_capacity(2 * modes - photons);
    for &k in zero_channels {
        factors.push(transformed_annihilation(modes, k, theta)?);
    }
    for k in 1..=modes {
        factors.push(transformed_creation(modes, k, theta)?);
    }
    let product = expand_product(modes, &factors)?;
    let basis = Arc::new(enumerate_basis(modes, photons)?);
    let amps = product.vacuum_amplitudes(&basis)?;
    StateVector::new(basis, amps)
}

/// Zero-channel sets for every hard-core placement of `photons` photons,
/// in the same order as [`hardcore_vectors`].
pub fn channel_choices(modes: usize, photons: usize) -> Result<Vec<Vec<usize>>> {
    Ok(hardcore_vectors(modes, photons)?
        .iter()
        .map(|v| {
            v.as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == 0)
                .map(|(k, _)| k + 1)
                .collect()
        })
        .collect())
}

/// `(1/C(m,n)) Σ |φ′⟩⟨φ′|` over all zero-channel choices.
pub fn general_output_density(modes: usize, photons: usize, theta: f64) -> Result<DensityOperator> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    let choices = channel_choices(modes, photons)?;
    let states = choices
        .par_iter()
        .map(|ch| general_output_state(modes, photons, ch, theta))
        .collect::<Result<Vec<_>>>()?;
    let basis = states[0].basis().clone();
    let weight = 1.0 / choices.len() as f64;
    let mut acc = CMatrix::zeros(basis.len(), basis.len());
    for s in &states {
        let a = s.amplitudes();
        acc += a * a.adjoint() * Complex64::new(weight, 0.0);
    }
    Ok(DensityOperator::from_parts(DensityBasis::Full(basis), acc))
}

/// Fock-space operator of an arbitrary transfer matrix built symbolically:
/// column `v` is `Π_k (row_k · a†)^{v_k} / sqrt(v_k!)` applied to vacuum.
pub(crate) fn lift_symbolic(t: &TransferMatrix, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    let modes = basis.modes();
    if t.modes() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: t.modes(),
        });
    }
    let rows: Vec<OperatorPolynomial> = (1..=modes)
        .map(|k| OperatorPolynomial::linear_creation(&t.row(k)))
        .collect();
    let columns = basis
        .states()
        .par_iter()
        .map(|occ| {
            let factors: Vec<OperatorPolynomial> = occ
                .as_slice()
                .iter()
                .enumerate()
                .flat_map(|(k, &v)| std::iter::repeat_n(rows[k].clone(), v as usize))
                .collect();
            let norm = (occ.factorial_product() as f64).sqrt();
            let product = expand_product(modes, &factors)?.scale(Complex64::new(1.0 / norm, 0.0));
            product.vacuum_amplitudes(basis)
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = basis.len();
    FockOperator::new(basis.clone(), CMatrix::from_fn(dim, dim, |i, j| columns[j][i]))
}
