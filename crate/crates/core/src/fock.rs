//! Occupation-number bases for a fixed total photon number.
//!
//! A state labelled by the occupation vector `v` stands for
//! `prod_k (a_k†)^{v_k} / sqrt(v_k!)` applied to the vacuum. Hard-core
//! vectors (entries in `{0, 1}`) carry no factorial factors.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon counts per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(occ: Vec<u32>) -> Result<Self> {
        if occ.is_empty() {
            return Err(Error::InvalidModeCount(0));
        }
        Ok(OccupationVector(occ))
    }

    /// Builds a vector from signed entries, rejecting negative counts.
    pub fn from_signed(occ: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(occ.len());
        for (mode, &value) in occ.iter().enumerate() {
            if value < 0 {
                return Err(Error::NegativeOccupation { mode: mode + 1, value });
            }
            out.push(value as u32);
        }
        Self::new(out)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_hardcore(&self) -> bool {
        self.0.iter().all(|&v| v <= 1)
    }

    /// `prod_k v_k!` in exact arithmetic.
    pub fn factorial_product(&self) -> u128 {
        self.0.iter().map(|&v| factorial(v as usize)).product()
    }
}

impl std::ops::Index<usize> for OccupationVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        let sep = if self.0.iter().any(|&v| v > 9) { "," } else { "" };
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "{sep}")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "⟩")
    }
}

/// All occupation vectors of `modes` modes holding `photons` photons, in
/// lexicographically descending order.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    photons: usize,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

impl FockBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, p: usize) -> &OccupationVector {
        &self.states[p]
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Result<usize> {
        self.index
            .get(occ)
            .copied()
            .ok_or_else(|| Error::NotInBasis(occ.as_slice().to_vec()))
    }

    /// Same as [`index_of`](Self::index_of) for a raw slice.
    pub fn position(&self, occ: &[u32]) -> Option<usize> {
        // HashMap lookup needs an owned key; bases are small.
        self.index.get(&OccupationVector(occ.to_vec())).copied()
    }
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.photons == other.photons
    }
}

pub fn enumerate_basis(modes: usize, photons: usize) -> Result<FockBasis> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(modes));
    }
    let mut states = Vec::new();
    let mut current = vec![0u32; modes];
    fill_descending(&mut current, 0, photons, &mut states);
    let index = states.iter().enumerate().map(|(p, s)| (s.clone(), p)).collect();
    Ok(FockBasis {
        modes,
        photons,
        states,
        index,
    })
}

fn fill_descending(cur: &mut [u32], pos: usize, remaining: usize, out: &mut Vec<OccupationVector>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining as u32;
        out.push(OccupationVector(cur.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v as u32;
        fill_descending(cur, pos + 1, remaining - v, out);
    }
}

/// Occupation vectors with entries in `{0, 1}` summing to `photons`.
pub fn hardcore_vectors(modes: usize, photons: usize) -> Result<Vec<OccupationVector>> {
    if modes == 0 {
        return Err(Error::InvalidModeCount(modes));
    }
    if photons > modes {
        return Err(Error::TooManyPhotons { modes, photons });
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; modes];
    fill_hardcore(&mut cur, 0, photons, &mut out);
    Ok(out)
}

fn fill_hardcore(cur: &mut [u32], pos: usize, remaining: usize, out: &mut Vec<OccupationVector>) {
    let left = cur.len() - pos;
    if remaining > left {
        return;
    }
    if pos == cur.len() {
        out.push(OccupationVector(cur.to_vec()));
        return;
    }
    if remaining > 0 {
        cur[pos] = 1;
        fill_hardcore(cur, pos + 1, remaining - 1, out);
    }
    cur[pos] = 0;
    fill_hardcore(cur, pos + 1, remaining, out);
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Exact binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(v: &[u32]) -> OccupationVector {
        OccupationVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_mode_two_photon_listing() {
        let b = enumerate_basis(2, 2).unwrap();
        assert_eq!(b.states(), &[occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
        assert_eq!(b.index_of(&occ(&[1, 1])).unwrap(), 1);
    }

    #[test]
    fn three_mode_two_photon_basis() {
        let b = enumerate_basis(3, 2).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.index_of(&occ(&[1, 0, 1])).is_ok());
        assert!(b.index_of(&occ(&[0, 2, 0])).is_ok());
        let p = b.index_of(&occ(&[1, 0, 1])).unwrap();
        assert_eq!(b.state(p), &occ(&[1, 0, 1]));
    }

    #[test]
    fn empty_system() {
        let b = enumerate_basis(1, 0).unwrap();
        assert_eq!(b.states(), &[occ(&[0])]);
    }

    #[test]
    fn zero_modes_rejected() {
        assert_eq!(enumerate_basis(0, 2).unwrap_err(), Error::InvalidModeCount(0));
        assert!(hardcore_vectors(0, 0).is_err());
    }

    #[test]
    fn hardcore_three_two() {
        let v = hardcore_vectors(3, 2).unwrap();
        assert_eq!(v, vec![occ(&[1, 1, 0]), occ(&[1, 0, 1]), occ(&[0, 1, 1])]);
        assert_eq!(hardcore_vectors(4, 2).unwrap().len(), 6);
        assert_eq!(hardcore_vectors(5, 0).unwrap(), vec![occ(&[0; 5])]);
    }

    #[test]
    fn hardcore_rejects_overfull() {
        assert_eq!(
            hardcore_vectors(2, 3).unwrap_err(),
            Error::TooManyPhotons { modes: 2, photons: 3 }
        );
    }

    #[test]
    fn invalid_lookups() {
        let b = enumerate_basis(2, 2).unwrap();
        assert!(matches!(
            OccupationVector::from_signed(&[3, -1]),
            Err(Error::NegativeOccupation { mode: 2, value: -1 })
        ));
        assert!(matches!(b.index_of(&occ(&[3, 0])), Err(Error::NotInBasis(_))));
        assert!(b.index_of(&occ(&[1, 1, 0])).is_err());
    }

    #[test]
    fn cardinalities() {
        for m in 1..=7 {
            for n in 0..=m {
                let b = enumerate_basis(m, n).unwrap();
                assert_eq!(b.len() as u128, binomial(n + m - 1, m - 1));
                assert_eq!(hardcore_vectors(m, n).unwrap().len() as u128, binomial(m, n));
                for (p, s) in b.states().iter().enumerate() {
                    assert_eq!(b.index_of(s).unwrap(), p);
                    assert_eq!(s.total(), n);
                }
                // strictly descending
                assert!(b.states().windows(2).all(|w| w[0] > w[1]));
            }
        }
    }

    #[test]
    fn exact_combinatorics() {
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(factorial(20), 2_432_902_008_176_640_000);
        assert_eq!(occ(&[2, 3, 0]).factorial_product(), 12);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn display_uses_ket_notation() {
        assert_eq!(occ(&[1, 0, 1]).to_string(), "|101⟩");
    }
}
