//! Normal-ordered products against truncated Fock-space matrices.

use bsnet::symop::{expand_product, OperatorPolynomial};
use bsnet::CMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

const MODES: usize = 2;
const CUTOFF: usize = 7;

/// Index of `(n1, n2)` in the truncated product space.
fn idx(occ: &[usize]) -> usize {
    occ[0] * CUTOFF + occ[1]
}

fn ladder(mode: usize, creation: bool) -> CMatrix {
    let dim = CUTOFF.pow(MODES as u32);
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..CUTOFF {
        for b in 0..CUTOFF {
            let mut occ = [a, b];
            let n = occ[mode];
            let from = idx(&occ);
            if creation && n + 1 < CUTOFF {
                occ[mode] += 1;
                m[(idx(&occ), from)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
            } else if !creation && n > 0 {
                occ[mode] -= 1;
                m[(idx(&occ), from)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
    }
    m
}

fn ladders() -> Vec<(CMatrix, CMatrix)> {
    (0..MODES).map(|k| (ladder(k, true), ladder(k, false))).collect()
}

fn to_matrix(p: &OperatorPolynomial, ops: &[(CMatrix, CMatrix)]) -> CMatrix {
    let dim = CUTOFF.pow(MODES as u32);
    let mut total = CMatrix::zeros(dim, dim);
    for (mono, c) in p.terms() {
        let mut term = CMatrix::identity(dim, dim);
        for (k, (up, _)) in ops.iter().enumerate() {
            for _ in 0..mono.create[k] {
                term = &term * up;
            }
        }
        for (k, (_, down)) in ops.iter().enumerate() {
            for _ in 0..mono.annihilate[k] {
                term = &term * down;
            }
        }
        total += term * *c;
    }
    total
}

fn linear_factor() -> impl Strategy<Value = (bool, Vec<(f64, f64)>)> {
    (
        any::<bool>(),
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), MODES),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_matrix_product(factors in prop::collection::vec(linear_factor(), 1..4)) {
        let polys: Vec<OperatorPolynomial> = factors
            .iter()
            .map(|(creation, cs)| {
                let cs: Vec<Complex64> = cs.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
                if *creation {
                    OperatorPolynomial::linear_creation(&cs)
                } else {
                    OperatorPolynomial::linear_annihilation(&cs)
                }
            })
            .collect();
        let product = expand_product(MODES, &polys).unwrap();
        let ops = ladders();
        let mut direct = to_matrix(&OperatorPolynomial::one(MODES), &ops);
        for p in &polys {
            direct = &direct * &to_matrix(p, &ops);
        }
        let normal = to_matrix(&product, &ops);
        // truncation is exact while inputs plus raised quanta stay below the cutoff
        let small = CUTOFF - 1 - factors.len();
        for a in 0..=small {
            for b in 0..=small - a {
                let col = idx(&[a, b]);
                for row in 0..normal.nrows() {
                    let d = (normal[(row, col)] - direct[(row, col)]).norm();
                    prop_assert!(d < 1e-12, "input ({a},{b}) row {row}: {d}");
                }
            }
        }
    }
}

#[test]
fn commutator_is_identity() {
    let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let a = OperatorPolynomial::linear_annihilation(&e1);
    let ad = OperatorPolynomial::linear_creation(&e1);
    let ab = a.mul(&ad).unwrap();
    let ba = ad.mul(&a).unwrap();
    assert_eq!(ab.coefficient(&[1, 0], &[1, 0]), Complex64::new(1.0, 0.0));
    assert_eq!(ab.coefficient(&[0, 0], &[0, 0]), Complex64::new(1.0, 0.0));
    assert_eq!(ba.coefficient(&[0, 0], &[0, 0]), Complex64::new(0.0, 0.0));
}
