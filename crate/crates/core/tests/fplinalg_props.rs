mod common;

use proptest::prelude::*;
use provar_core::fplinalg::*;
use rand::Rng;

use common::{diag, mat_inv, mat_mul, pow_mod, random_invertible, rng, to_i64};

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v
}

/// `P⁻¹ M P` computed on the test side.
fn conjugate(m: &MatrixFp, p_mat: &MatrixFp) -> Vec<Vec<u64>> {
    let p = m.p();
    let inv = mat_inv(p_mat.rows(), p).expect("change of basis is invertible");
    mat_mul(&mat_mul(&inv, m.rows(), p), p_mat.rows(), p)
}

fn is_diag(m: &[Vec<u64>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| i == j || x == 0))
}

fn random_case(seed: u64) -> (u64, Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let mut r = rng(seed);
    let p = [3u64, 5, 7, 11][r.gen_range(0..4)];
    let n = r.gen_range(1..=4);
    let basis = random_invertible(&mut r, n, p);
    (p, basis, (0..2).map(|_| (0..n).map(|_| r.gen_range(1..p)).collect()).collect())
}

proptest! {
    #[test]
    fn diagonalize_round_trip(seed in any::<u64>()) {
        let (p, basis, evs) = random_case(seed);
        let m = mat_mul(&mat_mul(&basis, &diag(&evs[0]), p), &mat_inv(&basis, p).unwrap(), p);
        let m = MatrixFp::new(p, to_i64(&m)).unwrap();
        let dz = diagonalize(&m).unwrap();
        let c = conjugate(&m, &dz.change_of_basis);
        prop_assert!(is_diag(&c));
        prop_assert_eq!(c.iter().enumerate().map(|(i, r)| r[i]).collect::<Vec<_>>(), dz.eigenvalues.clone());
        prop_assert_eq!(sorted(dz.eigenvalues), sorted(evs[0].clone()));
    }

    #[test]
    fn simultaneous_round_trip(seed in any::<u64>()) {
        let (p, basis, evs) = random_case(seed);
        let inv = mat_inv(&basis, p).unwrap();
        let ms: Vec<MatrixFp> = evs
            .iter()
            .map(|e| MatrixFp::new(p, to_i64(&mat_mul(&mat_mul(&basis, &diag(e), p), &inv, p))).unwrap())
            .collect();
        let sd = simultaneous_diagonalize(&ms).unwrap();
        for (k, m) in ms.iter().enumerate() {
            let c = conjugate(m, &sd.change_of_basis);
            prop_assert!(is_diag(&c));
            prop_assert_eq!(c.iter().enumerate().map(|(i, r)| r[i]).collect::<Vec<_>>(), sd.eigenvalues[k].clone());
            prop_assert_eq!(sorted(sd.eigenvalues[k].clone()), sorted(evs[k].clone()));
        }
        // presentation read off the pair: every q_ij is a root of unity of order d_j
        let orders: Vec<u64> = vec![p - 1, p - 1];
        let pres = action_to_presentation(&ms, &orders, p, p - 1).unwrap();
        for row in &pres.q {
            for (j, &q) in row.iter().enumerate() {
                prop_assert_eq!(pow_mod(q, orders[j], p), 1);
            }
        }
    }

    #[test]
    fn eigenvalues_are_conjugation_invariant(seed in any::<u64>()) {
        let (p, basis, evs) = random_case(seed);
        let mut r = rng(seed ^ 7);
        let other = random_invertible(&mut r, basis.len(), p);
        let m = mat_mul(&mat_mul(&basis, &diag(&evs[0]), p), &mat_inv(&basis, p).unwrap(), p);
        let m2 = mat_mul(&mat_mul(&other, &m, p), &mat_inv(&other, p).unwrap(), p);
        let a = diagonalize(&MatrixFp::new(p, to_i64(&m)).unwrap()).unwrap();
        let b = diagonalize(&MatrixFp::new(p, to_i64(&m2)).unwrap()).unwrap();
        prop_assert_eq!(sorted(a.eigenvalues), sorted(b.eigenvalues));
    }
}

#[test]
fn non_diagonalizable_inputs() {
    // a Jordan block
    let j = MatrixFp::new(5, vec![vec![1, 1], vec![0, 1]]).unwrap();
    assert!(diagonalize(&j).is_err());
    // non-commuting pair
    let a = MatrixFp::new(5, vec![vec![1, 0], vec![0, 4]]).unwrap();
    let b = MatrixFp::new(5, vec![vec![0, 1], vec![1, 0]]).unwrap();
    assert!(simultaneous_diagonalize(&[a, b]).is_err());
}
