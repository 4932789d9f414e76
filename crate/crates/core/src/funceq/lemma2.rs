//! Randomized check of the block-Vandermonde determinant identity that
//! underpins the uniqueness argument for the boundary-term system: the
//! nk x nk matrix c_{u,v} = (w^{u mod k} L_{u/k})^{v/n} [u/k = v mod n]
//! has determinant +- (prod_{i<j} (w^j - w^i))^n * prod_l L_l^C(k,2).

use crate::linalg::Matrix;
use crate::ring::{PrimeField, Ring};
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug, serde::Serialize)]
pub struct Lemma2Report {
    pub trials: usize,
    pub matches: usize,
}

/// Element of exact multiplicative order k mod p; requires k | p-1.
fn root_of_unity(field: &PrimeField, k: u64) -> u64 {
    let p = field.modulus();
    assert_eq!((p - 1) % k, 0, "need p = 1 mod k");
    'cand: for g in 2..p {
        let w = field.pow(&g, (p - 1) / k);
        // exact order k: no proper divisor d of k may satisfy w^d = 1
        for d in 1..k {
            if k % d == 0 && field.pow(&w, d) == 1 {
                continue 'cand;
            }
        }
        return w;
    }
    assert_eq!(k, 1);
    1
}

pub fn check_once(field: &PrimeField, n: usize, k: usize, lambdas: &[u64]) -> bool {
    assert_eq!(lambdas.len(), n);
    let w = root_of_unity(field, k as u64);
    let size = n * k;
    let m = Matrix::from_fn(size, size, |u, v| {
        if u / k != v % n {
            return 0u64;
        }
        let base = field.mul(&field.pow(&w, (u % k) as u64), &lambdas[u / k]);
        field.pow(&base, (v / n) as u64)
    });
    let det = m.det(field);

    let mut closed = 1u64;
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = field.sub(&field.pow(&w, j as u64), &field.pow(&w, i as u64));
            closed = field.mul(&closed, &diff);
        }
    }
    closed = field.pow(&closed, n as u64);
    let binom = (k * (k - 1) / 2) as u64;
    for &l in lambdas {
        closed = field.mul(&closed, &field.pow(&l, binom));
    }

    det == closed || det == field.neg(&closed)
}

/// Runs `trials` random lambda draws at fixed n, k, p; the prime must
/// satisfy p = 1 mod k so the needed root of unity exists.
pub fn lemma2_check_at(n: usize, k: usize, p: u64, trials: usize, seed: u64) -> Lemma2Report {
    assert!(k >= 1 && (p - 1) % k as u64 == 0, "need p = 1 mod k");
    let field = PrimeField::new(p);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0;
    for _ in 0..trials {
        let lambdas: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p)).collect();
        if check_once(&field, n, k, &lambdas) {
            matches += 1;
        }
    }
    Lemma2Report { trials, matches }
}

/// Runs `trials` random (n, k, lambda) instances over F_97, which has
/// roots of unity of every order up to 4.
pub fn lemma2_check(trials: usize, seed: u64) -> Lemma2Report {
    let field = PrimeField::new(97);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=4);
        let lambdas: Vec<u64> = (0..n).map(|_| rng.gen_range(1..97)).collect();
        if check_once(&field, n, k, &lambdas) {
            matches += 1;
        }
    }
    Lemma2Report { trials, matches }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_nontrivial_case_by_hand() {
        // n=1, k=2: matrix [[1, L], [1, wL]] with w = -1, determinant -2L
        let field = PrimeField::new(97);
        let w = root_of_unity(&field, 2);
        assert_eq!(w, 96);
        for l in [1u64, 5, 40] {
            let m = Matrix::from_fn(2, 2, |u, v| {
                let base = field.mul(&field.pow(&w, u as u64), &l);
                field.pow(&base, v as u64)
            });
            let det = m.det(&field);
            let want = field.neg(&field.mul(&2, &l));
            assert_eq!(det, want);
        }
    }

    #[test]
    fn identity_is_the_identity_for_k_1() {
        let field = PrimeField::new(97);
        assert!(check_once(&field, 3, 1, &[7, 8, 9]));
    }

    #[test]
    fn hundred_random_trials_all_match() {
        let r = lemma2_check(100, 0xB10C);
        assert_eq!(r.matches, r.trials);
    }
}
