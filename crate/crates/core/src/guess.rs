//! Equation guessing over a prime field: given the first N terms of a
//! series, search for a linear recurrence with polynomial coefficients, a
//! linear ODE with polynomial coefficients, or a polynomial equation
//! P(t, F) = 0, whichever the caller asks for.
//!
//! Candidates are fitted as nullspace vectors of a coefficient matrix built
//! from a training prefix, then accepted only if they annihilate the whole
//! series including a held-out tail. A fit that merely interpolates the
//! training rows dies on the holdout, which is the entire point of it.

use crate::linalg::Matrix;
use crate::ring::{Field, PrimeField, Ring};

#[derive(Clone, Debug)]
pub struct GuessOptions {
    pub max_order: usize,
    pub max_degree: usize,
    /// held-out tail length; defaults to max(20, N/20)
    pub holdout: Option<usize>,
    /// extra rows beyond the unknown count, when available
    pub row_slack: usize,
}

impl Default for GuessOptions {
    fn default() -> Self {
        GuessOptions { max_order: 6, max_degree: 8, holdout: None, row_slack: 40 }
    }
}

fn holdout_len(n: usize, opts: &GuessOptions) -> usize {
    opts.holdout.unwrap_or_else(|| 20.max(n / 20))
}

/// Dense polynomial over F_p, low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMod {
    pub coeffs: Vec<u64>,
}

impl PolyMod {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, field: &PrimeField, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, &x), &c);
        }
        acc
    }
}

/// sum_i c_i(n) a(n+i) = 0 for all n; coeffs[i] = c_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub prime: u64,
    pub coeffs: Vec<PolyMod>,
}

/// sum_i q_i(t) F^(i)(t) = 0; coeffs[i] = q_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential {
    pub prime: u64,
    pub coeffs: Vec<PolyMod>,
}

/// sum_i p_i(t) F^i = 0; coeffs[i] = p_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebraic {
    pub prime: u64,
    pub coeffs: Vec<PolyMod>,
}

impl Recurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|p| p.coeffs.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

impl Differential {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|p| p.coeffs.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

impl Algebraic {
    pub fn degree_f(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn degree_t(&self) -> usize {
        self.coeffs.iter().map(|p| p.coeffs.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// Budget schedule shared by all three fitters: (order, degree) pairs in
/// increasing order of order+degree, ties broken by smaller order.
fn schedule(max_order: usize, max_degree: usize, min_order: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for total in min_order..=(max_order + max_degree) {
        for r in min_order..=total.min(max_order) {
            let d = total - r;
            if d <= max_degree {
                out.push((r, d));
            }
        }
    }
    out
}

fn split_vector(v: &[u64], blocks: usize, width: usize) -> Vec<PolyMod> {
    (0..blocks)
        .map(|i| PolyMod { coeffs: v[i * width..(i + 1) * width].to_vec() })
        .collect()
}

/// Scales so the first nonzero entry is 1, making output deterministic.
fn normalize(field: &PrimeField, v: &mut [u64]) {
    if let Some(&lead) = v.iter().find(|&&c| c != 0) {
        let inv = field.inv(&lead).unwrap();
        for c in v.iter_mut() {
            *c = field.mul(c, &inv);
        }
    }
}

/// Core fitting loop: rows are linear constraints over the unknown
/// coefficient vector; `full_rows` must yield every constraint the series
/// supports so verification covers the holdout.
fn fit_blocks(
    field: &PrimeField,
    blocks: usize,
    width: usize,
    train_rows: usize,
    total_rows: usize,
    row: impl Fn(usize, usize, usize) -> u64,
    opts: &GuessOptions,
) -> Option<Vec<u64>> {
    let unknowns = blocks * width;
    if train_rows < unknowns {
        return None;
    }
    let use_rows = train_rows.min(unknowns + opts.row_slack);
    let m = Matrix::from_fn(use_rows, unknowns, |r, c| row(r, c / width, c % width));
    let null = m.nullspace(field);
    'cand: for mut v in null {
        normalize(field, &mut v);
        // highest block must be nonzero or the fit is a lower-order relation
        if v[(blocks - 1) * width..].iter().all(|&c| c == 0) {
            continue;
        }
        for r in 0..total_rows {
            let mut acc = 0u64;
            for b in 0..blocks {
                for e in 0..width {
                    acc = field.add(&acc, &field.mul(&v[b * width + e], &row(r, b, e)));
                }
            }
            if acc != 0 {
                continue 'cand;
            }
        }
        return Some(v);
    }
    None
}

pub fn fit_recurrence(series: &[u64], prime: u64, opts: &GuessOptions) -> Option<Recurrence> {
    let field = PrimeField::new(prime);
    let n = series.len();
    let hold = holdout_len(n, opts);
    for (r, d) in schedule(opts.max_order, opts.max_degree, 1) {
        if n <= r + hold {
            continue;
        }
        let total_rows = n - r;
        let train_rows = total_rows - hold;
        // constraint at shift s: sum_i c_i(s) * a(s+i) = 0
        let row = |s: usize, i: usize, e: usize| {
            field.mul(&field.pow(&field.reduce_i64(s as i64), e as u64), &series[s + i])
        };
        if let Some(v) = fit_blocks(&field, r + 1, d + 1, train_rows, total_rows, row, opts) {
            return Some(Recurrence { prime, coeffs: split_vector(&v, r + 1, d + 1) });
        }
    }
    None
}

pub fn fit_differential(series: &[u64], prime: u64, opts: &GuessOptions) -> Option<Differential> {
    let field = PrimeField::new(prime);
    let n = series.len();
    let hold = holdout_len(n, opts);
    for (r, d) in schedule(opts.max_order, opts.max_degree, 1) {
        // [t^m] t^e F^(i) = falling(m-e+i, i) * f_{m-e+i}
        if n <= r + d + hold {
            continue;
        }
        let total_rows = n - r;
        let train_rows = total_rows - hold;
        let row = |m: usize, i: usize, e: usize| {
            if m < e {
                return 0u64;
            }
            let idx = m - e + i;
            if idx >= n {
                return 0u64;
            }
            // falling factorial (m-e+i)(m-e+i-1)...(m-e+1)
            let mut fall = 1u64;
            for j in 0..i {
                fall = field.mul(&fall, &field.reduce_i64((idx - j) as i64));
            }
            field.mul(&fall, &series[idx])
        };
        if let Some(v) = fit_blocks(&field, r + 1, d + 1, train_rows, total_rows, row, opts) {
            return Some(Differential { prime, coeffs: split_vector(&v, r + 1, d + 1) });
        }
    }
    None
}

pub fn fit_algebraic(series: &[u64], prime: u64, opts: &GuessOptions) -> Option<Algebraic> {
    let field = PrimeField::new(prime);
    let n = series.len();
    let hold = holdout_len(n, opts);
    // truncated powers of F, computed once at the largest needed degree
    let mut powers: Vec<Vec<u64>> = vec![vec![0; n]; opts.max_order + 1];
    powers[0][0] = 1;
    for i in 1..=opts.max_order {
        let (lo, hi) = powers.split_at_mut(i);
        let prev = &lo[i - 1];
        let cur = &mut hi[0];
        for a in 0..n {
            if prev[a] == 0 {
                continue;
            }
            for b in 0..n - a {
                let add = field.mul(&prev[a], &series[b]);
                cur[a + b] = field.add(&cur[a + b], &add);
            }
        }
    }
    for (r, d) in schedule(opts.max_order, opts.max_degree, 1) {
        if n <= d + hold {
            continue;
        }
        let total_rows = n;
        let train_rows = n - hold;
        // [t^m] t^e F^i
        let row = |m: usize, i: usize, e: usize| {
            if m < e {
                0
            } else {
                powers[i][m - e]
            }
        };
        if let Some(v) = fit_blocks(&field, r + 1, d + 1, train_rows, total_rows, row, opts) {
            return Some(Algebraic { prime, coeffs: split_vector(&v, r + 1, d + 1) });
        }
    }
    None
}

pub fn recurrence_holds(series: &[u64], rec: &Recurrence) -> bool {
    let field = PrimeField::new(rec.prime);
    let r = rec.order();
    if series.len() <= r {
        return false;
    }
    for s in 0..series.len() - r {
        let mut acc = 0u64;
        for (i, c) in rec.coeffs.iter().enumerate() {
            let cv = c.eval(&field, field.reduce_i64(s as i64));
            acc = field.add(&acc, &field.mul(&cv, &series[s + i]));
        }
        if acc != 0 {
            return false;
        }
    }
    true
}

pub fn differential_holds(series: &[u64], de: &Differential) -> bool {
    let field = PrimeField::new(de.prime);
    let r = de.order();
    if series.len() <= r {
        return false;
    }
    for m in 0..series.len() - r {
        let mut acc = 0u64;
        for (i, q) in de.coeffs.iter().enumerate() {
            for (e, &c) in q.coeffs.iter().enumerate() {
                if c == 0 || m + i < e || m + i - e >= series.len() {
                    continue;
                }
                let idx = m + i - e;
                if idx < i {
                    continue;
                }
                let mut fall = 1u64;
                for j in 0..i {
                    fall = field.mul(&fall, &field.reduce_i64((idx - j) as i64));
                }
                acc = field.add(&acc, &field.mul(&c, &field.mul(&fall, &series[idx])));
            }
        }
        if acc != 0 {
            return false;
        }
    }
    true
}

pub fn algebraic_holds(series: &[u64], alg: &Algebraic) -> bool {
    let field = PrimeField::new(alg.prime);
    let n = series.len();
    let mut power = vec![0u64; n];
    power[0] = 1;
    let mut residual = vec![0u64; n];
    for p in &alg.coeffs {
        for (e, &c) in p.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for a in 0..n - e {
                residual[a + e] = field.add(&residual[a + e], &field.mul(&c, &power[a]));
            }
        }
        // power <- power * F, truncated
        let mut next = vec![0u64; n];
        for a in 0..n {
            if power[a] == 0 {
                continue;
            }
            for b in 0..n - a {
                next[a + b] = field.add(&next[a + b], &field.mul(&power[a], &series[b]));
            }
        }
        power = next;
    }
    residual.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(n: usize, p: u64) -> Vec<u64> {
        let field = PrimeField::new(p);
        let mut c = vec![0u64; n];
        c[0] = 1;
        for i in 1..n {
            let mut acc = 0u64;
            for j in 0..i {
                acc = field.add(&acc, &field.mul(&c[j], &c[i - 1 - j]));
            }
            c[i] = acc;
        }
        c
    }

    #[test]
    fn catalan_algebraic_equation() {
        let series = catalan(50, 45007);
        let alg = fit_algebraic(&series, 45007, &GuessOptions::default()).unwrap();
        // t F^2 - F + 1 = 0 up to overall scale
        assert_eq!(alg.degree_f(), 2);
        assert_eq!(alg.degree_t(), 1);
        assert!(algebraic_holds(&series, &alg));
        let field = PrimeField::new(45007);
        let c0 = &alg.coeffs[0].coeffs;
        let c1 = &alg.coeffs[1].coeffs;
        let c2 = &alg.coeffs[2].coeffs;
        let scale = c0[0];
        assert_ne!(scale, 0);
        let want_c1 = field.neg(&scale);
        assert_eq!(c0.get(1).copied().unwrap_or(0), 0);
        assert_eq!(c1[0], want_c1);
        assert_eq!(c1.get(1).copied().unwrap_or(0), 0);
        assert_eq!(c2[0], 0);
        assert_eq!(c2.get(1).copied().unwrap_or(0), scale);
    }

    #[test]
    fn catalan_recurrence() {
        // (n+2) C_{n+1} = (4n+2) C_n
        let series = catalan(60, 45007);
        let rec = fit_recurrence(&series, 45007, &GuessOptions::default()).unwrap();
        assert_eq!(rec.order(), 1);
        assert!(rec.degree() <= 1);
        assert!(recurrence_holds(&series, &rec));
    }

    #[test]
    fn geometric_series_ode() {
        // F = 1/(1-2t): (1-2t) F' - 2 F = 0
        let field = PrimeField::new(45007);
        let series: Vec<u64> = (0..40).map(|i| field.pow(&2, i)).collect();
        let de = fit_differential(&series, 45007, &GuessOptions::default()).unwrap();
        assert_eq!(de.order(), 1);
        assert!(differential_holds(&series, &de));
    }

    #[test]
    fn random_series_fits_nothing() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let series: Vec<u64> = (0..120).map(|_| rng.gen_range(0..45007)).collect();
        let opts = GuessOptions { max_order: 3, max_degree: 3, ..Default::default() };
        assert!(fit_recurrence(&series, 45007, &opts).is_none());
        assert!(fit_algebraic(&series, 45007, &opts).is_none());
        assert!(fit_differential(&series, 45007, &opts).is_none());
    }

    #[test]
    fn too_short_series_is_refused() {
        // with almost no training data every budget is either skipped for
        // lack of rows or killed by the holdout; no uncheckable candidate
        // may come back
        let series = catalan(8, 45007);
        let opts =
            GuessOptions { max_order: 6, max_degree: 8, holdout: Some(4), ..Default::default() };
        assert!(fit_recurrence(&series, 45007, &opts).is_none());
    }
}
