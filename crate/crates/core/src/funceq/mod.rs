//! The linear functional-equation system satisfied by the per-class series
//! of a half-space model, its unique power-series solution, and the kernel
//! form of the same system.
//!
//! Everything is indexed by residue class. With x marking the constrained
//! axis, the class series solve  f = a + t * sum_i B_i Delta^i f,  where
//! B_0 collects the x-degree >= 0 part of each transition subset and B_i
//! (i >= 1) the coefficient of x^-i. Spectator axes live in the coefficient
//! ring R: symbolically as Laurent polynomials, or folded to constants.

pub mod lemma2;

use crate::model::{Model, Step};
use crate::ring::{Laurent, LaurentRing, Rationals, Ring};
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FunceqError {
    #[error("the system needs exactly one constrained axis, model has {0}")]
    NotHalfSpace(usize),
}

pub struct FunceqSystem<R: Ring> {
    pub x_ring: LaurentRing<R>,
    /// residue vectors in a fixed order; all indices below refer to it
    pub classes: Vec<Vec<i64>>,
    /// largest backward x-displacement
    pub k: usize,
    /// table[s][r] = transition subset from class r to class s, as a
    /// Laurent polynomial in x with spectator data in the coefficients
    pub table: Vec<Vec<Laurent<R::Elem>>>,
    /// right-hand-side seed: x^{start} in the start class
    pub a: Vec<Laurent<R::Elem>>,
}

/// Builds the system with every spectator axis kept as one symbolic
/// variable y (so it requires dimension <= 2).
pub fn build_system_y(
    model: &Model,
) -> Result<FunceqSystem<LaurentRing<Rationals>>, FunceqError> {
    let y_ring = LaurentRing::new(Rationals);
    build_system(model, y_ring, |yr, step| {
        let dy = if step.disp.len() > 1 { step.disp[1] } else { 0 };
        yr.monomial(dy, step.weight.clone())
    })
}

/// Builds the system with spectator axes evaluated to 1.
pub fn build_system_at_one(model: &Model) -> Result<FunceqSystem<Rationals>, FunceqError> {
    build_system(model, Rationals, |_, step| step.weight.clone())
}

pub fn build_system<R: Ring>(
    model: &Model,
    ring: R,
    spectator: impl Fn(&R, &Step) -> R::Elem,
) -> Result<FunceqSystem<R>, FunceqError> {
    if model.nonneg_axes != 1 {
        return Err(FunceqError::NotHalfSpace(model.nonneg_axes));
    }
    let x_ring = LaurentRing::new(ring);
    let classes = model.residue_vectors();
    let idx = |c: &[i64]| classes.iter().position(|v| v[..] == *c).unwrap();

    let mut table = vec![vec![x_ring.zero(); classes.len()]; classes.len()];
    let mut k = 0usize;
    for (r, steps) in &model.step_sets {
        let ri = idx(r);
        for step in steps {
            let inc = model.class_increment(&step.disp);
            let s: Vec<i64> = r
                .iter()
                .zip(&inc)
                .zip(&model.moduli)
                .map(|((a, b), &m)| (a + b).rem_euclid(m))
                .collect();
            let si = idx(&s);
            let dx = step.disp[0];
            if dx < 0 {
                k = k.max((-dx) as usize);
            }
            let term = x_ring.monomial(dx, spectator(&x_ring.base, step));
            table[si][ri] = x_ring.add(&table[si][ri], &term);
        }
    }

    let start_class = model.start_class();
    let a = classes
        .iter()
        .map(|c| {
            if *c == start_class {
                x_ring.monomial(model.start[0], x_ring.base.one())
            } else {
                x_ring.zero()
            }
        })
        .collect();

    Ok(FunceqSystem { x_ring, classes, k, table, a })
}

/// (f - f_0 - f_1 x - ... - f_{i-1} x^{i-1}) / x^i: drop the low i
/// coefficients and shift down.
pub fn delta_pow<R: Ring>(
    x_ring: &LaurentRing<R>,
    f: &Laurent<R::Elem>,
    i: usize,
) -> Laurent<R::Elem> {
    let Some(hi) = x_ring.max_exp(f) else { return x_ring.zero() };
    let mut out = x_ring.zero();
    for e in i as i64..=hi {
        let c = x_ring.coeff(f, e);
        if !x_ring.base.is_zero(&c) {
            out = x_ring.add(&out, &x_ring.monomial(e - i as i64, c));
        }
    }
    out
}

impl<R: Ring> FunceqSystem<R> {
    /// One application of  sum_i B_i Delta^i  to the coefficient vector f.
    fn apply(&self, f: &[Laurent<R::Elem>]) -> Vec<Laurent<R::Elem>> {
        let xr = &self.x_ring;
        (0..self.classes.len())
            .map(|s| {
                let mut acc = xr.zero();
                for (r, fr) in f.iter().enumerate() {
                    let cell = &self.table[s][r];
                    let Some(lo) = xr.min_exp(cell) else { continue };
                    let hi = xr.max_exp(cell).unwrap();
                    // nonnegative part acts by plain multiplication
                    let mut nonneg = xr.zero();
                    for e in 0.max(lo)..=hi {
                        let c = xr.coeff(cell, e);
                        if !xr.base.is_zero(&c) {
                            nonneg = xr.add(&nonneg, &xr.monomial(e, c));
                        }
                    }
                    if !xr.is_zero(&nonneg) {
                        acc = xr.add(&acc, &xr.mul(&nonneg, fr));
                    }
                    // each x^-i coefficient acts through Delta^i
                    for i in 1..=self.k as i64 {
                        let c = xr.coeff(cell, -i);
                        if xr.base.is_zero(&c) {
                            continue;
                        }
                        let d = delta_pow(xr, fr, i as usize);
                        acc = xr.add(&acc, &xr.mul(&xr.constant(c), &d));
                    }
                }
                acc
            })
            .collect()
    }

    /// Coefficients of the unique series solution, one x-polynomial per
    /// class per t-order: out[n][s] = [t^n] F_s.
    pub fn solve_series(&self, n_max: usize) -> Vec<Vec<Laurent<R::Elem>>> {
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(self.a.clone());
        for n in 1..=n_max {
            let next = self.apply(&out[n - 1]);
            out.push(next);
        }
        out
    }
}

/// Kernel form of the same system:
/// (x^k I - t K1(x)) f = x^k a - t sum_j Q_j g_j, with g_j the vector of
/// j-th x-coefficients of f.
pub struct Kernel<R: Ring> {
    pub k: usize,
    /// K1 = x^k B_0(x) + sum_{i>=1} x^{k-i} B_i
    pub k1: Vec<Vec<Laurent<R::Elem>>>,
    /// q[j][s][r] = sum_{i=j+1}^k x^{k+j-i} [x^{-i}] table[s][r]
    pub q: Vec<Vec<Vec<Laurent<R::Elem>>>>,
}

pub fn kernel<R: Ring>(sys: &FunceqSystem<R>) -> Kernel<R> {
    let xr = &sys.x_ring;
    let nc = sys.classes.len();
    let k = sys.k;
    let mut k1 = vec![vec![xr.zero(); nc]; nc];
    for s in 0..nc {
        for r in 0..nc {
            let cell = &sys.table[s][r];
            let Some(lo) = xr.min_exp(cell) else { continue };
            let hi = xr.max_exp(cell).unwrap();
            let mut acc = xr.zero();
            for e in lo..=hi {
                let c = xr.coeff(cell, e);
                if xr.base.is_zero(&c) {
                    continue;
                }
                // x^e with e >= 0 sits inside B_0, so it picks up x^k;
                // x^-i lands at x^{k-i}: both are x^{k+e}
                acc = xr.add(&acc, &xr.monomial(k as i64 + e, c));
            }
            k1[s][r] = acc;
        }
    }
    let mut q = Vec::with_capacity(k);
    for j in 0..k {
        let mut qj = vec![vec![xr.zero(); nc]; nc];
        for s in 0..nc {
            for r in 0..nc {
                let cell = &sys.table[s][r];
                let mut acc = xr.zero();
                for i in (j + 1)..=k {
                    let c = xr.coeff(cell, -(i as i64));
                    if !xr.base.is_zero(&c) {
                        acc = xr.add(&acc, &xr.monomial((k + j - i) as i64, c));
                    }
                }
                qj[s][r] = acc;
            }
        }
        q.push(qj);
    }
    Kernel { k, k1, q }
}

/// Verifies the kernel identity order by order against the series solution.
pub fn kernel_identity_holds<R: Ring>(sys: &FunceqSystem<R>, n_max: usize) -> bool {
    let xr = &sys.x_ring;
    let nc = sys.classes.len();
    let ker = kernel(sys);
    let f = sys.solve_series(n_max);
    let xk = |g: &Laurent<R::Elem>| xr.mul(&xr.monomial(ker.k as i64, xr.base.one()), g);
    for n in 0..=n_max {
        for s in 0..nc {
            // LHS at t-order n: x^k f_n[s] - sum_r K1[s][r] f_{n-1}[r]
            let mut lhs = xk(&f[n][s]);
            if n > 0 {
                for r in 0..nc {
                    let prod = xr.mul(&ker.k1[s][r], &f[n - 1][r]);
                    lhs = xr.sub(&lhs, &prod);
                }
            }
            // RHS at t-order n: x^k a[s] [n=0] - sum_j Q_j[s][r] [x^j] f_{n-1}[r]
            let mut rhs = if n == 0 { xk(&sys.a[s]) } else { xr.zero() };
            if n > 0 {
                for j in 0..ker.k {
                    for r in 0..nc {
                        let gj = xr.coeff(&f[n - 1][r], j as i64);
                        if xr.base.is_zero(&gj) {
                            continue;
                        }
                        let prod = xr.mul(&ker.q[j][s][r], &xr.constant(gj));
                        rhs = xr.sub(&rhs, &prod);
                    }
                }
            }
            if !xr.is_zero(&xr.sub(&lhs, &rhs)) {
                return false;
            }
        }
    }
    true
}

/// det(x^k I - t K1) as a polynomial in t with x-Laurent coefficients,
/// expanded over permutations. Systems here have few classes.
pub fn kernel_det<R: Ring>(sys: &FunceqSystem<R>) -> Vec<Laurent<R::Elem>> {
    let xr = &sys.x_ring;
    let nc = sys.classes.len();
    let ker = kernel(sys);
    // entry (s,r) as a degree-<=1 polynomial in t
    let entry = |s: usize, r: usize| -> Vec<Laurent<R::Elem>> {
        let t0 = if s == r {
            xr.monomial(ker.k as i64, xr.base.one())
        } else {
            xr.zero()
        };
        vec![t0, xr.neg(&ker.k1[s][r])]
    };
    let tmul = |a: &[Laurent<R::Elem>], b: &[Laurent<R::Elem>]| -> Vec<Laurent<R::Elem>> {
        let mut out = vec![xr.zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if xr.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if xr.is_zero(bj) {
                    continue;
                }
                let p = xr.mul(ai, bj);
                out[i + j] = xr.add(&out[i + j], &p);
            }
        }
        out
    };

    let mut det = vec![xr.zero(); nc + 1];
    let mut perm: Vec<usize> = (0..nc).collect();
    permute(&mut perm, &mut |p, even| {
        let mut prod = vec![xr.one()];
        for (s, &r) in p.iter().enumerate() {
            prod = tmul(&prod, &entry(s, r));
        }
        for (i, c) in prod.into_iter().enumerate() {
            if i <= nc {
                det[i] = if even { xr.add(&det[i], &c) } else { xr.sub(&det[i], &c) };
            }
        }
    });
    det
}

fn permute(perm: &mut Vec<usize>, visit: &mut impl FnMut(&[usize], bool)) {
    fn go(perm: &mut Vec<usize>, i: usize, even: bool, visit: &mut impl FnMut(&[usize], bool)) {
        if i == perm.len() {
            visit(perm, even);
            return;
        }
        for j in i..perm.len() {
            perm.swap(i, j);
            go(perm, i + 1, even == (i == j), visit);
            perm.swap(i, j);
        }
    }
    go(perm, 0, true, visit);
}

/// The per-class series recombined and evaluated: [t^n] sum_s F_s at x=1.
pub fn total_at_one(sys: &FunceqSystem<Rationals>, n_max: usize) -> Vec<BigRational> {
    let f = sys.solve_series(n_max);
    let one = BigRational::one();
    f.iter()
        .map(|per_class| {
            per_class
                .iter()
                .map(|p| sys.x_ring.eval(p, &one, &one))
                .fold(BigRational::from_integer(0.into()), |a, b| a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{count_walks_full, DEFAULT_MEMORY_LIMIT};
    use crate::model::sample::{random_half_space_model, SampleOptions};
    use crate::model::tests::half_space_alternating;
    use rand::SeedableRng;

    fn check_against_dp(model: &crate::model::Model, n_max: usize) {
        let sys = build_system_y(model).unwrap();
        let f = sys.solve_series(n_max);
        let full = count_walks_full(model, n_max, DEFAULT_MEMORY_LIMIT).unwrap();
        let xr = &sys.x_ring;
        let yr = &xr.base;
        for n in 0..=n_max {
            // collect the DP level into per-class x,y data
            let mut want: Vec<Laurent<Laurent<BigRational>>> = vec![xr.zero(); sys.classes.len()];
            for (pos, v) in &full.levels[n] {
                let class = model.class_of(pos, n as i64);
                let s = sys.classes.iter().position(|c| *c == class).unwrap();
                let term = xr.monomial(pos[0], yr.monomial(pos[1], v.clone()));
                want[s] = xr.add(&want[s], &term);
            }
            for s in 0..sys.classes.len() {
                assert!(
                    xr.is_zero(&xr.sub(&f[n][s], &want[s])),
                    "class {:?} at order {} differs\nmodel:\n{:?}",
                    sys.classes[s],
                    n,
                    model
                );
            }
        }
    }

    #[test]
    fn solution_matches_dp_on_alternating_half_space() {
        check_against_dp(&half_space_alternating(), 16);
    }

    fn weighted_half_space(rng: &mut impl rand::Rng) -> crate::model::Model {
        let opts = SampleOptions {
            nonneg_axes: vec![1],
            rational_weights: true,
            ..Default::default()
        };
        loop {
            let m = crate::model::sample::random_model(rng, &opts);
            if !m.steps_of(&m.start_class()).is_empty() {
                return m;
            }
        }
    }

    #[test]
    fn solution_matches_dp_on_random_half_space_models() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xF0E1);
        for _ in 0..6 {
            let m = weighted_half_space(&mut rng);
            check_against_dp(&m, 10);
        }
    }

    #[test]
    fn kernel_identity_on_alternating_model() {
        let sys = build_system_y(&half_space_alternating()).unwrap();
        assert!(kernel_identity_holds(&sys, 12));
    }

    #[test]
    fn kernel_determinant_frozen_for_alternating_model() {
        // worked out by hand from the transition table:
        //   y^2 det K = x^2 y^2 - t x(1+x^2)(y^3+y) - t^2 (x+y)^2 (1+xy)^2
        let sys = build_system_y(&half_space_alternating()).unwrap();
        assert_eq!(sys.k, 1);
        let det = kernel_det(&sys);
        assert_eq!(det.len(), 3);
        let xr = &sys.x_ring;
        let yr = xr.base.clone();
        let one = || yr.base.one();
        let y = |e: i64| yr.monomial(e, one());
        let xm = |e: i64, c: Laurent<BigRational>| xr.monomial(e, c);

        // t^0: x^2
        assert!(xr.is_zero(&xr.sub(&det[0], &xm(2, yr.one()))));
        // t^1: -x(1+x^2)(y + 1/y)
        let mut t1 = xr.add(&xm(1, yr.one()), &xm(3, yr.one()));
        t1 = xr.mul(&t1, &xr.constant(yr.add(&y(1), &y(-1))));
        assert!(xr.is_zero(&xr.add(&det[1], &t1)), "t^1 coefficient");
        // t^2: -((x+y)(1+xy))^2 / y^2
        let x_plus_y = xr.add(&xm(1, yr.one()), &xr.constant(y(1)));
        let one_plus_xy = xr.add(&xr.one(), &xm(1, y(1)));
        let p = xr.mul(&x_plus_y, &one_plus_xy);
        let p2 = xr.mul(&p, &p);
        let y2det2 = xr.mul(&xr.constant(y(2)), &det[2]);
        assert!(xr.is_zero(&xr.add(&y2det2, &p2)), "t^2 coefficient");
    }

    #[test]
    fn kernel_identity_on_random_models() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..6 {
            let m = random_half_space_model(&mut rng);
            let sys = build_system_y(&m).unwrap();
            assert!(kernel_identity_holds(&sys, 8), "model {:?}", m);
        }
    }

    #[test]
    fn totals_at_one_match_frozen_series() {
        // same first terms as the DP path: 1, 3, 18, 93, 550, 3198
        let sys = build_system_at_one(&half_space_alternating()).unwrap();
        let tot = total_at_one(&sys, 5);
        let want: Vec<BigRational> = [1, 3, 18, 93, 550, 3198]
            .iter()
            .map(|&v| crate::ring::rational_from_parts(v, 1))
            .collect();
        assert_eq!(tot, want);
    }

    #[test]
    fn quarter_plane_model_rejected() {
        let m = crate::model::parse::parse_model(
            "label: qp\ndimension: 2\nnonneg_axes: 2\nmoduli: 1\nresidue_poly: 0 ; 0 0 ; 0\nstart: 0 0\nsteps 0: 0 1, 1 0\n",
        )
        .unwrap();
        assert!(matches!(build_system_y(&m), Err(FunceqError::NotHalfSpace(2))));
    }
}
