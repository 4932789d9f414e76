//! Phase-1 simplex over exact rationals, for deciding feasibility of small
//! systems of linear constraints with free variables. Infeasible systems
//! come back with Farkas multipliers; feasible ones with a point.

use super::{Constraint, Rel};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub enum LpOutcome {
    /// A point satisfying every constraint.
    Feasible(Vec<BigRational>),
    /// Multipliers, aligned with the constraint list, that combine the
    /// constraints into an impossible statement: nonnegative on >= rows,
    /// unrestricted on equality rows, with the weighted sum of the forms
    /// having zero coefficients and a negative constant.
    Infeasible(Vec<BigRational>),
}

/// Verifies Farkas multipliers by substitution.
pub fn farkas_is_valid(constraints: &[Constraint], multipliers: &[BigRational]) -> bool {
    if constraints.len() != multipliers.len() {
        return false;
    }
    let nvars = constraints.first().map(|c| c.form.coeffs.len()).unwrap_or(0);
    let mut coeffs = vec![BigRational::zero(); nvars];
    let mut constant = BigRational::zero();
    for (c, m) in constraints.iter().zip(multipliers) {
        if matches!(c.rel, Rel::Ge) && m.is_negative() {
            return false;
        }
        for (acc, &k) in coeffs.iter_mut().zip(&c.form.coeffs) {
            *acc += m * BigRational::from_integer(k.into());
        }
        constant += m * BigRational::from_integer(c.form.constant.into());
    }
    coeffs.iter().all(|c| c.is_zero()) && constant.is_negative()
}

/// Decides whether any free vector satisfies all constraints (each one
/// `form >= 0` or `form = 0` with the constant folded into the form).
/// Bland's rule guarantees termination; everything is exact.
pub fn solve(constraints: &[Constraint]) -> LpOutcome {
    let nvars = constraints.first().map(|c| c.form.coeffs.len()).unwrap_or(0);
    let m = constraints.len();
    if m == 0 {
        return LpOutcome::Feasible(vec![BigRational::zero(); nvars]);
    }

    // columns: u (nvars), w (nvars, so x = u - w), surplus (one per >= row),
    // artificial (one per row); the last entry of each row is the rhs
    let n_surplus = constraints.iter().filter(|c| matches!(c.rel, Rel::Ge)).count();
    let ncols = 2 * nvars + n_surplus + m;
    let art0 = 2 * nvars + n_surplus;

    let mut rows = vec![vec![BigRational::zero(); ncols + 1]; m];
    let mut flipped = vec![false; m];
    let mut surplus_idx = 0usize;
    for (i, c) in constraints.iter().enumerate() {
        // form >= 0 becomes coeffs . x - s = -constant
        for (j, &k) in c.form.coeffs.iter().enumerate() {
            rows[i][j] = BigRational::from_integer(k.into());
            rows[i][nvars + j] = BigRational::from_integer((-k).into());
        }
        if matches!(c.rel, Rel::Ge) {
            rows[i][2 * nvars + surplus_idx] = -BigRational::one();
            surplus_idx += 1;
        }
        rows[i][ncols] = BigRational::from_integer((-c.form.constant).into());
        if rows[i][ncols].is_negative() {
            flipped[i] = true;
            for v in rows[i].iter_mut() {
                *v = -v.clone();
            }
        }
        rows[i][art0 + i] = BigRational::one();
    }

    // phase-1 objective: minimize the sum of artificials; the objective row
    // holds reduced costs, its rhs the negated objective value
    let mut obj = vec![BigRational::zero(); ncols + 1];
    for j in 0..=ncols {
        let mut s = BigRational::zero();
        for row in rows.iter() {
            s += &row[j];
        }
        let cost = if (art0..art0 + m).contains(&j) { BigRational::one() } else { BigRational::zero() };
        obj[j] = cost - s;
    }
    let mut basis: Vec<usize> = (art0..art0 + m).collect();

    loop {
        // Bland: smallest-index column with a negative reduced cost
        let Some(enter) = (0..ncols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if rows[i][enter].is_positive() {
                let ratio = &rows[i][ncols] / &rows[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(li) = leave else {
            // phase-1 objective is bounded below by zero, so an unbounded
            // ray cannot occur; defensive
            unreachable!("unbounded phase-1 objective");
        };
        let pivot = rows[li][enter].clone();
        for v in rows[li].iter_mut() {
            *v = &*v / &pivot;
        }
        for i in 0..m {
            if i != li && !rows[i][enter].is_zero() {
                let f = rows[i][enter].clone();
                for j in 0..=ncols {
                    let d = &f * &rows[li][j];
                    rows[i][j] -= d;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for j in 0..=ncols {
                let d = &f * &rows[li][j];
                obj[j] -= d;
            }
        }
        basis[li] = enter;
    }

    // objective value = -obj rhs
    if obj[ncols].is_zero() {
        let mut x = vec![BigRational::zero(); nvars];
        for (i, &b) in basis.iter().enumerate() {
            if b < nvars {
                x[b] += &rows[i][ncols];
            } else if b < 2 * nvars {
                x[b - nvars] -= &rows[i][ncols];
            }
        }
        LpOutcome::Feasible(x)
    } else {
        // dual values from the artificial reduced costs: y_i = 1 - obj[art_i],
        // multipliers on the original rows undo the sign normalization
        let mut mult = Vec::with_capacity(m);
        for i in 0..m {
            let y = BigRational::one() - &obj[art0 + i];
            mult.push(if flipped[i] { -y } else { y });
        }
        debug_assert!(farkas_is_valid(constraints, &mult));
        LpOutcome::Infeasible(mult)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::LinearForm;

    fn ge(coeffs: Vec<i64>, constant: i64) -> Constraint {
        Constraint { form: LinearForm { coeffs, constant }, rel: Rel::Ge, label: String::new() }
    }

    fn eq(coeffs: Vec<i64>, constant: i64) -> Constraint {
        Constraint { form: LinearForm { coeffs, constant }, rel: Rel::Eq, label: String::new() }
    }

    fn check_point(cs: &[Constraint], x: &[BigRational]) -> bool {
        cs.iter().all(|c| {
            let mut v = BigRational::from_integer(c.form.constant.into());
            for (k, xi) in c.form.coeffs.iter().zip(x) {
                v += BigRational::from_integer((*k).into()) * xi;
            }
            match c.rel {
                Rel::Ge => !v.is_negative(),
                Rel::Eq => v.is_zero(),
            }
        })
    }

    #[test]
    fn feasible_system_yields_a_valid_point() {
        // x >= 0, y >= 0, x + y = 3, x - y >= 1
        let cs = vec![
            ge(vec![1, 0], 0),
            ge(vec![0, 1], 0),
            eq(vec![1, 1], -3),
            ge(vec![1, -1], -1),
        ];
        match solve(&cs) {
            LpOutcome::Feasible(x) => assert!(check_point(&cs, &x)),
            LpOutcome::Infeasible(_) => panic!("system is feasible"),
        }
    }

    #[test]
    fn infeasible_system_yields_verified_multipliers() {
        // x >= 0 and x <= -1
        let cs = vec![ge(vec![1], 0), ge(vec![-1], -1)];
        match solve(&cs) {
            LpOutcome::Feasible(_) => panic!("system is infeasible"),
            LpOutcome::Infeasible(m) => assert!(farkas_is_valid(&cs, &m)),
        }
    }

    #[test]
    fn equality_multipliers_may_be_negative() {
        // x = 0, x >= 1: certificate needs -1 on some row
        let cs = vec![eq(vec![1], 0), ge(vec![1], -1)];
        match solve(&cs) {
            LpOutcome::Feasible(_) => panic!("system is infeasible"),
            LpOutcome::Infeasible(m) => assert!(farkas_is_valid(&cs, &m)),
        }
    }

    #[test]
    fn free_variables_can_go_negative() {
        // x <= -2 alone is feasible for a free variable
        let cs = vec![ge(vec![-1], -2)];
        match solve(&cs) {
            LpOutcome::Feasible(x) => assert!(check_point(&cs, &x)),
            LpOutcome::Infeasible(_) => panic!("free variable reaches -2"),
        }
    }

    #[test]
    fn degenerate_rows_do_not_cycle() {
        // redundant equalities plus a binding chain
        let cs = vec![
            eq(vec![1, -1, 0], 0),
            eq(vec![0, 1, -1], 0),
            eq(vec![1, 0, -1], 0),
            ge(vec![1, 0, 0], 0),
            ge(vec![-1, -1, -1], 3),
        ];
        match solve(&cs) {
            LpOutcome::Feasible(x) => assert!(check_point(&cs, &x)),
            LpOutcome::Infeasible(_) => panic!("x = y = z = 1 works"),
        }
    }

    #[test]
    fn contradictory_constant_row_is_caught() {
        // a row with no variables: -1 >= 0
        let cs = vec![ge(vec![0, 0], -1)];
        match solve(&cs) {
            LpOutcome::Feasible(_) => panic!("constant row is false"),
            LpOutcome::Infeasible(m) => assert!(farkas_is_valid(&cs, &m)),
        }
    }
}
