//! Path-by-path oracle. Walks every path of the model up to a hard length
//! cap and tallies endpoint weights. Exists purely to validate the DP
//! engines, so it stays as close to the model definition as possible: no
//! state reduction, no folding, just the rules.

use super::EnumerateError;
use crate::model::Model;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;

pub const BRUTE_CAP: usize = 14;

/// Sum of path weights by endpoint, for walks of length exactly `n`.
pub fn brute_force(
    model: &Model,
    n: usize,
) -> Result<BTreeMap<Vec<i64>, BigRational>, EnumerateError> {
    if n > BRUTE_CAP {
        return Err(EnumerateError::BruteForceCap { n, cap: BRUTE_CAP });
    }
    let mut acc: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
    let mut pos = model.start.clone();
    walk(model, &mut pos, 0, n, BigRational::one(), &mut acc);
    Ok(acc)
}

/// Totals for every length up to `n`, all endpoints summed.
pub fn brute_force_totals(model: &Model, n: usize) -> Result<Vec<BigRational>, EnumerateError> {
    (0..=n)
        .map(|k| Ok(brute_force(model, k)?.values().sum()))
        .collect()
}

fn walk(
    model: &Model,
    pos: &mut Vec<i64>,
    time: i64,
    remaining: usize,
    weight: BigRational,
    acc: &mut BTreeMap<Vec<i64>, BigRational>,
) {
    if remaining == 0 {
        match acc.get_mut(pos.as_slice()) {
            Some(e) => *e += weight,
            None => {
                acc.insert(pos.clone(), weight);
            }
        }
        return;
    }
    let class = model.class_of(pos, time);
    let Some(steps) = model.step_sets.get(&class) else { return };
    for step in steps {
        let mut ok = true;
        for (a, d) in step.disp.iter().enumerate() {
            pos[a] += d;
            if a < model.nonneg_axes && pos[a] < 0 {
                ok = false;
            }
        }
        if ok {
            walk(model, pos, time + 1, remaining - 1, &weight * &step.weight, acc);
        }
        for (a, d) in step.disp.iter().enumerate() {
            pos[a] -= d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{count_walks_full, DEFAULT_MEMORY_LIMIT};
    use crate::model::parse::parse_model;
    use num_traits::Zero;

    #[test]
    fn cap_is_enforced() {
        let m = crate::model::tests::half_space_alternating();
        assert!(matches!(
            brute_force(&m, BRUTE_CAP + 1),
            Err(EnumerateError::BruteForceCap { .. })
        ));
    }

    #[test]
    fn matches_full_dp_on_weighted_model() {
        let m = parse_model(
            "label: w\n\
             dimension: 2\n\
             nonneg_axes: 2\n\
             moduli: 2\n\
             residue_poly: 1 ; 0 1 ; 1\n\
             start: 1 0\n\
             steps 0: 0 1 1/2, 1 0, -1 0\n\
             steps 1: 1 1, -1 -1 2, 0 -1\n",
        )
        .unwrap();
        let full = count_walks_full(&m, 7, DEFAULT_MEMORY_LIMIT).unwrap();
        for n in 0..=7usize {
            let oracle = brute_force(&m, n).unwrap();
            let dp: BTreeMap<_, _> = full.levels[n]
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            assert_eq!(oracle, dp, "length {}", n);
        }
    }
}
