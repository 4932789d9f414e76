//! Model symmetries and canonical forms.
//!
//! A symmetry either permutes/reflects the axes or relabels the residue
//! classes by a constant shift. Canonical form is the orbit member with the
//! lexicographically least body serialization, so it is constant on orbits
//! and idempotent by construction.

use super::parse::serialize_body;
use super::{Model, ModelError, Step};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Axis a maps to axis perm[a] with sign signs[a]. Constrained axes must
    /// map to constrained axes with positive sign, otherwise the region is
    /// not preserved.
    Axis { perm: Vec<usize>, signs: Vec<i64> },
    /// Relabels class r to r + shift (mod moduli), moving step sets only.
    ClassShift { shift: Vec<i64> },
}

impl Symmetry {
    pub fn diagonal_flip() -> Symmetry {
        Symmetry::Axis { perm: vec![1, 0], signs: vec![1, 1] }
    }

    pub fn class_swap() -> Symmetry {
        Symmetry::ClassShift { shift: vec![1] }
    }
}

pub fn apply_symmetry(model: &Model, sym: &Symmetry) -> Result<Model, ModelError> {
    match sym {
        Symmetry::Axis { perm, signs } => apply_axis(model, perm, signs),
        Symmetry::ClassShift { shift } => apply_class_shift(model, shift),
    }
}

fn apply_axis(model: &Model, perm: &[usize], signs: &[i64]) -> Result<Model, ModelError> {
    let d = model.dimension;
    let fail = |msg: String| Err(ModelError::Symmetry(msg));
    if perm.len() != d || signs.len() != d {
        return fail("axis map arity does not match dimension".into());
    }
    let mut seen = vec![false; d];
    for &t in perm {
        if t >= d || seen[t] {
            return fail("axis map is not a permutation".into());
        }
        seen[t] = true;
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return fail("axis signs must be +-1".into());
    }
    for a in 0..model.nonneg_axes {
        if perm[a] >= model.nonneg_axes || signs[a] != 1 {
            return fail("symmetry does not preserve the region".into());
        }
    }
    let map_vec = |v: &[i64]| -> Vec<i64> {
        let mut out = vec![0; d];
        for a in 0..d {
            out[perm[a]] = signs[a] * v[a];
        }
        out
    };
    // the transformed residue polynomials must induce the same class
    // function, i.e. agree coefficientwise mod each modulus
    for (p, &m) in model.residue_polys.iter().zip(&model.moduli) {
        let moved = map_vec(&p.position);
        for a in 0..d {
            if (moved[a] - p.position[a]).rem_euclid(m) != 0 {
                return fail("symmetry does not preserve the residue polynomials".into());
            }
        }
    }
    let mut out = model.clone();
    out.start = map_vec(&model.start);
    let mut sets: BTreeMap<Vec<i64>, Vec<Step>> = BTreeMap::new();
    for (r, steps) in &model.step_sets {
        let moved = steps
            .iter()
            .map(|s| Step { disp: map_vec(&s.disp), weight: s.weight.clone() })
            .collect();
        sets.insert(r.clone(), moved);
    }
    out.step_sets = sets;
    out.validate()
}

fn apply_class_shift(model: &Model, shift: &[i64]) -> Result<Model, ModelError> {
    if shift.len() != model.moduli.len() {
        return Err(ModelError::Symmetry("class shift arity does not match moduli".into()));
    }
    let mut sets: BTreeMap<Vec<i64>, Vec<Step>> = BTreeMap::new();
    for (r, steps) in &model.step_sets {
        let key: Vec<i64> = r
            .iter()
            .zip(shift)
            .zip(&model.moduli)
            .map(|((&rq, &sq), &m)| (rq + sq).rem_euclid(m))
            .collect();
        sets.insert(key, steps.clone());
    }
    let mut out = model.clone();
    out.step_sets = sets;
    out.validate()
}

/// Orbit of a model under the group generated by the given symmetries.
/// Models are compared by body serialization.
pub fn orbit(model: &Model, symmetries: &[Symmetry]) -> Result<Vec<Model>, ModelError> {
    // reject generators that are incompatible up front; compatibility is
    // uniform across the orbit because every transform preserves the
    // residue polynomials and the region
    for sym in symmetries {
        apply_symmetry(model, sym)?;
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut frontier = vec![model.clone()];
    let mut members = Vec::new();
    seen.insert(serialize_body(model));
    while let Some(m) = frontier.pop() {
        for sym in symmetries {
            let moved = apply_symmetry(&m, sym)?;
            let key = serialize_body(&moved);
            if seen.insert(key) {
                frontier.push(moved.clone());
            }
        }
        members.push(m);
    }
    Ok(members)
}

/// The orbit member with the least body serialization. The label of the
/// input is kept so that naming never influences the choice.
pub fn canonical_form(model: &Model, symmetries: &[Symmetry]) -> Result<Model, ModelError> {
    let members = orbit(model, symmetries)?;
    let mut best: Option<(String, Model)> = None;
    for m in members {
        let key = serialize_body(&m);
        match &best {
            Some((k, _)) if *k <= key => {}
            _ => best = Some((key, m)),
        }
    }
    let (_, mut rep) = best.expect("orbit is never empty");
    rep.label = model.label.clone();
    Ok(rep)
}

pub fn canonical_key(model: &Model, symmetries: &[Symmetry]) -> Result<String, ModelError> {
    canonical_form(model, symmetries).map(|m| serialize_body(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::parse_model;

    fn quarter(s0: &str, s1: &str) -> Model {
        parse_model(&format!(
            "label: q\n\
             dimension: 2\n\
             nonneg_axes: 2\n\
             moduli: 2\n\
             residue_poly: 0 ; 1 1 ; 0\n\
             start: 0 0\n\
             steps 0: {}\n\
             steps 1: {}\n",
            s0, s1
        ))
        .unwrap()
    }

    #[test]
    fn diagonal_flip_swaps_coordinates() {
        let m = quarter("0 1", "1 -1, -1 0");
        let flipped = apply_symmetry(&m, &Symmetry::diagonal_flip()).unwrap();
        assert_eq!(flipped.steps_of(&[0])[0].disp, vec![1, 0]);
        let c1: Vec<_> = flipped.steps_of(&[1]).iter().map(|s| s.disp.clone()).collect();
        assert!(c1.contains(&vec![-1, 1]));
        assert!(c1.contains(&vec![0, -1]));
    }

    #[test]
    fn canonical_form_is_constant_on_orbits() {
        let syms = [Symmetry::diagonal_flip()];
        let m = quarter("0 1, 1 1", "-1 0");
        let flipped = apply_symmetry(&m, &syms[0]).unwrap();
        let a = canonical_key(&m, &syms).unwrap();
        let b = canonical_key(&flipped, &syms).unwrap();
        assert_eq!(a, b);
        // idempotent
        let rep = canonical_form(&m, &syms).unwrap();
        let again = canonical_form(&rep, &syms).unwrap();
        assert_eq!(serialize_body(&rep), serialize_body(&again));
    }

    #[test]
    fn region_breaking_symmetry_rejected() {
        let m = quarter("0 1", "1 0");
        // reflecting a constrained axis is not allowed
        let bad = Symmetry::Axis { perm: vec![0, 1], signs: vec![-1, 1] };
        assert!(apply_symmetry(&m, &bad).is_err());
    }

    #[test]
    fn poly_incompatible_symmetry_rejected() {
        // residue polynomial i (mod 2) is not invariant under the diagonal flip
        let m = parse_model(
            "label: t\n\
             dimension: 2\n\
             nonneg_axes: 2\n\
             moduli: 2\n\
             residue_poly: 0 ; 1 0 ; 0\n\
             start: 0 0\n\
             steps 0: 0 1\n\
             steps 1: 1 0\n",
        )
        .unwrap();
        assert!(apply_symmetry(&m, &Symmetry::diagonal_flip()).is_err());
    }

    #[test]
    fn class_shift_moves_step_sets() {
        let m = quarter("0 1", "1 0");
        let swapped = apply_symmetry(&m, &Symmetry::class_swap()).unwrap();
        assert_eq!(swapped.steps_of(&[0])[0].disp, vec![1, 0]);
        assert_eq!(swapped.steps_of(&[1])[0].disp, vec![0, 1]);
    }
}
