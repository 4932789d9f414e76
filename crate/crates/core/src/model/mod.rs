//! Walk models on Z^d with a region Z>=0^p x Z^q, a vector of moduli and
//! affine residue polynomials that select which step set applies at each
//! point in space-time.

pub mod parse;
pub mod sample;
pub mod space;
pub mod symmetry;

use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

/// A single admissible step: displacement plus a nonzero rational weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub disp: Vec<i64>,
    pub weight: BigRational,
}

impl Step {
    pub fn unit(disp: Vec<i64>) -> Self {
        Step { disp, weight: BigRational::one() }
    }
}

/// Affine form c + sum_a position[a]*x_a + time*n, evaluated mod one modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePoly {
    pub constant: i64,
    pub position: Vec<i64>,
    pub time: i64,
}

pub type ResidueVec = Vec<i64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub label: String,
    pub dimension: usize,
    pub nonneg_axes: usize,
    pub moduli: Vec<i64>,
    pub residue_polys: Vec<ResiduePoly>,
    pub start: Vec<i64>,
    /// Step sets keyed by reduced residue vector; absent keys mean empty sets.
    pub step_sets: BTreeMap<ResidueVec, Vec<Step>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InhomogeneityTag {
    Homogeneous,
    TimeInhomogeneous,
    SpaceInhomogeneous,
    Mixed,
}

impl InhomogeneityTag {
    pub fn as_str(self) -> &'static str {
        match self {
            InhomogeneityTag::Homogeneous => "homogeneous",
            InhomogeneityTag::TimeInhomogeneous => "time_inhomogeneous",
            InhomogeneityTag::SpaceInhomogeneous => "space_inhomogeneous",
            InhomogeneityTag::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
    #[error("symmetry incompatible with model: {0}")]
    Symmetry(String),
}

/// Compass order used for canonical step ordering in two dimensions:
/// N, NE, E, SE, S, SW, W, NW.
pub const COMPASS: [(i64, i64); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

pub fn compass_index(disp: &[i64]) -> Option<usize> {
    if disp.len() != 2 {
        return None;
    }
    COMPASS.iter().position(|&(a, b)| a == disp[0] && b == disp[1])
}

/// Total order on displacements: the eight small planar steps first in
/// compass order, everything else after them lexicographically.
pub fn step_order_key(disp: &[i64]) -> (u8, usize, Vec<i64>) {
    match compass_index(disp) {
        Some(i) => (0, i, vec![]),
        None => (1, 0, disp.to_vec()),
    }
}

impl Model {
    /// Checks all structural invariants and puts steps into canonical order.
    pub fn validate(mut self) -> Result<Self, ModelError> {
        let err = |m: String| Err(ModelError::Semantic(m));
        if self.dimension == 0 {
            return err("dimension must be at least 1".into());
        }
        if self.nonneg_axes > self.dimension {
            return err("nonneg_axes exceeds dimension".into());
        }
        if self.moduli.is_empty() {
            return err("at least one modulus required".into());
        }
        if self.moduli.iter().any(|&m| m < 1) {
            return err("moduli must be >= 1".into());
        }
        if self.residue_polys.len() != self.moduli.len() {
            return err("one residue polynomial required per modulus".into());
        }
        for p in &self.residue_polys {
            if p.position.len() != self.dimension {
                return err("residue polynomial arity does not match dimension".into());
            }
        }
        if self.start.len() != self.dimension {
            return err("start point arity does not match dimension".into());
        }
        if self.start[..self.nonneg_axes].iter().any(|&c| c < 0) {
            return err("start point outside region".into());
        }
        for (r, steps) in &self.step_sets {
            if r.len() != self.moduli.len() {
                return err(format!("residue key {:?} has wrong arity", r));
            }
            for (q, (&rq, &m)) in r.iter().zip(&self.moduli).enumerate() {
                if rq < 0 || rq >= m {
                    return err(format!("residue key {:?} not reduced at slot {}", r, q));
                }
            }
            for s in steps {
                if s.disp.len() != self.dimension {
                    return err("step arity does not match dimension".into());
                }
                if s.weight == BigRational::from_integer(0.into()) {
                    return err("step weight must be nonzero".into());
                }
            }
            let mut disps: Vec<_> = steps.iter().map(|s| s.disp.clone()).collect();
            disps.sort();
            disps.dedup();
            if disps.len() != steps.len() {
                return err(format!("duplicate step in class {:?}", r));
            }
        }
        if self.step_sets.values().all(|s| s.is_empty()) {
            return err("all step sets are empty".into());
        }
        for steps in self.step_sets.values_mut() {
            steps.sort_by_key(|s| step_order_key(&s.disp));
        }
        self.step_sets.retain(|_, v| !v.is_empty());
        Ok(self)
    }

    pub fn class_count(&self) -> usize {
        self.moduli.iter().product::<i64>() as usize
    }

    /// All residue vectors in lexicographic order.
    pub fn residue_vectors(&self) -> Vec<ResidueVec> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for prefix in &out {
                for r in 0..m {
                    let mut v = prefix.clone();
                    v.push(r);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    pub fn class_of(&self, pos: &[i64], n: i64) -> ResidueVec {
        self.residue_polys
            .iter()
            .zip(&self.moduli)
            .map(|(p, &m)| {
                let mut v = p.constant + p.time * n;
                for (a, &x) in pos.iter().enumerate() {
                    v += p.position[a] * x;
                }
                v.rem_euclid(m)
            })
            .collect()
    }

    /// Residue increment of a step: the class moves by this amount mod m,
    /// independent of where the step is taken (the polynomials are affine).
    pub fn class_increment(&self, disp: &[i64]) -> Vec<i64> {
        self.residue_polys
            .iter()
            .zip(&self.moduli)
            .map(|(p, &m)| {
                let mut v = p.time;
                for (a, &u) in disp.iter().enumerate() {
                    v += p.position[a] * u;
                }
                v.rem_euclid(m)
            })
            .collect()
    }

    pub fn steps_of(&self, r: &[i64]) -> &[Step] {
        self.step_sets.get(r).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn start_class(&self) -> ResidueVec {
        self.class_of(&self.start, 0)
    }

    pub fn in_region(&self, pos: &[i64]) -> bool {
        pos[..self.nonneg_axes].iter().all(|&c| c >= 0)
    }

    /// Splits every class's step set by target class.
    pub fn transition_table(&self) -> TransitionTable {
        let mut cells: BTreeMap<(ResidueVec, ResidueVec), Vec<Step>> = BTreeMap::new();
        for (r, steps) in &self.step_sets {
            for s in steps {
                let inc = self.class_increment(&s.disp);
                let target: ResidueVec = r
                    .iter()
                    .zip(inc.iter())
                    .zip(&self.moduli)
                    .map(|((&rq, &iq), &m)| (rq + iq).rem_euclid(m))
                    .collect();
                cells.entry((r.clone(), target)).or_default().push(s.clone());
            }
        }
        TransitionTable { cells }
    }

    pub fn classify(&self) -> InhomogeneityTag {
        if self.moduli.iter().all(|&m| m == 1) {
            return InhomogeneityTag::Homogeneous;
        }
        let classes = self.residue_vectors();
        let first = self.steps_of(&classes[0]).to_vec();
        if classes.iter().all(|r| self.steps_of(r) == first.as_slice()) {
            return InhomogeneityTag::Homogeneous;
        }
        let no_position = self
            .residue_polys
            .iter()
            .all(|p| p.position.iter().all(|&c| c == 0));
        if no_position {
            return InhomogeneityTag::TimeInhomogeneous;
        }
        let no_time = self.residue_polys.iter().all(|p| p.time == 0);
        if no_time {
            return InhomogeneityTag::SpaceInhomogeneous;
        }
        InhomogeneityTag::Mixed
    }
}

/// The split of each class's step set by target class. Entry (r, s) holds
/// exactly the steps of S_r whose residue increment maps class r to class s,
/// i.e. the support of the Laurent polynomial S_r^s.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    pub cells: BTreeMap<(ResidueVec, ResidueVec), Vec<Step>>,
}

impl TransitionTable {
    pub fn steps(&self, r: &[i64], s: &[i64]) -> &[Step] {
        self.cells
            .get(&(r.to_vec(), s.to_vec()))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Every step of S_r appears in exactly one cell (r, *).
    pub fn row_step_count(&self, r: &[i64]) -> usize {
        self.cells
            .iter()
            .filter(|((from, _), _)| from == r)
            .map(|(_, v)| v.len())
            .sum()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::parse::parse_model;

    pub fn half_space_alternating() -> Model {
        parse_model(
            "label: half-space-alternating\n\
             dimension: 2\n\
             nonneg_axes: 1\n\
             moduli: 2\n\
             residue_poly: 0 ; 1 1 ; 0\n\
             start: 0 0\n\
             steps 0: 0 1, 1 0, 0 -1, -1 0\n\
             steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1\n",
        )
        .unwrap()
    }

    #[test]
    fn transition_table_splits_by_parity() {
        let m = half_space_alternating();
        let tt = m.transition_table();
        // class 0 uses the four axis steps, all of which flip the parity of i+j
        assert!(tt.steps(&[0], &[0]).is_empty());
        assert_eq!(tt.steps(&[0], &[1]).len(), 4);
        // class 1: axis steps flip back, diagonal steps preserve
        assert_eq!(tt.steps(&[1], &[0]).len(), 4);
        let diag = tt.steps(&[1], &[1]);
        assert_eq!(diag.len(), 4);
        assert!(diag.iter().all(|s| s.disp[0].abs() == 1 && s.disp[1].abs() == 1));
        // partition: every step of S_r lands in exactly one cell
        assert_eq!(tt.row_step_count(&[0]), 4);
        assert_eq!(tt.row_step_count(&[1]), 8);
    }

    #[test]
    fn classification_tags() {
        let m = half_space_alternating();
        assert_eq!(m.classify(), InhomogeneityTag::SpaceInhomogeneous);

        let mut time = m.clone();
        time.residue_polys = vec![ResiduePoly { constant: 0, position: vec![0, 0], time: 1 }];
        assert_eq!(time.classify(), InhomogeneityTag::TimeInhomogeneous);

        let mut mixed = m.clone();
        mixed.residue_polys = vec![ResiduePoly { constant: 0, position: vec![1, 0], time: 1 }];
        assert_eq!(mixed.classify(), InhomogeneityTag::Mixed);

        let mut homog = m.clone();
        let s = homog.step_sets[&vec![0]].clone();
        homog.step_sets.insert(vec![1], s);
        assert_eq!(homog.classify(), InhomogeneityTag::Homogeneous);
    }

    #[test]
    fn class_increment_is_position_independent() {
        let m = half_space_alternating();
        // the increment computed abstractly must agree with evaluating the
        // polynomial at congruent points
        for step in m.steps_of(&[1]) {
            let inc = m.class_increment(&step.disp);
            for &(i, j, n) in &[(0i64, 0i64, 0i64), (2, 4, 6), (5, 3, 1), (7, -9, 3)] {
                let before = m.class_of(&[i, j], n);
                let after = m.class_of(&[i + step.disp[0], j + step.disp[1]], n + 1);
                let expect: Vec<i64> = before
                    .iter()
                    .zip(&inc)
                    .zip(&m.moduli)
                    .map(|((&b, &d), &md)| (b + d).rem_euclid(md))
                    .collect();
                assert_eq!(after, expect);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_models() {
        let mut m = half_space_alternating();
        m.start = vec![-1, 0];
        assert!(m.validate().is_err());

        let mut m = half_space_alternating();
        m.step_sets.insert(vec![2], vec![Step::unit(vec![1, 0])]);
        assert!(m.validate().is_err());

        let mut m = half_space_alternating();
        let steps = m.step_sets.get_mut(&vec![0]).unwrap();
        steps.push(Step::unit(vec![0, 1]));
        assert!(m.validate().is_err());
    }
}
