//! Quarter-plane model families with two step sets selected by a parity,
//! either of the coordinate sum (space family) or of the elapsed time
//! (time family), and the accounting of pairs up to symmetry.

use super::{Model, ResiduePoly, Step, COMPASS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Space,
    Time,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Space => "space",
            Family::Time => "time",
        }
    }
}

/// How two step-set pairs are identified when counting models up to
/// symmetry. The flip is the diagonal reflection applied to both sets at
/// once; the swap additionally identifies (S0, S1) with (S1, S0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Convention {
    pub include_empty: bool,
    pub pair_swap: bool,
}

#[derive(Clone, Debug)]
pub struct FamilyConfig {
    pub family: Family,
    pub convention: Convention,
    pub exclude_homogeneous: bool,
    /// Draw this many representatives with the given seed instead of
    /// streaming all of them.
    pub sample: Option<(u64, usize)>,
}

impl FamilyConfig {
    pub fn full(family: Family) -> Self {
        FamilyConfig {
            family,
            convention: Convention { include_empty: false, pair_swap: false },
            exclude_homogeneous: false,
            sample: None,
        }
    }
}

/// Step-set bitmask over the eight compass steps, bit i = COMPASS[i].
pub type StepMask = u16;

pub fn mask_to_steps(mask: StepMask) -> Vec<Step> {
    (0..8)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| Step::unit(vec![COMPASS[i].0, COMPASS[i].1]))
        .collect()
}

/// Inverse of `mask_to_steps`; None when some step is not a compass unit.
pub fn steps_to_mask(steps: &[Step]) -> Option<StepMask> {
    let mut mask = 0;
    for s in steps {
        if s.disp.len() != 2 {
            return None;
        }
        let pair = (s.disp[0], s.disp[1]);
        let i = COMPASS.iter().position(|&c| c == pair)?;
        mask |= 1 << i;
    }
    Some(mask)
}

/// Image of a step mask under the diagonal reflection (x, y) -> (y, x).
pub fn reflect_mask(mask: StepMask) -> StepMask {
    let mut out = 0;
    for i in 0..8 {
        if mask >> i & 1 == 1 {
            let (a, b) = COMPASS[i];
            let j = COMPASS.iter().position(|&(c, d)| (c, d) == (b, a)).unwrap();
            out |= 1 << j;
        }
    }
    out
}

/// Least pair code in the orbit of (s0, s1) under the convention's group.
pub fn canonical_pair(s0: StepMask, s1: StepMask, conv: Convention) -> (StepMask, StepMask) {
    let mut best = (s0, s1);
    let mut consider = |p: (StepMask, StepMask)| {
        if p < best {
            best = p;
        }
    };
    consider((reflect_mask(s0), reflect_mask(s1)));
    if conv.pair_swap {
        consider((s1, s0));
        consider((reflect_mask(s1), reflect_mask(s0)));
    }
    best
}

pub fn family_model(family: Family, s0: StepMask, s1: StepMask) -> Model {
    let poly = match family {
        Family::Space => ResiduePoly { constant: 0, position: vec![1, 1], time: 0 },
        Family::Time => ResiduePoly { constant: 0, position: vec![0, 0], time: 1 },
    };
    let mut step_sets = BTreeMap::new();
    step_sets.insert(vec![0], mask_to_steps(s0));
    step_sets.insert(vec![1], mask_to_steps(s1));
    let model = Model {
        label: format!("q{}-{:02x}-{:02x}", family.as_str(), s0, s1),
        dimension: 2,
        nonneg_axes: 2,
        moduli: vec![2],
        residue_polys: vec![poly],
        start: vec![0, 0],
        step_sets,
    };
    model.validate().expect("family models are well formed")
}

/// All canonical representative pair codes under the convention, ascending.
pub fn representative_pairs(conv: Convention) -> Vec<(StepMask, StepMask)> {
    let lo: StepMask = if conv.include_empty { 0 } else { 1 };
    let mut out = Vec::new();
    for s0 in lo..=255 {
        for s1 in lo..=255 {
            if canonical_pair(s0, s1, conv) == (s0, s1) {
                out.push((s0, s1));
            }
        }
    }
    out
}

/// Deterministic stream of models for a family configuration.
pub fn enumerate_family(config: &FamilyConfig) -> Vec<Model> {
    let mut pairs = representative_pairs(config.convention);
    if config.exclude_homogeneous {
        pairs.retain(|&(a, b)| a != b);
    }
    if let Some((seed, k)) = config.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(pairs.len());
        let idx = rand::seq::index::sample(&mut rng, pairs.len(), k);
        let mut chosen: Vec<usize> = idx.into_iter().collect();
        chosen.sort_unstable();
        pairs = chosen.into_iter().map(|i| pairs[i]).collect();
    }
    pairs
        .into_iter()
        .map(|(s0, s1)| family_model(config.family, s0, s1))
        .collect()
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct OrbitCount {
    pub description: String,
    pub include_empty: bool,
    pub pair_swap: bool,
    pub orbits: usize,
}

/// Pair-orbit counts under each documented convention. The count for
/// nonempty pairs under the simultaneous diagonal reflection alone is the
/// one that reproduces the published 32993.
pub fn orbit_counts() -> Vec<OrbitCount> {
    let mut out = Vec::new();
    for &include_empty in &[true, false] {
        for &pair_swap in &[false, true] {
            let conv = Convention { include_empty, pair_swap };
            let orbits = representative_pairs(conv).len();
            let description = format!(
                "{} ordered pairs, diagonal reflection{}",
                if include_empty { "all" } else { "nonempty" },
                if pair_swap { " + pair swap" } else { "" }
            );
            out.push(OrbitCount { description, include_empty, pair_swap, orbits });
        }
    }
    out
}
