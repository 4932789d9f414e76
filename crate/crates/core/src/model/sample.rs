//! Seeded random models for randomized cross-checks. Small planar models
//! with compass steps, assorted moduli and affine class selectors.

use super::{Model, ResiduePoly, Step, COMPASS};
use crate::ring::rational_from_parts;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct SampleOptions {
    /// Choices for the number of constrained axes.
    pub nonneg_axes: Vec<usize>,
    /// Choices for the single modulus.
    pub moduli: Vec<i64>,
    pub max_steps_per_class: usize,
    /// When set, some steps get small non-unit rational weights.
    pub rational_weights: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            nonneg_axes: vec![1, 2],
            moduli: vec![1, 2, 2, 3],
            max_steps_per_class: 6,
            rational_weights: false,
        }
    }
}

pub fn random_model(rng: &mut impl Rng, opts: &SampleOptions) -> Model {
    let nonneg = *opts.nonneg_axes.choose(rng).unwrap();
    let modulus = *opts.moduli.choose(rng).unwrap();
    // affine selector; degenerate all-zero coefficient vectors are fine,
    // they just make one class absorb everything
    let poly = ResiduePoly {
        constant: rng.gen_range(0..modulus.max(1)),
        position: vec![rng.gen_range(-1..=2), rng.gen_range(-1..=2)],
        time: if rng.gen_bool(0.4) { rng.gen_range(0..=1) } else { 0 },
    };
    let mut step_sets = BTreeMap::new();
    loop {
        step_sets.clear();
        for r in 0..modulus {
            let count = rng.gen_range(0..=opts.max_steps_per_class);
            let mut picks: Vec<usize> = (0..8).collect();
            picks.shuffle(rng);
            picks.truncate(count);
            picks.sort_unstable();
            let steps: Vec<Step> = picks
                .into_iter()
                .map(|i| {
                    let mut s = Step::unit(vec![COMPASS[i].0, COMPASS[i].1]);
                    if opts.rational_weights && rng.gen_bool(0.3) {
                        s.weight = rational_from_parts(rng.gen_range(1..=3), rng.gen_range(1..=3));
                    }
                    s
                })
                .collect();
            if !steps.is_empty() {
                step_sets.insert(vec![r], steps);
            }
        }
        if !step_sets.is_empty() {
            break;
        }
    }
    let model = Model {
        label: format!("sample-{:08x}", rng.gen::<u32>()),
        dimension: 2,
        nonneg_axes: nonneg,
        moduli: vec![modulus],
        residue_polys: vec![poly],
        start: vec![0, 0],
        step_sets,
    };
    model.validate().expect("sampled models are well formed")
}

/// Random model on the half plane Z>=0 x Z, the shape accepted by the
/// functional-equation builder.
pub fn random_half_space_model(rng: &mut impl Rng) -> Model {
    let opts = SampleOptions { nonneg_axes: vec![1], ..Default::default() };
    loop {
        let m = random_model(rng, &opts);
        // keep models whose start class has steps so the series is not
        // eventually zero for a trivial reason; plain zero series make the
        // cross-check vacuous
        if !m.steps_of(&m.start_class()).is_empty() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampling_is_reproducible() {
        let opts = SampleOptions::default();
        let a = random_model(&mut ChaCha8Rng::seed_from_u64(7), &opts);
        let b = random_model(&mut ChaCha8Rng::seed_from_u64(7), &opts);
        assert_eq!(a, b);
    }
}
