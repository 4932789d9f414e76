//! Walk counting by dynamic programming over a reduced state space, plus a
//! deliberately naive path-enumeration oracle used to validate it.

pub mod brute;
mod engine;

use crate::model::{Model, ResidueVec};
use crate::ring::{PrimeField, Rationals, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

pub use brute::brute_force;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Exact,
    Mod(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalVar {
    Symbolic,
    Const(BigRational),
}

/// One entry per spatial axis.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint(pub Vec<EvalVar>);

impl EvalPoint {
    pub fn all_ones(dim: usize) -> Self {
        EvalPoint(vec![EvalVar::Const(BigRational::one()); dim])
    }

    pub fn all_symbolic(dim: usize) -> Self {
        EvalPoint(vec![EvalVar::Symbolic; dim])
    }
}

/// How the DP state is laid out for a model and evaluation point: which
/// axes keep exact coordinates, which free axes survive only as residues
/// feeding the residue polynomials, and which vanish entirely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDescriptor {
    pub tracked_axes: Vec<usize>,
    /// (axis, modulus): the coordinate is kept mod the lcm of the moduli
    /// whose residue polynomial mentions the axis.
    pub collapsed_axes: Vec<(usize, i64)>,
    pub dropped_axes: Vec<usize>,
    /// Modulus for the time variable when some polynomial mentions it.
    pub time_modulus: Option<i64>,
}

/// Constrained axes are always tracked (the region test needs them); free
/// axes evaluated to constants survive only through the residue polynomials.
pub fn reduce_state(model: &Model, eval: &EvalPoint) -> StateDescriptor {
    assert_eq!(eval.0.len(), model.dimension);
    let mut tracked = Vec::new();
    let mut collapsed = Vec::new();
    let mut dropped = Vec::new();
    for axis in 0..model.dimension {
        let constrained = axis < model.nonneg_axes;
        let symbolic = matches!(eval.0[axis], EvalVar::Symbolic);
        if constrained || symbolic {
            tracked.push(axis);
            continue;
        }
        let mut modulus = 1i64;
        for (p, &m) in model.residue_polys.iter().zip(&model.moduli) {
            if p.position[axis] != 0 {
                modulus = modulus.lcm(&m);
            }
        }
        if modulus > 1 {
            collapsed.push((axis, modulus));
        } else {
            dropped.push(axis);
        }
    }
    let mut tmod = 1i64;
    for (p, &m) in model.residue_polys.iter().zip(&model.moduli) {
        if p.time != 0 {
            tmod = tmod.lcm(&m);
        }
    }
    StateDescriptor {
        tracked_axes: tracked,
        collapsed_axes: collapsed,
        dropped_axes: dropped,
        time_modulus: if tmod > 1 { Some(tmod) } else { None },
    }
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("evaluation point: {0}")]
    InvalidEval(String),
    #[error("state space needs {needed} coefficients, limit is {limit}")]
    MemoryBound { needed: u128, limit: u128 },
    #[error("brute force capped at length {cap}, asked for {n}")]
    BruteForceCap { n: usize, cap: usize },
    #[error("weight not representable in the target domain: {0}")]
    DomainWeight(String),
}

/// Truncated series. Spatial variables that stayed symbolic come first in
/// `vars`, the time variable `t` is always last.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub vars: Vec<String>,
    pub order: usize,
    pub data: SeriesData,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesData {
    ModDense { prime: u64, coeffs: Vec<u64> },
    ExactDense { coeffs: Vec<BigRational> },
    ModSparse { prime: u64, terms: Vec<(Vec<i64>, u64)> },
    ExactSparse { terms: Vec<(Vec<i64>, BigRational)> },
}

impl Series {
    pub fn mod_coeffs(&self) -> Option<(u64, &[u64])> {
        match &self.data {
            SeriesData::ModDense { prime, coeffs } => Some((*prime, coeffs)),
            _ => None,
        }
    }

    pub fn exact_coeffs(&self) -> Option<&[BigRational]> {
        match &self.data {
            SeriesData::ExactDense { coeffs } => Some(coeffs),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let domain = match &self.data {
            SeriesData::ModDense { prime, .. } | SeriesData::ModSparse { prime, .. } => {
                serde_json::json!({"kind": "mod", "prime": prime})
            }
            SeriesData::ExactDense { coeffs } => {
                let integral = coeffs.iter().all(|c| c.denom().is_one());
                serde_json::json!({"kind": if integral { "exact" } else { "rational" }})
            }
            SeriesData::ExactSparse { terms } => {
                let integral = terms.iter().all(|(_, c)| c.denom().is_one());
                serde_json::json!({"kind": if integral { "exact" } else { "rational" }})
            }
        };
        let mut out = serde_json::json!({
            "variables": self.vars,
            "truncation_order": self.order,
            "domain": domain,
        });
        match &self.data {
            SeriesData::ModDense { coeffs, .. } => {
                out["coefficients"] = serde_json::json!(coeffs);
            }
            SeriesData::ExactDense { coeffs } => {
                let strs: Vec<String> =
                    coeffs.iter().map(crate::ring::rational_to_string).collect();
                out["coefficients"] = serde_json::json!(strs);
            }
            SeriesData::ModSparse { terms, .. } => {
                let t: Vec<serde_json::Value> = terms
                    .iter()
                    .map(|(e, v)| serde_json::json!({"e": e, "v": v}))
                    .collect();
                out["terms"] = serde_json::json!(t);
            }
            SeriesData::ExactSparse { terms } => {
                let t: Vec<serde_json::Value> = terms
                    .iter()
                    .map(|(e, v)| {
                        serde_json::json!({"e": e, "v": crate::ring::rational_to_string(v)})
                    })
                    .collect();
                out["terms"] = serde_json::json!(t);
            }
        }
        out
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Series, String> {
        let vars: Vec<String> = serde_json::from_value(v["variables"].clone())
            .map_err(|e| format!("variables: {}", e))?;
        let order = v["truncation_order"].as_u64().ok_or("missing truncation_order")? as usize;
        let kind = v["domain"]["kind"].as_str().ok_or("missing domain.kind")?;
        let data = match kind {
            "mod" => {
                let prime = v["domain"]["prime"].as_u64().ok_or("missing domain.prime")?;
                if let Some(arr) = v.get("coefficients").and_then(|c| c.as_array()) {
                    let coeffs = arr
                        .iter()
                        .map(|x| x.as_u64().ok_or("bad coefficient"))
                        .collect::<Result<Vec<u64>, _>>()?;
                    SeriesData::ModDense { prime, coeffs }
                } else {
                    return Err("mod series needs dense coefficients".into());
                }
            }
            "exact" | "rational" => {
                let arr = v
                    .get("coefficients")
                    .and_then(|c| c.as_array())
                    .ok_or("exact series needs dense coefficients")?;
                let coeffs = arr
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .and_then(crate::ring::rational_parse)
                            .ok_or("bad coefficient")
                    })
                    .collect::<Result<Vec<BigRational>, _>>()?;
                SeriesData::ExactDense { coeffs }
            }
            other => return Err(format!("unknown domain kind {}", other)),
        };
        Ok(Series { vars, order, data })
    }
}

/// Per-level coefficient maps over the reduced state (tracked coordinates
/// followed by collapsed residues). Rich enough to rebuild boundary series
/// and per-class profiles for cross-checks.
#[derive(Clone, Debug)]
pub struct ReducedLevels<R: Ring> {
    pub descriptor: StateDescriptor,
    pub start: Vec<i64>,
    pub levels: Vec<BTreeMap<Vec<i64>, R::Elem>>,
}

impl<R: Ring> ReducedLevels<R> {
    /// Endpoint class of a reduced state at the given time.
    pub fn class_of_state(&self, model: &Model, state: &[i64], n: i64) -> ResidueVec {
        engine::reduced_class(model, &self.descriptor, state, n)
    }
}

/// Full coefficient array: every axis tracked exactly, one map per length.
pub struct FullSeries<R: Ring> {
    pub levels: Vec<BTreeMap<Vec<i64>, R::Elem>>,
}

impl<R: Ring> FullSeries<R> {
    pub fn coeff(&self, ring: &R, pos: &[i64], n: usize) -> R::Elem {
        self.levels
            .get(n)
            .and_then(|m| m.get(pos))
            .cloned()
            .unwrap_or_else(|| ring.zero())
    }

    /// Restriction to endpoints in one residue class.
    pub fn class_slice(&self, model: &Model, class: &[i64]) -> Vec<BTreeMap<Vec<i64>, R::Elem>> {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, level)| {
                level
                    .iter()
                    .filter(|(pos, _)| model.class_of(pos, n as i64) == class)
                    .map(|(p, v)| (p.clone(), v.clone()))
                    .collect()
            })
            .collect()
    }
}

pub const DEFAULT_MEMORY_LIMIT: u128 = 100_000_000;

/// Counting series at an evaluation point. Free axes must carry constants;
/// use `count_walks_full` for the fully symbolic array.
pub fn count_walks(
    model: &Model,
    n_max: usize,
    domain: Domain,
    eval: &EvalPoint,
) -> Result<Series, EnumerateError> {
    count_walks_bounded(model, n_max, domain, eval, DEFAULT_MEMORY_LIMIT)
}

pub fn count_walks_bounded(
    model: &Model,
    n_max: usize,
    domain: Domain,
    eval: &EvalPoint,
    memory_limit: u128,
) -> Result<Series, EnumerateError> {
    for (axis, e) in eval.0.iter().enumerate() {
        if axis >= model.nonneg_axes {
            if let EvalVar::Symbolic = e {
                return Err(EnumerateError::InvalidEval(
                    "free axes must carry constants here; use the full array for symbolic output"
                        .into(),
                ));
            }
        }
        if let EvalVar::Const(c) = e {
            if c.is_zero() && negative_exponent_possible(model, axis) {
                return Err(EnumerateError::InvalidEval(format!(
                    "axis {} is evaluated at zero but takes negative steps",
                    axis
                )));
            }
        }
    }
    match domain {
        Domain::Mod(p) => {
            let coeffs = match engine::try_planar(model, n_max, p, eval, memory_limit) {
                Some(res) => res?,
                None => {
                    let field = PrimeField::new(p);
                    let levels = engine::run_reduced(model, n_max, &field, eval, memory_limit)?;
                    aggregate_mod(model, &field, &levels, eval)?
                }
            };
            Ok(Series {
                vars: vec!["t".into()],
                order: n_max,
                data: SeriesData::ModDense { prime: p, coeffs },
            })
        }
        Domain::Exact => {
            let ring = Rationals;
            let levels = engine::run_reduced(model, n_max, &ring, eval, memory_limit)?;
            let coeffs = aggregate_exact(&levels, eval);
            Ok(Series {
                vars: vec!["t".into()],
                order: n_max,
                data: SeriesData::ExactDense { coeffs },
            })
        }
    }
}

fn negative_exponent_possible(model: &Model, axis: usize) -> bool {
    model
        .step_sets
        .values()
        .flatten()
        .any(|s| s.disp[axis] < 0)
}

fn aggregate_mod(
    _model: &Model,
    field: &PrimeField,
    levels: &ReducedLevels<PrimeField>,
    eval: &EvalPoint,
) -> Result<Vec<u64>, EnumerateError> {
    let consts = tracked_consts_mod(field, &levels.descriptor, eval)?;
    let mut out = Vec::with_capacity(levels.levels.len());
    for level in &levels.levels {
        let mut acc = 0u64;
        for (state, v) in level {
            let mut term = *v;
            for (k, c) in consts.iter().enumerate() {
                if let Some(c) = c {
                    term = field.mul(&term, &field.pow(c, state[k].unsigned_abs()));
                }
            }
            acc = field.add(&acc, &term);
        }
        out.push(acc);
    }
    Ok(out)
}

fn tracked_consts_mod(
    field: &PrimeField,
    desc: &StateDescriptor,
    eval: &EvalPoint,
) -> Result<Vec<Option<u64>>, EnumerateError> {
    desc.tracked_axes
        .iter()
        .map(|&axis| match &eval.0[axis] {
            EvalVar::Symbolic => Ok(None),
            EvalVar::Const(c) => {
                if c.is_one() {
                    return Ok(None);
                }
                field
                    .from_ratio(c.numer(), c.denom())
                    .map(Some)
                    .ok_or_else(|| {
                        EnumerateError::DomainWeight(format!("constant {} has no image mod p", c))
                    })
            }
        })
        .collect()
}

fn aggregate_exact(levels: &ReducedLevels<Rationals>, eval: &EvalPoint) -> Vec<BigRational> {
    let desc = &levels.descriptor;
    levels
        .levels
        .iter()
        .map(|level| {
            let mut acc = BigRational::zero();
            for (state, v) in level {
                let mut term = v.clone();
                for (k, &axis) in desc.tracked_axes.iter().enumerate() {
                    if let EvalVar::Const(c) = &eval.0[axis] {
                        if !c.is_one() {
                            term *= rational_pow(c, state[k]);
                        }
                    }
                }
                acc += term;
            }
            acc
        })
        .collect()
}

pub fn rational_pow(c: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let mut base = if e > 0 { c.clone() } else { c.recip() };
    let mut k = e.unsigned_abs();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

/// Reduced DP levels kept whole, for callers that inspect per-state data.
pub fn count_walks_levels<R: crate::ring::WeightMap>(
    model: &Model,
    n_max: usize,
    ring: &R,
    eval: &EvalPoint,
) -> Result<ReducedLevels<R>, EnumerateError>
where
    R: Ring,
{
    engine::run_reduced(model, n_max, ring, eval, DEFAULT_MEMORY_LIMIT)
}

/// Fully symbolic coefficient array f_{pos, n} for n <= n_max.
pub fn count_walks_full(
    model: &Model,
    n_max: usize,
    memory_limit: u128,
) -> Result<FullSeries<Rationals>, EnumerateError> {
    let eval = EvalPoint::all_symbolic(model.dimension);
    let levels = engine::run_reduced(model, n_max, &Rationals, &eval, memory_limit)?;
    // every axis is tracked in the symbolic case, in axis order
    debug_assert_eq!(levels.descriptor.tracked_axes.len(), model.dimension);
    Ok(FullSeries { levels: levels.levels })
}

pub fn count_walks_full_mod(
    model: &Model,
    n_max: usize,
    p: u64,
    memory_limit: u128,
) -> Result<FullSeries<PrimeField>, EnumerateError> {
    let eval = EvalPoint::all_symbolic(model.dimension);
    let field = PrimeField::new(p);
    let levels = engine::run_reduced(model, n_max, &field, &eval, memory_limit)?;
    Ok(FullSeries { levels: levels.levels })
}

/// Exact integer count helper used in a few tests: sum of weights over all
/// walks of each length, as big rationals.
pub fn total_series_exact(model: &Model, n_max: usize) -> Vec<BigRational> {
    let eval = EvalPoint::all_ones(model.dimension);
    let s = count_walks(model, n_max, Domain::Exact, &eval).expect("exact run");
    match s.data {
        SeriesData::ExactDense { coeffs } => coeffs,
        _ => unreachable!(),
    }
}

pub fn bigint_to_rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rational_is_nonneg(r: &BigRational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::parse_model;

    fn half_space() -> Model {
        parse_model(
            "label: hs\n\
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
    fn reduce_state_collapses_free_axis() {
        let m = half_space();
        let d = reduce_state(&m, &EvalPoint::all_ones(2));
        assert_eq!(d.tracked_axes, vec![0]);
        assert_eq!(d.collapsed_axes, vec![(1, 2)]);
        assert!(d.dropped_axes.is_empty());
        assert_eq!(d.time_modulus, None);

        let full = reduce_state(&m, &EvalPoint::all_symbolic(2));
        assert_eq!(full.tracked_axes, vec![0, 1]);
        assert!(full.collapsed_axes.is_empty());
    }

    #[test]
    fn half_space_first_terms() {
        // frozen from the path oracle: 1, 3, 18, 93, 550
        let m = half_space();
        let s = count_walks(&m, 4, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
        let (_, coeffs) = s.mod_coeffs().unwrap();
        assert_eq!(coeffs, &[1, 3, 18, 93, 550]);
        let exact = total_series_exact(&m, 4);
        let want: Vec<BigRational> = [1, 3, 18, 93, 550]
            .iter()
            .map(|&x| bigint_to_rational(x))
            .collect();
        assert_eq!(exact, want);
    }

    #[test]
    fn eval_zero_with_negative_steps_rejected() {
        let m = half_space();
        let eval = EvalPoint(vec![
            EvalVar::Const(BigRational::one()),
            EvalVar::Const(BigRational::zero()),
        ]);
        assert!(matches!(
            count_walks(&m, 3, Domain::Exact, &eval),
            Err(EnumerateError::InvalidEval(_))
        ));
    }

    #[test]
    fn engines_and_oracle_agree_on_random_models() {
        use crate::model::sample::{random_model, SampleOptions};
        use rand::SeedableRng;
        let field = PrimeField::new(45007);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xE17);
        for trial in 0..40 {
            let opts = SampleOptions { rational_weights: trial % 2 == 1, ..Default::default() };
            let m = random_model(&mut rng, &opts);
            let oracle = brute::brute_force_totals(&m, 9).unwrap();
            let exact = total_series_exact(&m, 9);
            assert_eq!(exact, oracle, "exact vs oracle, trial {}\n{:?}", trial, m);
            let s = count_walks(&m, 9, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
            let (_, coeffs) = s.mod_coeffs().unwrap();
            for (n, c) in coeffs.iter().enumerate() {
                let want = field.from_ratio(oracle[n].numer(), oracle[n].denom()).unwrap();
                assert_eq!(*c, want, "mod vs oracle at order {}, trial {}\n{:?}", n, trial, m);
            }
        }
    }

    #[test]
    fn planar_and_map_engines_agree_with_position_constants() {
        // exercises the tracked-axis power tables in the planar aggregator
        let m = half_space();
        let eval = EvalPoint(vec![
            EvalVar::Const(crate::ring::rational_from_parts(2, 1)),
            EvalVar::Const(BigRational::one()),
        ]);
        let s = count_walks(&m, 30, Domain::Mod(45007), &eval).unwrap();
        let e = count_walks(&m, 30, Domain::Exact, &eval).unwrap();
        let field = PrimeField::new(45007);
        let (_, mc) = s.mod_coeffs().unwrap();
        let ec = e.exact_coeffs().unwrap();
        for n in 0..=30 {
            let want = field.from_ratio(ec[n].numer(), ec[n].denom()).unwrap();
            assert_eq!(mc[n], want, "order {}", n);
        }
    }

    #[test]
    fn memory_bound_is_enforced() {
        let m = half_space();
        let err = count_walks_bounded(&m, 4000, Domain::Mod(45007), &EvalPoint::all_ones(2), 100);
        assert!(matches!(err, Err(EnumerateError::MemoryBound { .. })));
    }

    #[test]
    fn series_json_round_trip() {
        let s = Series {
            vars: vec!["t".into()],
            order: 3,
            data: SeriesData::ModDense { prime: 45007, coeffs: vec![1, 3, 18, 93] },
        };
        let j = s.to_json();
        let back = Series::from_json(&j).unwrap();
        assert_eq!(s, back);

        let e = Series {
            vars: vec!["t".into()],
            order: 1,
            data: SeriesData::ExactDense {
                coeffs: vec![bigint_to_rational(1), crate::ring::rational_from_parts(3, 2)],
            },
        };
        let j = e.to_json();
        assert_eq!(j["domain"]["kind"], "rational");
        let back = Series::from_json(&j).unwrap();
        assert_eq!(e, back);
    }
}
