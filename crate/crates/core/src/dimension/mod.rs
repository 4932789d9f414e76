//! Which step-count vectors come from actual walks, and how many endpoint
//! inequalities a model really needs. A vector of step multiplicities is
//! realizable iff the multigraph on residue classes it induces has an
//! Eulerian path from the start class; that condition is a finite
//! disjunction of linear systems. The model dimension is the size of the
//! smallest subset of endpoint inequalities that, together with those
//! systems, implies the rest, decided by exact rational LP with
//! certificates either way.

pub mod simplex;

use crate::model::{Model, ResidueVec};
use num_rational::BigRational;
use serde::Serialize;
use simplex::{farkas_is_valid, solve, LpOutcome};
use std::collections::BTreeSet;

/// The disjoint union of all step sets: one variable per (class, step),
/// in the deterministic order classes-then-steps.
#[derive(Clone, Debug)]
pub struct StepUnion {
    /// (source class, target class, displacement) per variable.
    pub entries: Vec<(ResidueVec, ResidueVec, Vec<i64>)>,
}

impl StepUnion {
    pub fn of(model: &Model) -> Self {
        let mut entries = Vec::new();
        for (r, steps) in &model.step_sets {
            for s in steps {
                let inc = model.class_increment(&s.disp);
                let target: ResidueVec = r
                    .iter()
                    .zip(&inc)
                    .zip(&model.moduli)
                    .map(|((&rq, &iq), &m)| (rq + iq).rem_euclid(m))
                    .collect();
                entries.push((r.clone(), target, s.disp.clone()));
            }
        }
        StepUnion { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(r, _, disp)| {
                format!(
                    "class ({}) step ({})",
                    r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    disp.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                )
            })
            .collect()
    }
}

/// constant + coeffs . a, over the step-union variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl LinearForm {
    pub fn eval(&self, v: &[i64]) -> i128 {
        let mut s = self.constant as i128;
        for (c, x) in self.coeffs.iter().zip(v) {
            s += (*c as i128) * (*x as i128);
        }
        s
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.constant != 0 {
            parts.push(self.constant.to_string());
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            match *c {
                0 => {}
                1 => parts.push(format!("a{i}")),
                -1 => parts.push(format!("-a{i}")),
                c => parts.push(format!("{c}*a{i}")),
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rel {
    Eq,
    Ge,
}

/// A single constraint: form = 0 or form >= 0.
#[derive(Clone, Debug, Serialize)]
pub struct Constraint {
    pub form: LinearForm,
    pub rel: Rel,
    pub label: String,
}

impl Constraint {
    pub fn holds(&self, v: &[i64]) -> bool {
        let s = self.form.eval(v);
        match self.rel {
            Rel::Eq => s == 0,
            Rel::Ge => s >= 0,
        }
    }
}

/// One case of the Eulerian-path disjunction: a chosen end class, a set of
/// active classes (containing the start class), and the linear constraints
/// that make the induced multigraph carry an Eulerian path from start to
/// end touching exactly the active classes.
#[derive(Clone, Debug)]
pub struct EulerianSystem {
    pub end: ResidueVec,
    pub active: Vec<ResidueVec>,
    pub constraints: Vec<Constraint>,
}

impl EulerianSystem {
    pub fn accepts(&self, v: &[i64]) -> bool {
        v.iter().all(|&x| x >= 0) && self.constraints.iter().all(|c| c.holds(v))
    }
}

fn edge_form(union: &StepUnion, from: &ResidueVec, to: &ResidueVec) -> Vec<i64> {
    union
        .entries
        .iter()
        .map(|(r, s, _)| i64::from(r == from && s == to))
        .collect()
}

/// All edge subsets of size |vertices|-1 that connect the given vertices
/// (edges as index pairs into the vertex list).
fn spanning_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let need = k - 1;
    let mut choice = Vec::new();
    fn connects(k: usize, edges: &[(usize, usize)]) -> bool {
        let mut root: Vec<usize> = (0..k).collect();
        fn find(root: &mut Vec<usize>, mut i: usize) -> usize {
            while root[i] != i {
                root[i] = root[root[i]];
                i = root[i];
            }
            i
        }
        for &(a, b) in edges {
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            root[ra] = rb;
        }
        (0..k).all(|i| find(&mut root, i) == find(&mut root, 0))
    }
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        need: usize,
        k: usize,
        choice: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if choice.len() == need {
            if connects(k, choice) {
                out.push(choice.clone());
            }
            return;
        }
        for i in start..pairs.len() {
            choice.push(pairs[i]);
            rec(pairs, i + 1, need, k, choice, out);
            choice.pop();
        }
    }
    rec(&pairs, 0, need, k, &mut choice, &mut out);
    out
}

/// The full case split. A vector is realizable iff at least one returned
/// system accepts it. Cases range over subsets of classes containing the
/// start class (the classes allowed to carry edges), spanning trees pinning
/// those classes together (connectivity is not a linear condition, but
/// "these class pairs each carry at least one edge in some direction" is),
/// and the end class of the path.
pub fn eulerian_systems(model: &Model) -> Vec<EulerianSystem> {
    let union = StepUnion::of(model);
    let classes = model.residue_vectors();
    let r0 = model.start_class();
    let r0_idx = classes.iter().position(|c| *c == r0).expect("start class listed");
    let k = classes.len();
    let mut out = Vec::new();

    for mask in 0..(1u32 << k) {
        if mask & (1 << r0_idx) == 0 {
            continue;
        }
        let active: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let active_classes: Vec<ResidueVec> = active.iter().map(|&i| classes[i].clone()).collect();

        // steps whose source or target class is outside the active set are
        // unused; with a >= 0 one combined row is equivalent to one per step
        let mut outside = vec![0i64; union.len()];
        let mut any_outside = false;
        for (j, (r, s, _)) in union.entries.iter().enumerate() {
            if !active_classes.contains(r) || !active_classes.contains(s) {
                outside[j] = 1;
                any_outside = true;
            }
        }
        let zero_row = any_outside.then(|| Constraint {
            form: LinearForm { coeffs: outside, constant: 0 },
            rel: Rel::Eq,
            label: "steps touching inactive classes are unused".into(),
        });

        let trees: Vec<Vec<(usize, usize)>> =
            if active.len() >= 2 { spanning_trees(active.len()) } else { vec![vec![]] };

        for tree in &trees {
            let mut tree_rows = Vec::new();
            for &(ai, bi) in tree {
                let va = &active_classes[ai];
                let vb = &active_classes[bi];
                let mut coeffs = edge_form(&union, va, vb);
                for (c, d) in coeffs.iter_mut().zip(edge_form(&union, vb, va)) {
                    *c += d;
                }
                tree_rows.push(Constraint {
                    form: LinearForm { coeffs, constant: -1 },
                    rel: Rel::Ge,
                    label: format!("classes ({:?}) and ({:?}) are joined", va, vb),
                });
            }

            for &f_idx in &active {
                let end = classes[f_idx].clone();
                let mut constraints = Vec::new();
                if let Some(z) = &zero_row {
                    constraints.push(z.clone());
                }
                constraints.extend(tree_rows.iter().cloned());
                if active.len() >= 2 {
                    for &v_idx in &active {
                        let v = &classes[v_idx];
                        let mut coeffs = vec![0i64; union.len()];
                        for (j, (r, s, _)) in union.entries.iter().enumerate() {
                            if r == v {
                                coeffs[j] += 1;
                            }
                            if s == v {
                                coeffs[j] -= 1;
                            }
                        }
                        let constant = i64::from(*v == end) - i64::from(*v == r0);
                        constraints.push(Constraint {
                            form: LinearForm { coeffs, constant },
                            rel: Rel::Eq,
                            label: format!("degree balance at ({:?})", v),
                        });
                    }
                }
                out.push(EulerianSystem { end, active: active_classes.clone(), constraints });
            }
        }
    }
    out
}

/// True iff the vector is the step-count vector of some walk of the model
/// (in the unrestricted lattice, starting at the model's start point).
pub fn realizable(model: &Model, v: &[i64]) -> bool {
    let union = StepUnion::of(model);
    assert_eq!(v.len(), union.len(), "vector indexes the disjoint step union");
    eulerian_systems(model).iter().any(|s| s.accepts(v))
}

/// One inequality per constrained axis: the endpoint coordinate
/// start_i + sum of a_u * u_i must be nonnegative.
pub fn endpoint_inequalities(model: &Model) -> Vec<LinearForm> {
    let union = StepUnion::of(model);
    (0..model.nonneg_axes)
        .map(|axis| LinearForm {
            coeffs: union.entries.iter().map(|(_, _, disp)| disp[axis]).collect(),
            constant: model.start[axis],
        })
        .collect()
}

/// Where a non-implication witness came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessSource {
    /// Found by enumerating small integer vectors.
    Search,
    /// Read off a feasible LP point.
    Lp,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub vector: Vec<BigRational>,
    /// Integer form of the witness when scaling and re-checking succeeds.
    pub integer: Option<Vec<i64>>,
    /// Index of the Eulerian case that accepts it.
    pub case: usize,
    pub source: WitnessSource,
}

#[derive(Clone, Debug)]
pub enum Implication {
    /// Every Eulerian case is infeasible; one set of verified Farkas
    /// multipliers per case, aligned with case_rows' constraint order.
    Implied { per_case: Vec<Vec<BigRational>> },
    NotImplied { witness: Witness },
}

/// The LP rows for one case of an implication query: the case's own
/// constraints, nonnegativity, the kept inequalities, and the negated
/// target (target <= -1). Shared by the prover and any auditor.
pub fn case_rows(
    system: &EulerianSystem,
    nvars: usize,
    inequalities: &[LinearForm],
    kept: &[usize],
    target: usize,
) -> Vec<Constraint> {
    let mut rows = system.constraints.clone();
    for i in 0..nvars {
        let mut coeffs = vec![0i64; nvars];
        coeffs[i] = 1;
        rows.push(Constraint {
            form: LinearForm { coeffs, constant: 0 },
            rel: Rel::Ge,
            label: format!("a{i} >= 0"),
        });
    }
    for &k in kept {
        rows.push(Constraint {
            form: inequalities[k].clone(),
            rel: Rel::Ge,
            label: format!("kept endpoint inequality {k}"),
        });
    }
    let t = &inequalities[target];
    rows.push(Constraint {
        form: LinearForm {
            coeffs: t.coeffs.iter().map(|c| -c).collect(),
            constant: -t.constant - 1,
        },
        rel: Rel::Ge,
        label: format!("endpoint inequality {target} violated"),
    });
    rows
}

const SEARCH_TOTAL: i64 = 4;
const FALLBACK_TOTAL: i64 = 12;

fn search_vectors(
    systems: &[EulerianSystem],
    nvars: usize,
    inequalities: &[LinearForm],
    kept: &[usize],
    target: usize,
    total: i64,
) -> Option<(Vec<i64>, usize)> {
    let mut v = vec![0i64; nvars];
    fn rec(
        v: &mut Vec<i64>,
        pos: usize,
        left: i64,
        systems: &[EulerianSystem],
        inequalities: &[LinearForm],
        kept: &[usize],
        target: usize,
    ) -> Option<(Vec<i64>, usize)> {
        if pos == v.len() {
            if inequalities[target].eval(v) > -1 {
                return None;
            }
            if kept.iter().any(|&k| inequalities[k].eval(v) < 0) {
                return None;
            }
            let case = systems.iter().position(|s| s.accepts(v))?;
            return Some((v.clone(), case));
        }
        for x in 0..=left {
            v[pos] = x;
            if let Some(hit) = rec(v, pos + 1, left - x, systems, inequalities, kept, target) {
                return Some(hit);
            }
        }
        v[pos] = 0;
        None
    }
    rec(&mut v, 0, total, systems, inequalities, kept, target)
}

fn scale_to_integers(x: &[BigRational]) -> Option<Vec<i64>> {
    let mut lcm = num_bigint::BigInt::from(1);
    for v in x {
        lcm = num_integer::lcm(lcm, v.denom().clone());
    }
    x.iter()
        .map(|v| {
            let n = (v * BigRational::from_integer(lcm.clone())).to_integer();
            i64::try_from(&n).ok()
        })
        .collect()
}

/// Decides whether the kept inequalities plus the Eulerian systems imply
/// the target inequality. Tries a small integer search for a counterexample
/// first; otherwise every Eulerian case goes through the exact LP, which
/// either produces a counterexample or Farkas multipliers for each case.
pub fn implies(
    systems: &[EulerianSystem],
    nvars: usize,
    inequalities: &[LinearForm],
    kept: &[usize],
    target: usize,
) -> Implication {
    if let Some((v, case)) =
        search_vectors(systems, nvars, inequalities, kept, target, SEARCH_TOTAL)
    {
        return Implication::NotImplied {
            witness: Witness {
                vector: v.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
                integer: Some(v),
                case,
                source: WitnessSource::Search,
            },
        };
    }
    implies_lp(systems, nvars, inequalities, kept, target)
}

/// The LP-only route, also used directly by tests that audit certificates.
pub fn implies_lp(
    systems: &[EulerianSystem],
    nvars: usize,
    inequalities: &[LinearForm],
    kept: &[usize],
    target: usize,
) -> Implication {
    let mut per_case = Vec::with_capacity(systems.len());
    for (case, system) in systems.iter().enumerate() {
        let rows = case_rows(system, nvars, inequalities, kept, target);
        match solve(&rows) {
            LpOutcome::Infeasible(mult) => {
                assert!(farkas_is_valid(&rows, &mult), "simplex certificate must verify");
                per_case.push(mult);
            }
            LpOutcome::Feasible(x) => {
                // scaling by the denominator lcm preserves balance (homo-
                // geneous), nonnegativity, and >= 1 rows; the kept and
                // target rows are re-checked since their constants do not
                // scale along
                let integer = scale_to_integers(&x).filter(|v| {
                    system.accepts(v)
                        && kept.iter().all(|&k| inequalities[k].eval(v) >= 0)
                        && inequalities[target].eval(v) <= -1
                });
                let integer = integer.or_else(|| {
                    search_vectors(systems, nvars, inequalities, kept, target, FALLBACK_TOTAL)
                        .map(|(v, _)| v)
                });
                return Implication::NotImplied {
                    witness: Witness { vector: x, integer, case, source: WitnessSource::Lp },
                };
            }
        }
    }
    Implication::Implied { per_case }
}

/// A Farkas certificate for one omitted inequality, serialized with the
/// multipliers as exact rational strings aligned to case_rows order.
#[derive(Clone, Debug, Serialize)]
pub struct TargetCertificate {
    pub target: usize,
    pub per_case_multipliers: Vec<Vec<String>>,
}

/// A subset that failed during the search, with the counterexample.
#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub subset: Vec<usize>,
    pub target: usize,
    pub counterexample: Vec<String>,
    pub counterexample_integer: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub label: String,
    pub variables: Vec<String>,
    pub inequalities: Vec<String>,
    pub delta: usize,
    pub implying_subset: Vec<usize>,
    pub certificates: Vec<TargetCertificate>,
    pub rejections: Vec<Rejection>,
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Smallest subset of endpoint inequalities that implies the rest, searched
/// by size then lexicographically; delta = p is vacuously sufficient, so
/// the search always terminates with a report.
pub fn dimension(model: &Model) -> DimensionReport {
    dimension_up_to(model, model.nonneg_axes).expect("full subset is vacuous")
}

/// Same search truncated at subsets of size max_delta; None means the
/// dimension exceeds max_delta.
pub fn dimension_up_to(model: &Model, max_delta: usize) -> Option<DimensionReport> {
    let union = StepUnion::of(model);
    let systems = eulerian_systems(model);
    let inequalities = endpoint_inequalities(model);
    let p = inequalities.len();
    let mut rejections = Vec::new();

    for size in 0..=max_delta.min(p) {
        'subset: for subset in subsets_of_size(p, size) {
            let kept: BTreeSet<usize> = subset.iter().copied().collect();
            let mut certificates = Vec::new();
            for target in (0..p).filter(|t| !kept.contains(t)) {
                match implies(&systems, union.len(), &inequalities, &subset, target) {
                    Implication::Implied { per_case } => {
                        certificates.push(TargetCertificate {
                            target,
                            per_case_multipliers: per_case
                                .iter()
                                .map(|ms| ms.iter().map(|m| m.to_string()).collect())
                                .collect(),
                        });
                    }
                    Implication::NotImplied { witness } => {
                        rejections.push(Rejection {
                            subset: subset.clone(),
                            target,
                            counterexample: witness.vector.iter().map(|v| v.to_string()).collect(),
                            counterexample_integer: witness.integer,
                        });
                        continue 'subset;
                    }
                }
            }
            return Some(DimensionReport {
                label: model.label.clone(),
                variables: union.variable_names(),
                inequalities: inequalities.iter().map(|f| f.render()).collect(),
                delta: size,
                implying_subset: subset,
                certificates,
                rejections,
            });
        }
    }
    None
}
