//! Acceptance gate. Each criterion prints exactly one line of the form
//! "ACCEPTANCE n: PASS ..." or "ACCEPTANCE n: FAIL ...". A FAIL line means
//! the library's own checks establish that the target statement does not
//! hold as printed; the test then asserts the analyzed state instead, so a
//! regression in either direction is caught.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write as IoWrite;
use std::time::Instant;
use walkforge::dimension::{dimension, realizable, StepUnion};
use walkforge::enumerate::brute::brute_force_totals;
use walkforge::enumerate::{
    brute_force, count_walks, count_walks_full, total_series_exact, Domain, EvalPoint,
    DEFAULT_MEMORY_LIMIT,
};
use walkforge::funceq::lemma2::lemma2_check;
use walkforge::funceq::{build_system_at_one, total_at_one};
use walkforge::guess::{
    algebraic_holds, differential_holds, fit_algebraic, fit_differential, GuessOptions,
};
use walkforge::model::parse::parse_model;
use walkforge::model::sample::{random_half_space_model, random_model, SampleOptions};
use walkforge::model::space::{family_model, orbit_counts, Family};
use walkforge::model::Model;
use walkforge::orbit::reproduce::{
    position_parity_model, reproduce_position_parity, reproduce_time_alternating,
};
use walkforge::pipeline::{
    outcome, read_log, run_classification, summarize, PipelineConfig, REFERENCE_TOTALS,
};
use walkforge::ring::Rationals;

/// libtest captures stdout of passing tests, so the criterion lines are
/// written straight to the process stdout; plain println is the fallback.
fn announce(line: &str) {
    match std::fs::OpenOptions::new().write(true).open("/dev/stdout") {
        Ok(mut f) => {
            let _ = writeln!(f, "{}", line);
        }
        Err(_) => println!("{}", line),
    }
}

/// The running half-space example: axis steps on even i+j, all eight
/// compass steps on odd, walks in the upper half plane x >= 0.
fn example_one() -> Model {
    parse_model(
        "label: hs-alternating\ndimension: 2\nnonneg_axes: 1\nmoduli: 2\n\
         residue_poly: 0 ; 1 1 ; 0\nstart: 0 0\n\
         steps 0: 0 1, 1 0, 0 -1, -1 0\n\
         steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1\n",
    )
    .unwrap()
}

/// Quarter-plane model alternating axis steps and all eight by time parity.
fn time_alternating_quarter() -> Model {
    parse_model(
        "label: qp-alternating\ndimension: 2\nnonneg_axes: 2\nmoduli: 2\n\
         residue_poly: 0 ; 0 0 ; 1\nstart: 0 0\n\
         steps 0: 0 1, 1 0, 0 -1, -1 0\n\
         steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1\n",
    )
    .unwrap()
}

#[test]
fn acceptance_criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut checked = 0;
    for trial in 0..20 {
        let model = if trial % 4 == 3 {
            random_half_space_model(&mut rng)
        } else {
            let opts =
                SampleOptions { rational_weights: trial % 3 == 1, ..Default::default() };
            random_model(&mut rng, &opts)
        };
        let oracle = brute_force_totals(&model, 10).unwrap();
        let dp = total_series_exact(&model, 10);
        assert_eq!(dp, oracle, "totals diverge for {}\n{:?}", model.label, model);
        if trial % 4 == 0 {
            // full endpoint distributions, not just totals
            let full = count_walks_full(&model, 10, DEFAULT_MEMORY_LIMIT).unwrap();
            let ring = Rationals;
            for n in 0..=10usize {
                let brute = brute_force(&model, n).unwrap();
                for (pos, want) in &brute {
                    assert_eq!(
                        full.coeff(&ring, pos, n),
                        *want,
                        "endpoint {:?} at n={} for {:?}",
                        pos,
                        n,
                        model
                    );
                }
                let dp_mass: num_rational::BigRational =
                    full.levels[n].values().cloned().sum();
                let brute_mass: num_rational::BigRational = brute.values().cloned().sum();
                assert_eq!(dp_mass, brute_mass, "mass at n={} for {:?}", n, model);
            }
        }
        checked += 1;
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 120.0, "criterion 1 took {:.1} s, budget 120 s", secs);
    announce(&format!(
        "ACCEPTANCE 1: PASS - dynamic programming equals brute force on {} randomized models for all n <= 10 ({:.1} s)",
        checked, secs
    ));
}

#[test]
fn acceptance_criterion_2_functional_equation_cross_check() {
    let started = Instant::now();
    let model = example_one();
    let sys = build_system_at_one(&model).unwrap();
    assert_eq!(total_at_one(&sys, 100), total_series_exact(&model, 100), "running example");

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    for trial in 0..10 {
        let model = random_half_space_model(&mut rng);
        let sys = build_system_at_one(&model)
            .unwrap_or_else(|e| panic!("system for trial {} ({}): {}", trial, model.label, e));
        assert_eq!(
            total_at_one(&sys, 60),
            total_series_exact(&model, 60),
            "series recursion diverges on trial {}\n{:?}",
            trial,
            model
        );
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 120.0, "criterion 2 took {:.1} s, budget 120 s", secs);
    announce(&format!(
        "ACCEPTANCE 2: PASS - sectioned functional equation reproduces enumeration for the running half-space example (100 terms) and 10 random half-space models (60 terms) ({:.1} s)",
        secs
    ));
}

#[test]
fn acceptance_criterion_3_determinant_identity() {
    let started = Instant::now();
    let report = lemma2_check(100, 0xACC3);
    assert_eq!(report.matches, report.trials);
    assert_eq!(report.trials, 100);
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 10.0, "criterion 3 took {:.1} s, budget 10 s", secs);
    announce(&format!(
        "ACCEPTANCE 3: PASS - block-Vandermonde determinant matches its closed form up to sign in {}/{} randomized trials ({:.2} s)",
        report.matches, report.trials, secs
    ));
}

#[test]
fn acceptance_criterion_4_orbit_sum_reproduction() {
    let started = Instant::now();
    let parity = reproduce_position_parity(25);
    assert!(parity.formula_matches_enumeration, "position-parity formula regressed");
    assert!(parity.displayed_relations_hold);
    assert!(parity.boundary_orbit_sums_vanish);

    let time = reproduce_time_alternating(25);
    assert!(time.first_relation_holds);
    assert!(time.second_relation_holds);
    assert!(time.substituted_relation_internally_consistent);
    assert!(time.boundary_orbit_sums_vanish);
    // The published closed formula for the time-alternating model does not
    // match enumeration: the substitution step silently leaves the first
    // group's orbit, so the combined relation it is derived from never
    // holds. Both facts are pinned here; if either flips, this criterion
    // must be revisited.
    assert!(!time.substitution_transports_to_first_group);
    assert!(!time.formula_matches_enumeration);
    let witness = time.first_mismatch.clone().expect("a first mismatch exists");
    assert_eq!(
        (witness.order, witness.x_exp, witness.y_exp, witness.formula.as_str(), witness.enumeration.as_str()),
        (2, 1, 2, "0", "1")
    );

    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 300.0, "criterion 4 took {:.1} s, budget 300 s", secs);
    announce(&format!(
        "ACCEPTANCE 4: FAIL - position-parity formula matches enumeration to t^25 with boundary sums vanishing to t^20, but the time-alternating closed formula diverges at order 2, endpoint (1,2): formula 0 vs count 1; its derivation substitutes y -> (x+1/x)/y into a relation of the other symmetry group, which maps outside that group (relations and boundary sums themselves verify) ({:.1} s)",
        secs
    ));
}

#[test]
fn acceptance_criterion_5_guess_rediscovery() {
    let started = Instant::now();
    let prime = 45007u64;

    // Catalan numbers mod p by direct convolution
    let mut catalan = vec![1u64; 51];
    for n in 1..=50usize {
        let mut acc = 0u128;
        for k in 0..n {
            acc += catalan[k] as u128 * catalan[n - 1 - k] as u128;
        }
        catalan[n] = (acc % prime as u128) as u64;
    }
    let opts = GuessOptions { max_order: 3, max_degree: 3, ..Default::default() };
    let eq = fit_algebraic(&catalan[..50], prime, &opts).expect("catalan equation");
    assert!(algebraic_holds(&catalan[..50], &eq));
    // normalized form of 1 - F + t F^2 = 0
    let blocks: Vec<Vec<u64>> = eq.coeffs.iter().map(|p| p.coeffs.clone()).collect();
    assert_eq!(blocks, vec![vec![1, 0], vec![prime - 1, 0], vec![0, 1]]);

    // half-space running example: fit on 400 terms, verify on 800
    let hs = example_one();
    let series = count_walks(&hs, 800, Domain::Mod(prime), &EvalPoint::all_ones(2)).unwrap();
    let (_, coeffs) = series.mod_coeffs().unwrap();
    assert_eq!(&coeffs[..6], &[1, 3, 18, 93, 550, 3198]);
    let opts = GuessOptions { max_order: 4, max_degree: 8, ..Default::default() };
    let alg = fit_algebraic(&coeffs[..400], prime, &opts).expect("half-space equation");
    assert_eq!((alg.degree_f(), alg.degree_t()), (4, 7));
    assert!(algebraic_holds(coeffs, &alg), "verification on all 800 terms");

    // position-parity model: a verified ODE for the counting series
    let parity = position_parity_model();
    let series = count_walks(&parity, 600, Domain::Mod(prime), &EvalPoint::all_ones(2)).unwrap();
    let (_, coeffs) = series.mod_coeffs().unwrap();
    assert_eq!(&coeffs[..6], &[1, 2, 10, 44, 234, 1236]);
    let opts = GuessOptions { max_order: 4, max_degree: 8, ..Default::default() };
    let ode = fit_differential(&coeffs[..400], prime, &opts).expect("position-parity ODE");
    assert_eq!((ode.order(), ode.degree()), (4, 7));
    assert!(differential_holds(coeffs, &ode), "verification on all 600 terms");

    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 600.0, "criterion 5 took {:.1} s, budget 600 s", secs);
    announce(&format!(
        "ACCEPTANCE 5: PASS - guessing recovers t F^2 - F + 1 = 0 from 50 Catalan terms, a degree-(4,7) algebraic equation for the half-space example (fit 400, verified 800), and an order-4 degree-7 ODE for the position-parity model, held-out residuals all zero ({:.1} s)",
        secs
    ));
}

/// Exhaustive search for an ordering of the given step counts that is a
/// walk in the full lattice: realizability constrains only how the residue
/// classes chain together, never the region, so the region test is absent
/// here on purpose.
fn walk_exists(model: &Model, union: &StepUnion, counts: &[i64]) -> bool {
    fn rec(
        model: &Model,
        union: &StepUnion,
        pos: &mut Vec<i64>,
        n: i64,
        remaining: &mut Vec<i64>,
        left: i64,
    ) -> bool {
        if left == 0 {
            return true;
        }
        let class = model.class_of(pos, n);
        for idx in 0..union.entries.len() {
            if remaining[idx] == 0 || union.entries[idx].0 != class {
                continue;
            }
            let disp = union.entries[idx].2.clone();
            for (a, d) in disp.iter().enumerate() {
                pos[a] += d;
            }
            remaining[idx] -= 1;
            if rec(model, union, pos, n + 1, remaining, left - 1) {
                return true;
            }
            remaining[idx] += 1;
            for (a, d) in disp.iter().enumerate() {
                pos[a] -= d;
            }
        }
        false
    }
    let mut pos = model.start.clone();
    let mut remaining = counts.to_vec();
    let total: i64 = counts.iter().sum();
    rec(model, union, &mut pos, 0, &mut remaining, total)
}

fn vectors_with_sum_at_most(len: usize, total: i64) -> Vec<Vec<i64>> {
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, total, &mut vec![0; len], &mut out);
    out
}

#[test]
fn acceptance_criterion_6_dimension() {
    let started = Instant::now();

    // NE on even parity, SW on odd: one step of each is not a walk
    let diagonal = family_model(Family::Space, 0b0000_0010, 0b0010_0000);
    let union = StepUnion::of(&diagonal);
    assert_eq!(union.entries.len(), 2);
    assert!(!realizable(&diagonal, &[1, 1]), "(1,1) must be rejected");
    assert!(realizable(&diagonal, &[2, 0]), "NE twice is a walk");

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);
    let mut vectors_checked = 0u64;
    for trial in 0..30 {
        let family = if trial % 2 == 0 { Family::Space } else { Family::Time };
        let s0 = rng.gen_range(1..=255u16);
        let s1 = rng.gen_range(1..=255u16);
        let model = family_model(family, s0, s1);
        let union = StepUnion::of(&model);
        for v in vectors_with_sum_at_most(union.entries.len(), 6) {
            let claimed = realizable(&model, &v);
            let actual = walk_exists(&model, &union, &v);
            assert_eq!(
                claimed, actual,
                "trial {} model {} vector {:?}",
                trial, model.label, v
            );
            vectors_checked += 1;
        }
    }

    let axis = family_model(Family::Space, 0b0101_0101, 0b0101_0101);
    let report = dimension(&axis);
    assert_eq!(report.delta, 2);
    assert!(!report.rejections.is_empty());
    for rejection in &report.rejections {
        let integer = rejection
            .counterexample_integer
            .as_ref()
            .expect("integer counterexample certificate");
        assert!(!integer.is_empty());
    }

    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 300.0, "criterion 6 took {:.1} s, budget 300 s", secs);
    announce(&format!(
        "ACCEPTANCE 6: PASS - step-count vector (1,1) rejected for the NE/SW model, realizability agrees with exhaustive search on {} vectors across 30 random models, and the axis-step quarter plane gets dimension 2 with integer counterexample certificates ({:.1} s)",
        vectors_checked, secs
    ));
}

#[test]
fn acceptance_criterion_7_performance() {
    let quarter = time_alternating_quarter();
    let t0 = Instant::now();
    let s = count_walks(&quarter, 2000, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
    let quarter_secs = t0.elapsed().as_secs_f64();
    let (_, coeffs) = s.mod_coeffs().unwrap();
    assert_eq!(coeffs.len(), 2001);
    assert!(quarter_secs < 60.0, "quarter plane took {:.1} s, budget 60 s", quarter_secs);

    let half = example_one();
    let t0 = Instant::now();
    let s = count_walks(&half, 10000, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
    let half_secs = t0.elapsed().as_secs_f64();
    let (_, coeffs) = s.mod_coeffs().unwrap();
    assert_eq!(coeffs.len(), 10001);
    assert!(half_secs < 120.0, "half space took {:.1} s, budget 120 s", half_secs);

    announce(&format!(
        "ACCEPTANCE 7: PASS - 2000 terms mod 45007 for the alternating quarter-plane model in {:.1} s (budget 60) and 10000 terms for the residue-collapsed half-space model in {:.1} s (budget 120)",
        quarter_secs, half_secs
    ));
}

#[test]
fn acceptance_criterion_8_model_space_accounting() {
    let started = Instant::now();
    let counts = orbit_counts();
    let published = counts
        .iter()
        .find(|c| !c.include_empty && !c.pair_swap)
        .expect("nonempty, reflection-only convention");
    let convention_table = counts
        .iter()
        .map(|c| format!("{} = {}", c.description, c.orbits))
        .collect::<Vec<_>>()
        .join("; ");

    let dir = tempfile::tempdir().unwrap();
    let mut pools = Vec::new();
    for family in [Family::Space, Family::Time] {
        let config = PipelineConfig {
            filters_only: true,
            workers: 2,
            ..PipelineConfig::desk_scale(family, dir.path().join(format!("{}.jsonl", family.as_str())))
        };
        let summary = run_classification(&config).unwrap();
        assert_eq!(summary.written, 32993);
        let (records, corrupt) = read_log(&config.out).unwrap();
        assert_eq!(corrupt, 0);
        let report = summarize(&records, corrupt);
        let fam = &report.families[0];
        let reference = REFERENCE_TOTALS
            .iter()
            .find(|t| t.family == family.as_str())
            .unwrap();
        // space-parity models whose first class holds only even-displacement
        // steps never leave residue 0, so the second step set is unreachable
        // and the walk is a homogeneous one in disguise; the reference pool
        // appears to exclude most of these
        let diagonal: u16 = 0b1010_1010;
        let stuck = records
            .iter()
            .filter(|r| {
                r.outcome == outcome::CANDIDATE
                    && family == Family::Space
                    && r.s0_mask.map_or(false, |s0| s0 & !diagonal == 0)
            })
            .count();
        let stuck_note = if stuck > 0 {
            format!(", {} of the surviving models never reach the second class", stuck)
        } else {
            String::new()
        };
        pools.push(format!(
            "{}: survivors {} vs reference {} (difference {:+}{}; trivial {}, homogeneous {}, dimension <= 1 {})",
            family.as_str(),
            fam.survivors,
            reference.pool_after_filters,
            fam.survivors as i64 - reference.pool_after_filters as i64,
            stuck_note,
            fam.total - fam.after_trivial,
            fam.after_trivial - fam.after_homogeneous,
            fam.after_homogeneous - fam.survivors
        ));
        // guard against a silently broken filter, not a reproduction claim
        assert!(fam.survivors > 10_000 && fam.survivors < 32_993);
    }

    assert_eq!(published.orbits, 32993);
    let secs = started.elapsed().as_secs_f64();
    announce(&format!(
        "ACCEPTANCE 8: PASS - pair orbits per convention: {}; the nonempty reflection-only convention reproduces 32993; filters-only pools: {} - differences logged, the original run's filter conventions are not published ({:.0} s)",
        convention_table,
        pools.join("; "),
        secs
    ));
}

#[test]
fn acceptance_criterion_9_sampled_classification() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut lines = Vec::new();
    for family in [Family::Space, Family::Time] {
        let out = dir.path().join(format!("{}.jsonl", family.as_str()));
        let mut config = PipelineConfig {
            sample: Some((0xACC9, 200)),
            terms: 1000,
            max_order: 8,
            max_degree: 32,
            workers: 2,
            ..PipelineConfig::desk_scale(family, out)
        };
        let summary = run_classification(&config).unwrap();
        assert_eq!(summary.written, 200);

        // the log resumes: a rerun recomputes nothing
        config.resume = true;
        let summary = run_classification(&config).unwrap();
        assert_eq!(summary.written, 0);
        assert_eq!(summary.skipped_resume, 200);

        let (records, corrupt) = read_log(&config.out).unwrap();
        assert_eq!((records.len(), corrupt), (200, 0));
        for record in &records {
            let claims_d_finite =
                record.outcome == outcome::D_FINITE || record.outcome == outcome::ALGEBRAIC;
            if claims_d_finite {
                assert!(record.ode.as_ref().is_some_and(|e| e.verified), "{}", record.label);
            }
            if record.outcome == outcome::ALGEBRAIC {
                assert!(record.algebraic.as_ref().is_some_and(|e| e.verified), "{}", record.label);
            }
        }
        let report = summarize(&records, 0);
        let fam = &report.families[0];
        let reference = REFERENCE_TOTALS.iter().find(|t| t.family == fam.family).unwrap();
        lines.push(format!(
            "{}: {} of {} survivors d-finite ({:.1}%) vs reference {:.1}%",
            fam.family,
            fam.d_finite,
            fam.survivors,
            100.0 * fam.d_finite as f64 / fam.survivors.max(1) as f64,
            100.0 * reference.seem_d_finite as f64 / reference.pool_after_filters as f64
        ));
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 4.0 * 3600.0, "criterion 9 took {:.0} s, budget 4 h", secs);
    announce(&format!(
        "ACCEPTANCE 9: PASS - 200-model samples per family classified into deterministic resumable logs; {}; run bounds were 1000 terms with order <= 8, degree <= 32 against the reference run's 10000 terms and order-24/degree-1183 equations, so the observed fractions undershoot by construction ({:.0} s)",
        lines.join("; "),
        secs
    ));
}
