//! Batch classification of family models: cheap filters first, then term
//! enumeration and equation guessing, with results appended to a JSONL log
//! that a rerun can resume from.

use crate::dimension::dimension_up_to;
use crate::enumerate::{count_walks, Domain, EnumerateError, EvalPoint};
use crate::guess::{
    algebraic_holds, differential_holds, fit_algebraic, fit_differential, GuessOptions,
};
use crate::model::space::{enumerate_family, steps_to_mask, Convention, Family, FamilyConfig};
use crate::model::parse::serialize_body;
use crate::model::{InhomogeneityTag, Model};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Two primes for the constant-tail probe; a sequence that merely collides
/// with a constant mod one prime is caught by the other.
pub const PROBE_PRIMES: [u64; 2] = [45007, 1_000_003];

pub mod outcome {
    pub const TRIVIAL: &str = "trivial";
    pub const HOMOGENEOUS: &str = "homogeneous";
    pub const LOW_DIMENSION: &str = "low_dimension";
    /// Survived every filter in a filters-only run.
    pub const CANDIDATE: &str = "candidate";
    pub const D_FINITE: &str = "d_finite";
    pub const ALGEBRAIC: &str = "algebraic";
    pub const UNKNOWN: &str = "unknown";
    pub const ERROR: &str = "error";
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineConfig {
    pub family: Family,
    /// (seed, count) to draw a deterministic sample instead of the full stream.
    pub sample: Option<(u64, usize)>,
    pub terms: usize,
    pub prime: u64,
    pub max_order: usize,
    pub max_degree: usize,
    /// Bounds for the algebraic-equation attempt on models with an ODE:
    /// degree in the unknown series and in t.
    pub algebraic_degree_f: usize,
    pub algebraic_degree_t: usize,
    pub probe_terms: usize,
    pub workers: usize,
    /// Stop after the filters; survivors are logged as candidates.
    pub filters_only: bool,
    /// Skip models whose label already has a log line instead of refusing
    /// to touch a nonempty log.
    pub resume: bool,
    pub out: PathBuf,
}

impl PipelineConfig {
    pub fn desk_scale(family: Family, out: PathBuf) -> Self {
        PipelineConfig {
            family,
            sample: None,
            terms: 2000,
            prime: 45007,
            max_order: 12,
            max_degree: 60,
            algebraic_degree_f: 6,
            algebraic_degree_t: 16,
            probe_terms: 64,
            workers: 1,
            filters_only: false,
            resume: false,
            out,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |m: String| Err(PipelineError::Config(m));
        if self.probe_terms < 50 {
            return fail(format!("probe_terms {} is below the minimum 50", self.probe_terms));
        }
        if self.workers == 0 {
            return fail("workers must be positive".into());
        }
        if self.prime < 3 || self.prime >= 1 << 31 || !is_prime(self.prime) {
            return fail(format!("{} is not an odd prime below 2^31", self.prime));
        }
        let unknowns = (self.max_order + 1) * (self.max_degree + 1);
        if !self.filters_only && self.terms < unknowns + holdout_len(self.terms) {
            return fail(format!(
                "{} terms cannot support a {} x {} ansatz plus the held-out tail",
                self.terms,
                self.max_order + 1,
                self.max_degree + 1
            ));
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Mirrors the guesser's default held-out tail length.
fn holdout_len(terms: usize) -> usize {
    (terms / 20).max(20)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrivialVerdict {
    pub trivial: bool,
    /// Inclusive index window whose coefficients were required to agree.
    pub window: (usize, usize),
}

/// A model is trivial when its counting sequence at (1, 1) is eventually
/// constant on the probe window mod both probe primes: walks that die out
/// or are forced into a single path.
pub fn filter_trivial(model: &Model, probe_terms: usize) -> Result<TrivialVerdict, EnumerateError> {
    let lo = probe_terms / 2;
    let window = (lo, probe_terms);
    for &p in &PROBE_PRIMES {
        let series = count_walks(model, probe_terms, Domain::Mod(p), &EvalPoint::all_ones(model.dimension))?;
        let (_, coeffs) = series.mod_coeffs().expect("modular domain yields modular coefficients");
        let v = coeffs[lo];
        if coeffs[lo..=probe_terms].iter().any(|&c| c != v) {
            return Ok(TrivialVerdict { trivial: false, window });
        }
    }
    Ok(TrivialVerdict { trivial: true, window })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquationSummary {
    pub order: usize,
    pub degree: usize,
    /// Every available term satisfied the equation, holdout included.
    pub verified: bool,
    pub holdout: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub label: String,
    pub family: String,
    pub s0_mask: Option<u16>,
    pub s1_mask: Option<u16>,
    pub model: String,
    pub tag: String,
    pub outcome: String,
    /// Which filter removed the model, when one did.
    pub filter: Option<String>,
    pub trivial_window: Option<(usize, usize)>,
    pub delta: Option<usize>,
    pub terms: Option<usize>,
    pub prime: Option<u64>,
    /// SHA-256 of the modular coefficient sequence.
    pub fingerprint: Option<String>,
    pub ode: Option<EquationSummary>,
    pub algebraic: Option<EquationSummary>,
    pub error: Option<String>,
    pub millis: u64,
}

fn base_record(model: &Model, family: Family) -> ResultRecord {
    let masks: Vec<Option<u16>> = model
        .step_sets
        .values()
        .map(|steps| steps_to_mask(steps))
        .collect();
    ResultRecord {
        label: model.label.clone(),
        family: family.as_str().into(),
        s0_mask: masks.first().copied().flatten(),
        s1_mask: masks.get(1).copied().flatten(),
        model: serialize_body(model),
        tag: model.classify().as_str().into(),
        outcome: outcome::UNKNOWN.into(),
        filter: None,
        trivial_window: None,
        delta: None,
        terms: None,
        prime: None,
        fingerprint: None,
        ode: None,
        algebraic: None,
        error: None,
        millis: 0,
    }
}

fn series_fingerprint(prime: u64, coeffs: &[u64]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prime.to_le_bytes());
    for c in coeffs {
        hasher.update(c.to_le_bytes());
    }
    format!("{:x}", hasher.finalize())
}

/// Runs one model through filters and, unless filtered or in filters-only
/// mode, enumeration and guessing. Never panics outward.
pub fn classify_one(model: &Model, config: &PipelineConfig) -> ResultRecord {
    let start = Instant::now();
    let mut record = base_record(model, config.family);
    let verdict = catch_unwind(AssertUnwindSafe(|| classify_inner(model, config, record.clone())));
    record = match verdict {
        Ok(rec) => rec,
        Err(payload) => {
            record.outcome = outcome::ERROR.into();
            record.error = Some(panic_message(payload));
            record
        }
    };
    record.millis = start.elapsed().as_millis() as u64;
    record
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {}", s)
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {}", s)
    } else {
        "panic".into()
    }
}

fn classify_inner(model: &Model, config: &PipelineConfig, mut record: ResultRecord) -> ResultRecord {
    match filter_trivial(model, config.probe_terms) {
        Ok(verdict) => {
            record.trivial_window = Some(verdict.window);
            if verdict.trivial {
                record.outcome = outcome::TRIVIAL.into();
                record.filter = Some("trivial".into());
                return record;
            }
        }
        Err(e) => {
            record.outcome = outcome::ERROR.into();
            record.error = Some(format!("trivial probe: {}", e));
            return record;
        }
    }
    if model.classify() == InhomogeneityTag::Homogeneous {
        record.outcome = outcome::HOMOGENEOUS.into();
        record.filter = Some("homogeneous".into());
        return record;
    }
    if let Some(report) = dimension_up_to(model, 1) {
        record.delta = Some(report.delta);
        record.outcome = outcome::LOW_DIMENSION.into();
        record.filter = Some("dimension".into());
        return record;
    }
    if config.filters_only {
        record.outcome = outcome::CANDIDATE.into();
        return record;
    }

    let series = match count_walks(
        model,
        config.terms,
        Domain::Mod(config.prime),
        &EvalPoint::all_ones(model.dimension),
    ) {
        Ok(s) => s,
        Err(e) => {
            record.outcome = outcome::ERROR.into();
            record.error = Some(format!("enumeration: {}", e));
            return record;
        }
    };
    let (_, coeffs) = series.mod_coeffs().expect("modular domain yields modular coefficients");
    record.terms = Some(config.terms);
    record.prime = Some(config.prime);
    record.fingerprint = Some(series_fingerprint(config.prime, coeffs));
    let holdout = holdout_len(coeffs.len());

    let ode_opts = GuessOptions {
        max_order: config.max_order,
        max_degree: config.max_degree,
        ..Default::default()
    };
    let Some(ode) = fit_differential(coeffs, config.prime, &ode_opts) else {
        record.outcome = outcome::UNKNOWN.into();
        return record;
    };
    record.ode = Some(EquationSummary {
        order: ode.order(),
        degree: ode.degree(),
        verified: differential_holds(coeffs, &ode),
        holdout,
    });
    record.outcome = outcome::D_FINITE.into();

    let alg_opts = GuessOptions {
        max_order: config.algebraic_degree_f,
        max_degree: config.algebraic_degree_t,
        ..Default::default()
    };
    if let Some(alg) = fit_algebraic(coeffs, config.prime, &alg_opts) {
        record.algebraic = Some(EquationSummary {
            order: alg.degree_f(),
            degree: alg.degree_t(),
            verified: algebraic_holds(coeffs, &alg),
            holdout,
        });
        record.outcome = outcome::ALGEBRAIC.into();
    }
    record
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub models: usize,
    pub skipped_resume: usize,
    pub written: usize,
    pub corrupt_lines: usize,
    pub out: PathBuf,
}

/// Streams the configured family through `classify_one` on a worker pool,
/// appending one JSON line per model. With `resume`, labels already in the
/// log are skipped, so a killed run continues where it stopped.
pub fn run_classification(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let family_config = FamilyConfig {
        family: config.family,
        convention: Convention { include_empty: false, pair_swap: false },
        exclude_homogeneous: false,
        sample: config.sample,
    };
    let models = enumerate_family(&family_config);

    let mut done = HashSet::new();
    let mut corrupt_lines = 0;
    if config.out.exists() {
        if !config.resume && std::fs::metadata(&config.out)?.len() > 0 {
            return Err(PipelineError::Config(format!(
                "{} already has results; pass resume to continue or pick a new path",
                config.out.display()
            )));
        }
        if config.resume {
            let (records, corrupt) = read_log(&config.out)?;
            corrupt_lines = corrupt;
            done = records.into_iter().map(|r| r.label).collect();
        }
    }
    let todo: Vec<&Model> = models.iter().filter(|m| !done.contains(&m.label)).collect();
    let skipped_resume = models.len() - todo.len();

    let mut writer = BufWriter::new(OpenOptions::new().create(true).append(true).open(&config.out)?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {}", e)))?;

    let chunk_size = (config.workers * 4).clamp(8, 64);
    let mut written = 0;
    for chunk in todo.chunks(chunk_size) {
        let records: Vec<ResultRecord> =
            pool.install(|| chunk.par_iter().map(|m| classify_one(m, config)).collect());
        for record in &records {
            let line = serde_json::to_string(record)
                .map_err(|e| PipelineError::Config(format!("serialize record: {}", e)))?;
            writer.write_all(line.as_bytes())?;
            writer.write_all(b"\n")?;
            written += 1;
        }
        writer.flush()?;
    }
    Ok(RunSummary {
        models: models.len(),
        skipped_resume,
        written,
        corrupt_lines,
        out: config.out.clone(),
    })
}

/// Parses a result log, skipping lines that do not decode; the count of
/// such lines is returned so damage stays visible.
pub fn read_log(path: &Path) -> Result<(Vec<ResultRecord>, usize), PipelineError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut corrupt = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ResultRecord>(&line) {
            Ok(r) => records.push(r),
            Err(_) => corrupt += 1,
        }
    }
    Ok((records, corrupt))
}

/// Published totals from the original full-scale classification, shown in
/// reports as context. Desk-scale runs use fewer terms and smaller ansatz
/// bounds, so matching them is not expected and never asserted.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReferenceTotals {
    pub family: &'static str,
    pub pair_orbits: usize,
    pub pool_after_filters: usize,
    pub seem_d_finite: usize,
    pub seem_algebraic: usize,
}

pub const REFERENCE_TOTALS: [ReferenceTotals; 2] = [
    ReferenceTotals {
        family: "space",
        pair_orbits: 32993,
        pool_after_filters: 23906,
        seem_d_finite: 3784,
        seem_algebraic: 2474,
    },
    ReferenceTotals {
        family: "time",
        pair_orbits: 32993,
        pool_after_filters: 25370,
        seem_d_finite: 2603,
        seem_algebraic: 1535,
    },
];

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalEquation {
    pub label: String,
    pub order: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySummary {
    pub family: String,
    pub total: usize,
    pub by_outcome: BTreeMap<String, usize>,
    pub after_trivial: usize,
    pub after_homogeneous: usize,
    pub survivors: usize,
    pub d_finite: usize,
    pub algebraic: usize,
    pub largest_ode: Option<ExtremalEquation>,
    pub largest_algebraic: Option<ExtremalEquation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub records: usize,
    pub corrupt_lines: usize,
    pub families: Vec<FamilySummary>,
}

pub fn summarize(records: &[ResultRecord], corrupt_lines: usize) -> PipelineReport {
    let mut grouped: BTreeMap<String, Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.family.clone()).or_default().push(r);
    }
    let families = grouped
        .into_iter()
        .map(|(family, rs)| {
            let mut by_outcome: BTreeMap<String, usize> = BTreeMap::new();
            for r in &rs {
                *by_outcome.entry(r.outcome.clone()).or_default() += 1;
            }
            let count = |o: &str| by_outcome.get(o).copied().unwrap_or(0);
            let total = rs.len();
            let after_trivial = total - count(outcome::TRIVIAL);
            let after_homogeneous = after_trivial - count(outcome::HOMOGENEOUS);
            let survivors = after_homogeneous - count(outcome::LOW_DIMENSION);
            let d_finite = count(outcome::D_FINITE) + count(outcome::ALGEBRAIC);
            let algebraic = count(outcome::ALGEBRAIC);
            let largest = |pick: fn(&ResultRecord) -> &Option<EquationSummary>| {
                rs.iter()
                    .filter_map(|r| pick(r).as_ref().map(|e| (r, e)))
                    .max_by_key(|(_, e)| (e.order, e.degree))
                    .map(|(r, e)| ExtremalEquation {
                        label: r.label.clone(),
                        order: e.order,
                        degree: e.degree,
                    })
            };
            FamilySummary {
                family,
                total,
                by_outcome,
                after_trivial,
                after_homogeneous,
                survivors,
                d_finite,
                algebraic,
                largest_ode: largest(|r| &r.ode),
                largest_algebraic: largest(|r| &r.algebraic),
            }
        })
        .collect();
    PipelineReport { records: records.len(), corrupt_lines, families }
}

pub fn report_from_log(path: &Path) -> Result<PipelineReport, PipelineError> {
    let (records, corrupt) = read_log(path)?;
    Ok(summarize(&records, corrupt))
}

pub fn render_report(report: &PipelineReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push(&mut out, format!("records: {}", report.records));
    if report.corrupt_lines > 0 {
        push(&mut out, format!("warning: skipped {} corrupt log lines", report.corrupt_lines));
    }
    for f in &report.families {
        push(&mut out, format!("\nfamily {}: {} models", f.family, f.total));
        let outcomes = f
            .by_outcome
            .iter()
            .map(|(k, v)| format!("{} {}", k, v))
            .collect::<Vec<_>>()
            .join(", ");
        push(&mut out, format!("  outcomes: {}", outcomes));
        push(
            &mut out,
            format!(
                "  pool sizes: {} after trivial, {} after homogeneous, {} after dimension",
                f.after_trivial, f.after_homogeneous, f.survivors
            ),
        );
        if f.survivors > 0 {
            push(
                &mut out,
                format!(
                    "  d-finite {} ({:.1}% of survivors), algebraic among them {}",
                    f.d_finite,
                    100.0 * f.d_finite as f64 / f.survivors as f64,
                    f.algebraic
                ),
            );
        }
        if let Some(e) = &f.largest_ode {
            push(&mut out, format!("  largest ODE: order {}, degree {} ({})", e.order, e.degree, e.label));
        }
        if let Some(e) = &f.largest_algebraic {
            push(
                &mut out,
                format!("  largest algebraic equation: degree {} in F, {} in t ({})", e.order, e.degree, e.label),
            );
        }
        if let Some(reference) = REFERENCE_TOTALS.iter().find(|t| t.family == f.family) {
            push(
                &mut out,
                format!(
                    "  reference full-scale run: {} pair orbits, pool {}, seemingly d-finite {} ({:.1}%), seemingly algebraic {}",
                    reference.pair_orbits,
                    reference.pool_after_filters,
                    reference.seem_d_finite,
                    100.0 * reference.seem_d_finite as f64 / reference.pool_after_filters as f64,
                    reference.seem_algebraic
                ),
            );
            push(
                &mut out,
                "  note: the reference run used far more terms and wider ansatz bounds; desk-scale counts are comparison points, not reproductions".into(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::parse_model;
    use crate::model::space::family_model;

    fn quarter(s0: &str, s1: &str) -> Model {
        parse_model(&format!(
            "label: test\ndimension: 2\nnonneg_axes: 2\nmoduli: 2\n\
             residue_poly: 0 ; 1 1 ; 0\nstart: 0 0\nsteps 0: {}\nsteps 1: {}\n",
            s0, s1
        ))
        .unwrap()
    }

    fn tiny_config(out: PathBuf) -> PipelineConfig {
        PipelineConfig {
            terms: 240,
            max_order: 4,
            max_degree: 12,
            algebraic_degree_f: 4,
            algebraic_degree_t: 8,
            probe_terms: 56,
            sample: Some((11, 6)),
            ..PipelineConfig::desk_scale(Family::Space, out)
        }
    }

    #[test]
    fn dead_and_forced_walks_are_trivial_but_growth_is_not() {
        let dead = quarter("-1 -1", "-1 -1");
        let verdict = filter_trivial(&dead, 56).unwrap();
        assert!(verdict.trivial);
        assert_eq!(verdict.window, (28, 56));
        let forced = quarter("1 1", "1 1");
        assert!(filter_trivial(&forced, 56).unwrap().trivial);
        let growing = quarter("0 1, 1 0", "0 1, 1 0");
        assert!(!filter_trivial(&growing, 56).unwrap().trivial);
    }

    #[test]
    fn filters_catch_homogeneous_and_low_dimension_models() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path().join("log.jsonl"));
        let homogeneous = family_model(Family::Space, 0b0101, 0b0101);
        let rec = classify_one(&homogeneous, &config);
        assert_eq!(rec.outcome, outcome::HOMOGENEOUS);
        assert_eq!(rec.filter.as_deref(), Some("homogeneous"));
        // N on even parity, N or S on odd: the walk never leaves the y axis
        // and the parity structure even forces the endpoint up, so no
        // endpoint inequality needs checking at all
        let low = family_model(Family::Space, 0b0000_0001, 0b0001_0001);
        let rec = classify_one(&low, &config);
        assert_eq!(rec.outcome, outcome::LOW_DIMENSION);
        assert_eq!(rec.delta, Some(0));
        assert_eq!(rec.s0_mask, Some(0b0000_0001));
        assert_eq!(rec.s1_mask, Some(0b0001_0001));
        // mirrored roles: a lone S from the start class is realizable and
        // breaks the y inequality, so exactly one inequality is needed
        let low = family_model(Family::Space, 0b0001_0001, 0b0000_0001);
        let rec = classify_one(&low, &config);
        assert_eq!(rec.outcome, outcome::LOW_DIMENSION);
        assert_eq!(rec.delta, Some(1));
    }

    #[test]
    fn a_known_d_finite_survivor_gets_a_verified_equation() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path().join("log.jsonl"));
        // axis steps on even coordinate sum, all eight on odd
        let model = family_model(Family::Space, 0b0101_0101, 0b1111_1111);
        let rec = classify_one(&model, &config);
        assert_eq!(rec.outcome, outcome::D_FINITE);
        let ode = rec.ode.expect("differential equation");
        assert!(ode.verified);
        assert!(ode.order <= 4);
        assert!(rec.fingerprint.is_some());
        assert!(rec.error.is_none());
    }

    #[test]
    fn run_writes_resumes_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path().join("log.jsonl"));
        config.filters_only = true;
        let summary = run_classification(&config).unwrap();
        assert_eq!(summary.models, 6);
        assert_eq!(summary.written, 6);
        assert_eq!(summary.skipped_resume, 0);

        // a second run without resume refuses to touch the log
        assert!(matches!(run_classification(&config), Err(PipelineError::Config(_))));

        // resumed run adds nothing new
        config.resume = true;
        let summary = run_classification(&config).unwrap();
        assert_eq!(summary.skipped_resume, 6);
        assert_eq!(summary.written, 0);

        // a corrupt line is tolerated and counted
        let mut bytes = std::fs::read(&config.out).unwrap();
        bytes.extend_from_slice(b"{not json\n");
        std::fs::write(&config.out, bytes).unwrap();
        let (records, corrupt) = read_log(&config.out).unwrap();
        assert_eq!(records.len(), 6);
        assert_eq!(corrupt, 1);

        let report = summarize(&records, corrupt);
        assert_eq!(report.records, 6);
        let family = &report.families[0];
        assert_eq!(family.family, "space");
        assert_eq!(family.total, 6);
        let counted: usize = family.by_outcome.values().sum();
        assert_eq!(counted, 6);
        assert!(family.survivors <= family.after_homogeneous);
        let text = render_report(&report);
        assert!(text.contains("family space"));
        assert!(text.contains("pool 23906"));
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("log.jsonl");
        let mut config = PipelineConfig::desk_scale(Family::Time, out.clone());
        config.probe_terms = 10;
        assert!(config.validate().is_err());
        let mut config = PipelineConfig::desk_scale(Family::Time, out.clone());
        config.prime = 45006;
        assert!(config.validate().is_err());
        let mut config = PipelineConfig::desk_scale(Family::Time, out);
        config.terms = 100;
        assert!(config.validate().is_err());
    }
}
