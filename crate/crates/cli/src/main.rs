use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use std::path::{Path, PathBuf};
use walkforge::enumerate::{count_walks, Domain, EvalPoint, EvalVar, Series};
use walkforge::funceq::lemma2::lemma2_check_at;
use walkforge::funceq::{build_system_at_one, kernel_identity_holds, total_at_one};
use walkforge::guess::{
    algebraic_holds, differential_holds, fit_algebraic, fit_differential, fit_recurrence,
    recurrence_holds, GuessOptions, PolyMod,
};
use walkforge::model::parse::parse_model;
use walkforge::model::space::Family;
use walkforge::model::Model;
use walkforge::orbit::reproduce::{reproduce_position_parity, reproduce_time_alternating};
use walkforge::pipeline::{
    render_report, report_from_log, run_classification, PipelineConfig,
};

#[derive(Parser)]
#[command(name = "walkforge", version, about = "Inhomogeneous lattice walks: enumeration, functional equations, guessing, dimension, orbit sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count walks of a model and write the series as JSON
    Enumerate {
        model: PathBuf,
        #[arg(long)]
        terms: usize,
        /// "exact" or "mod:P"
        #[arg(long, default_value = "exact")]
        domain: String,
        /// "ones", "symbolic", or assignments like "x=1,y=1/2"
        #[arg(long, default_value = "ones")]
        eval: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the sectioned functional equation of a model, solve it as a
    /// series, and cross-check against direct enumeration
    Funceq {
        model: PathBuf,
        #[arg(long, default_value_t = 60)]
        terms: usize,
        /// Also verify the kernel identity behind the solving recursion
        #[arg(long)]
        check_kernel: bool,
        /// Check the determinant identity at "n,k,p" (requires p = 1 mod k)
        #[arg(long)]
        lemma2: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a recurrence, ODE, or algebraic equation to a modular series
    Guess {
        series: PathBuf,
        /// "rec", "ode", or "alg"
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        /// Must match the series prime when both are given
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the model dimension with audit certificates
    Dimension {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun a worked orbit-sum reproduction and report every checkpoint
    OrbitCheck {
        /// "darco" (position parity) or "timeinhom" (alternating steps)
        #[arg(long)]
        example: String,
        #[arg(long, default_value_t = 25)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter, enumerate, and guess across a model family, appending one
    /// JSON line per model to a resumable log
    Classify {
        /// "space" or "time"
        #[arg(long)]
        family: String,
        /// Deterministic sample size; omit for the full family
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        #[arg(long, default_value_t = 45007)]
        prime: u64,
        #[arg(long, default_value_t = 12)]
        max_order: usize,
        #[arg(long, default_value_t = 60)]
        max_degree: usize,
        #[arg(long, default_value_t = 64)]
        probe_terms: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Skip models already present in the log
        #[arg(long)]
        resume: bool,
        /// Stop after the filters; log survivors as candidates
        #[arg(long)]
        filters_only: bool,
    },
    /// Summarize a classification log
    Report {
        log: PathBuf,
        /// Emit the summary as JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).map_err(|e| anyhow!("parsing {}: {}", path.display(), e))
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            std::fs::write(path, text + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{}", text),
    }
    Ok(())
}

fn parse_domain(spec: &str) -> Result<Domain> {
    if spec == "exact" {
        return Ok(Domain::Exact);
    }
    if let Some(p) = spec.strip_prefix("mod:") {
        return Ok(Domain::Mod(p.parse().context("prime after mod:")?));
    }
    bail!("domain must be \"exact\" or \"mod:P\", got {:?}", spec)
}

fn parse_eval(spec: &str, dim: usize) -> Result<EvalPoint> {
    match spec {
        "ones" => return Ok(EvalPoint::all_ones(dim)),
        "symbolic" => return Ok(EvalPoint::all_symbolic(dim)),
        _ => {}
    }
    let axis_of = |name: &str| -> Result<usize> {
        let axis = match name {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => name
                .strip_prefix('x')
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| anyhow!("unknown variable {:?}", name))?,
        };
        if axis >= dim {
            bail!("variable {:?} exceeds the model dimension {}", name, dim);
        }
        Ok(axis)
    };
    let mut vars = vec![None; dim];
    for part in spec.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected name=value, got {:?}", part))?;
        let axis = axis_of(name.trim())?;
        if vars[axis].is_some() {
            bail!("variable {:?} assigned twice", name);
        }
        let rational: BigRational = value
            .trim()
            .parse()
            .map_err(|e| anyhow!("value {:?}: {}", value, e))?;
        vars[axis] = Some(EvalVar::Const(rational));
    }
    let vars = vars
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| anyhow!("axis {} has no assignment", i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalPoint(vars))
}

fn blocks_json(coeffs: &[PolyMod]) -> serde_json::Value {
    serde_json::json!(coeffs.iter().map(|p| p.coeffs.clone()).collect::<Vec<_>>())
}

fn run_guess(
    series_path: &Path,
    kind: &str,
    max_order: usize,
    max_degree: usize,
    prime_flag: Option<u64>,
) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(series_path)
        .with_context(|| format!("reading {}", series_path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("series JSON")?;
    let series = Series::from_json(&value).map_err(|e| anyhow!("series file: {}", e))?;
    let (prime, coeffs) = series
        .mod_coeffs()
        .ok_or_else(|| anyhow!("guessing needs a dense modular series; enumerate with --domain mod:P"))?;
    if let Some(p) = prime_flag {
        if p != prime {
            bail!("series is mod {}, but --prime {} was given", prime, p);
        }
    }
    let opts = GuessOptions { max_order, max_degree, ..Default::default() };
    let (found, order_key, degree_key): (Option<(Vec<PolyMod>, usize, usize, bool)>, _, _) =
        match kind {
            "rec" => (
                fit_recurrence(coeffs, prime, &opts).map(|eq| {
                    let ok = recurrence_holds(coeffs, &eq);
                    (eq.coeffs.clone(), eq.order(), eq.degree(), ok)
                }),
                "order",
                "degree",
            ),
            "ode" => (
                fit_differential(coeffs, prime, &opts).map(|eq| {
                    let ok = differential_holds(coeffs, &eq);
                    (eq.coeffs.clone(), eq.order(), eq.degree(), ok)
                }),
                "order",
                "degree",
            ),
            "alg" => (
                fit_algebraic(coeffs, prime, &opts).map(|eq| {
                    let ok = algebraic_holds(coeffs, &eq);
                    (eq.coeffs.clone(), eq.degree_f(), eq.degree_t(), ok)
                }),
                "degree_f",
                "degree_t",
            ),
            other => bail!("kind must be rec, ode, or alg, got {:?}", other),
        };
    let mut report = serde_json::json!({
        "kind": kind,
        "prime": prime,
        "terms": coeffs.len(),
        "max_order": max_order,
        "max_degree": max_degree,
        "status": if found.is_some() { "found" } else { "not_found" },
    });
    if let Some((blocks, order, degree, verified)) = found {
        report[order_key] = order.into();
        report[degree_key] = degree.into();
        report["verified"] = verified.into();
        report["coefficients"] = blocks_json(&blocks);
    }
    Ok(report)
}

fn run_funceq(
    model_path: &Path,
    terms: usize,
    check_kernel: bool,
    lemma2: Option<&str>,
) -> Result<serde_json::Value> {
    let model = load_model(model_path)?;
    let sys = build_system_at_one(&model).map_err(|e| anyhow!("building system: {}", e))?;
    let totals = total_at_one(&sys, terms);
    let direct = count_walks(&model, terms, Domain::Exact, &EvalPoint::all_ones(model.dimension))
        .map_err(|e| anyhow!("enumeration: {}", e))?;
    let direct = direct.exact_coeffs().expect("exact domain yields exact coefficients");
    let matches = totals == direct;
    let mut report = serde_json::json!({
        "model": model.label,
        "terms": terms,
        "series_matches_enumeration": matches,
        "series": totals.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    if check_kernel {
        report["kernel_identity"] = kernel_identity_holds(&sys, terms).into();
    }
    if let Some(spec) = lemma2 {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 3 {
            bail!("--lemma2 wants n,k,p");
        }
        let n = parts[0].trim().parse().context("lemma2 n")?;
        let k = parts[1].trim().parse().context("lemma2 k")?;
        let p = parts[2].trim().parse().context("lemma2 p")?;
        let det = lemma2_check_at(n, k, p, 20, 0);
        report["lemma2"] = serde_json::to_value(&det)?;
    }
    Ok(report)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Enumerate { model, terms, domain, eval, out } => {
            let model = load_model(&model)?;
            let domain = parse_domain(&domain)?;
            let eval = parse_eval(&eval, model.dimension)?;
            let series = count_walks(&model, terms, domain, &eval)
                .map_err(|e| anyhow!("enumeration: {}", e))?;
            emit(&series.to_json(), out.as_deref())
        }
        Command::Funceq { model, terms, check_kernel, lemma2, out } => {
            let report = run_funceq(&model, terms, check_kernel, lemma2.as_deref())?;
            emit(&report, out.as_deref())
        }
        Command::Guess { series, kind, max_order, max_degree, prime, out } => {
            let report = run_guess(&series, &kind, max_order, max_degree, prime)?;
            emit(&report, out.as_deref())
        }
        Command::Dimension { model, out } => {
            let model = load_model(&model)?;
            let report = walkforge::dimension::dimension(&model);
            emit(&serde_json::to_value(&report)?, out.as_deref())
        }
        Command::OrbitCheck { example, terms, out } => {
            let report = match example.as_str() {
                "darco" => serde_json::to_value(reproduce_position_parity(terms))?,
                "timeinhom" => serde_json::to_value(reproduce_time_alternating(terms))?,
                other => bail!("example must be darco or timeinhom, got {:?}", other),
            };
            emit(&report, out.as_deref())
        }
        Command::Classify {
            family,
            sample,
            seed,
            terms,
            prime,
            max_order,
            max_degree,
            probe_terms,
            jobs,
            out,
            resume,
            filters_only,
        } => {
            let family = match family.as_str() {
                "space" => Family::Space,
                "time" => Family::Time,
                other => bail!("family must be space or time, got {:?}", other),
            };
            let config = PipelineConfig {
                sample: sample.map(|k| (seed, k)),
                terms,
                prime,
                max_order,
                max_degree,
                probe_terms,
                workers: jobs,
                filters_only,
                resume,
                ..PipelineConfig::desk_scale(family, out)
            };
            let summary = run_classification(&config)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            eprintln!("summarize with: walkforge report {}", summary.out.display());
            Ok(())
        }
        Command::Report { log, json } => {
            let report = report_from_log(&log)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_report(&report));
            }
            Ok(())
        }
    }
}
