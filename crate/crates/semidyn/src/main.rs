//! Command-line driver: reproducible experiments over a JSON config.
//!
//! Exit codes: 0 success, 1 property failure, 2 config/usage error,
//! 3 budget exhausted, 4 precondition violated.

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use semidyn::classify::normality_score;
use semidyn::components::{label_components, recurrence_test};
use semidyn::config::{constant_expression, ExperimentConfig, RunManifest};
use semidyn::fixedpoints::{find_fixed_points, Polydisc};
use semidyn::gridscan::{compare, render_ppm, scan, write_csv, GridError};
use semidyn::polyalg::{PolyError, PolyMap};
use semidyn::properties::{
    check_backward_invariance, check_boundary_containment, check_commuting,
    check_finite_index_equality, check_forward_invariance, check_power_tuple_independence,
    check_volume_divergence, PropertiesError, PropertyReport,
};
use semidyn::semigroup::{PowerTuple, Semigroup, SemigroupError, Word};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "semidyn",
    version,
    about = "Fatou/Julia experiments for polynomial semigroups"
)]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rayon worker count (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the configured region and write PPM + CSV + manifest.
    Scan,
    /// Scan, then score the raster against the configured reference set.
    Compare,
    /// Fixed points of a generator word, written as CSV and JSON.
    FixedPoints {
        /// Word as comma-separated generator indices, outermost first.
        #[arg(long)]
        word: String,
        /// Search polydisc radius around the origin.
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        /// Newton multistart count.
        #[arg(long, default_value_t = 200)]
        starts: usize,
    },
    /// Trajectory of one word at one point, written as CSV.
    Orbit {
        /// Word as comma-separated generator indices, outermost first.
        #[arg(long)]
        word: String,
        /// Starting point: comma-separated constant expressions.
        #[arg(long)]
        point: String,
    },
    /// Run property checkers; nonzero exit if any selected property fails.
    Verify {
        /// Property names (repeatable): all, forward-invariance,
        /// backward-invariance, finite-index, power-tuple, commuting,
        /// boundary, volume-divergence.
        #[arg(long = "property")]
        properties: Vec<String>,
    },
    /// Recurrence diagnostics for one Fatou component.
    Recurrence {
        /// Component id from the labeling (row-major discovery order).
        #[arg(long)]
        component: Option<usize>,
        /// Point whose component to analyze: comma-separated constant
        /// expressions, e.g. "0.05,0.05" (grid coordinates of the region).
        #[arg(long)]
        at: Option<String>,
        /// Number of word sequences to sample.
        #[arg(long, default_value_t = 8)]
        sequences: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        let code = match e {
            GridError::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<PropertiesError> for Failure {
    fn from(e: PropertiesError) -> Self {
        let code = match &e {
            PropertiesError::NotCommuting(..)
            | PropertiesError::NotVolumePreserving(..)
            | PropertiesError::PreimageUnavailable
            | PropertiesError::EmptyComponent(..) => 4,
            PropertiesError::Grid(GridError::BudgetExceeded { .. }) => 3,
            PropertiesError::Semigroup(SemigroupError::BudgetExceeded { .. }) => 3,
            PropertiesError::Semigroup(SemigroupError::Poly(PolyError::DegreeBudgetExceeded {
                ..
            })) => 3,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(2, format!("io failure: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        // Global pool; results are identical at any worker count.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::new(2, "--config PATH is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    let mut config =
        ExperimentConfig::from_json(&text).map_err(|e| Failure::new(2, e.to_string()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn build_experiment(
    config: &ExperimentConfig,
) -> Result<
    (
        Semigroup,
        semidyn::gridscan::Region,
        semidyn::classify::ClassifierConfig,
    ),
    Failure,
> {
    let semigroup = config
        .build_semigroup()
        .map_err(|e| Failure::new(2, e.to_string()))?;
    let region = config
        .build_region()
        .map_err(|e| Failure::new(2, e.to_string()))?;
    Ok((semigroup, region, config.classifier()))
}

fn parse_word(text: &str, num_generators: usize) -> Result<Word, Failure> {
    let indices = text
        .split(',')
        .map(|part| {
            let idx: usize = part
                .trim()
                .parse()
                .map_err(|_| Failure::new(2, format!("bad word letter '{part}'")))?;
            if idx >= num_generators {
                return Err(Failure::new(
                    2,
                    format!("letter {idx} exceeds generator count {num_generators}"),
                ));
            }
            Ok(idx)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if indices.is_empty() {
        return Err(Failure::new(2, "empty word"));
    }
    Ok(Word::new(indices))
}

fn parse_point(text: &str, dimension: usize) -> Result<Vec<Complex64>, Failure> {
    let coords = text
        .split(',')
        .enumerate()
        .map(|(i, part)| {
            constant_expression(part.trim(), dimension, i)
                .map_err(|e| Failure::new(2, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != dimension {
        return Err(Failure::new(
            2,
            format!("point needs {dimension} coordinates, got {}", coords.len()),
        ));
    }
    Ok(coords)
}

/// Compose the word symbolically (degree budget applies; exceeding it is a
/// budget failure, exit 3).
fn word_map(semigroup: &Semigroup, word: &Word) -> Result<PolyMap, Failure> {
    let mut acc: Option<PolyMap> = None;
    for &idx in word.indices.iter().rev() {
        let gen = semigroup.generator(idx);
        acc = Some(match acc {
            None => gen.clone(),
            Some(inner) => gen
                .compose(&inner, semidyn::polyalg::COMPOSE_DEGREE_BUDGET)
                .map_err(|e| match e {
                    PolyError::DegreeBudgetExceeded { .. } => Failure::new(3, e.to_string()),
                    other => Failure::new(2, other.to_string()),
                })?,
        });
    }
    Ok(acc.expect("word is nonempty"))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::new(2, format!("serialization failure: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Scan => cmd_scan(cli),
        Command::Compare => cmd_compare(cli),
        Command::FixedPoints {
            word,
            radius,
            starts,
        } => cmd_fixed_points(cli, word, *radius, *starts),
        Command::Orbit { word, point } => cmd_orbit(cli, word, point),
        Command::Verify { properties } => cmd_verify(cli, properties),
        Command::Recurrence {
            component,
            at,
            sequences,
        } => cmd_recurrence(cli, *component, at.as_deref(), *sequences),
    }
}

fn cmd_scan(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let (semigroup, region, classifier) = build_experiment(&config)?;
    let raster = scan(&semigroup, &region, &classifier)?;
    let ppm_path = cli.out.join(&config.output.ppm);
    let csv_path = cli.out.join(&config.output.csv);
    render_ppm(&raster, &ppm_path)?;
    write_csv(&raster, &csv_path)?;
    let mut manifest = RunManifest::new(&config, Some(&raster));
    manifest.add_output(&ppm_path)?;
    manifest.add_output(&csv_path)?;
    let manifest_path = cli.out.join(&config.output.manifest);
    write_json(&manifest_path, &manifest)?;
    let counts = raster.counts();
    println!(
        "scan {}: {} cells (bounded {}, escaping {}, julia {}, undetermined {})",
        config.name,
        raster.cells.len(),
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    println!("wrote {}", ppm_path.display());
    println!("wrote {}", csv_path.display());
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn cmd_compare(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let reference = config
        .reference
        .clone()
        .ok_or_else(|| Failure::new(2, "compare needs a reference set in the config"))?;
    let (semigroup, region, classifier) = build_experiment(&config)?;
    let raster = scan(&semigroup, &region, &classifier)?;
    let report = compare(&raster, &reference, config.compare_band)?;
    let report_path = cli.out.join(&config.output.report);
    write_json(&report_path, &report)?;
    match report.agreement {
        Some(a) => println!(
            "compare {}: agreement {:.4} over {} scored cells ({} excluded, {} undecided)",
            config.name, a, report.n_scored, report.n_band_excluded, report.n_undecided
        ),
        None => println!("compare {}: no scored cells", config.name),
    }
    println!("wrote {}", report_path.display());
    Ok(())
}

fn cmd_fixed_points(cli: &Cli, word_text: &str, radius: f64, starts: usize) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let (semigroup, _, _) = build_experiment(&config)?;
    let word = parse_word(word_text, semigroup.num_generators())?;
    let map = word_map(&semigroup, &word)?;
    let region = Polydisc::around_origin(semigroup.dim(), radius);
    let records = find_fixed_points(&map, &region, starts, 1e-10, 120);
    // CSV table.
    let mut csv = String::from("re1,im1,re2,im2,residual,kind,jacobian_det_modulus,eigenvalues\n");
    for r in &records {
        let eigen_text: Vec<String> = r
            .eigenvalues
            .iter()
            .map(|e| format!("{:.9}{:+.9}i", e.re, e.im))
            .collect();
        csv.push_str(&format!(
            "{:.12},{:.12},{:.12},{:.12},{:.3e},{},{:.9},{}\n",
            r.location[0].re,
            r.location[0].im,
            r.location[1].re,
            r.location[1].im,
            r.residual,
            r.kind,
            r.jacobian_det_modulus,
            eigen_text.join(";")
        ));
    }
    let csv_path = cli.out.join("fixed_points.csv");
    std::fs::write(&csv_path, csv)?;
    // JSON mirror.
    #[derive(serde::Serialize)]
    struct JsonRecord {
        location: Vec<[f64; 2]>,
        residual: f64,
        kind: String,
        jacobian_det_modulus: f64,
        eigenvalues: Vec<[f64; 2]>,
    }
    let json: Vec<JsonRecord> = records
        .iter()
        .map(|r| JsonRecord {
            location: r.location.iter().map(|c| [c.re, c.im]).collect(),
            residual: r.residual,
            kind: r.kind.to_string(),
            jacobian_det_modulus: r.jacobian_det_modulus,
            eigenvalues: r.eigenvalues.iter().map(|c| [c.re, c.im]).collect(),
        })
        .collect();
    let json_path = cli.out.join("fixed_points.json");
    write_json(&json_path, &json)?;
    println!(
        "fixed-points {} word {}: {} records",
        config.name,
        word,
        records.len()
    );
    for r in &records {
        println!(
            "  ({:.6}, {:.6}) kind {} residual {:.2e}",
            r.location[0], r.location[1], r.kind, r.residual
        );
    }
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn cmd_orbit(cli: &Cli, word_text: &str, point_text: &str) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let (semigroup, _, classifier) = build_experiment(&config)?;
    let word = parse_word(word_text, semigroup.num_generators())?;
    let point = parse_point(point_text, semigroup.dim())?;
    let record = semigroup.orbit(&word, &point, classifier.escape_radius, 100_000);
    let mut csv = String::from("step,re1,im1,re2,im2,sup_norm\n");
    for (i, p) in record.points.iter().enumerate() {
        csv.push_str(&format!(
            "{},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            i + 1,
            p[0].re,
            p[0].im,
            p[1].re,
            p[1].im,
            semidyn::semigroup::sup_norm(p)
        ));
    }
    let csv_path = cli.out.join("orbit.csv");
    std::fs::write(&csv_path, csv)?;
    match record.exit_step {
        Some(step) => println!(
            "orbit exited radius {} at sequence element {step} (max norm {:.3e})",
            classifier.escape_radius, record.max_norm
        ),
        None => println!(
            "orbit completed the word within radius {} (max norm {:.3e})",
            classifier.escape_radius, record.max_norm
        ),
    }
    println!(
        "normality score at start: {:.4}",
        normality_score(&semigroup, &point, &classifier)
    );
    println!("wrote {}", csv_path.display());
    Ok(())
}

const ALL_PROPERTIES: [&str; 7] = [
    "forward-invariance",
    "backward-invariance",
    "finite-index",
    "power-tuple",
    "commuting",
    "boundary",
    "volume-divergence",
];

fn cmd_verify(cli: &Cli, properties: &[String]) -> Result<(), Failure> {
    if properties.is_empty() {
        return Err(Failure::new(2, "verify needs at least one --property"));
    }
    // With `all`, inapplicable checks (missing config data, non-commuting
    // generators, non-volume-preserving maps) are skipped with a note;
    // explicitly named properties turn those conditions into hard errors.
    let run_all = properties.iter().any(|p| p == "all");
    let selected: Vec<String> = if run_all {
        ALL_PROPERTIES.iter().map(|s| s.to_string()).collect()
    } else {
        for p in properties {
            if !ALL_PROPERTIES.contains(&p.as_str()) {
                return Err(Failure::new(
                    2,
                    format!("unknown property '{p}'; expected one of {ALL_PROPERTIES:?} or all"),
                ));
            }
        }
        properties.to_vec()
    };
    let config = load_config(cli)?;
    let (semigroup, region, classifier) = build_experiment(&config)?;
    let band = config.compare_band;
    let threshold = config.violation_threshold;

    // Shared artifacts, computed at most once.
    let mut raster = None;
    let mut raster_of = |semigroup: &Semigroup| -> Result<semidyn::gridscan::Raster, Failure> {
        if raster.is_none() {
            raster = Some(scan(semigroup, &region, &classifier)?);
        }
        Ok(raster.clone().unwrap())
    };

    let mut reports: Vec<PropertyReport> = Vec::new();
    for property in &selected {
        let outcome: Result<PropertyReport, Failure> =
            (|| match property.as_str() {
                "forward-invariance" => {
                    let raster = raster_of(&semigroup)?;
                    Ok(check_forward_invariance(
                        &semigroup,
                        &raster,
                        &classifier,
                        120,
                        band,
                        threshold,
                    ))
                }
                "backward-invariance" => {
                    let raster = raster_of(&semigroup)?;
                    Ok(check_backward_invariance(
                        &semigroup,
                        &raster,
                        &classifier,
                        60,
                        threshold,
                    )?)
                }
                "finite-index" => {
                    let tuple = config.power_tuple.clone().ok_or_else(|| {
                        Failure::new(2, "finite-index needs power_tuple in config")
                    })?;
                    Ok(check_finite_index_equality(
                        &semigroup,
                        &PowerTuple(tuple),
                        &region,
                        &classifier,
                        band,
                        threshold,
                    )?)
                }
                "power-tuple" => {
                    let tuple = config.power_tuple.clone().ok_or_else(|| {
                        Failure::new(2, "power-tuple needs power_tuple in config")
                    })?;
                    let alt = config.power_tuple_alt.clone().ok_or_else(|| {
                        Failure::new(2, "power-tuple needs power_tuple_alt in config")
                    })?;
                    Ok(check_power_tuple_independence(
                        &semigroup,
                        &PowerTuple(tuple),
                        &PowerTuple(alt),
                        &region,
                        &classifier,
                        band,
                        threshold,
                    )?)
                }
                "commuting" => {
                    let mut report = PropertyReport {
                        property: "commuting".into(),
                        n_checked: 0,
                        n_violations: 0,
                        n_excluded: 0,
                        threshold: 0.0,
                        pass: true,
                        witnesses: Vec::new(),
                        notes: Vec::new(),
                    };
                    let m = semigroup.num_generators();
                    for i in 0..m {
                        for j in i + 1..m {
                            report.n_checked += 1;
                            if !check_commuting(
                                semigroup.generator(i),
                                semigroup.generator(j),
                                64,
                                1e-9,
                            ) {
                                report.n_violations += 1;
                                report.pass = false;
                                report
                                    .notes
                                    .push(format!("generators {i} and {j} do not commute"));
                            }
                        }
                    }
                    Ok(report)
                }
                "boundary" => {
                    let raster = raster_of(&semigroup)?;
                    let labeling = label_components(&raster);
                    Ok(check_boundary_containment(
                        &semigroup,
                        &labeling,
                        &classifier,
                        60,
                        0.1,
                    ))
                }
                "volume-divergence" => {
                    let raster = raster_of(&semigroup)?;
                    let labeling = label_components(&raster);
                    if labeling.component_count == 0 {
                        return Err(Failure::new(4, "no Fatou components to test"));
                    }
                    Ok(check_volume_divergence(
                        &semigroup,
                        &labeling,
                        0,
                        &classifier,
                        8,
                    )?)
                }
                other => unreachable!("validated property {other}"),
            })();
        match outcome {
            Ok(report) => {
                println!(
                    "{}: {} ({} checked, {} violations)",
                    report.property,
                    if report.pass { "pass" } else { "FAIL" },
                    report.n_checked,
                    report.n_violations
                );
                reports.push(report);
            }
            Err(failure) if run_all && (failure.code == 2 || failure.code == 4) => {
                println!("{property}: skipped ({})", failure.message);
            }
            Err(failure) => return Err(failure),
        }
    }
    let report_path = cli.out.join(&config.output.report);
    write_json(&report_path, &reports)?;
    println!("wrote {}", report_path.display());
    if reports.iter().any(|r| !r.pass) {
        return Err(Failure::new(1, "one or more properties failed"));
    }
    Ok(())
}

fn cmd_recurrence(
    cli: &Cli,
    component: Option<usize>,
    at: Option<&str>,
    sequences: usize,
) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let (semigroup, region, classifier) = build_experiment(&config)?;
    let raster = scan(&semigroup, &region, &classifier)?;
    let labeling = label_components(&raster);
    if labeling.component_count == 0 {
        return Err(Failure::new(4, "raster has no Fatou components"));
    }
    let component_id = match (component, at) {
        (Some(id), _) => id,
        (None, Some(point_text)) => {
            let coords: Vec<f64> = point_text
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Failure::new(2, format!("bad grid coordinate '{p}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coords.len() != 2 {
                return Err(Failure::new(2, "--at needs two grid coordinates"));
            }
            labeling.locate(coords[0], coords[1]).ok_or_else(|| {
                Failure::new(4, "the given point is not inside any Fatou component")
            })?
        }
        (None, None) => 0,
    };
    let report = recurrence_test(&semigroup, &labeling, component_id, &classifier, sequences)
        .map_err(|e| Failure::new(4, e.to_string()))?;
    let report_path = cli.out.join(&config.output.report);
    write_json(&report_path, &report)?;
    println!(
        "recurrence component {}: {:?} ({} of {} sequences returned; {} targets)",
        component_id,
        report.verdict,
        report.n_recurrent,
        report.n_sequences,
        report.distinct_target_components
    );
    println!("wrote {}", report_path.display());
    Ok(())
}
