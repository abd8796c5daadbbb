//! Batch command-line surface over the operator algebra and the dice
//! benchmark. All structured output is JSON on stdout; bulk numeric tables
//! are CSV. Invalid input exits nonzero with one machine-parsable error
//! line on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use geneo::dice::{
    read_dataset, run_experiment, write_dataset, Dataset, DieGenerator, ExperimentConfig,
};
use geneo::io;
use geneo::measure::dim_pm;
use geneo::operator::equivariance_witness;
use geneo::represent::{certify_geneo, geo_to_permutant_measure, Tolerances};
use geneo::Error;

#[derive(Parser)]
#[command(
    name = "geneo",
    about = "Certify, decompose and build linear group-equivariant operators on finite domains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify equivariance, transitivity and non-expansiveness of a matrix
    /// under a group; optionally check a measure for conjugation-invariance.
    /// Exits 0 iff the matrix is equivariant.
    Check {
        /// Matrix CSV (n rows of n comma-separated decimals).
        #[arg(long)]
        matrix: PathBuf,
        /// Group JSON: { "degree": n, "generators": [[images...] | "(1 2)"] }.
        #[arg(long)]
        group: PathBuf,
        /// Measure JSON to check for conjugation-invariance alongside.
        #[arg(long)]
        measure: Option<PathBuf>,
        /// Certification tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Recover a conjugation-invariant measure representing an equivariant
    /// matrix under a transitive group; prints the measure and certificate.
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        group: PathBuf,
        /// Base tolerance (verification gaps are checked at 10x).
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also write the measure JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the dimension of the space of conjugation-invariant measures
    /// (the number of conjugation orbits of the full symmetric group).
    DimPm {
        #[arg(long)]
        group: PathBuf,
    },
    /// Generate a synthetic die dataset and write it in the binary format.
    DiceGenerate {
        #[command(flatten)]
        params: DiceParams,
        /// Output dataset path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the die-classification benchmark and print the report JSON.
    DiceRun {
        #[command(flatten)]
        params: DiceParams,
        /// Load this dataset instead of generating one.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Retained principal components (1-4).
        #[arg(long, default_value_t = 2)]
        pcs: usize,
        /// Convex weights for the three reflection families, "a,b,c".
        #[arg(long, value_parser = parse_weights, default_value = "0.318,0.551,0.131")]
        weights: [f64; 3],
        /// Skip the equivariant smoothing operator.
        #[arg(long)]
        no_geneo: bool,
        /// Also write the report JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write projected points as CSV ("pc1,..,label") to this path.
        #[arg(long)]
        emit_pca: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DiceParams {
    /// Lattice side length.
    #[arg(long, default_value_t = 25)]
    n: usize,
    /// Number of dice (even; classes alternate).
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    /// Master seed; per-die seeds are seed XOR index.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dot intensity range, "lo,hi" within [0,1].
    #[arg(long, value_parser = parse_range, default_value = "0.6,1.0")]
    coeff_range: (f64, f64),
}

fn parse_weights(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|v| format!("expected 3 weights, got {}", v.len()))
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        other => Err(format!("expected \"lo,hi\", got {} fields", other.len())),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GENEO_THREADS") {
        if let Ok(count) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(count.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", json!({ "error": err.to_string() }));
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Check {
            matrix,
            group,
            measure,
            tol,
        } => {
            let b = io::read_matrix_csv(&matrix)?;
            let g = io::read_group_json(&group)?;
            let witness = equivariance_witness(&b, &g, tol)?;
            let mut output = json!({
                "transitive": g.is_transitive(),
                "equivariant": witness.is_none(),
                "nonexpansive": b.is_nonexpansive(tol),
                "inf_norm": b.inf_norm(),
            });
            if let Some(w) = &witness {
                output["witness"] = json!({
                    "generator": w.generator.images(),
                    "generator_cycles": w.generator.cycle_string(),
                    "entry": [w.row, w.col],
                    "lhs": w.lhs,
                    "rhs": w.rhs,
                });
            }
            if let Some(path) = measure {
                let m = io::read_measure_json(&path)?;
                output["measure"] = json!({
                    "permutant_measure": m.is_permutant_measure(&g)?,
                    "total_variation": m.total_variation(),
                });
            }
            println!("{}", serde_json::to_string_pretty(&output)?);
            Ok(if witness.is_none() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Decompose {
            matrix,
            group,
            tol,
            out,
        } => {
            let b = io::read_matrix_csv(&matrix)?;
            let g = io::read_group_json(&group)?;
            let tolerances = Tolerances::from_base(tol);
            let result = geo_to_permutant_measure(&b, &g, &tolerances)?;
            let certificate = certify_geneo(&b, &g, &tolerances)?;
            if let Some(path) = &out {
                io::write_measure_json(&result.measure, path)?;
            }
            let output = json!({
                "measure": serde_json::from_str::<serde_json::Value>(
                    &io::measure_to_json(&result.measure)
                )?,
                "certificate": {
                    "reconstruction_gap": result.reconstruction_gap,
                    "norm_identity_gap": result.norm_identity_gap,
                    "total_variation": result.measure.total_variation(),
                    "is_geneo": certificate.is_geneo,
                },
                "orbit_count": result.orbit_count_used,
            });
            println!("{}", serde_json::to_string_pretty(&output)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::DimPm { group } => {
            let g = io::read_group_json(&group)?;
            println!("{}", dim_pm(&g)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::DiceGenerate { params, out } => {
            let generator = DieGenerator::new(params.n, params.coeff_range)?;
            let samples = geneo::dice::generate_dataset(&generator, params.count, params.seed)?;
            write_dataset(&out, params.n, &samples)?;
            println!(
                "{}",
                json!({
                    "written": out,
                    "n": params.n,
                    "count": samples.len(),
                    "surface_len": samples[0].surface_values.len(),
                    "seed": params.seed,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::DiceRun {
            params,
            dataset,
            pcs,
            weights,
            no_geneo,
            out,
            emit_pca,
        } => {
            let config = ExperimentConfig {
                n: params.n,
                count: params.count,
                seed: params.seed,
                pcs,
                weights,
                coeff_range: params.coeff_range,
                use_geneo: !no_geneo,
            };
            let loaded: Option<Dataset> = match &dataset {
                Some(path) => Some(read_dataset(path)?),
                None => None,
            };
            let (report, projections) = run_experiment(&config, loaded.as_ref())?;
            if let Some(path) = &emit_pca {
                projections.write_csv(path)?;
            }
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(path) = &out {
                std::fs::write(path, &text)?;
            }
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
