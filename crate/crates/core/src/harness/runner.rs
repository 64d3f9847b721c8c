//! Replica-parallel Monte Carlo runner and report/file emission.
//!
//! Determinism contract: the report is a pure function of the
//! configuration (wall-clock aside) regardless of worker count. Every
//! replica derives its own stream from `(seed, cell, size, rep)`, replica
//! results are collected into a buffer indexed by replica and reduced in
//! replica order.

use super::config::{ExperimentConfig, Format};
use super::report::{KsStat, MeanStat, Meta, MomentStat, NormStat, RunReport, SizeResult};
use super::svg;
use crate::ensembles::build;
use crate::error::{Error, Result};
use crate::laws::Law;
use crate::sampling::derive_stream;
use crate::spectra::{eig_sym, Esd};
use rayon::prelude::*;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

struct ReplicaStats {
    moments: Vec<f64>,
    ks: Option<f64>,
    op_norm: f64,
    second_norm: f64,
    scaled: Vec<f64>,
}

/// Scaled eigenvalues kept for CSV/SVG emission.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub cell: String,
    pub n: usize,
    pub law: Option<Law>,
    pub per_replica: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub samples: Vec<SampleSet>,
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_replica(
    config: &ExperimentConfig,
    cell_index: usize,
    n: usize,
    rep: usize,
) -> Result<ReplicaStats> {
    let cell = &config.cells[cell_index];
    let provenance = || {
        format!(
            "cell '{}', N = {n}, replica {rep}, seed {}",
            cell.label, config.seed
        )
    };
    let stream = derive_stream(
        config.seed,
        &[
            ("cell", cell_index as u64),
            ("size", n as u64),
            ("rep", rep as u64),
        ],
    );
    let matrix = build(&cell.ensemble, n, &stream)?;
    let spectrum =
        eig_sym(&matrix).map_err(|e| Error::Numerical(format!("{e} ({})", provenance())))?;

    // Trace and Frobenius identities guard every decomposition.
    let tol = 1e-9 * n as f64 * spectrum.op_norm().max(1.0);
    if (spectrum.sum() - matrix.trace()).abs() > tol
        || (spectrum.sum_squares() - matrix.frobenius_sq()).abs() > tol
    {
        return Err(Error::Numerical(format!(
            "eigenvalue identities violated ({})",
            provenance()
        )));
    }

    let scale = cell.scaling.factor(&cell.ensemble, n)?;
    let esd = Esd::from_spectrum(&spectrum, scale);
    let bulk = if cell.drop_top > 0 {
        esd.drop_top_modulus(cell.drop_top)
    } else {
        esd.clone()
    };
    let moments = (0..=config.k_max as u32).map(|k| bulk.moment(k)).collect();
    let ks = cell.ks_law.as_ref().map(|law| bulk.ks(|x| law.cdf(x)));
    let second_norm = if n >= 2 {
        spectrum.second_norm()? * scale
    } else {
        0.0
    };
    Ok(ReplicaStats {
        moments,
        ks,
        op_norm: spectrum.op_norm() * scale,
        second_norm,
        scaled: esd.values().to_vec(),
    })
}

/// Run the whole experiment: every cell at every size with all replicas.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut results = Vec::new();
    let mut samples = Vec::new();
    for (cell_index, cell) in config.cells.iter().enumerate() {
        for &n in &config.sizes {
            let started = Instant::now();
            let replicas: Vec<ReplicaStats> = (0..config.replicas)
                .into_par_iter()
                .map(|rep| run_replica(config, cell_index, n, rep))
                .collect::<Result<Vec<_>>>()?;

            let moments = (0..=config.k_max as u32)
                .map(|k| {
                    let per_rep: Vec<f64> =
                        replicas.iter().map(|r| r.moments[k as usize]).collect();
                    let (mean, stderr) = mean_and_stderr(&per_rep);
                    MomentStat { k, mean, stderr }
                })
                .collect();
            let ks = cell.ks_law.as_ref().map(|law| {
                let per_rep: Vec<f64> = replicas.iter().map(|r| r.ks.unwrap_or(0.0)).collect();
                let (mean, stderr) = mean_and_stderr(&per_rep);
                KsStat {
                    law: law.label(),
                    mean,
                    stderr,
                }
            });
            let norms: Vec<f64> = replicas.iter().map(|r| r.op_norm).collect();
            let (norm_mean, _) = mean_and_stderr(&norms);
            let op_norm = NormStat {
                mean: norm_mean,
                min: norms.iter().cloned().fold(f64::INFINITY, f64::min),
                max: norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            };
            let seconds: Vec<f64> = replicas.iter().map(|r| r.second_norm).collect();
            let (second_mean, second_stderr) = mean_and_stderr(&seconds);

            results.push(SizeResult {
                ensemble: cell.label.clone(),
                n,
                replicas: config.replicas,
                moments,
                ks,
                op_norm,
                second_norm: MeanStat {
                    mean: second_mean,
                    stderr: second_stderr,
                },
                wall_clock_s: started.elapsed().as_secs_f64(),
            });
            samples.push(SampleSet {
                cell: cell.label.clone(),
                n,
                law: cell.ks_law.clone(),
                per_replica: replicas.into_iter().map(|r| r.scaled).collect(),
            });
        }
    }
    Ok(RunOutput {
        report: RunReport {
            meta: Meta {
                seed: config.seed,
                config_hash: config.config_hash(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            results,
        },
        samples,
    })
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}

/// Write the requested artifacts; returns the paths created.
pub fn emit(output: &RunOutput, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&config.out_dir)?;
    let mut written = Vec::new();
    let base = sanitize(&config.name);

    if config.formats.contains(&Format::Json) {
        let path = config.out_dir.join(format!("{base}.json"));
        fs::write(&path, output.report.to_json())?;
        written.push(path);
    }

    if config.formats.contains(&Format::Csv) {
        for set in &output.samples {
            for (rep, values) in set.per_replica.iter().enumerate() {
                let path = config
                    .out_dir
                    .join(format!("{base}.{}.N{}.rep{rep}.csv", sanitize(&set.cell), set.n));
                let mut text = String::with_capacity(values.len() * 20 + 8);
                text.push_str("lambda\n");
                for v in values {
                    text.push_str(&format!("{v}\n"));
                }
                fs::write(&path, text)?;
                written.push(path);
            }
        }
    }

    if config.formats.contains(&Format::Svg) {
        for set in &output.samples {
            let pooled: Vec<f64> = set.per_replica.iter().flatten().cloned().collect();
            let title = format!("{} N={} ({} replicas)", set.cell, set.n, set.per_replica.len());
            let image = svg::histogram_svg(
                &pooled,
                set.law.as_ref(),
                config.hist_bins,
                config.window,
                &title,
            )?;
            let path = config
                .out_dir
                .join(format!("{base}.{}.N{}.svg", sanitize(&set.cell), set.n));
            fs::write(&path, image)?;
            written.push(path);
        }
    }
    Ok(written)
}
