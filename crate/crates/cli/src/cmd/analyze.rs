//! `tradenet analyze`: scaling statistics over ingested yearly networks.
//!
//! Reads the `year_*.csv` edge lists produced by `ingest`, then emits:
//!
//! * one collapse curve per five-year block (pooled weights), with the
//!   log-normal parameters and the parabola goodness-of-fit evaluated on
//!   the well-populated `|x| <= 2 sigma` core;
//! * per-year endpoint-strength (`nu`) and strength–degree (`mu`)
//!   exponents;
//! * the per-country strength–GDP elasticity panel, when a GDP table is
//!   supplied.
//!
//! Fits whose preconditions fail (too few links, too few degree classes)
//! are reported as `insufficient` rather than dropped silently.

use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use tradenet_core::ingest::{self, YearNetworkSet};
use tradenet_core::scaling::{self, GammaDistribution};
use tradenet_core::{report, WeightedNetwork};

use crate::error::{io_error, CliError};
use crate::manifest::{with_manifest, write_output, RunManifest};

use super::FitReport;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory of per-year edge lists (`year_YYYY.csv`) from `ingest`.
    #[arg(long)]
    pub networks: PathBuf,

    /// Per-country GDP CSV (country,year,gdp) for the elasticity panel.
    #[arg(long)]
    pub gdp: Option<PathBuf>,

    /// Logarithmic histogram bins for the collapse and exponent fits.
    #[arg(long, default_value_t = scaling::DEFAULT_LOG_BINS)]
    pub bins: usize,

    /// Drop histogram bins with fewer samples than this.
    #[arg(long, default_value_t = scaling::DEFAULT_MIN_COUNT)]
    pub min_count: usize,

    /// Elasticities above this count as outliers in the panel summary.
    #[arg(long, default_value_t = 2.0)]
    pub gamma_threshold: f64,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct NodeStrength {
    country: String,
    strength: f64,
}

#[derive(Debug, Serialize)]
struct YearReport {
    year: i32,
    n_nodes: usize,
    n_links: usize,
    density: Option<f64>,
    strengths: Vec<NodeStrength>,
    nu: FitReport,
    mu: FitReport,
}

#[derive(Debug, Serialize)]
struct CollapseSummary {
    w0: f64,
    sigma: f64,
    /// Mean squared deviation from `y = x^2` on the `|x| <= 2 sigma` core.
    parabola_gof: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct BlockReport {
    from: i32,
    to: i32,
    years_present: Vec<i32>,
    n_weights: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    collapse: Option<CollapseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    insufficient: Option<String>,
}

#[derive(Debug, Serialize)]
struct GammaRow {
    country: String,
    gamma: f64,
    stderr: f64,
}

#[derive(Debug, Serialize)]
struct GammaReport {
    panel: Vec<GammaRow>,
    distribution: GammaDistribution,
}

#[derive(Debug, Serialize)]
struct AnalysisReport {
    years: Vec<YearReport>,
    collapse_blocks: Vec<BlockReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<GammaReport>,
}

pub fn run(args: AnalyzeArgs) -> Result<(), CliError> {
    let config = serde_json::json!({
        "networks": args.networks,
        "gdp": args.gdp,
        "bins": args.bins,
        "min_count": args.min_count,
        "gamma_threshold": args.gamma_threshold,
    });
    with_manifest(&args.out, RunManifest::new("analyze", config, vec![]), |man| {
        let year_files = discover_year_files(&args.networks)?;
        let mut networks = YearNetworkSet::default();
        for (year, path) in &year_files {
            man.record_input(path)?;
            let file = File::open(path).map_err(|e| io_error(path, e))?;
            networks.insert(*year, report::read_edge_list(file)?);
        }

        let years: Vec<(i32, &WeightedNetwork)> = networks.iter().collect();
        let year_reports: Vec<YearReport> = years
            .par_iter()
            .map(|&(year, net)| year_report(year, net, args.bins))
            .collect();

        let mut blocks = Vec::new();
        for (from, to) in five_year_blocks(networks.years()) {
            let (block, curve) = block_report(&networks, from, to, args.bins, args.min_count);
            if let Some(curve) = &curve {
                let mut buf = Vec::new();
                report::write_collapse_curve(&mut buf, curve)?;
                write_output(man, &args.out, &format!("collapse_{from}_{to}.csv"), &buf)?;
            }
            blocks.push(block);
        }

        let mut buf = Vec::new();
        write_exponent_table(&mut buf, &year_reports)?;
        write_output(man, &args.out, "exponents.csv", &buf)?;

        let gamma = match &args.gdp {
            Some(gdp_path) => {
                man.record_input(gdp_path)?;
                let gdp = ingest::parse_gdp_file(gdp_path)?;
                let report = gamma_report(&networks, &gdp, args.gamma_threshold);
                if let Some(report) = &report {
                    let mut buf = Vec::new();
                    write_gamma_table(&mut buf, &report.panel)?;
                    write_output(man, &args.out, "gamma.csv", &buf)?;
                }
                report
            }
            None => None,
        };

        let analysis = AnalysisReport {
            years: year_reports,
            collapse_blocks: blocks,
            gamma,
        };
        let mut bytes = serde_json::to_vec_pretty(&analysis)?;
        bytes.push(b'\n');
        write_output(man, &args.out, "analysis.json", &bytes)?;

        println!(
            "analyzed {} years ({} collapse blocks) into {}",
            analysis.years.len(),
            analysis.collapse_blocks.len(),
            args.out.display()
        );
        Ok(())
    })
}

/// `year_YYYY.csv` files under `dir`, sorted by year.
fn discover_year_files(dir: &PathBuf) -> Result<Vec<(i32, PathBuf)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_error(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_error(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(year) = name
            .strip_prefix("year_")
            .and_then(|rest| rest.strip_suffix(".csv"))
            .and_then(|y| y.parse::<i32>().ok())
        {
            files.push((year, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no year_YYYY.csv files in {}",
            dir.display()
        )));
    }
    files.sort_by_key(|&(year, _)| year);
    Ok(files)
}

fn year_report(year: i32, net: &WeightedNetwork, bins: usize) -> YearReport {
    let strengths = net
        .labels()
        .iter()
        .zip(net.strengths())
        .map(|(label, strength)| NodeStrength {
            country: label.clone(),
            strength,
        })
        .collect();
    YearReport {
        year,
        n_nodes: net.n_nodes(),
        n_links: net.n_edges(),
        density: net.link_density().ok(),
        strengths,
        nu: FitReport::from_result(scaling::strength_correlation_exponent(net, bins)),
        mu: FitReport::from_result(scaling::strength_degree_exponent(net, bins)),
    }
}

/// Consecutive five-year blocks aligned so 1951 starts one (1951–55,
/// 1956–60, …), covering every observed year.
fn five_year_blocks(years: impl Iterator<Item = i32>) -> Vec<(i32, i32)> {
    let mut blocks: Vec<(i32, i32)> = Vec::new();
    for year in years {
        let from = year - (year - 1).rem_euclid(5);
        if blocks.last() != Some(&(from, from + 4)) {
            blocks.push((from, from + 4));
        }
    }
    blocks
}

fn block_report(
    networks: &YearNetworkSet,
    from: i32,
    to: i32,
    bins: usize,
    min_count: usize,
) -> (BlockReport, Option<scaling::CollapseCurve>) {
    let years_present: Vec<i32> = networks.years().filter(|&y| (from..=to).contains(&y)).collect();
    let pooled = networks.pooled_weights(from, to);
    let n_weights = pooled.len();
    let fitted = scaling::collapse_curve(&pooled, bins, min_count).and_then(|curve| {
        let core = curve.restricted(2.0 * curve.params.sigma);
        let gof = scaling::parabola_gof(&core)?;
        Ok((curve, gof))
    });
    match fitted {
        Ok((curve, gof)) => (
            BlockReport {
                from,
                to,
                years_present,
                n_weights,
                collapse: Some(CollapseSummary {
                    w0: curve.params.w0,
                    sigma: curve.params.sigma,
                    parabola_gof: gof,
                    points: curve.points.len(),
                }),
                insufficient: None,
            },
            Some(curve),
        ),
        Err(err) => (
            BlockReport {
                from,
                to,
                years_present,
                n_weights,
                collapse: None,
                insufficient: Some(err.to_string()),
            },
            None,
        ),
    }
}

fn gamma_report(
    networks: &YearNetworkSet,
    gdp: &[ingest::GdpSeries],
    threshold: f64,
) -> Option<GammaReport> {
    let panel: Vec<GammaRow> = scaling::elasticity_panel(networks, gdp)
        .into_iter()
        .map(|e| GammaRow {
            country: e.country,
            gamma: e.fit.exponent,
            stderr: e.fit.stderr,
        })
        .collect();
    if panel.is_empty() {
        return None;
    }
    let gammas: Vec<f64> = panel.iter().map(|row| row.gamma).collect();
    let distribution = scaling::gamma_distribution(&gammas, threshold, 30);
    Some(GammaReport {
        panel,
        distribution,
    })
}

fn write_exponent_table<W: std::io::Write>(
    out: W,
    years: &[YearReport],
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        year: i32,
        nu: Option<f64>,
        nu_stderr: Option<f64>,
        mu: Option<f64>,
        mu_stderr: Option<f64>,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for y in years {
        wtr.serialize(Row {
            year: y.year,
            nu: y.nu.fit.map(|f| f.exponent),
            nu_stderr: y.nu.fit.map(|f| f.stderr),
            mu: y.mu.fit.map(|f| f.exponent),
            mu_stderr: y.mu.fit.map(|f| f.stderr),
        })?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_gamma_table<W: std::io::Write>(out: W, panel: &[GammaRow]) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in panel {
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
