//! `tradenet ingest`: dyadic trade CSV → per-year edge lists + summary.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tradenet_core::ingest::{self, ColumnMap, GdpSeries};
use tradenet_core::report;

use crate::error::CliError;
use crate::manifest::{with_manifest, write_output, RunManifest};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Dyadic trade CSV with reporter,partner,year,export,import columns.
    #[arg(long)]
    pub trade: PathBuf,

    /// Per-country GDP CSV (country,year,gdp); validated and copied in
    /// normalized form for later analysis.
    #[arg(long)]
    pub gdp: Option<PathBuf>,

    /// Inclusive year range to keep, as `FROM:TO` or a single year.
    #[arg(long, value_parser = parse_year_range)]
    pub years: Option<(i32, i32)>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_year_range(text: &str) -> Result<(i32, i32), String> {
    let parse = |s: &str| {
        s.parse::<i32>()
            .map_err(|_| format!("`{s}` is not a year"))
    };
    let (lo, hi) = match text.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let y = parse(text)?;
            (y, y)
        }
    };
    if lo > hi {
        return Err(format!("empty year range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

pub fn run(args: IngestArgs) -> Result<(), CliError> {
    let config = serde_json::json!({
        "trade": args.trade,
        "gdp": args.gdp,
        "years": args.years.map(|(lo, hi)| [lo, hi]),
    });
    with_manifest(&args.out, RunManifest::new("ingest", config, vec![]), |man| {
        man.record_input(&args.trade)?;
        if let Some(gdp) = &args.gdp {
            man.record_input(gdp)?;
        }

        let records = ingest::parse_trade_file(&args.trade, &ColumnMap::default())?;
        let networks = ingest::build_year_networks(&records, args.years)?;
        if networks.is_empty() {
            return Err(CliError::Data(
                "no trade records in the requested year range".into(),
            ));
        }

        for (year, net) in networks.iter() {
            let mut buf = Vec::new();
            report::write_edge_list(&mut buf, net)?;
            write_output(man, &args.out, &format!("year_{year}.csv"), &buf)?;
        }

        let mut buf = Vec::new();
        report::write_year_summaries(&mut buf, &networks)?;
        write_output(man, &args.out, "summary.csv", &buf)?;

        if let Some(gdp_path) = &args.gdp {
            let gdp = ingest::parse_gdp_file(gdp_path)?;
            let mut buf = Vec::new();
            write_gdp_table(&mut buf, &gdp)?;
            write_output(man, &args.out, "gdp.csv", &buf)?;
        }

        println!(
            "ingested {} yearly networks into {}",
            networks.len(),
            args.out.display()
        );
        Ok(())
    })
}

/// Normalized `country,year,gdp` table, sorted for stable output.
fn write_gdp_table<W: std::io::Write>(out: W, series: &[GdpSeries]) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row<'a> {
        country: &'a str,
        year: i32,
        gdp: f64,
    }
    let mut sorted: Vec<&GdpSeries> = series.iter().collect();
    sorted.sort_by(|a, b| a.country.cmp(&b.country));
    let mut wtr = csv::Writer::from_writer(out);
    for s in sorted {
        for (&year, &gdp) in &s.entries {
            wtr.serialize(Row {
                country: &s.country,
                year,
                gdp,
            })?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
