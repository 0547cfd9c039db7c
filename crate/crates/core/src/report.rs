//! Plot-ready CSV artifacts.
//!
//! Every curve and table the analyses produce serializes to a small,
//! stable CSV schema; floats use Rust's shortest round-trip formatting so
//! seeded reruns are byte-identical. Undefined coefficients serialize as
//! empty fields, not sentinel numbers.

use std::io::{Read, Write};

use serde::Serialize;

use crate::ingest::{IngestError, YearNetworkSet};
use crate::network::WeightedNetwork;
use crate::richclub::{NullEnsembleResult, RichClubCurve};
use crate::scaling::CollapseCurve;

/// `i,j,weight` rows, one per link, using node labels.
pub fn write_edge_list<W: Write>(out: W, net: &WeightedNetwork) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row<'a> {
        i: &'a str,
        j: &'a str,
        weight: f64,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for &(i, j, weight) in net.edges() {
        wtr.serialize(Row {
            i: net.label(i),
            j: net.label(j),
            weight,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Read an `i,j,weight` edge list back into a network. Labels are taken
/// in order of first appearance.
pub fn read_edge_list<R: Read>(input: R) -> Result<WeightedNetwork, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, IngestError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))
    };
    let (c_i, c_j, c_w) = (col("i")?, col("j")?, col("weight")?);

    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |idx: usize| -> Result<&str, IngestError> {
            row.get(idx).ok_or_else(|| IngestError::MalformedRow {
                line,
                reason: format!("missing field {idx}"),
            })
        };
        let mut node = |label: &str| -> usize {
            *index.entry(label.to_string()).or_insert_with(|| {
                labels.push(label.to_string());
                labels.len() - 1
            })
        };
        let a = node(field(c_i)?);
        let b = node(field(c_j)?);
        let w: f64 = field(c_w)?.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("unparseable weight {:?}", field(c_w).unwrap_or("")),
        })?;
        edges.push((a, b, w));
    }
    Ok(WeightedNetwork::with_labels(labels, &edges)?)
}

/// `threshold,coefficient,club_size` rows; undefined coefficients are
/// empty fields.
pub fn write_rich_club_curve<W: Write>(out: W, curve: &RichClubCurve) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row {
        threshold: f64,
        coefficient: Option<f64>,
        club_size: usize,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for idx in 0..curve.thresholds.len() {
        wtr.serialize(Row {
            threshold: curve.thresholds[idx],
            coefficient: curve.coefficient[idx],
            club_size: curve.club_size[idx],
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// `threshold,coefficient,club_size,null_mean,rho` rows for a curve judged
/// against its null ensemble.
pub fn write_null_ensemble<W: Write>(
    out: W,
    result: &NullEnsembleResult,
) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row {
        threshold: f64,
        coefficient: Option<f64>,
        club_size: usize,
        null_mean: Option<f64>,
        rho: Option<f64>,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for idx in 0..result.thresholds.len() {
        wtr.serialize(Row {
            threshold: result.thresholds[idx],
            coefficient: result.original[idx],
            club_size: result.club_size[idx],
            null_mean: result.null_mean[idx],
            rho: result.rho[idx],
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// `x,y,samples` rows of a collapse curve.
pub fn write_collapse_curve<W: Write>(out: W, curve: &CollapseCurve) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row {
        x: f64,
        y: f64,
        samples: usize,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for p in &curve.points {
        wtr.serialize(Row {
            x: p.x,
            y: p.y,
            samples: p.samples,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// `node,m` rows of final GDP shares.
pub fn write_gdp_shares<W: Write>(
    out: W,
    labels: &[String],
    m: &[f64],
) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row<'a> {
        node: &'a str,
        m: f64,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for (label, &share) in labels.iter().zip(m) {
        wtr.serialize(Row { node: label, m: share })?;
    }
    wtr.flush()?;
    Ok(())
}

/// `t,mean_m2` rows of the stationarity trace.
pub fn write_stationarity_trace<W: Write>(
    out: W,
    trace: &[(u64, f64)],
) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row {
        t: u64,
        mean_m2: f64,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for &(t, mean_m2) in trace {
        wtr.serialize(Row { t, mean_m2 })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-year `year,n_nodes,n_links,density,mean_weight` summary table.
pub fn write_year_summaries<W: Write>(
    out: W,
    networks: &YearNetworkSet,
) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Row {
        year: i32,
        n_nodes: usize,
        n_links: usize,
        density: Option<f64>,
        mean_weight: Option<f64>,
    }
    let mut wtr = csv::Writer::from_writer(out);
    for (year, net) in networks.iter() {
        wtr.serialize(Row {
            year,
            n_nodes: net.n_nodes(),
            n_links: net.n_edges(),
            density: net.link_density().ok(),
            mean_weight: net.mean_link_weight().ok(),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_year_networks, TradeRecord};
    use crate::richclub;

    fn triangle() -> WeightedNetwork {
        WeightedNetwork::with_labels(
            vec!["A".into(), "B".into(), "C".into()],
            &[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn edge_list_round_trips() {
        let net = triangle();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &net).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,j,weight\n"));
        let back = read_edge_list(&buf[..]).unwrap();
        assert_eq!(back.n_nodes(), 3);
        assert_eq!(back.weight(back.node_id("B").unwrap(), back.node_id("C").unwrap()), Some(2.0));
    }

    #[test]
    fn edge_list_preserves_full_precision() {
        let w = 0.1234567890123456789_f64;
        let net = WeightedNetwork::build(2, &[(0, 1, w)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &net).unwrap();
        let back = read_edge_list(&buf[..]).unwrap();
        assert_eq!(back.edges()[0].2, w);
    }

    #[test]
    fn bad_edge_list_is_rejected() {
        let text = "i,j,weight\nA,B,not-a-number\n";
        assert!(matches!(
            read_edge_list(text.as_bytes()),
            Err(IngestError::MalformedRow { line: 2, .. })
        ));
        let dup = "i,j,weight\nA,B,1.0\nB,A,2.0\n";
        assert!(matches!(
            read_edge_list(dup.as_bytes()),
            Err(IngestError::Network(_))
        ));
    }

    #[test]
    fn undefined_coefficients_serialize_empty() {
        let curve = richclub::phi_curve(
            &WeightedNetwork::build(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap(),
            &[1, 2],
        );
        let mut buf = Vec::new();
        write_rich_club_curve(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "threshold,coefficient,club_size");
        assert_eq!(lines[1], "1.0,0.5,4");
        assert_eq!(lines[2], "2.0,,1");
    }

    #[test]
    fn year_summary_contains_density() {
        let records = vec![TradeRecord {
            reporter: "A".into(),
            partner: "B".into(),
            year: 1999,
            export: Some(2.0),
            import: None,
        }];
        let set = build_year_networks(&records, None).unwrap();
        let mut buf = Vec::new();
        write_year_summaries(&mut buf, &set).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "year,n_nodes,n_links,density,mean_weight"
        );
        assert!(text.contains("1999,2,1,1.0,1.0"));
    }
}
