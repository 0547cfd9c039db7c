//! Dyadic trade-file and GDP-series ingestion.
//!
//! A trade row reports the exports and imports of one directed country pair
//! in one year. Mirror rows (the same pair seen from the other reporter)
//! usually disagree slightly, so the undirected link weight averages all
//! four reported flows:
//!
//! `w_ij = (exp_ij + exp_ji + imp_ij + imp_ji) / 2`
//!
//! An absent flow contributes 0; a pair whose four flows are all absent or
//! zero gets no link. Mirror disagreements are counted, never rejected.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::network::{NetworkError, WeightedNetwork};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("column {0:?} not found in header")]
    UnknownColumn(String),
    #[error("line {line}: negative value {value} in column {column:?}")]
    NegativeValue {
        line: u64,
        column: String,
        value: f64,
    },
    #[error("line {line}: GDP must be positive, got {value}")]
    NonPositiveGdp { line: u64, value: f64 },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// One directed dyad-year observation. `None` means the flow was not
/// reported, which is distinct from a reported zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeRecord {
    pub reporter: String,
    pub partner: String,
    pub year: i32,
    pub export: Option<f64>,
    pub import: Option<f64>,
}

/// Per-country GDP time series (total GDP, not per-capita).
#[derive(Debug, Clone, Serialize)]
pub struct GdpSeries {
    pub country: String,
    pub entries: BTreeMap<i32, f64>,
}

/// Column mapping so differently headed exports of the same dyadic format
/// can be read without editing the file.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnMap {
    pub reporter: String,
    pub partner: String,
    pub year: String,
    pub export: String,
    pub import: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            reporter: "reporter".into(),
            partner: "partner".into(),
            year: "year".into(),
            export: "export".into(),
            import: "import".into(),
        }
    }
}

fn open(path: &Path) -> Result<std::fs::File, IngestError> {
    std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parse a dyadic trade CSV. Empty fields stay absent; self-trade rows and
/// unparseable fields are rejected with their line number.
pub fn parse_trade_file(path: &Path, columns: &ColumnMap) -> Result<Vec<TradeRecord>, IngestError> {
    parse_trade_reader(open(path)?, columns)
}

pub fn parse_trade_reader<R: Read>(
    reader: R,
    columns: &ColumnMap,
) -> Result<Vec<TradeRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, IngestError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))
    };
    let (c_rep, c_par, c_year) = (col(&columns.reporter)?, col(&columns.partner)?, col(&columns.year)?);
    let (c_exp, c_imp) = (col(&columns.export)?, col(&columns.import)?);

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |idx: usize| -> Result<&str, IngestError> {
            row.get(idx).ok_or_else(|| IngestError::MalformedRow {
                line,
                reason: format!("missing field {idx}"),
            })
        };

        let reporter = field(c_rep)?.to_string();
        let partner = field(c_par)?.to_string();
        if reporter.is_empty() || partner.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty country label".into(),
            });
        }
        if reporter == partner {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("self-trade for {reporter:?}"),
            });
        }
        let year: i32 = field(c_year)?.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("unparseable year {:?}", field(c_year).unwrap_or("")),
        })?;

        let flow = |idx: usize, name: &str| -> Result<Option<f64>, IngestError> {
            let raw = field(idx)?;
            if raw.is_empty() {
                return Ok(None);
            }
            let value: f64 = raw.parse().map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("unparseable number {raw:?} in column {name:?}"),
            })?;
            if !value.is_finite() {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("non-finite value in column {name:?}"),
                });
            }
            if value < 0.0 {
                return Err(IngestError::NegativeValue {
                    line,
                    column: name.to_string(),
                    value,
                });
            }
            Ok(Some(value))
        };

        records.push(TradeRecord {
            reporter,
            partner,
            year,
            export: flow(c_exp, &columns.export)?,
            import: flow(c_imp, &columns.import)?,
        });
    }
    Ok(records)
}

/// Undirected link weights for one snapshot, plus a count of mirror reports
/// that disagree (`exp_ij` vs `imp_ji`). Disagreements are expected in real
/// data and are averaged out by the weight formula.
#[derive(Debug, Clone)]
pub struct SymmetrizedEdges {
    pub edges: Vec<(String, String, f64)>,
    pub mirror_discrepancies: usize,
}

#[derive(Default, Clone, Copy)]
struct PairFlows {
    // flows indexed from the side of the lexicographically smaller label
    exp_ab: Option<f64>,
    imp_ab: Option<f64>,
    exp_ba: Option<f64>,
    imp_ba: Option<f64>,
}

fn add_flow(slot: &mut Option<f64>, value: Option<f64>) {
    if let Some(v) = value {
        *slot = Some(slot.unwrap_or(0.0) + v);
    }
}

/// Collapse directed records (assumed to belong to one year) into undirected
/// link weights. Pairs whose total volume is zero produce no edge.
pub fn symmetrize(records: &[TradeRecord]) -> SymmetrizedEdges {
    let mut pairs: BTreeMap<(String, String), PairFlows> = BTreeMap::new();
    for rec in records {
        let forward = rec.reporter < rec.partner;
        let key = if forward {
            (rec.reporter.clone(), rec.partner.clone())
        } else {
            (rec.partner.clone(), rec.reporter.clone())
        };
        let entry = pairs.entry(key).or_default();
        if forward {
            add_flow(&mut entry.exp_ab, rec.export);
            add_flow(&mut entry.imp_ab, rec.import);
        } else {
            add_flow(&mut entry.exp_ba, rec.export);
            add_flow(&mut entry.imp_ba, rec.import);
        }
    }

    let mut edges = Vec::new();
    let mut mirror_discrepancies = 0;
    for ((a, b), flows) in pairs {
        for (exp, imp) in [(flows.exp_ab, flows.imp_ba), (flows.exp_ba, flows.imp_ab)] {
            if let (Some(e), Some(i)) = (exp, imp) {
                if (e - i).abs() > f64::EPSILON * e.abs().max(i.abs()) {
                    mirror_discrepancies += 1;
                }
            }
        }
        let total: f64 = [flows.exp_ab, flows.exp_ba, flows.imp_ab, flows.imp_ba]
            .iter()
            .map(|f| f.unwrap_or(0.0))
            .sum();
        let w = total / 2.0;
        if w > 0.0 {
            edges.push((a, b, w));
        }
    }
    SymmetrizedEdges {
        edges,
        mirror_discrepancies,
    }
}

/// Per-year networks built from parsed records. Each year keeps only the
/// countries with at least one non-zero link that year, so node counts vary
/// across years.
#[derive(Debug, Clone, Default)]
pub struct YearNetworkSet {
    networks: BTreeMap<i32, WeightedNetwork>,
}

impl YearNetworkSet {
    pub fn get(&self, year: i32) -> Option<&WeightedNetwork> {
        self.networks.get(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.networks.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &WeightedNetwork)> {
        self.networks.iter().map(|(&y, n)| (y, n))
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn insert(&mut self, year: i32, net: WeightedNetwork) {
        self.networks.insert(year, net);
    }

    /// Pool edge weights of all years in `[from, to]` as separate samples.
    /// Weights are pooled, not summed per pair, so each yearly link keeps
    /// its own draw in the pooled distribution.
    pub fn pooled_weights(&self, from: i32, to: i32) -> Vec<f64> {
        self.networks
            .range(from..=to)
            .flat_map(|(_, net)| net.edges().iter().map(|&(_, _, w)| w))
            .collect()
    }

    /// Strength of `country` in every year it appears.
    pub fn strength_series(&self, country: &str) -> BTreeMap<i32, f64> {
        let mut series = BTreeMap::new();
        for (&year, net) in &self.networks {
            if let Some(id) = net.node_id(country) {
                series.insert(year, net.strengths()[id]);
            }
        }
        series
    }

    /// Labels seen in any year, sorted.
    pub fn all_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .networks
            .values()
            .flat_map(|net| net.labels().iter().cloned())
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }
}

fn network_from_symmetrized(sym: &SymmetrizedEdges) -> Result<WeightedNetwork, NetworkError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (a, b, _) in &sym.edges {
        for label in [a, b] {
            if !index.contains_key(label.as_str()) {
                index.insert(label, labels.len());
                labels.push(label.clone());
            }
        }
    }
    let edges: Vec<(usize, usize, f64)> = sym
        .edges
        .iter()
        .map(|(a, b, w)| (index[a.as_str()], index[b.as_str()], *w))
        .collect();
    WeightedNetwork::with_labels(labels, &edges)
}

/// Group records by year, symmetrize each group, and build one network per
/// year. Years outside `year_range` (when given) are dropped. Years are
/// independent, so construction runs in parallel.
pub fn build_year_networks(
    records: &[TradeRecord],
    year_range: Option<(i32, i32)>,
) -> Result<YearNetworkSet, IngestError> {
    let mut by_year: BTreeMap<i32, Vec<TradeRecord>> = BTreeMap::new();
    for rec in records {
        if let Some((lo, hi)) = year_range {
            if rec.year < lo || rec.year > hi {
                continue;
            }
        }
        by_year.entry(rec.year).or_default().push(rec.clone());
    }

    let built: Result<Vec<(i32, WeightedNetwork)>, NetworkError> = by_year
        .par_iter()
        .map(|(&year, recs)| {
            let sym = symmetrize(recs);
            network_from_symmetrized(&sym).map(|net| (year, net))
        })
        .collect();

    let mut set = YearNetworkSet::default();
    for (year, net) in built? {
        if net.n_edges() > 0 {
            set.insert(year, net);
        }
    }
    Ok(set)
}

/// Parse a `country,year,gdp` CSV into per-country series. Duplicate
/// (country, year) rows and non-positive GDP values are rejected.
pub fn parse_gdp_file(path: &Path) -> Result<Vec<GdpSeries>, IngestError> {
    parse_gdp_reader(open(path)?)
}

pub fn parse_gdp_reader<R: Read>(reader: R) -> Result<Vec<GdpSeries>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, IngestError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))
    };
    let (c_country, c_year, c_gdp) = (col("country")?, col("year")?, col("gdp")?);

    let mut series: BTreeMap<String, GdpSeries> = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let get = |idx: usize| -> Result<&str, IngestError> {
            row.get(idx).ok_or_else(|| IngestError::MalformedRow {
                line,
                reason: format!("missing field {idx}"),
            })
        };
        let country = get(c_country)?.to_string();
        if country.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty country label".into(),
            });
        }
        let year: i32 = get(c_year)?.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("unparseable year {:?}", get(c_year).unwrap_or("")),
        })?;
        let gdp: f64 = get(c_gdp)?.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("unparseable GDP {:?}", get(c_gdp).unwrap_or("")),
        })?;
        if !gdp.is_finite() || gdp <= 0.0 {
            return Err(IngestError::NonPositiveGdp { line, value: gdp });
        }
        let entry = series.entry(country.clone()).or_insert_with(|| GdpSeries {
            country,
            entries: BTreeMap::new(),
        });
        if entry.entries.insert(year, gdp).is_some() {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("duplicate (country, year) = ({}, {year})", entry.country),
            });
        }
    }
    Ok(series.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rec(
        reporter: &str,
        partner: &str,
        year: i32,
        export: Option<f64>,
        import: Option<f64>,
    ) -> TradeRecord {
        TradeRecord {
            reporter: reporter.into(),
            partner: partner.into(),
            year,
            export,
            import,
        }
    }

    #[test]
    fn parses_direct_field_mapping() {
        let csv = "reporter,partner,year,export,import\nUSA,CAN,2000,100.0,95.0\n";
        let records = parse_trade_reader(csv.as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(
            records,
            vec![rec("USA", "CAN", 2000, Some(100.0), Some(95.0))]
        );
    }

    #[test]
    fn empty_fields_stay_absent() {
        let csv = "reporter,partner,year,export,import\nUSA,CAN,2000,,4.0\n";
        let records = parse_trade_reader(csv.as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(records[0].export, None);
        assert_eq!(records[0].import, Some(4.0));
    }

    #[test]
    fn self_trade_rejected() {
        let csv = "reporter,partner,year,export,import\nUSA,USA,2000,1,1\n";
        let err = parse_trade_reader(csv.as_bytes(), &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn negative_value_rejected() {
        let csv = "reporter,partner,year,export,import\nUSA,CAN,2000,-5,1\n";
        let err = parse_trade_reader(csv.as_bytes(), &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, IngestError::NegativeValue { line: 2, .. }));
    }

    #[test]
    fn unknown_column_rejected() {
        let csv = "source,partner,year,export,import\nUSA,CAN,2000,1,1\n";
        let err = parse_trade_reader(csv.as_bytes(), &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, IngestError::UnknownColumn(c) if c == "reporter"));
    }

    #[test]
    fn column_remapping() {
        let csv = "a,b,y,flow_out,flow_in\nUSA,CAN,1999,7,\n";
        let columns = ColumnMap {
            reporter: "a".into(),
            partner: "b".into(),
            year: "y".into(),
            export: "flow_out".into(),
            import: "flow_in".into(),
        };
        let records = parse_trade_reader(csv.as_bytes(), &columns).unwrap();
        assert_eq!(records, vec![rec("USA", "CAN", 1999, Some(7.0), None)]);
    }

    #[test]
    fn symmetrize_averages_four_flows() {
        // exp_ij=10, exp_ji=20, imp_ij=20, imp_ji=10 -> w = 60/2 = 30
        let records = vec![
            rec("A", "B", 2000, Some(10.0), Some(20.0)),
            rec("B", "A", 2000, Some(20.0), Some(10.0)),
        ];
        let sym = symmetrize(&records);
        assert_eq!(sym.edges, vec![("A".into(), "B".into(), 30.0)]);
        assert_eq!(sym.mirror_discrepancies, 0);
    }

    #[test]
    fn symmetrize_zero_volume_emits_no_edge() {
        let records = vec![
            rec("A", "B", 2000, Some(0.0), None),
            rec("B", "A", 2000, None, Some(0.0)),
        ];
        assert!(symmetrize(&records).edges.is_empty());
    }

    #[test]
    fn symmetrize_single_flow_halves() {
        // exp_ij=4, everything else absent -> w = 4/2 = 2.
        // Brute-force check: sum the four flows (absent -> 0) and halve.
        let records = vec![rec("A", "B", 2000, Some(4.0), None)];
        let flows = [4.0, 0.0, 0.0, 0.0];
        let expected = flows.iter().sum::<f64>() / 2.0;
        let sym = symmetrize(&records);
        assert_eq!(sym.edges, vec![("A".into(), "B".into(), expected)]);
        assert_eq!(sym.edges[0].2, 2.0);
    }

    #[test]
    fn symmetrize_is_orientation_invariant() {
        let forward = vec![rec("A", "B", 2000, Some(10.0), Some(3.0))];
        let mirrored = vec![rec("B", "A", 2000, Some(3.0), Some(10.0))];
        assert_eq!(symmetrize(&forward).edges, symmetrize(&mirrored).edges);
    }

    #[test]
    fn mirror_discrepancies_counted_not_rejected() {
        let records = vec![
            rec("A", "B", 2000, Some(10.0), Some(20.0)),
            rec("B", "A", 2000, Some(20.0), Some(12.0)), // imp_BA=12 vs exp_AB=10
        ];
        let sym = symmetrize(&records);
        assert_eq!(sym.mirror_discrepancies, 1);
        assert_eq!(sym.edges[0].2, 31.0);
    }

    #[test]
    fn aggregate_weight_conserved_under_two_sided_reporting() {
        // When each dyad is reported from both sides, sum of w equals half
        // the sum of (export + import) over records.
        let records = vec![
            rec("A", "B", 2000, Some(10.0), Some(20.0)),
            rec("B", "A", 2000, Some(20.0), Some(10.0)),
            rec("A", "C", 2000, Some(5.0), Some(7.0)),
            rec("C", "A", 2000, Some(7.0), Some(5.0)),
        ];
        let total_reported: f64 = records
            .iter()
            .map(|r| r.export.unwrap_or(0.0) + r.import.unwrap_or(0.0))
            .sum();
        let sym = symmetrize(&records);
        let total_weight: f64 = sym.edges.iter().map(|e| e.2).sum();
        assert_relative_eq!(total_weight, total_reported / 2.0);
    }

    #[test]
    fn year_networks_split_by_year() {
        let records = vec![
            rec("A", "B", 1999, Some(2.0), None),
            rec("A", "B", 2000, Some(3.0), None),
        ];
        let set = build_year_networks(&records, None).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.get(1999).unwrap().n_edges(), 1);
        assert_eq!(set.get(2000).unwrap().total_weight(), 1.5);
    }

    #[test]
    fn year_networks_only_active_countries() {
        let records = vec![
            rec("A", "B", 2000, Some(2.0), None),
            rec("C", "D", 2000, Some(0.0), None), // zero volume, no link
        ];
        let set = build_year_networks(&records, None).unwrap();
        let net = set.get(2000).unwrap();
        assert_eq!(net.n_nodes(), 2);
        assert_eq!(net.node_id("C"), None);
    }

    #[test]
    fn empty_records_give_empty_set() {
        let set = build_year_networks(&[], None).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn year_range_filter() {
        let records = vec![
            rec("A", "B", 1990, Some(1.0), None),
            rec("A", "B", 1995, Some(1.0), None),
            rec("A", "B", 2000, Some(1.0), None),
        ];
        let set = build_year_networks(&records, Some((1994, 1999))).unwrap();
        assert_eq!(set.years().collect::<Vec<_>>(), vec![1995]);
    }

    #[test]
    fn pooled_weights_keep_yearly_samples() {
        let records = vec![
            rec("A", "B", 1999, Some(2.0), None),
            rec("A", "B", 2000, Some(6.0), None),
        ];
        let set = build_year_networks(&records, None).unwrap();
        let mut pooled = set.pooled_weights(1999, 2000);
        pooled.sort_by(f64::total_cmp);
        assert_eq!(pooled, vec![1.0, 3.0]);
    }

    #[test]
    fn gdp_parsing() {
        let csv = "country,year,gdp\nIND,1990,3.2e5\nIND,1991,3.3e5\nUSA,1990,5.9e6\n";
        let series = parse_gdp_reader(csv.as_bytes()).unwrap();
        assert_eq!(series.len(), 2);
        let ind = series.iter().find(|s| s.country == "IND").unwrap();
        assert_eq!(ind.entries[&1990], 3.2e5);
    }

    #[test]
    fn gdp_zero_rejected() {
        let csv = "country,year,gdp\nIND,1990,0\n";
        let err = parse_gdp_reader(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::NonPositiveGdp { line: 2, .. }));
    }

    #[test]
    fn gdp_duplicate_rejected() {
        let csv = "country,year,gdp\nIND,1990,5\nIND,1990,6\n";
        let err = parse_gdp_reader(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 3, .. }));
    }

    #[test]
    fn strength_series_follows_country() {
        let records = vec![
            rec("A", "B", 1999, Some(2.0), None),
            rec("A", "B", 2000, Some(4.0), None),
            rec("A", "C", 2000, Some(2.0), None),
        ];
        let set = build_year_networks(&records, None).unwrap();
        let series = set.strength_series("A");
        assert_eq!(series[&1999], 1.0);
        assert_eq!(series[&2000], 3.0);
    }
}
