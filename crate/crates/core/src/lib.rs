//! Weighted trade-network analysis and a gravity-law exchange simulator.
//!
//! The crate covers the full pipeline from dyadic trade reports to
//! publication-style statistics:
//!
//! * [`network`] — immutable weighted undirected simple graphs with labels,
//!   strengths, and densities;
//! * [`ingest`] — trade/GDP CSV parsing and flow symmetrization into
//!   per-year networks;
//! * [`scaling`] — log-normal weight collapse and the slope-style exponents
//!   (strength–GDP elasticity, endpoint-strength correlation,
//!   strength–degree);
//! * [`richclub`] — rich-club coefficients with degree-preserving (MRN) and
//!   strength-preserving (MRWN) null ensembles;
//! * [`gravity`] — the non-conservative gravity exchange dynamics that
//!   grows synthetic trade networks to a target link density;
//! * [`report`] — stable CSV schemas for every artifact.
//!
//! All randomized procedures take explicit seeds and are bit-reproducible;
//! ensembles parallelize over members with one derived RNG stream each.

pub mod gravity;
pub mod ingest;
pub mod network;
pub mod report;
pub mod richclub;
pub mod scaling;

pub use gravity::{GravityError, ModelObservables, SimConfig, SimState, TransactionOutcome};
pub use ingest::{
    ColumnMap, GdpSeries, IngestError, SymmetrizedEdges, TradeRecord, YearNetworkSet,
};
pub use network::{NetworkError, NodeId, WeightedNetwork};
pub use richclub::{
    NullEnsembleResult, NullModelConfig, RichClubCurve, RichClubError,
};
pub use scaling::{
    CollapseCurve, CountryElasticity, GammaDistribution, LogNormalParams, PowerLawFit,
    ScalingError,
};
