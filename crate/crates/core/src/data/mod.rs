//! Empirical pipeline: tick ingestion, seasonal stationarization, session
//! joining and shuffle surrogates.

pub mod ingest;
pub mod seasonal;
pub mod surrogate;
pub mod synthetic;

pub use ingest::{ingest_ticks, parse_timestamp, read_ticks, write_ticks, IngestReport, SessionRules};
pub use seasonal::{
    build_seasonal_profile, join_sessions, stationarize, Joined, SeasonalProfile, DEFAULT_BIN_WIDTH, WEEKDAYS,
};
pub use surrogate::{make_surrogate, SurrogateKind};
pub use synthetic::{lunch_profile, seasonal_sessions};
