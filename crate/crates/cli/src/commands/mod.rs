pub mod check;
pub mod estimate;
pub mod graph;
pub mod mmh;
pub mod ptm;
pub mod simulate;

use ndr_core::ndr_machine::TraceEvent;
use serde::{Deserialize, Serialize};

/// One line of `trace.ndjson`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub replica: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

/// Shortest round-trip formatting, so outputs are byte-stable.
pub fn num(x: f64) -> String {
    format!("{x}")
}
