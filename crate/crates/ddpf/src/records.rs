//! CSV rows written and read by the command line tool.

use std::io::{Read, Write};

use ddpf_core::correlation::LocalCorrelation;
use ddpf_core::{AgentRecord, Neighborhood};
use serde::{Deserialize, Serialize};

use crate::harness::SweepPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRow {
    pub agent_id: u32,
    pub injected_at: Option<u32>,
    pub arrived_at: Option<u32>,
    pub passed_measurement: bool,
}

impl From<&AgentRecord> for AgentRow {
    fn from(r: &AgentRecord) -> Self {
        AgentRow {
            agent_id: r.id,
            injected_at: r.injected_at,
            arrived_at: r.arrived_at,
            passed_measurement: r.passed_measurement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummaryRow {
    pub seed: u64,
    pub s_add: f64,
    pub k_sdyn: f64,
    pub total_time: f64,
    pub mean_egress: f64,
    pub load: u32,
    pub completed: bool,
}

/// One aggregated sweep point. The statistics are empty for a point none
/// of whose runs could be carried out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s_add: f64,
    pub k_sdyn: f64,
    pub runs: u32,
    pub total_time_mean: Option<f64>,
    pub total_time_std: Option<f64>,
    pub mean_egress_mean: Option<f64>,
    pub mean_egress_std: Option<f64>,
    pub load_mean: Option<f64>,
    pub load_std: Option<f64>,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        let (tt, eg, ld) = (p.total_time(), p.mean_egress(), p.load());
        SweepRow {
            s_add: p.s_add,
            k_sdyn: p.k_sdyn,
            runs: p.samples.len() as u32,
            total_time_mean: tt.map(|s| s.mean),
            total_time_std: tt.map(|s| s.std),
            mean_egress_mean: eg.map(|s| s.mean),
            mean_egress_std: eg.map(|s| s.std),
            load_mean: ld.map(|s| s.mean),
            load_std: ld.map(|s| s.std),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub s_add: f64,
    pub k_sdyn: f64,
    pub corr: Option<f64>,
    pub neighborhood: String,
    pub defined: bool,
}

pub fn neighborhood_name(n: Neighborhood) -> &'static str {
    match n {
        Neighborhood::VonNeumann => "vn",
        Neighborhood::Moore => "moore",
    }
}

impl CorrelationRow {
    pub fn new(c: &LocalCorrelation, n: Neighborhood) -> Self {
        CorrelationRow {
            s_add: c.s_add,
            k_sdyn: c.k_sdyn,
            corr: c.value,
            neighborhood: neighborhood_name(n).to_string(),
            defined: c.value.is_some(),
        }
    }
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Header line for `T`, without trailing newline.
pub fn header_of<T: Serialize>(sample: &T) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(sample).expect("serializable");
    let bytes = w.into_inner().expect("in-memory writer");
    let text = String::from_utf8(bytes).expect("utf-8");
    text.lines().next().unwrap_or_default().to_string()
}
