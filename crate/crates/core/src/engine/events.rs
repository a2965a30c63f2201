//! Optional per-vehicle event log.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Inserted,
    LaneChange {
        from: usize,
        to: usize,
        mandatory: bool,
        /// New follower's acceleration after the change, as evaluated at decision time.
        new_follower_acc: f64,
        b_safe: f64,
    },
    Exited,
    Crash,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Inserted => "inserted",
            EventKind::LaneChange { mandatory: true, .. } => "lane_change_mandatory",
            EventKind::LaneChange { .. } => "lane_change",
            EventKind::Exited => "exited",
            EventKind::Crash => "crash",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub vehicle: u64,
    pub segment: usize,
    pub lane: usize,
    pub x: f64,
    pub v: f64,
    pub acc: f64,
    pub kind: EventKind,
}

/// Writes `time,vehicle,segment,lane,x,v,acc,event` rows.
pub fn write_events_csv<W: Write>(mut out: W, events: &[Event]) -> std::io::Result<()> {
    writeln!(out, "time,vehicle,segment,lane,x,v,acc,event")?;
    for e in events {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.time,
            e.vehicle,
            e.segment,
            e.lane,
            e.x,
            e.v,
            e.acc,
            e.kind.label()
        )?;
    }
    Ok(())
}
