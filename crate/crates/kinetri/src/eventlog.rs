//! CSV event log.

use std::io::Write;

use kinetri_core::kds::EventRecord;

use crate::decimal::format_time;

pub const HEADER: [&str; 7] = ["time", "exact", "kind", "points", "removed", "added", "wall_ns"];

#[derive(Debug, Clone)]
pub struct LoggedEvent {
    pub record: EventRecord,
    pub wall_ns: u64,
}

/// One parsed CSV line.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize)]
pub struct LogLine {
    pub time: String,
    pub exact: u8,
    pub kind: String,
    pub points: String,
    pub removed: usize,
    pub added: usize,
    pub wall_ns: u64,
}

pub fn write_events<W: Write>(out: W, events: &[LoggedEvent], digits: usize) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for e in events {
        let (time, exact) = format_time(&e.record.time, digits);
        let points = e.record.points.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        w.write_record([
            time,
            u8::from(exact).to_string(),
            e.record.kind.to_string(),
            points,
            e.record.removed.to_string(),
            e.record.added.to_string(),
            e.wall_ns.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events<R: std::io::Read>(input: R) -> csv::Result<Vec<LogLine>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
