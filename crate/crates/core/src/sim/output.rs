//! CSV output for per-run metrics and traces.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::sim::engine::MetricsRecord;

fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DelayRow {
    vessel: usize,
    delay_s: f64,
    finished: bool,
}

/// Per-vessel completion delays.
pub fn write_delays<W: Write>(out: W, m: &MetricsRecord) -> Result<()> {
    let rows: Vec<DelayRow> = m
        .delays
        .iter()
        .enumerate()
        .map(|(v, d)| DelayRow {
            vessel: v,
            delay_s: d.seconds(),
            finished: d.is_done(),
        })
        .collect();
    write_rows(out, &rows, &["vessel", "delay_s", "finished"])
}

/// Total backlog at the start of each slot.
pub fn write_backlog<W: Write>(out: W, m: &MetricsRecord) -> Result<()> {
    let rows: Vec<(usize, f64)> = m.slot_backlog.iter().copied().enumerate().collect();
    write_rows(out, &rows, &["slot", "backlog_bits"])
}

pub fn write_queue_trace<W: Write>(out: W, m: &MetricsRecord) -> Result<()> {
    write_rows(out, &m.queue_trace, &["slot", "vessel", "node", "bits"])
}

pub fn write_pressure_trace<W: Write>(out: W, m: &MetricsRecord) -> Result<()> {
    write_rows(
        out,
        &m.pressure_trace,
        &["slot", "vessel", "quantity", "link", "value"],
    )
}

pub fn write_opt_trace<W: Write>(out: W, m: &MetricsRecord) -> Result<()> {
    write_rows(
        out,
        &m.opt_trace,
        &[
            "slot",
            "bcd_iteration",
            "objective_bits",
            "accepted",
            "sca_iterations",
            "rate_sum_bps",
        ],
    )
}
