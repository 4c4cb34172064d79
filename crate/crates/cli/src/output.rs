use std::io::Write;

use serde::Serialize;

use crate::run::Row;
use crate::scenario::{Format, Units};

pub const CSV_HEADER: [&str; 9] =
    ["snr_db", "p_t", "solver", "capacity", "lower", "upper", "lambda", "active_modes", "status"];

#[derive(Serialize)]
struct Document<'a> {
    units: Units,
    columns: &'a [&'a str],
    rows: &'a [Row],
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_rows(out: impl Write, rows: &[Row], format: Format, units: Units) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.snr_db.to_string(),
                    r.p_t.to_string(),
                    r.solver.clone(),
                    opt(r.capacity),
                    opt(r.lower),
                    opt(r.upper),
                    opt(r.lambda),
                    opt(r.active_modes),
                    r.status.clone(),
                ])?;
            }
            w.flush()
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &Document { units, columns: &CSV_HEADER, rows })?;
            writeln!(out)
        }
    }
}
