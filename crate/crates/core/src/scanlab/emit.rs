use std::io::{self, Write};

use serde::Serialize;

/// A flat record with a fixed column order shared by CSV and JSON output.
pub trait Record: Serialize {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// 17 significant digits in scientific notation; round-trips any f64.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Header row, then one row per record, `,`-separated and `\n`-terminated.
pub fn write_csv<R: Record, W: Write>(records: &[R], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", R::header().join(","))?;
    for r in records {
        writeln!(out, "{}", r.fields().join(","))?;
    }
    out.flush()
}

/// The same records as a JSON array of objects, followed by a newline.
pub fn write_json<R: Record, W: Write>(records: &[R], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)?;
    out.flush()
}
