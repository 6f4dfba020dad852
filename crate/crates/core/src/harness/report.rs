//! JSON and CSV rendering of campaign reports.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;

use super::campaign::Report;
use super::config::OutputFormat;
use super::HarnessError;

/// Compact JSON with every real written to 17 significant digits.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn render_json(report: &Report) -> Result<String, serde_json::Error> {
    to_json_string(report)
}

pub const CSV_HEADER: &str = "theorem_id,convention,trials,failures,min_slack,mean_slack,witness_digest,link,mode";

/// One row per aggregate; `convention` is empty for convention-free links.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for a in &report.results {
        let conv = a.convention.map(|c| c.as_str()).unwrap_or("");
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e},{},{},{}\n",
            a.theorem_id,
            conv,
            a.trials,
            a.failures,
            a.min_slack,
            a.mean_slack,
            a.witness.input_digest,
            a.link,
            match a.mode {
                crate::theorems::Mode::Gating => "gating",
                crate::theorems::Mode::Informational => "informational",
            }
        ));
    }
    out
}

pub fn render(report: &Report, format: OutputFormat) -> Result<String, HarnessError> {
    Ok(match format {
        OutputFormat::Json => render_json(report)?,
        OutputFormat::Csv => render_csv(report),
    })
}

pub fn emit_report(report: &Report, format: OutputFormat, path: &Path) -> Result<(), HarnessError> {
    let text = render(report, format)?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
