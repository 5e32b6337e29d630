//! JSON envelopes and CSV writers.

use serde_json::{Map, Value};

use crate::error::CliError;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

/// `%.12g`-style formatting used for every CSV number.
pub fn csv_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn envelope(command: &str, fields: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    m.insert("command".into(), command.into());
    if let Value::Object(rest) = fields {
        m.extend(rest);
    }
    Value::Object(m)
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

/// Writes a header and rows of already formatted cells.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let fail = |e: csv::Error| CliError::numerical("cli", "write_csv", e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::numerical("cli", "write_csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells is UTF-8"))
}

/// Two-column `quantity,value` CSV.
pub fn quantity_csv(rows: &[(String, f64)]) -> Result<String, CliError> {
    let cells: Vec<Vec<String>> = rows.iter().map(|(k, v)| vec![k.clone(), csv_number(*v)]).collect();
    csv_text(&["quantity", "value"], &cells)
}

pub fn opt_number(x: Option<f64>) -> String {
    x.map(csv_number).unwrap_or_default()
}
