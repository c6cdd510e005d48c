use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultField {
    pub name: String,
    pub value: String,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: u32,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<ResultField>,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: &BTreeMap<String, String>) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: inputs.clone(),
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, value: impl Into<String>, certified: bool) -> &mut Self {
        self.results.push(ResultField { name: name.to_string(), value: value.into(), certified });
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.results.iter().find(|r| r.name == name).map(|r| r.value.as_str())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

/// Decimal with 15 significant digits.
pub fn decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.00000000000000".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let prec = (14 - mag).max(0) as usize;
    format!("{:.*}", prec, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub fn write_records<W: Write>(out: &mut W, records: &[OutputRecord], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.results.iter().map(|f| f.name.as_str()))?;
            }
            for r in records {
                w.write_record(r.results.iter().map(|f| f.value.as_str()))?;
            }
            w.flush()?;
        }
        Format::Text => write_text(out, records)?,
    }
    Ok(())
}

fn write_text<W: Write>(out: &mut W, records: &[OutputRecord]) -> std::io::Result<()> {
    if records.len() == 1 {
        let r = &records[0];
        let width = r.results.iter().map(|f| f.name.len()).max().unwrap_or(0);
        for f in &r.results {
            writeln!(out, "{:<width$}  {}", f.name, f.value, width = width)?;
        }
        return Ok(());
    }
    let Some(first) = records.first() else { return Ok(()) };
    let names: Vec<&str> = first.results.iter().map(|f| f.name.as_str()).collect();
    let mut widths: Vec<usize> = names.iter().map(|n| n.len()).collect();
    for r in records {
        for (i, f) in r.results.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(f.value.len());
            }
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{:<w$}", c, w = *w))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(names.clone()))?;
    for r in records {
        writeln!(out, "{}", line(r.results.iter().map(|f| f.value.as_str()).collect()))?;
    }
    Ok(())
}
