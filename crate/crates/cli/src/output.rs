//! CSV artifacts. Every file opens with `#` comment lines naming the tool
//! version and echoing the resolved config.

use std::io::Write;

use kslab::GridField;

use crate::config::RunConfig;
use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Cell `(row, column)` by column name.
    pub fn get(&self, row: usize, column: &str) -> Option<&str> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row).map(|r| r[j].as_str())
    }
}

#[derive(Debug, Clone)]
pub enum Artifact {
    Table(Table),
    /// A sampled field, written in the grid CSV form.
    Field { name: String, field: GridField },
}

impl Artifact {
    pub fn name(&self) -> &str {
        match self {
            Artifact::Table(t) => &t.name,
            Artifact::Field { name, .. } => name,
        }
    }
}

pub fn header_lines(config: &RunConfig) -> Vec<String> {
    let mut lines = vec![format!("# kslab {VERSION}")];
    lines.extend(config.header_lines());
    lines
}

pub fn render_table(config: &RunConfig, table: &Table) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for line in header_lines(config) {
        writeln!(out, "{line}")?;
    }
    let mut writer = csv::Writer::from_writer(&mut out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    drop(writer);
    Ok(out)
}

/// The grid header must stay on the first line for `GridField::read_csv`;
/// the config comments follow it.
pub fn render_field(config: &RunConfig, field: &GridField) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "{}", field.csv_header())?;
    for line in header_lines(config) {
        writeln!(out, "{line}")?;
    }
    for v in field.samples() {
        writeln!(out, "{v}")?;
    }
    Ok(out)
}

/// Writes artifacts to `config.output` as `<name>.csv`, or tables to
/// `stdout` when no directory is set.
pub fn emit<W: Write>(config: &RunConfig, artifacts: &[Artifact], stdout: &mut W) -> Result<()> {
    match &config.output {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for artifact in artifacts {
                let bytes = match artifact {
                    Artifact::Table(t) => render_table(config, t)?,
                    Artifact::Field { field, .. } => render_field(config, field)?,
                };
                std::fs::write(dir.join(format!("{}.csv", artifact.name())), bytes)?;
            }
        }
        None => {
            for artifact in artifacts {
                match artifact {
                    Artifact::Table(t) => stdout.write_all(&render_table(config, t)?)?,
                    Artifact::Field { name, .. } => {
                        log::info!("field {name} not printed; pass --output to write it")
                    }
                }
            }
        }
    }
    Ok(())
}

/// Shortest round-trip form of `v`.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        v.to_string()
    }
}
