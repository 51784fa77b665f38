use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::{CmdResult, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Header plus string cells for CSV output.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(mut self, cells: Vec<String>) -> Self {
        self.rows.push(cells);
        self
    }

    fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(&self.header)?;
        for r in &self.rows {
            writer.write_record(r)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn io_failure(path: Option<&Path>, e: impl std::fmt::Display) -> Failure {
    match path {
        Some(p) => Failure::Io(format!("cannot write {}: {e}", p.display())),
        None => Failure::Io(format!("cannot write output: {e}")),
    }
}

pub fn emit<T: Serialize>(format: Format, path: Option<&Path>, value: &T, table: &Table) -> CmdResult {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| io_failure(path, e))?),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => {
            serde_json::to_writer(&mut sink, value).map_err(|e| io_failure(path, e))?;
            writeln!(sink).map_err(|e| io_failure(path, e))?;
        }
        Format::Csv => table.write_csv(&mut sink).map_err(|e| io_failure(path, e))?,
    }
    sink.flush().map_err(|e| io_failure(path, e))
}
