use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Format};

/// Decides the exit code: 0 for a positive headline, 1 for a negative one,
/// 3 when undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Headline {
    Positive,
    Negative,
    Inconclusive,
}

impl Headline {
    pub fn exit_code(self) -> u8 {
        match self {
            Headline::Positive => 0,
            Headline::Negative => 1,
            Headline::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        self.write(fs::File::create(path)?)
    }
}

/// Everything a subcommand produces; rendered once in the requested format.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub headline: Headline,
    pub result: Value,
    pub table: String,
    pub csv: CsvTable,
}

#[derive(Serialize)]
struct Meta {
    version: &'static str,
    timestamp: u64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<Meta>,
    config: &'a Cli,
    result: &'a Value,
}

pub fn render(cli: &Cli, outcome: &Outcome) -> io::Result<Vec<u8>> {
    match cli.output.format {
        Format::Table => Ok(outcome.table.clone().into_bytes()),
        Format::Csv => {
            let mut buf = Vec::new();
            outcome.csv.write(&mut buf)?;
            Ok(buf)
        }
        Format::Json => {
            let meta = (!cli.output.deterministic).then(|| Meta {
                version: env!("CARGO_PKG_VERSION"),
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            });
            let envelope = Envelope {
                meta,
                config: cli,
                result: &outcome.result,
            };
            let mut buf = serde_json::to_vec_pretty(&envelope)?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

pub fn emit(cli: &Cli, outcome: &Outcome) -> io::Result<()> {
    let bytes = render(cli, outcome)?;
    match &cli.output.out {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()
        }
    }
}
