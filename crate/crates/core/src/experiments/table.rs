//! Long-format result table and its CSV form.
//!
//! One CSV line per cell: `axis,scheme,kind,value,ci_low,ci_high,censored`.
//! Series labels are quoted when needed. Floats are written in Rust's
//! shortest round-trip form, so parsing the output reproduces the table
//! exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "axis,scheme,kind,value,ci_low,ci_high,censored";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Theory,
    Sim,
    Reference,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Theory => "theory",
            CellKind::Sim => "sim",
            CellKind::Reference => "reference",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(CellKind::Theory),
            "sim" => Ok(CellKind::Sim),
            "reference" => Ok(CellKind::Reference),
            other => Err(Error::InvalidArgument(format!(
                "unknown cell kind '{other}'"
            ))),
        }
    }
}

/// One value of one series at one axis point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub series: String,
    pub kind: CellKind,
    pub value: f64,
    pub ci: Option<(f64, f64)>,
    pub censored: bool,
}

/// All cells at one axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: f64,
    pub cells: Vec<Cell>,
}

impl SweepRow {
    pub fn find(&self, series: &str, kind: CellKind) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.series == series && c.kind == kind)
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    // writing into a Vec cannot fail
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        for c in &row.cells {
            let (lo, hi) = match c.ci {
                Some((lo, hi)) => (lo.to_string(), hi.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                row.axis.to_string(),
                c.series.clone(),
                c.kind.to_string(),
                c.value.to_string(),
                lo,
                hi,
                c.censored.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header_ok = match records.next() {
        Some(Ok(h)) => h.iter().eq(CSV_HEADER.split(',')),
        _ => false,
    };
    if !header_ok {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected header '{CSV_HEADER}'"),
        });
    }
    let mut rows: Vec<SweepRow> = Vec::new();
    for record in records {
        let line = reader_line(&record);
        let err = |msg: String| Error::Csv { line, msg };
        let fields = record.map_err(|e| err(e.to_string()))?;
        if fields.len() != 7 {
            return Err(err(format!("expected 7 fields, got {}", fields.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| err(format!("bad number '{s}': {e}")))
        };
        let axis = num(&fields[0])?;
        let ci = match (&fields[4], &fields[5]) {
            ("", "") => None,
            (lo, hi) => Some((num(lo)?, num(hi)?)),
        };
        let cell = Cell {
            series: fields[1].to_string(),
            kind: fields[2].parse().map_err(|e: Error| err(e.to_string()))?,
            value: num(&fields[3])?,
            ci,
            censored: fields[6]
                .parse()
                .map_err(|_| err(format!("bad flag '{}'", &fields[6])))?,
        };
        match rows.last_mut() {
            Some(r) if r.axis == axis => r.cells.push(cell),
            _ => rows.push(SweepRow {
                axis,
                cells: vec![cell],
            }),
        }
    }
    Ok(rows)
}

fn reader_line(record: &std::result::Result<csv::StringRecord, csv::Error>) -> usize {
    let pos = match record {
        Ok(r) => r.position(),
        Err(e) => e.position(),
    };
    pos.map_or(0, |p| p.line() as usize)
}
