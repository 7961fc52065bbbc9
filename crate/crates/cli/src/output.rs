// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use crate::config::{Format, OutputArgs};
use crate::Failure;

/// A finished command result in both encodings; only one is written.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: serde_json::Value,
}

pub fn emit(out: &OutputArgs, table: &Table) -> Result<(), Failure> {
    let bytes = match out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::input(format!("csv: {e}"));
            w.write_record(&table.header).map_err(io)?;
            for row in &table.rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| Failure::input(format!("csv: {e}")))?
        }
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&table.json).expect("serializable");
            s.push(b'\n');
            s
        }
    };
    match &out.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}
