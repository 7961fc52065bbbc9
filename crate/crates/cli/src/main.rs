// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};

/// Failure surfaced to the shell; `code` follows the documented exit codes.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub property: Option<String>,
    pub witness: Option<String>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            kind: "input",
            message: message.into(),
            property: None,
            witness: None,
        }
    }

    pub fn invariant(property: &str, witness: &str) -> Self {
        Failure {
            code: 2,
            kind: "invariant",
            message: format!("invariant violation [{property}]: {witness}"),
            property: Some(property.to_string()),
            witness: Some(witness.to_string()),
        }
    }
}

impl From<pmoments::Error> for Failure {
    fn from(err: pmoments::Error) -> Self {
        use pmoments::Error as E;
        match err {
            E::Invariant { property, witness } => Failure::invariant(&property, &witness),
            E::Unsupported(_) => Failure {
                code: 4,
                kind: "unsupported",
                message: err.to_string(),
                property: None,
                witness: None,
            },
            E::Range(_) | E::Accuracy(_) => Failure {
                code: 1,
                kind: "numeric",
                message: err.to_string(),
                property: None,
                witness: None,
            },
            _ => Failure::input(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Invariants(args) => commands::invariants(args),
        Command::Verify(args) => commands::verify(args),
        Command::Scan(args) => commands::scan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let report = serde_json::json!({
                "error": f.kind,
                "message": f.message,
                "property": f.property,
                "witness": f.witness,
            });
            eprintln!("{report}");
            ExitCode::from(f.code)
        }
    }
}
