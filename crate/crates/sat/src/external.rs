//! External MaxSAT solver hook.
//!
//! Any WCNF-conformant solver can replace the internal engine: the command
//! receives a DIMACS WCNF file path as its last argument and must print a
//! status line (`s OPTIMUM FOUND`, `s SATISFIABLE` or `s UNSATISFIABLE`) and
//! a model line of DIMACS literals (`v 1 -2 3 ...`).

use std::process::Command;

use crate::check::first_violated_hard;
use crate::dimacs;
use crate::maxsat::MaxSatResult;
use crate::types::{Model, Wcnf};
use crate::SatError;

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    command: String,
}

impl ExternalSolver {
    pub fn new(command: impl Into<String>) -> ExternalSolver {
        ExternalSolver {
            command: command.into(),
        }
    }

    pub fn solve(&self, wcnf: &Wcnf) -> Result<MaxSatResult, SatError> {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("esmc-maxsat-{}.wcnf", std::process::id()));
        dimacs::write_wcnf(wcnf, &path)?;
        let mut parts = self.command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| SatError::External("empty solver command".into()))?;
        let output = Command::new(program)
            .args(parts)
            .arg(&path)
            .output()
            .map_err(|e| SatError::External(format!("failed to launch '{program}': {e}")))?;
        let _ = std::fs::remove_file(&path);
        let stdout = String::from_utf8_lossy(&output.stdout);
        parse_solver_output(&stdout, wcnf)
    }
}

pub fn parse_solver_output(stdout: &str, wcnf: &Wcnf) -> Result<MaxSatResult, SatError> {
    let mut status: Option<&str> = None;
    let mut model_lits: Vec<i64> = Vec::new();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| SatError::External(format!("bad model literal: {tok}")))?;
                if v != 0 {
                    model_lits.push(v);
                }
            }
        }
    }
    match status {
        Some("UNSATISFIABLE") => Ok(MaxSatResult::HardUnsat),
        Some(s @ ("OPTIMUM FOUND" | "SATISFIABLE")) => {
            let mut values = vec![false; wcnf.num_vars() as usize + 1];
            for v in model_lits {
                let idx = v.unsigned_abs() as usize;
                if idx < values.len() {
                    values[idx] = v > 0;
                }
            }
            let model = Model::from_values(values);
            if let Some(i) = first_violated_hard(wcnf, &model) {
                return Err(SatError::External(format!(
                    "external model violates hard clause {i}"
                )));
            }
            let cost = wcnf.cost(&model);
            if s == "OPTIMUM FOUND" {
                Ok(MaxSatResult::Optimal { model, cost })
            } else {
                Ok(MaxSatResult::Feasible { model, cost })
            }
        }
        Some(other) => Err(SatError::External(format!("unknown status line: {other}"))),
        None => Err(SatError::External("no status line in solver output".into())),
    }
}
