//! DIMACS CNF / WCNF reading and writing.
//!
//! WCNF uses the classic header form `p wcnf <vars> <clauses> <top>` with
//! `top = 1 + sum of soft weights`; hard clauses carry weight `top`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::types::{Lit, Wcnf};
use crate::SatError;

pub fn wcnf_top(wcnf: &Wcnf) -> u64 {
    1 + wcnf.soft_weight_sum()
}

pub fn format_wcnf(wcnf: &Wcnf) -> String {
    let top = wcnf_top(wcnf);
    let mut out = String::new();
    let num_clauses = wcnf.hard_clauses().len() + wcnf.soft_clauses().len();
    writeln!(out, "p wcnf {} {} {}", wcnf.num_vars(), num_clauses, top).unwrap();
    for clause in wcnf.hard_clauses() {
        write!(out, "{}", top).unwrap();
        for &lit in clause {
            write!(out, " {}", lit.to_dimacs()).unwrap();
        }
        out.push_str(" 0\n");
    }
    for soft in wcnf.soft_clauses() {
        write!(out, "{}", soft.weight).unwrap();
        for &lit in &soft.lits {
            write!(out, " {}", lit.to_dimacs()).unwrap();
        }
        out.push_str(" 0\n");
    }
    out
}

pub fn format_cnf(wcnf: &Wcnf) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p cnf {} {}",
        wcnf.num_vars(),
        wcnf.hard_clauses().len()
    )
    .unwrap();
    for clause in wcnf.hard_clauses() {
        let mut first = true;
        for &lit in clause {
            if !first {
                out.push(' ');
            }
            write!(out, "{}", lit.to_dimacs()).unwrap();
            first = false;
        }
        out.push_str(" 0\n");
    }
    out
}

pub fn write_wcnf(wcnf: &Wcnf, path: &Path) -> Result<(), SatError> {
    fs::write(path, format_wcnf(wcnf))?;
    Ok(())
}

pub fn parse_wcnf(text: &str) -> Result<Wcnf, SatError> {
    let mut wcnf = Wcnf::new();
    let mut top: Option<u64> = None;
    let mut declared_vars = 0u32;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "wcnf" {
                return Err(SatError::Dimacs(format!("bad header: {line}")));
            }
            declared_vars = fields[1]
                .parse()
                .map_err(|_| SatError::Dimacs(format!("bad var count: {line}")))?;
            top = Some(
                fields[3]
                    .parse()
                    .map_err(|_| SatError::Dimacs(format!("bad top: {line}")))?,
            );
            wcnf.ensure_vars(declared_vars);
            continue;
        }
        let top = top.ok_or_else(|| SatError::Dimacs("clause before header".into()))?;
        let mut nums = line.split_whitespace();
        let weight: u64 = nums
            .next()
            .ok_or_else(|| SatError::Dimacs("empty clause line".into()))?
            .parse()
            .map_err(|_| SatError::Dimacs(format!("bad weight: {line}")))?;
        let mut lits = Vec::new();
        for tok in nums {
            let v: i64 = tok
                .parse()
                .map_err(|_| SatError::Dimacs(format!("bad literal: {line}")))?;
            if v == 0 {
                break;
            }
            if v.unsigned_abs() as u32 > declared_vars {
                return Err(SatError::Dimacs(format!(
                    "literal {v} exceeds declared variable count"
                )));
            }
            lits.push(Lit::from_dimacs(v));
        }
        if weight == top {
            wcnf.add_hard(&lits);
        } else {
            wcnf.add_soft(weight, &lits);
        }
    }
    if top.is_none() {
        return Err(SatError::Dimacs("missing header".into()));
    }
    Ok(wcnf)
}

pub fn read_wcnf(path: &Path) -> Result<Wcnf, SatError> {
    parse_wcnf(&fs::read_to_string(path)?)
}
