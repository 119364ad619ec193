//! CPLEX LP-format export.
//!
//! Coefficients with a terminating decimal expansion are written exactly;
//! others (probabilities such as 1/3) fall back to the shortest decimal that
//! round-trips through `f64`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::{Signed, Zero};

use super::{DeterministicProgram, VarKind};
use crate::error::{Error, Result};
use crate::rational::{format_decimal, Rational};

const TERMS_PER_LINE: usize = 6;

/// Renders the program. Fails when two rows or two columns share a name.
pub fn to_lp_string(program: &DeterministicProgram) -> Result<String> {
    check_names(program)?;
    let vars = &program.variables;
    // an empty row still needs a column reference
    let filler = vars.first().map(|v| v.name.as_str());
    let mut out = String::new();
    out.push_str("\\ QKD chain planning: deterministic equivalent\n");
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, program.objective.iter().map(|(v, c)| (vars[*v].name.as_str(), c)), filler);
    out.push('\n');

    out.push_str("Subject To\n");
    for c in &program.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, c.terms.iter().map(|(v, k)| (vars[*v].name.as_str(), k)), filler);
        let _ = writeln!(out, " {} {}", c.sense, format_decimal(&c.rhs));
    }

    out.push_str("Bounds\n");
    for v in vars.iter().filter(|v| v.kind == VarKind::Integer) {
        let _ = writeln!(out, " {} >= 0", v.name);
    }
    write_names(&mut out, "Generals", program, VarKind::Integer);
    write_names(&mut out, "Binaries", program, VarKind::Binary);
    out.push_str("End\n");
    Ok(out)
}

pub fn export_lp(program: &DeterministicProgram, path: impl AsRef<Path>) -> Result<()> {
    let text = to_lp_string(program)?;
    std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path.as_ref(), e))
}

fn check_names(program: &DeterministicProgram) -> Result<()> {
    let mut seen = HashSet::new();
    for v in &program.variables {
        if !seen.insert(v.name.as_str()) {
            return Err(Error::NameCollision(v.name.clone()));
        }
    }
    let mut rows = HashSet::new();
    for c in &program.constraints {
        if !rows.insert(c.name.as_str()) || c.name == "obj" {
            return Err(Error::NameCollision(c.name.clone()));
        }
    }
    Ok(())
}

fn write_terms<'a>(out: &mut String, terms: impl Iterator<Item = (&'a str, &'a Rational)>, filler: Option<&str>) {
    let mut any = false;
    for (k, (name, c)) in terms.filter(|(_, c)| !c.is_zero()).enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_negative() { '-' } else { '+' };
        let mag = c.abs();
        if mag == Rational::from_integer(1) {
            let _ = write!(out, " {sign} {name}");
        } else {
            let _ = write!(out, " {sign} {} {name}", format_decimal(&mag));
        }
        any = true;
    }
    if !any {
        match filler {
            Some(name) => {
                let _ = write!(out, " 0 {name}");
            }
            None => out.push_str(" 0"),
        }
    }
}

fn write_names(out: &mut String, header: &str, program: &DeterministicProgram, kind: VarKind) {
    out.push_str(header);
    out.push('\n');
    let names: Vec<&str> = program
        .variables
        .iter()
        .filter(|v| v.kind == kind)
        .map(|v| v.name.as_str())
        .collect();
    for chunk in names.chunks(8) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
}
