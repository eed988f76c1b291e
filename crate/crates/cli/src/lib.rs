//! Reproduces reference tables of expansions and exact values for the partial-fraction
//! coefficients of restricted partition generating functions, and runs the
//! acceptance criteria.

pub mod commands;
pub mod criteria;
pub mod reference;
pub mod report;

pub use commands::{RunConfig, Status};
pub use report::{Format, Report};

/// Parses `--rows`: a comma-separated list of `N`, where an item may be a
/// range `start:end[:step]` with `end` included.
pub fn parse_rows(s: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad row '{t}': {e}"));
        match parts.as_slice() {
            [n] => out.push(num(n)?),
            [a, b] | [a, b, _] => {
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step < 1 {
                    return Err(format!("step must be positive in '{item}'"));
                }
                let (a, b) = (num(a)?, num(b)?);
                out.extend((a..=b).step_by(step as usize));
            }
            _ => return Err(format!("bad row range '{item}'")),
        }
    }
    if out.is_empty() {
        return Err("no rows given".into());
    }
    Ok(out)
}
