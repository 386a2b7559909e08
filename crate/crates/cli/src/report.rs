//! Text reports, run manifests and trajectory files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rotational_orbits::verifier::OrbitSolution;

use crate::CliError;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn exact(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Default, Clone)]
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn number(&mut self, key: &str, value: f64) {
        self.lines.push((key.to_string(), exact(value)));
    }

    pub fn maybe(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value {
            self.number(key, v);
        }
    }

    pub fn text(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k:<width$} = {v}");
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn write_trajectory(path: &Path, orbit: &OrbitSolution) -> Result<(), CliError> {
    let dim = orbit.z0.len();
    let mut out = String::from("t");
    for c in 1..=dim {
        let _ = write!(out, ",z{c}");
    }
    out.push('\n');
    for (t, z) in orbit.times.iter().zip(&orbit.trajectory) {
        out.push_str(&exact(*t));
        for c in z {
            out.push(',');
            out.push_str(&exact(*c));
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Reads a trajectory file back into `(times, states)`.
pub fn read_trajectory(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty trajectory file", path.display())))?;
    let columns = header.split(',').count();
    if columns < 3 || !header.starts_with("t,") {
        return Err(CliError::Config(format!("{}: bad header `{header}`", path.display())));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("{}: row {} is not numeric", path.display(), i + 2)))?;
        if row.len() != columns {
            return Err(CliError::Config(format!(
                "{}: row {} has {} columns, header has {columns}",
                path.display(),
                i + 2,
                row.len()
            )));
        }
        times.push(row[0]);
        states.push(row[1..].to_vec());
    }
    if states.len() < 2 {
        return Err(CliError::Config(format!("{}: fewer than two samples", path.display())));
    }
    Ok((times, states))
}
