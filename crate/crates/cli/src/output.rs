use std::io::Write;
use std::path::{Component, Path, PathBuf};

use crate::CliError;

/// A CSV column and its unit.
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// Writes CSV files with a provenance header into one directory.
pub struct OutputDir {
    dir: PathBuf,
    command: String,
    hash: String,
}

/// Join a relative file name under `dir`, refusing anything that would
/// escape it.
pub fn confine(dir: &Path, name: &Path) -> Result<PathBuf, CliError> {
    let ok = name.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir));
    if !ok || name.as_os_str().is_empty() {
        return Err(CliError::Config(format!(
            "output file {} must be a relative path inside the output directory",
            name.display()
        )));
    }
    Ok(dir.join(name))
}

impl OutputDir {
    pub fn new(dir: &Path, command: &str, hash: String) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), command: command.to_string(), hash })
    }

    pub fn write(&self, name: &Path, columns: &[Column], notes: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = confine(&self.dir, name)?;
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut buf: Vec<u8> = Vec::new();
        writeln!(buf, "# raimsim {}", env!("CARGO_PKG_VERSION")).map_err(io)?;
        writeln!(buf, "# command: {}", self.command).map_err(io)?;
        writeln!(buf, "# config-sha256: {}", self.hash).map_err(io)?;
        let units: Vec<String> = columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        writeln!(buf, "# units: {}", units.join(", ")).map_err(io)?;
        for n in notes {
            writeln!(buf, "# {n}").map_err(io)?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let csv_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
            w.write_record(columns.iter().map(|c| c.name)).map_err(csv_err)?;
            for r in rows {
                if r.len() != columns.len() {
                    return Err(CliError::Numerical(format!("row width {} != {} columns", r.len(), columns.len())));
                }
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        std::fs::write(&path, buf).map_err(io)?;
        Ok(path)
    }
}

/// Shortest round-trip formatting; empty for missing values.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_paths_are_rejected() {
        let d = Path::new("out");
        assert!(confine(d, Path::new("a.csv")).is_ok());
        assert!(confine(d, Path::new("sub/a.csv")).is_ok());
        assert!(confine(d, Path::new("../a.csv")).is_err());
        assert!(confine(d, Path::new("/tmp/a.csv")).is_err());
        assert!(confine(d, Path::new("")).is_err());
    }
}
