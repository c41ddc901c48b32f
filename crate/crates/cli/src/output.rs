//! Output files: every tabular artifact starts with the provenance line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{CliError, Result};

/// Creates `dir/name` (and `dir`) and writes the header line.
pub fn create(cfg: &Config, dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "{}", cfg.header())?;
    Ok((path, w))
}

pub fn csv_reader<R: std::io::Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(source)
}

/// Shortest round-trip text, scientific outside [1e-5, 1e15); empty for NaN.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v.is_nan() {
        String::new()
    } else if a == 0.0 || !a.is_finite() || (1e-5..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}
