//! Plain (P2) PGM dumps of potential fields.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ddpf_core::PotentialField;

pub const MAX_GRAY: u32 = 65535;

/// Gray levels: finite values scaled so the largest finite value is white,
/// infinite values and negatives black.
pub fn gray_levels(field: &PotentialField) -> Vec<u32> {
    let top = field.max_finite().unwrap_or(0.0);
    field
        .values()
        .iter()
        .map(|&v| {
            if !v.is_finite() || v <= 0.0 || top <= 0.0 {
                0
            } else {
                (v / top * MAX_GRAY as f64).round() as u32
            }
        })
        .collect()
}

pub fn write_pgm<W: Write>(field: &PotentialField, mut out: W) -> io::Result<()> {
    writeln!(out, "P2")?;
    writeln!(out, "{} {}", field.width(), field.height())?;
    writeln!(out, "{MAX_GRAY}")?;
    for row in gray_levels(field).chunks(field.width().max(1)) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()
}

/// `<dir>/field_<name>_<step>.pgm`
pub fn dump_path(dir: &Path, name: &str, step: u32) -> PathBuf {
    dir.join(format!("field_{name}_{step}.pgm"))
}

pub fn dump(dir: &Path, name: &str, step: u32, field: &PotentialField) -> io::Result<PathBuf> {
    let path = dump_path(dir, name, step);
    let file = std::fs::File::create(&path)?;
    write_pgm(field, io::BufWriter::new(file))?;
    Ok(path)
}
