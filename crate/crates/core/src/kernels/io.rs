use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::lattice::{Lattice, PeriodicLatticeField, Space};
use crate::error::{Error, Result};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// JSON sidecar of a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    #[serde(rename = "box_L")]
    pub box_l: f64,
    pub grid_n: usize,
    pub space: Space,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Dumps the values as little-endian `f64` in site order, with `<path>.json`
/// holding the header.
pub fn write_field(field: &PeriodicLatticeField, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = field.values.iter().flat_map(|v| v.to_le_bytes()).collect();
    let header = FieldHeader { box_l: field.lattice.box_l(), grid_n: field.lattice.n(), space: field.space };
    write_atomic(path, &bytes)?;
    write_atomic(&sidecar_path(path), serde_json::to_string_pretty(&header)?.as_bytes())
}

pub fn read_field(path: &Path) -> Result<PeriodicLatticeField> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| io_err(&side, e))?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse(format!("{} is not a whole number of f64 values", path.display())));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    PeriodicLatticeField::new(Lattice::new(header.box_l, header.grid_n)?, header.space, values)
}

/// Outcome of one discretised inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict<C> {
    pub inequality: String,
    pub eigenvalue: f64,
    pub tol_disc: f64,
    pub holds: bool,
    pub config: C,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let lat = Lattice::new(3.0, 4).unwrap();
        let f = PeriodicLatticeField::from_fn(&lat, Space::Momentum, |i| i as f64 * 0.1 - 1.0);
        let path = dir.path().join("f.bin");
        write_field(&f, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 64 * 8);
        let text = std::fs::read_to_string(sidecar_path(&path)).unwrap();
        assert!(text.contains("\"box_L\": 3.0") && text.contains("\"momentum\""));
        assert_eq!(read_field(&path).unwrap(), f);
    }
}
