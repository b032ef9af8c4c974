//! Field dumps: `<stem>.json` header plus `<stem>.bin` little-endian complex128 samples.

use super::grid::{Grid, GridField, C64};
use super::SpectralError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: String,
    pub dims: Vec<usize>,
    pub periods: Vec<f64>,
    pub dtype: String,
    /// Row-major, last axis fastest.
    pub order: String,
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("json"), stem.with_extension("bin"))
}

pub fn write_field(stem: &Path, f: &GridField) -> Result<(), SpectralError> {
    let g = f.grid();
    let header = FieldHeader {
        schema: "1".into(),
        dims: g.res.clone(),
        periods: g.periods.clone(),
        dtype: "complex128-le".into(),
        order: "row-major".into(),
    };
    let (hp, bp) = paths(stem);
    let mut bytes = Vec::with_capacity(16 * g.len());
    for x in f.samples() {
        bytes.extend_from_slice(&x.re.to_le_bytes());
        bytes.extend_from_slice(&x.im.to_le_bytes());
    }
    std::fs::write(hp, serde_json::to_string_pretty(&header).unwrap())?;
    std::fs::write(bp, bytes)?;
    Ok(())
}

pub fn read_field(stem: &Path) -> Result<GridField, SpectralError> {
    let (hp, bp) = paths(stem);
    let header: FieldHeader = serde_json::from_str(&std::fs::read_to_string(hp)?)
        .map_err(|e| SpectralError::BadParameter(format!("field header: {e}")))?;
    if header.dtype != "complex128-le" {
        return Err(SpectralError::BadParameter(format!("unsupported dtype {}", header.dtype)));
    }
    let grid = Grid::new(header.periods, header.dims)?;
    let bytes = std::fs::read(bp)?;
    if bytes.len() != 16 * grid.len() {
        return Err(SpectralError::ResolutionMismatch);
    }
    let word = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let data = bytes.chunks_exact(16).map(|c| C64::new(word(&c[..8]), word(&c[8..]))).collect();
    GridField::from_samples(&grid, data)
}
