//! CSV diagnostics and binary field snapshots.
//!
//! Snapshot layout (little endian): b"WMEM", u32 version = 1, u32 dim,
//! u32 nx, u32 nxi, f64 Lx, f64 Lxi, f64 t, then nxi^d · nx^d f64 values
//! with the momentum index slowest (row = ξ point, column = x point).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, CSV_HEADER};
use crate::error::{WError, WResult};
use crate::phase_grid::{Grid, PhaseField};

pub const MAGIC: &[u8; 4] = b"WMEM";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 4 + 3 * 8;

pub struct CsvWriter<W: Write> {
    out: W,
    path: PathBuf,
    rows: usize,
}

impl CsvWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> WResult<Self> {
        let f = File::create(path).map_err(|e| WError::io(path, e))?;
        CsvWriter::new(BufWriter::new(f), path)
    }
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, path: &Path) -> WResult<Self> {
        writeln!(out, "{CSV_HEADER}").map_err(|e| WError::io(path, e))?;
        Ok(CsvWriter { out, path: path.to_path_buf(), rows: 0 })
    }

    pub fn write(&mut self, rec: &DiagnosticsRecord) -> WResult<()> {
        self.rows += 1;
        writeln!(self.out, "{}", rec.csv_row()).map_err(|e| WError::io(&self.path, e))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> WResult<W> {
        self.out.flush().map_err(|e| WError::io(&self.path, e))?;
        Ok(self.out)
    }
}

/// Encode a field as snapshot bytes.
pub fn encode_snapshot(field: &PhaseField) -> Vec<u8> {
    let g = &field.grid;
    let mut b = Vec::with_capacity(HEADER_LEN + 8 * field.values.len());
    b.extend_from_slice(MAGIC);
    for v in [VERSION, g.dim as u32, g.nx as u32, g.nxi as u32] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    for v in [g.lx, g.lxi, field.time] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    for v in &field.values {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

fn bad(path: &Path, msg: &str) -> WError {
    WError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()))
}

/// Decode snapshot bytes; `path` only labels errors.
pub fn decode_snapshot(bytes: &[u8], path: &Path) -> WResult<PhaseField> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad(path, "not a WMEM snapshot"));
    }
    let u = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let f = |i: usize| f64::from_le_bytes(bytes[20 + 8 * i..28 + 8 * i].try_into().unwrap());
    if u(0) != VERSION {
        return Err(bad(path, &format!("unsupported snapshot version {}", u(0))));
    }
    let grid = Grid::new(u(1) as usize, u(2) as usize, u(3) as usize, f(0), f(1))
        .map_err(|e| bad(path, &e.to_string()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * grid.len() {
        return Err(bad(path, &format!("expected {} values, found {} bytes", grid.len(), body.len())));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    PhaseField::from_values(grid, values, f(2))
}

pub fn write_snapshot(path: &Path, field: &PhaseField) -> WResult<()> {
    let mut f = File::create(path).map_err(|e| WError::io(path, e))?;
    f.write_all(&encode_snapshot(field)).map_err(|e| WError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> WResult<PhaseField> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| WError::io(path, e))?;
    decode_snapshot(&bytes, path)
}

/// Path of the snapshot for a given step: "{step}" in the template is
/// replaced by the zero-padded index, otherwise the index is appended.
pub fn snapshot_path(template: &Path, step: Option<usize>) -> PathBuf {
    let s = template.to_string_lossy();
    let tag = step.map_or_else(|| "final".to_string(), |k| format!("{k:06}"));
    if s.contains("{step}") {
        PathBuf::from(s.replace("{step}", &tag))
    } else if step.is_some() {
        PathBuf::from(format!("{s}.{tag}"))
    } else {
        template.to_path_buf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let g = Grid::new(2, 4, 6, 1.5, 2.5).unwrap();
        let mut f = PhaseField::from_fn(g, |x, xi| x[0] - 2.0 * xi[1] + 0.1 * x[1]);
        f.time = 0.375;
        let b = encode_snapshot(&f);
        assert_eq!(&b[..4], b"WMEM");
        assert_eq!(b.len(), HEADER_LEN + 8 * g.len());
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        let back = decode_snapshot(&b, Path::new("mem")).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_snapshot_rejected() {
        let g = Grid::new(1, 4, 4, 1.0, 1.0).unwrap();
        let b = encode_snapshot(&PhaseField::zeros(g));
        assert!(decode_snapshot(&b[..b.len() - 1], Path::new("x")).is_err());
        assert!(decode_snapshot(b"nope", Path::new("x")).is_err());
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_path(Path::new("out/w_{step}.bin"), Some(7)), PathBuf::from("out/w_000007.bin"));
        assert_eq!(snapshot_path(Path::new("out/w_{step}.bin"), None), PathBuf::from("out/w_final.bin"));
        assert_eq!(snapshot_path(Path::new("w.bin"), Some(3)), PathBuf::from("w.bin.000003"));
        assert_eq!(snapshot_path(Path::new("w.bin"), None), PathBuf::from("w.bin"));
    }

    #[test]
    fn csv_counts_rows() {
        let mut w = CsvWriter::new(Vec::new(), Path::new("mem")).unwrap();
        let g = Grid::new(1, 8, 8, 2.0, 2.0).unwrap();
        let rec = crate::diagnostics::record(&PhaseField::zeros(g), 0.0, Default::default());
        w.write(&rec).unwrap();
        assert_eq!(w.rows(), 1);
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 2);
    }
}
