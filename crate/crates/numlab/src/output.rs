//! Output artifacts: CSV residual series, JSON reports, and flat binary grid
//! snapshots.
//!
//! Snapshot layout (little-endian): magic `CFGD`, u32 version (1), u32 dims,
//! then per axis u64 cell count and two f64 extents, then the row-major
//! field as f64.

use crate::balance::BalanceReport;
use crate::grid::Grid;
use std::io::{self, Read, Write};
use std::path::Path;

pub fn write_residual_csv(
    path: &Path,
    report: &BalanceReport,
    dts: Option<&[f64]>,
) -> io::Result<()> {
    let mut out = String::from("step,residual\n");
    for (i, r) in report.residuals.iter().enumerate() {
        match dts {
            Some(dts) => out.push_str(&format!("{i},{r:e},{:e}\n", dts[i])),
            None => out.push_str(&format!("{i},{r:e}\n")),
        }
    }
    std::fs::write(path, out)
}

pub fn write_report_json<T: serde::Serialize>(path: &Path, report: &T) -> io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(path, text)
}

const MAGIC: &[u8; 4] = b"CFGD";

pub fn write_snapshot(path: &Path, grid: &Grid, field: &[f64]) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(MAGIC)?;
    file.write_all(&1u32.to_le_bytes())?;
    file.write_all(&(grid.dims as u32).to_le_bytes())?;
    for axis in 0..grid.dims {
        file.write_all(&(grid.n[axis] as u64).to_le_bytes())?;
        file.write_all(&grid.extents[axis].0.to_le_bytes())?;
        file.write_all(&grid.extents[axis].1.to_le_bytes())?;
    }
    for v in field {
        file.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot(path: &Path) -> io::Result<(Grid, Vec<f64>)> {
    let mut file = std::fs::File::open(path)?;
    let mut buf4 = [0u8; 4];
    file.read_exact(&mut buf4)?;
    if &buf4 != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic"));
    }
    file.read_exact(&mut buf4)?;
    if u32::from_le_bytes(buf4) != 1 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad version"));
    }
    file.read_exact(&mut buf4)?;
    let dims = u32::from_le_bytes(buf4) as usize;
    if dims == 0 || dims > 3 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad dims"));
    }
    let mut n = Vec::with_capacity(dims);
    let mut extents = Vec::with_capacity(dims);
    let mut buf8 = [0u8; 8];
    for _ in 0..dims {
        file.read_exact(&mut buf8)?;
        n.push(u64::from_le_bytes(buf8) as usize);
        file.read_exact(&mut buf8)?;
        let lo = f64::from_le_bytes(buf8);
        file.read_exact(&mut buf8)?;
        let hi = f64::from_le_bytes(buf8);
        extents.push((lo, hi));
    }
    let grid = Grid::new(&n, &extents);
    let mut field = Vec::with_capacity(grid.cells());
    for _ in 0..grid.cells() {
        file.read_exact(&mut buf8)?;
        field.push(f64::from_le_bytes(buf8));
    }
    Ok((grid, field))
}
