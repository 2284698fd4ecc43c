use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sts_analysis::{CapabilityMap, CellStatus};
use sts_sim::{SimLog, CHANNELS};

use crate::CliError;

/// Versioned schema tag written as the first line of every log.
pub const LOG_SCHEMA: &str = "# schema: sts-log/1";
pub const MAP_SCHEMA: &str = "# schema: sts-map/1";

/// 17 significant digits: exact round trip for `f64`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        // drop the sign of negative zero so reruns compare byte for byte
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

fn csv_writer(path: &Path, schema: Option<&str>) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let mut f = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    if let Some(s) = schema {
        writeln!(f, "{s}").map_err(|e| CliError::io(path, e))?;
    }
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(f))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn rec<I: IntoIterator<Item = String>>(w: &mut csv::Writer<BufWriter<File>>, path: &Path, fields: I) -> Result<(), CliError> {
    w.write_record(fields).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_log(path: &Path, log: &SimLog) -> Result<(), CliError> {
    let mut w = csv_writer(path, Some(LOG_SCHEMA))?;
    rec(&mut w, path, CHANNELS.iter().map(|(n, u)| format!("{n}[{u}]")))?;
    for r in &log.rows {
        rec(&mut w, path, r.values().into_iter().map(num))?;
    }
    finish(w, path)
}

/// Long format, one row per cell: `y, z, value, status`. Masked cells have an empty value.
pub fn write_map(path: &Path, map: &CapabilityMap) -> Result<(), CliError> {
    let mut w = csv_writer(path, Some(MAP_SCHEMA))?;
    rec(&mut w, path, ["y[m]", "z[m]", "f_z_max[N]", "status[1]"].map(String::from))?;
    for i in 0..map.grid.nz() {
        for j in 0..map.grid.ny() {
            let v = map.value[i][j].map(num).unwrap_or_default();
            rec(&mut w, path, [num(map.grid.y(j)), num(map.grid.z(i)), v, map.status[i][j].code().to_string()])?;
        }
    }
    finish(w, path)
}

pub fn map_legend() -> Vec<(u8, &'static str)> {
    CellStatus::LEGEND.to_vec()
}

/// Generic table: header plus rows of preformatted fields.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv_writer(path, None)?;
    rec(&mut w, path, header.iter().map(|s| s.to_string()))?;
    for r in rows {
        rec(&mut w, path, r.iter().cloned())?;
    }
    finish(w, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| CliError::io(path, e))
}
