//! File formats: Gmsh MSH 2.2 meshes, legacy VTK snapshots, CSV reports.

pub mod msh;
pub mod vtk;

use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Write a CSV file with a `# schema:` comment line followed by a header row.
pub fn write_csv(path: &Path, schema: &str, header: &str, rows: &[String]) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(&format!("# schema: {schema}\n"));
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(row);
        buf.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(buf.as_bytes()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
