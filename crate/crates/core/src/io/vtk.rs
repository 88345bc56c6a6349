//! Legacy VTK ASCII writer (DATASET UNSTRUCTURED_GRID) for meshes with named
//! vertex and cell fields, used for snapshot output.

use crate::mesh::Mesh;
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

pub enum FieldData<'a> {
    VertexScalar(&'a str, &'a [f64]),
    VertexVector(&'a str, &'a [f64], &'a [f64]),
    CellScalar(&'a str, &'a [f64]),
}

pub fn write_vtk(mesh: &Mesh, fields: &[FieldData], path: &Path) -> Result<()> {
    let mut buf = String::new();
    buf.push_str("# vtk DataFile Version 3.0\n");
    buf.push_str("breakwater snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    buf.push_str(&format!("POINTS {} double\n", mesh.num_vertices()));
    for v in mesh.vertices() {
        buf.push_str(&format!("{:.17e} {:.17e} 0\n", v.x, v.y));
    }
    let nc = mesh.num_cells();
    buf.push_str(&format!("CELLS {} {}\n", nc, 4 * nc));
    for tri in mesh.triangles() {
        buf.push_str(&format!("3 {} {} {}\n", tri[0], tri[1], tri[2]));
    }
    buf.push_str(&format!("CELL_TYPES {nc}\n"));
    for _ in 0..nc {
        buf.push_str("5\n");
    }

    let mut point_fields: Vec<&FieldData> = Vec::new();
    let mut cell_fields: Vec<&FieldData> = Vec::new();
    for f in fields {
        match f {
            FieldData::CellScalar(..) => cell_fields.push(f),
            _ => point_fields.push(f),
        }
    }
    if !point_fields.is_empty() {
        buf.push_str(&format!("POINT_DATA {}\n", mesh.num_vertices()));
        for f in point_fields {
            match f {
                FieldData::VertexScalar(name, vals) => {
                    assert_eq!(vals.len(), mesh.num_vertices());
                    buf.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
                    for v in *vals {
                        buf.push_str(&format!("{v:.17e}\n"));
                    }
                }
                FieldData::VertexVector(name, xs, ys) => {
                    assert_eq!(xs.len(), mesh.num_vertices());
                    buf.push_str(&format!("VECTORS {name} double\n"));
                    for (x, y) in xs.iter().zip(*ys) {
                        buf.push_str(&format!("{x:.17e} {y:.17e} 0\n"));
                    }
                }
                FieldData::CellScalar(..) => unreachable!(),
            }
        }
    }
    if !cell_fields.is_empty() {
        buf.push_str(&format!("CELL_DATA {nc}\n"));
        for f in cell_fields {
            if let FieldData::CellScalar(name, vals) = f {
                assert_eq!(vals.len(), nc);
                buf.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
                for v in *vals {
                    buf.push_str(&format!("{v:.17e}\n"));
                }
            }
        }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::synthetic;
    use crate::Vec2;

    /// Minimal legacy-VTK reader used as a write-then-parse oracle.
    fn parse_points(text: &str) -> Vec<Vec2> {
        let mut lines = text.lines();
        while let Some(l) = lines.next() {
            if l.starts_with("POINTS") {
                let n: usize = l.split_whitespace().nth(1).unwrap().parse().unwrap();
                return (0..n)
                    .map(|_| {
                        let row = lines.next().unwrap();
                        let mut it = row.split_whitespace();
                        Vec2::new(
                            it.next().unwrap().parse().unwrap(),
                            it.next().unwrap().parse().unwrap(),
                        )
                    })
                    .collect();
            }
        }
        panic!("no POINTS section");
    }

    #[test]
    fn writes_parsable_file_with_scalar_field() {
        let mesh = synthetic::unit_square(1).unwrap();
        let vals = vec![1.0, 2.0, 3.0, 4.0];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.vtk");
        write_vtk(
            &mesh,
            &[FieldData::VertexScalar("height", &vals)],
            &path,
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("DATASET UNSTRUCTURED_GRID"));
        assert!(text.contains("SCALARS height double 1"));
        assert!(text.contains("CELL_TYPES 2"));
        let pts = parse_points(&text);
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn geometry_only_file() {
        let mesh = synthetic::unit_square(1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("geom.vtk");
        write_vtk(&mesh, &[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains("POINT_DATA"));
        assert!(!text.contains("CELL_DATA"));
    }

    #[test]
    fn point_roundtrip_within_tolerance() {
        let mesh = synthetic::disk(1.3, 12, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.vtk");
        write_vtk(&mesh, &[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let pts = parse_points(&text);
        for (a, b) in mesh.vertices().iter().zip(&pts) {
            assert!((a.x - b.x).abs() <= 1e-9 && (a.y - b.y).abs() <= 1e-9);
        }
    }

    #[test]
    fn unwritable_path_errors() {
        let mesh = synthetic::unit_square(1).unwrap();
        let err = write_vtk(&mesh, &[], Path::new("/nonexistent-dir/x.vtk"));
        assert!(err.is_err());
    }
}
