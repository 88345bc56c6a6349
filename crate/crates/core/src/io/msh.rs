//! Gmsh MSH 2.2 ASCII reader and writer. Only the sections needed for 2D
//! simplex meshes are interpreted ($MeshFormat, $Nodes, $Elements); unknown
//! sections are skipped. Element types: 1 = 2-node line (tagged boundary),
//! 2 = 3-node triangle, 15 = point (ignored).

use crate::mesh::{BoundaryTag, Mesh};
use crate::{Error, Result, Vec2};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// Mapping from Gmsh physical tags to boundary kinds. Default: 1 -> Shore,
/// 2 -> OpenSea, 3 -> Obstacle.
#[derive(Debug, Clone)]
pub struct PhysicalTagMap {
    pub shore: Vec<i64>,
    pub open_sea: Vec<i64>,
    pub obstacle: Vec<i64>,
}

impl Default for PhysicalTagMap {
    fn default() -> Self {
        PhysicalTagMap {
            shore: vec![1],
            open_sea: vec![2],
            obstacle: vec![3],
        }
    }
}

impl PhysicalTagMap {
    fn classify(&self, tag: i64) -> Option<BoundaryTag> {
        if self.shore.contains(&tag) {
            Some(BoundaryTag::Shore)
        } else if self.open_sea.contains(&tag) {
            Some(BoundaryTag::OpenSea)
        } else if self.obstacle.contains(&tag) {
            Some(BoundaryTag::Obstacle)
        } else {
            None
        }
    }

    fn tag_code(&self, tag: BoundaryTag) -> i64 {
        match tag {
            BoundaryTag::Shore => *self.shore.first().unwrap_or(&1),
            BoundaryTag::OpenSea => *self.open_sea.first().unwrap_or(&2),
            BoundaryTag::Obstacle => *self.obstacle.first().unwrap_or(&3),
        }
    }
}

pub fn load_msh(path: &Path, tag_map: &PhysicalTagMap) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_msh(&text, tag_map, &path.display().to_string())
}

pub fn parse_msh(text: &str, tag_map: &PhysicalTagMap, path: &str) -> Result<Mesh> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    let mut node_ids: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Vec2> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut boundary: Vec<([usize; 2], BoundaryTag)> = Vec::new();
    let mut saw_format = false;

    while i < lines.len() {
        let line = lines[i].trim();
        match line {
            "$MeshFormat" => {
                let fmt = lines
                    .get(i + 1)
                    .ok_or_else(|| err(i + 2, "truncated $MeshFormat".into()))?;
                let mut parts = fmt.split_whitespace();
                let version = parts.next().unwrap_or("");
                if !version.starts_with("2.") {
                    return Err(err(i + 2, format!("unsupported MSH version {version}")));
                }
                if parts.next() != Some("0") {
                    return Err(err(i + 2, "binary MSH files are not supported".into()));
                }
                saw_format = true;
                i += 3; // format line + $EndMeshFormat
            }
            "$Nodes" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| err(i + 2, "bad node count".into()))?;
                for k in 0..count {
                    let row = lines
                        .get(i + 2 + k)
                        .ok_or_else(|| err(i + 2 + k + 1, "truncated $Nodes".into()))?;
                    let mut parts = row.split_whitespace();
                    let id: i64 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(i + 3 + k, "bad node id".into()))?;
                    let x: f64 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(i + 3 + k, "bad node x".into()))?;
                    let y: f64 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(i + 3 + k, "bad node y".into()))?;
                    node_ids.insert(id, vertices.len());
                    vertices.push(Vec2::new(x, y));
                }
                i += count + 3;
            }
            "$Elements" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| err(i + 2, "bad element count".into()))?;
                for k in 0..count {
                    let lineno = i + 3 + k;
                    let row = lines
                        .get(i + 2 + k)
                        .ok_or_else(|| err(lineno, "truncated $Elements".into()))?;
                    let fields: Vec<i64> = row
                        .split_whitespace()
                        .map(|s| s.parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| err(lineno, "non-integer element field".into()))?;
                    if fields.len() < 3 {
                        return Err(err(lineno, "short element row".into()));
                    }
                    let etype = fields[1];
                    let ntags = fields[2] as usize;
                    let phys = if ntags >= 1 { fields[3] } else { 0 };
                    let nodes = &fields[3 + ntags..];
                    let resolve = |id: i64| {
                        node_ids
                            .get(&id)
                            .copied()
                            .ok_or_else(|| err(lineno, format!("unknown node id {id}")))
                    };
                    match etype {
                        1 => {
                            if nodes.len() != 2 {
                                return Err(err(lineno, "line element needs 2 nodes".into()));
                            }
                            let tag = tag_map.classify(phys).ok_or_else(|| {
                                err(lineno, format!("unknown physical tag {phys} on line element"))
                            })?;
                            boundary.push(([resolve(nodes[0])?, resolve(nodes[1])?], tag));
                        }
                        2 => {
                            if nodes.len() != 3 {
                                return Err(err(lineno, "triangle element needs 3 nodes".into()));
                            }
                            triangles.push([
                                resolve(nodes[0])?,
                                resolve(nodes[1])?,
                                resolve(nodes[2])?,
                            ]);
                        }
                        15 => {}
                        other => {
                            return Err(err(lineno, format!("unsupported element type {other}")));
                        }
                    }
                }
                i += count + 3;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                // Skip unknown section up to its matching $End marker.
                let endmark = format!("$End{}", &s[1..]);
                let mut j = i + 1;
                while j < lines.len() && lines[j].trim() != endmark {
                    j += 1;
                }
                i = j + 1;
            }
            _ => i += 1,
        }
    }

    if !saw_format {
        return Err(err(1, "missing $MeshFormat section".into()));
    }
    if triangles.is_empty() {
        return Err(err(1, "mesh contains no triangles".into()));
    }
    Mesh::new(vertices, triangles, boundary)
}

pub fn write_msh(mesh: &Mesh, path: &Path, tag_map: &PhysicalTagMap) -> Result<()> {
    let mut buf = String::new();
    buf.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    buf.push_str("$Nodes\n");
    buf.push_str(&format!("{}\n", mesh.num_vertices()));
    for (i, v) in mesh.vertices().iter().enumerate() {
        buf.push_str(&format!("{} {:.17e} {:.17e} 0\n", i + 1, v.x, v.y));
    }
    buf.push_str("$EndNodes\n$Elements\n");
    let ne = mesh.boundary_edges().len() + mesh.num_cells();
    buf.push_str(&format!("{ne}\n"));
    let mut eid = 1;
    for e in mesh.boundary_edges() {
        let code = tag_map.tag_code(e.tag);
        buf.push_str(&format!(
            "{eid} 1 2 {code} {code} {} {}\n",
            e.verts[0] + 1,
            e.verts[1] + 1
        ));
        eid += 1;
    }
    for tri in mesh.triangles() {
        buf.push_str(&format!(
            "{eid} 2 2 0 0 {} {} {}\n",
            tri[0] + 1,
            tri[1] + 1,
            tri[2] + 1
        ));
        eid += 1;
    }
    buf.push_str("$EndElements\n");
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

    const TWO_TRI: &str = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 1 1 1 2
2 1 2 1 1 2 3
3 1 2 1 1 3 4
4 1 2 1 1 4 1
5 2 2 0 0 1 2 3
6 2 2 0 0 1 3 4
$EndElements
";

    #[test]
    fn parses_minimal_square() {
        let mesh = parse_msh(TWO_TRI, &PhysicalTagMap::default(), "mem").unwrap();
        assert_eq!(mesh.num_vertices(), 4);
        assert_eq!(mesh.num_cells(), 2);
        assert_eq!(mesh.boundary_edges().len(), 4);
        assert!(mesh
            .boundary_edges()
            .iter()
            .all(|e| e.tag == BoundaryTag::Shore));
    }

    #[test]
    fn clockwise_triangle_repaired_on_load() {
        let flipped = TWO_TRI.replace("5 2 2 0 0 1 2 3", "5 2 2 0 0 1 3 2");
        let mesh = parse_msh(&flipped, &PhysicalTagMap::default(), "mem").unwrap();
        assert!(mesh.geometry().areas.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn unknown_physical_tag_rejected() {
        let bad = TWO_TRI.replace("1 1 2 1 1 1 2", "1 1 2 9 9 1 2");
        let e = parse_msh(&bad, &PhysicalTagMap::default(), "mem").unwrap_err();
        assert!(e.to_string().contains("unknown physical tag"));
    }

    #[test]
    fn roundtrip_half_disk() {
        let mesh = synthetic::half_disk_with_obstacle(&synthetic::HalfDiskSpec::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.msh");
        write_msh(&mesh, &path, &PhysicalTagMap::default()).unwrap();
        let back = load_msh(&path, &PhysicalTagMap::default()).unwrap();
        assert_eq!(back.num_vertices(), mesh.num_vertices());
        assert_eq!(back.num_cells(), mesh.num_cells());
        assert_eq!(back.obstacle_loops().len(), 1);
        for (a, b) in mesh.vertices().iter().zip(back.vertices()) {
            assert!((a.x - b.x).abs() < 1e-15 && (a.y - b.y).abs() < 1e-15);
        }
    }
}
