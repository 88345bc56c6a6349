//! Computational domain: triangulation, boundary tagging, geometric caches,
//! deformation, and validity checks.
//!
//! A mesh is immutable after construction; deformation produces a new mesh
//! with the same connectivity and freshly built caches. Boundary edges are
//! oriented with the flow domain on their left, so the outward normal is the
//! edge tangent rotated by -90 degrees.

pub mod predicates;
pub mod synthetic;

use crate::{Error, Result, Vec2};
use std::collections::HashMap;

/// Boundary classification: protected shore, open-sea inflow, obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Shore,
    OpenSea,
    Obstacle,
}

impl BoundaryTag {
    pub fn is_rigid_wall(self) -> bool {
        matches!(self, BoundaryTag::Shore | BoundaryTag::Obstacle)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    /// Oriented vertex pair (domain on the left).
    pub verts: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceKind {
    /// Shared by two cells; `minus` is the neighbour of the owner cell.
    Interior { minus: usize, minus_local: usize },
    Boundary { tag: BoundaryTag },
}

/// Unified face record used by the DG assembly loops. The unit normal points
/// out of the owner (`plus`) cell.
#[derive(Debug, Clone, Copy)]
pub struct Face {
    pub verts: [usize; 2],
    pub plus: usize,
    pub plus_local: usize,
    pub kind: FaceKind,
    pub length: f64,
    pub normal: Vec2,
    /// Penalty length scale: min over adjacent cells of area / edge length.
    pub penalty_h: f64,
}

/// Per-cell and per-face geometric quantities, rebuilt on every deformation.
#[derive(Debug, Clone, Default)]
pub struct GeometryCache {
    /// Signed triangle areas (positive for valid meshes).
    pub areas: Vec<f64>,
    /// Cell diameters (longest edge).
    pub diameters: Vec<f64>,
    /// Inverse affine Jacobians, d(xi,eta)/d(x,y), row-major.
    pub jac_inv: Vec<[[f64; 2]; 2]>,
    pub max_diameter: f64,
    pub total_area: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    faces: Vec<Face>,
    geometry: GeometryCache,
    vertex_cells: Vec<Vec<usize>>,
    /// Boundary tag seen by each vertex; Obstacle wins at (impossible by
    /// invariant) junctions, Shore wins over OpenSea.
    vertex_tags: Vec<Option<BoundaryTag>>,
}

#[derive(Debug, Clone, Default)]
pub struct ValidityReport {
    pub inverted_cells: Vec<usize>,
    pub intersecting_obstacle_segments: Vec<(usize, usize)>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.inverted_cells.is_empty() && self.intersecting_obstacle_segments.is_empty()
    }
}

impl Mesh {
    /// Build a mesh from raw vertices, triangles, and tagged boundary edges.
    /// Triangles are reoriented counter-clockwise if needed; the boundary is
    /// checked for closedness and the obstacle loops for disjointness.
    pub fn new(
        vertices: Vec<Vec2>,
        mut triangles: Vec<[usize; 3]>,
        raw_boundary: Vec<([usize; 2], BoundaryTag)>,
    ) -> Result<Mesh> {
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Mesh(format!("vertex {i} is not finite")));
            }
        }
        for (c, tri) in triangles.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= vertices.len() {
                    return Err(Error::Mesh(format!("triangle {c} references vertex {v}")));
                }
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area == 0.0 {
                return Err(Error::Mesh(format!("triangle {c} has zero area")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }

        // Edge incidence: sorted vertex pair -> (cell, local edge) list.
        let mut incidence: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (c, tri) in triangles.iter().enumerate() {
            for le in 0..3 {
                let (a, b) = (tri[le], tri[(le + 1) % 3]);
                incidence
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((c, le));
            }
        }
        for (&(a, b), inc) in &incidence {
            if inc.len() > 2 {
                return Err(Error::Mesh(format!(
                    "edge ({a},{b}) is shared by {} triangles",
                    inc.len()
                )));
            }
        }

        let mut tag_of: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for (e, tag) in &raw_boundary {
            let key = (e[0].min(e[1]), e[0].max(e[1]));
            if tag_of.insert(key, *tag).is_some() {
                return Err(Error::Mesh(format!(
                    "boundary edge ({},{}) tagged twice",
                    e[0], e[1]
                )));
            }
        }

        let mut boundary_edges = Vec::new();
        for (c, tri) in triangles.iter().enumerate() {
            for le in 0..3 {
                let (a, b) = (tri[le], tri[(le + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if incidence[&key].len() == 1 {
                    let tag = tag_of.remove(&key).ok_or_else(|| {
                        Error::Mesh(format!("boundary edge ({a},{b}) of cell {c} is untagged"))
                    })?;
                    // Orient along the CCW triangle traversal: domain on the left.
                    boundary_edges.push(BoundaryEdge { verts: [a, b], tag });
                }
            }
        }
        if let Some((&(a, b), _)) = tag_of.iter().next() {
            return Err(Error::Mesh(format!(
                "tagged edge ({a},{b}) is not a boundary edge of any triangle"
            )));
        }

        check_boundary_loops(&boundary_edges)?;

        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            faces: Vec::new(),
            geometry: GeometryCache::default(),
            vertex_cells: Vec::new(),
            vertex_tags: Vec::new(),
        };
        mesh.build_topology();
        mesh.rebuild_geometry();
        Ok(mesh)
    }

    /// Same connectivity with new vertex positions; caches rebuilt, validity
    /// not enforced (use [`Mesh::validate_deformed`]).
    pub fn with_vertices(&self, vertices: Vec<Vec2>) -> Mesh {
        assert_eq!(vertices.len(), self.vertices.len());
        let mut mesh = self.clone();
        mesh.vertices = vertices;
        mesh.rebuild_geometry();
        mesh
    }

    /// Move every vertex by `step * w[v]`; connectivity unchanged.
    pub fn apply_deformation(&self, w: &[Vec2], step: f64) -> Mesh {
        assert_eq!(w.len(), self.vertices.len());
        let vertices = self
            .vertices
            .iter()
            .zip(w)
            .map(|(&v, &d)| v + d * step)
            .collect();
        self.with_vertices(vertices)
    }

    /// Validity of a (possibly deformed) mesh: all triangle areas strictly
    /// positive and no two obstacle boundary segments intersecting except at
    /// shared endpoints. Exact predicates; O(n^2) over obstacle segments.
    pub fn validate_deformed(&self) -> ValidityReport {
        let mut report = ValidityReport::default();
        for (c, tri) in self.triangles.iter().enumerate() {
            if predicates::orient2d(
                self.vertices[tri[0]],
                self.vertices[tri[1]],
                self.vertices[tri[2]],
            ) <= 0
            {
                report.inverted_cells.push(c);
            }
        }
        let segs: Vec<&BoundaryEdge> = self
            .boundary_edges
            .iter()
            .filter(|e| e.tag == BoundaryTag::Obstacle)
            .collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let [a, b] = segs[i].verts;
                let [c, d] = segs[j].verts;
                if predicates::segments_intersect_beyond_shared(
                    self.vertices[a],
                    self.vertices[b],
                    self.vertices[c],
                    self.vertices[d],
                    a == c,
                    a == d,
                    b == c,
                    b == d,
                ) {
                    report.intersecting_obstacle_segments.push((i, j));
                }
            }
        }
        report
    }

    fn build_topology(&mut self) {
        let mut incidence: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (c, tri) in self.triangles.iter().enumerate() {
            for le in 0..3 {
                let (a, b) = (tri[le], tri[(le + 1) % 3]);
                incidence
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((c, le));
            }
        }
        let tag_of: HashMap<(usize, usize), BoundaryTag> = self
            .boundary_edges
            .iter()
            .map(|e| ((e.verts[0].min(e.verts[1]), e.verts[0].max(e.verts[1])), e.tag))
            .collect();

        let mut faces = Vec::new();
        for (c, tri) in self.triangles.iter().enumerate() {
            for le in 0..3 {
                let (a, b) = (tri[le], tri[(le + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let inc = &incidence[&key];
                if inc.len() == 1 {
                    faces.push(Face {
                        verts: [a, b],
                        plus: c,
                        plus_local: le,
                        kind: FaceKind::Boundary { tag: tag_of[&key] },
                        length: 0.0,
                        normal: Vec2::ZERO,
                        penalty_h: 0.0,
                    });
                } else {
                    let (other_cell, other_local) =
                        inc.iter().copied().find(|&(oc, _)| oc != c).unwrap();
                    // Each interior face once, owned by the lower cell index.
                    if c < other_cell {
                        faces.push(Face {
                            verts: [a, b],
                            plus: c,
                            plus_local: le,
                            kind: FaceKind::Interior {
                                minus: other_cell,
                                minus_local: other_local,
                            },
                            length: 0.0,
                            normal: Vec2::ZERO,
                            penalty_h: 0.0,
                        });
                    }
                }
            }
        }
        self.faces = faces;

        let mut vertex_cells = vec![Vec::new(); self.vertices.len()];
        for (c, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                vertex_cells[v].push(c);
            }
        }
        self.vertex_cells = vertex_cells;

        let mut vertex_tags = vec![None; self.vertices.len()];
        for e in &self.boundary_edges {
            for &v in &e.verts {
                vertex_tags[v] = Some(match (vertex_tags[v], e.tag) {
                    (Some(BoundaryTag::Obstacle), _) | (_, BoundaryTag::Obstacle) => {
                        BoundaryTag::Obstacle
                    }
                    (Some(BoundaryTag::Shore), _) | (_, BoundaryTag::Shore) => BoundaryTag::Shore,
                    _ => BoundaryTag::OpenSea,
                });
            }
        }
        self.vertex_tags = vertex_tags;
    }

    fn rebuild_geometry(&mut self) {
        let ncells = self.triangles.len();
        let mut areas = Vec::with_capacity(ncells);
        let mut diameters = Vec::with_capacity(ncells);
        let mut jac_inv = Vec::with_capacity(ncells);
        for tri in &self.triangles {
            let (a, b, c) = (
                self.vertices[tri[0]],
                self.vertices[tri[1]],
                self.vertices[tri[2]],
            );
            let area = signed_area(a, b, c);
            areas.push(area);
            let d = (b - a)
                .norm()
                .max((c - b).norm())
                .max((a - c).norm());
            diameters.push(d);
            let det = 2.0 * area;
            // J = [b-a | c-a]; inverse of a 2x2.
            let (e1, e2) = (b - a, c - a);
            jac_inv.push([
                [e2.y / det, -e2.x / det],
                [-e1.y / det, e1.x / det],
            ]);
        }
        let max_diameter = diameters.iter().copied().fold(0.0_f64, f64::max);
        let total_area = areas.iter().sum();
        self.geometry = GeometryCache {
            areas,
            diameters,
            jac_inv,
            max_diameter,
            total_area,
        };
        for f in &mut self.faces {
            let (a, b) = (self.vertices[f.verts[0]], self.vertices[f.verts[1]]);
            let t = b - a;
            f.length = t.norm();
            f.normal = t.rot_cw() / f.length;
            let h_plus = self.geometry.areas[f.plus].abs() / f.length;
            f.penalty_h = match f.kind {
                FaceKind::Interior { minus, .. } => {
                    h_plus.min(self.geometry.areas[minus].abs() / f.length)
                }
                FaceKind::Boundary { .. } => h_plus,
            };
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn geometry(&self) -> &GeometryCache {
        &self.geometry
    }

    pub fn cells_of_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_cells[v]
    }

    pub fn vertex_tag(&self, v: usize) -> Option<BoundaryTag> {
        self.vertex_tags[v]
    }

    pub fn is_obstacle_vertex(&self, v: usize) -> bool {
        self.vertex_tags[v] == Some(BoundaryTag::Obstacle)
    }

    pub fn is_outer_boundary_vertex(&self, v: usize) -> bool {
        matches!(
            self.vertex_tags[v],
            Some(BoundaryTag::Shore) | Some(BoundaryTag::OpenSea)
        )
    }

    /// Map reference coordinates of a cell to physical space.
    pub fn ref_to_phys(&self, cell: usize, xi: f64, eta: f64) -> Vec2 {
        let [v0, v1, v2] = self.triangles[cell];
        let (a, b, c) = (self.vertices[v0], self.vertices[v1], self.vertices[v2]);
        a + (b - a) * xi + (c - a) * eta
    }

    /// Inverse affine map of a cell (exact for straight triangles).
    pub fn phys_to_ref(&self, cell: usize, p: Vec2) -> (f64, f64) {
        let v0 = self.vertices[self.triangles[cell][0]];
        let d = p - v0;
        let ji = &self.geometry.jac_inv[cell];
        (
            ji[0][0] * d.x + ji[0][1] * d.y,
            ji[1][0] * d.x + ji[1][1] * d.y,
        )
    }

    /// Physical gradients of the three P1 hat functions on a cell.
    pub fn p1_gradients(&self, cell: usize) -> [Vec2; 3] {
        let ji = &self.geometry.jac_inv[cell];
        // grad_x phi = J^{-T} grad_ref phi with ref grads (-1,-1), (1,0), (0,1).
        let gx = |gr: (f64, f64)| {
            Vec2::new(
                ji[0][0] * gr.0 + ji[1][0] * gr.1,
                ji[0][1] * gr.0 + ji[1][1] * gr.1,
            )
        };
        [gx((-1.0, -1.0)), gx((1.0, 0.0)), gx((0.0, 1.0))]
    }

    /// Centroid of a cell.
    pub fn centroid(&self, cell: usize) -> Vec2 {
        let [a, b, c] = self.triangles[cell];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    /// Ordered closed loops of obstacle boundary vertices.
    pub fn obstacle_loops(&self) -> Vec<Vec<usize>> {
        self.loops_with(|tag| tag == BoundaryTag::Obstacle)
    }

    /// All boundary loops (any tag), as ordered vertex cycles.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        self.loops_with(|_| true)
    }

    fn loops_with(&self, keep: impl Fn(BoundaryTag) -> bool) -> Vec<Vec<usize>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for e in self.boundary_edges.iter().filter(|e| keep(e.tag)) {
            next.insert(e.verts[0], e.verts[1]);
        }
        let mut loops = Vec::new();
        let mut visited: HashMap<usize, bool> = next.keys().map(|&k| (k, false)).collect();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            if visited[&start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            loop {
                cycle.push(v);
                *visited.get_mut(&v).unwrap() = true;
                v = next[&v];
                if v == start {
                    break;
                }
            }
            loops.push(cycle);
        }
        loops
    }

    /// Boundary edges of the obstacle, as (edge index into `boundary_edges`).
    pub fn obstacle_edge_indices(&self) -> Vec<usize> {
        self.boundary_edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tag == BoundaryTag::Obstacle)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Every boundary vertex must have exactly one outgoing and one incoming
/// edge (closed loops), and obstacle loops must not share vertices with
/// shore/open-sea loops.
fn check_boundary_loops(edges: &[BoundaryEdge]) -> Result<()> {
    let mut out_deg: HashMap<usize, usize> = HashMap::new();
    let mut in_deg: HashMap<usize, usize> = HashMap::new();
    for e in edges {
        *out_deg.entry(e.verts[0]).or_insert(0) += 1;
        *in_deg.entry(e.verts[1]).or_insert(0) += 1;
    }
    for (&v, &d) in &out_deg {
        if d != 1 || in_deg.get(&v) != Some(&1) {
            return Err(Error::Mesh(format!(
                "boundary is not a set of closed loops at vertex {v}"
            )));
        }
    }
    for (&v, _) in &in_deg {
        if out_deg.get(&v) != Some(&1) {
            return Err(Error::Mesh(format!(
                "boundary is not a set of closed loops at vertex {v}"
            )));
        }
    }
    let mut obstacle_verts: HashMap<usize, ()> = HashMap::new();
    for e in edges.iter().filter(|e| e.tag == BoundaryTag::Obstacle) {
        obstacle_verts.insert(e.verts[0], ());
        obstacle_verts.insert(e.verts[1], ());
    }
    for e in edges.iter().filter(|e| e.tag != BoundaryTag::Obstacle) {
        if obstacle_verts.contains_key(&e.verts[0]) || obstacle_verts.contains_key(&e.verts[1]) {
            return Err(Error::Mesh(
                "obstacle loop shares a vertex with the outer boundary".into(),
            ));
        }
    }
    Ok(())
}
