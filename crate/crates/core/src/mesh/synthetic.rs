//! Scripted mesh generators for tests, benchmarks, and demo scenarios:
//! structured rectangles, disks, and star-shaped regions with one interior
//! hole (half-circle-with-obstacle topology, thin slabs).

use super::{BoundaryTag, Mesh};
use crate::{Result, Vec2};

/// Structured rectangle [x0,x1] x [y0,y1], nx-by-ny quads split into
/// triangles; boundary tags chosen per edge midpoint.
pub fn rectangle(
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    tag_fn: impl Fn(Vec2) -> BoundaryTag,
) -> Result<Mesh> {
    assert!(nx >= 1 && ny >= 1);
    let node = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Vec2::new(
                x0 + (x1 - x0) * i as f64 / nx as f64,
                y0 + (y1 - y0) * j as f64 / ny as f64,
            ));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut boundary = Vec::new();
    let mut tag_edge = |a: usize, b: usize, verts: &[Vec2]| {
        let mid = (verts[a] + verts[b]) * 0.5;
        boundary.push(([a, b], tag_fn(mid)));
    };
    for i in 0..nx {
        tag_edge(node(i, 0), node(i + 1, 0), &vertices);
        tag_edge(node(i + 1, ny), node(i, ny), &vertices);
    }
    for j in 0..ny {
        tag_edge(node(nx, j), node(nx, j + 1), &vertices);
        tag_edge(node(0, j + 1), node(0, j), &vertices);
    }
    Mesh::new(vertices, triangles, boundary)
}

/// Unit square with every edge tagged Shore.
pub fn unit_square(n: usize) -> Result<Mesh> {
    rectangle(n, n, 0.0, 0.0, 1.0, 1.0, |_| BoundaryTag::Shore)
}

/// Structured disk of radius `r`: centre fan plus concentric rings.
pub fn disk(r: f64, n_theta: usize, n_rings: usize) -> Result<Mesh> {
    assert!(n_theta >= 3 && n_rings >= 1);
    let mut vertices = vec![Vec2::ZERO];
    for ring in 1..=n_rings {
        let rho = r * ring as f64 / n_rings as f64;
        for k in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            vertices.push(Vec2::new(rho * th.cos(), rho * th.sin()));
        }
    }
    let node = |ring: usize, k: usize| 1 + (ring - 1) * n_theta + (k % n_theta);
    let mut triangles = Vec::new();
    for k in 0..n_theta {
        triangles.push([0, node(1, k), node(1, k + 1)]);
    }
    for ring in 1..n_rings {
        for k in 0..n_theta {
            let (a, b) = (node(ring, k), node(ring, k + 1));
            let (c, d) = (node(ring + 1, k + 1), node(ring + 1, k));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut boundary = Vec::new();
    for k in 0..n_theta {
        boundary.push(([node(n_rings, k), node(n_rings, k + 1)], BoundaryTag::Shore));
    }
    Mesh::new(vertices, triangles, boundary)
}

/// Star-shaped hole description, as a radial support function about a centre.
pub enum HoleShape {
    Circle { radius: f64 },
    /// Axis-aligned rectangle of half-width `hw` and half-height `hh`.
    Rect { hw: f64, hh: f64 },
}

impl HoleShape {
    fn radius_at(&self, theta: f64) -> f64 {
        match *self {
            HoleShape::Circle { radius } => radius,
            HoleShape::Rect { hw, hh } => {
                let (c, s) = (theta.cos().abs(), theta.sin().abs());
                (hw / c.max(1e-300)).min(hh / s.max(1e-300))
            }
        }
    }
}

/// Radial node distribution along each column.
pub enum RadialSpacing {
    /// Fixed geometric ratio (1.0 = uniform).
    Geometric(f64),
    /// Per-column geometric ratio targeting this absolute first-layer
    /// thickness at the hole, for near-isotropic cells there.
    FirstLayer(f64),
}

impl RadialSpacing {
    /// Blending fractions 0 = hole, 1 = outer vertex, for a ray of length
    /// `len` split into `n` layers.
    fn fractions(&self, len: f64, n: usize) -> Vec<f64> {
        let ratio = match *self {
            RadialSpacing::Geometric(g) => g,
            RadialSpacing::FirstLayer(t1) => {
                // Solve (g - 1)/(g^n - 1) = t1/len for g by bisection.
                let target = (t1 / len).min(1.0 / n as f64);
                let f = |g: f64| (g - 1.0) / (g.powi(n as i32) - 1.0) - target;
                let (mut lo, mut hi) = (1.0 + 1e-9, 16.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        };
        (0..=n)
            .map(|r| {
                if (ratio - 1.0).abs() < 1e-9 {
                    r as f64 / n as f64
                } else {
                    (ratio.powi(r as i32) - 1.0) / (ratio.powi(n as i32) - 1.0)
                }
            })
            .collect()
    }
}

/// Mesh the region between a star-shaped CCW outer loop and one star-shaped
/// hole by radial interpolation along the rays from the hole centre to the
/// outer vertices.
pub fn annular_region(
    outer_loop: &[Vec2],
    outer_tags: &[BoundaryTag],
    center: Vec2,
    hole: &HoleShape,
    n_radial: usize,
    spacing: &RadialSpacing,
) -> Result<Mesh> {
    assert_eq!(outer_loop.len(), outer_tags.len());
    assert!(n_radial >= 1);
    let n_cols = outer_loop.len();
    let node = |k: usize, r: usize| (k % n_cols) * (n_radial + 1) + r;

    let mut vertices = vec![Vec2::ZERO; n_cols * (n_radial + 1)];
    for (k, &outer) in outer_loop.iter().enumerate() {
        let dir = outer - center;
        let theta = dir.y.atan2(dir.x);
        let inner = center + dir * (hole.radius_at(theta) / dir.norm());
        let s = spacing.fractions((outer - inner).norm(), n_radial);
        for (r, &sr) in s.iter().enumerate() {
            vertices[node(k, r)] = inner + (outer - inner) * sr;
        }
    }

    let mut triangles = Vec::new();
    for k in 0..n_cols {
        for r in 0..n_radial {
            let (a, b) = (node(k, r), node(k + 1, r));
            let (c, d) = (node(k + 1, r + 1), node(k, r + 1));
            // Diagonal choice mirrored across the y-axis of the hole centre
            // so symmetric domains get exactly symmetric triangulations.
            let mid = (vertices[a] + vertices[b] + vertices[c] + vertices[d]) * 0.25;
            if mid.x >= center.x {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    let mut boundary = Vec::new();
    for k in 0..n_cols {
        // Hole ring runs clockwise seen from the domain (domain on the left).
        boundary.push(([node(k + 1, 0), node(k, 0)], BoundaryTag::Obstacle));
        boundary.push(([node(k, n_radial), node(k + 1, n_radial)], outer_tags[k]));
    }
    Mesh::new(vertices, triangles, boundary)
}

/// Half-circle domain of the model problem: flat shore at the bottom, open
/// sea along the arc, one circular obstacle in front of the shore. Outer
/// vertices are ray hits at uniform angles around the obstacle centre, which
/// keeps the cells near the obstacle isotropic.
pub struct HalfDiskSpec {
    pub radius: f64,
    pub obstacle_center: Vec2,
    pub obstacle_radius: f64,
    /// Angular columns around the obstacle; must be even for symmetry.
    pub n_columns: usize,
    pub n_radial: usize,
    /// Thickness of the first cell layer at the obstacle.
    pub first_layer: f64,
    /// Tag used for the arc; `Shore` turns the domain into a closed basin.
    pub arc_tag: BoundaryTag,
}

impl Default for HalfDiskSpec {
    fn default() -> Self {
        HalfDiskSpec {
            radius: 2.0,
            obstacle_center: Vec2::new(0.0, 0.5),
            obstacle_radius: 0.25,
            n_columns: 56,
            n_radial: 9,
            first_layer: 0.05,
            arc_tag: BoundaryTag::OpenSea,
        }
    }
}

pub fn half_disk_with_obstacle(spec: &HalfDiskSpec) -> Result<Mesh> {
    let r = spec.radius;
    let c = spec.obstacle_center;
    let n = spec.n_columns;
    let mut outer = Vec::with_capacity(n);
    let mut is_shore = Vec::with_capacity(n);
    for j in 0..n {
        let theta = -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * j as f64 / n as f64;
        let d = Vec2::new(theta.cos(), theta.sin());
        // Shore hit: ray meets y = 0 inside the diameter.
        let shore_hit = if d.y < 0.0 {
            let t = -c.y / d.y;
            let x = c.x + t * d.x;
            (x.abs() <= r).then_some(Vec2::new(x, 0.0))
        } else {
            None
        };
        match shore_hit {
            Some(p) => {
                outer.push(p);
                is_shore.push(true);
            }
            None => {
                // Arc hit: |c + t d| = R.
                let b = c.dot(d);
                let t = -b + (b * b + r * r - c.norm_sq()).sqrt();
                outer.push(c + d * t);
                is_shore.push(false);
            }
        }
    }
    let tags: Vec<BoundaryTag> = (0..n)
        .map(|j| {
            if is_shore[j] && is_shore[(j + 1) % n] {
                BoundaryTag::Shore
            } else {
                spec.arc_tag
            }
        })
        .collect();
    annular_region(
        &outer,
        &tags,
        c,
        &HoleShape::Circle {
            radius: spec.obstacle_radius,
        },
        spec.n_radial,
        &RadialSpacing::FirstLayer(spec.first_layer),
    )
}

/// Rectangle with a thin horizontal slab obstacle, for thickness-penalty
/// tests: outer [-ox, ox] x [-oy, oy], slab half-width `hw`, half-height
/// `hh` (thickness 2*hh).
pub fn rect_with_slab(
    ox: f64,
    oy: f64,
    hw: f64,
    hh: f64,
    n_outer_per_side: usize,
    n_radial: usize,
) -> Result<Mesh> {
    let n = n_outer_per_side;
    let mut outer = Vec::new();
    let corners = [
        Vec2::new(-ox, -oy),
        Vec2::new(ox, -oy),
        Vec2::new(ox, oy),
        Vec2::new(-ox, oy),
    ];
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        for i in 0..n {
            outer.push(a + (b - a) * (i as f64 / n as f64));
        }
    }
    let tags = vec![BoundaryTag::Shore; outer.len()];
    annular_region(
        &outer,
        &tags,
        Vec2::ZERO,
        &HoleShape::Rect { hw, hh },
        n_radial,
        &RadialSpacing::Geometric(1.0),
    )
}
