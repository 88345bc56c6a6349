//! Broken polynomial spaces on triangulations: nodal DG fields, reference
//! tables shared by all assembly loops, block-diagonal mass operators, L2
//! projection, and averaging onto continuous linears.

pub mod basis;
pub mod quadrature;

pub use basis::{ndof, NodalBasis};
pub use quadrature::{EdgeRule, TriangleRule};

use crate::mesh::Mesh;
use crate::{Error, Result, Vec2};
use nalgebra::DMatrix;

/// Per-cell coefficients of a vector-valued broken polynomial field.
/// Layout: `data[(cell * ncomp + comp) * ndof + dof]`; for p = 1 the dofs
/// are the values at the cell's three vertices in order.
#[derive(Debug, Clone)]
pub struct DGField {
    pub p: usize,
    pub ncomp: usize,
    pub ndof: usize,
    pub ncells: usize,
    pub data: Vec<f64>,
}

impl DGField {
    pub fn zeros(p: usize, ncomp: usize, ncells: usize) -> Self {
        let nd = ndof(p);
        DGField {
            p,
            ncomp,
            ndof: nd,
            ncells,
            data: vec![0.0; ncells * ncomp * nd],
        }
    }

    #[inline]
    pub fn coeffs(&self, cell: usize, comp: usize) -> &[f64] {
        let base = (cell * self.ncomp + comp) * self.ndof;
        &self.data[base..base + self.ndof]
    }

    #[inline]
    pub fn coeffs_mut(&mut self, cell: usize, comp: usize) -> &mut [f64] {
        let base = (cell * self.ncomp + comp) * self.ndof;
        &mut self.data[base..base + self.ndof]
    }

    /// Value of one component at given basis values (dot with coefficients).
    #[inline]
    pub fn eval_with(&self, cell: usize, comp: usize, phi: &[f64]) -> f64 {
        self.coeffs(cell, comp)
            .iter()
            .zip(phi)
            .map(|(c, p)| c * p)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn axpy(&mut self, alpha: f64, other: &DGField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }
}

/// Reference-element tables shared by assembly: basis values and gradients at
/// volume quadrature points, the inverse reference mass matrix, and an edge
/// rule. Volume rule degree 2p+2, edge rule degree 2p+3.
pub struct ElementTables {
    pub p: usize,
    pub ndof: usize,
    pub basis: NodalBasis,
    pub vol_rule: TriangleRule,
    /// phi[q][i]: basis i at volume point q.
    pub vol_phi: Vec<Vec<f64>>,
    /// grad_ref[q][i]: reference gradient of basis i at volume point q.
    pub vol_grad_ref: Vec<Vec<(f64, f64)>>,
    pub edge_rule: EdgeRule,
    /// Inverse of the reference mass matrix (mass on the unit triangle).
    pub mass_ref_inv: DMatrix<f64>,
    pub mass_ref: DMatrix<f64>,
}

impl ElementTables {
    pub fn new(p: usize) -> Self {
        let basis = NodalBasis::new(p);
        let vol_rule = TriangleRule::with_degree(2 * p + 2);
        let vol_phi: Vec<Vec<f64>> = vol_rule
            .points
            .iter()
            .map(|l| basis.eval(l[1], l[2]))
            .collect();
        let vol_grad_ref: Vec<Vec<(f64, f64)>> = vol_rule
            .points
            .iter()
            .map(|l| basis.grad(l[1], l[2]))
            .collect();
        let n = basis.ndof;
        let mut mass = DMatrix::zeros(n, n);
        for (q, w) in vol_rule.weights.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    mass[(i, j)] += w * vol_phi[q][i] * vol_phi[q][j];
                }
            }
        }
        let mass_ref_inv = mass
            .clone()
            .try_inverse()
            .expect("reference mass matrix is SPD");
        ElementTables {
            p,
            ndof: n,
            basis,
            vol_rule,
            vol_phi,
            vol_grad_ref,
            edge_rule: EdgeRule::with_degree(2 * p + 3),
            mass_ref_inv,
            mass_ref: mass,
        }
    }

    /// Physical gradient of basis i at volume point q on `cell`.
    #[inline]
    pub fn phys_grad(&self, mesh: &Mesh, cell: usize, q: usize, i: usize) -> Vec2 {
        let ji = &mesh.geometry().jac_inv[cell];
        let (gx, gy) = self.vol_grad_ref[q][i];
        Vec2::new(ji[0][0] * gx + ji[1][0] * gy, ji[0][1] * gx + ji[1][1] * gy)
    }
}

/// L2-project a pointwise function onto the broken space of order `p`.
/// Uses a quadrature two degrees above the mass rule so smooth data is
/// projected accurately; exact for polynomial data of degree <= p.
pub fn project(
    mesh: &Mesh,
    p: usize,
    ncomp: usize,
    f: impl Fn(Vec2) -> Vec<f64>,
) -> DGField {
    let tables = ElementTables::new(p);
    project_with(&tables, mesh, ncomp, f)
}

pub fn project_with(
    tables: &ElementTables,
    mesh: &Mesh,
    ncomp: usize,
    f: impl Fn(Vec2) -> Vec<f64>,
) -> DGField {
    let n = tables.ndof;
    // A finer rule than the assembly one: projection of smooth initial data
    // should resolve cell means well below solver tolerances.
    let rule = TriangleRule::with_degree(2 * tables.p + 8);
    let phi_at: Vec<Vec<f64>> = rule
        .points
        .iter()
        .map(|l| tables.basis.eval(l[1], l[2]))
        .collect();
    let mut field = DGField::zeros(tables.p, ncomp, mesh.num_cells());
    let mut rhs = vec![0.0; ncomp * n];
    for cell in 0..mesh.num_cells() {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for (q, w) in rule.weights.iter().enumerate() {
            let l = rule.points[q];
            let x = mesh.ref_to_phys(cell, l[1], l[2]);
            let vals = f(x);
            debug_assert_eq!(vals.len(), ncomp);
            for c in 0..ncomp {
                for i in 0..n {
                    rhs[c * n + i] += w * vals[c] * phi_at[q][i];
                }
            }
        }
        // Mass scales with |det J| = 2 A; the quadrature weights above carry
        // the reference measure, so the Jacobians cancel in M^{-1} b.
        for c in 0..ncomp {
            let coeffs = field.coeffs_mut(cell, c);
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += tables.mass_ref_inv[(i, j)] * rhs[c * n + j];
                }
                coeffs[i] = s;
            }
        }
    }
    field
}

/// Apply the inverse block-diagonal mass operator to a residual field:
/// `rate = M^{-1} residual` cell by cell.
pub fn apply_inverse_mass(
    tables: &ElementTables,
    mesh: &Mesh,
    residual: &DGField,
) -> Result<DGField> {
    let n = tables.ndof;
    let mut out = DGField::zeros(residual.p, residual.ncomp, residual.ncells);
    for cell in 0..residual.ncells {
        let det = 2.0 * mesh.geometry().areas[cell];
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::Solver(format!(
                "degenerate cell {cell} in mass solve (area {:.3e})",
                det / 2.0
            )));
        }
        for c in 0..residual.ncomp {
            let res = residual.coeffs(cell, c);
            let mut tmp = vec![0.0; n];
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += tables.mass_ref_inv[(i, j)] * res[j];
                }
                tmp[i] = s / det;
            }
            out.coeffs_mut(cell, c).copy_from_slice(&tmp);
        }
    }
    Ok(out)
}

/// Project a broken p = 1 field onto continuous linears by area-weighted
/// averaging of the incident cell traces at every vertex.
pub fn dg_to_cg(mesh: &Mesh, field: &DGField) -> Vec<Vec<f64>> {
    assert_eq!(field.p, 1, "vertex averaging requires p = 1 nodal fields");
    let nv = mesh.num_vertices();
    let mut out = vec![vec![0.0; nv]; field.ncomp];
    for v in 0..nv {
        let cells = mesh.cells_of_vertex(v);
        let mut wsum = 0.0;
        let mut acc = vec![0.0; field.ncomp];
        for &cell in cells {
            let area = mesh.geometry().areas[cell].abs();
            let local = mesh.triangles()[cell]
                .iter()
                .position(|&w| w == v)
                .expect("vertex incident to cell");
            wsum += area;
            for c in 0..field.ncomp {
                acc[c] += area * field.coeffs(cell, c)[local];
            }
        }
        for c in 0..field.ncomp {
            out[c][v] = acc[c] / wsum;
        }
    }
    out
}

/// Interpolate vertex values as a broken p = 1 field (inverse of a continuous
/// `dg_to_cg`, used for bathymetry and CG-projected states).
pub fn vertex_to_dg(mesh: &Mesh, comps: &[Vec<f64>]) -> DGField {
    let mut field = DGField::zeros(1, comps.len(), mesh.num_cells());
    for (cell, tri) in mesh.triangles().iter().enumerate() {
        for (c, comp) in comps.iter().enumerate() {
            let coeffs = field.coeffs_mut(cell, c);
            for k in 0..3 {
                coeffs[k] = comp[tri[k]];
            }
        }
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::synthetic;

    #[test]
    fn project_constant_is_exact() {
        let mesh = synthetic::unit_square(3).unwrap();
        let f = project(&mesh, 1, 1, |_| vec![1.0]);
        for c in f.data.iter() {
            assert!((c - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn project_affine_is_exact_p1() {
        let mesh = synthetic::unit_square(4).unwrap();
        let f = project(&mesh, 1, 1, |x| vec![0.7 + 1.3 * x.x - 2.1 * x.y]);
        let tables = ElementTables::new(1);
        for cell in 0..mesh.num_cells() {
            for (q, l) in tables.vol_rule.points.iter().enumerate() {
                let x = mesh.ref_to_phys(cell, l[1], l[2]);
                let exact = 0.7 + 1.3 * x.x - 2.1 * x.y;
                let num = f.eval_with(cell, 0, &tables.vol_phi[q]);
                assert!((num - exact).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn project_gaussian_cell_means_match_quadrature_oracle() {
        let mesh = synthetic::unit_square(5).unwrap();
        let g = |x: Vec2| 1.0 + (-15.0 * x.x * x.x - 15.0 * (x.y - 1.0) * (x.y - 1.0)).exp();
        let f = project(&mesh, 1, 1, |x| vec![g(x)]);
        // Independent high-order quadrature for the exact cell means.
        let oracle = TriangleRule::with_degree(12);
        let tables = ElementTables::new(1);
        for cell in 0..mesh.num_cells() {
            let mut exact_mean = 0.0;
            for (l, w) in oracle.points.iter().zip(&oracle.weights) {
                exact_mean += w * g(mesh.ref_to_phys(cell, l[1], l[2]));
            }
            exact_mean /= 0.5;
            // Mean of the projection = mean of the data (test fn phi = 1).
            let mut proj_mean = 0.0;
            for (q, w) in tables.vol_rule.weights.iter().enumerate() {
                proj_mean += w * f.eval_with(cell, 0, &tables.vol_phi[q]);
            }
            proj_mean /= 0.5;
            assert!(
                (proj_mean - exact_mean).abs() < 1e-10,
                "cell {cell}: {proj_mean} vs {exact_mean}"
            );
        }
    }

    #[test]
    fn inverse_mass_consistency() {
        let mesh = synthetic::unit_square(2).unwrap();
        let tables = ElementTables::new(1);
        // Build residual = M x for a known x, then recover x.
        let x = project(&mesh, 1, 2, |p| vec![p.x + 0.3, p.y * p.x - 1.0]);
        let mut residual = DGField::zeros(1, 2, mesh.num_cells());
        for cell in 0..mesh.num_cells() {
            let det = 2.0 * mesh.geometry().areas[cell];
            for c in 0..2 {
                let xs = x.coeffs(cell, c);
                let mut m_x = vec![0.0; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        m_x[i] += det * tables.mass_ref[(i, j)] * xs[j];
                    }
                }
                residual.coeffs_mut(cell, c).copy_from_slice(&m_x);
            }
        }
        let recovered = apply_inverse_mass(&tables, &mesh, &residual).unwrap();
        for (a, b) in recovered.data.iter().zip(&x.data) {
            assert!((a - b).abs() < 1e-12);
        }

        let zero = DGField::zeros(1, 2, mesh.num_cells());
        let rate = apply_inverse_mass(&tables, &mesh, &zero).unwrap();
        assert!(rate.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_mass_matches_dense_lu_oracle() {
        use nalgebra::DVector;
        let mesh = synthetic::unit_square(3).unwrap();
        for p in 1..=2 {
            let tables = ElementTables::new(p);
            let n = tables.ndof;
            let cell = 4;
            let det = 2.0 * mesh.geometry().areas[cell];
            let res: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) as f64 * 0.137).sin()).collect();
            let mut field = DGField::zeros(p, 1, mesh.num_cells());
            field.coeffs_mut(cell, 0).copy_from_slice(&res);
            let rate = apply_inverse_mass(&tables, &mesh, &field).unwrap();

            let mass_phys = tables.mass_ref.clone() * det;
            let lu = mass_phys.lu();
            let sol = lu.solve(&DVector::from_column_slice(&res)).unwrap();
            for i in 0..n {
                assert!(
                    (rate.coeffs(cell, 0)[i] - sol[i]).abs() < 1e-12,
                    "p={p} dof {i}"
                );
            }
        }
    }

    #[test]
    fn mass_blocks_are_spd() {
        for p in 1..=3 {
            let tables = ElementTables::new(p);
            let sym = (tables.mass_ref.clone() - tables.mass_ref.transpose()).abs().max();
            assert!(sym < 1e-15);
            let eig = tables.mass_ref.clone().symmetric_eigen();
            assert!(eig.eigenvalues.iter().all(|&l| l > 0.0), "p={p}");
        }
    }

    #[test]
    fn dg_to_cg_preserves_linear_fields() {
        let mesh = synthetic::unit_square(3).unwrap();
        let f = project(&mesh, 1, 1, |x| vec![2.0 * x.x - x.y + 0.25]);
        let cg = dg_to_cg(&mesh, &f);
        for (v, &pos) in mesh.vertices().iter().enumerate() {
            let exact = 2.0 * pos.x - pos.y + 0.25;
            assert!((cg[0][v] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn dg_to_cg_averages_equal_area_neighbours() {
        // Two triangles sharing the diagonal, values 0 and 2.
        let mesh = crate::mesh::synthetic::unit_square(1).unwrap();
        let mut f = DGField::zeros(1, 1, 2);
        f.coeffs_mut(0, 0).copy_from_slice(&[0.0, 0.0, 0.0]);
        f.coeffs_mut(1, 0).copy_from_slice(&[2.0, 2.0, 2.0]);
        let cg = dg_to_cg(&mesh, &f);
        // Vertices on the shared diagonal see both cells.
        let tris = mesh.triangles();
        let shared: Vec<usize> = (0..mesh.num_vertices())
            .filter(|&v| tris[0].contains(&v) && tris[1].contains(&v))
            .collect();
        for v in shared {
            assert!((cg[0][v] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dg_to_cg_stays_within_incident_trace_range() {
        use rand::prelude::*;
        let mesh = synthetic::unit_square(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut f = DGField::zeros(1, 1, mesh.num_cells());
        for v in f.data.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let cg = dg_to_cg(&mesh, &f);
        for v in 0..mesh.num_vertices() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &cell in mesh.cells_of_vertex(v) {
                let local = mesh.triangles()[cell].iter().position(|&w| w == v).unwrap();
                let trace = f.coeffs(cell, 0)[local];
                lo = lo.min(trace);
                hi = hi.max(trace);
            }
            assert!(cg[0][v] >= lo - 1e-12 && cg[0][v] <= hi + 1e-12);
        }
    }
}
