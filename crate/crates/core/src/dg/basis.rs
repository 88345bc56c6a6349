//! Nodal Lagrange basis of order `p` on the reference triangle with vertices
//! (0,0), (1,0), (0,1). Nodes are the barycentric lattice points; for p = 1
//! they coincide with the triangle vertices in order, which keeps vertex
//! traces and the DG-to-CG projection trivial.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct NodalBasis {
    pub p: usize,
    pub ndof: usize,
    /// Reference coordinates (xi, eta) of the Lagrange nodes.
    pub nodes: Vec<(f64, f64)>,
    /// Monomial exponents (a, b) for xi^a eta^b, graded order.
    monomials: Vec<(usize, usize)>,
    /// coeff[(m, j)]: basis_j(x) = sum_m coeff[(m, j)] xi^a_m eta^b_m.
    coeff: DMatrix<f64>,
}

pub fn ndof(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

impl NodalBasis {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1, "polynomial order must be at least 1");
        let n = ndof(p);
        let mut nodes = Vec::with_capacity(n);
        // Vertices first so that p = 1 matches triangle vertex order.
        nodes.push((0.0, 0.0));
        nodes.push((1.0, 0.0));
        nodes.push((0.0, 1.0));
        for j in 0..=p {
            for i in 0..=(p - j) {
                let node = (i as f64 / p as f64, j as f64 / p as f64);
                let is_vertex = (i == 0 && j == 0) || (i == p && j == 0) || (i == 0 && j == p);
                if !is_vertex {
                    nodes.push(node);
                }
            }
        }
        let mut monomials = Vec::with_capacity(n);
        for d in 0..=p {
            for a in (0..=d).rev() {
                monomials.push((a, d - a));
            }
        }
        let vander = DMatrix::from_fn(n, n, |i, m| {
            let (xi, eta) = nodes[i];
            let (a, b) = monomials[m];
            xi.powi(a as i32) * eta.powi(b as i32)
        });
        let coeff = vander
            .try_inverse()
            .expect("Lagrange lattice Vandermonde is invertible");
        NodalBasis {
            p,
            ndof: n,
            nodes,
            monomials,
            coeff,
        }
    }

    /// Values of all basis functions at a reference point.
    pub fn eval(&self, xi: f64, eta: f64) -> Vec<f64> {
        let mono: Vec<f64> = self
            .monomials
            .iter()
            .map(|&(a, b)| xi.powi(a as i32) * eta.powi(b as i32))
            .collect();
        (0..self.ndof)
            .map(|j| (0..self.ndof).map(|m| self.coeff[(m, j)] * mono[m]).sum())
            .collect()
    }

    /// Reference gradients (d/dxi, d/deta) of all basis functions.
    pub fn grad(&self, xi: f64, eta: f64) -> Vec<(f64, f64)> {
        let dmono: Vec<(f64, f64)> = self
            .monomials
            .iter()
            .map(|&(a, b)| {
                let dx = if a == 0 {
                    0.0
                } else {
                    a as f64 * xi.powi(a as i32 - 1) * eta.powi(b as i32)
                };
                let dy = if b == 0 {
                    0.0
                } else {
                    b as f64 * xi.powi(a as i32) * eta.powi(b as i32 - 1)
                };
                (dx, dy)
            })
            .collect();
        (0..self.ndof)
            .map(|j| {
                let mut g = (0.0, 0.0);
                for m in 0..self.ndof {
                    g.0 += self.coeff[(m, j)] * dmono[m].0;
                    g.1 += self.coeff[(m, j)] * dmono[m].1;
                }
                g
            })
            .collect()
    }
}
