//! Minimal sparse linear algebra: CSR storage, conjugate gradients for SPD
//! systems and BiCGStab for the nonsymmetric Eikonal iterations. Problem
//! sizes are desk scale (a few thousand unknowns), so Jacobi preconditioning
//! is enough.

use crate::{Error, Result};
use std::collections::BTreeMap;

/// Coordinate-format accumulator; duplicate entries are summed.
pub struct SparseBuilder {
    n: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SparseBuilder {
    pub fn new(n: usize) -> Self {
        SparseBuilder {
            n,
            rows: vec![BTreeMap::new(); n],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        *self.rows[i].entry(j).or_insert(0.0) += v;
    }

    /// Replace row `i` by the identity row (Dirichlet constraint).
    pub fn set_identity_row(&mut self, i: usize) {
        self.rows[i].clear();
        self.rows[i].insert(i, 1.0);
    }

    pub fn build(self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &self.rows {
            for (&j, &v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    /// Preconditioned conjugate gradients; the matrix must be SPD.
    pub fn solve_cg(&self, b: &[f64], rel_tol: f64, max_iters: usize) -> Result<Vec<f64>> {
        let n = self.n;
        let diag = self.diagonal();
        let precond = |r: &[f64], z: &mut [f64]| {
            for i in 0..n {
                z[i] = if diag[i] != 0.0 { r[i] / diag[i] } else { r[i] };
            }
        };

        let b_norm = norm(b);
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        precond(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];

        for _ in 0..max_iters {
            self.mul_vec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(Error::Solver(
                    "conjugate gradients hit a non-positive curvature direction".into(),
                ));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if norm(&r) <= rel_tol * b_norm {
                return Ok(x);
            }
            precond(&r, &mut z);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Solver(format!(
            "conjugate gradients did not reach rel. residual {rel_tol:.1e} in {max_iters} iterations"
        )))
    }

    /// Jacobi-preconditioned BiCGStab for general square systems.
    pub fn solve_bicgstab(&self, b: &[f64], rel_tol: f64, max_iters: usize) -> Result<Vec<f64>> {
        let n = self.n;
        let diag = self.diagonal();
        let apply_pre = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                out[i] = if diag[i] != 0.0 { v[i] / diag[i] } else { v[i] };
            }
        };

        let b_norm = norm(b);
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let r0 = r.clone();
        let mut rho = 1.0;
        let mut alpha = 1.0;
        let mut omega = 1.0;
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut phat = vec![0.0; n];
        let mut shat = vec![0.0; n];
        let mut t = vec![0.0; n];

        for _ in 0..max_iters {
            let rho_next = dot(&r0, &r);
            if rho_next.abs() < 1e-300 {
                break;
            }
            let beta = (rho_next / rho) * (alpha / omega);
            rho = rho_next;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            apply_pre(&p, &mut phat);
            self.mul_vec(&phat, &mut v);
            alpha = rho / dot(&r0, &v);
            let mut s = vec![0.0; n];
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) <= rel_tol * b_norm {
                for i in 0..n {
                    x[i] += alpha * phat[i];
                }
                return Ok(x);
            }
            apply_pre(&s, &mut shat);
            self.mul_vec(&shat, &mut t);
            let tt = dot(&t, &t);
            if tt == 0.0 {
                break;
            }
            omega = dot(&t, &s) / tt;
            for i in 0..n {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) <= rel_tol * b_norm {
                return Ok(x);
            }
            if omega.abs() < 1e-300 {
                break;
            }
        }
        Err(Error::Solver(format!(
            "BiCGStab did not reach rel. residual {rel_tol:.1e} in {max_iters} iterations"
        )))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        // Gaussian elimination with partial pivoting, test oracle only.
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            m.swap(k, piv);
            rhs.swap(k, piv);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in i + 1..n {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        x
    }

    fn laplacian_1d(n: usize) -> (CsrMatrix, Vec<Vec<f64>>) {
        let mut builder = SparseBuilder::new(n);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            builder.add(i, i, 2.0);
            dense[i][i] = 2.0;
            if i > 0 {
                builder.add(i, i - 1, -1.0);
                dense[i][i - 1] = -1.0;
            }
            if i + 1 < n {
                builder.add(i, i + 1, -1.0);
                dense[i][i + 1] = -1.0;
            }
        }
        (builder.build(), dense)
    }

    #[test]
    fn cg_matches_dense_oracle() {
        let n = 40;
        let (csr, dense) = laplacian_1d(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = csr.solve_cg(&b, 1e-12, 10_000).unwrap();
        let x_ref = dense_solve(&dense, &b);
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() < 1e-8, "entry {i}");
        }
    }

    #[test]
    fn bicgstab_handles_nonsymmetric() {
        let n = 30;
        let mut builder = SparseBuilder::new(n);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            let entries = [
                (i, 3.0 + 0.1 * i as f64),
                ((i + 1) % n, -1.2),
                ((i + 7) % n, 0.3),
            ];
            for (j, v) in entries {
                builder.add(i, j, v);
                dense[i][j] += v;
            }
        }
        let csr = builder.build();
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).cos()).collect();
        let x = csr.solve_bicgstab(&b, 1e-12, 10_000).unwrap();
        let x_ref = dense_solve(&dense, &b);
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() < 1e-7, "entry {i}");
        }
    }

    #[test]
    fn identity_row_pins_value() {
        let mut builder = SparseBuilder::new(3);
        builder.add(0, 0, 4.0);
        builder.add(1, 1, 4.0);
        builder.add(2, 2, 4.0);
        builder.add(0, 1, 1.0);
        builder.add(1, 0, 1.0);
        builder.set_identity_row(2);
        let m = builder.build();
        let x = m.solve_cg(&[1.0, 2.0, 5.0], 1e-14, 100).unwrap();
        assert!((x[2] - 5.0).abs() < 1e-12);
    }
}
