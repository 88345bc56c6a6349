//! SIPG-DG spatial residual of the viscous shallow-water system. The weak
//! residual R(U) is assembled so that the semi-discrete system reads
//! M dU/dt = -R(U): volume fluxes, diffusion on the free surface and
//! discharges, bed/friction sources, approximate Riemann fluxes on interior
//! faces with optional hydrostatic reconstruction, interior-penalty terms
//! for the viscous fluxes, and tagged boundary closures.

use super::flux::{
    boundary_state, normal_flux, numerical_flux, physical_flux, source_term, State,
};
use super::{Bathymetry, SWEParams, ShockSensor};
use crate::dg::{DGField, ElementTables};
use crate::mesh::{FaceKind, Mesh};
use crate::{Error, Result, Vec2};
use rayon::prelude::*;

/// Pre-tabulated basis data on one side of a face at edge quadrature points.
struct FaceSide {
    phi: Vec<Vec<f64>>,
    grad: Vec<Vec<Vec2>>,
    lambda: Vec<[f64; 3]>,
}

struct FaceQuad {
    plus: FaceSide,
    minus: Option<FaceSide>,
}

/// Discretization context bound to one mesh configuration. Rebuilt whenever
/// the mesh deforms.
pub struct SpatialDisc<'a> {
    pub mesh: &'a Mesh,
    pub tables: &'a ElementTables,
    pub params: &'a SWEParams,
    pub bathy: &'a Bathymetry,
    /// Prescribed water height on the open-sea boundary.
    pub h1: f64,
    faces: Vec<FaceQuad>,
}

impl<'a> SpatialDisc<'a> {
    pub fn new(
        mesh: &'a Mesh,
        tables: &'a ElementTables,
        params: &'a SWEParams,
        bathy: &'a Bathymetry,
        h1: f64,
    ) -> Self {
        let faces = mesh
            .faces()
            .iter()
            .map(|face| {
                let a = mesh.vertices()[face.verts[0]];
                let b = mesh.vertices()[face.verts[1]];
                let side = |cell: usize| {
                    let mut phi = Vec::new();
                    let mut grad = Vec::new();
                    let mut lambda = Vec::new();
                    let ji = &mesh.geometry().jac_inv[cell];
                    for &tq in &tables.edge_rule.points {
                        let x = a + (b - a) * tq;
                        let (xi, eta) = mesh.phys_to_ref(cell, x);
                        phi.push(tables.basis.eval(xi, eta));
                        grad.push(
                            tables
                                .basis
                                .grad(xi, eta)
                                .into_iter()
                                .map(|(gx, gy)| {
                                    Vec2::new(
                                        ji[0][0] * gx + ji[1][0] * gy,
                                        ji[0][1] * gx + ji[1][1] * gy,
                                    )
                                })
                                .collect(),
                        );
                        lambda.push([1.0 - xi - eta, xi, eta]);
                    }
                    FaceSide { phi, grad, lambda }
                };
                FaceQuad {
                    plus: side(face.plus),
                    minus: match face.kind {
                        FaceKind::Interior { minus, .. } => Some(side(minus)),
                        FaceKind::Boundary { .. } => None,
                    },
                }
            })
            .collect();
        SpatialDisc {
            mesh,
            tables,
            params,
            bathy,
            h1,
            faces,
        }
    }

    /// Evaluate state components at given basis values.
    #[inline]
    fn eval_state(u: &DGField, cell: usize, phi: &[f64]) -> State {
        [
            u.eval_with(cell, 0, phi),
            u.eval_with(cell, 1, phi),
            u.eval_with(cell, 2, phi),
        ]
    }

    /// Gradients of the free-surface triple (H+z, Q1, Q2) from coefficients
    /// and tabulated basis gradients.
    #[inline]
    fn eval_uhat_grads(
        &self,
        u: &DGField,
        cell: usize,
        grads: &[Vec2],
        grad_z: Vec2,
    ) -> [Vec2; 3] {
        let mut out = [grad_z, Vec2::ZERO, Vec2::ZERO];
        for c in 0..3 {
            let coeffs = u.coeffs(cell, c);
            let mut g = Vec2::ZERO;
            for (ci, gi) in coeffs.iter().zip(grads) {
                g += *gi * *ci;
            }
            out[c] += g;
        }
        out
    }

    /// Weak spatial residual; `M dU/dt = -residual`.
    pub fn residual(&self, u: &DGField, eps_v: &[f64], t: f64) -> Result<DGField> {
        let mesh = self.mesh;
        let tables = self.tables;
        let params = self.params;
        let nd = tables.ndof;
        let ncells = mesh.num_cells();

        // Volume terms, cell-parallel.
        let cell_blocks: Vec<Vec<f64>> = (0..ncells)
            .into_par_iter()
            .map(|cell| -> Result<Vec<f64>> {
                let mut block = vec![0.0; 3 * nd];
                let area2 = 2.0 * mesh.geometry().areas[cell];
                let ji = &mesh.geometry().jac_inv[cell];
                let grad_z = self.bathy.grad(mesh, cell);
                let g_diag = [eps_v[cell], params.eps_f[0], params.eps_f[1]];
                let mut phys_grads = vec![Vec2::ZERO; nd];
                for (q, &wq) in tables.vol_rule.weights.iter().enumerate() {
                    let phi = &tables.vol_phi[q];
                    for (i, g) in phys_grads.iter_mut().enumerate() {
                        let (gx, gy) = tables.vol_grad_ref[q][i];
                        *g = Vec2::new(
                            ji[0][0] * gx + ji[1][0] * gy,
                            ji[0][1] * gx + ji[1][1] * gy,
                        );
                    }
                    let state = Self::eval_state(u, cell, phi);
                    if state[0] <= 0.0 {
                        return Err(Error::DryState {
                            cell,
                            t,
                            h_min: 0.0,
                        });
                    }
                    let f = physical_flux(state, params.g);
                    let s = source_term(state, grad_z, params);
                    let uhat_grads = self.eval_uhat_grads(u, cell, &phys_grads, grad_z);
                    let w = wq * area2;
                    for c in 0..3 {
                        for i in 0..nd {
                            let gp = phys_grads[i];
                            block[c * nd + i] += w
                                * (-(f[c][0] * gp.x + f[c][1] * gp.y)
                                    + g_diag[c] * uhat_grads[c].dot(gp)
                                    - s[c] * phi[i]);
                        }
                    }
                }
                Ok(block)
            })
            .collect::<Result<Vec<_>>>()?;

        // Face terms, face-parallel with sequential scatter. Every flux is
        // evaluated once per face so interior contributions cancel exactly
        // in conservation sums.
        let delta_p2 = params.c_ip * (tables.p * tables.p) as f64;
        let face_blocks: Vec<(Vec<f64>, Option<Vec<f64>>)> = mesh
            .faces()
            .par_iter()
            .zip(&self.faces)
            .map(|(face, fq)| -> Result<(Vec<f64>, Option<Vec<f64>>)> {
                let n = face.normal;
                let len = face.length;
                let mut plus_block = vec![0.0; 3 * nd];
                match face.kind {
                    FaceKind::Interior { minus, .. } => {
                        let mut minus_block = vec![0.0; 3 * nd];
                        let fq_minus = fq.minus.as_ref().unwrap();
                        let gp = [eps_v[face.plus], params.eps_f[0], params.eps_f[1]];
                        let gm = [eps_v[minus], params.eps_f[0], params.eps_f[1]];
                        let pen = delta_p2 / face.penalty_h;
                        for (q, &wq) in tables.edge_rule.weights.iter().enumerate() {
                            let w = wq * len;
                            let phi_p = &fq.plus.phi[q];
                            let phi_m = &fq_minus.phi[q];
                            let up = Self::eval_state(u, face.plus, phi_p);
                            let um = Self::eval_state(u, minus, phi_m);
                            if up[0] <= 0.0 || um[0] <= 0.0 {
                                return Err(Error::DryState {
                                    cell: face.plus,
                                    t,
                                    h_min: 0.0,
                                });
                            }
                            let zp = self.bathy.at(mesh, face.plus, fq.plus.lambda[q]);
                            let zm = self.bathy.at(mesh, minus, fq_minus.lambda[q]);

                            // Advective flux with optional hydrostatic
                            // reconstruction of the interface heights.
                            let (flux_p, flux_m) = if params.well_balanced {
                                let z_star = zp.max(zm);
                                let hsp = (up[0] + zp - z_star).max(0.0);
                                let hsm = (um[0] + zm - z_star).max(0.0);
                                let usp = [hsp, hsp * up[1] / up[0], hsp * up[2] / up[0]];
                                let usm = [hsm, hsm * um[1] / um[0], hsm * um[2] / um[0]];
                                let hf = if hsp > 0.0 && hsm > 0.0 {
                                    numerical_flux(params.flux, usp, usm, n, params.g)
                                } else {
                                    // Fully reconstructed-dry interface:
                                    // pressure closure on each side below.
                                    [0.0, 0.0, 0.0]
                                };
                                let cp = 0.5 * params.g * (up[0] * up[0] - hsp * hsp);
                                let cm = 0.5 * params.g * (um[0] * um[0] - hsm * hsm);
                                (
                                    [hf[0], hf[1] + cp * n.x, hf[2] + cp * n.y],
                                    [hf[0], hf[1] + cm * n.x, hf[2] + cm * n.y],
                                )
                            } else {
                                let hf = numerical_flux(params.flux, up, um, n, params.g);
                                (hf, hf)
                            };

                            // Viscous SIPG terms on Uhat = (H+z, Q1, Q2).
                            let jump = [up[0] + zp - (um[0] + zm), up[1] - um[1], up[2] - um[2]];
                            let grad_zp = self.bathy.grad(mesh, face.plus);
                            let grad_zm = self.bathy.grad(mesh, minus);
                            let gup = self.eval_uhat_grads(u, face.plus, &fq.plus.grad[q], grad_zp);
                            let gum = self.eval_uhat_grads(u, minus, &fq_minus.grad[q], grad_zm);

                            for c in 0..3 {
                                let g_avg = 0.5 * (gp[c] + gm[c]);
                                let avg_flux = 0.5 * (gp[c] * gup[c].dot(n) + gm[c] * gum[c].dot(n));
                                let pen_c = pen * g_avg * jump[c];
                                for i in 0..nd {
                                    plus_block[c * nd + i] += w
                                        * ((flux_p[c] + pen_c - avg_flux) * phi_p[i]
                                            - 0.5 * gp[c] * fq.plus.grad[q][i].dot(n) * jump[c]);
                                    minus_block[c * nd + i] += w
                                        * ((-flux_m[c] - pen_c + avg_flux) * phi_m[i]
                                            - 0.5 * gm[c] * fq_minus.grad[q][i].dot(n) * jump[c]);
                                }
                            }
                        }
                        Ok((plus_block, Some(minus_block)))
                    }
                    FaceKind::Boundary { tag } => {
                        let wall = tag.is_rigid_wall();
                        let gp = [eps_v[face.plus], params.eps_f[0], params.eps_f[1]];
                        let pen = delta_p2 / face.penalty_h;
                        for (q, &wq) in tables.edge_rule.weights.iter().enumerate() {
                            let w = wq * len;
                            let phi_p = &fq.plus.phi[q];
                            let up = Self::eval_state(u, face.plus, phi_p);
                            if up[0] <= 0.0 {
                                return Err(Error::DryState {
                                    cell: face.plus,
                                    t,
                                    h_min: 0.0,
                                });
                            }
                            let ghost = boundary_state(up, n, wall, self.h1);
                            if ghost[0] <= 0.0 {
                                return Err(Error::Solver(format!(
                                    "non-positive prescribed boundary height {}",
                                    ghost[0]
                                )));
                            }
                            let f_in = normal_flux(up, n, params.g);
                            let f_gh = normal_flux(ghost, n, params.g);
                            let flux = [
                                0.5 * (f_in[0] + f_gh[0]),
                                0.5 * (f_in[1] + f_gh[1]),
                                0.5 * (f_in[2] + f_gh[2]),
                            ];

                            // Viscous closure: penalty and symmetrization act
                            // on the ghost jump of Uhat; the consistency flux
                            // uses the Neumann data (zero) except in the
                            // Dirichlet height channel on the open sea.
                            let grad_zp = self.bathy.grad(mesh, face.plus);
                            let gup = self.eval_uhat_grads(u, face.plus, &fq.plus.grad[q], grad_zp);
                            let jump = if wall {
                                [0.0, up[1] - ghost[1], up[2] - ghost[2]]
                            } else {
                                [up[0] - ghost[0], 0.0, 0.0]
                            };
                            for c in 0..3 {
                                let pen_c = pen * gp[c] * jump[c];
                                let consistency = if !wall && c == 0 {
                                    gp[c] * gup[c].dot(n)
                                } else {
                                    0.0
                                };
                                for i in 0..nd {
                                    plus_block[c * nd + i] += w
                                        * ((flux[c] + pen_c - consistency) * phi_p[i]
                                            - gp[c] * fq.plus.grad[q][i].dot(n) * jump[c]);
                                }
                            }
                        }
                        Ok((plus_block, None))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut res = DGField::zeros(u.p, 3, ncells);
        for (cell, block) in cell_blocks.iter().enumerate() {
            for c in 0..3 {
                let out = res.coeffs_mut(cell, c);
                for i in 0..nd {
                    out[i] += block[c * nd + i];
                }
            }
        }
        for (face, (plus_block, minus_block)) in mesh.faces().iter().zip(&face_blocks) {
            for c in 0..3 {
                let out = res.coeffs_mut(face.plus, c);
                for i in 0..nd {
                    out[i] += plus_block[c * nd + i];
                }
            }
            if let (FaceKind::Interior { minus, .. }, Some(mb)) = (face.kind, minus_block) {
                for c in 0..3 {
                    let out = res.coeffs_mut(minus, c);
                    for i in 0..nd {
                        out[i] += mb[c * nd + i];
                    }
                }
            }
        }
        Ok(res)
    }
}

/// Per-cell artificial viscosity from the modal-decay sensor on the height
/// component: s = log10(|u - mean|^2 / |u|^2) in the cell L2 norm, with a
/// sine ramp between s0 - kappa and s0 + kappa.
pub fn shock_viscosity(
    u: &DGField,
    tables: &ElementTables,
    sensor: &ShockSensor,
) -> Vec<f64> {
    let nd = tables.ndof;
    let mut out = vec![0.0; u.ncells];
    if sensor.eps_v_max == 0.0 {
        return out;
    }
    for cell in 0..u.ncells {
        let coeffs = u.coeffs(cell, 0);
        // Cell mean via the reference mass matrix (area factors cancel).
        let mut mass_c = vec![0.0; nd];
        for i in 0..nd {
            for j in 0..nd {
                mass_c[i] += tables.mass_ref[(i, j)] * coeffs[j];
            }
        }
        let integral: f64 = mass_c.iter().sum();
        let mean = integral / 0.5;
        let norm_sq: f64 = coeffs.iter().zip(&mass_c).map(|(c, mc)| c * mc).sum();
        let mut rem_sq = 0.0;
        for i in 0..nd {
            let ci = coeffs[i] - mean;
            for j in 0..nd {
                rem_sq += ci * tables.mass_ref[(i, j)] * (coeffs[j] - mean);
            }
        }
        if rem_sq <= 0.0 || norm_sq <= 0.0 {
            continue;
        }
        let s = (rem_sq / norm_sq).log10();
        let ramp_lo = sensor.s0 - sensor.kappa;
        let ramp_hi = sensor.s0 + sensor.kappa;
        out[cell] = if s < ramp_lo {
            0.0
        } else if s > ramp_hi {
            sensor.eps_v_max
        } else {
            0.5 * sensor.eps_v_max
                * (1.0 + (std::f64::consts::FRAC_PI_2 * (s - sensor.s0) / sensor.kappa).sin())
        };
    }
    out
}
