//! Explicit time marching of the forward problem with CFL-adaptive steps and
//! full trajectory storage.

use super::flux::max_speed;
use super::{Bathymetry, SWEParams, SpatialDisc, TimeScheme, Trajectory};
use crate::dg::{apply_inverse_mass, DGField, ElementTables};
use crate::mesh::Mesh;
use crate::swe::residual::shock_viscosity;
use crate::{Error, Result};

/// CFL-limited step: cfl * min_i (h_i / max wave speed in cell i) with h_i
/// the cell diameter, capped by the explicit-diffusion bound of the
/// interior-penalty terms, by `dt_max`, and by the remaining time. The
/// diffusion bound uses the penalty length scale area/diameter, which is the
/// one entering the SIPG stiffness on graded meshes.
pub fn stable_dt(
    u: &DGField,
    mesh: &Mesh,
    params: &SWEParams,
    eps_v: &[f64],
    dt_max: f64,
    remaining: f64,
) -> f64 {
    let p2 = (u.p * u.p) as f64;
    let mut dt = dt_max;
    for cell in 0..mesh.num_cells() {
        let mut speed = 0.0_f64;
        for dof in 0..u.ndof {
            let state = [
                u.coeffs(cell, 0)[dof],
                u.coeffs(cell, 1)[dof],
                u.coeffs(cell, 2)[dof],
            ];
            if state[0] > 0.0 {
                speed = speed.max(max_speed(state, params.g));
            }
        }
        let h = mesh.geometry().diameters[cell];
        if speed > 0.0 {
            dt = dt.min(params.cfl * h / speed);
        }
        let eps = eps_v[cell].max(params.eps_f[0]).max(params.eps_f[1]);
        if eps > 0.0 {
            let h_pen = mesh.geometry().areas[cell] / h;
            dt = dt.min(params.cfl * h_pen * h_pen / (params.c_ip * p2 * eps));
        }
    }
    dt.min(remaining)
}

fn check_state(u: &DGField, params: &SWEParams, t: f64) -> Result<()> {
    for cell in 0..u.ncells {
        for dof in 0..u.ndof {
            let h = u.coeffs(cell, 0)[dof];
            if !h.is_finite()
                || !u.coeffs(cell, 1)[dof].is_finite()
                || !u.coeffs(cell, 2)[dof].is_finite()
            {
                return Err(Error::NotFinite {
                    context: format!("state in cell {cell}"),
                    t,
                });
            }
            if h < params.h_min {
                return Err(Error::DryState {
                    cell,
                    t,
                    h_min: params.h_min,
                });
            }
        }
    }
    Ok(())
}

/// March the forward problem from `u0` to `t_end`, storing every time level
/// (the adjoint replays the same step sequence in reverse).
pub fn solve_forward(
    mesh: &Mesh,
    tables: &ElementTables,
    params: &SWEParams,
    bathy: &Bathymetry,
    h1: f64,
    u0: &DGField,
    t_end: f64,
    dt_max: f64,
) -> Result<Trajectory> {
    let disc = SpatialDisc::new(mesh, tables, params, bathy, h1);
    let mut t = 0.0;
    let mut state = u0.clone();
    check_state(&state, params, t)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![state.clone()],
        eps_v: Vec::new(),
    };
    let max_steps = 50_000_000 / mesh.num_cells().max(1);
    let mut steps = 0usize;
    while t < t_end - 1e-14 {
        steps += 1;
        if steps > max_steps {
            return Err(Error::Solver(format!(
                "step budget exhausted at t = {t:.6} (dt collapse?)"
            )));
        }
        let eps_v = shock_viscosity(&state, tables, &params.shock_sensor);
        let dt = stable_dt(&state, mesh, params, &eps_v, dt_max, t_end - t);
        if !(dt > 0.0) {
            return Err(Error::Solver(format!("non-positive time step at t = {t}")));
        }
        let rate = |u: &DGField, tq: f64| -> Result<DGField> {
            let r = disc.residual(u, &eps_v, tq)?;
            let mut rate = apply_inverse_mass(tables, mesh, &r)?;
            rate.scale(-1.0);
            Ok(rate)
        };
        let next = match params.scheme {
            TimeScheme::ForwardEuler => {
                let k1 = rate(&state, t)?;
                let mut next = state.clone();
                next.axpy(dt, &k1);
                next
            }
            TimeScheme::SspRk2 => {
                let k1 = rate(&state, t)?;
                let mut u1 = state.clone();
                u1.axpy(dt, &k1);
                check_state(&u1, params, t)?;
                let k2 = rate(&u1, t + dt)?;
                // u_{n+1} = (u_n + u1 + dt k2) / 2
                let mut next = state.clone();
                next.axpy(1.0, &u1);
                next.axpy(dt, &k2);
                next.scale(0.5);
                next
            }
        };
        t += dt;
        check_state(&next, params, t)?;
        state = next;
        traj.times.push(t);
        traj.states.push(state.clone());
        traj.eps_v.push(eps_v);
    }
    Ok(traj)
}

/// Integral of the water height over the domain.
pub fn total_mass(mesh: &Mesh, tables: &ElementTables, u: &DGField) -> f64 {
    let mut mass = 0.0;
    for cell in 0..mesh.num_cells() {
        let area2 = 2.0 * mesh.geometry().areas[cell];
        for (q, &w) in tables.vol_rule.weights.iter().enumerate() {
            mass += w * area2 * u.eval_with(cell, 0, &tables.vol_phi[q]);
        }
    }
    mass
}

/// Total mechanical energy: kinetic + potential (including bed elevation).
pub fn total_energy(mesh: &Mesh, tables: &ElementTables, u: &DGField, bathy: &Bathymetry, g: f64) -> f64 {
    let mut energy = 0.0;
    for cell in 0..mesh.num_cells() {
        let area2 = 2.0 * mesh.geometry().areas[cell];
        for (q, &w) in tables.vol_rule.weights.iter().enumerate() {
            let phi = &tables.vol_phi[q];
            let h = u.eval_with(cell, 0, phi);
            let q1 = u.eval_with(cell, 1, phi);
            let q2 = u.eval_with(cell, 2, phi);
            let z = bathy.at(mesh, cell, tables.vol_rule.points[q]);
            energy += w * area2 * (0.5 * (q1 * q1 + q2 * q2) / h + 0.5 * g * h * h + g * h * z);
        }
    }
    energy
}
