//! Viscous shallow-water forward problem: parameters, bathymetry, the
//! SIPG-DG spatial residual, and explicit time marching with stored
//! trajectories.

pub mod flux;
mod residual;
mod solver;

pub use residual::{shock_viscosity, SpatialDisc};
pub use solver::{solve_forward, stable_dt, total_energy, total_mass};

use crate::dg::DGField;
use crate::mesh::Mesh;
use crate::Vec2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    Llf,
    Hlle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    ForwardEuler,
    SspRk2,
}

/// Modal-decay shock sensor configuration: the viscosity ramps from 0 to
/// `eps_v_max` as the sensor crosses `s0 +- kappa`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShockSensor {
    pub s0: f64,
    pub kappa: f64,
    pub eps_v_max: f64,
}

impl Default for ShockSensor {
    fn default() -> Self {
        ShockSensor {
            s0: -2.0,
            kappa: 1.0,
            eps_v_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SWEParams {
    /// Gravitational acceleration.
    pub g: f64,
    /// Chezy/Manning roughness coefficient.
    pub c_f: f64,
    /// Fixed momentum diffusivities (eps_f1, eps_f2).
    pub eps_f: [f64; 2],
    /// Interior-penalty constant of the SIPG viscous discretization.
    pub c_ip: f64,
    /// Courant number for the adaptive step.
    pub cfl: f64,
    pub flux: FluxKind,
    pub scheme: TimeScheme,
    /// Hydrostatic reconstruction of interface heights before flux
    /// evaluation (flux balancing for non-flat beds).
    pub well_balanced: bool,
    pub shock_sensor: ShockSensor,
    /// Hard positivity guard; crossing it aborts the run.
    pub h_min: f64,
    /// Inert compatibility keys: tolerances of the implicit solver variant.
    pub newton_abs_tol: f64,
    pub newton_rel_tol: f64,
}

impl Default for SWEParams {
    fn default() -> Self {
        SWEParams {
            g: 9.81,
            c_f: 0.049,
            eps_f: [0.01, 0.01],
            c_ip: 20.0,
            cfl: 0.12,
            flux: FluxKind::Hlle,
            scheme: TimeScheme::SspRk2,
            well_balanced: true,
            shock_sensor: ShockSensor::default(),
            h_min: 1e-8,
            newton_abs_tol: 1e-6,
            newton_rel_tol: 1e-5,
        }
    }
}

impl SWEParams {
    pub fn validate(&self) -> crate::Result<()> {
        let check = |ok: bool, key: &str, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(crate::Error::Config {
                    key: format!("swe.{key}"),
                    msg: msg.into(),
                })
            }
        };
        check(self.g > 0.0, "g", "gravitational acceleration must be positive")?;
        check(self.c_f >= 0.0, "c_f", "roughness must be non-negative")?;
        check(
            self.eps_f[0] >= 0.0 && self.eps_f[1] >= 0.0,
            "eps_f",
            "diffusivities must be non-negative",
        )?;
        check(self.c_ip > 0.0, "c_ip", "penalty constant must be positive")?;
        check(
            self.cfl > 0.0 && self.cfl <= 1.0,
            "cfl",
            "Courant number must lie in (0, 1]",
        )?;
        check(
            self.shock_sensor.eps_v_max >= 0.0 && self.shock_sensor.kappa > 0.0,
            "shock_sensor",
            "eps_v_max must be non-negative and kappa positive",
        )
    }
}

/// Bed elevation as a continuous piecewise-linear vertex field. Vertex values
/// ride along with mesh deformations.
#[derive(Debug, Clone)]
pub struct Bathymetry {
    pub vertex_z: Vec<f64>,
}

impl Bathymetry {
    pub fn flat(mesh: &Mesh, z: f64) -> Self {
        Bathymetry {
            vertex_z: vec![z; mesh.num_vertices()],
        }
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Vec2) -> f64) -> Self {
        Bathymetry {
            vertex_z: mesh.vertices().iter().map(|&v| f(v)).collect(),
        }
    }

    /// Value at a barycentric point of a cell.
    #[inline]
    pub fn at(&self, mesh: &Mesh, cell: usize, lambda: [f64; 3]) -> f64 {
        let tri = mesh.triangles()[cell];
        lambda[0] * self.vertex_z[tri[0]]
            + lambda[1] * self.vertex_z[tri[1]]
            + lambda[2] * self.vertex_z[tri[2]]
    }

    /// Constant gradient on a cell.
    pub fn grad(&self, mesh: &Mesh, cell: usize) -> Vec2 {
        let tri = mesh.triangles()[cell];
        let grads = mesh.p1_gradients(cell);
        let mut g = Vec2::ZERO;
        for k in 0..3 {
            g += grads[k] * self.vertex_z[tri[k]];
        }
        g
    }

    pub fn is_finite(&self) -> bool {
        self.vertex_z.iter().all(|z| z.is_finite())
    }
}

/// Forward solution: all time levels plus the per-step shock viscosities.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DGField>,
    /// Per-cell artificial viscosity used during step n (length = steps).
    pub eps_v: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn num_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}
