//! Pointwise shallow-water algebra: physical flux, Jacobians and their state
//! derivatives, wave speeds, approximate Riemann solvers, boundary ghost
//! states, and the bed/friction source term.

use super::{FluxKind, SWEParams};
use crate::Vec2;

/// Conserved state (H, Q1, Q2) = (height, x-discharge, y-discharge).
pub type State = [f64; 3];

/// Flux matrix F(U): rows are components, columns the x/y directions.
pub fn physical_flux(u: State, g: f64) -> [[f64; 2]; 3] {
    let [h, q1, q2] = u;
    debug_assert!(h > 0.0);
    let p = 0.5 * g * h * h;
    [
        [q1, q2],
        [q1 * q1 / h + p, q1 * q2 / h],
        [q1 * q2 / h, q2 * q2 / h + p],
    ]
}

/// Normal projection F(U) . n.
pub fn normal_flux(u: State, n: Vec2, g: f64) -> State {
    let f = physical_flux(u, g);
    [
        f[0][0] * n.x + f[0][1] * n.y,
        f[1][0] * n.x + f[1][1] * n.y,
        f[2][0] * n.x + f[2][1] * n.y,
    ]
}

/// Flux Jacobians (dF1/dU, dF2/dU).
pub fn flux_jacobians(u: State, g: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let [h, q1, q2] = u;
    let j1 = [
        [0.0, 1.0, 0.0],
        [-q1 * q1 / (h * h) + g * h, 2.0 * q1 / h, 0.0],
        [-q1 * q2 / (h * h), q2 / h, q1 / h],
    ];
    let j2 = [
        [0.0, 0.0, 1.0],
        [-q1 * q2 / (h * h), q2 / h, q1 / h],
        [-q2 * q2 / (h * h) + g * h, 0.0, 2.0 * q2 / h],
    ];
    (j1, j2)
}

/// Derivatives of the flux Jacobians with respect to the state components,
/// needed for the zero-order (reaction) matrix of the adjoint system.
/// Returns [dJ/dH, dJ/dQ1, dJ/dQ2] for each direction.
pub fn flux_jacobian_derivatives(u: State, g: f64) -> ([[[f64; 3]; 3]; 3], [[[f64; 3]; 3]; 3]) {
    let [h, q1, q2] = u;
    let h2 = h * h;
    let h3 = h2 * h;
    let dj1_dh = [
        [0.0, 0.0, 0.0],
        [2.0 * q1 * q1 / h3 + g, -2.0 * q1 / h2, 0.0],
        [2.0 * q1 * q2 / h3, -q2 / h2, -q1 / h2],
    ];
    let dj1_dq1 = [
        [0.0, 0.0, 0.0],
        [-2.0 * q1 / h2, 2.0 / h, 0.0],
        [-q2 / h2, 0.0, 1.0 / h],
    ];
    let dj1_dq2 = [
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [-q1 / h2, 1.0 / h, 0.0],
    ];
    let dj2_dh = [
        [0.0, 0.0, 0.0],
        [2.0 * q1 * q2 / h3, -q2 / h2, -q1 / h2],
        [2.0 * q2 * q2 / h3 + g, 0.0, -2.0 * q2 / h2],
    ];
    let dj2_dq1 = [
        [0.0, 0.0, 0.0],
        [-q2 / h2, 0.0, 1.0 / h],
        [0.0, 0.0, 0.0],
    ];
    let dj2_dq2 = [
        [0.0, 0.0, 0.0],
        [-q1 / h2, 1.0 / h, 0.0],
        [-2.0 * q2 / h2, 0.0, 2.0 / h],
    ];
    ([dj1_dh, dj1_dq1, dj1_dq2], [dj2_dh, dj2_dq1, dj2_dq2])
}

/// Characteristic speeds along a unit normal: (un - c, un, un + c), the
/// eigenvalues of n1 J1 + n2 J2, with celerity c = sqrt(g H).
pub fn wave_speeds(u: State, n: Vec2, g: f64) -> (f64, f64, f64) {
    let [h, q1, q2] = u;
    debug_assert!(h > 0.0);
    let un = (q1 * n.x + q2 * n.y) / h;
    let c = (g * h).sqrt();
    (un - c, un, un + c)
}

/// Largest absolute characteristic speed of a state in any direction.
pub fn max_speed(u: State, g: f64) -> f64 {
    let [h, q1, q2] = u;
    ((q1 * q1 + q2 * q2).sqrt() / h) + (g * h).sqrt()
}

/// Approximate Riemann flux between interior trace `u_plus` and exterior
/// trace `u_minus` across a face with unit normal `n` (pointing from plus to
/// minus).
pub fn numerical_flux(kind: FluxKind, u_plus: State, u_minus: State, n: Vec2, g: f64) -> State {
    let (l1p, _, l3p) = wave_speeds(u_plus, n, g);
    let (l1m, _, l3m) = wave_speeds(u_minus, n, g);
    let s_max = l3p.max(l3m);
    let s_min = l1p.min(l1m);
    let fp = normal_flux(u_plus, n, g);
    let fm = normal_flux(u_minus, n, g);
    match kind {
        FluxKind::Llf => {
            let alpha = s_max.abs().max(s_min.abs());
            [
                0.5 * (fp[0] + fm[0] + alpha * (u_plus[0] - u_minus[0])),
                0.5 * (fp[1] + fm[1] + alpha * (u_plus[1] - u_minus[1])),
                0.5 * (fp[2] + fm[2] + alpha * (u_plus[2] - u_minus[2])),
            ]
        }
        FluxKind::Hlle => {
            let lp = s_max.max(0.0);
            let lm = s_min.min(0.0);
            if lp == 0.0 && lm == 0.0 {
                // Degenerate stagnation case; central average is consistent.
                return [
                    0.5 * (fp[0] + fm[0]),
                    0.5 * (fp[1] + fm[1]),
                    0.5 * (fp[2] + fm[2]),
                ];
            }
            let inv = 1.0 / (lp - lm);
            [
                inv * (lp * fp[0] - lm * fm[0] - lp * lm * (u_plus[0] - u_minus[0])),
                inv * (lp * fp[1] - lm * fm[1] - lp * lm * (u_plus[1] - u_minus[1])),
                inv * (lp * fp[2] - lm * fm[2] - lp * lm * (u_plus[2] - u_minus[2])),
            ]
        }
    }
}

/// Ghost state for the boundary flux. Rigid walls mirror the normal
/// discharge; the open sea prescribes the water height and copies the
/// discharge.
pub fn boundary_state(u: State, n: Vec2, wall: bool, h1: f64) -> State {
    let [h, q1, q2] = u;
    if wall {
        let qn = q1 * n.x + q2 * n.y;
        [h, q1 - 2.0 * qn * n.x, q2 - 2.0 * qn * n.y]
    } else {
        [h1, q1, q2]
    }
}

/// Bed-slope and Chezy friction source (0, -gH z_x - c_f u |u|, ...).
pub fn source_term(u: State, grad_z: Vec2, params: &SWEParams) -> State {
    let [h, q1, q2] = u;
    let (uu, vv) = (q1 / h, q2 / h);
    let speed = (uu * uu + vv * vv).sqrt();
    [
        0.0,
        -params.g * h * grad_z.x - params.c_f * uu * speed,
        -params.g * h * grad_z.y - params.c_f * vv * speed,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_g(g: f64) -> SWEParams {
        SWEParams {
            g,
            ..SWEParams::default()
        }
    }

    #[test]
    fn physical_flux_reference_values() {
        let f = physical_flux([1.0, 0.0, 0.0], 9.81);
        assert_eq!(f[0], [0.0, 0.0]);
        assert!((f[1][0] - 4.905).abs() < 1e-12 && f[1][1] == 0.0);
        assert!(f[2][0] == 0.0 && (f[2][1] - 4.905).abs() < 1e-12);

        let f = physical_flux([1.0, 1.0, 0.0], 9.81);
        assert_eq!(f[0], [1.0, 0.0]);
        assert!((f[1][0] - 5.905).abs() < 1e-12 && f[1][1] == 0.0);
        assert!(f[2][0] == 0.0 && (f[2][1] - 4.905).abs() < 1e-12);

        let f = physical_flux([2.0, 0.0, 0.0], 0.0);
        for row in f {
            assert_eq!(row, [0.0, 0.0]);
        }
    }

    #[test]
    fn jacobian_reference_and_finite_difference() {
        let (j1, _) = flux_jacobians([1.0, 0.0, 0.0], 9.81);
        assert_eq!(j1[0], [0.0, 1.0, 0.0]);
        assert!((j1[1][0] - 9.81).abs() < 1e-12 && j1[1][1] == 0.0);
        assert_eq!(j1[2], [0.0, 0.0, 0.0]);

        let (j1, j2) = flux_jacobians([1.0, 1.0, 1.0], 9.81);
        assert!((j1[2][2] - 1.0).abs() < 1e-12);

        // Directional finite differences of F against J . e.
        let u = [1.3, 0.4, -0.7];
        let g = 9.81;
        let (j1, j2b) = flux_jacobians(u, g);
        let _ = j2;
        let delta = 1e-6;
        for dir in 0..3 {
            let mut up = u;
            up[dir] += delta;
            let f0 = physical_flux(u, g);
            let f1 = physical_flux(up, g);
            for c in 0..3 {
                let fd_x = (f1[c][0] - f0[c][0]) / delta;
                let fd_y = (f1[c][1] - f0[c][1]) / delta;
                assert!((fd_x - j1[c][dir]).abs() < 1e-5, "J1[{c}][{dir}]");
                assert!((fd_y - j2b[c][dir]).abs() < 1e-5, "J2[{c}][{dir}]");
            }
        }
    }

    #[test]
    fn jacobian_derivatives_match_finite_differences() {
        let u = [1.7, -0.3, 0.9];
        let g = 9.81;
        let (dj1, dj2) = flux_jacobian_derivatives(u, g);
        let delta = 1e-7;
        for k in 0..3 {
            let mut up = u;
            up[k] += delta;
            let (j1p, j2p) = flux_jacobians(up, g);
            let (j1, j2) = flux_jacobians(u, g);
            for i in 0..3 {
                for j in 0..3 {
                    let fd1 = (j1p[i][j] - j1[i][j]) / delta;
                    let fd2 = (j2p[i][j] - j2[i][j]) / delta;
                    assert!((fd1 - dj1[k][i][j]).abs() < 1e-5, "dJ1/dU{k}[{i}][{j}]");
                    assert!((fd2 - dj2[k][i][j]).abs() < 1e-5, "dJ2/dU{k}[{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn wave_speed_reference_values() {
        let (l1, l2, l3) = wave_speeds([1.0, 0.0, 0.0], Vec2::new(1.0, 0.0), 9.81);
        assert!((l1 + 3.132091952673165).abs() < 1e-12);
        assert_eq!(l2, 0.0);
        assert!((l3 - 3.132091952673165).abs() < 1e-12);

        let (l1, l2, l3) = wave_speeds([4.0, 4.0, 0.0], Vec2::new(1.0, 0.0), 9.81);
        let c = 39.24_f64.sqrt();
        assert!((l1 - (1.0 - c)).abs() < 1e-12);
        assert!((l2 - 1.0).abs() < 1e-12);
        assert!((l3 - (1.0 + c)).abs() < 1e-12);

        let (l1, l2, l3) = wave_speeds([2.0, 1.0, -1.0], Vec2::new(0.6, 0.8), 0.0);
        assert!((l1 - l2).abs() < 1e-15 && (l2 - l3).abs() < 1e-15);
        let _ = params_g(0.0);
    }

    #[test]
    fn flux_consistency_when_traces_agree() {
        let u = [1.2, 0.3, -0.4];
        let n = Vec2::new(0.8, 0.6);
        let exact = normal_flux(u, n, 9.81);
        for kind in [FluxKind::Llf, FluxKind::Hlle] {
            let f = numerical_flux(kind, u, u, n, 9.81);
            for c in 0..3 {
                assert!((f[c] - exact[c]).abs() < 1e-13, "{kind:?} comp {c}");
            }
        }
        // Still-water consistency value from the momentum channel.
        let f = numerical_flux(FluxKind::Llf, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], Vec2::new(1.0, 0.0), 9.81);
        assert!((f[1] - 4.905).abs() < 1e-13 && f[0].abs() < 1e-15 && f[2].abs() < 1e-15);
    }

    #[test]
    fn llf_reference_evaluation() {
        let f = numerical_flux(
            FluxKind::Llf,
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            Vec2::new(1.0, 0.0),
            9.81,
        );
        let alpha = 19.62_f64.sqrt();
        assert!((f[0] - 0.5 * alpha * (1.0 - 2.0)).abs() < 1e-12);
        assert!((f[1] - 0.5 * (4.905 + 19.62)).abs() < 1e-12);
        assert!(f[2].abs() < 1e-15);
    }

    #[test]
    fn hlle_upwinds_fully_supersonic_flow() {
        // All wave speeds positive: flux must equal F(U+).n exactly.
        let u_plus = [1.0, 4.0, 0.0];
        let u_minus = [1.1, 4.2, 0.0];
        let n = Vec2::new(1.0, 0.0);
        let f = numerical_flux(FluxKind::Hlle, u_plus, u_minus, n, 9.81);
        let exact = normal_flux(u_plus, n, 9.81);
        for c in 0..3 {
            assert!((f[c] - exact[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn llf_antisymmetry_across_face() {
        let up = [1.4, 0.2, -0.1];
        let um = [0.9, -0.3, 0.5];
        let n = Vec2::new(0.6, -0.8);
        let f = numerical_flux(FluxKind::Llf, up, um, n, 9.81);
        let f_rev = numerical_flux(FluxKind::Llf, um, up, -n, 9.81);
        for c in 0..3 {
            assert_eq!(f[c], -f_rev[c], "bitwise conservation, comp {c}");
        }
    }

    #[test]
    fn boundary_states() {
        let g = boundary_state([1.0, 1.0, 0.0], Vec2::new(1.0, 0.0), true, 0.0);
        assert_eq!(g, [1.0, -1.0, 0.0]);
        let g = boundary_state([1.0, 0.0, 2.0], Vec2::new(1.0, 0.0), true, 0.0);
        assert_eq!(g, [1.0, 0.0, 2.0]);
        let g = boundary_state([1.3, 0.4, 0.5], Vec2::new(0.0, 1.0), false, 1.0);
        assert_eq!(g, [1.0, 0.4, 0.5]);
    }

    #[test]
    fn source_reference_values() {
        let p = SWEParams::default();
        let s = source_term([1.0, 0.0, 0.0], Vec2::ZERO, &p);
        assert_eq!(s, [0.0, 0.0, 0.0]);

        // Linear bed z = 0.5 - 0.25 y at rest.
        let s = source_term([1.0, 0.0, 0.0], Vec2::new(0.0, -0.25), &p);
        assert!(s[1].abs() < 1e-15 && (s[2] - 2.4525).abs() < 1e-12);

        let mut p = SWEParams::default();
        p.c_f = 0.049;
        let s = source_term([1.0, 1.0, 0.0], Vec2::ZERO, &p);
        assert!((s[1] + 0.049).abs() < 1e-15 && s[2].abs() < 1e-15);
    }

    #[test]
    fn wave_speeds_match_eigensolver_on_random_states() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let g = 9.81;
        for _ in 0..100 {
            let h = rng.random_range(0.1..4.0);
            let u = [
                h,
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let n = Vec2::new(th.cos(), th.sin());
            let (j1, j2) = flux_jacobians(u, g);
            let b = nalgebra::Matrix3::from_fn(|i, j| n.x * j1[i][j] + n.y * j2[i][j]);
            let mut eig: Vec<f64> = b
                .complex_eigenvalues()
                .iter()
                .map(|z| {
                    assert!(z.im.abs() < 1e-9);
                    z.re
                })
                .collect();
            eig.sort_by(f64::total_cmp);
            let (l1, l2, l3) = wave_speeds(u, n, g);
            let mut expect = [l1, l2, l3];
            expect.sort_by(f64::total_cmp);
            for (a, b) in eig.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }
}
