//! Semi-discrete scheme for the Lagrangian displacement perturbation on the
//! fixed reference interval: conservative flux differencing of the degenerate
//! nonlinear wave operator in the interior, the expanded limit form at the
//! two vacuum boundary nodes, classical RK4 in time under a wave CFL
//! condition, and the Eulerian reconstruction.

use crate::correction::CorrectionTrajectory;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::GasParameters;

/// Map-validity threshold: eta_x must stay above this fraction of the ansatz
/// slope everywhere, otherwise the run reports a degenerate map.
const MAP_DEGENERACY_FRACTION: f64 = 1e-10;

/// Initial-data shapes, all smooth on the closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// w = amp * x, w_t = 0.
    Dilation,
    /// w = amp * x * sigma(x)/A, w_t = 0; vanishes at the boundary.
    Bump,
    /// w = 0, w_t = amp * x.
    Kick,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dilation" => Ok(Preset::Dilation),
            "bump" => Ok(Preset::Bump),
            "kick" => Ok(Preset::Kick),
            other => Err(Error::UnknownPreset(other.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Dilation => "dilation",
            Preset::Bump => "bump",
            Preset::Kick => "kick",
        }
    }
}

/// Discrete state: displacement perturbation and velocity at the grid nodes,
/// plus a short acceleration history for third-derivative differencing.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub w: Vec<f64>,
    pub w_t: Vec<f64>,
    pub step_count: u64,
    pub dt_current: f64,
    accel_history: Vec<(f64, Vec<f64>)>,
}

impl SolverState {
    pub fn accel_history_len(&self) -> usize {
        self.accel_history.len()
    }
}

/// Build a preset initial state on the given grid.
pub fn initial_data(grid: &Grid, preset: Preset, amplitude: f64) -> SolverState {
    let n = grid.n_nodes();
    let mut w = vec![0.0; n];
    let mut w_t = vec![0.0; n];
    match preset {
        Preset::Dilation => {
            for i in 0..n {
                w[i] = amplitude * grid.nodes[i];
            }
        }
        Preset::Bump => {
            let a = grid.profile().a;
            for i in 0..n {
                w[i] = amplitude * grid.nodes[i] * grid.sigma_nodes[i] / a;
            }
        }
        Preset::Kick => {
            for i in 0..n {
                w_t[i] = amplitude * grid.nodes[i];
            }
        }
    }
    SolverState {
        t: 0.0,
        w,
        w_t,
        step_count: 0,
        dt_current: 0.0,
        accel_history: Vec::new(),
    }
}

/// Eulerian view of one Lagrangian state.
#[derive(Debug, Clone)]
pub struct EulerianSnapshot {
    pub t: f64,
    /// Flow-map positions eta(x_i, t).
    pub positions: Vec<f64>,
    pub density: Vec<f64>,
    pub velocity: Vec<f64>,
    /// rho_ref(eta_ref(x_i, t), t), the reference density seen through its
    /// own flow map.
    pub density_ref: Vec<f64>,
    pub velocity_ref: Vec<f64>,
    /// rho - rho_ref and u - u_ref at matched Lagrangian labels.
    pub density_diff: Vec<f64>,
    pub velocity_diff: Vec<f64>,
    /// |density_diff| / sigma^alpha, finite up to the boundary.
    pub density_ratio: Vec<f64>,
    pub boundary: (f64, f64),
    pub mass: f64,
    pub eta_x_min: f64,
}

/// Discrete operator bound to one grid, parameter set and ansatz trajectory.
pub struct Solver<'a> {
    pub grid: &'a Grid,
    pub params: GasParameters,
    pub trajectory: &'a CorrectionTrajectory,
    pub cfl: f64,
    /// sigma_i^(-alpha) at interior nodes (unused entries at the boundary).
    sigma_neg_alpha: Vec<f64>,
    /// sigma^(alpha+1) at midpoints: the flux weight.
    sigma_mid_flux: Vec<f64>,
}

impl<'a> Solver<'a> {
    pub fn new(
        grid: &'a Grid,
        params: GasParameters,
        trajectory: &'a CorrectionTrajectory,
        cfl: f64,
    ) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::InvalidParameters(format!(
                "cfl must lie in (0, 1], got {cfl}"
            )));
        }
        let alpha = params.alpha();
        let n = grid.n_cells;
        let mut sigma_neg_alpha = vec![0.0; n + 1];
        for i in 1..n {
            sigma_neg_alpha[i] = grid.sigma_nodes[i].powf(-alpha);
        }
        let sigma_mid_flux = grid
            .sigma_mid
            .iter()
            .map(|&s| s.powf(alpha + 1.0))
            .collect();
        Ok(Solver {
            grid,
            params,
            trajectory,
            cfl,
            sigma_neg_alpha,
            sigma_mid_flux,
        })
    }

    /// Nonlinear flux kernel G(s) = (eta_x + s)^-gamma - eta_x^-gamma in the
    /// cancellation-free form; G(0) = 0 exactly, so the unperturbed ansatz is
    /// a discrete fixed point to the last bit.
    #[inline]
    fn g_kernel(&self, eta_x: f64, eta_x_neg_gamma: f64, s: f64) -> f64 {
        eta_x_neg_gamma * (-self.params.gamma() * (s / eta_x).ln_1p()).exp_m1()
    }

    /// Smallest eta_x + w_x over nodes and midpoints.
    pub fn eta_x_min(&self, t: f64, w: &[f64]) -> f64 {
        let eta_x = self.trajectory.eta_x(t);
        let dx = self.grid.dx;
        let n = self.grid.n_cells;
        let mut min = f64::MAX;
        for i in 0..n {
            min = min.min(eta_x + (w[i + 1] - w[i]) / dx);
        }
        let wx = self.grid.derivative(w);
        for v in wx {
            min = min.min(eta_x + v);
        }
        min
    }

    /// Acceleration w_tt of the semi-discrete system at time t.
    ///
    /// Interior nodes: -(damping) w_t - (1/gamma) sigma^-alpha (F_{i+1/2} -
    /// F_{i-1/2})/dx with F = sigma^{alpha+1} G(w_x). Boundary nodes take the
    /// sigma -> 0 limit of the expanded operator:
    /// -(damping) w_t - alpha sigma_x G(w_x) with one-sided w_x.
    pub fn rhs_acceleration(&self, t: f64, w: &[f64], w_t: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.n_cells;
        let dx = self.grid.dx;
        let params = &self.params;
        let eta_x = self.trajectory.eta_x(t);
        let eta_x_neg_gamma = eta_x.powf(-params.gamma());
        let damping = params.damping_coefficient(t);
        let alpha = params.alpha();
        let inv_gamma = 1.0 / params.gamma();
        let floor = MAP_DEGENERACY_FRACTION * eta_x;

        // midpoint slopes and fluxes
        let mut flux = vec![0.0; n];
        let mut eta_min = f64::MAX;
        for i in 0..n {
            let s = (w[i + 1] - w[i]) / dx;
            eta_min = eta_min.min(eta_x + s);
            if eta_x + s <= floor {
                return Err(Error::MapDegenerate {
                    t,
                    eta_x_min: eta_x + s,
                });
            }
            flux[i] = self.sigma_mid_flux[i] * self.g_kernel(eta_x, eta_x_neg_gamma, s);
        }

        let mut acc = vec![0.0; n + 1];
        for i in 1..n {
            acc[i] = -damping * w_t[i]
                - inv_gamma * self.sigma_neg_alpha[i] * (flux[i] - flux[i - 1]) / dx;
        }
        // boundary nodes: one-sided second-order slopes
        for (node, right) in [(0usize, false), (n, true)] {
            let wx = self.grid.boundary_slope(w, right);
            if eta_x + wx <= floor {
                return Err(Error::MapDegenerate {
                    t,
                    eta_x_min: eta_x + wx,
                });
            }
            let sigma_x = self.grid.sigma_x(node);
            acc[node] =
                -damping * w_t[node] - alpha * sigma_x * self.g_kernel(eta_x, eta_x_neg_gamma, wx);
        }
        Ok(acc)
    }

    /// Flux part of the linearization about w = 0:
    /// eta_x^{-gamma-1} sigma^{-alpha} d/dx (sigma^{alpha+1} phi_x), with the
    /// matching boundary limit. Kept independent of `rhs_acceleration` as a
    /// small-amplitude cross-check.
    pub fn linearized_flux(&self, t: f64, phi: &[f64]) -> Vec<f64> {
        let n = self.grid.n_cells;
        let dx = self.grid.dx;
        let eta_x = self.trajectory.eta_x(t);
        let coeff = eta_x.powf(-self.params.gamma() - 1.0);
        let alpha = self.params.alpha();
        let mut out = vec![0.0; n + 1];
        for i in 1..n {
            let f_right = self.sigma_mid_flux[i] * (phi[i + 1] - phi[i]) / dx;
            let f_left = self.sigma_mid_flux[i - 1] * (phi[i] - phi[i - 1]) / dx;
            out[i] = coeff * self.sigma_neg_alpha[i] * (f_right - f_left) / dx;
        }
        for (node, right) in [(0usize, false), (n, true)] {
            let px = self.grid.boundary_slope(phi, right);
            out[node] = self.params.gamma() * alpha * self.grid.sigma_x(node) * coeff * px;
        }
        out
    }

    /// Largest Lagrangian signal speed sqrt(sigma (eta_x + w_x)^{-gamma-1})
    /// over midpoints.
    pub fn max_wave_speed(&self, t: f64, w: &[f64]) -> f64 {
        let eta_x = self.trajectory.eta_x(t);
        let dx = self.grid.dx;
        let n = self.grid.n_cells;
        let mut c2_max = 0.0f64;
        for i in 0..n {
            let s = (w[i + 1] - w[i]) / dx;
            let m = eta_x + s;
            if m > 0.0 {
                c2_max = c2_max.max(self.grid.sigma_mid[i] * m.powf(-self.params.gamma() - 1.0));
            }
        }
        c2_max.sqrt()
    }

    /// Stable step size at the current state: wave CFL plus a cap resolving
    /// the damping scale (1+t)^lambda / mu.
    pub fn stable_dt(&self, t: f64, w: &[f64]) -> f64 {
        let c = self.max_wave_speed(t, w);
        let dt_wave = if c > 0.0 {
            self.cfl * self.grid.dx / c
        } else {
            f64::MAX
        };
        let dt_damp = 0.5 * (1.0 + t).powf(self.params.lambda()) / self.params.mu();
        dt_wave.min(dt_damp)
    }

    /// One classical RK4 step of size min(stable_dt, t_max - t).
    pub fn step(&self, state: &mut SolverState, t_max: f64) -> Result<()> {
        let t = state.t;
        let remaining = t_max - t;
        // snap to the target when only a roundoff sliver remains
        if remaining <= 1e-12 * (1.0 + t.abs()) {
            state.t = t_max;
            return Ok(());
        }
        let dt = self.stable_dt(t, &state.w).min(remaining);
        if dt < 1e-14 {
            return Err(Error::CflUnderflow { t, dt });
        }

        let n = self.grid.n_nodes();
        let a1 = self.rhs_acceleration(t, &state.w, &state.w_t)?;
        let half = 0.5 * dt;

        let mut w2 = vec![0.0; n];
        let mut v2 = vec![0.0; n];
        for i in 0..n {
            w2[i] = state.w[i] + half * state.w_t[i];
            v2[i] = state.w_t[i] + half * a1[i];
        }
        let a2 = self.rhs_acceleration(t + half, &w2, &v2)?;

        let mut w3 = vec![0.0; n];
        let mut v3 = vec![0.0; n];
        for i in 0..n {
            w3[i] = state.w[i] + half * v2[i];
            v3[i] = state.w_t[i] + half * a2[i];
        }
        let a3 = self.rhs_acceleration(t + half, &w3, &v3)?;

        let mut w4 = vec![0.0; n];
        let mut v4 = vec![0.0; n];
        for i in 0..n {
            w4[i] = state.w[i] + dt * v3[i];
            v4[i] = state.w_t[i] + dt * a3[i];
        }
        let a4 = self.rhs_acceleration(t + dt, &w4, &v4)?;

        let sixth = dt / 6.0;
        for i in 0..n {
            state.w[i] += sixth * (state.w_t[i] + 2.0 * (v2[i] + v3[i]) + v4[i]);
            state.w_t[i] += sixth * (a1[i] + 2.0 * (a2[i] + a3[i]) + a4[i]);
        }
        state.t = t + dt;
        state.step_count += 1;
        state.dt_current = dt;

        let a_end = self.rhs_acceleration(state.t, &state.w, &state.w_t)?;
        if state.accel_history.len() == 3 {
            state.accel_history.remove(0);
        }
        state.accel_history.push((state.t, a_end));
        Ok(())
    }

    /// Step until t_target (landing on it exactly).
    pub fn advance_to(&self, state: &mut SolverState, t_target: f64) -> Result<()> {
        while state.t < t_target {
            self.step(state, t_target)?;
        }
        Ok(())
    }

    /// Third time derivative of w by second-order backward differencing of
    /// the stored accelerations (quadratic through the last three, evaluated
    /// at the newest time).
    pub fn third_time_derivative(&self, state: &SolverState) -> Result<Vec<f64>> {
        if state.accel_history.len() < 3 {
            return Err(Error::HistoryTooShort {
                have: state.accel_history.len(),
                need: 3,
            });
        }
        let (t0, a0) = &state.accel_history[0];
        let (t1, a1) = &state.accel_history[1];
        let (t2, a2) = &state.accel_history[2];
        let c0 = (t2 - t1) / ((t0 - t1) * (t0 - t2));
        let c1 = (t2 - t0) / ((t1 - t0) * (t1 - t2));
        let c2 = (2.0 * t2 - t0 - t1) / ((t2 - t0) * (t2 - t1));
        Ok((0..a0.len())
            .map(|i| c0 * a0[i] + c1 * a1[i] + c2 * a2[i])
            .collect())
    }

    /// Rebuild the Eulerian fields from the Lagrangian state via the mass
    /// relation rho * eta_x = sigma^alpha.
    pub fn reconstruct_eulerian(&self, state: &SolverState) -> Result<EulerianSnapshot> {
        let t = state.t;
        let n = self.grid.n_nodes();
        let ansatz = self.trajectory.ansatz_derivatives(t, 1);
        let eta_x_slope = ansatz.eta_x;
        let eta_xt = ansatz.derivatives[0];
        let h = self.trajectory.eval(t).h;
        let ref_slope = (1.0 + t).powf(self.params.similarity_exponent());
        let alpha = self.params.alpha();

        let wx = self.grid.derivative(&state.w);
        let mut positions = vec![0.0; n];
        let mut density = vec![0.0; n];
        let mut velocity = vec![0.0; n];
        let mut density_ref = vec![0.0; n];
        let mut velocity_ref = vec![0.0; n];
        let mut density_diff = vec![0.0; n];
        let mut velocity_diff = vec![0.0; n];
        let mut density_ratio = vec![0.0; n];
        let mut rho_eta_x = vec![0.0; n];
        let mut eta_x_min = f64::MAX;
        for i in 0..n {
            let x = self.grid.nodes[i];
            let eta_x_i = eta_x_slope + wx[i];
            eta_x_min = eta_x_min.min(eta_x_i);
            if eta_x_i <= MAP_DEGENERACY_FRACTION * eta_x_slope {
                return Err(Error::MapDegenerate {
                    t,
                    eta_x_min: eta_x_i,
                });
            }
            let sigma_alpha = self.grid.sigma_nodes[i].powf(alpha);
            positions[i] = x * eta_x_slope + state.w[i];
            density[i] = sigma_alpha / eta_x_i;
            velocity[i] = x * eta_xt + state.w_t[i];
            density_ref[i] = sigma_alpha / ref_slope;
            velocity_ref[i] = x * self.params.similarity_exponent() * (1.0 + t).powf(
                self.params.similarity_exponent() - 1.0,
            );
            density_diff[i] = sigma_alpha * (1.0 / eta_x_i - 1.0 / ref_slope);
            velocity_diff[i] = velocity[i] - velocity_ref[i];
            density_ratio[i] = (wx[i] + h).abs() / (eta_x_i * ref_slope);
            rho_eta_x[i] = density[i] * eta_x_i;
        }
        for i in 0..self.grid.n_cells {
            let s = (state.w[i + 1] - state.w[i]) / self.grid.dx;
            eta_x_min = eta_x_min.min(eta_x_slope + s);
        }
        // Simpson quadrature of rho eta_x dx, which equals the quadrature of
        // sigma^alpha and is time-independent up to roundoff.
        let mass = self.grid.simpson(&rho_eta_x);
        let boundary = (positions[0], positions[n - 1]);
        Ok(EulerianSnapshot {
            t,
            positions,
            density,
            velocity,
            density_ref,
            velocity_ref,
            density_diff,
            velocity_diff,
            density_ratio,
            boundary,
            mass,
            eta_x_min,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correction::integrate_correction;
    use crate::profile::derive_profile;

    fn setup(n: usize) -> (GasParameters, Grid, CorrectionTrajectory) {
        let params = GasParameters::new(2.0, 1.0, 3.0).unwrap();
        let profile = derive_profile(&params, 1.0).unwrap();
        let grid = build_test_grid(&profile, n);
        let traj = integrate_correction(&params, 200.0, 1e-10).unwrap();
        (params, grid, traj)
    }

    fn build_test_grid(profile: &crate::profile::BarenblattProfile, n: usize) -> Grid {
        crate::grid::build_grid(profile, n).unwrap()
    }

    #[test]
    fn presets() {
        let (_, grid, _) = setup(16);
        let zero = initial_data(&grid, Preset::Dilation, 0.0);
        assert!(zero.w.iter().all(|&v| v == 0.0));
        assert!(zero.w_t.iter().all(|&v| v == 0.0));
        let d = initial_data(&grid, Preset::Dilation, 0.01);
        let b = initial_data(&grid, Preset::Bump, 0.01);
        let k = initial_data(&grid, Preset::Kick, 0.01);
        let n = grid.n_cells;
        for i in 0..=n {
            assert_eq!(d.w[i], -d.w[n - i]);
            assert_eq!(b.w[i], -b.w[n - i]);
            assert_eq!(k.w_t[i], -k.w_t[n - i]);
        }
        assert!(k.w.iter().all(|&v| v == 0.0));
        assert!(Preset::parse("dilation").is_ok());
        assert!(matches!(
            Preset::parse("vortex"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn zero_state_is_exact_fixed_point() {
        let (params, grid, traj) = setup(64);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let mut state = initial_data(&grid, Preset::Dilation, 0.0);
        for _ in 0..200 {
            solver.step(&mut state, 100.0).unwrap();
        }
        let max_w = state.w.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let max_wt = state.w_t.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert_eq!(max_w, 0.0);
        assert_eq!(max_wt, 0.0);
    }

    #[test]
    fn odd_data_stays_odd() {
        let (params, grid, traj) = setup(32);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let mut state = initial_data(&grid, Preset::Bump, 0.01);
        for _ in 0..50 {
            solver.step(&mut state, 100.0).unwrap();
        }
        let n = grid.n_cells;
        for i in 0..=n {
            assert!(
                (state.w[i] + state.w[n - i]).abs() <= 1e-12,
                "asymmetry at {i}"
            );
            assert!((state.w_t[i] + state.w_t[n - i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn acceleration_is_odd_for_odd_state() {
        let (params, grid, traj) = setup(32);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let state = initial_data(&grid, Preset::Bump, 0.05);
        let acc = solver
            .rhs_acceleration(0.7, &state.w, &state.w_t)
            .unwrap();
        let n = grid.n_cells;
        for i in 0..=n {
            assert!((acc[i] + acc[n - i]).abs() <= 1e-13, "node {i}");
        }
    }

    #[test]
    fn small_amplitude_limit_matches_linearization() {
        let (params, grid, traj) = setup(64);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let t = 0.3;
        let phi: Vec<f64> = grid
            .nodes
            .iter()
            .map(|&x| x * (1.0 - x * x / (grid.half_width() * grid.half_width())))
            .collect();
        let zeros = vec![0.0; grid.n_nodes()];
        let lin = solver.linearized_flux(t, &phi);
        let mut residual = |eps: f64| -> f64 {
            let w: Vec<f64> = phi.iter().map(|&p| eps * p).collect();
            let acc = solver.rhs_acceleration(t, &w, &zeros).unwrap();
            acc.iter()
                .zip(lin.iter())
                .map(|(a, l)| (a - eps * l).abs())
                .fold(0.0f64, f64::max)
        };
        let r3 = residual(1e-3);
        let r4 = residual(1e-4);
        let ratio = r3 / r4;
        assert!(
            (ratio - 100.0).abs() < 15.0,
            "quadratic remainder ratio {ratio}"
        );
    }

    #[test]
    fn cfl_halves_with_dx() {
        let params = GasParameters::new(2.0, 1.0, 3.0).unwrap();
        let profile = derive_profile(&params, 1.0).unwrap();
        let traj = integrate_correction(&params, 10.0, 1e-10).unwrap();
        let g1 = build_test_grid(&profile, 100);
        let g2 = build_test_grid(&profile, 200);
        let s1 = Solver::new(&g1, params, &traj, 0.5).unwrap();
        let s2 = Solver::new(&g2, params, &traj, 0.5).unwrap();
        let w1 = vec![0.0; g1.n_nodes()];
        let w2 = vec![0.0; g2.n_nodes()];
        // exact up to the slightly different midpoint sampling of sigma
        let r = s1.stable_dt(0.0, &w1) / s2.stable_dt(0.0, &w2);
        assert!((r - 2.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn map_degeneracy_detected() {
        let (params, grid, traj) = setup(32);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        // slope steep enough to push eta_x + w_x negative somewhere
        let w: Vec<f64> = grid.nodes.iter().map(|&x| -2.0 * x).collect();
        let zeros = vec![0.0; grid.n_nodes()];
        match solver.rhs_acceleration(0.0, &w, &zeros) {
            Err(Error::MapDegenerate { .. }) => {}
            other => panic!("expected MapDegenerate, got {other:?}"),
        }
    }

    #[test]
    fn eulerian_reconstruction_identities() {
        let (params, grid, traj) = setup(400);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        // zero perturbation: the density difference is carried by h alone
        let state = initial_data(&grid, Preset::Dilation, 0.0);
        let mut state = state;
        solver.advance_to(&mut state, 2.0).unwrap();
        let snap = solver.reconstruct_eulerian(&state).unwrap();
        let eta_x = traj.eta_x(2.0);
        let ref_slope = (1.0 + 2.0f64).powf(params.similarity_exponent());
        for (i, &x) in grid.nodes.iter().enumerate() {
            let expect = grid.sigma_nodes[i].powf(params.alpha())
                * (1.0 / eta_x - 1.0 / ref_slope);
            assert!(
                (snap.density_diff[i] - expect).abs() <= 1e-12,
                "node {i} ({x})"
            );
        }
        // boundary density vanishes exactly
        assert_eq!(snap.density[0], 0.0);
        assert_eq!(*snap.density.last().unwrap(), 0.0);
        // mass within quadrature error of the profile mass
        assert!(
            (snap.mass - 1.0).abs() <= 1e-6,
            "mass {} at n = 400",
            snap.mass
        );

        // boundary at t = 0 is +-L + w(+-L, 0)
        let state0 = initial_data(&grid, Preset::Dilation, 0.01);
        let snap0 = solver.reconstruct_eulerian(&state0).unwrap();
        let l = grid.half_width();
        assert!((snap0.boundary.1 - (l + 0.01 * l)).abs() < 1e-14);
        assert!((snap0.boundary.0 - (-l - 0.01 * l)).abs() < 1e-14);
    }

    #[test]
    fn mass_is_time_independent() {
        let (params, grid, traj) = setup(128);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let mut state = initial_data(&grid, Preset::Bump, 0.01);
        let m0 = solver.reconstruct_eulerian(&state).unwrap().mass;
        solver.advance_to(&mut state, 5.0).unwrap();
        let m1 = solver.reconstruct_eulerian(&state).unwrap().mass;
        assert!((m0 - m1).abs() <= 1e-12 * m0.abs(), "{m0} vs {m1}");
    }

    #[test]
    fn history_gates_third_derivative() {
        let (params, grid, traj) = setup(32);
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let mut state = initial_data(&grid, Preset::Bump, 0.01);
        assert!(matches!(
            solver.third_time_derivative(&state),
            Err(Error::HistoryTooShort { .. })
        ));
        for _ in 0..3 {
            solver.step(&mut state, 100.0).unwrap();
        }
        let d3 = solver.third_time_derivative(&state).unwrap();
        assert_eq!(d3.len(), grid.n_nodes());
        assert!(d3.iter().all(|v| v.is_finite()));
    }
}
