//! Drive a solver state through a time schedule, recording the scalar
//! summaries (energies, sup norms, boundary data) that the rate reports and
//! the experiment outputs consume.

use crate::error::{Error, Result};
use crate::metrics::{
    desk_total_energy, energy_ej, energy_eji, weighted_sup_norms, EnergyConfig,
};
use crate::rates::{RunHistory, RunSample};
use crate::solver::{EulerianSnapshot, Solver, SolverState};

/// How a driven run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// The Lagrangian map lost positivity; the run stops at the recorded time
    /// with the history collected so far.
    Degenerate { t: f64, eta_x_min: f64 },
}

impl RunOutcome {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, RunOutcome::Degenerate { .. })
    }
}

/// Geometric schedule in (1+t) from 0 to t_end inclusive.
pub fn log_spaced_times(t_end: f64, per_decade: usize) -> Vec<f64> {
    let decades = (1.0 + t_end).log10().max(0.1);
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    let mut ts = vec![0.0];
    for i in 1..=n {
        let t = (1.0 + t_end).powf(i as f64 / n as f64) - 1.0;
        if t > *ts.last().unwrap() + 1e-12 {
            ts.push(t.min(t_end));
        }
    }
    if (ts.last().unwrap() - t_end).abs() > 1e-12 {
        ts.push(t_end);
    }
    ts
}

/// Summaries of one state; `snapshot` gives callers access to the full
/// Eulerian fields at sample times.
pub fn record_sample(
    solver: &Solver,
    state: &SolverState,
    config: &EnergyConfig,
) -> Result<(RunSample, EulerianSnapshot)> {
    let snapshot = solver.reconstruct_eulerian(state)?;
    let t = state.t;
    let e0 = energy_ej(solver, state, 0)?;
    let e1 = energy_ej(solver, state, 1)?;
    let e2 = if config.use_j3_fd && state.accel_history_len() >= 3 {
        energy_ej(solver, state, 2)?
    } else {
        f64::NAN
    };
    let e01 = energy_eji(solver, state, 0, 1)?;
    let desk_total = desk_total_energy(solver, state, config)?;
    let sup = weighted_sup_norms(solver, state, config)?;

    let sup_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let sup_velocity_diff = sup_abs(&snapshot.velocity_diff);
    let sup_density_ratio = sup_abs(&snapshot.density_ratio);

    // d^k x_+ / dt^k = L d^k eta_x/dt^k + d_t^k w at the right boundary node.
    let l = solver.grid.half_width();
    let last = solver.grid.n_cells;
    let ansatz = solver.trajectory.ansatz_derivatives(t, 3);
    let acc = solver.rhs_acceleration(t, &state.w, &state.w_t)?;
    let d1 = l * ansatz.derivatives[0] + state.w_t[last];
    let d2 = l * ansatz.derivatives[1] + acc[last];
    let d3 = match solver.third_time_derivative(state) {
        Ok(w3) => l * ansatz.derivatives[2] + w3[last],
        Err(_) => f64::NAN,
    };

    let sample = RunSample {
        t,
        e0,
        e1,
        e2,
        e01,
        desk_total,
        sup_abs_w: sup_abs(&state.w),
        sup_abs_wt: sup_abs(&state.w_t),
        sup_velocity_diff,
        sup_density_ratio,
        x_minus: snapshot.boundary.0,
        x_plus: snapshot.boundary.1,
        boundary_derivative: [d1.abs(), d2.abs(), d3.abs()],
        weighted_sup_total: sup.total,
        mass: snapshot.mass,
        eta_x_min: snapshot.eta_x_min,
        dt: state.dt_current,
    };
    Ok((sample, snapshot))
}

/// Advance `state` through `times`, recording a sample at each one and
/// passing it to `on_sample`. A degenerate map ends the run early with the
/// partial history; other solver failures abort.
pub fn record_history<F>(
    solver: &Solver,
    state: &mut SolverState,
    times: &[f64],
    config: &EnergyConfig,
    mut on_sample: F,
) -> Result<(RunHistory, RunOutcome)>
where
    F: FnMut(usize, &SolverState, &RunSample, &EulerianSnapshot) -> Result<()>,
{
    let mut history = RunHistory::default();
    for (idx, &t_target) in times.iter().enumerate() {
        if t_target < state.t {
            continue;
        }
        match solver.advance_to(state, t_target) {
            Ok(()) => {}
            Err(Error::MapDegenerate { t, eta_x_min }) => {
                return Ok((history, RunOutcome::Degenerate { t, eta_x_min }));
            }
            Err(e) => return Err(e),
        }
        match record_sample(solver, state, config) {
            Ok((sample, snapshot)) => {
                on_sample(idx, state, &sample, &snapshot)?;
                history.samples.push(sample);
            }
            Err(Error::MapDegenerate { t, eta_x_min }) => {
                return Ok((history, RunOutcome::Degenerate { t, eta_x_min }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((history, RunOutcome::Completed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correction::integrate_correction;
    use crate::grid::build_grid;
    use crate::params::GasParameters;
    use crate::profile::derive_profile;
    use crate::solver::{initial_data, Preset};

    #[test]
    fn schedule_covers_range() {
        let ts = log_spaced_times(1000.0, 20);
        assert_eq!(ts[0], 0.0);
        assert!((ts.last().unwrap() - 1000.0).abs() < 1e-9);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_run_records_zero_sups() {
        let params = GasParameters::new(2.0, 1.0, 3.0).unwrap();
        let profile = derive_profile(&params, 1.0).unwrap();
        let grid = build_grid(&profile, 32).unwrap();
        let traj = integrate_correction(&params, 20.0, 1e-10).unwrap();
        let solver = Solver::new(&grid, params, &traj, 0.5).unwrap();
        let config = EnergyConfig::new(&params, 2, 1, true).unwrap();
        let mut state = initial_data(&grid, Preset::Dilation, 0.0);
        let times = log_spaced_times(10.0, 10);
        let (history, outcome) =
            record_history(&solver, &mut state, &times, &config, |_, _, _, _| Ok(())).unwrap();
        assert_eq!(outcome, RunOutcome::Completed);
        assert_eq!(history.samples.len(), times.len());
        for s in &history.samples {
            assert_eq!(s.sup_abs_w, 0.0);
            assert_eq!(s.e0, 0.0);
            assert!((s.mass - 1.0).abs() < 1e-9);
        }
    }
}
