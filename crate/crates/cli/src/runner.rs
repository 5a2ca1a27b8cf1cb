//! Orchestration of single runs: build the pieces from a config, drive the
//! sampling loop, keep the snapshots that the simulate command writes out.

use vacuumgas::correction::CorrectionTrajectory;
use vacuumgas::metrics::EnergyConfig;
use vacuumgas::rates::RunHistory;
use vacuumgas::sampling::{log_spaced_times, record_history, record_sample, RunOutcome};
use vacuumgas::solver::EulerianSnapshot;
use vacuumgas::{
    build_grid, derive_profile, initial_data, integrate_correction, BarenblattProfile,
    GasParameters, Preset, Solver,
};

use crate::config::RunConfig;
use crate::error::Result;

pub struct SnapshotData {
    pub sample_index: usize,
    pub w: Vec<f64>,
    pub w_t: Vec<f64>,
    pub snapshot: EulerianSnapshot,
}

pub struct RunArtifacts {
    pub params: GasParameters,
    pub profile: BarenblattProfile,
    pub history: RunHistory,
    pub outcome: RunOutcome,
    pub steps: u64,
    pub snapshots: Vec<SnapshotData>,
    pub sample_times: Vec<f64>,
}

/// Indices of `count` snapshot samples spread evenly over the schedule.
pub fn snapshot_indices(n_samples: usize, count: usize) -> Vec<usize> {
    if n_samples == 0 || count == 0 {
        return Vec::new();
    }
    let count = count.min(n_samples);
    let mut idx: Vec<usize> = (0..count)
        .map(|i| {
            if count == 1 {
                0
            } else {
                (i * (n_samples - 1)) / (count - 1)
            }
        })
        .collect();
    idx.dedup();
    idx
}

/// Run one simulation to `t_end`, recording the sample history and the
/// scheduled snapshots. A degenerate map ends the run early and is reported
/// in the outcome, not as an error.
pub fn run_simulation(config: &RunConfig) -> Result<RunArtifacts> {
    let params = config.gas_parameters()?;
    let profile = derive_profile(&params, config.mass)
        .map_err(crate::error::CliError::from)?;
    let grid = build_grid(&profile, config.n_cells)?;
    let trajectory = integrate_correction(&params, config.t_end * 1.05 + 1.0, config.ode_tol)?;
    let solver = Solver::new(&grid, params, &trajectory, config.cfl)?;
    let energy = EnergyConfig::new(&params, 2, 2, true)?;
    let preset = Preset::parse(&config.preset)?;
    let mut state = initial_data(&grid, preset, config.amplitude);

    let times = log_spaced_times(config.t_end, config.samples_per_decade);
    let snap_at = snapshot_indices(times.len(), config.snapshot_count);
    let mut snapshots = Vec::with_capacity(snap_at.len());
    let (history, outcome) = record_history(
        &solver,
        &mut state,
        &times,
        &energy,
        |idx, st, _sample, snapshot| {
            if snap_at.binary_search(&idx).is_ok() {
                snapshots.push(SnapshotData {
                    sample_index: idx,
                    w: st.w.clone(),
                    w_t: st.w_t.clone(),
                    snapshot: snapshot.clone(),
                });
            }
            Ok(())
        },
    )?;
    Ok(RunArtifacts {
        params,
        profile,
        history,
        outcome,
        steps: state.step_count,
        snapshots,
        sample_times: times,
    })
}

/// Solve to `t_probe` on one grid and return the displacement field.
pub fn probe_solution(config: &RunConfig, n_cells: usize, t_probe: f64) -> Result<Vec<f64>> {
    let params = config.gas_parameters()?;
    let profile = derive_profile(&params, config.mass)
        .map_err(crate::error::CliError::from)?;
    let grid = build_grid(&profile, n_cells)?;
    let trajectory = integrate_correction(&params, t_probe * 1.05 + 1.0, config.ode_tol)?;
    let solver = Solver::new(&grid, params, &trajectory, config.cfl)?;
    let preset = Preset::parse(&config.preset)?;
    let mut state = initial_data(&grid, preset, config.amplitude);
    solver.advance_to(&mut state, t_probe)?;
    Ok(state.w)
}

/// One-off sample of a fresh state (used to report initial energies).
pub fn initial_sample(config: &RunConfig) -> Result<vacuumgas::rates::RunSample> {
    let params = config.gas_parameters()?;
    let profile = derive_profile(&params, config.mass)
        .map_err(crate::error::CliError::from)?;
    let grid = build_grid(&profile, config.n_cells)?;
    let trajectory: CorrectionTrajectory = integrate_correction(&params, 2.0, config.ode_tol)?;
    let solver = Solver::new(&grid, params, &trajectory, config.cfl)?;
    let energy = EnergyConfig::new(&params, 2, 2, true)?;
    let preset = Preset::parse(&config.preset)?;
    let state = initial_data(&grid, preset, config.amplitude);
    let (sample, _) = record_sample(&solver, &state, &energy)?;
    Ok(sample)
}
