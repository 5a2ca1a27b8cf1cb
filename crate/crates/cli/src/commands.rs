//! The seven subcommands: each consumes a resolved config, writes its files
//! under the output directory, and reports an outcome for the exit code.

use std::path::Path;

use rayon::prelude::*;
use vacuumgas::metrics::hardy_ratio;
use vacuumgas::rates::{
    energy_decay_report, richardson_order, theorem2_report, RunHistory, RunSample,
};
use vacuumgas::sampling::RunOutcome;
use vacuumgas::{build_grid, derive_profile, integrate_correction};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{
    self, to_json, CorrectionReport, PhasePlaneDto, RefineEntry, RefineReport, SimulationReport,
};
use crate::runner::{probe_solution, run_simulation};
use crate::table::{read_table, write_table, Table};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Emit profile constants, the boundary/mass table, and sampled density and
/// velocity fields of the reference solution.
pub fn cmd_barenblatt(config: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let hash = config.hash();
    let params = config.gas_parameters()?;
    let profile = derive_profile(&params, config.mass).map_err(CliError::from)?;

    write_table(
        &out.join("barenblatt_profile.csv"),
        &hash,
        &[
            "gamma",
            "lambda",
            "mu",
            "delta",
            "mass",
            "a",
            "b",
            "half_width",
        ],
        &[vec![
            params.gamma(),
            params.lambda(),
            params.mu(),
            params.delta(),
            profile.mass,
            profile.a,
            profile.b,
            profile.half_width,
        ]],
    )?;

    let times = vacuumgas::sampling::log_spaced_times(config.t_end, config.samples_per_decade);
    let mut boundary_rows = Vec::with_capacity(times.len());
    for &t in &times {
        let (xm, xp) = profile.boundary(&params, t);
        let mass = profile
            .mass_at(&params, t, 1e-10)
            .map_err(CliError::from)?;
        boundary_rows.push(vec![t, xm, xp, mass]);
    }
    write_table(
        &out.join("barenblatt_boundary.csv"),
        &hash,
        &["t", "x_minus", "x_plus", "mass"],
        &boundary_rows,
    )?;

    let field_times: Vec<f64> = crate::runner::snapshot_indices(times.len(), config.snapshot_count)
        .into_iter()
        .map(|i| times[i])
        .collect();
    let mut field_rows = Vec::new();
    for &t in &field_times {
        let (xm, xp) = profile.boundary(&params, t);
        let m = 200usize;
        for i in 0..=m {
            let x = xm + (xp - xm) * (i as f64) / (m as f64);
            field_rows.push(vec![
                t,
                x,
                profile.density_clamped(&params, x, t),
                profile.velocity(&params, x, t),
            ]);
        }
    }
    write_table(
        &out.join("barenblatt_fields.csv"),
        &hash,
        &["t", "x", "rho", "u"],
        &field_rows,
    )?;
    Ok(())
}

/// Integrate the correction ODE, write the slope/derivative table and the
/// phase-plane plus decay reports.
pub fn cmd_correction(config: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let hash = config.hash();
    let params = config.gas_parameters()?;
    let trajectory = integrate_correction(&params, config.correction_t_end, config.ode_tol)?;

    let k_max = config.correction_k_max;
    let mut columns: Vec<String> = vec![
        "t".into(),
        "h".into(),
        "h_t".into(),
        "eta_x".into(),
    ];
    for k in 1..=k_max {
        columns.push(format!("d{k}_eta_x"));
    }
    let col_refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let mut rows = Vec::new();
    for &t in &trajectory.sample_times(config.samples_per_decade) {
        let state = trajectory.eval(t);
        let eval = trajectory.ansatz_derivatives(t, k_max);
        let mut row = vec![t, state.h, state.z, eval.eta_x];
        row.extend_from_slice(&eval.derivatives);
        rows.push(row);
    }
    write_table(&out.join("correction.csv"), &hash, &col_refs, &rows)?;

    let phase_plane = match trajectory.phase_plane_check() {
        Ok(r) => PhasePlaneDto::found(&r),
        Err(e) => PhasePlaneDto::not_found(e.to_string()),
    };
    let decay = trajectory.verify_decay_rates(k_max)?;
    let report = CorrectionReport {
        config_hash: hash,
        params: (&params).into(),
        bounds: (&trajectory.reported_bounds()).into(),
        phase_plane,
        decay_rows: report::decay_rows(&decay),
    };
    write_text(&out.join("correction_report.json"), &to_json(&report))
}

const SUMMARY_COLUMNS: [&str; 11] = [
    "t", "E0", "E1", "E2", "sup_w", "sup_wt", "x_minus", "x_plus", "mass", "eta_x_min", "dt",
];

const SERIES_COLUMNS: [&str; 19] = [
    "t",
    "e0",
    "e1",
    "e2",
    "e01",
    "desk_total",
    "sup_abs_w",
    "sup_abs_wt",
    "sup_velocity_diff",
    "sup_density_ratio",
    "x_minus",
    "x_plus",
    "boundary_d1",
    "boundary_d2",
    "boundary_d3",
    "weighted_sup_total",
    "mass",
    "eta_x_min",
    "dt",
];

fn series_row(s: &RunSample) -> Vec<f64> {
    vec![
        s.t,
        s.e0,
        s.e1,
        s.e2,
        s.e01,
        s.desk_total,
        s.sup_abs_w,
        s.sup_abs_wt,
        s.sup_velocity_diff,
        s.sup_density_ratio,
        s.x_minus,
        s.x_plus,
        s.boundary_derivative[0],
        s.boundary_derivative[1],
        s.boundary_derivative[2],
        s.weighted_sup_total,
        s.mass,
        s.eta_x_min,
        s.dt,
    ]
}

/// Rebuild a run history from a series table (the `rates` re-fit path).
pub fn history_from_table(table: &Table) -> Result<RunHistory> {
    for col in SERIES_COLUMNS {
        if !table.columns.iter().any(|c| c == col) {
            return Err(CliError::Validation(format!(
                "series table is missing column {col}"
            )));
        }
    }
    let col = |name: &str| table.column(name).unwrap();
    let (t, e0, e1, e2, e01) = (col("t"), col("e0"), col("e1"), col("e2"), col("e01"));
    let (desk, sw, swt) = (col("desk_total"), col("sup_abs_w"), col("sup_abs_wt"));
    let (svd, sdr) = (col("sup_velocity_diff"), col("sup_density_ratio"));
    let (xm, xp) = (col("x_minus"), col("x_plus"));
    let (d1, d2, d3) = (col("boundary_d1"), col("boundary_d2"), col("boundary_d3"));
    let (wst, mass, exm, dt) = (
        col("weighted_sup_total"),
        col("mass"),
        col("eta_x_min"),
        col("dt"),
    );
    let samples = (0..t.len())
        .map(|i| RunSample {
            t: t[i],
            e0: e0[i],
            e1: e1[i],
            e2: e2[i],
            e01: e01[i],
            desk_total: desk[i],
            sup_abs_w: sw[i],
            sup_abs_wt: swt[i],
            sup_velocity_diff: svd[i],
            sup_density_ratio: sdr[i],
            x_minus: xm[i],
            x_plus: xp[i],
            boundary_derivative: [d1[i], d2[i], d3[i]],
            weighted_sup_total: wst[i],
            mass: mass[i],
            eta_x_min: exm[i],
            dt: dt[i],
        })
        .collect();
    Ok(RunHistory { samples })
}

fn build_simulation_report(
    config: &RunConfig,
    artifacts: &crate::runner::RunArtifacts,
) -> SimulationReport {
    let window = config.fit_window();
    let theorem2 = theorem2_report(&artifacts.history, &artifacts.params, window);
    let energy = energy_decay_report(&artifacts.history, &artifacts.params, window);
    let embedding = artifacts
        .history
        .samples
        .iter()
        .filter(|s| s.desk_total > 0.0)
        .map(|s| s.weighted_sup_total / s.desk_total)
        .fold(0.0f64, f64::max);
    let (outcome, dt_deg, deg_min) = match artifacts.outcome {
        RunOutcome::Completed => ("completed".to_string(), None, None),
        RunOutcome::Degenerate { t, eta_x_min } => {
            ("degenerate".to_string(), Some(t), Some(eta_x_min))
        }
    };
    SimulationReport {
        config_hash: config.hash(),
        params: (&artifacts.params).into(),
        profile: (&artifacts.profile).into(),
        outcome,
        degeneracy_time: dt_deg,
        degeneracy_eta_x_min: deg_min,
        steps: artifacts.steps,
        samples: artifacts.history.samples.len(),
        theorem2: (&theorem2).into(),
        energy_decay: (&energy).into(),
        embedding_ratio_sup: embedding,
    }
}

/// Full simulation: summary and series tables, snapshots, final JSON report.
/// Returns the run outcome so the caller can set the exit code.
pub fn cmd_simulate(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    ensure_dir(out)?;
    let hash = config.hash();
    let artifacts = run_simulation(config)?;

    let summary_rows: Vec<Vec<f64>> = artifacts
        .history
        .samples
        .iter()
        .map(|s| {
            vec![
                s.t,
                s.e0,
                s.e1,
                s.e2,
                s.sup_abs_w,
                s.sup_abs_wt,
                s.x_minus,
                s.x_plus,
                s.mass,
                s.eta_x_min,
                s.dt,
            ]
        })
        .collect();
    write_table(
        &out.join("summary.csv"),
        &hash,
        &SUMMARY_COLUMNS,
        &summary_rows,
    )?;

    let series_rows: Vec<Vec<f64>> = artifacts.history.samples.iter().map(series_row).collect();
    write_table(
        &out.join("series.csv"),
        &hash,
        &SERIES_COLUMNS,
        &series_rows,
    )?;

    let snap_dir = out.join("snapshots");
    ensure_dir(&snap_dir)?;
    let grid = build_grid(&artifacts.profile, config.n_cells)?;
    for (seq, data) in artifacts.snapshots.iter().enumerate() {
        let snap = &data.snapshot;
        let rows: Vec<Vec<f64>> = (0..grid.n_nodes())
            .map(|i| {
                vec![
                    grid.nodes[i],
                    data.w[i],
                    data.w_t[i],
                    snap.density[i],
                    snap.velocity[i],
                    snap.density_ref[i],
                    snap.velocity_ref[i],
                    snap.density_diff[i],
                    snap.velocity_diff[i],
                ]
            })
            .collect();
        write_table(
            &snap_dir.join(format!("snap_{seq:03}.csv")),
            &hash,
            &[
                "x", "w", "w_t", "rho", "u", "rho_bar", "u_bar", "rho_diff", "u_diff",
            ],
            &rows,
        )?;
    }

    let report = build_simulation_report(config, &artifacts);
    write_text(&out.join("report.json"), &to_json(&report))?;
    Ok(artifacts.outcome)
}

/// Re-fit the rate tables from an existing series.csv.
pub fn cmd_rates(config: &RunConfig, out: &Path) -> Result<()> {
    let series_path = out.join("series.csv");
    let table = read_table(&series_path)?;
    let history = history_from_table(&table)?;
    let params = config.gas_parameters()?;
    let t_last = history.samples.last().map(|s| s.t).unwrap_or(config.t_end);
    let window = (config.fit_window_lo, config.fit_window_hi.unwrap_or(t_last));
    let theorem2 = theorem2_report(&history, &params, window);
    let energy = energy_decay_report(&history, &params, window);

    #[derive(serde::Serialize)]
    struct RatesReport {
        config_hash: String,
        source_hash: Option<String>,
        theorem2: crate::report::Theorem2Dto,
        energy_decay: crate::report::EnergyDecayDto,
    }
    let report = RatesReport {
        config_hash: config.hash(),
        source_hash: table.config_hash.clone(),
        theorem2: (&theorem2).into(),
        energy_decay: (&energy).into(),
    };
    write_text(&out.join("rates_report.json"), &to_json(&report))
}

/// Difference of two nested solutions in the discrete RMS norm at the coarse
/// nodes. RMS is the right meter here: the degenerate weight leaves the cell
/// beside each vacuum boundary first-order, and that fixed-width layer would
/// dominate a max norm without reflecting the field error.
pub fn nested_rms_diff(coarse: &[f64], fine: &[f64]) -> f64 {
    let sum: f64 = coarse
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let d = w - fine[2 * i];
            d * d
        })
        .sum();
    (sum / coarse.len() as f64).sqrt()
}

/// Repeat the run across a doubling grid list and report Richardson orders
/// of w(., t_probe) in the RMS norm at shared nodes.
pub fn cmd_refine(config: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let ns = &config.refine_n_list;
    for w in ns.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(CliError::Validation(format!(
                "refine n_list must double at each step, got {} -> {}",
                w[0], w[1]
            )));
        }
    }
    let solutions: Vec<Vec<f64>> = ns
        .iter()
        .map(|&n| probe_solution(config, n, config.t_probe))
        .collect::<Result<_>>()?;

    let mut diffs = Vec::new();
    for k in 0..ns.len() - 1 {
        diffs.push(nested_rms_diff(&solutions[k], &solutions[k + 1]));
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (k, &n) in ns.iter().enumerate() {
        let diff_to_next = diffs.get(k).copied();
        let observed_order = if k + 2 <= diffs.len() {
            Some(richardson_order(diffs[k], diffs[k + 1], 2.0))
        } else {
            None
        };
        rows.push(vec![
            n as f64,
            diff_to_next.unwrap_or(f64::NAN),
            observed_order.unwrap_or(f64::NAN),
        ]);
        entries.push(RefineEntry {
            n,
            diff_to_next,
            observed_order,
        });
    }
    write_table(
        &out.join("refine.csv"),
        &config.hash(),
        &["n", "diff_to_next", "observed_order"],
        &rows,
    )?;
    let report = RefineReport {
        config_hash: config.hash(),
        t_probe: config.t_probe,
        entries,
    };
    write_text(&out.join("refine_report.json"), &to_json(&report))
}

/// Cross product of the sweep lists; each cell is a full simulate run into
/// its own directory, failures stay isolated, and the aggregate table keeps
/// the grid order.
pub fn cmd_sweep(config: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let mut cells = Vec::new();
    for &gamma in &config.gamma_list {
        for &lambda in &config.lambda_list {
            for &mu in &config.mu_list {
                cells.push((gamma, lambda, mu));
            }
        }
    }
    let results: Vec<(usize, Vec<f64>)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(gamma, lambda, mu))| {
            let mut cell_config = config.clone();
            cell_config.gamma = gamma;
            cell_config.lambda = lambda;
            cell_config.mu = mu;
            cell_config.delta = None; // midpoint default follows the cell parameters
            let cell_dir = out.join(format!("cell_{idx:03}"));
            let row = match run_cell(&cell_config, &cell_dir) {
                Ok(row) => row,
                Err(e) => vec![
                    e.exit_code() as f64,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                ],
            };
            let mut full = vec![idx as f64, gamma, lambda, mu];
            full.extend(row);
            (idx, full)
        })
        .collect();

    let mut rows: Vec<(usize, Vec<f64>)> = results;
    rows.sort_by_key(|(idx, _)| *idx);
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r).collect();
    write_table(
        &out.join("sweep.csv"),
        &config.hash(),
        &[
            "cell",
            "gamma",
            "lambda",
            "mu",
            "exit_code",
            "t_final",
            "boundary_exponent",
            "velocity_exponent",
            "density_exponent",
            "e0_ratio_sup",
        ],
        &rows,
    )
}

fn run_cell(config: &RunConfig, dir: &Path) -> Result<Vec<f64>> {
    crate::config::validate(config)?;
    let outcome = cmd_simulate(config, dir)?;
    let table = read_table(&dir.join("series.csv"))?;
    let history = history_from_table(&table)?;
    let params = config.gas_parameters()?;
    let t_final = history.samples.last().map(|s| s.t).unwrap_or(f64::NAN);
    let window = (config.fit_window_lo, config.fit_window_hi.unwrap_or(t_final));
    let theorem2 = theorem2_report(&history, &params, window);
    let energy = energy_decay_report(&history, &params, window);
    let get = |name: &str| {
        theorem2
            .row(name)
            .map(|r| r.fit.exponent)
            .unwrap_or(f64::NAN)
    };
    let e0_sup = energy
        .boundedness_row("E0")
        .map(|r| r.ratio_sup)
        .unwrap_or(f64::NAN);
    let code = match outcome {
        RunOutcome::Completed => 0.0,
        RunOutcome::Degenerate { .. } => 3.0,
    };
    Ok(vec![
        code,
        t_final,
        get("boundary_position"),
        get("velocity_diff"),
        get("density_diff_weighted"),
        e0_sup,
    ])
}

/// Standalone Hardy-quotient study across grids and weight exponents.
pub fn cmd_hardy(config: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let params = config.gas_parameters()?;
    let profile = derive_profile(&params, config.mass).map_err(CliError::from)?;
    let mut rows = Vec::new();
    // f_id 0: F = 1; f_id 1: F = cos(pi x / (2L))
    for f_id in [0usize, 1] {
        for &theta in &config.hardy_theta_list {
            for &n in &config.hardy_n_list {
                let grid = build_grid(&profile, n)?;
                let f: Vec<f64> = grid
                    .nodes
                    .iter()
                    .map(|&x| match f_id {
                        0 => 1.0,
                        _ => (std::f64::consts::PI * x / (2.0 * profile.half_width)).cos(),
                    })
                    .collect();
                let r = hardy_ratio(&grid, &f, theta).map_err(CliError::from)?;
                rows.push(vec![
                    f_id as f64,
                    theta,
                    n as f64,
                    r.ratio,
                    if r.degenerate { 1.0 } else { 0.0 },
                ]);
            }
        }
    }
    write_table(
        &out.join("hardy.csv"),
        &config.hash(),
        &["f_id", "theta", "n", "ratio", "degenerate"],
        &rows,
    )
}
