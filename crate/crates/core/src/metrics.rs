//! Weighted energy functionals, weighted sup norms, and the Hardy-ratio
//! diagnostic evaluated on discrete states.
//!
//! Time derivatives are sourced exactly: order 1 is the stored velocity,
//! order 2 the discrete acceleration, order 3 (optional) a second-order
//! backward difference of the acceleration history.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::{Solver, SolverState};

/// Scope of the desk-scale energy hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub j_max: usize,
    pub i_max: usize,
    /// Estimate the third time derivative by differencing stored
    /// accelerations (needed for the j = 2 energy and the j = 3 sup norm).
    pub use_j3_fd: bool,
    /// The full derivative count of the theory; recorded so reports can say
    /// whether the computed orders sit inside the theorem's scope.
    pub m_paper: usize,
}

impl EnergyConfig {
    pub fn new(params: &crate::params::GasParameters, j_max: usize, i_max: usize, use_j3_fd: bool) -> Result<Self> {
        if j_max > 2 || i_max > 2 {
            return Err(Error::InvalidParameters(format!(
                "desk-scale energies support j_max <= 2 and i_max <= 2, got ({j_max}, {i_max})"
            )));
        }
        Ok(EnergyConfig {
            j_max,
            i_max,
            use_j3_fd,
            m_paper: params.derivative_count_m(),
        })
    }

    pub fn within_theorem_scope(&self) -> bool {
        self.j_max + self.i_max <= self.m_paper
    }
}

/// Quadrature rule selector for the energy integrals (the midpoint variant
/// exists as an accuracy cross-check).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    Trapezoid,
    Midpoint,
}

fn integrate(grid: &Grid, rule: QuadRule, exponent: f64, values: &[f64]) -> Result<f64> {
    match rule {
        QuadRule::Trapezoid => grid.integrate_sigma_weighted(exponent, values),
        QuadRule::Midpoint => grid.integrate_sigma_weighted_midpoint(exponent, values),
    }
}

/// j-th time derivative of w at the nodes (j <= 3).
pub fn time_derivative(solver: &Solver, state: &SolverState, j: usize) -> Result<Vec<f64>> {
    match j {
        0 => Ok(state.w.clone()),
        1 => Ok(state.w_t.clone()),
        2 => solver.rhs_acceleration(state.t, &state.w, &state.w_t),
        3 => solver.third_time_derivative(state),
        _ => Err(Error::InvalidParameters(format!(
            "time derivatives are available up to order 3, got {j}"
        ))),
    }
}

/// The j-th weighted energy
/// (1+t)^(2j - delta 1_{lambda<1}) * int [ sigma^alpha (d_t^j w)^2
///   + sigma^(alpha+1) (d_t^j w_x)^2 + (1+t)^(lambda+1) sigma^alpha (d_t^(j+1) w)^2 ].
pub fn energy_ej(solver: &Solver, state: &SolverState, j: usize) -> Result<f64> {
    energy_ej_with_rule(solver, state, j, QuadRule::Trapezoid)
}

pub fn energy_ej_with_rule(
    solver: &Solver,
    state: &SolverState,
    j: usize,
    rule: QuadRule,
) -> Result<f64> {
    let params = &solver.params;
    let grid = solver.grid;
    let t = state.t;
    let alpha = params.alpha();
    let dj = time_derivative(solver, state, j)?;
    let dj1 = time_derivative(solver, state, j + 1)?;
    let djx = grid.derivative(&dj);

    let sq = |v: &[f64]| -> Vec<f64> { v.iter().map(|&x| x * x).collect() };
    let term_w = integrate(grid, rule, alpha, &sq(&dj))?;
    let term_wx = integrate(grid, rule, alpha + 1.0, &sq(&djx))?;
    let term_wt = integrate(grid, rule, alpha, &sq(&dj1))?;

    let time_weight =
        (1.0 + t).powf(2.0 * j as f64 - params.delta() * params.indicator_lambda_lt_1());
    Ok(time_weight * (term_w + term_wx + (1.0 + t).powf(params.lambda() + 1.0) * term_wt))
}

/// The mixed space-time weighted energy
/// (1+t)^(2j - delta 1_{lambda<1}) * int [ sigma^(alpha+i+1) (d_t^j d_x^(i+1) w)^2
///   + sigma^(alpha+i-1) (d_t^j d_x^i w)^2 ].
///
/// Spatial derivatives are repeated second-order differences, so the
/// effective accuracy drops by one order per extra i.
pub fn energy_eji(solver: &Solver, state: &SolverState, j: usize, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::InvalidParameters(
            "energy_eji needs i >= 1; use energy_ej for i = 0".into(),
        ));
    }
    let params = &solver.params;
    let grid = solver.grid;
    let alpha = params.alpha();
    let dj = time_derivative(solver, state, j)?;
    let mut dx_i = dj;
    for _ in 0..i {
        dx_i = grid.derivative(&dx_i);
    }
    let dx_i1 = grid.derivative(&dx_i);
    let sq = |v: &[f64]| -> Vec<f64> { v.iter().map(|&x| x * x).collect() };
    let hi = grid.integrate_sigma_weighted(alpha + i as f64 + 1.0, &sq(&dx_i1))?;
    let lo = grid.integrate_sigma_weighted(alpha + i as f64 - 1.0, &sq(&dx_i))?;
    let time_weight = (1.0 + state.t)
        .powf(2.0 * j as f64 - params.delta() * params.indicator_lambda_lt_1());
    Ok(time_weight * (hi + lo))
}

/// One weighted sup-norm entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEntry {
    pub j: usize,
    /// Spatial order: 0 for the plain time rows, 1 for the gradient rows,
    /// i >= 1 with the sigma^((2i+j-3)/2) weight for the mixed rows.
    pub i: usize,
    pub mixed: bool,
    pub value: f64,
}

/// Weighted sup norms over the nodes, mirroring the pointwise target of the
/// energy method.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormReport {
    pub entries: Vec<SupNormEntry>,
    pub total: f64,
}

/// Max over nodes of (1+t)^(2j - delta 1) |d_t^j w|^2 for each j, the same
/// for the first gradients (j <= 1), and the mixed terms
/// (1+t)^(2j - delta 1) |sigma^((2i+j-3)/2) d_t^j d_x^i w|^2 for 2i + j >= 4.
pub fn weighted_sup_norms(
    solver: &Solver,
    state: &SolverState,
    config: &EnergyConfig,
) -> Result<SupNormReport> {
    let params = &solver.params;
    let grid = solver.grid;
    let t = state.t;
    let ind = params.indicator_lambda_lt_1();
    let tw = |j: usize| (1.0 + t).powf(2.0 * j as f64 - params.delta() * ind);
    let sup_sq = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x * x));

    let j_top = if config.use_j3_fd && state.accel_history_len() >= 3 {
        3
    } else {
        config.j_max.min(2)
    };
    let mut entries = Vec::new();
    let mut cache: Vec<Vec<f64>> = Vec::new();
    for j in 0..=j_top {
        let dj = time_derivative(solver, state, j)?;
        entries.push(SupNormEntry {
            j,
            i: 0,
            mixed: false,
            value: tw(j) * sup_sq(&dj),
        });
        cache.push(dj);
    }
    for (j, dj) in cache.iter().enumerate().take(2) {
        let djx = grid.derivative(dj);
        entries.push(SupNormEntry {
            j,
            i: 1,
            mixed: false,
            value: tw(j) * sup_sq(&djx),
        });
    }
    // mixed sigma-weighted rows
    for j in 0..=config.j_max.min(j_top) {
        let mut dx_i = cache[j].clone();
        for i in 1..=config.i_max {
            dx_i = grid.derivative(&dx_i);
            if 2 * i + j >= 4 {
                let e = (2.0 * i as f64 + j as f64 - 3.0) / 2.0;
                let sup = dx_i
                    .iter()
                    .zip(grid.sigma_nodes.iter())
                    .map(|(&v, &s)| {
                        let wv = s.powf(e) * v;
                        wv * wv
                    })
                    .fold(0.0f64, f64::max);
                entries.push(SupNormEntry {
                    j,
                    i,
                    mixed: true,
                    value: tw(j) * sup,
                });
            }
        }
    }
    let total = entries.iter().map(|e| e.value).sum();
    Ok(SupNormReport { entries, total })
}

/// Desk-scale total energy: sum of the available E_j plus the mixed E_{j,i}
/// with i + j within the configured range.
pub fn desk_total_energy(solver: &Solver, state: &SolverState, config: &EnergyConfig) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..=config.j_max {
        if j == 2 && (!config.use_j3_fd || state.accel_history_len() < 3) {
            continue;
        }
        total += energy_ej(solver, state, j)?;
    }
    for j in 0..=config.j_max {
        if j == 2 && state.accel_history_len() < 3 {
            continue;
        }
        for i in 1..=config.i_max {
            total += energy_eji(solver, state, j, i)?;
        }
    }
    Ok(total)
}

/// Hardy-ratio outcome; `degenerate` marks the 0/0 convention for F = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyRatio {
    pub ratio: f64,
    pub degenerate: bool,
}

/// Quotient of int sigma^(theta-2) F^2 by int sigma^theta (F^2 + F_x^2) for
/// theta > 1. The numerator's endpoint weight may be singular for theta < 2;
/// the grid rule integrates those end cells with the midpoint rule.
pub fn hardy_ratio(grid: &Grid, f_values: &[f64], theta: f64) -> Result<HardyRatio> {
    if !(theta > 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let f_sq: Vec<f64> = f_values.iter().map(|&v| v * v).collect();
    let fx = grid.derivative(f_values);
    let both: Vec<f64> = f_values
        .iter()
        .zip(fx.iter())
        .map(|(&f, &g)| f * f + g * g)
        .collect();
    let num = grid.integrate_sigma_weighted(theta - 2.0, &f_sq)?;
    let den = grid.integrate_sigma_weighted(theta, &both)?;
    if den == 0.0 {
        return Ok(HardyRatio {
            ratio: 0.0,
            degenerate: true,
        });
    }
    Ok(HardyRatio {
        ratio: num / den,
        degenerate: false,
    })
}
