//! The scalar correction h(t) that turns the self-similar ansatz into an
//! exact solution of the damped Lagrangian equation, its integrator, and the
//! diagnostics on the corrected slope eta_x(t) = (1+t)^b + h(t).

use crate::error::{Error, Result};
use crate::ode::{self, OdeSolution, StepNode};
use crate::params::GasParameters;
use crate::rates::{fit_power_law, FitConfig};
use crate::rates::RateFit;

/// Point on the correction trajectory: h and z = dh/dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionState {
    pub t: f64,
    pub h: f64,
    pub z: f64,
}

/// Corrected ansatz slope and its time derivatives at one time.
///
/// `derivatives[k-1]` holds d^k eta_x / dt^k for k = 1..=k_max; each is an
/// exact algebraic function of (t, h, z) obtained by differentiating the
/// slope ODE, never by finite differencing.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzEvaluation {
    pub t: f64,
    pub eta_x: f64,
    pub derivatives: Vec<f64>,
}

impl AnsatzEvaluation {
    pub fn eta_xt(&self) -> f64 {
        self.derivatives[0]
    }
}

/// h trajectory over [0, t_end] plus the parameters that generated it.
#[derive(Debug, Clone)]
pub struct CorrectionTrajectory {
    params: GasParameters,
    solution: OdeSolution<2>,
    frozen: bool,
}

fn reference_slope(b: f64, t: f64) -> f64 {
    (1.0 + t).powf(b)
}

/// Right-hand side of the first-order system for (h, z):
///   h' = z,
///   z' = -mu (1+t)^-lambda z - mu b [rb^-gamma - (rb+h)^-gamma] - rb_tt,
/// with rb = (1+t)^b the uncorrected slope. The bracket is evaluated through
/// expm1/ln_1p so it stays accurate when h << rb.
fn correction_rhs(params: &GasParameters, t: f64, y: &[f64; 2]) -> [f64; 2] {
    let (h, z) = (y[0], y[1]);
    let b = params.similarity_exponent();
    let gamma = params.gamma();
    let rb = reference_slope(b, t);
    let rb_tt = b * (b - 1.0) * (1.0 + t).powf(b - 2.0);
    // rb^-g - (rb+h)^-g = -rb^-g * expm1(-g ln(1+h/rb))
    let bracket = -rb.powf(-gamma) * (-gamma * (h / rb).ln_1p()).exp_m1();
    let zp = -params.damping_coefficient(t) * z - params.mu() * b * bracket - rb_tt;
    [z, zp]
}

/// Integrate the correction ODE from (h, z) = (0, 0) over [0, t_end] with an
/// embedded RK 5(4) pair at local tolerance `tol`.
pub fn integrate_correction(
    params: &GasParameters,
    t_end: f64,
    tol: f64,
) -> Result<CorrectionTrajectory> {
    if !(t_end > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "need t_end > 0 and tol > 0, got t_end = {t_end}, tol = {tol}"
        )));
    }
    let p = *params;
    let solution = ode::integrate_dopri5(
        move |t, y| correction_rhs(&p, t, y),
        0.0,
        [0.0, 0.0],
        t_end,
        tol,
    )?;
    Ok(CorrectionTrajectory {
        params: p,
        solution,
        frozen: false,
    })
}

impl CorrectionTrajectory {
    /// Diagnostic mode with h frozen to zero: the slope is exactly the pure
    /// power law (1+t)^b and all derivatives are its analytic derivatives.
    pub fn frozen_zero(params: &GasParameters, t_end: f64) -> Self {
        let nodes = vec![
            StepNode {
                t: 0.0,
                y: [0.0, 0.0],
                dy: [0.0, 0.0],
            },
            StepNode {
                t: t_end,
                y: [0.0, 0.0],
                dy: [0.0, 0.0],
            },
        ];
        CorrectionTrajectory {
            params: *params,
            solution: OdeSolution { nodes },
            frozen: true,
        }
    }

    pub fn params(&self) -> &GasParameters {
        &self.params
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end()
    }

    pub fn accepted_steps(&self) -> &[StepNode<2>] {
        &self.solution.nodes
    }

    /// Dense evaluation of (h, z) at any t in [0, t_end].
    pub fn eval(&self, t: f64) -> CorrectionState {
        let y = self.solution.eval(t);
        CorrectionState {
            t,
            h: y[0],
            z: y[1],
        }
    }

    /// Corrected slope eta_x(t) = (1+t)^b + h(t).
    pub fn eta_x(&self, t: f64) -> f64 {
        let b = self.params.similarity_exponent();
        reference_slope(b, t) + self.eval(t).h
    }

    /// Slope and derivatives up to order `k_max` (at most 4).
    ///
    /// k = 1 is z plus the reference slope derivative; k >= 2 comes from the
    /// slope ODE differentiated analytically, so each order is exact given
    /// (h, z).
    pub fn ansatz_derivatives(&self, t: f64, k_max: usize) -> AnsatzEvaluation {
        assert!(k_max <= 4, "ansatz derivatives are implemented up to k = 4");
        let b = self.params.similarity_exponent();
        if self.frozen {
            let eta_x = reference_slope(b, t);
            let mut derivatives = Vec::with_capacity(k_max);
            let mut coeff = 1.0;
            for k in 1..=k_max {
                coeff *= b - (k as f64 - 1.0);
                derivatives.push(coeff * (1.0 + t).powf(b - k as f64));
            }
            return AnsatzEvaluation {
                t,
                eta_x,
                derivatives,
            };
        }
        let state = self.eval(t);
        ansatz_derivatives_from_state(&self.params, t, state.h, state.z, k_max)
    }

    /// Residual of the slope ODE
    /// d2 + mu (1+t)^-lambda d1 - mu b eta_x^-gamma at time t; zero up to
    /// roundoff because d2 is defined by solving the ODE.
    pub fn slope_ode_residual(&self, t: f64) -> f64 {
        let eval = self.ansatz_derivatives(t, 2);
        let p = &self.params;
        eval.derivatives[1] + p.damping_coefficient(t) * eval.derivatives[0]
            - p.mu() * p.similarity_exponent() * eval.eta_x.powf(-p.gamma())
    }

    /// Largest scaled defect of the dense output against the ODE:
    /// |interpolant'(t) - f(t, interpolant(t))| * step / (tol * (1 + |h| + |z|)),
    /// sampled at interior points of every accepted step. Values of order one
    /// mean the interpolant is as accurate as the step control promised.
    pub fn max_scaled_defect(&self, tol: f64) -> f64 {
        let mut worst = 0.0f64;
        for w in self.solution.nodes.windows(2) {
            let (n0, n1) = (&w[0], &w[1]);
            let dt = n1.t - n0.t;
            for m in 1..5 {
                let t = n0.t + dt * (m as f64) / 5.0;
                let y = self.solution.eval(t);
                let dy_int = self.solution.eval_derivative(t);
                let f = correction_rhs(&self.params, t, &y);
                let scale = tol * (1.0 + y[0].abs() + y[1].abs());
                let defect = ((dy_int[0] - f[0]).abs()).max((dy_int[1] - f[1]).abs());
                worst = worst.max(defect * dt / scale);
            }
        }
        worst
    }

    /// Log-spaced sample times covering the trajectory (plus t = 0).
    pub fn sample_times(&self, per_decade: usize) -> Vec<f64> {
        let t_end = self.t_end();
        let decades = (1.0 + t_end).log10();
        let n = ((decades * per_decade as f64).ceil() as usize).max(2);
        let mut ts = Vec::with_capacity(n + 1);
        ts.push(0.0);
        for i in 1..=n {
            let t = (1.0 + t_end).powf(i as f64 / n as f64) - 1.0;
            if t > *ts.last().unwrap() {
                ts.push(t.min(t_end));
            }
        }
        ts
    }

    /// Run-reported bound constants: (max h, sup eta_x/(1+t)^b, min of the
    /// same ratio, min h).
    pub fn reported_bounds(&self) -> CorrectionBounds {
        let b = self.params.similarity_exponent();
        let mut max_h = f64::MIN;
        let mut min_h = f64::MAX;
        let mut k_sup = f64::MIN;
        let mut ratio_min = f64::MAX;
        for &t in &self.sample_times(200) {
            let s = self.eval(t);
            let ratio = 1.0 + s.h / reference_slope(b, t);
            max_h = max_h.max(s.h);
            min_h = min_h.min(s.h);
            k_sup = k_sup.max(ratio);
            ratio_min = ratio_min.min(ratio);
        }
        CorrectionBounds {
            max_h,
            min_h,
            envelope_sup: k_sup,
            envelope_inf: ratio_min,
        }
    }

    /// Locate the phase-plane pattern of (h, z) on a dense sampling of the
    /// trajectory. See [`phase_plane_check`].
    pub fn phase_plane_check(&self) -> Result<PhasePlaneReport> {
        let samples: Vec<CorrectionState> =
            self.sample_times(400).iter().map(|&t| self.eval(t)).collect();
        phase_plane_check(&samples)
    }

    /// Fit the decay of each slope derivative and compare with the predicted
    /// envelope. See [`DecayReport`].
    pub fn verify_decay_rates(&self, k_max: usize) -> Result<DecayReport> {
        assert!(k_max <= 4, "decay report is implemented up to k = 4");
        let t_end = self.t_end();
        if (1.0 + t_end).log10() < 2.0 {
            return Err(Error::InsufficientSpan(format!(
                "decay rates need at least two decades, have t_end = {t_end}"
            )));
        }
        let params = &self.params;
        let b = params.similarity_exponent();
        let threshold = params.mu() + 2.0 / (params.gamma() + 1.0);
        let times = self.sample_times(200);

        let mut rows = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let branch = if k == 0 || params.lambda_lt_1() || (k as f64) < threshold - 1e-9 {
                DecayBranch::Power {
                    exponent: b - k as f64,
                }
            } else {
                DecayBranch::LogCorrected {
                    exponent: -params.mu(),
                    boundary_case: (k as f64 - threshold).abs() <= 1e-9,
                }
            };

            let series: Vec<(f64, f64)> = times
                .iter()
                .map(|&t| {
                    let v = if k == 0 {
                        self.eta_x(t)
                    } else {
                        self.ansatz_derivatives(t, k).derivatives[k - 1]
                    };
                    (t, v.abs())
                })
                .collect();

            // Fit on the last decade of (1+t).
            let t_hi = t_end;
            let t_lo = (1.0 + t_end) / 10.0 - 1.0;
            let fit = fit_power_law(
                &series,
                &FitConfig {
                    t_lo,
                    t_hi,
                    with_log_factor: branch.is_log(),
                },
            )?;

            // Envelope ratio sup per decade (skipping the start-up transient
            // where the log envelope vanishes).
            let envelope = |t: f64| -> f64 {
                match branch {
                    DecayBranch::Power { exponent } => (1.0 + t).powf(exponent),
                    DecayBranch::LogCorrected { exponent, .. } => {
                        (1.0 + t).powf(exponent) * (1.0 + t).ln()
                    }
                }
            };
            let mut decade_sups = Vec::new();
            let mut d_hi = 1.0 + t_end;
            while d_hi > 10.0 {
                let d_lo = d_hi / 10.0;
                let mut sup = 0.0f64;
                let mut inf = f64::MAX;
                for &(t, v) in &series {
                    if 1.0 + t >= d_lo && 1.0 + t <= d_hi {
                        let r = v / envelope(t);
                        sup = sup.max(r);
                        inf = inf.min(r);
                    }
                }
                decade_sups.push(DecadeEnvelope {
                    t_lo: d_lo - 1.0,
                    t_hi: d_hi - 1.0,
                    sup,
                    inf,
                });
                d_hi = d_lo;
            }
            decade_sups.reverse();
            let sup_ratio = decade_sups
                .iter()
                .rev()
                .take(2)
                .map(|d| d.sup)
                .fold(0.0f64, f64::max);
            let inf_ratio = series
                .iter()
                .map(|&(t, v)| v / envelope(t))
                .fold(f64::MAX, f64::min);

            rows.push(DecayRow {
                k,
                branch,
                fit,
                sup_ratio_last_two_decades: sup_ratio,
                inf_ratio_full_range: inf_ratio,
                decade_envelope_sups: decade_sups,
            });
        }
        Ok(DecayReport { rows })
    }
}

/// Exact derivative stack of the corrected slope given (h, z) at time t.
pub fn ansatz_derivatives_from_state(
    params: &GasParameters,
    t: f64,
    h: f64,
    z: f64,
    k_max: usize,
) -> AnsatzEvaluation {
    assert!(k_max <= 4, "ansatz derivatives are implemented up to k = 4");
    let b = params.similarity_exponent();
    let gamma = params.gamma();
    let mu = params.mu();
    let lam = params.lambda();
    let u = 1.0 + t;
    let eta_x = reference_slope(b, t) + h;
    let mut derivatives = Vec::with_capacity(k_max);
    if k_max >= 1 {
        derivatives.push(b * u.powf(b - 1.0) + z);
    }
    if k_max >= 2 {
        let d1 = derivatives[0];
        derivatives.push(-mu * u.powf(-lam) * d1 + mu * b * eta_x.powf(-gamma));
    }
    if k_max >= 3 {
        let (d1, d2) = (derivatives[0], derivatives[1]);
        derivatives.push(
            mu * lam * u.powf(-lam - 1.0) * d1 - mu * u.powf(-lam) * d2
                - mu * b * gamma * eta_x.powf(-gamma - 1.0) * d1,
        );
    }
    if k_max >= 4 {
        let (d1, d2, d3) = (derivatives[0], derivatives[1], derivatives[2]);
        derivatives.push(
            -mu * lam * (lam + 1.0) * u.powf(-lam - 2.0) * d1
                + 2.0 * mu * lam * u.powf(-lam - 1.0) * d2
                - mu * u.powf(-lam) * d3
                + mu * b * gamma * (gamma + 1.0) * eta_x.powf(-gamma - 2.0) * d1 * d1
                - mu * b * gamma * eta_x.powf(-gamma - 1.0) * d2,
        );
    }
    AnsatzEvaluation {
        t,
        eta_x,
        derivatives,
    }
}

/// Run-reported bound constants for one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionBounds {
    pub max_h: f64,
    pub min_h: f64,
    /// sup of eta_x / (1+t)^b over the run.
    pub envelope_sup: f64,
    /// inf of the same ratio; must not drop below 1 (up to solver noise).
    pub envelope_inf: f64,
}

/// Outcome of the phase-plane structure search on (h, z).
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlaneReport {
    /// Time of the positive maximum of z.
    pub t0: f64,
    /// First zero crossing of z after t0; h is maximal here.
    pub t1: f64,
    /// Time of the negative minimum of z.
    pub t2: f64,
    pub z_max: f64,
    pub h_max: f64,
    pub z_min: f64,
    /// Monotonicity verdicts on [start,t0], [t0,t1], [t1,t2], [t2,end]:
    /// (z up, h up), (z down, h up), (z down, h down), (z up, h down).
    pub intervals_ok: [bool; 4],
    pub h_end_over_h_max: f64,
}

/// Search a sampled (h, z) trajectory for the pattern: z rises to a positive
/// maximum at t0, falls through zero at t1 where h peaks, keeps falling to a
/// negative minimum at t2, then rises back toward zero while h decays.
pub fn phase_plane_check(samples: &[CorrectionState]) -> Result<PhasePlaneReport> {
    if samples.len() < 4 {
        return Err(Error::PatternNotFound("too few samples".into()));
    }
    if samples.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::PatternNotFound(
            "sample times must be strictly increasing".into(),
        ));
    }
    let i0 = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.z.total_cmp(&b.1.z))
        .map(|(i, _)| i)
        .unwrap();
    if !(samples[i0].z > 0.0) {
        return Err(Error::PatternNotFound(
            "z has no positive maximum".into(),
        ));
    }
    let i1 = match samples[i0..].iter().position(|s| s.z <= 0.0) {
        Some(off) => i0 + off,
        None => {
            return Err(Error::PatternNotFound(
                "z never returns to zero within the horizon".into(),
            ))
        }
    };
    let i2 = samples
        .iter()
        .enumerate()
        .skip(i1)
        .min_by(|a, b| a.1.z.total_cmp(&b.1.z))
        .map(|(i, _)| i)
        .unwrap();
    if !(samples[i2].z < 0.0) {
        return Err(Error::PatternNotFound(
            "z has no negative minimum after the zero crossing".into(),
        ));
    }
    if i2 + 1 >= samples.len() {
        return Err(Error::PatternNotFound(
            "z minimum sits on the horizon; nothing after it".into(),
        ));
    }

    // Monotonicity with a small absolute slack for solver noise.
    let eps = 1e-12;
    let mono = |lo: usize, hi: usize, up: bool, of_h: bool| -> bool {
        samples[lo..=hi].windows(2).all(|w| {
            let d = if of_h {
                w[1].h - w[0].h
            } else {
                w[1].z - w[0].z
            };
            if up {
                d >= -eps
            } else {
                d <= eps
            }
        })
    };
    let intervals_ok = [
        mono(0, i0, true, false) && mono(0, i0, true, true),
        mono(i0, i1, false, false) && mono(i0, i1, true, true),
        mono(i1, i2, false, false) && mono(i1, i2, false, true),
        mono(i2, samples.len() - 1, true, false) && mono(i2, samples.len() - 1, false, true),
    ];
    let h_max = samples.iter().map(|s| s.h).fold(f64::MIN, f64::max);
    Ok(PhasePlaneReport {
        t0: samples[i0].t,
        t1: samples[i1].t,
        t2: samples[i2].t,
        z_max: samples[i0].z,
        h_max,
        z_min: samples[i2].z,
        intervals_ok,
        h_end_over_h_max: samples.last().unwrap().h / h_max,
    })
}

/// Which envelope a derivative order is predicted to obey.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayBranch {
    Power { exponent: f64 },
    /// lambda = 1 with k >= mu + 2/(gamma+1): envelope (1+t)^-mu ln(1+t).
    /// `boundary_case` marks k equal to the threshold, where the logarithmic
    /// factor is the computed borderline bound rather than a strict-excess one.
    LogCorrected { exponent: f64, boundary_case: bool },
}

impl DecayBranch {
    pub fn is_log(&self) -> bool {
        matches!(self, DecayBranch::LogCorrected { .. })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            DecayBranch::Power { exponent } => exponent,
            DecayBranch::LogCorrected { exponent, .. } => exponent,
        }
    }
}

/// Envelope ratio extrema over one decade of (1+t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecadeEnvelope {
    pub t_lo: f64,
    pub t_hi: f64,
    pub sup: f64,
    pub inf: f64,
}

/// Decay comparison for one derivative order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub k: usize,
    pub branch: DecayBranch,
    pub fit: RateFit,
    pub sup_ratio_last_two_decades: f64,
    pub inf_ratio_full_range: f64,
    pub decade_envelope_sups: Vec<DecadeEnvelope>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn row(&self, k: usize) -> &DecayRow {
        &self.rows[k]
    }
}
