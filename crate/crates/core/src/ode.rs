//! Embedded Dormand-Prince 5(4) integrator with PI step-size control and
//! cubic Hermite dense output between accepted steps.

use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Step-controller safety factor; conservative enough that the cubic Hermite
// dense output stays within the per-step error budget.
const SAFETY: f64 = 0.8;

// 5th-order weights equal the last row of A (FSAL); these are b - b_hat.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One accepted step endpoint: state and its derivative at time t.
#[derive(Debug, Clone, Copy)]
pub struct StepNode<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// Accepted-step sequence covering [t0, t_end].
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub nodes: Vec<StepNode<N>>,
}

impl<const N: usize> OdeSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.nodes.first().map(|n| n.t).unwrap_or(0.0)
    }

    pub fn t_end(&self) -> f64 {
        self.nodes.last().map(|n| n.t).unwrap_or(0.0)
    }

    /// Index of the step interval containing t.
    fn interval_of(&self, t: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|n| n.t.total_cmp(&t))
        {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.nodes.len() - 2),
        }
    }

    /// Dense evaluation by cubic Hermite interpolation on each component.
    /// Clamps to the covered interval endpoints outside it.
    pub fn eval(&self, t: f64) -> [f64; N] {
        assert!(self.nodes.len() >= 2, "trajectory has no interior");
        let t = t.clamp(self.t_start(), self.t_end());
        let k = self.interval_of(t);
        let (n0, n1) = (&self.nodes[k], &self.nodes[k + 1]);
        let h = n1.t - n0.t;
        let s = (t - n0.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * n0.y[i] + h10 * h * n0.dy[i] + h01 * n1.y[i] + h11 * h * n1.dy[i];
        }
        out
    }

    /// Derivative of the Hermite interpolant (used by residual diagnostics;
    /// at the nodes it reproduces the stored dy exactly).
    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        assert!(self.nodes.len() >= 2, "trajectory has no interior");
        let t = t.clamp(self.t_start(), self.t_end());
        let k = self.interval_of(t);
        let (n0, n1) = (&self.nodes[k], &self.nodes[k + 1]);
        let h = n1.t - n0.t;
        let s = (t - n0.t) / h;
        let d00 = 6.0 * s * (s - 1.0) / h;
        let d10 = (1.0 - s) * (1.0 - 3.0 * s);
        let d01 = -d00;
        let d11 = s * (3.0 * s - 2.0);
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = d00 * n0.y[i] + d10 * n0.dy[i] + d01 * n1.y[i] + d11 * n1.dy[i];
        }
        out
    }
}

/// Integrate dy/dt = f(t, y) over [t0, t_end], storing every accepted step.
///
/// The local error per step is controlled against atol = rtol = tol in the
/// usual mixed scale; the controller is the standard PI rule with safety 0.9.
pub fn integrate_dopri5<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
) -> Result<OdeSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    assert!(t_end > t0, "integration span must be positive");
    assert!(tol > 0.0, "tolerance must be positive");
    let mut t = t0;
    let mut y = y0;
    let mut dy = f(t, &y);
    let mut nodes = vec![StepNode { t, y, dy }];

    // Initial step from the derivative scale.
    let scale0 = y0
        .iter()
        .zip(dy.iter())
        .map(|(yi, di)| (di.abs() / (1.0 + yi.abs())).abs())
        .fold(0.0f64, f64::max);
    let mut h = (1e-4 / scale0.max(1e-8)).min((t_end - t0) / 10.0).max(1e-10);

    let mut err_prev: f64 = 1.0;
    let mut rejected = false;
    let mut k = [[0.0; N]; 7];
    let max_steps = 2_000_000usize;

    for _ in 0..max_steps {
        if t >= t_end {
            return Ok(OdeSolution { nodes });
        }
        h = h.min(t_end - t);
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepSizeUnderflow { t, dt: h });
        }

        k[0] = dy;
        for stage in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage] = f(t + C[stage] * h, &ys);
        }
        // 5th-order solution is the stage-7 argument (FSAL): y + h*sum(A[6][j] k_j)
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[6][j];
            if a != 0.0 {
                for i in 0..N {
                    y_new[i] += h * a * kj[i];
                }
            }
        }
        // scaled error estimate
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let sc = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / N as f64).sqrt().max(1e-300);

        if err <= 1.0 {
            t += h;
            y = y_new;
            dy = k[6]; // FSAL: derivative at the new point
            nodes.push(StepNode { t, y, dy });
            let fac_max = if rejected { 1.0 } else { 10.0 };
            let fac = SAFETY * err.powf(-0.17) * err_prev.powf(0.04);
            h *= fac.clamp(0.2, fac_max);
            err_prev = err;
            rejected = false;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(0.2, 1.0);
            rejected = true;
        }
    }
    Err(Error::StepSizeUnderflow { t, dt: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate_dopri5(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, 1e-10).unwrap();
        let v = sol.eval(5.0)[0];
        assert!((v - (-5.0f64).exp()).abs() < 1e-9);
        // dense output interior accuracy
        let v = sol.eval(2.34)[0];
        assert!((v - (-2.34f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let sol =
            integrate_dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 20.0, 1e-11)
                .unwrap();
        let v = sol.eval(20.0);
        assert!((v[0] - 20.0f64.cos()).abs() < 1e-8);
        assert!((v[1] + 20.0f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn hermite_derivative_matches_nodes() {
        let sol = integrate_dopri5(|t, _: &[f64; 1]| [t.cos()], 0.0, [0.0], 3.0, 1e-9).unwrap();
        for n in &sol.nodes {
            let d = sol.eval_derivative(n.t)[0];
            assert!((d - n.dy[0]).abs() < 1e-12 * (1.0 + n.dy[0].abs()));
        }
    }
}
