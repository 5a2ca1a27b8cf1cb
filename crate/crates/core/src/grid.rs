//! Uniform reference grid on [-L, L] with the parabolic weight tabulated at
//! nodes and midpoints, second-order differencing, and the weighted
//! quadrature rules used by the energy and Hardy diagnostics.

use crate::error::{Error, Result};
use crate::profile::BarenblattProfile;

/// Uniform node grid over the reference interval.
///
/// Nodes are x_i = L (2i - n)/n, so x_0 = -L, x_{n/2} = 0 and x_n = L hold
/// exactly and the grid is exactly symmetric. The weight arrays are built
/// from |x| and vanish exactly at the boundary nodes.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n_cells: usize,
    pub dx: f64,
    pub nodes: Vec<f64>,
    pub sigma_nodes: Vec<f64>,
    pub sigma_mid: Vec<f64>,
    profile: BarenblattProfile,
}

pub fn build_grid(profile: &BarenblattProfile, n_cells: usize) -> Result<Grid> {
    if n_cells < 8 || n_cells % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "n_cells must be even and at least 8, got {n_cells}"
        )));
    }
    let l = profile.half_width;
    let n = n_cells;
    let nodes: Vec<f64> = (0..=n)
        .map(|i| l * ((2 * i) as f64 - n as f64) / n as f64)
        .collect();
    let sigma_nodes: Vec<f64> = nodes.iter().map(|&x| profile.sigma_clamped(x)).collect();
    let sigma_mid: Vec<f64> = (0..n)
        .map(|i| {
            let xm = l * ((2 * i + 1) as f64 - n as f64) / n as f64;
            profile.sigma_clamped(xm)
        })
        .collect();
    Ok(Grid {
        n_cells: n,
        dx: 2.0 * l / n as f64,
        nodes,
        sigma_nodes,
        sigma_mid,
        profile: *profile,
    })
}

impl Grid {
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn profile(&self) -> &BarenblattProfile {
        &self.profile
    }

    pub fn half_width(&self) -> f64 {
        self.profile.half_width
    }

    /// d sigma / dx at node i.
    pub fn sigma_x(&self, i: usize) -> f64 {
        self.profile.sigma_x(self.nodes[i])
    }

    /// Second-order first derivative: centered in the interior, one-sided at
    /// the two boundary nodes.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.n_nodes());
        let n = self.n_cells;
        let dx = self.dx;
        let mut out = vec![0.0; n + 1];
        out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx);
        for i in 1..n {
            out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
        }
        out[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * dx);
        out
    }

    /// One-sided second-order slope at the left/right boundary node.
    pub fn boundary_slope(&self, values: &[f64], right: bool) -> f64 {
        let n = self.n_cells;
        if right {
            (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * self.dx)
        } else {
            (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * self.dx)
        }
    }

    /// Integral of sigma^exponent * values over the interval.
    ///
    /// Composite trapezoid; when the weight exponent lies in (-1, 0) the two
    /// end cells switch to the midpoint rule so the integrable endpoint
    /// singularity is never sampled at sigma = 0.
    pub fn integrate_sigma_weighted(&self, exponent: f64, values: &[f64]) -> Result<f64> {
        assert_eq!(values.len(), self.n_nodes());
        if exponent <= -1.0 {
            return Err(Error::InvalidParameters(format!(
                "weight exponent {exponent} is not integrable"
            )));
        }
        let n = self.n_cells;
        let dx = self.dx;
        let w = |s: f64| -> f64 {
            if exponent == 0.0 {
                1.0
            } else {
                s.powf(exponent)
            }
        };
        if exponent >= 0.0 {
            let mut sum = 0.5 * (w(self.sigma_nodes[0]) * values[0]
                + w(self.sigma_nodes[n]) * values[n]);
            for i in 1..n {
                sum += w(self.sigma_nodes[i]) * values[i];
            }
            return Ok(sum * dx);
        }
        // singular endpoint weight: midpoint rule on the two end cells
        let mut sum = dx * w(self.sigma_mid[0]) * 0.5 * (values[0] + values[1]);
        sum += dx * w(self.sigma_mid[n - 1]) * 0.5 * (values[n - 1] + values[n]);
        let mut inner = 0.5 * (w(self.sigma_nodes[1]) * values[1]
            + w(self.sigma_nodes[n - 1]) * values[n - 1]);
        for i in 2..n - 1 {
            inner += w(self.sigma_nodes[i]) * values[i];
        }
        Ok(sum + inner * dx)
    }

    /// Midpoint-rule variant of the weighted integral (cross-check rule);
    /// node values are averaged onto midpoints.
    pub fn integrate_sigma_weighted_midpoint(&self, exponent: f64, values: &[f64]) -> Result<f64> {
        assert_eq!(values.len(), self.n_nodes());
        if exponent <= -1.0 {
            return Err(Error::InvalidParameters(format!(
                "weight exponent {exponent} is not integrable"
            )));
        }
        let mut sum = 0.0;
        for i in 0..self.n_cells {
            let w = if exponent == 0.0 {
                1.0
            } else {
                self.sigma_mid[i].powf(exponent)
            };
            sum += w * 0.5 * (values[i] + values[i + 1]);
        }
        Ok(sum * self.dx)
    }

    /// Composite Simpson rule over node values (n_cells is even by
    /// construction). Used for the mass diagnostic, where trapezoid accuracy
    /// is not enough at desk-scale resolutions.
    pub fn simpson(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n_nodes());
        let mut sum = 0.0;
        let mut i = 0;
        while i + 2 <= self.n_cells {
            sum += values[i] + 4.0 * values[i + 1] + values[i + 2];
            i += 2;
        }
        sum * self.dx / 3.0
    }
}
