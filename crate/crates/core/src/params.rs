//! Gas and friction parameters with the derived exponents used everywhere else.

use crate::error::{Error, Result};

/// Adiabatic exponent gamma, friction decay exponent lambda and strength mu,
/// plus the derived quantities alpha = 1/(gamma-1), beta = lambda+1 and the
/// time-weight offset delta.
///
/// The pressure convention is p(rho) = rho^gamma / gamma throughout; the
/// derived constants below depend on it and must not be renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParameters {
    gamma: f64,
    lambda: f64,
    mu: f64,
    delta: f64,
}

impl GasParameters {
    /// Validates gamma > 1, 0 < lambda <= 1, mu > 0 and picks the default
    /// time-weight offset delta = (lambda+1)/(gamma+1), the midpoint of the
    /// admissible interval (0, 2(lambda+1)/(gamma+1)).
    pub fn new(gamma: f64, lambda: f64, mu: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::InvalidParameters(format!(
                "gamma must be finite and > 1, got {gamma}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 || lambda > 1.0 {
            return Err(Error::InvalidParameters(format!(
                "lambda must lie in (0, 1], got {lambda}"
            )));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "mu must be finite and > 0, got {mu}"
            )));
        }
        let delta = (lambda + 1.0) / (gamma + 1.0);
        Ok(Self {
            gamma,
            lambda,
            mu,
            delta,
        })
    }

    /// Same validation, with an explicit delta in (0, 2(lambda+1)/(gamma+1)).
    pub fn with_delta(gamma: f64, lambda: f64, mu: f64, delta: f64) -> Result<Self> {
        let mut p = Self::new(gamma, lambda, mu)?;
        let hi = 2.0 * (lambda + 1.0) / (gamma + 1.0);
        if !delta.is_finite() || delta <= 0.0 || delta >= hi {
            return Err(Error::InvalidParameters(format!(
                "delta must lie in (0, {hi}), got {delta}"
            )));
        }
        p.delta = delta;
        Ok(p)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// alpha = 1/(gamma - 1), the weight exponent of the reference density.
    pub fn alpha(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }

    /// beta = lambda + 1.
    pub fn beta(&self) -> f64 {
        self.lambda + 1.0
    }

    /// delta, used only through the (1+t)^(-delta 1_{lambda<1}) time weight.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// 1 if lambda < 1 else 0; multiplies delta in all time weights.
    pub fn indicator_lambda_lt_1(&self) -> f64 {
        if self.lambda_lt_1() {
            1.0
        } else {
            0.0
        }
    }

    pub fn lambda_lt_1(&self) -> bool {
        self.lambda < 1.0
    }

    /// True iff (lambda < 1, mu > 0) or (lambda = 1, mu > 2): the regime in
    /// which small perturbations stay globally smooth.
    pub fn in_global_existence_regime(&self) -> bool {
        self.lambda_lt_1() || self.mu > 2.0
    }

    /// Self-similar exponent b = (lambda+1)/(gamma+1): the reference boundary
    /// expands like (1+t)^b.
    pub fn similarity_exponent(&self) -> f64 {
        (self.lambda + 1.0) / (self.gamma + 1.0)
    }

    /// Friction coefficient mu / (1+t)^lambda at time t.
    pub fn damping_coefficient(&self, t: f64) -> f64 {
        self.mu * (1.0 + t).powf(-self.lambda)
    }

    /// Derivative count m of the full energy hierarchy; recorded for scope
    /// bookkeeping, the desk-scale diagnostics stop at second derivatives.
    pub fn derivative_count_m(&self) -> usize {
        let base = 4 + self.alpha().floor() as usize;
        if self.lambda_lt_1() {
            base
        } else {
            base.min((self.mu + 2.0 / (self.gamma + 1.0)).floor() as usize)
        }
    }
}
