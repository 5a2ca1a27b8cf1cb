//! The explicit self-similar reference solution: density profile constants
//! (A, B), the parabolic weight sigma, and the closed-form density/velocity
//! family it generates.

use crate::error::{Error, Result};
use crate::params::GasParameters;
use crate::quadrature;

/// Profile constants for a given gas and total mass.
///
/// B depends only on the parameters; A is normalized so the profile carries
/// total mass M. The reference half-width is L = sqrt(A/B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattProfile {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
    pub half_width: f64,
}

/// Relative tolerance of the normalization integral.
pub const NORMALIZATION_REL_TOL: f64 = 1e-10;

/// Compute (A, B, L) for the given parameters and total mass M > 0.
///
/// B = mu (1+lambda)(gamma-1) / (2(gamma+1)) and A solves
/// A^{(gamma+1)/(2(gamma-1))} = M sqrt(B) / int_{-1}^{1} (1-y^2)^{1/(gamma-1)} dy.
pub fn derive_profile(params: &GasParameters, mass: f64) -> Result<BarenblattProfile> {
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::InvalidParameters(format!(
            "total mass must be finite and > 0, got {mass}"
        )));
    }
    let gamma = params.gamma();
    let alpha = params.alpha();
    let b = params.mu() * (1.0 + params.lambda()) * (gamma - 1.0) / (2.0 * (gamma + 1.0));
    let norm = quadrature::integrate(
        |y| (1.0 - y * y).max(0.0).powf(alpha),
        -1.0,
        1.0,
        NORMALIZATION_REL_TOL,
    )?;
    // A^{(gamma+1)/(2(gamma-1))} = M sqrt(B) / norm
    let exponent = 2.0 * (gamma - 1.0) / (gamma + 1.0);
    let a = (mass * b.sqrt() / norm).powf(exponent);
    Ok(BarenblattProfile {
        a,
        b,
        mass,
        half_width: (a / b).sqrt(),
    })
}

impl BarenblattProfile {
    /// sigma(x) = A - B x^2, evaluated in the factored form
    /// B (L - |x|)(L + |x|) so it vanishes exactly at x = +-L and is exactly
    /// even. Errors outside [-L, L].
    pub fn sigma(&self, x: f64) -> Result<f64> {
        if x.abs() > self.half_width {
            return Err(Error::DomainError(format!(
                "|x| = {} exceeds the reference half-width {}",
                x.abs(),
                self.half_width
            )));
        }
        Ok(self.sigma_unchecked(x))
    }

    /// Like `sigma` but returns 0 outside the support instead of erroring.
    pub fn sigma_clamped(&self, x: f64) -> f64 {
        if x.abs() >= self.half_width {
            0.0
        } else {
            self.sigma_unchecked(x)
        }
    }

    fn sigma_unchecked(&self, x: f64) -> f64 {
        let ax = x.abs();
        (self.b * (self.half_width - ax) * (self.half_width + ax)).max(0.0)
    }

    /// d sigma / dx = -2 B x.
    pub fn sigma_x(&self, x: f64) -> f64 {
        -2.0 * self.b * x
    }

    /// Radius of the moving support, L (1+t)^{(lambda+1)/(gamma+1)}.
    pub fn support_radius(&self, params: &GasParameters, t: f64) -> f64 {
        self.half_width * (1.0 + t).powf(params.similarity_exponent())
    }

    /// Moving vacuum boundary pair (x_-, x_+) = (-L, L) (1+t)^{(lambda+1)/(gamma+1)}.
    pub fn boundary(&self, params: &GasParameters, t: f64) -> (f64, f64) {
        let r = self.support_radius(params, t);
        (-r, r)
    }

    /// Reference density rho(x, t) = (1+t)^{-b} [A - B (1+t)^{-2b} x^2]^{1/(gamma-1)}
    /// with b = (lambda+1)/(gamma+1). Errors outside the moving support.
    pub fn density(&self, params: &GasParameters, x: f64, t: f64) -> Result<f64> {
        let scale = (1.0 + t).powf(params.similarity_exponent());
        let y = x / scale;
        // Allow a few ulps of slack so callers can evaluate on the boundary
        // they computed from `boundary()`.
        if y.abs() > self.half_width * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::DomainError(format!(
                "x = {x} outside the support at t = {t}"
            )));
        }
        let sigma = self.sigma_clamped(y.clamp(-self.half_width, self.half_width));
        Ok(sigma.powf(params.alpha()) / scale)
    }

    /// Like `density` but 0 outside the support (plotting paths).
    pub fn density_clamped(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        self.density(params, x, t).unwrap_or(0.0)
    }

    /// Reference velocity u(x, t) = (1+lambda) x / ((gamma+1)(1+t)); linear
    /// in x, defined for all x.
    pub fn velocity(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        (1.0 + params.lambda()) * x / ((params.gamma() + 1.0) * (1.0 + t))
    }

    /// Total mass of the density at time t by adaptive quadrature.
    pub fn mass_at(&self, params: &GasParameters, t: f64, rel_tol: f64) -> Result<f64> {
        let r = self.support_radius(params, t);
        quadrature::integrate(|x| self.density_clamped(params, x, t), -r, r, rel_tol)
    }

    /// Closed-form time derivative of the reference density at an interior
    /// point of the moving support.
    pub fn density_time_derivative(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        let b_exp = params.similarity_exponent();
        let alpha = params.alpha();
        let s = (1.0 + t).powf(-b_exp);
        let sp = -b_exp * (1.0 + t).powf(-b_exp - 1.0);
        let p = self.a - self.b * s * s * x * x;
        sp * (p.powf(alpha) - 2.0 * alpha * self.b * s * s * x * x * p.powf(alpha - 1.0))
    }

    /// Closed-form d/dx of the pressure p(rho(x,t)) = rho^gamma / gamma.
    pub fn pressure_gradient(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        let b_exp = params.similarity_exponent();
        let alpha = params.alpha();
        let s = (1.0 + t).powf(-b_exp);
        let p = self.a - self.b * s * s * x * x;
        -2.0 * alpha * self.b * s.powf(params.gamma() + 2.0) * x * p.powf(alpha)
    }

    /// Closed-form d^2/dx^2 of the pressure of the reference density.
    pub fn pressure_hessian(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        let b_exp = params.similarity_exponent();
        let alpha = params.alpha();
        let s = (1.0 + t).powf(-b_exp);
        let p = self.a - self.b * s * s * x * x;
        -2.0 * alpha
            * self.b
            * s.powf(params.gamma() + 2.0)
            * (p.powf(alpha) - 2.0 * alpha * self.b * s * s * x * x * p.powf(alpha - 1.0))
    }

    /// Residual of the diffusion equation rho_t = (1+t)^lambda / mu * p(rho)_xx
    /// for the closed-form pair; identically zero in exact arithmetic.
    pub fn diffusion_residual(&self, params: &GasParameters, x: f64, t: f64) -> f64 {
        self.density_time_derivative(params, x, t)
            - (1.0 + t).powf(params.lambda()) / params.mu() * self.pressure_hessian(params, x, t)
    }

    /// Residual of the defining identity
    /// u = -(1+t)^lambda / mu * p(rho)_x / rho at points where rho > 0.
    pub fn velocity_identity_residual(&self, params: &GasParameters, x: f64, t: f64) -> Result<f64> {
        let rho = self.density(params, x, t)?;
        if rho <= 0.0 {
            return Err(Error::DomainError(
                "velocity identity needs rho > 0".into(),
            ));
        }
        let rhs = -(1.0 + t).powf(params.lambda()) / params.mu()
            * self.pressure_gradient(params, x, t)
            / rho;
        Ok(self.velocity(params, x, t) - rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_params() -> GasParameters {
        GasParameters::new(2.0, 1.0, 3.0).unwrap()
    }

    #[test]
    fn b_formula_direct() {
        // gamma=2, lambda=1, mu=3: B = 3*2*1/(2*3) = 1
        let p = derive_profile(&default_params(), 1.0).unwrap();
        assert!((p.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_integral_closed_forms() {
        // alpha = 1: int (1-y^2) dy = 4/3; alpha = 2: 16/15; alpha = 1/2: pi/2
        for (gamma, expect) in [
            (2.0, 4.0 / 3.0),
            (1.5, 16.0 / 15.0),
            (3.0, std::f64::consts::FRAC_PI_2),
        ] {
            let alpha = 1.0 / (gamma - 1.0);
            let v = quadrature::integrate(
                |y: f64| (1.0 - y * y).max(0.0).powf(alpha),
                -1.0,
                1.0,
                NORMALIZATION_REL_TOL,
            )
            .unwrap();
            assert!(
                (v - expect).abs() <= 1e-9 * expect,
                "gamma={gamma}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn mass_recovered_from_quadrature() {
        for mass in [1.0, 4.0 / 3.0, 7.5] {
            let p = derive_profile(&default_params(), mass).unwrap();
            let m0 = p.mass_at(&default_params(), 0.0, 1e-11).unwrap();
            assert!((m0 - mass).abs() <= 1e-8 * mass, "{m0} vs {mass}");
        }
    }

    #[test]
    fn mass_constant_in_time() {
        let params = default_params();
        let p = derive_profile(&params, 1.0).unwrap();
        for t in [0.0, 1.0, 10.0] {
            let m = p.mass_at(&params, t, 1e-11).unwrap();
            assert!((m - 1.0).abs() <= 1e-8, "t={t}: {m}");
        }
    }

    #[test]
    fn sigma_vertex_root_and_midpoint() {
        let p = derive_profile(&default_params(), 1.0).unwrap();
        let l = p.half_width;
        assert_eq!(p.sigma(0.0).unwrap(), p.a);
        assert_eq!(p.sigma(l).unwrap(), 0.0);
        assert_eq!(p.sigma(-l).unwrap(), 0.0);
        // sigma(L/2) = A - B L^2/4 = 3A/4 since L^2 = A/B
        let v = p.sigma(l / 2.0).unwrap();
        assert!((v - 0.75 * p.a).abs() < 1e-14 * p.a);
        assert!(p.sigma(l * 1.0001).is_err());
        assert_eq!(p.sigma_clamped(l * 2.0), 0.0);
    }

    #[test]
    fn sigma_is_even() {
        let p = derive_profile(&default_params(), 1.0).unwrap();
        for i in 0..50 {
            let x = p.half_width * (i as f64) / 50.0;
            assert_eq!(p.sigma(x).unwrap(), p.sigma(-x).unwrap());
        }
    }

    #[test]
    fn density_center_and_boundary() {
        let params = default_params();
        let p = derive_profile(&params, 1.0).unwrap();
        let rho0 = p.density(&params, 0.0, 0.0).unwrap();
        assert!((rho0 - p.a.powf(params.alpha())).abs() < 1e-14);
        for t in [0.0, 0.5, 3.0, 42.0] {
            let (_, xp) = p.boundary(&params, t);
            let rho = p.density(&params, xp, t).unwrap();
            assert!(rho.abs() < 1e-12, "t={t}: {rho}");
            assert!(p.density(&params, xp * 1.001, t).is_err());
        }
    }

    #[test]
    fn velocity_oddness_and_value() {
        let params = default_params();
        let p = derive_profile(&params, 1.0).unwrap();
        assert_eq!(p.velocity(&params, 0.0, 7.0), 0.0);
        // gamma=2, lambda=1, x=1, t=0 -> 2/3
        assert!((p.velocity(&params, 1.0, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        for x in [0.1, 0.7, 2.0] {
            assert_eq!(p.velocity(&params, x, 1.3), -p.velocity(&params, -x, 1.3));
        }
    }

    #[test]
    fn boundary_scaling() {
        let params = default_params();
        let p = derive_profile(&params, 1.0).unwrap();
        let (xm, xp) = p.boundary(&params, 0.0);
        assert_eq!(xm, -p.half_width);
        assert_eq!(xp, p.half_width);
        // choose t so (1+t)^b = 2
        let b = params.similarity_exponent();
        let t = 2f64.powf(1.0 / b) - 1.0;
        let (_, xp) = p.boundary(&params, t);
        assert!((xp - 2.0 * p.half_width).abs() < 1e-12);
    }

    #[test]
    fn diffusion_and_velocity_identities() {
        let params = default_params();
        let p = derive_profile(&params, 1.0).unwrap();
        for t in [0.0, 1.0, 10.0] {
            let r = p.support_radius(&params, t);
            for i in 1..20 {
                let x = -0.95 * r + 1.9 * r * (i as f64) / 20.0;
                assert!(
                    p.diffusion_residual(&params, x, t).abs() < 1e-6,
                    "pm residual at x={x}, t={t}"
                );
                let vres = p.velocity_identity_residual(&params, x, t).unwrap();
                let scale = p.velocity(&params, x, t).abs().max(1e-30);
                assert!(
                    vres.abs() <= 1e-10 * scale.max(1.0),
                    "velocity identity at x={x}, t={t}: {vres}"
                );
            }
        }
    }

    #[test]
    fn rejects_nonpositive_mass() {
        assert!(derive_profile(&default_params(), 0.0).is_err());
        assert!(derive_profile(&default_params(), -1.0).is_err());
        assert!(derive_profile(&default_params(), f64::NAN).is_err());
    }
}
