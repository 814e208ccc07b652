//! The scaled Beta (sBeta) density.
//!
//! For a scale `delta >= 0` the unnormalized kernel is
//! `(x + delta)^(alpha-1) (1 + delta - x)^(beta-1)`, divided by
//! `B(alpha, beta) (1 + 2 delta)^(alpha+beta-2)`. Substituting
//! `y = (x + delta) / (1 + 2 delta)` turns it into a Beta(alpha, beta) kernel
//! in `y`, which is what the moment formulas and the estimators rely on.
//! With `delta = 0` it is exactly the Beta density.
//!
//! Besides evaluation this module provides the closed-form mean, variance
//! and mode, the (mode, concentration) parametrization, method-of-moments
//! and maximum-likelihood estimators, and the concentration constraint
//! applied after every estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{digamma_unchecked, inv_digamma, ln_beta_unchecked};

/// Magnitude returned in place of an infinite log-density.
pub const SATURATED_LOG_DENSITY: f64 = 1e300;

/// Floor applied to the empirical variance in [`mom_estimate`].
pub const VARIANCE_FLOOR: f64 = 1e-10;

/// Floor applied to non-positive method-of-moments parameters before the
/// constraint projection.
pub const MOM_PARAM_FLOOR: f64 = 1e-3;

/// Relative slack on the concentration range check in [`constrain`]. Keeps
/// the projection idempotent despite rounding in the reconstruction.
const RANGE_SLACK: f64 = 1e-12;

/// One-dimensional sBeta parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SBeta {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl SBeta {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        check_shape(alpha, "alpha")?;
        check_shape(beta, "beta")?;
        check_delta(delta)?;
        Ok(Self { alpha, beta, delta })
    }

    /// Log-density at `x`.
    ///
    /// Infinite values (only possible on the boundary of the support, or
    /// outside it) are replaced by `±SATURATED_LOG_DENSITY`.
    pub fn log_pdf(&self, x: f64) -> f64 {
        let lo = x + self.delta;
        let hi = 1.0 + self.delta - x;
        if !(lo >= 0.0 && hi >= 0.0) {
            return -SATURATED_LOG_DENSITY;
        }
        let v = power_term(self.alpha - 1.0, lo) + power_term(self.beta - 1.0, hi)
            - ln_beta_unchecked(self.alpha, self.beta)
            - (self.alpha + self.beta - 2.0) * (2.0 * self.delta).ln_1p();
        v.clamp(-SATURATED_LOG_DENSITY, SATURATED_LOG_DENSITY)
    }

    /// `alpha / (alpha + beta) (1 + 2 delta) - delta`
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta) * (1.0 + 2.0 * self.delta) - self.delta
    }

    /// `alpha beta / ((alpha + beta)^2 (alpha + beta + 1)) (1 + 2 delta)^2`
    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        let scale = 1.0 + 2.0 * self.delta;
        self.alpha * self.beta / (s * s * (s + 1.0)) * scale * scale
    }

    /// Stationary point of the density. A maximum when both shapes exceed 1.
    pub fn mode(&self) -> Result<f64> {
        let lambda = self.concentration();
        if lambda == 0.0 {
            return Err(Error::UndefinedMode { alpha: self.alpha, beta: self.beta });
        }
        Ok(self.mode_numerator() / lambda)
    }

    /// `lambda = alpha + beta - 2`. Negative values mean a bimodal density.
    pub fn concentration(&self) -> f64 {
        self.alpha + self.beta - 2.0
    }

    fn mode_numerator(&self) -> f64 {
        self.alpha - 1.0 + self.delta * (self.alpha - self.beta)
    }

    /// Mode restricted to [0, 1]; the degenerate `lambda = 0` case resolves to
    /// the boundary the density decreases towards (or 0.5 for the uniform).
    fn clamped_mode(&self) -> f64 {
        let lambda = self.concentration();
        let m = if lambda == 0.0 {
            let num = self.mode_numerator();
            if num > 0.0 {
                1.0
            } else if num < 0.0 {
                0.0
            } else {
                0.5
            }
        } else {
            self.mode_numerator() / lambda
        };
        m.clamp(0.0, 1.0)
    }
}

fn power_term(exponent: f64, base: f64) -> f64 {
    if exponent == 0.0 {
        0.0
    } else if base == 0.0 {
        if exponent > 0.0 {
            -SATURATED_LOG_DENSITY
        } else {
            SATURATED_LOG_DENSITY
        }
    } else {
        exponent * base.ln()
    }
}

fn check_shape(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and positive, got {v}")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must be finite and non-negative, got {delta}")))
    }
}

/// Per-coordinate sBeta parameters sharing one scale `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SBetaParams {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub delta: f64,
}

impl SBetaParams {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, delta: f64) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::Shape { expected: alpha.len(), found: beta.len() });
        }
        for (&a, &b) in alpha.iter().zip(&beta) {
            check_shape(a, "alpha")?;
            check_shape(b, "beta")?;
        }
        check_delta(delta)?;
        Ok(Self { alpha, beta, delta })
    }

    pub fn from_coords(coords: &[SBeta], delta: f64) -> Self {
        Self {
            alpha: coords.iter().map(|c| c.alpha).collect(),
            beta: coords.iter().map(|c| c.beta).collect(),
            delta,
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn coord(&self, n: usize) -> SBeta {
        SBeta { alpha: self.alpha[n], beta: self.beta[n], delta: self.delta }
    }

    pub fn coords(&self) -> impl Iterator<Item = SBeta> + '_ {
        (0..self.dim()).map(|n| self.coord(n))
    }

    /// Sum of the per-coordinate log-densities.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), found: x.len() });
        }
        Ok(self.log_pdf_unchecked(x))
    }

    pub(crate) fn log_pdf_unchecked(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.coords()).map(|(&v, c)| c.log_pdf(v)).sum()
    }

    /// Per-coordinate modes, clamped into [0, 1]. Used as the cluster's
    /// representative point when aligning clusters with classes.
    pub fn mode_vector(&self) -> Vec<f64> {
        self.coords().map(|c| c.clamped_mode()).collect()
    }
}

/// Bounds on the per-coordinate concentration `alpha + beta - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintConfig {
    pub tau_minus: f64,
    pub tau_plus: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self { tau_minus: 1.0, tau_plus: 165.0 }
    }
}

impl ConstraintConfig {
    pub fn new(tau_minus: f64, tau_plus: f64) -> Result<Self> {
        let c = Self { tau_minus, tau_plus };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_minus.is_finite() && self.tau_plus.is_finite())
            || self.tau_minus <= 0.0
            || self.tau_minus > self.tau_plus
        {
            return Err(Error::Config(format!(
                "constraints need 0 < tau_minus <= tau_plus, got [{}, {}]",
                self.tau_minus, self.tau_plus
            )));
        }
        Ok(())
    }

    fn contains(&self, lambda: f64) -> bool {
        lambda >= self.tau_minus * (1.0 - RANGE_SLACK) && lambda <= self.tau_plus * (1.0 + RANGE_SLACK)
    }
}

/// Shape parameters with the given mode and concentration:
/// `alpha = 1 + lambda (m + delta) / (1 + 2 delta)`,
/// `beta = 1 + lambda (1 + delta - m) / (1 + 2 delta)`.
pub fn params_from_mode_concentration(mode: f64, lambda: f64, delta: f64) -> Result<SBeta> {
    if !(0.0..=1.0).contains(&mode) {
        return Err(Error::Domain(format!("mode must lie in [0, 1], got {mode}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("concentration must be positive, got {lambda}")));
    }
    check_delta(delta)?;
    Ok(from_mode_concentration_unchecked(mode, lambda, delta))
}

fn from_mode_concentration_unchecked(mode: f64, lambda: f64, delta: f64) -> SBeta {
    let scale = 1.0 + 2.0 * delta;
    SBeta {
        alpha: 1.0 + lambda * (mode + delta) / scale,
        beta: 1.0 + lambda * (1.0 + delta - mode) / scale,
        delta,
    }
}

/// Projects one coordinate onto the concentration range, keeping its mode.
///
/// Coordinates already in range are returned unchanged. Otherwise the mode
/// (clamped into [0, 1]) is kept and the concentration is clipped to the
/// nearest bound.
pub fn constrain_coord(p: SBeta, c: &ConstraintConfig) -> SBeta {
    let lambda = p.concentration();
    if c.contains(lambda) {
        return p;
    }
    let mode = p.clamped_mode();
    let clipped = lambda.clamp(c.tau_minus, c.tau_plus);
    from_mode_concentration_unchecked(mode, clipped, p.delta)
}

/// Applies [`constrain_coord`] to every coordinate.
pub fn constrain(p: &SBetaParams, c: &ConstraintConfig) -> SBetaParams {
    let coords: Vec<SBeta> = p.coords().map(|s| constrain_coord(s, c)).collect();
    SBetaParams::from_coords(&coords, p.delta)
}

/// Method-of-moments result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomEstimate {
    pub params: SBeta,
    /// The variance was below [`VARIANCE_FLOOR`] and was raised to it.
    pub variance_clamped: bool,
}

/// Solves the mean/variance equations for `(alpha, beta)` in closed form.
///
/// With `m = (mean + delta) / (1 + 2 delta)` and
/// `c = m (1 - m) (1 + 2 delta)^2 / var - 1`, the estimate is
/// `alpha = c m`, `beta = c (1 - m)`. A variance larger than the bound
/// `m (1 - m) (1 + 2 delta)^2` makes both negative, reported as
/// [`Error::DegenerateEstimate`].
pub fn mom_estimate(sample_mean: f64, sample_var: f64, delta: f64) -> Result<MomEstimate> {
    check_delta(delta)?;
    if !(sample_mean > -delta && sample_mean < 1.0 + delta) {
        return Err(Error::Domain(format!(
            "sample mean {sample_mean} outside the support (-{delta}, {})",
            1.0 + delta
        )));
    }
    if !(sample_var.is_finite() && sample_var >= 0.0) {
        return Err(Error::Domain(format!("sample variance must be non-negative, got {sample_var}")));
    }
    let variance_clamped = sample_var < VARIANCE_FLOOR;
    let var = sample_var.max(VARIANCE_FLOOR);
    let scale = 1.0 + 2.0 * delta;
    let m = (sample_mean + delta) / scale;
    let factor = m * (1.0 - m) * scale * scale / var - 1.0;
    let alpha = factor * m;
    let beta = factor * (1.0 - m);
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::DegenerateEstimate { alpha, beta });
    }
    Ok(MomEstimate { params: SBeta { alpha, beta, delta }, variance_clamped })
}

/// Weighted averages of `ln y` and `ln (1 - y)` with
/// `y = (x + delta) / (1 + 2 delta)`: the sufficient statistics of the
/// sBeta likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub mean_log_lo: f64,
    pub mean_log_hi: f64,
    pub total_weight: f64,
}

impl SufficientStats {
    /// `weights = None` means unit weights.
    pub fn from_sample(points: &[f64], weights: Option<&[f64]>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        if points.is_empty() {
            return Err(Error::Domain("empty sample".into()));
        }
        if let Some(w) = weights {
            if w.len() != points.len() {
                return Err(Error::Shape { expected: points.len(), found: w.len() });
            }
        }
        let scale = 1.0 + 2.0 * delta;
        let (mut lo, mut hi, mut total) = (0.0, 0.0, 0.0);
        for (i, &x) in points.iter().enumerate() {
            let w = weights.map_or(1.0, |w| w[i]);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Domain(format!("invalid weight {w} at {i}")));
            }
            if w == 0.0 {
                continue;
            }
            lo += w * ((x + delta) / scale).ln();
            hi += w * ((1.0 + delta - x) / scale).ln();
            total += w;
        }
        if total == 0.0 {
            return Err(Error::Domain("sample has zero total weight".into()));
        }
        Ok(Self { mean_log_lo: lo / total, mean_log_hi: hi / total, total_weight: total })
    }

    /// Average negative log-likelihood per unit weight.
    pub fn neg_log_likelihood(&self, alpha: f64, beta: f64, delta: f64) -> f64 {
        // The (1 + 2 delta) terms of the density cancel against those folded
        // into the statistics, leaving -ln(1 + 2 delta) per point.
        -((alpha - 1.0) * self.mean_log_lo + (beta - 1.0) * self.mean_log_hi
            - ln_beta_unchecked(alpha, beta)
            - (2.0 * delta).ln_1p())
    }
}

/// Options for [`mle_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-6 }
    }
}

/// Result of the maximum-likelihood fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOutcome {
    pub params: SBeta,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximum-likelihood estimate of one coordinate from a weighted sample.
pub fn mle_estimate(
    points: &[f64],
    weights: Option<&[f64]>,
    delta: f64,
    init: (f64, f64),
    opts: MleOptions,
) -> Result<MleOutcome> {
    let stats = SufficientStats::from_sample(points, weights, delta)?;
    mle_from_stats(&stats, delta, init, opts)
}

/// Runs the fixed point
/// `alpha <- psi^-1(psi(alpha + beta) + E ln y)`,
/// `beta <- psi^-1(psi(alpha + beta) + E ln (1 - y))`,
/// both sides using the previous iterate, until the largest parameter change
/// is at most `opts.tol` or `opts.max_iters` is reached. The last iterate is
/// returned either way; only non-finite iterates are errors.
pub fn mle_from_stats(
    stats: &SufficientStats,
    delta: f64,
    init: (f64, f64),
    opts: MleOptions,
) -> Result<MleOutcome> {
    check_delta(delta)?;
    check_shape(init.0, "initial alpha")?;
    check_shape(init.1, "initial beta")?;
    if !(stats.mean_log_lo.is_finite() && stats.mean_log_hi.is_finite()) {
        return Err(Error::Convergence { what: "sBeta MLE", iterations: 0, residual: f64::INFINITY });
    }
    let (mut alpha, mut beta) = init;
    for it in 1..=opts.max_iters {
        let psi_sum = digamma_unchecked(alpha + beta);
        let next_alpha = inv_digamma(psi_sum + stats.mean_log_lo)?;
        let next_beta = inv_digamma(psi_sum + stats.mean_log_hi)?;
        if !(next_alpha.is_finite() && next_beta.is_finite()) {
            return Err(Error::Convergence { what: "sBeta MLE", iterations: it, residual: f64::INFINITY });
        }
        let change = (next_alpha - alpha).abs().max((next_beta - beta).abs());
        alpha = next_alpha;
        beta = next_beta;
        if change <= opts.tol {
            return Ok(MleOutcome { params: SBeta { alpha, beta, delta }, iterations: it, converged: true });
        }
    }
    Ok(MleOutcome {
        params: SBeta { alpha, beta, delta },
        iterations: opts.max_iters,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sb(a: f64, b: f64, d: f64) -> SBeta {
        SBeta::new(a, b, d).unwrap()
    }

    #[test]
    fn uniform_log_pdf_is_zero() {
        assert_eq!(sb(1.0, 1.0, 0.15).log_pdf(0.5), 0.0);
        assert_eq!(sb(1.0, 1.0, 0.0).log_pdf(0.0), 0.0);
    }

    #[test]
    fn beta_reduction_at_zero_delta() {
        // Beta(2, 5) pdf = 30 x (1 - x)^4
        let want = (30.0 * 0.3 * 0.7f64.powi(4)).ln();
        assert!((sb(2.0, 5.0, 0.0).log_pdf(0.3) - want).abs() < 1e-13);
    }

    #[test]
    fn boundary_values_saturate_instead_of_nan() {
        let p = sb(0.5, 2.0, 0.0);
        assert_eq!(p.log_pdf(0.0), SATURATED_LOG_DENSITY);
        let q = sb(2.0, 3.0, 0.0);
        assert_eq!(q.log_pdf(0.0), -SATURATED_LOG_DENSITY);
        assert!(!sb(0.5, 0.5, 0.0).log_pdf(1.0).is_nan());
        assert!(sb(3.0, 9.0, 0.15).log_pdf(0.0).is_finite());
    }

    #[test]
    fn moments_and_mode() {
        let p = sb(3.0, 9.0, 0.15);
        assert!((p.mean() - 0.175).abs() < 1e-15);
        assert!((p.variance() - 27.0 / 1872.0 * 1.69).abs() < 1e-15);
        assert!((p.mode().unwrap() - 0.11).abs() < 1e-15);
        let q = sb(2.0, 5.0, 0.0);
        assert!((q.mean() - 2.0 / 7.0).abs() < 1e-15);
        assert!((q.variance() - 10.0 / 392.0).abs() < 1e-15);
        assert!((q.mode().unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(sb(4.0, 4.0, 0.3).mode().unwrap(), 0.5);
        assert_eq!(sb(7.0, 7.0, 0.3).mean(), 0.5);
        assert!(matches!(sb(0.5, 1.5, 0.1).mode(), Err(Error::UndefinedMode { .. })));
    }

    #[test]
    fn variance_scales_with_delta() {
        let v0 = sb(3.0, 4.0, 0.0).variance();
        let v = sb(3.0, 4.0, 0.4).variance();
        assert!((v - v0 * 1.8 * 1.8).abs() < 1e-15);
    }

    #[test]
    fn concentration_values() {
        assert_eq!(sb(3.0, 9.0, 0.0).concentration(), 10.0);
        assert_eq!(sb(0.5, 0.5, 0.0).concentration(), -1.0);
        assert_eq!(sb(1.0, 1.0, 0.0).concentration(), 0.0);
    }

    #[test]
    fn mode_concentration_parametrization() {
        let p = params_from_mode_concentration(0.11, 10.0, 0.15).unwrap();
        assert!((p.alpha - 3.0).abs() < 1e-12 && (p.beta - 9.0).abs() < 1e-12);
        let p = params_from_mode_concentration(0.5, 2.0, 0.0).unwrap();
        assert_eq!((p.alpha, p.beta), (2.0, 2.0));
        let p = params_from_mode_concentration(1.0, 5.0, 0.15).unwrap();
        assert!((p.alpha - (1.0 + 5.0 * 1.15 / 1.3)).abs() < 1e-14);
        assert!((p.beta - (1.0 + 5.0 * 0.15 / 1.3)).abs() < 1e-14);
        assert!((p.mode().unwrap() - 1.0).abs() < 1e-14);
        assert!(params_from_mode_concentration(1.2, 5.0, 0.0).is_err());
        assert!(params_from_mode_concentration(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn mom_inverts_moment_formulas() {
        let e = mom_estimate(0.175, 0.024375, 0.15).unwrap();
        assert!((e.params.alpha - 3.0).abs() < 1e-9 && (e.params.beta - 9.0).abs() < 1e-9);
        assert!(!e.variance_clamped);
        let e = mom_estimate(0.5, 0.05, 0.0).unwrap();
        assert!((e.params.alpha - 2.0).abs() < 1e-12 && (e.params.beta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mom_variance_floor_and_degenerate_cases() {
        let e = mom_estimate(0.3, 0.0, 0.15).unwrap();
        assert!(e.variance_clamped);
        assert!(e.params.concentration() > 1e6);
        // Variance above the Bernoulli bound.
        assert!(matches!(mom_estimate(0.5, 0.5, 0.0), Err(Error::DegenerateEstimate { .. })));
        assert!(mom_estimate(1.3, 0.01, 0.15).is_err());
    }

    #[test]
    fn constrain_examples() {
        let c = ConstraintConfig::default();
        let p = sb(3.0, 9.0, 0.15);
        assert_eq!(constrain_coord(p, &c), p);

        let q = constrain_coord(sb(100.0, 100.0, 0.15), &c);
        assert!((q.alpha - 83.5).abs() < 1e-12 && (q.beta - 83.5).abs() < 1e-12);

        let r = constrain_coord(sb(0.5, 0.5, 0.15), &c);
        assert!((r.concentration() - 1.0).abs() < 1e-12);
        assert!((r.mode().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constrain_handles_zero_concentration_and_outside_modes() {
        let c = ConstraintConfig::default();
        // alpha + beta = 2 with alpha < beta: density decreases towards 1.
        let p = constrain_coord(sb(0.5, 1.5, 0.1), &c);
        assert!((p.concentration() - 1.0).abs() < 1e-12);
        assert!(p.mode().unwrap().abs() < 1e-12);
        // Negative concentration whose formula mode leaves [0, 1].
        let q = constrain_coord(sb(0.2, 0.9, 0.15), &c);
        let m = q.mode().unwrap();
        assert!((0.0..=1.0).contains(&m));
        assert!((q.concentration() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constrain_is_idempotent() {
        let c = ConstraintConfig::default();
        for &(a, b) in &[(100.0, 100.0), (0.3, 0.4), (500.0, 3.0), (1e-3, 1e-3), (0.9, 0.2)] {
            let once = constrain_coord(sb(a, b, 0.15), &c);
            assert_eq!(constrain_coord(once, &c), once);
        }
    }

    #[test]
    fn constraint_config_validation() {
        assert!(ConstraintConfig::new(1.0, 165.0).is_ok());
        assert!(ConstraintConfig::new(0.0, 1.0).is_err());
        assert!(ConstraintConfig::new(2.0, 1.0).is_err());
    }

    #[test]
    fn mle_fixed_point_at_exact_statistics() {
        // E[ln y] = psi(a) - psi(a + b), E[ln(1 - y)] = psi(b) - psi(a + b).
        let (a, b) = (3.0, 9.0);
        let stats = SufficientStats {
            mean_log_lo: digamma_unchecked(a) - digamma_unchecked(a + b),
            mean_log_hi: digamma_unchecked(b) - digamma_unchecked(a + b),
            total_weight: 1.0,
        };
        let opts = MleOptions { max_iters: 20_000, tol: 1e-12 };
        let out = mle_from_stats(&stats, 0.15, (1.0, 1.0), opts).unwrap();
        assert!(out.converged);
        assert!((out.params.alpha - a).abs() < 1e-6, "{:?}", out);
        assert!((out.params.beta - b).abs() < 1e-6, "{:?}", out);
    }

    #[test]
    fn mle_does_not_increase_nll() {
        let pts: Vec<f64> = (0..200).map(|i| ((i as f64 + 0.5) / 200.0).powf(1.7)).collect();
        let delta = 0.15;
        let stats = SufficientStats::from_sample(&pts, None, delta).unwrap();
        let init = (1.3, 4.0);
        let out = mle_from_stats(&stats, delta, init, MleOptions::default()).unwrap();
        let before = stats.neg_log_likelihood(init.0, init.1, delta);
        let after = stats.neg_log_likelihood(out.params.alpha, out.params.beta, delta);
        assert!(after <= before + 1e-6);
    }

    #[test]
    fn mle_on_dirac_sample_stays_finite_then_constrains() {
        let pts = vec![0.3; 50];
        let out = mle_estimate(&pts, None, 0.15, (2.0, 2.0), MleOptions::default()).unwrap();
        assert!(!out.converged);
        assert!(out.params.concentration() > 165.0);
        let c = constrain_coord(out.params, &ConstraintConfig::default());
        assert!((c.concentration() - 165.0).abs() < 1e-9);
    }

    #[test]
    fn mle_rejects_empty_and_log_zero() {
        assert!(mle_estimate(&[], None, 0.15, (1.0, 1.0), MleOptions::default()).is_err());
        assert!(mle_estimate(&[0.0, 0.5], None, 0.0, (1.0, 1.0), MleOptions::default()).is_err());
    }

    #[test]
    fn multivariate_log_pdf_is_sum_of_coordinates() {
        let p = SBetaParams::new(vec![2.0, 1.5, 7.0], vec![3.0, 9.0, 1.2], 0.15).unwrap();
        let x = [0.2, 0.5, 0.3];
        let want: f64 = p.coords().zip(x).map(|(c, v)| c.log_pdf(v)).sum();
        assert_eq!(p.log_pdf(&x).unwrap(), want);
        assert!(p.log_pdf(&[1.0, 0.0, 0.0]).unwrap().is_finite());
        assert!(matches!(p.log_pdf(&[0.5, 0.5]), Err(Error::Shape { .. })));
        let u = SBetaParams::new(vec![1.0; 2], vec![1.0; 2], 0.4).unwrap();
        assert_eq!(u.log_pdf(&[0.3, 0.7]).unwrap(), 0.0);
    }
}
