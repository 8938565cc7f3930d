use std::fmt;
use std::sync::Arc;

use super::continuous::ContinuousCoefficients;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, sub};
use crate::objectives::Objective;
use crate::scalar::Scalar;

/// `B_Φ(x, y) = Φ(x) − Φ(y) − ⟨∇Φ(y), x − y⟩`
pub fn bregman_divergence<T: Scalar, O: Objective<T> + ?Sized>(phi: &O, x: &[T], y: &[T]) -> Result<T> {
    check_dim(x.len(), y.len())?;
    check_dim(phi.dim(), x.len())?;
    Ok(phi.value(x) - phi.value(y) - dot(&phi.gradient(y), &sub(x, y)))
}

type TimeFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Exponents `(α, β, γ)` of a Bregman Lagrangian
/// `e^{α+γ} (B_Φ(x + e^{−α} ẋ, x) − e^{β} f(x))`.
#[derive(Clone)]
pub struct ExponentTriple<T> {
    pub alpha: TimeFn<T>,
    pub beta: TimeFn<T>,
    pub gamma: TimeFn<T>,
}

impl<T: Scalar> fmt::Debug for ExponentTriple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentTriple").finish_non_exhaustive()
    }
}

impl<T: Scalar> ExponentTriple<T> {
    pub fn new(
        alpha: impl Fn(T) -> T + Send + Sync + 'static,
        beta: impl Fn(T) -> T + Send + Sync + 'static,
        gamma: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            gamma: Arc::new(gamma),
        }
    }

    /// `α = β = 0`, `γ = n log t`: gives `a = b = tⁿ`, but violates `γ̇ = e^α`.
    pub fn classical(n: u32) -> Self {
        let nf = T::from_u32(n).expect("u32 fits in scalar");
        Self::new(|_| T::zero(), |_| T::zero(), move |t: T| nf * t.ln())
    }

    /// `α = log p − log t`, `β = p log t + log C`, `γ = p log t`.
    ///
    /// `C` is left to the caller; its relation to the discrete `D` is not checked.
    pub fn polynomial(p: u32, c: T) -> Self {
        let pf = T::from_u32(p).expect("u32 fits in scalar");
        let log_c = c.ln();
        Self::new(
            move |t: T| pf.ln() - t.ln(),
            move |t: T| pf * t.ln() + log_c,
            move |t: T| pf * t.ln(),
        )
    }

    /// `α = β = 0`, `γ = λt`.
    pub fn exponential(lambda: T) -> Self {
        Self::new(|_| T::zero(), |_| T::zero(), move |t: T| lambda * t)
    }

    /// Coefficients of the Euclidean case `Φ = ½‖x‖²`:
    /// `a = e^{γ−α}` and `b = e^{α+β+γ}`. `ν` is obtained by central
    /// differences of `log a`.
    pub fn euclidean_coefficients(&self) -> ContinuousCoefficients<T> {
        let (al, be, ga) = (self.alpha.clone(), self.beta.clone(), self.gamma.clone());
        let log_a = move |t: T| ga(t) - al(t);
        let (al, ga) = (self.alpha.clone(), self.gamma.clone());
        let log_b = move |t: T| al(t) + be(t) + ga(t);
        let log_a: TimeFn<T> = Arc::new(log_a);
        let log_b: TimeFn<T> = Arc::new(log_b);
        let (la1, la2, la3) = (log_a.clone(), log_a.clone(), log_a);
        let (lb1, lb2) = (log_b.clone(), log_b);
        ContinuousCoefficients::new(
            move |t| la1(t).exp(),
            move |t| lb1(t).exp(),
            move |t: T| {
                let d = T::lit(1e-6) * t.abs().max(T::one());
                (la2(t + d) - la2(t - d)) / (d + d)
            },
            move |t| (lb2(t) - la3(t)).exp(),
            T::one(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealScalingReport<T> {
    /// `γ̇ = e^α` within tolerance at every interior grid point.
    pub gamma_ok: bool,
    /// `β̇ ≤ e^α` within tolerance at every interior grid point.
    pub beta_ok: bool,
    pub max_gamma_defect: T,
}

const IDEAL_TOL: f64 = 1e-4;

/// Checks the ideal scaling conditions at the interior points of `t_grid`,
/// differentiating with central differences of relative step `1e-5`.
pub fn verify_ideal_scaling<T: Scalar>(exp: &ExponentTriple<T>, t_grid: &[T]) -> Result<IdealScalingReport<T>> {
    if t_grid.len() < 3 {
        return Err(Error::domain(format!(
            "ideal scaling check needs at least 3 grid points, got {}",
            t_grid.len()
        )));
    }
    if t_grid.iter().any(|&t| !(t > T::zero() && t.is_finite())) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("time grid must be positive and strictly increasing"));
    }
    let tol = T::lit(IDEAL_TOL);
    let mut report = IdealScalingReport {
        gamma_ok: true,
        beta_ok: true,
        max_gamma_defect: T::zero(),
    };
    for &t in &t_grid[1..t_grid.len() - 1] {
        let d = T::lit(1e-5) * t;
        let deriv = |f: &TimeFn<T>| (f(t + d) - f(t - d)) / (d + d);
        let e_alpha = (exp.alpha)(t).exp();
        let gamma_defect = (deriv(&exp.gamma) - e_alpha).abs();
        report.max_gamma_defect = report.max_gamma_defect.max(gamma_defect);
        report.gamma_ok &= gamma_defect <= tol;
        report.beta_ok &= deriv(&exp.beta) <= e_alpha + tol;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{FnObjective, QuadraticForm};
    use approx::assert_relative_eq;

    fn grid() -> Vec<f64> {
        (1..=100).map(|i| 0.05 * i as f64).collect()
    }

    #[test]
    fn euclidean_divergence() {
        let phi = QuadraticForm::<f64>::identity(2);
        assert_eq!(bregman_divergence(&phi, &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(bregman_divergence(&phi, &[0.3, -2.0], &[0.3, -2.0]).unwrap(), 0.0);
        assert_relative_eq!(
            bregman_divergence(&phi, &[1.0, 2.0], &[-1.0, 0.5]).unwrap(),
            0.5 * (4.0 + 2.25),
            epsilon = 1e-15
        );
    }

    #[test]
    fn quartic_divergence() {
        let phi = FnObjective::new("quartic", 1, |x: &[f64]| x[0].powi(4), |x: &[f64]| vec![4.0 * x[0].powi(3)]);
        assert_eq!(bregman_divergence(&phi, &[2.0], &[1.0]).unwrap(), 11.0);
        assert!(bregman_divergence(&phi, &[-0.7], &[1.3]).unwrap() >= -1e-12);
    }

    #[test]
    fn divergence_length_mismatch() {
        let phi = QuadraticForm::<f64>::identity(2);
        assert!(bregman_divergence(&phi, &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn exponential_is_ideal() {
        let r = verify_ideal_scaling(&ExponentTriple::exponential(1.0), &grid()).unwrap();
        assert!(r.gamma_ok && r.beta_ok);
        assert!(r.max_gamma_defect < 1e-8);
    }

    #[test]
    fn classical_is_not_ideal() {
        let r = verify_ideal_scaling(&ExponentTriple::classical(3), &grid()).unwrap();
        assert!(!r.gamma_ok);
        assert!(r.beta_ok);
    }

    #[test]
    fn polynomial_p2_is_ideal() {
        let ln2 = 2f64.ln();
        let exp = ExponentTriple::new(
            move |t: f64| ln2 - t.ln(),
            move |t: f64| 2.0 * (t.ln() - ln2),
            move |t: f64| 2.0 * t.ln() + ln2,
        );
        let r = verify_ideal_scaling(&exp, &grid()).unwrap();
        assert!(r.gamma_ok && r.beta_ok, "{r:?}");
        let r = verify_ideal_scaling(&ExponentTriple::polynomial(3, 0.25), &grid()).unwrap();
        assert!(r.gamma_ok && r.beta_ok, "{r:?}");
    }

    #[test]
    fn short_grid_rejected() {
        assert!(verify_ideal_scaling(&ExponentTriple::exponential(1.0), &[1.0, 2.0]).is_err());
        assert!(verify_ideal_scaling(&ExponentTriple::exponential(1.0), &[1.0, 0.5, 2.0]).is_err());
    }

    #[test]
    fn euclidean_reduction() {
        let cc = ExponentTriple::<f64>::classical(3).euclidean_coefficients();
        for t in [0.5f64, 1.0, 2.0, 3.7] {
            assert_relative_eq!(cc.a(t), t.powi(3), max_relative = 1e-12);
            assert_relative_eq!(cc.b(t), t.powi(3), max_relative = 1e-12);
        }
        let cc = ExponentTriple::polynomial(3, 0.5).euclidean_coefficients();
        for t in [0.5f64, 1.0, 2.0] {
            // a = t^{p+1}/p, b = pC t^{2p-1}
            assert_relative_eq!(cc.a(t), t.powi(4) / 3.0, max_relative = 1e-12);
            assert_relative_eq!(cc.b(t), 1.5 * t.powi(5), max_relative = 1e-12);
        }
        let grid: Vec<f64> = (2..40).map(|i| 0.1 * i as f64).collect();
        assert!(cc.consistency_defect(&grid) <= 1e-6);
    }
}
