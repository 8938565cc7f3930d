use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type TimeFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Time-dependent coefficients of `a(t) ½‖ẋ‖² − b(t) f(x)` together with
/// the damped-ODE form `ẍ + ν(t) ẋ + η(t) ∇f(x) = 0` they produce.
#[derive(Clone)]
pub struct ContinuousCoefficients<T> {
    a: TimeFn<T>,
    b: TimeFn<T>,
    nu: TimeFn<T>,
    eta: TimeFn<T>,
    /// Force scale. Stored for reference; the discrete families do not read it.
    pub epsilon: T,
}

impl<T: Scalar> fmt::Debug for ContinuousCoefficients<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousCoefficients")
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> ContinuousCoefficients<T> {
    pub fn new(
        a: impl Fn(T) -> T + Send + Sync + 'static,
        b: impl Fn(T) -> T + Send + Sync + 'static,
        nu: impl Fn(T) -> T + Send + Sync + 'static,
        eta: impl Fn(T) -> T + Send + Sync + 'static,
        epsilon: T,
    ) -> Self {
        Self {
            a: Arc::new(a),
            b: Arc::new(b),
            nu: Arc::new(nu),
            eta: Arc::new(eta),
            epsilon,
        }
    }

    /// `a(t) = b(t) = tⁿ`, so `ν = n/t` and `η = 1`.
    pub fn nesterov(n: u32) -> Self {
        let nf = T::from_u32(n).expect("u32 fits in scalar");
        Self::new(
            move |t: T| t.powi(n as i32),
            move |t: T| t.powi(n as i32),
            move |t: T| nf / t,
            |_| T::one(),
            T::one(),
        )
    }

    /// `a(t) = tⁿ`, `b(t) = D t^{2n−3}`.
    pub fn wibisono(n: u32, d: T) -> Self {
        let nf = T::from_u32(n).expect("u32 fits in scalar");
        let m = n as i32;
        Self::new(
            move |t: T| t.powi(m),
            move |t: T| d * t.powi(2 * m - 3),
            move |t: T| nf / t,
            move |t: T| d * t.powi(m - 3),
            T::one(),
        )
    }

    /// `a(t) = b(t) = e^{λt}`.
    pub fn exponential(lambda: T) -> Self {
        Self::new(
            move |t: T| (lambda * t).exp(),
            move |t: T| (lambda * t).exp(),
            move |_| lambda,
            |_| T::one(),
            T::one(),
        )
    }

    pub fn a(&self, t: T) -> T {
        (self.a)(t)
    }

    pub fn b(&self, t: T) -> T {
        (self.b)(t)
    }

    pub fn nu(&self, t: T) -> T {
        (self.nu)(t)
    }

    pub fn eta(&self, t: T) -> T {
        (self.eta)(t)
    }

    /// Largest relative defect of `ν = a′/a` and `η = b/a` over `t_grid`,
    /// with `a′` from central differences.
    pub fn consistency_defect(&self, t_grid: &[T]) -> T {
        let mut worst = T::zero();
        for &t in t_grid {
            let d = T::lit(1e-6) * t.abs().max(T::one());
            let da = (self.a(t + d) - self.a(t - d)) / (d + d);
            let nu = self.nu(t);
            let at = self.a(t);
            let e_nu = (da / at - nu).abs() / nu.abs().max(T::one());
            let eta = self.eta(t);
            let e_eta = (self.b(t) / at - eta).abs() / eta.abs().max(T::one());
            worst = worst.max(e_nu).max(e_eta);
        }
        worst
    }
}

/// Trapezoidal discretisation on `t = kh`:
/// `a_k = (a(t) + a(t+h)) / (2h²)` and `b_k⁻ = b_k⁺ = b(t)/2`.
pub fn lagrangian_from_continuous<T: Scalar>(cc: &ContinuousCoefficients<T>, h: T, k: usize) -> Result<(T, T, T)> {
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    let t = T::from_usize_lossy(k) * h;
    let a = (cc.a(t) + cc.a(t + h)) / (T::lit(2.0) * h * h);
    let b = T::lit(0.5) * cc.b(t);
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Numerical {
            step: k,
            what: format!("coefficients not finite at t = {t}"),
        });
    }
    Ok((a, b, b))
}

/// Simpson panels per grid interval.
const SIMPSON_PANELS: usize = 64;

fn simpson<T: Scalar>(f: &dyn Fn(T) -> T, lo: T, hi: T) -> T {
    let m = SIMPSON_PANELS;
    let step = (hi - lo) / T::from_usize_lossy(2 * m);
    let mut acc = f(lo) + f(hi);
    for i in 1..2 * m {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc += w * f(lo + step * T::from_usize_lossy(i));
    }
    acc * step / T::lit(3.0)
}

/// Recovers Lagrangian coefficients from a damped ODE:
/// `a(t) = exp(∫_{t₀}^t ν)`, `b = a·η`.
///
/// The lower limit is `t₀ = t_grid[0]`; for `ν = n/t` this regularises the
/// singularity at zero and only rescales `a` and `b` by a common constant.
/// Cumulative integrals are stored at the grid nodes; off-grid times
/// integrate from the nearest node below.
pub fn continuous_from_damped_ode<T: Scalar>(
    nu: impl Fn(T) -> T + Send + Sync + 'static,
    eta: impl Fn(T) -> T + Send + Sync + 'static,
    t_grid: &[T],
    epsilon: T,
) -> Result<ContinuousCoefficients<T>> {
    if t_grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("time grid must be finite and strictly increasing"));
    }
    let nu: TimeFn<T> = Arc::new(nu);
    let eta: TimeFn<T> = Arc::new(eta);

    let mut cumulative = Vec::with_capacity(t_grid.len());
    cumulative.push(T::zero());
    for w in t_grid.windows(2) {
        let prev = *cumulative.last().unwrap();
        cumulative.push(prev + simpson(&*nu, w[0], w[1]));
    }
    if cumulative.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("damping is not integrable on the grid"));
    }

    let grid: Arc<Vec<T>> = Arc::new(t_grid.to_vec());
    let cum = Arc::new(cumulative);
    let nu_a = nu.clone();
    let log_a = move |t: T| -> T {
        let i = grid.partition_point(|&g| g <= t).saturating_sub(1);
        cum[i] + simpson(&*nu_a, grid[i], t)
    };
    let log_a: TimeFn<T> = Arc::new(log_a);
    let la = log_a.clone();
    let eta_b = eta.clone();
    Ok(ContinuousCoefficients {
        a: Arc::new(move |t| la(t).exp()),
        b: Arc::new(move |t| log_a(t).exp() * eta_b(t)),
        nu,
        eta,
        epsilon,
    })
}
