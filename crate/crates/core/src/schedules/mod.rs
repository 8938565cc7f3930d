//! Momentum/learning-rate schedules and their discrete Lagrangian counterparts.
//!
//! A [`Schedule`] yields the pair `(μ_k, η_k)` used by the two-step updates
//!
//! ```text
//! y_{k+1} = x_k − η_k ∇f(x_k)
//! x_{k+1} = y_{k+1} + μ_k (x_k − x_{k−1})          (classical momentum)
//! x_{k+1} = y_{k+1} + μ_k (y_{k+1} − y_k)          (Nesterov)
//! ```
//!
//! The families below come from trapezoidal (or midpoint) discretisations of
//! the dilated Lagrangian `a(t) ½‖ẋ‖² − b(t) f(x)`.

mod bregman;
mod continuous;
mod lagrangian;

pub use bregman::{bregman_divergence, verify_ideal_scaling, ExponentTriple, IdealScalingReport};
pub use continuous::{continuous_from_damped_ode, lagrangian_from_continuous, ContinuousCoefficients};
pub use lagrangian::{lagrangian_from_scheme, scheme_from_lagrangian, DiscreteLagrangianCoefficients};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-step coefficients `(μ_k, η_k)`.
///
/// Indices below [`Schedule::first_step`] evaluate to `μ = η = 0`, which
/// together with the starting convention `x_1 = x_0` turns those steps into
/// the identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule<T> {
    /// `a(t) = b(t) = tⁿ`, trapezoidal rule.
    Classical { n: u32, h: T, asymptotic: bool },
    /// `a(t) = tⁿ`, `b(t) = D t^{2n−3}`, trapezoidal rule.
    Wwj { n: u32, d: T, h: T, asymptotic: bool },
    /// `tⁿ` weights evaluated at the midpoint `t_{k+½}`.
    Bjw { n: u32, d: T, h: T },
    /// `a(t) = b(t) = e^{λt}`.
    Constant { lambda: T, h: T },
    /// Tabulated values; `mu[k]` and `eta[k]` for `k < len`.
    Table { mu: Vec<T>, eta: Vec<T> },
}

fn check_positive<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be positive and finite, got {v}")))
    }
}

pub fn classical_schedule<T: Scalar>(n: u32, h: T) -> Result<Schedule<T>> {
    if n < 2 {
        return Err(Error::domain(format!("classical schedule needs n >= 2, got {n}")));
    }
    check_positive("h", h)?;
    Ok(Schedule::Classical {
        n,
        h,
        asymptotic: false,
    })
}

pub fn wwj_schedule<T: Scalar>(n: u32, d: T, h: T) -> Result<Schedule<T>> {
    if n < 3 {
        return Err(Error::domain(format!("wwj schedule needs n >= 3, got {n}")));
    }
    check_positive("D", d)?;
    check_positive("h", h)?;
    Ok(Schedule::Wwj {
        n,
        d,
        h,
        asymptotic: false,
    })
}

pub fn bjw_schedule<T: Scalar>(n: u32, d: T, h: T) -> Result<Schedule<T>> {
    if n < 3 {
        return Err(Error::domain(format!("bjw schedule needs n >= 3, got {n}")));
    }
    check_positive("D", d)?;
    check_positive("h", h)?;
    Ok(Schedule::Bjw { n, d, h })
}

pub fn constant_schedule<T: Scalar>(lambda: T, h: T) -> Result<Schedule<T>> {
    check_positive("lambda", lambda)?;
    check_positive("h", h)?;
    Ok(Schedule::Constant { lambda, h })
}

/// `(1 + (1 − 1/k)ⁿ) / (1 + (1 + 1/k)ⁿ)`, i.e. `(kⁿ + (k−1)ⁿ)/(kⁿ + (k+1)ⁿ)`
/// without forming the powers of `k`.
fn power_ratio_mu<T: Scalar>(n: u32, k: T) -> T {
    let inv = k.recip();
    (T::one() + (T::one() - inv).powi(n as i32)) / (T::one() + (T::one() + inv).powi(n as i32))
}

/// `2kⁿ / (kⁿ + (k+1)ⁿ)`
fn power_ratio_eta<T: Scalar>(n: u32, k: T) -> T {
    T::lit(2.0) / (T::one() + (T::one() + k.recip()).powi(n as i32))
}

impl<T: Scalar> Schedule<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Classical { .. } => "classical",
            Schedule::Wwj { .. } => "wwj",
            Schedule::Bjw { .. } => "bjw",
            Schedule::Constant { .. } => "constant",
            Schedule::Table { .. } => "table",
        }
    }

    /// First index at which the schedule is meaningful.
    pub fn first_step(&self) -> usize {
        match self {
            Schedule::Bjw { .. } => 1,
            _ => 0,
        }
    }

    /// Largest usable index for tabulated schedules.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Schedule::Table { mu, eta } => Some(mu.len().min(eta.len()).saturating_sub(1)),
            _ => None,
        }
    }

    /// Switches the classical and WWJ families to the large-`k` simplified
    /// forms `μ = (2k−n)/(2k+n)`, `η ∝ 2k/(2k+n)`.
    pub fn with_asymptotic(self, on: bool) -> Self {
        match self {
            Schedule::Classical { n, h, .. } => Schedule::Classical { n, h, asymptotic: on },
            Schedule::Wwj { n, d, h, .. } => Schedule::Wwj {
                n,
                d,
                h,
                asymptotic: on,
            },
            other => other,
        }
    }

    /// Step size `h` of the underlying time grid, when there is one.
    pub fn step(&self) -> Option<T> {
        match *self {
            Schedule::Classical { h, .. }
            | Schedule::Wwj { h, .. }
            | Schedule::Bjw { h, .. }
            | Schedule::Constant { h, .. } => Some(h),
            Schedule::Table { .. } => None,
        }
    }

    /// Momentum coefficient `μ_k`.
    ///
    /// # Panics
    /// For tabulated schedules, when `k` is beyond [`Schedule::horizon`].
    pub fn mu(&self, k: usize) -> T {
        match self {
            Schedule::Classical { n, asymptotic, .. } | Schedule::Wwj { n, asymptotic, .. } => {
                if k == 0 {
                    return T::zero();
                }
                let kf = T::from_usize_lossy(k);
                if *asymptotic {
                    let two_k = T::lit(2.0) * kf;
                    let nf = T::from_u32(*n).expect("u32 fits in scalar");
                    (two_k - nf) / (two_k + nf)
                } else {
                    power_ratio_mu(*n, kf)
                }
            }
            Schedule::Bjw { n, .. } => {
                if k == 0 {
                    return T::zero();
                }
                let two_k = T::lit(2.0) * T::from_usize_lossy(k);
                ((two_k - T::one()) / (two_k + T::one())).powi(*n as i32)
            }
            Schedule::Constant { lambda, h } => {
                let x = *lambda * *h;
                (T::one() + (-x).exp()) / (T::one() + x.exp())
            }
            Schedule::Table { mu, .. } => mu[k],
        }
    }

    /// Learning rate `η_k`.
    ///
    /// # Panics
    /// For tabulated schedules, when `k` is beyond [`Schedule::horizon`].
    pub fn eta(&self, k: usize) -> T {
        match self {
            Schedule::Classical { n, h, asymptotic } => {
                if k == 0 {
                    return T::zero();
                }
                let kf = T::from_usize_lossy(k);
                classical_eta_factor(*n, kf, *asymptotic) * *h * *h
            }
            Schedule::Wwj { n, d, h, asymptotic } => {
                if k == 0 {
                    return T::zero();
                }
                let kf = T::from_usize_lossy(k);
                let t = kf * *h;
                *d * classical_eta_factor(*n, kf, *asymptotic) * t.powi(*n as i32 - 3) * *h * *h
            }
            Schedule::Bjw { n, d, h } => {
                if k == 0 {
                    return T::zero();
                }
                let two_k = T::lit(2.0) * T::from_usize_lossy(k);
                let m = 2 * *n as i32 - 3;
                let ratio = ((two_k - T::one()) / (two_k + T::one())).powi(m);
                let t_mid = (T::from_usize_lossy(k) + T::lit(0.5)) * *h;
                *d * (T::one() + ratio) / T::lit(2.0) * t_mid.powi(*n as i32 - 3) * *h * *h
            }
            Schedule::Constant { lambda, h } => {
                T::lit(2.0) * *h * *h / (T::one() + (*lambda * *h).exp())
            }
            Schedule::Table { eta, .. } => eta[k],
        }
    }
}

fn classical_eta_factor<T: Scalar>(n: u32, k: T, asymptotic: bool) -> T {
    if asymptotic {
        let two_k = T::lit(2.0) * k;
        two_k / (two_k + T::from_u32(n).expect("u32 fits in scalar"))
    } else {
        power_ratio_eta(n, k)
    }
}
