//! Gradient descent, classical momentum and Nesterov's method, both as
//! recursive schemes and as solutions of (forced) discrete Euler–Lagrange
//! equations.

mod del;
mod engine;

pub use del::{fictitious_force, forced_del_step, nag_x_recursion, nag_y_recursion};
pub use engine::{count_local_maxima, run, Record, StopReason, StopRule, Trajectory};
pub(crate) use engine::Recorder;

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::linalg::all_finite;
use crate::objectives::Objective;
use crate::scalar::Scalar;
use crate::schedules::Schedule;
use crate::wwj::{self, WwjParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gd,
    Cm,
    Nag,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gd, Method::Cm, Method::Nag];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Cm => "cm",
            Method::Nag => "nag",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Ok(Method::Gd),
            "cm" => Ok(Method::Cm),
            "nag" => Ok(Method::Nag),
            other => Err(Error::domain(format!("unknown method '{other}' (expected gd, cm or nag)"))),
        }
    }
}

/// Any of the supported methods with its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm<T> {
    Momentum { method: Method, schedule: Schedule<T> },
    Wwj(WwjParams<T>),
}

impl<T: Scalar> Algorithm<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Momentum { method, .. } => method.name(),
            Algorithm::Wwj(_) => "wwj",
        }
    }
}

pub fn run_algorithm<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    alg: &Algorithm<T>,
    x0: &[T],
    stop: &StopRule<T>,
) -> Result<Trajectory<T>> {
    match alg {
        Algorithm::Momentum { method, schedule } => run(obj, *method, schedule, x0, stop),
        Algorithm::Wwj(params) => wwj::run(obj, params, x0, stop),
    }
}

/// Two consecutive iterates.
///
/// For [`Method::Cm`] and [`Method::Gd`], `x_prev = x_{k−1}` and `x_curr = x_k`.
/// For [`Method::Nag`], `x_prev = ȳ_k` (the gradient-step sequence) and
/// `x_curr = x̄_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T> {
    pub k: usize,
    pub x_prev: Vec<T>,
    pub x_curr: Vec<T>,
    pub method: Method,
}

impl<T: Scalar> OptimizerState<T> {
    /// Starts with `x_{−1} = x_0` (resp. `ȳ_0 = x̄_0`), so the first update
    /// carries no momentum.
    pub fn new(method: Method, x0: Vec<T>) -> Self {
        Self {
            k: 0,
            x_prev: x0.clone(),
            x_curr: x0,
            method,
        }
    }

    /// Moves to step `k + 1` given the output of a step function.
    pub fn advance(&mut self, x_next: Vec<T>, y_next: Vec<T>) {
        let old = std::mem::replace(&mut self.x_curr, x_next);
        self.x_prev = match self.method {
            Method::Nag => y_next,
            Method::Cm | Method::Gd => old,
        };
        self.k += 1;
    }
}

fn finite_or<T: Scalar>(v: Vec<T>, step: usize, what: &str) -> Result<Vec<T>> {
    if all_finite(&v) {
        Ok(v)
    } else {
        Err(Error::Numerical {
            step,
            what: what.to_string(),
        })
    }
}

pub(crate) fn checked_gradient<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], step: usize) -> Result<Vec<T>> {
    check_dim(obj.dim(), x.len())?;
    finite_or(obj.gradient(x), step, "non-finite gradient")
}

/// `x − η ∇f(x)`; `k` only labels errors.
pub fn gd_step<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], eta: T, k: usize) -> Result<Vec<T>> {
    let g = checked_gradient(obj, x, k)?;
    finite_or(gd_update(x, &g, eta), k, "non-finite iterate")
}

pub(crate) fn gd_update<T: Scalar>(x: &[T], g: &[T], eta: T) -> Vec<T> {
    x.iter().zip(g).map(|(&xi, &gi)| xi - eta * gi).collect()
}

/// `y = x_k − η_k ∇f(x_k)`, `x_{k+1} = y + μ_k (x_k − x_{k−1})`.
pub(crate) fn cm_update<T: Scalar>(x: &[T], x_prev: &[T], g: &[T], mu: T, eta: T) -> (Vec<T>, Vec<T>) {
    let y = gd_update(x, g, eta);
    let next = y
        .iter()
        .zip(x.iter().zip(x_prev))
        .map(|(&yi, (&xi, &pi))| yi + mu * (xi - pi))
        .collect();
    (next, y)
}

/// `ȳ_{k+1} = x̄_k − η_k ∇f(x̄_k)`, `x̄_{k+1} = ȳ_{k+1} + μ_k (ȳ_{k+1} − ȳ_k)`.
pub(crate) fn nag_update<T: Scalar>(x: &[T], y_prev: &[T], g: &[T], mu: T, eta: T) -> (Vec<T>, Vec<T>) {
    let y = gd_update(x, g, eta);
    let next = y.iter().zip(y_prev).map(|(&yi, &pi)| yi + mu * (yi - pi)).collect();
    (next, y)
}

fn check_state<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, state: &OptimizerState<T>, expect: Method) -> Result<()> {
    if state.method != expect {
        return Err(Error::domain(format!(
            "{expect} step called on a {} state",
            state.method
        )));
    }
    check_dim(obj.dim(), state.x_prev.len())
}

/// Classical momentum step. Returns `(x_{k+1}, y_{k+1})`.
pub fn cm_step<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    state: &OptimizerState<T>,
    mu: T,
    eta: T,
) -> Result<(Vec<T>, Vec<T>)> {
    check_state(obj, state, Method::Cm)?;
    let g = checked_gradient(obj, &state.x_curr, state.k)?;
    let (x, y) = cm_update(&state.x_curr, &state.x_prev, &g, mu, eta);
    Ok((finite_or(x, state.k, "non-finite iterate")?, y))
}

/// Nesterov step. Returns `(x̄_{k+1}, ȳ_{k+1})`.
pub fn nag_step<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    state: &OptimizerState<T>,
    mu: T,
    eta: T,
) -> Result<(Vec<T>, Vec<T>)> {
    check_state(obj, state, Method::Nag)?;
    let g = checked_gradient(obj, &state.x_curr, state.k)?;
    let (x, y) = nag_update(&state.x_curr, &state.x_prev, &g, mu, eta);
    Ok((finite_or(x, state.k, "non-finite iterate")?, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{FnObjective, QuadraticForm};
    use approx::assert_relative_eq;

    fn half_square() -> QuadraticForm<f64> {
        QuadraticForm::identity(1)
    }

    #[test]
    fn gd_examples() {
        let f = half_square();
        assert_relative_eq!(gd_step(&f, &[1.0], 0.1, 0).unwrap()[0], 0.9, epsilon = 1e-15);
        assert_eq!(gd_step(&f, &[0.0], 0.1, 0).unwrap(), vec![0.0]);
        assert_eq!(gd_step(&f, &[0.7], 0.0, 0).unwrap(), vec![0.7]);
    }

    #[test]
    fn gd_reports_non_finite_gradient() {
        let f = FnObjective::new("bad", 1, |_: &[f64]| 0.0, |_: &[f64]| vec![f64::NAN]);
        let err = gd_step(&f, &[1.0], 0.1, 17).unwrap_err();
        assert!(matches!(err, Error::Numerical { step: 17, .. }));
    }

    #[test]
    fn cm_examples() {
        let f = half_square();
        let st = OptimizerState {
            k: 3,
            x_prev: vec![1.0],
            x_curr: vec![0.9],
            method: Method::Cm,
        };
        let (x, y) = cm_step(&f, &st, 0.9, 0.01).unwrap();
        assert_relative_eq!(y[0], 0.891, epsilon = 1e-15);
        assert_relative_eq!(x[0], 0.801, epsilon = 1e-15);

        let (x, _) = cm_step(&f, &st, 0.0, 0.1).unwrap();
        assert_eq!(x, gd_step(&f, &[0.9], 0.1, 3).unwrap());

        let st = OptimizerState::new(Method::Cm, vec![0.5]);
        let (x, y) = cm_step(&f, &st, 0.9, 0.1).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn nag_examples() {
        let f = half_square();
        let st = OptimizerState {
            k: 3,
            x_prev: vec![1.0],
            x_curr: vec![0.9],
            method: Method::Nag,
        };
        let (x, y) = nag_step(&f, &st, 0.9, 0.01).unwrap();
        assert_relative_eq!(y[0], 0.891, epsilon = 1e-15);
        assert_relative_eq!(x[0], 0.7929, epsilon = 1e-15);

        let cm = OptimizerState {
            method: Method::Cm,
            ..st.clone()
        };
        assert_eq!(nag_step(&f, &st, 0.0, 0.1).unwrap().0, cm_step(&f, &cm, 0.0, 0.1).unwrap().0);

        // stationary companion sequence
        let st = OptimizerState {
            k: 1,
            x_prev: vec![0.891],
            x_curr: vec![0.9],
            method: Method::Nag,
        };
        let (x, y) = nag_step(&f, &st, 0.9, 0.01).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn wrong_state_kind() {
        let f = half_square();
        let st = OptimizerState::new(Method::Nag, vec![1.0]);
        assert!(cm_step(&f, &st, 0.5, 0.1).is_err());
        let st = OptimizerState::new(Method::Cm, vec![1.0, 2.0]);
        assert!(matches!(cm_step(&f, &st, 0.5, 0.1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn advance_bookkeeping() {
        let mut st = OptimizerState::new(Method::Nag, vec![1.0]);
        st.advance(vec![2.0], vec![3.0]);
        assert_eq!((st.k, st.x_prev[0], st.x_curr[0]), (1, 3.0, 2.0));
        let mut st = OptimizerState::new(Method::Cm, vec![1.0]);
        st.advance(vec![2.0], vec![3.0]);
        assert_eq!((st.k, st.x_prev[0], st.x_curr[0]), (1, 1.0, 2.0));
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("wwj".parse::<Method>().is_err());
    }
}
