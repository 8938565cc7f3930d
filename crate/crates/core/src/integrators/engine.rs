use super::{cm_update, gd_update, nag_update, Method, OptimizerState};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, norm};
use crate::objectives::Objective;
use crate::scalar::Scalar;
use crate::schedules::Schedule;

/// When to stop a run. Tolerances of zero disable the corresponding test,
/// so by default a run lasts exactly `max_iters` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule<T> {
    pub max_iters: usize,
    /// Stop once `‖∇f(x_k)‖ ≤ grad_tol`.
    pub grad_tol: T,
    /// Stop once `|f(x_k) − f(x_{k−1})| ≤ f_tol`.
    pub f_tol: T,
    /// Flag divergence once `‖x_k‖` or `|f(x_k)|` exceeds this.
    pub divergence_bound: T,
    /// Keep every `record_every`-th record (the last one is always kept).
    pub record_every: usize,
}

impl<T: Scalar> StopRule<T> {
    pub fn iterations(max_iters: usize) -> Self {
        Self {
            max_iters,
            grad_tol: T::zero(),
            f_tol: T::zero(),
            divergence_bound: T::lit(1e12),
            record_every: 1,
        }
    }

    pub fn with_grad_tol(mut self, tol: T) -> Self {
        self.grad_tol = tol;
        self
    }

    pub fn with_f_tol(mut self, tol: T) -> Self {
        self.f_tol = tol;
        self
    }

    pub fn with_divergence_bound(mut self, bound: T) -> Self {
        self.divergence_bound = bound;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::domain("record stride must be at least 1"));
        }
        if !(self.grad_tol >= T::zero()) || !(self.f_tol >= T::zero()) {
            return Err(Error::domain("tolerances must be nonnegative"));
        }
        if !(self.divergence_bound > T::zero()) {
            return Err(Error::domain("divergence bound must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    GradTol,
    FTol,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub k: usize,
    pub x: Vec<T>,
    pub f: T,
    pub grad_norm: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub records: Vec<Record<T>>,
    /// Companion sequence aligned with `records`: Nesterov's ȳ_k, or the
    /// y-sequence of the three-sequence method.
    pub companion_y: Option<Vec<Vec<T>>>,
    /// Step at which the iterate left the divergence bound or became non-finite.
    pub diverged_at: Option<usize>,
    pub stop_reason: StopReason,
}

impl<T: Scalar> Trajectory<T> {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn last(&self) -> &Record<T> {
        self.records.last().expect("trajectory always holds the initial record")
    }

    pub fn fvals(&self) -> Vec<T> {
        self.records.iter().map(|r| r.f).collect()
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        self.records.iter().map(|r| r.x.clone()).collect()
    }
}

/// Shared bookkeeping for every iteration loop.
pub(crate) struct Recorder<'a, T> {
    stop: &'a StopRule<T>,
    records: Vec<Record<T>>,
    ys: Option<Vec<Vec<T>>>,
    prev_f: Option<T>,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    pub(crate) fn new(stop: &'a StopRule<T>, with_companion: bool) -> Self {
        Self {
            stop,
            records: Vec::new(),
            ys: with_companion.then(Vec::new),
            prev_f: None,
        }
    }

    fn push(&mut self, k: usize, x: &[T], f: T, grad_norm: T, y: Option<&[T]>) {
        self.records.push(Record {
            k,
            x: x.to_vec(),
            f,
            grad_norm,
        });
        if let (Some(ys), Some(y)) = (self.ys.as_mut(), y) {
            ys.push(y.to_vec());
        }
    }

    /// Records step `k` as required and reports whether the run should stop.
    pub(crate) fn observe(&mut self, k: usize, x: &[T], f: T, grad_norm: T, y: Option<&[T]>) -> Option<StopReason> {
        let s = self.stop;
        let reason = if !f.is_finite()
            || !grad_norm.is_finite()
            || !all_finite(x)
            || norm(x) > s.divergence_bound
            || f.abs() > s.divergence_bound
        {
            Some(StopReason::Diverged)
        } else if s.grad_tol > T::zero() && grad_norm <= s.grad_tol {
            Some(StopReason::GradTol)
        } else if s.f_tol > T::zero() && self.prev_f.is_some_and(|p| (f - p).abs() <= s.f_tol) {
            Some(StopReason::FTol)
        } else if k >= s.max_iters {
            Some(StopReason::MaxIters)
        } else {
            None
        };
        if reason.is_some() || k.is_multiple_of(s.record_every) {
            self.push(k, x, f, grad_norm, y);
        }
        self.prev_f = Some(f);
        reason
    }

    pub(crate) fn finish(self, reason: StopReason) -> Trajectory<T> {
        let diverged_at = (reason == StopReason::Diverged).then(|| self.records.last().map_or(0, |r| r.k));
        Trajectory {
            records: self.records,
            companion_y: self.ys,
            diverged_at,
            stop_reason: reason,
        }
    }
}

/// Runs GD, CM or NAG from `x0`.
///
/// The first step carries no momentum (`x_{−1} = x_0` for CM, `ȳ_0 = x̄_0`
/// for NAG). Non-finite values or iterates beyond the divergence bound end
/// the run with [`Trajectory::diverged_at`] set rather than an error.
pub fn run<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    method: Method,
    schedule: &Schedule<T>,
    x0: &[T],
    stop: &StopRule<T>,
) -> Result<Trajectory<T>> {
    stop.validate()?;
    check_dim(obj.dim(), x0.len())?;
    if let Some(hz) = schedule.horizon() {
        if hz + 1 < stop.max_iters {
            return Err(Error::domain(format!(
                "tabulated schedule covers {} steps, {} requested",
                hz + 1,
                stop.max_iters
            )));
        }
    }
    let mut rec = Recorder::new(stop, method == Method::Nag);
    let mut state = OptimizerState::new(method, x0.to_vec());
    loop {
        let k = state.k;
        let x = &state.x_curr;
        let g = obj.gradient(x);
        let f = obj.value(x);
        let y = (method == Method::Nag).then_some(state.x_prev.as_slice());
        if let Some(reason) = rec.observe(k, x, f, norm(&g), y) {
            return Ok(rec.finish(reason));
        }
        let (mu, eta) = (schedule.mu(k), schedule.eta(k));
        let (next, y_next) = match method {
            Method::Gd => {
                let n = gd_update(x, &g, eta);
                (n.clone(), n)
            }
            Method::Cm => cm_update(x, &state.x_prev, &g, mu, eta),
            Method::Nag => nag_update(x, &state.x_prev, &g, mu, eta),
        };
        state.advance(next, y_next);
    }
}

/// Number of strict local maxima of `seq[skip..]`.
pub fn count_local_maxima<T: Scalar>(seq: &[T], skip: usize) -> usize {
    let tail = seq.get(skip..).unwrap_or(&[]);
    tail.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}
