//! The three-sequence method of Wibisono, Wilson and Jordan:
//!
//! ```text
//! x_{k+1} = p/(k+p) z_k + k/(k+p) y_k
//! y_k     = argmin_y  f_{p−1}(y; x_k) + N/(p hᵖ) ‖y − x_k‖ᵖ
//! z_k     = z_{k−1} − D (k/p) t_k^{p−2} h² ∇f(y_k)
//! ```
//!
//! with `z_0 = y_0 = x_0` and `f_{p−1}` the Taylor expansion of order `p−1`.
//! For `p = 2` the argmin is explicit; for `p = 3` it is found by damped
//! Newton iteration on its stationarity condition.

use crate::error::{check_dim, Error, Result};
use crate::integrators::{StopReason, StopRule, Trajectory};
use crate::integrators::Recorder;
use crate::linalg::{all_finite, norm, Matrix};
use crate::objectives::Objective;
use crate::scalar::Scalar;

/// Parameters of the method. `n_weight` is the sub-problem weight `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwjParams<T> {
    pub p: u32,
    pub d: T,
    pub n_weight: T,
    pub h: T,
}

impl<T: Scalar> WwjParams<T> {
    pub fn new(p: u32, d: T, n_weight: T, h: T) -> Result<Self> {
        let params = Self { p, d, n_weight, h };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p == 2 || self.p == 3) {
            return Err(Error::domain(format!("p must be 2 or 3, got {}", self.p)));
        }
        for (name, v) in [("D", self.d), ("N", self.n_weight), ("h", self.h)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn pf(&self) -> T {
        T::from_u32(self.p).expect("u32 fits in scalar")
    }

    /// `N / hᵖ`
    fn weight(&self) -> T {
        self.n_weight / self.h.powi(self.p as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WwjState<T> {
    pub k: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Vec<T>,
}

impl<T: Scalar> WwjState<T> {
    pub fn new(x0: Vec<T>) -> Self {
        Self {
            k: 0,
            y: x0.clone(),
            z: x0.clone(),
            x: x0,
        }
    }
}

/// Outcome of an inner solve for the displacement `d = y − x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution<T> {
    pub d: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

const NEWTON_MAX_ITERS: usize = 100;
const NEWTON_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 60;

fn tolerance<T: Scalar>(gnorm: T) -> T {
    T::lit(NEWTON_TOL).max(T::lit(64.0) * T::epsilon()) * gnorm.max(T::one())
}

/// `r(d) = g + [p=3] H d + (N/hᵖ) ‖d‖^{p−2} d`
fn stationarity<T: Scalar>(g: &[T], hess: Option<&Matrix<T>>, c: T, p: u32, d: &[T]) -> Vec<T> {
    let scale = if p == 3 { c * norm(d) } else { c };
    let hd = hess.filter(|_| p == 3).map(|h| h.mul_vec(d));
    (0..g.len())
        .map(|i| g[i] + hd.as_ref().map_or(T::zero(), |v| v[i]) + scale * d[i])
        .collect()
}

fn stationarity_jacobian<T: Scalar>(hess: Option<&Matrix<T>>, c: T, p: u32, d: &[T]) -> Matrix<T> {
    let n = d.len();
    if p == 2 {
        return Matrix::from_fn(n, n, |i, j| if i == j { c } else { T::zero() });
    }
    let nd = norm(d);
    Matrix::from_fn(n, n, |i, j| {
        let h = hess.map_or(T::zero(), |h| h[(i, j)]);
        let outer = if nd > T::zero() { d[i] * d[j] / nd } else { T::zero() };
        let diag = if i == j { nd } else { T::zero() };
        h + c * (diag + outer)
    })
}

/// Solves the stationarity condition of the regularised Taylor model by
/// damped Newton iteration starting from `d = 0`.
///
/// Each Newton step is halved until the residual stops increasing. When the
/// Jacobian is singular at the start, the iteration restarts from the
/// solution of the model without curvature, `d = −g/√(c‖g‖)`.
pub fn solve_subproblem<T: Scalar>(
    g: &[T],
    hess: Option<&Matrix<T>>,
    params: &WwjParams<T>,
    step: usize,
) -> Result<SubproblemSolution<T>> {
    let p = params.p;
    if p == 3 && hess.is_none() {
        return Err(Error::domain("p = 3 requires a Hessian"));
    }
    let c = params.weight();
    let tol = tolerance(norm(g));
    let mut d = vec![T::zero(); g.len()];
    let mut r = stationarity(g, hess, c, p, &d);
    let mut rn = norm(&r);
    let mut restarted = false;
    for it in 0..=NEWTON_MAX_ITERS {
        if rn <= tol {
            return Ok(SubproblemSolution {
                d,
                residual: rn,
                iterations: it,
            });
        }
        if it == NEWTON_MAX_ITERS {
            break;
        }
        let jac = stationarity_jacobian(hess, c, p, &d);
        let neg_r: Vec<T> = r.iter().map(|&v| -v).collect();
        let delta = match jac.solve(&neg_r) {
            Ok(v) if all_finite(&v) => v,
            _ if !restarted => {
                restarted = true;
                let gn = norm(g);
                let s = (c * gn).sqrt();
                d = g.iter().map(|&gi| -gi / s).collect();
                r = stationarity(g, hess, c, p, &d);
                rn = norm(&r);
                continue;
            }
            _ => break,
        };
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<T> = d.iter().zip(&delta).map(|(&a, &b)| a + t * b).collect();
            let tr = stationarity(g, hess, c, p, &trial);
            let tn = norm(&tr);
            if tn.is_finite() && tn < rn {
                d = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Err(Error::Convergence {
        step,
        iterations: NEWTON_MAX_ITERS,
        residual: rn.to_f64_lossy(),
    })
}

/// `y_k`: explicit `x_k − h²/N ∇f(x_k)` for `p = 2`, a Newton solve for `p = 3`.
pub fn y_update<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    params: &WwjParams<T>,
    x: &[T],
    k: usize,
) -> Result<Vec<T>> {
    Ok(y_update_detailed(obj, params, x, k)?.0)
}

fn y_update_detailed<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    params: &WwjParams<T>,
    x: &[T],
    k: usize,
) -> Result<(Vec<T>, T)> {
    check_dim(obj.dim(), x.len())?;
    let g = obj.gradient(x);
    if !all_finite(&g) {
        return Err(Error::Numerical {
            step: k,
            what: "non-finite gradient".into(),
        });
    }
    if params.p == 2 {
        let s = params.h * params.h / params.n_weight;
        return Ok((x.iter().zip(&g).map(|(&xi, &gi)| xi - s * gi).collect(), T::zero()));
    }
    let hess = obj
        .hessian(x)
        .ok_or_else(|| Error::domain(format!("objective '{}' has no Hessian, required for p = 3", obj.name())))?;
    let sol = solve_subproblem(&g, Some(&hess), params, k)?;
    Ok((x.iter().zip(&sol.d).map(|(&a, &b)| a + b).collect(), sol.residual))
}

/// `z_k = z_{k−1} − D (k/p) t_k^{p−2} h² ∇f(y_k)` with `t_k = kh`.
pub fn z_update<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    params: &WwjParams<T>,
    z_prev: &[T],
    y: &[T],
    k: usize,
) -> Result<Vec<T>> {
    check_dim(z_prev.len(), y.len())?;
    let kf = T::from_usize_lossy(k);
    let t = kf * params.h;
    let coef = params.d * (kf / params.pf()) * t.powi(params.p as i32 - 2) * params.h * params.h;
    let g = obj.gradient(y);
    Ok(z_prev.iter().zip(&g).map(|(&z, &gi)| z - coef * gi).collect())
}

/// `x_{k+1} = p/(k+p) z_k + k/(k+p) y_k`
pub fn x_update<T: Scalar>(params: &WwjParams<T>, z: &[T], y: &[T], k: usize) -> Result<Vec<T>> {
    check_dim(z.len(), y.len())?;
    let (kf, pf) = (T::from_usize_lossy(k), params.pf());
    let wz = pf / (kf + pf);
    let wy = kf / (kf + pf);
    Ok(z.iter().zip(y).map(|(&a, &b)| wz * a + wy * b).collect())
}

/// Advances `(x_k, y_k, z_k)` to step `k+1`; returns the inner residual.
pub fn step<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, params: &WwjParams<T>, state: &mut WwjState<T>) -> Result<T> {
    let k = state.k;
    let x = x_update(params, &state.z, &state.y, k)?;
    let (y, residual) = y_update_detailed(obj, params, &x, k + 1)?;
    let z = z_update(obj, params, &state.z, &y, k + 1)?;
    *state = WwjState { k: k + 1, x, y, z };
    Ok(residual)
}

/// Runs the method from `x0`, recording `x_k` with `y_k` as companion.
pub fn run<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    params: &WwjParams<T>,
    x0: &[T],
    stop: &StopRule<T>,
) -> Result<Trajectory<T>> {
    Ok(run_detailed(obj, params, x0, stop)?.0)
}

/// As [`run`], also returning the inner-solve residual of every step
/// (all zero for `p = 2`).
pub fn run_detailed<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    params: &WwjParams<T>,
    x0: &[T],
    stop: &StopRule<T>,
) -> Result<(Trajectory<T>, Vec<T>)> {
    params.validate()?;
    stop.validate()?;
    check_dim(obj.dim(), x0.len())?;
    if params.p == 3 && !obj.has_hessian() {
        return Err(Error::domain(format!("objective '{}' has no Hessian, required for p = 3", obj.name())));
    }
    let mut rec = Recorder::new(stop, true);
    let mut state = WwjState::new(x0.to_vec());
    let mut residuals = Vec::new();
    loop {
        let g = obj.gradient(&state.x);
        let f = obj.value(&state.x);
        if let Some(reason) = rec.observe(state.k, &state.x, f, norm(&g), Some(&state.y)) {
            return Ok((rec.finish(reason), residuals));
        }
        match step(obj, params, &mut state) {
            Ok(r) => residuals.push(r),
            Err(Error::Numerical { .. }) => {
                let x = state.x.clone();
                let _ = rec.observe(state.k + 1, &x, T::nan(), T::nan(), Some(&state.y));
                return Ok((rec.finish(StopReason::Diverged), residuals));
            }
            Err(e) => return Err(e),
        }
    }
}
