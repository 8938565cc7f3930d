//! Benchmark objective functions with analytic derivatives.

mod logreg;
mod quadratic;
mod rosenbrock;
mod yatf;

use std::sync::Arc;

pub use logreg::{logistic, make_logreg, Dataset, LogisticMse};
pub use quadratic::{make_quadratic, QuadraticForm, TridiagonalQuadratic};
pub use rosenbrock::{make_rosenbrock, Rosenbrock};
pub use yatf::{make_yatf, Yatf};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimumKind {
    Global,
    Local,
}

/// A known (or approximately known) minimiser.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub location: Vec<T>,
    pub kind: MinimumKind,
    /// Objective value at the minimiser, when known exactly.
    pub value: Option<T>,
    /// `false` when `location` is only an approximate position.
    pub exact: bool,
}

/// A differentiable scalar field on `R^dim`.
///
/// Implementations are immutable value objects; evaluation must be re-entrant.
pub trait Objective<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vec<T>;

    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        None
    }

    fn has_hessian(&self) -> bool {
        false
    }

    fn minima(&self) -> Vec<Minimum<T>> {
        Vec::new()
    }

    /// Exact optimal value, if a global minimum with a known value is recorded.
    fn optimal_value(&self) -> Option<T> {
        self.minima()
            .into_iter()
            .find(|m| m.kind == MinimumKind::Global)
            .and_then(|m| m.value)
    }
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for Arc<O> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        (**self).hessian(x)
    }
    fn has_hessian(&self) -> bool {
        (**self).has_hessian()
    }
    fn minima(&self) -> Vec<Minimum<T>> {
        (**self).minima()
    }
}

type ValueFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type GradFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
type HessFn<T> = Arc<dyn Fn(&[T]) -> Matrix<T> + Send + Sync>;

/// Objective assembled from closures. Useful for potentials such as the
/// Bregman generator and for ad-hoc test functions.
#[derive(Clone)]
pub struct FnObjective<T> {
    name: String,
    dim: usize,
    value: ValueFn<T>,
    grad: GradFn<T>,
    hess: Option<HessFn<T>>,
    minima: Vec<Minimum<T>>,
}

impl<T: Scalar> FnObjective<T> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[T]) -> T + Send + Sync + 'static,
        grad: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            grad: Arc::new(grad),
            hess: None,
            minima: Vec::new(),
        }
    }

    pub fn with_hessian(mut self, hess: impl Fn(&[T]) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.hess = Some(Arc::new(hess));
        self
    }

    pub fn with_minimum(mut self, m: Minimum<T>) -> Self {
        self.minima.push(m);
        self
    }
}

impl<T: Scalar> std::fmt::Debug for FnObjective<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnObjective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_hessian", &self.hess.is_some())
            .finish()
    }
}

impl<T: Scalar> Objective<T> for FnObjective<T> {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        (self.grad)(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        self.hess.as_ref().map(|h| h(x))
    }
    fn has_hessian(&self) -> bool {
        self.hess.is_some()
    }
    fn minima(&self) -> Vec<Minimum<T>> {
        self.minima.clone()
    }
}

/// Central finite-difference gradient with a per-coordinate step
/// `step * max(1, |x_i|)`.
pub fn finite_difference_gradient<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], step: T) -> Vec<T> {
    let mut probe = x.to_vec();
    let two = T::lit(2.0);
    (0..x.len())
        .map(|i| {
            let hi = step * x[i].abs().max(T::one());
            probe[i] = x[i] + hi;
            let fp = obj.value(&probe);
            probe[i] = x[i] - hi;
            let fm = obj.value(&probe);
            probe[i] = x[i];
            (fp - fm) / (two * hi)
        })
        .collect()
}

/// Maximum over coordinates of `|g_i - fd_i| / max(1, |g_i|)` between the
/// analytic gradient and central finite differences.
pub fn check_gradient<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], step: T) -> Result<T> {
    check_dim(obj.dim(), x.len())?;
    if !(step > T::zero()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let analytic = obj.gradient(x);
    check_dim(obj.dim(), analytic.len())?;
    let fd = finite_difference_gradient(obj, x, step);
    Ok(analytic
        .iter()
        .zip(&fd)
        .map(|(&g, &d)| (g - d).abs() / g.abs().max(T::one()))
        .fold(T::zero(), T::max))
}

/// Largest relative disagreement between `hess(x) e_j` and the central
/// difference of the gradient along `e_j`, together with the Hessian asymmetry.
pub fn check_hessian<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, x: &[T], step: T) -> Result<(T, T)> {
    check_dim(obj.dim(), x.len())?;
    let hess = obj
        .hessian(x)
        .ok_or_else(|| Error::domain(format!("objective `{}` has no Hessian", obj.name())))?;
    let n = x.len();
    let two = T::lit(2.0);
    let mut probe = x.to_vec();
    let mut worst = T::zero();
    for j in 0..n {
        let hj = step * x[j].abs().max(T::one());
        probe[j] = x[j] + hj;
        let gp = obj.gradient(&probe);
        probe[j] = x[j] - hj;
        let gm = obj.gradient(&probe);
        probe[j] = x[j];
        for i in 0..n {
            let fd = (gp[i] - gm[i]) / (two * hj);
            let exact = hess[(i, j)];
            worst = worst.max((fd - exact).abs() / exact.abs().max(T::one()));
        }
    }
    Ok((worst, hess.asymmetry()))
}
