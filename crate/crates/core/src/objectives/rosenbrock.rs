use super::{Minimum, MinimumKind, Objective};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Generalised Rosenbrock function
/// `f(x) = Σ_{i<n} (1 - x_i)² + 100 (x_{i+1} - x_i²)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rosenbrock {
    n: usize,
}

pub fn make_rosenbrock(n: usize) -> Result<Rosenbrock> {
    if n < 2 {
        return Err(Error::domain(format!("rosenbrock needs n >= 2, got {n}")));
    }
    Ok(Rosenbrock { n })
}

impl<T: Scalar> Objective<T> for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[T]) -> T {
        let hundred = T::lit(100.0);
        x.windows(2)
            .map(|w| {
                let a = T::one() - w[0];
                let b = w[1] - w[0] * w[0];
                a * a + hundred * b * b
            })
            .sum()
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        let (two, c200, c400) = (T::lit(2.0), T::lit(200.0), T::lit(400.0));
        let mut g = vec![T::zero(); n];
        for i in 0..n - 1 {
            let r = x[i + 1] - x[i] * x[i];
            g[i] += -two * (T::one() - x[i]) - c400 * x[i] * r;
            g[i + 1] += c200 * r;
        }
        g
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let n = x.len();
        let (two, c200, c400, c1200) = (T::lit(2.0), T::lit(200.0), T::lit(400.0), T::lit(1200.0));
        let mut h = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            h[(i, i)] += two + c1200 * x[i] * x[i] - c400 * x[i + 1];
            h[(i + 1, i + 1)] += c200;
            let off = -c400 * x[i];
            h[(i, i + 1)] += off;
            h[(i + 1, i)] += off;
        }
        Some(h)
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn minima(&self) -> Vec<Minimum<T>> {
        let mut out = vec![Minimum {
            location: vec![T::one(); self.n],
            kind: MinimumKind::Global,
            value: Some(T::zero()),
            exact: true,
        }];
        if self.n >= 4 {
            let mut loc = vec![T::one(); self.n];
            loc[0] = -T::one();
            out.push(Minimum {
                location: loc,
                kind: MinimumKind::Local,
                value: None,
                exact: false,
            });
        }
        out
    }
}
