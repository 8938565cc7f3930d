use super::{Minimum, MinimumKind, Objective};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

/// `f(x) = ½⟨x, Σ⁻¹x⟩` where `Σ_ij = ρ^|i-j|`.
///
/// The inverse covariance is tridiagonal and is stored directly:
/// diagonal `(1, 1+ρ², …, 1+ρ², 1)`, off-diagonal `-ρ`, all over `1-ρ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalQuadratic<T> {
    rho: T,
    diag: Vec<T>,
    off: T,
}

pub fn make_quadratic<T: Scalar>(rho: T, n: usize) -> Result<TridiagonalQuadratic<T>> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::domain("quadratic dimension must be at least 1"));
    }
    let denom = T::one() - rho * rho;
    let inner = (T::one() + rho * rho) / denom;
    let edge = T::one() / denom;
    let diag = (0..n)
        .map(|i| if i == 0 || i + 1 == n { edge } else { inner })
        .collect();
    Ok(TridiagonalQuadratic {
        rho,
        diag,
        off: -rho / denom,
    })
}

impl<T: Scalar> TridiagonalQuadratic<T> {
    pub fn rho(&self) -> T {
        self.rho
    }

    /// `Σ⁻¹ x` without forming the matrix.
    pub fn precision_mul(&self, x: &[T]) -> Vec<T> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn precision_matrix(&self) -> Matrix<T> {
        let n = self.diag.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i.abs_diff(j) == 1 {
                self.off
            } else {
                T::zero()
            }
        })
    }

    /// The covariance `Σ_ij = ρ^|i-j|`.
    pub fn covariance_matrix(&self) -> Matrix<T> {
        let n = self.diag.len();
        Matrix::from_fn(n, n, |i, j| self.rho.powi(i.abs_diff(j) as i32))
    }
}

impl<T: Scalar> Objective<T> for TridiagonalQuadratic<T> {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value(&self, x: &[T]) -> T {
        T::lit(0.5) * dot(x, &self.precision_mul(x))
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        self.precision_mul(x)
    }

    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        Some(self.precision_matrix())
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn minima(&self) -> Vec<Minimum<T>> {
        vec![Minimum {
            location: vec![T::zero(); self.dim()],
            kind: MinimumKind::Global,
            value: Some(T::zero()),
            exact: true,
        }]
    }
}

/// General quadratic `f(x) = ½ (x-c)ᵀ A (x-c)` with a symmetric matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<T> {
    matrix: Matrix<T>,
    center: Vec<T>,
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn new(matrix: Matrix<T>, center: Vec<T>) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::domain("quadratic form needs a square matrix"));
        }
        check_dim(matrix.rows(), center.len())?;
        let sym = Matrix::from_fn(matrix.rows(), matrix.cols(), |i, j| {
            T::lit(0.5) * (matrix[(i, j)] + matrix[(j, i)])
        });
        Ok(Self { matrix: sym, center })
    }

    /// `½‖x‖²` on `R^n`.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n),
            center: vec![T::zero(); n],
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    fn shifted(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.center).map(|(&a, &c)| a - c).collect()
    }
}

impl<T: Scalar> Objective<T> for QuadraticForm<T> {
    fn name(&self) -> &str {
        "quadratic-form"
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> T {
        let d = self.shifted(x);
        T::lit(0.5) * dot(&d, &self.matrix.mul_vec(&d))
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        self.matrix.mul_vec(&self.shifted(x))
    }

    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        Some(self.matrix.clone())
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn minima(&self) -> Vec<Minimum<T>> {
        vec![Minimum {
            location: self.center.clone(),
            kind: MinimumKind::Global,
            value: Some(T::zero()),
            exact: true,
        }]
    }
}
