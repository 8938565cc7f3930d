//! Phase-space view of the discrete Lagrangian
//! `L^k(z0, z1) = a_k ½‖z1 − z0‖² − b_k⁻ f(z0) − b_{k+1}⁺ f(z1)`:
//! discrete Legendre transforms, the induced one-step map, and numerical
//! checks of its symplecticity and of the discrete Euler–Lagrange equations.

use crate::error::{check_dim, Error, Result};
use crate::integrators::Trajectory;
use crate::integrators::checked_gradient;
use crate::linalg::{norm, sub, Matrix};
use crate::objectives::Objective;
use crate::scalar::Scalar;
use crate::schedules::DiscreteLagrangianCoefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Scalar> PhasePoint<T> {
    pub fn new(x: Vec<T>, p: Vec<T>) -> Result<Self> {
        check_dim(x.len(), p.len())?;
        Ok(Self { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    fn flatten(&self) -> Vec<T> {
        self.x.iter().chain(&self.p).copied().collect()
    }

    fn unflatten(v: &[T]) -> Self {
        let n = v.len() / 2;
        Self {
            x: v[..n].to_vec(),
            p: v[n..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticityReport<T> {
    /// `max |JᵀΩJ − Ω|`
    pub defect: T,
    pub fd_step: T,
    pub point: PhasePoint<T>,
}

fn nonzero_a<T: Scalar>(coeffs: &DiscreteLagrangianCoefficients<T>, k: usize) -> Result<T> {
    let a = coeffs.a(k)?;
    if a == T::zero() {
        Err(Error::domain(format!("a_{k} is zero")))
    } else {
        Ok(a)
    }
}

/// `(z0, −D₁L^k(z0, z1)) = (z0, a_k(z1 − z0) + b_k⁻ ∇f(z0))`
pub fn legendre_minus<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    z0: &[T],
    z1: &[T],
    k: usize,
) -> Result<PhasePoint<T>> {
    check_dim(z0.len(), z1.len())?;
    let (a, bm) = (coeffs.a(k)?, coeffs.b_minus(k)?);
    let g0 = checked_gradient(obj, z0, k)?;
    let p = (0..z0.len()).map(|i| a * (z1[i] - z0[i]) + bm * g0[i]).collect();
    Ok(PhasePoint { x: z0.to_vec(), p })
}

/// `(z1, D₂L^k(z0, z1)) = (z1, a_k(z1 − z0) − b_{k+1}⁺ ∇f(z1))`
pub fn legendre_plus<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    z0: &[T],
    z1: &[T],
    k: usize,
) -> Result<PhasePoint<T>> {
    check_dim(z0.len(), z1.len())?;
    let (a, bp) = (coeffs.a(k)?, coeffs.b_plus(k + 1)?);
    let g1 = checked_gradient(obj, z1, k + 1)?;
    let p = (0..z0.len()).map(|i| a * (z1[i] - z0[i]) - bp * g1[i]).collect();
    Ok(PhasePoint { x: z1.to_vec(), p })
}

/// The discrete Hamiltonian map `𝔽⁺L ∘ (𝔽⁻L)⁻¹` from step `k` to `k+1`.
///
/// The inverse Legendre transform is explicit here:
/// `z1 = z0 + (p − b_k⁻ ∇f(z0)) / a_k`.
pub fn hamiltonian_step<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    pt: &PhasePoint<T>,
    k: usize,
) -> Result<PhasePoint<T>> {
    check_dim(pt.x.len(), pt.p.len())?;
    let a = nonzero_a(coeffs, k)?;
    let bm = coeffs.b_minus(k)?;
    let g0 = checked_gradient(obj, &pt.x, k)?;
    let z1: Vec<T> = (0..pt.dim()).map(|i| pt.x[i] + (pt.p[i] - bm * g0[i]) / a).collect();
    legendre_plus(coeffs, obj, &pt.x, &z1, k)
}

/// One-step map built from the forced Legendre transforms of Nesterov's
/// discrete forces `(F^k)⁻ = −(a_{k−1}/a_k) B_k ∇f(z0)` and
/// `(F^k)⁺ = B_k ∇f(z0)`, with `B_k = b_k⁻ + b_k⁺`:
///
/// ```text
/// p  = a_k Δz + b_k⁻ ∇f(z0) + (a_{k−1}/a_k) B_k ∇f(z0)
/// p' = a_k Δz − b_{k+1}⁺ ∇f(z1) + B_k ∇f(z0)
/// ```
///
/// Its Jacobian determinant in one dimension on `½λx²` is `1 − B_k λ / a_k`,
/// so it is not symplectic. Needs `k ≥ 1`.
pub fn forced_hamiltonian_step<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    pt: &PhasePoint<T>,
    k: usize,
) -> Result<PhasePoint<T>> {
    check_dim(pt.x.len(), pt.p.len())?;
    if k == 0 {
        return Err(Error::domain("the forced map needs k >= 1"));
    }
    let a = nonzero_a(coeffs, k)?;
    let a_prev = coeffs.a(k - 1)?;
    let (bm, b) = (coeffs.b_minus(k)?, coeffs.b_total(k)?);
    let bp = coeffs.b_plus(k + 1)?;
    let g0 = checked_gradient(obj, &pt.x, k)?;
    let c = bm + a_prev / a * b;
    let n = pt.dim();
    let z1: Vec<T> = (0..n).map(|i| pt.x[i] + (pt.p[i] - c * g0[i]) / a).collect();
    let g1 = checked_gradient(obj, &z1, k + 1)?;
    let p = (0..n)
        .map(|i| a * (z1[i] - pt.x[i]) - bp * g1[i] + b * g0[i])
        .collect();
    Ok(PhasePoint { x: z1, p })
}

/// Finite-difference Jacobian of a phase-space map, ordered `(x, p)`, from
/// the fourth-order five-point central stencil. Coordinate `i` is perturbed
/// by multiples of `fd_step · max(1, |v_i|)`.
pub fn map_jacobian<T: Scalar>(
    map: impl Fn(&PhasePoint<T>) -> Result<PhasePoint<T>>,
    pt: &PhasePoint<T>,
    fd_step: T,
) -> Result<Matrix<T>> {
    if !(fd_step > T::zero()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let v = pt.flatten();
    let m = v.len();
    let mut jac = Matrix::zeros(m, m);
    let eval = |j: usize, offset: T| -> Result<Vec<T>> {
        let mut w = v.clone();
        w[j] += offset;
        Ok(map(&PhasePoint::unflatten(&w))?.flatten())
    };
    let eight = T::lit(8.0);
    for j in 0..m {
        let step = fd_step * v[j].abs().max(T::one());
        let (p1, m1) = (eval(j, step)?, eval(j, -step)?);
        let (p2, m2) = (eval(j, step + step)?, eval(j, -(step + step))?);
        let denom = T::lit(12.0) * step;
        for i in 0..m {
            jac[(i, j)] = (eight * (p1[i] - m1[i]) - (p2[i] - m2[i])) / denom;
        }
    }
    Ok(jac)
}

/// `Ω = [[0, I], [−I, 0]]`
pub fn canonical_form<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            T::one()
        } else if i == j + n {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// `max |JᵀΩJ − Ω|`
pub fn symplectic_defect_of<T: Scalar>(jac: &Matrix<T>) -> Result<T> {
    let omega = canonical_form(jac.rows() / 2);
    let pulled = jac.transpose().matmul(&omega)?.matmul(jac)?;
    Ok(pulled.max_abs_diff(&omega))
}

/// Jacobian defect of `map` measured in the chart `X = s·x`, `P = p/s` with
/// `s = √|a_k|`. The rescaling is itself canonical, so the defect of an exact
/// Jacobian is unchanged, but it keeps positions and momenta on comparable
/// scales when `a_k` is large and the finite differences stay accurate.
fn report<T: Scalar>(
    map: impl Fn(&PhasePoint<T>) -> Result<PhasePoint<T>>,
    pt: &PhasePoint<T>,
    fd_step: T,
    a: T,
) -> Result<SymplecticityReport<T>> {
    let s = a.abs().sqrt();
    let to_balanced = |q: PhasePoint<T>| PhasePoint {
        x: q.x.iter().map(|&v| v * s).collect(),
        p: q.p.iter().map(|&v| v / s).collect(),
    };
    let from_balanced = |q: &PhasePoint<T>| PhasePoint {
        x: q.x.iter().map(|&v| v / s).collect(),
        p: q.p.iter().map(|&v| v * s).collect(),
    };
    let jac = map_jacobian(|q| map(&from_balanced(q)).map(to_balanced), &to_balanced(pt.clone()), fd_step)?;
    Ok(SymplecticityReport {
        defect: symplectic_defect_of(&jac)?,
        fd_step,
        point: pt.clone(),
    })
}

/// Symplecticity defect of [`hamiltonian_step`] at `pt`.
pub fn symplecticity_defect<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    pt: &PhasePoint<T>,
    k: usize,
    fd_step: T,
) -> Result<SymplecticityReport<T>> {
    report(|q| hamiltonian_step(coeffs, obj, q, k), pt, fd_step, nonzero_a(coeffs, k)?)
}

/// Symplecticity defect of [`forced_hamiltonian_step`] at `pt`.
pub fn forced_symplecticity_defect<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    pt: &PhasePoint<T>,
    k: usize,
    fd_step: T,
) -> Result<SymplecticityReport<T>> {
    report(|q| forced_hamiltonian_step(coeffs, obj, q, k), pt, fd_step, nonzero_a(coeffs, k)?)
}

/// The mixed second derivative `D₁₂L^k = −a_k I`; an error when it is singular.
pub fn mixed_hessian<T: Scalar>(coeffs: &DiscreteLagrangianCoefficients<T>, k: usize, dim: usize) -> Result<Matrix<T>> {
    let a = nonzero_a(coeffs, k)?;
    if !a.is_finite() {
        return Err(Error::domain(format!("a_{k} is not finite")));
    }
    Ok(Matrix::from_fn(dim, dim, |i, j| if i == j { -a } else { T::zero() }))
}

/// Largest scaled residual of the discrete Euler–Lagrange equations
///
/// ```text
/// D₁L^k(x_k, x_{k+1}) + D₂L^{k−1}(x_{k−1}, x_k) [+ (F^k)⁻ + (F^{k−1})⁺] = 0
/// ```
///
/// over the interior records of `traj`, each divided by
/// `max(1, |a_k|‖Δx_k‖, |a_{k−1}|‖Δx_{k−1}‖)`. Records must be consecutive steps.
pub fn del_residual<T: Scalar, O: Objective<T> + ?Sized>(
    traj: &Trajectory<T>,
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    forced: bool,
) -> Result<T> {
    let rec = &traj.records;
    if rec.len() < 3 {
        return Err(Error::domain(format!(
            "DEL residual needs at least 3 points, got {}",
            rec.len()
        )));
    }
    if rec.windows(2).any(|w| w[1].k != w[0].k + 1) {
        return Err(Error::domain("DEL residual needs consecutive steps (record stride 1)"));
    }
    let grads: Vec<Vec<T>> = rec
        .iter()
        .map(|r| checked_gradient(obj, &r.x, r.k))
        .collect::<Result<_>>()?;
    let mut worst = T::zero();
    for j in 1..rec.len() - 1 {
        let k = rec[j].k;
        let (a, a_prev) = (coeffs.a(k)?, coeffs.a(k - 1)?);
        let (bm, bp) = (coeffs.b_minus(k)?, coeffs.b_plus(k)?);
        let dx = sub(&rec[j + 1].x, &rec[j].x);
        let dx_prev = sub(&rec[j].x, &rec[j - 1].x);
        let (g, g_prev) = (&grads[j], &grads[j - 1]);
        let force = if forced {
            let b_prev = coeffs.b_total(k - 1)?;
            Some((a_prev / a * (bm + bp), b_prev))
        } else {
            None
        };
        let r: Vec<T> = (0..dx.len())
            .map(|i| {
                let mut v = -a * dx[i] - bm * g[i] + a_prev * dx_prev[i] - bp * g[i];
                if let Some((fm, fp)) = force {
                    v += -fm * g[i] + fp * g_prev[i];
                }
                v
            })
            .collect();
        let scale = T::one()
            .max(a.abs() * norm(&dx))
            .max(a_prev.abs() * norm(&dx_prev));
        worst = worst.max(norm(&r) / scale);
    }
    Ok(worst)
}
