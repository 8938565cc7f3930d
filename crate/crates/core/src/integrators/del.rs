use super::checked_gradient;
use crate::error::{check_dim, Error, Result};
use crate::linalg::all_finite;
use crate::objectives::Objective;
use crate::scalar::Scalar;
use crate::schedules::{DiscreteLagrangianCoefficients, Schedule};

/// Solves the discrete Euler–Lagrange equation at node `k+1` for `z_{k+2}`,
/// given `z0 = z_k` and `z1 = z_{k+1}`.
///
/// Written with `μ_{k+1} = a_k/a_{k+1}` and `η_j = (b_j⁻ + b_j⁺)/a_j`:
///
/// ```text
/// Δz₁ − μ_{k+1} Δz₀ + η_{k+1} ∇f(z₁) = 0                                  (unforced)
/// Δz₁ − μ_{k+1} Δz₀ + η_{k+1} ∇f(z₁) = −μ_{k+1}(η_{k+1}∇f(z₁) − η_k∇f(z₀))  (forced)
/// ```
///
/// The unforced form is classical momentum, the forced one Nesterov's x̄-sequence.
pub fn forced_del_step<T: Scalar, O: Objective<T> + ?Sized>(
    coeffs: &DiscreteLagrangianCoefficients<T>,
    obj: &O,
    z0: &[T],
    z1: &[T],
    k: usize,
    forced: bool,
) -> Result<Vec<T>> {
    check_dim(z0.len(), z1.len())?;
    let a0 = coeffs.a(k)?;
    let a1 = coeffs.a(k + 1)?;
    if a1 == T::zero() {
        return Err(Error::domain(format!("a_{} is zero", k + 1)));
    }
    let mu = a0 / a1;
    let eta1 = coeffs.b_total(k + 1)? / a1;
    let g1 = checked_gradient(obj, z1, k + 1)?;
    let force = if forced {
        let eta0 = coeffs.b_total(k)? / a0;
        let g0 = checked_gradient(obj, z0, k)?;
        Some((eta0, g0))
    } else {
        None
    };
    let z2: Vec<T> = (0..z1.len())
        .map(|i| {
            let mut dz = mu * (z1[i] - z0[i]) - eta1 * g1[i];
            if let Some((eta0, g0)) = &force {
                dz -= mu * (eta1 * g1[i] - *eta0 * g0[i]);
            }
            z1[i] + dz
        })
        .collect();
    if all_finite(&z2) {
        Ok(z2)
    } else {
        Err(Error::Numerical {
            step: k + 1,
            what: "non-finite iterate".into(),
        })
    }
}

/// The right-hand side `−μ_{k+1}(η_{k+1}∇f(z₁) − η_k∇f(z₀))` of the forced
/// equation: a force that vanishes as the iterates settle on a critical point.
pub fn fictitious_force<T: Scalar, O: Objective<T> + ?Sized>(
    schedule: &Schedule<T>,
    obj: &O,
    z0: &[T],
    z1: &[T],
    k: usize,
) -> Result<Vec<T>> {
    let g0 = checked_gradient(obj, z0, k)?;
    let g1 = checked_gradient(obj, z1, k + 1)?;
    let (mu, e0, e1) = (schedule.mu(k + 1), schedule.eta(k), schedule.eta(k + 1));
    Ok(g0.iter().zip(&g1).map(|(&a, &b)| -mu * (e1 * b - e0 * a)).collect())
}

/// Nesterov's method in terms of x̄ alone:
/// `Δx̄_k = μ_k Δx̄_{k−1} − η_k g_k − μ_k(η_k g_k − η_{k−1} g_{k−1})`
/// with `Δx̄_{−1} = 0` and no `η_{−1}` term. Returns `x̄_0, …, x̄_steps`.
pub fn nag_x_recursion<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    schedule: &Schedule<T>,
    x0: &[T],
    steps: usize,
) -> Result<Vec<Vec<T>>> {
    let n = x0.len();
    let mut out = vec![x0.to_vec()];
    let mut dx_prev = vec![T::zero(); n];
    let mut scaled_prev = vec![T::zero(); n];
    for k in 0..steps {
        let x = out.last().unwrap();
        let g = checked_gradient(obj, x, k)?;
        let (mu, eta) = (schedule.mu(k), schedule.eta(k));
        let scaled: Vec<T> = g.iter().map(|&gi| eta * gi).collect();
        let dx: Vec<T> = (0..n)
            .map(|i| mu * dx_prev[i] - scaled[i] - mu * (scaled[i] - scaled_prev[i]))
            .collect();
        let next: Vec<T> = x.iter().zip(&dx).map(|(&a, &b)| a + b).collect();
        out.push(next);
        dx_prev = dx;
        scaled_prev = scaled;
    }
    Ok(out)
}

/// Nesterov's method in terms of ȳ alone:
/// `Δȳ_k = μ_{k−1} Δȳ_{k−1} − η_k ∇f(ȳ_k + μ_{k−1} Δȳ_{k−1})` with `Δȳ_{−1} = 0`.
/// Returns `ȳ_0, …, ȳ_steps`.
pub fn nag_y_recursion<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    schedule: &Schedule<T>,
    y0: &[T],
    steps: usize,
) -> Result<Vec<Vec<T>>> {
    let n = y0.len();
    let mut out = vec![y0.to_vec()];
    let mut dy_prev = vec![T::zero(); n];
    for k in 0..steps {
        let y = out.last().unwrap();
        let mu_prev = if k == 0 { T::zero() } else { schedule.mu(k - 1) };
        let look: Vec<T> = (0..n).map(|i| y[i] + mu_prev * dy_prev[i]).collect();
        let g = checked_gradient(obj, &look, k)?;
        let eta = schedule.eta(k);
        let dy: Vec<T> = (0..n).map(|i| mu_prev * dy_prev[i] - eta * g[i]).collect();
        out.push(y.iter().zip(&dy).map(|(&a, &b)| a + b).collect());
        dy_prev = dy;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{cm_step, nag_step, Method, OptimizerState};
    use crate::objectives::{make_quadratic, QuadraticForm};
    use crate::schedules::{classical_schedule, constant_schedule, lagrangian_from_scheme};

    fn cm_sequence(obj: &impl Objective<f64>, s: &Schedule<f64>, x0: &[f64], steps: usize) -> Vec<Vec<f64>> {
        let mut st = OptimizerState::new(Method::Cm, x0.to_vec());
        let mut out = vec![x0.to_vec()];
        for k in 0..steps {
            let (x, y) = cm_step(obj, &st, s.mu(k), s.eta(k)).unwrap();
            st.advance(x.clone(), y);
            out.push(x);
        }
        out
    }

    fn nag_sequences(obj: &impl Objective<f64>, s: &Schedule<f64>, x0: &[f64], steps: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut st = OptimizerState::new(Method::Nag, x0.to_vec());
        let (mut xs, mut ys) = (vec![x0.to_vec()], vec![x0.to_vec()]);
        for k in 0..steps {
            let (x, y) = nag_step(obj, &st, s.mu(k), s.eta(k)).unwrap();
            st.advance(x.clone(), y.clone());
            xs.push(x);
            ys.push(y);
        }
        (xs, ys)
    }

    fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter()
            .zip(b)
            .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn del_matches_schemes() {
        let f = make_quadratic(0.5, 4).unwrap();
        let x0 = [1.0, -0.5, 0.3, 2.0];
        let s = classical_schedule(3, 0.3).unwrap();
        let c = lagrangian_from_scheme(&s, 60).unwrap();

        let cm = cm_sequence(&f, &s, &x0, 50);
        let (nag, _) = nag_sequences(&f, &s, &x0, 50);
        for (seq, forced) in [(&cm, false), (&nag, true)] {
            let mut del = vec![seq[0].clone(), seq[1].clone()];
            for k in 0..49 {
                let z2 = forced_del_step(&c, &f, &del[k], &del[k + 1], k, forced).unwrap();
                del.push(z2);
            }
            assert!(max_diff(seq, &del) <= 1e-12, "forced={forced}");
        }
    }

    #[test]
    fn pure_momentum_without_gradient() {
        let f = crate::objectives::FnObjective::new("flat", 2, |_: &[f64]| 0.0, |_: &[f64]| vec![0.0; 2]);
        let s = classical_schedule(3, 0.1).unwrap();
        let c = lagrangian_from_scheme(&s, 10).unwrap();
        let (z0, z1) = ([0.0, 1.0], [0.5, 1.5]);
        let mu = s.mu(4);
        for forced in [false, true] {
            let z2 = forced_del_step(&c, &f, &z0, &z1, 3, forced).unwrap();
            for i in 0..2 {
                assert!((z2[i] - z1[i] - mu * (z1[i] - z0[i])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn beyond_coefficient_range() {
        let f = QuadraticForm::<f64>::identity(1);
        let c = lagrangian_from_scheme(&classical_schedule(3, 0.1).unwrap(), 3).unwrap();
        assert!(forced_del_step(&c, &f, &[1.0], &[1.0], 3, false).is_err());
    }

    #[test]
    fn rewritten_nag_forms() {
        let f = make_quadratic(0.9, 6).unwrap();
        let x0 = vec![1.0; 6];
        for s in [classical_schedule(3, 0.2).unwrap(), constant_schedule(1.0, 0.1024).unwrap()] {
            let (xs, ys) = nag_sequences(&f, &s, &x0, 50);
            assert!(max_diff(&xs, &nag_x_recursion(&f, &s, &x0, 50).unwrap()) <= 1e-12);
            assert!(max_diff(&ys, &nag_y_recursion(&f, &s, &x0, 50).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn fictitious_force_vanishes_at_rest() {
        let f = QuadraticForm::<f64>::identity(2);
        let s = classical_schedule(3, 0.1).unwrap();
        let r = fictitious_force(&s, &f, &[0.0, 0.0], &[0.0, 0.0], 5).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
    }
}
