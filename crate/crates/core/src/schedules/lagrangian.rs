use super::continuous::{lagrangian_from_continuous, ContinuousCoefficients};
use super::Schedule;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients of the discrete Lagrangian
///
/// ```text
/// L^k(z0, z1) = a_k ½‖z1 − z0‖² − b_k⁻ f(z0) − b_{k+1}⁺ f(z1)
/// ```
///
/// stored for `k = 0..=k_max`.
///
/// Index table relating these to the scheme coefficients (both directions
/// are implemented by [`scheme_from_lagrangian`] and [`lagrangian_from_scheme`]):
///
/// ```text
///   k   | a_k            | μ_k              | η_k
///   0   | 1              | unused (Δx₋₁=0)  | (b₀⁻+b₀⁺)/a₀
///   1   | a₀/μ₁          | a₀/a₁            | (b₁⁻+b₁⁺)/a₁
///   k   | a_{k−1}/μ_k    | a_{k−1}/a_k      | (b_k⁻+b_k⁺)/a_k
/// ```
///
/// The update producing `x_{k+1}` from `(x_{k−1}, x_k)` therefore uses
/// `μ_k = a_{k−1}/a_k` and `η_k`, which is the discrete Euler–Lagrange
/// equation at node `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLagrangianCoefficients<T> {
    a: Vec<T>,
    b_minus: Vec<T>,
    b_plus: Vec<T>,
}

impl<T: Scalar> DiscreteLagrangianCoefficients<T> {
    pub fn new(a: Vec<T>, b_minus: Vec<T>, b_plus: Vec<T>) -> Result<Self> {
        if a.is_empty() || a.len() != b_minus.len() || a.len() != b_plus.len() {
            return Err(Error::domain(format!(
                "coefficient sequences must be nonempty and of equal length (a: {}, b-: {}, b+: {})",
                a.len(),
                b_minus.len(),
                b_plus.len()
            )));
        }
        if let Some(k) = a.iter().position(|&v| v == T::zero() || !v.is_finite()) {
            return Err(Error::domain(format!("a_{k} must be nonzero and finite")));
        }
        Ok(Self { a, b_minus, b_plus })
    }

    /// Trapezoidal discretisation of continuous coefficients on `t_k = kh`.
    pub fn from_continuous(cc: &ContinuousCoefficients<T>, h: T, k_max: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(k_max + 1);
        let mut bm = Vec::with_capacity(k_max + 1);
        let mut bp = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let (ak, bmk, bpk) = lagrangian_from_continuous(cc, h, k)?;
            a.push(ak);
            bm.push(bmk);
            bp.push(bpk);
        }
        Self::new(a, bm, bp)
    }

    /// Largest index `k` with stored coefficients.
    pub fn k_max(&self) -> usize {
        self.a.len() - 1
    }

    fn get(&self, seq: &[T], k: usize, what: &str) -> Result<T> {
        seq.get(k)
            .copied()
            .ok_or_else(|| Error::domain(format!("{what}_{k} requested beyond k_max = {}", self.k_max())))
    }

    pub fn a(&self, k: usize) -> Result<T> {
        self.get(&self.a, k, "a")
    }

    pub fn b_minus(&self, k: usize) -> Result<T> {
        self.get(&self.b_minus, k, "b-")
    }

    pub fn b_plus(&self, k: usize) -> Result<T> {
        self.get(&self.b_plus, k, "b+")
    }

    /// `b_k⁻ + b_k⁺`
    pub fn b_total(&self, k: usize) -> Result<T> {
        Ok(self.b_minus(k)? + self.b_plus(k)?)
    }

    pub fn a_seq(&self) -> &[T] {
        &self.a
    }

    pub fn b_minus_seq(&self) -> &[T] {
        &self.b_minus
    }

    pub fn b_plus_seq(&self) -> &[T] {
        &self.b_plus
    }
}

/// `μ_{k+1} = a_k/a_{k+1}`, `η_k = (b_k⁻ + b_k⁺)/a_k`, tabulated up to `k_max`.
///
/// `μ_0` is not determined by the Lagrangian and is stored as zero.
pub fn scheme_from_lagrangian<T: Scalar>(c: &DiscreteLagrangianCoefficients<T>) -> Result<Schedule<T>> {
    let n = c.a.len();
    let mut mu = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for k in 0..n {
        let ak = c.a[k];
        if ak == T::zero() {
            return Err(Error::domain(format!("a_{k} is zero")));
        }
        mu.push(if k == 0 { T::zero() } else { c.a[k - 1] / ak });
        eta.push((c.b_minus[k] + c.b_plus[k]) / ak);
    }
    Ok(Schedule::Table { mu, eta })
}

/// `a_0 = 1`, `a_{k+1} = a_k/μ_{k+1}`, `b_k^± = ½ a_k η_k` for `k = 0..=k_max`.
pub fn lagrangian_from_scheme<T: Scalar>(s: &Schedule<T>, k_max: usize) -> Result<DiscreteLagrangianCoefficients<T>> {
    if let Some(hz) = s.horizon() {
        if k_max > hz {
            return Err(Error::domain(format!("k_max = {k_max} exceeds the table horizon {hz}")));
        }
    }
    let half = T::lit(0.5);
    let mut a = Vec::with_capacity(k_max + 1);
    let mut b = Vec::with_capacity(k_max + 1);
    let mut ak = T::one();
    for k in 0..=k_max {
        if k > 0 {
            let mu = s.mu(k);
            if mu == T::zero() || !mu.is_finite() {
                return Err(Error::domain(format!("mu_{k} = {mu} cannot be inverted")));
            }
            ak /= mu;
            if !ak.is_finite() || ak == T::zero() {
                return Err(Error::domain(format!("a_{k} left the representable range")));
            }
        }
        a.push(ak);
        b.push(half * ak * s.eta(k));
    }
    Ok(DiscreteLagrangianCoefficients {
        a,
        b_minus: b.clone(),
        b_plus: b,
    })
}
