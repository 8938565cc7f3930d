use super::{Minimum, MinimumKind, Objective};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `f(x, y) = sin(2x² - y² + 3) · cos(x + 1 - e^{2y})`.
///
/// A bounded, strongly non-convex test surface on which momentum methods
/// oscillate visibly before settling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Yatf;

pub fn make_yatf() -> Yatf {
    Yatf
}

struct Parts<T> {
    su: T,
    cu: T,
    sv: T,
    cv: T,
    du: [T; 2],
    dv: [T; 2],
    e2y: T,
}

fn parts<T: Scalar>(x: &[T]) -> Parts<T> {
    let (a, b) = (x[0], x[1]);
    let two = T::lit(2.0);
    let e2y = (two * b).exp();
    let u = two * a * a - b * b + T::lit(3.0);
    let v = a + T::one() - e2y;
    Parts {
        su: u.sin(),
        cu: u.cos(),
        sv: v.sin(),
        cv: v.cos(),
        du: [T::lit(4.0) * a, -two * b],
        dv: [T::one(), -two * e2y],
        e2y,
    }
}

impl<T: Scalar> Objective<T> for Yatf {
    fn name(&self) -> &str {
        "yatf"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[T]) -> T {
        let p = parts(x);
        p.su * p.cv
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let p = parts(x);
        (0..2)
            .map(|i| p.cu * p.du[i] * p.cv - p.su * p.sv * p.dv[i])
            .collect()
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let p = parts(x);
        let duu = [[T::lit(4.0), T::zero()], [T::zero(), T::lit(-2.0)]];
        let dvv = [[T::zero(), T::zero()], [T::zero(), T::lit(-4.0) * p.e2y]];
        Some(Matrix::from_fn(2, 2, |i, j| {
            p.cv * (-p.su * p.du[i] * p.du[j] + p.cu * duu[i][j])
                - p.sv * p.cu * (p.du[i] * p.dv[j] + p.du[j] * p.dv[i])
                - p.su * (p.cv * p.dv[i] * p.dv[j] + p.sv * dvv[i][j])
        }))
    }

    fn has_hessian(&self) -> bool {
        true
    }

    /// Both recorded locations are approximate and carry no value.
    fn minima(&self) -> Vec<Minimum<T>> {
        [(-0.12, 0.18), (0.32, 1.60)]
            .into_iter()
            .map(|(a, b)| Minimum {
                location: vec![T::lit(a), T::lit(b)],
                kind: MinimumKind::Local,
                value: None,
                exact: false,
            })
            .collect()
    }
}
