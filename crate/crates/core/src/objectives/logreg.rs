use super::{Minimum, Objective};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Scalar inputs with labels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    inputs: Vec<T>,
    labels: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(inputs: Vec<T>, labels: Vec<T>) -> Result<Self> {
        check_dim(inputs.len(), labels.len())?;
        if inputs.is_empty() {
            return Err(Error::domain("dataset must contain at least one sample"));
        }
        if let Some(bad) = labels.iter().find(|&&y| !(y >= T::zero() && y <= T::one())) {
            return Err(Error::domain(format!("label {bad} outside [0, 1]")));
        }
        if inputs.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("non-finite input"));
        }
        Ok(Self { inputs, labels })
    }

    /// 21 evenly spaced inputs on `[-5, 5]` labelled by rounding `σ(x; 1, 0)`.
    pub fn synthetic_preset() -> Self {
        let inputs: Vec<T> = (0..21).map(|i| T::lit(-5.0 + 0.5 * i as f64)).collect();
        let labels = inputs
            .iter()
            .map(|&x| logistic(x, T::one(), T::zero()).round())
            .collect();
        Self { inputs, labels }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[T] {
        &self.inputs
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }
}

/// `σ(x; a, b) = 1 / (1 + e^{-(ax + b)})`
pub fn logistic<T: Scalar>(x: T, a: T, b: T) -> T {
    T::one() / (T::one() + (-(a * x + b)).exp())
}

/// Mean squared error of a logistic model over `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticMse<T> {
    data: Dataset<T>,
}

pub fn make_logreg<T: Scalar>(data: Dataset<T>) -> Result<LogisticMse<T>> {
    if data.is_empty() {
        return Err(Error::domain("dataset must contain at least one sample"));
    }
    Ok(LogisticMse { data })
}

impl<T: Scalar> LogisticMse<T> {
    pub fn dataset(&self) -> &Dataset<T> {
        &self.data
    }

    fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.data.inputs.iter().copied().zip(self.data.labels.iter().copied())
    }

    fn n(&self) -> T {
        T::from_usize_lossy(self.data.len())
    }
}

impl<T: Scalar> Objective<T> for LogisticMse<T> {
    fn name(&self) -> &str {
        "logreg"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, w: &[T]) -> T {
        self.samples()
            .map(|(x, y)| {
                let r = logistic(x, w[0], w[1]) - y;
                r * r
            })
            .sum::<T>()
            / self.n()
    }

    fn gradient(&self, w: &[T]) -> Vec<T> {
        let mut g = [T::zero(); 2];
        for (x, y) in self.samples() {
            let s = logistic(x, w[0], w[1]);
            let c = (s - y) * s * (T::one() - s);
            g[0] += c * x;
            g[1] += c;
        }
        let k = T::lit(2.0) / self.n();
        g.iter().map(|&v| k * v).collect()
    }

    fn hessian(&self, w: &[T]) -> Option<Matrix<T>> {
        let mut h = Matrix::zeros(2, 2);
        for (x, y) in self.samples() {
            let s = logistic(x, w[0], w[1]);
            let ds = s * (T::one() - s);
            let dds = ds * (T::one() - T::lit(2.0) * s);
            let c = ds * ds + (s - y) * dds;
            let feat = [x, T::one()];
            for i in 0..2 {
                for j in 0..2 {
                    h[(i, j)] += c * feat[i] * feat[j];
                }
            }
        }
        let k = T::lit(2.0) / self.n();
        Some(Matrix::from_fn(2, 2, |i, j| k * h[(i, j)]))
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn minima(&self) -> Vec<Minimum<T>> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{check_gradient, check_hessian};

    #[test]
    fn logistic_at_zero() {
        assert_eq!(logistic(0.0, 0.0, 0.0), 0.5);
    }

    #[test]
    fn exact_fit_has_zero_loss() {
        let f = make_logreg(Dataset::new(vec![0.0], vec![0.5]).unwrap()).unwrap();
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(f.gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn single_positive_sample() {
        let f = make_logreg(Dataset::new(vec![1.0], vec![1.0]).unwrap()).unwrap();
        assert_eq!(f.value(&[0.0, 0.0]), 0.25);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::<f64>::new(vec![], vec![]).is_err());
        assert!(Dataset::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(Dataset::new(vec![1.0], vec![1.5]).is_err());
        assert!(Dataset::new(vec![f64::NAN], vec![0.5]).is_err());
    }

    #[test]
    fn preset_dataset() {
        let d = Dataset::<f64>::synthetic_preset();
        assert_eq!(d.len(), 21);
        assert_eq!(d.inputs()[0], -5.0);
        assert_eq!(d.inputs()[20], 5.0);
        assert_eq!(d.labels()[0], 0.0);
        assert_eq!(d.labels()[20], 1.0);
        // σ(0) = 0.5 rounds half away from zero
        assert_eq!(d.labels()[10], 1.0);
    }

    #[test]
    fn derivatives_on_preset() {
        let f = make_logreg(Dataset::<f64>::synthetic_preset()).unwrap();
        for w in [[0.0, 0.0], [1.3, -0.4], [-2.0, 1.0]] {
            assert!(check_gradient(&f, &w, 1e-6).unwrap() <= 1e-6);
            let (rel, asym) = check_hessian(&f, &w, 1e-5).unwrap();
            assert!(rel <= 1e-4);
            assert!(asym <= 1e-15);
        }
    }
}
