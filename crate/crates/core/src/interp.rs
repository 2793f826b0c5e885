//! One-dimensional polynomial interpolation in the monomial basis, plus
//! Neville extrapolation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// `n` nodes `radius * exp(i (phase + 2πk/n))`, scaled roots of unity.
pub fn circle_nodes<T: Real>(n: usize, radius: T, phase: T) -> Vec<Complex<T>> {
    let two_pi = T::PI() + T::PI();
    (0..n)
        .map(|k| {
            let theta = phase + two_pi * real::<T>(k as f64) / real(n as f64);
            Complex::from_polar(radius, theta)
        })
        .collect()
}

/// Evaluates `Σ c_k x^k` by Horner's rule.
pub fn poly_eval<T: Real>(coeffs: &[Complex<T>], x: Complex<T>) -> Complex<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * x + c)
}

fn check_distinct<T: Real>(nodes: &[Complex<T>]) -> Result<()> {
    for i in 0..nodes.len() {
        for j in 0..i {
            let sep = (nodes[i] - nodes[j]).norm();
            let scale = nodes[i].norm().max(nodes[j].norm()).max(T::one());
            if sep <= T::epsilon() * real(16.0) * scale {
                return Err(Error::Interpolation(format!("nodes {j} and {i} coincide")));
            }
        }
    }
    Ok(())
}

/// Linear map from samples at fixed nodes to monomial coefficients.
///
/// Row `k` holds the coefficients of `x^k` in each Lagrange basis
/// polynomial, so a fit is a single matrix-vector product. Reusing the map
/// along every axis of a tensor grid keeps multivariate fits cheap.
#[derive(Clone, Debug)]
pub struct LagrangeFit<T: Real> {
    nodes: Vec<Complex<T>>,
    // weights[k][j]: coefficient of x^k in the j-th basis polynomial.
    weights: Vec<Vec<Complex<T>>>,
}

impl<T: Real> LagrangeFit<T> {
    pub fn new(nodes: &[Complex<T>]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Interpolation("no nodes".into()));
        }
        check_distinct(nodes)?;
        let n = nodes.len();
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());

        // master(x) = Π (x - x_m), coefficients low to high.
        let mut master = vec![one];
        for &xm in nodes {
            let mut next = vec![zero; master.len() + 1];
            for (k, &c) in master.iter().enumerate() {
                next[k + 1] = next[k + 1] + c;
                next[k] = next[k] - c * xm;
            }
            master = next;
        }

        let mut weights = vec![vec![zero; n]; n];
        for (j, &xj) in nodes.iter().enumerate() {
            // master / (x - xj) by synthetic division from the top.
            let mut quotient = vec![zero; n];
            let mut carry = zero;
            for k in (0..n).rev() {
                carry = master[k + 1] + carry * xj;
                quotient[k] = carry;
            }
            let denom: Complex<T> = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &xm)| xj - xm)
                .fold(one, |acc, f| acc * f);
            for k in 0..n {
                weights[k][j] = quotient[k] / denom;
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            weights,
        })
    }

    pub fn nodes(&self) -> &[Complex<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Monomial coefficients of the interpolant through `values`.
    pub fn fit(&self, values: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if values.len() != self.nodes.len() {
            return Err(Error::Interpolation(format!(
                "{} values for {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        Ok(self
            .weights
            .iter()
            .map(|row| row.iter().zip(values).map(|(&w, &v)| w * v).sum())
            .collect())
    }

    /// Coefficient of `x^k` only.
    pub fn coefficient(&self, k: usize, values: &[Complex<T>]) -> Complex<T> {
        self.weights[k].iter().zip(values).map(|(&w, &v)| w * v).sum()
    }
}

/// Unique polynomial of degree `< nodes.len()` through the data, in
/// monomial coefficients (constant term first).
pub fn lagrange_fit<T: Real>(nodes: &[Complex<T>], values: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if nodes.len() != values.len() {
        return Err(Error::Interpolation(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    LagrangeFit::new(nodes)?.fit(values)
}

/// Result of extrapolating a sequence to `x = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Extrapolation<T: Real> {
    pub value: Complex<T>,
    /// Size of the last correction applied by the tableau.
    pub error: T,
    /// Corrections above roundoff failed to shrink monotonically. The first
    /// step compares raw samples, is not yet asymptotic and is ignored.
    pub diverged: bool,
    /// Number of samples the tableau used.
    pub samples: usize,
}

/// Neville's algorithm evaluated at `x = 0` for samples `(xs[k], ys[k])`.
pub fn neville_at_zero<T: Real>(xs: &[T], ys: &[Complex<T>]) -> Result<Extrapolation<T>> {
    let n = xs.len();
    if n == 0 || n != ys.len() {
        return Err(Error::Interpolation("neville needs matching nonempty samples".into()));
    }
    let mut p = ys.to_vec();
    let mut diagonal = vec![p[n - 1]];
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            if xi == xj {
                return Err(Error::Interpolation("repeated abscissa".into()));
            }
            // P_{i..i+m}(0) from the two overlapping lower-order estimates.
            p[i] = (p[i + 1] * Complex::from(xi) - p[i] * Complex::from(xj)) / Complex::from(xi - xj);
        }
        diagonal.push(p[0]);
    }
    let corrections: Vec<T> = diagonal.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let error = corrections.last().copied().unwrap_or_else(T::zero);
    // Corrections already at roundoff level carry no trend.
    let floor = T::epsilon() * real(1024.0) * p[0].norm();
    let diverged = corrections
        .iter()
        .skip(1)
        .collect::<Vec<_>>()
        .windows(2)
        .any(|w| *w[1] >= *w[0] && *w[1] > floor);
    Ok(Extrapolation {
        value: p[0],
        error,
        diverged,
        samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type C = Complex<f64>;

    fn c(re: f64) -> C {
        cx(re, 0.0)
    }

    #[test]
    fn fits_identity_and_square() {
        let coeffs = lagrange_fit(&[c(0.0), c(1.0)], &[c(0.0), c(1.0)]).unwrap();
        assert!((coeffs[0] - c(0.0)).norm() < 1e-15);
        assert!((coeffs[1] - c(1.0)).norm() < 1e-15);

        let nodes = [c(1.0), c(2.0), c(3.0)];
        let values: Vec<C> = nodes.iter().map(|x| x * x).collect();
        let coeffs = lagrange_fit(&nodes, &values).unwrap();
        for (got, want) in coeffs.iter().zip([0.0, 0.0, 1.0]) {
            assert!((got - c(want)).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_duplicate_nodes() {
        let err = lagrange_fit(&[c(1.0), c(2.0), c(1.0)], &[c(0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::Interpolation(_)));
    }

    #[test]
    fn roots_of_unity_round_trip() {
        let source = [cx(0.3, -1.2), cx(2.0, 0.5), cx(-0.7, 0.1), cx(0.0, 1.0), cx(1.5, -0.4)];
        let nodes = circle_nodes(5, 1.0, 0.0);
        let values: Vec<C> = nodes.iter().map(|&x| poly_eval(&source, x)).collect();
        let coeffs = lagrange_fit(&nodes, &values).unwrap();
        for (got, want) in coeffs.iter().zip(source) {
            assert!((got - want).norm() <= 1e-12 * want.norm());
        }
    }

    #[test]
    fn neville_extrapolates_polynomials_exactly() {
        let f = |x: f64| c(2.0 - 3.0 * x + 0.5 * x * x);
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<C> = xs.iter().map(|&x| f(x)).collect();
        let ex = neville_at_zero(&xs, &ys).unwrap();
        assert!((ex.value - c(2.0)).norm() < 1e-13);
        assert!(!ex.diverged);
    }

    #[test]
    fn neville_flags_growing_corrections() {
        let xs = [0.5, 0.4, 0.3, 0.2, 0.1];
        let ys: Vec<C> = xs.iter().map(|&x: &f64| c((1.0 / x).sin() * 1e3)).collect();
        assert!(neville_at_zero(&xs, &ys).unwrap().diverged);
    }
}
