//! The partition function evaluated directly from operator products, the
//! vacuum eigenvalue functions, and the closed-form leading asymptotic
//! coefficient.

use num_complex::Complex;
use rayon::prelude::*;

use crate::algebra::{b_operator, dual_vacuum, guard, vacuum, ModelParams};
use crate::error::{Error, Result};
use crate::interp::{circle_nodes, LagrangeFit};
use crate::linalg::Vector;
use crate::scalar::{real, Real};

/// Spectral parameters `λ_1..λ_L`, plus the extra `λ_0` used by the
/// functional equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint<T: Real> {
    pub lambdas: Vec<Complex<T>>,
    pub lambda0: Option<Complex<T>>,
}

impl<T: Real> SpectralPoint<T> {
    pub fn new(lambdas: Vec<Complex<T>>) -> Self {
        Self { lambdas, lambda0: None }
    }

    pub fn with_lambda0(mut self, lambda0: Complex<T>) -> Self {
        self.lambda0 = Some(lambda0);
        self
    }

    /// Errors when two parameters coincide to within the singularity guard.
    pub fn check_distinct(&self) -> Result<()> {
        for i in 0..self.lambdas.len() {
            for j in 0..i {
                if (self.lambdas[i] - self.lambdas[j]).sinh().norm() < real(crate::algebra::SINGULARITY_GUARD) {
                    return Err(Error::Coincident { i: j + 1, j: i + 1 });
                }
            }
        }
        Ok(())
    }
}

/// `<0̄| B(λ_1) ··· B(λ_L) |0>` by dense operator products.
pub fn partition_function<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<Complex<T>> {
    params.check_point(lambdas)?;
    let n = params.len();
    let mut v = vacuum::<T>(n);
    for &lam in lambdas.iter().rev() {
        v = b_operator(params, lam).matvec(&v)?;
    }
    Ok(v[(1 << n) - 1])
}

/// `Z̄ = Z · Π e^{2Lλ_i}`, the polynomial part in `x_i = e^{2λ_i}`.
pub fn zbar_value<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<Complex<T>> {
    let z = partition_function(params, lambdas)?;
    Ok(z * exponent_factor(params.len(), lambdas))
}

/// `Π_i e^{2Lλ_i}` evaluated as a single exponential.
pub(crate) fn exponent_factor<T: Real>(len: usize, lambdas: &[Complex<T>]) -> Complex<T> {
    let s: Complex<T> = lambdas.iter().copied().sum();
    (s * real::<T>(2.0 * len as f64)).exp()
}

/// Spectral parameter `λ = ½ log x` on the principal branch.
pub fn lambda_of_x<T: Real>(x: Complex<T>) -> Complex<T> {
    x.ln() * real::<T>(0.5)
}

/// `Z̄` on the tensor grid `nodes^L`, row-major with variable 1 slowest.
///
/// The `B` operators are built once per node; the grid is swept by
/// extending partial products `B(λ_{k_j}) ··· B(λ_{k_L}) |0>` one variable
/// at a time.
pub fn zbar_grid<T: Real>(params: &ModelParams<T>, nodes: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = params.len();
    let lams: Vec<Complex<T>> = nodes.iter().map(|&x| lambda_of_x(x)).collect();
    let ops: Vec<_> = lams.par_iter().map(|&l| b_operator(params, l)).collect();
    let scale: Vec<Complex<T>> = lams.iter().map(|&l| (l * real::<T>(2.0 * n as f64)).exp()).collect();
    let bra = dual_vacuum::<T>(n);
    let rows: Vec<Vector<T>> = ops.iter().map(|op| op.vecmat(&bra)).collect::<Result<_>>()?;

    let mut level: Vec<(Vector<T>, Complex<T>)> = vec![(vacuum::<T>(n), Complex::new(T::one(), T::zero()))];
    for _ in 1..n {
        let len = level.len();
        level = (0..nodes.len() * len)
            .into_par_iter()
            .map(|idx| {
                let (k, r) = (idx / len, idx % len);
                let (v, s) = &level[r];
                Ok((ops[k].matvec(v)?, *s * scale[k]))
            })
            .collect::<Result<_>>()?;
    }
    let len = level.len();
    Ok((0..nodes.len() * len)
        .into_par_iter()
        .map(|idx| {
            let (k, r) = (idx / len, idx % len);
            let (v, s) = &level[r];
            let dot: Complex<T> = rows[k].entries().iter().zip(v.entries()).map(|(&a, &b)| a * b).sum();
            dot * *s * scale[k]
        })
        .collect())
}

/// Fits `Z̄` as a polynomial in one variable `x_var`, the others fixed at
/// `e^{2λ_j}`, using `n_nodes` points on a circle of radius `radius`.
pub fn zbar_fit_in_variable<T: Real>(
    params: &ModelParams<T>,
    lambdas: &[Complex<T>],
    var: usize,
    n_nodes: usize,
    radius: T,
) -> Result<Vec<Complex<T>>> {
    params.check_point(lambdas)?;
    let nodes = circle_nodes(n_nodes, radius, real(0.1));
    let values: Vec<Complex<T>> = nodes
        .par_iter()
        .map(|&x| {
            let mut point = lambdas.to_vec();
            point[var] = lambda_of_x(x);
            zbar_value(params, &point)
        })
        .collect::<Result<_>>()?;
    LagrangeFit::new(&nodes)?.fit(&values)
}

/// Node radius used by [`zbar_leading_coefficient`].
pub const LEADING_RADIUS: f64 = 5.0;

/// Coefficient of `Π x_i^{2L}` in `Z̄`, extracted by interpolation.
///
/// The top coefficient can sit eleven orders below the largest one, so on
/// the unit circle it drowns in roundoff. Nodes of radius [`LEADING_RADIUS`]
/// weight it by `r^{2L}` per variable instead.
pub fn zbar_leading_coefficient<T: Real>(params: &ModelParams<T>) -> Result<Complex<T>> {
    let opts = crate::poly::InterpolationOptions { radius: LEADING_RADIUS, ..Default::default() };
    let poly = crate::poly::interpolate_zbar(params, &opts)?;
    Ok(poly.top_coefficient())
}

/// Vacuum eigenvalues `(Λ_A, Λ_D̃, Λ̄_A)` at `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueFunctions<T: Real> {
    pub lambda_a: Complex<T>,
    pub lambda_dtilde: Complex<T>,
    pub lambda_bar_a: Complex<T>,
}

pub(crate) fn prod_over_sites<T: Real>(
    params: &ModelParams<T>,
    f: impl Fn(Complex<T>) -> Complex<T>,
) -> Complex<T> {
    params
        .mu
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, &m| acc * f(m))
}

/// `Λ_A(λ) = sinh(h+λ) Π a(λ-μ_j) a(λ+μ_j)`; needs no guard.
pub fn lambda_a<T: Real>(p: &ModelParams<T>, lam: Complex<T>) -> Complex<T> {
    (p.h + lam).sinh() * prod_over_sites(p, |m| p.a(lam - m) * p.a(lam + m))
}

pub fn eigenvalue_functions<T: Real>(params: &ModelParams<T>, lam: Complex<T>) -> Result<EigenvalueFunctions<T>> {
    let p = params;
    let two = real::<T>(2.0);
    let a2 = guard("eigenvalue_functions", "a(2λ) = 0", p.a(lam * two))?;
    let aa = prod_over_sites(p, |m| p.a(lam - m) * p.a(lam + m));
    let bb = prod_over_sites(p, |m| p.b(lam - m) * p.b(lam + m));
    let b2 = p.b(lam * two);
    Ok(EigenvalueFunctions {
        lambda_a: (p.h + lam).sinh() * aa,
        lambda_dtilde: -(b2 / a2) * p.a(lam - p.h) * bb,
        lambda_bar_a: p.c() / a2 * (p.h - lam).sinh() * aa + b2 / a2 * p.a(lam + p.h) * bb,
    })
}

/// `[n!]_{q²} = Π_{k=1}^{n} (1 + q² + ... + q^{2(k-1)})`.
pub fn q_factorial<T: Real>(n: usize, q: Complex<T>) -> Complex<T> {
    let q2 = q * q;
    let one = Complex::new(T::one(), T::zero());
    let mut acc = one;
    let mut partial = Complex::new(T::zero(), T::zero());
    let mut power = one;
    for _ in 0..n {
        partial = partial + power;
        acc = acc * partial;
        power = power * q2;
    }
    acc
}

/// Closed-form coefficient of `Π x_i^{2L}` in `Z̄`:
/// `q^{L(L-1)/2} 2^{-L(2L+1)} (q - q⁻¹)^L [L!]_{q²} Π (t y_i^{-1/2} - t⁻¹ y_i^{1/2})`.
pub fn asymptotic_coefficient<T: Real>(params: &ModelParams<T>) -> Complex<T> {
    let l = params.len();
    let lf = real::<T>(l as f64);
    let q = params.gamma.exp();
    let q_pow = (params.gamma * (lf * (lf - T::one()) / real(2.0))).exp();
    let two_pow = real::<T>(2.0).powi(-((l * (2 * l + 1)) as i32));
    let q_diff = (q - q.inv()).powu(l as u32);
    let boundary = prod_over_sites(params, |m| (params.h - m).exp() - (m - params.h).exp());
    q_pow * q_diff * q_factorial(l, q) * boundary * two_pow
}
