//! Differential layer built on the polynomial form of `Z̄`: the
//! substitution operator `D_i^0`, the rescaled functional operator `L̄(x_0)`,
//! the operators `Ω_k` read off from its pole-cleared expansion in `x_0`,
//! the closed form of `Ω_{2L}` and its first-order reduction.

use num_complex::Complex;

use crate::algebra::{guard, ModelParams};
use crate::error::{Error, Result};
use crate::functional::coefficients;
use crate::interp::{circle_nodes, LagrangeFit};
use crate::oracle::{exponent_factor, lambda_of_x};
use crate::poly::PolyRep;
use crate::report::VerificationReport;
use crate::scalar::{cancellation_residual, normalize, real, Real};

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn xs_of<T: Real>(lambdas: &[Complex<T>]) -> Vec<Complex<T>> {
    lambdas.iter().map(|&l| (l * real::<T>(2.0)).exp()).collect()
}

/// Both realizations of `D_i^0` applied to a polynomial at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DRealizations<T: Real> {
    /// `P` with `x_i` replaced by `x_0`.
    pub substitution: Complex<T>,
    /// `Σ_{k=0}^{m} (x_0 - x_i)^k / k! ∂^k_{x_i} P`, `m` the degree of `P`.
    pub differential: Complex<T>,
}

pub fn apply_d<T: Real>(poly: &PolyRep<T>, var: usize, x0: Complex<T>, xs: &[Complex<T>]) -> Result<DRealizations<T>> {
    let mut moved = xs.to_vec();
    moved[var] = x0;
    let substitution = poly.eval(&moved)?;
    let shift = x0 - xs[var];
    let mut differential = zero();
    let mut derivative = poly.clone();
    let mut weight = Complex::new(T::one(), T::zero());
    for k in 0..=poly.degree() {
        if k > 0 {
            derivative = derivative.derivative(var, 1);
            weight = weight * shift / real::<T>(k as f64);
        }
        differential = differential + weight * derivative.eval(xs)?;
    }
    Ok(DRealizations {
        substitution,
        differential,
    })
}

/// Terms `M̄_0 P(X)` and `M̄_i (D_i^0 P)(X)` of `L̄(x_0) P` at `λ_1..λ_L`.
///
/// `M̄_0 = M_0 e^{-2LΣλ_j}` and `M̄_i = M_i e^{-2L(Σ_{j≠i}λ_j + λ_0)}`, so
/// for `P = Z̄` the terms coincide with those of the functional equation.
pub fn lbar_terms<T: Real>(
    params: &ModelParams<T>,
    x0: Complex<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let lambda0 = lambda_of_x(x0);
    lambdas_terms(params, lambda0, poly, lambdas)
}

fn lambdas_terms<T: Real>(
    params: &ModelParams<T>,
    lambda0: Complex<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let n = params.len();
    if poly.len() != n {
        return Err(Error::Dimension {
            op: "lbar_terms",
            detail: format!("polynomial in {} variables for L = {n}", poly.len()),
        });
    }
    let m = coefficients(params, lambda0, lambdas)?;
    let xs = xs_of(lambdas);
    let x0 = (lambda0 * real::<T>(2.0)).exp();
    let mut out = vec![m.m0 / exponent_factor(n, lambdas) * poly.eval(&xs)?];
    for (i, &mi) in m.mi.iter().enumerate() {
        let mut shifted = lambdas.to_vec();
        shifted[i] = lambda0;
        let mut moved = xs.clone();
        moved[i] = x0;
        out.push(mi / exponent_factor(n, &shifted) * poly.eval(&moved)?);
    }
    Ok(out)
}

/// Normalized `|L̄(x_0) P|` at the probe point `λ_1..λ_L`.
pub fn lbar_residual<T: Real>(
    params: &ModelParams<T>,
    x0: Complex<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<T> {
    Ok(cancellation_residual(&lbar_terms(params, x0, poly, lambdas)?))
}

/// `L̄_R(x_0) P = x_0^{(L+1)/2} Π_j a(λ_0 + λ_j) · L̄(x_0) P`, with the
/// half power taken as `e^{(L+1)λ_0}`, `λ_0 = ½ log x_0` (principal branch).
/// Returns the value and the magnitude scale of its terms.
pub fn lbar_r<T: Real>(
    params: &ModelParams<T>,
    x0: Complex<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<(Complex<T>, T)> {
    let lambda0 = lambda_of_x(x0);
    let terms = lambdas_terms(params, lambda0, poly, lambdas)?;
    let clear = lambdas
        .iter()
        .fold((lambda0 * real::<T>((params.len() + 1) as f64)).exp(), |acc, &l| acc * params.a(lambda0 + l));
    let sum: Complex<T> = terms.iter().copied().sum();
    let scale: T = terms.iter().map(|t| t.norm()).sum();
    Ok((sum * clear, scale * clear.norm()))
}

/// Expansion of `L̄_R(x_0) P` in powers of `x_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion<T: Real> {
    /// Lowest power represented (`-(L-1)`).
    pub min_power: i32,
    pub coeffs: Vec<Complex<T>>,
    /// Largest `|L̄_R P| ` term scale over the sampling circle.
    pub scale: T,
}

impl<T: Real> LaurentExpansion<T> {
    pub fn coefficient(&self, power: i32) -> Complex<T> {
        usize::try_from(power - self.min_power)
            .ok()
            .and_then(|k| self.coeffs.get(k).copied())
            .unwrap_or_else(zero)
    }

    pub fn max_power(&self) -> i32 {
        self.min_power + self.coeffs.len() as i32 - 1
    }
}

/// Fits `L̄_R(x_0) P` on a circle in `x_0` as a Laurent polynomial with
/// powers `-(L-1) .. 2L + 2`. For generic `P` the pole-clearing leaves
/// negative powers; those and the powers above `2L` are kept so the fit
/// does not alias them onto `0..2L`.
pub fn lbar_r_expansion<T: Real>(
    params: &ModelParams<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
    radius: f64,
) -> Result<LaurentExpansion<T>> {
    let n = params.len();
    let min_power = -(n as i32 - 1);
    let count = (2 * n + 2) + (n - 1) + 1;
    let nodes = circle_nodes(count, real::<T>(radius), real(0.37));
    let mut values = Vec::with_capacity(count);
    let mut scale = T::zero();
    for &x in &nodes {
        let (v, s) = lbar_r(params, x, poly, lambdas)?;
        scale = scale.max(s);
        values.push(v * x.powi(-min_power));
    }
    let coeffs = LagrangeFit::new(&nodes)?.fit(&values)?;
    Ok(LaurentExpansion {
        min_power,
        coeffs,
        scale,
    })
}

/// Normalized residuals of `Ω_k P` for `k = 0..2L`, plus the largest
/// normalized coefficient outside that range.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaResiduals<T: Real> {
    pub omegas: Vec<T>,
    pub over_degree: T,
    pub negative_powers: T,
}

pub fn extract_omegas<T: Real>(
    params: &ModelParams<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<OmegaResiduals<T>> {
    let exp = lbar_r_expansion(params, poly, lambdas, 1.3)?;
    let n = params.len() as i32;
    let norm = |p: i32| normalize(exp.coefficient(p).norm(), exp.scale);
    Ok(OmegaResiduals {
        omegas: (0..=2 * n).map(norm).collect(),
        over_degree: (2 * n + 1..=exp.max_power()).map(norm).fold(T::zero(), T::max),
        negative_powers: (exp.min_power..0).map(norm).fold(T::zero(), T::max),
    })
}

/// `ā_ω(x, y) = xω - 1/(yω)`.
fn abar<T: Real>(w: Complex<T>, x: Complex<T>, y: Complex<T>) -> Complex<T> {
    x * w - (y * w).inv()
}

/// Coefficients `𝒰` and `𝒴_1..𝒴_L` of the closed-form `Ω_{2L}` at `xs`.
pub fn omega_2l_terms<T: Real>(params: &ModelParams<T>, xs: &[Complex<T>]) -> Result<(Complex<T>, Vec<Complex<T>>)> {
    const CTX: &str = "omega_2l";
    let n = params.len();
    let one = Complex::new(T::one(), T::zero());
    let q = params.gamma.exp();
    let t = params.h.exp();
    let ys: Vec<Complex<T>> = params.mu.iter().map(|&m| (m * real::<T>(2.0)).exp()).collect();
    let u = (one - q.powu(2 * n as u32)) / t
        + xs.iter()
            .zip(&ys)
            .fold(zero::<T>(), |acc, (&x, &y)| acc + x * q * q + x.inv() - (y + y.inv()))
            * t;
    let factorial = (1..=2 * n).fold(T::one(), |acc, k| acc * real(k as f64));
    let mut y_coeffs = Vec::with_capacity(n);
    for (i, &xi) in xs.iter().enumerate() {
        let lead = abar(one, xi, xi) / guard(CTX, format!("ā_q(x_{0}, x_{0}) = 0", i + 1), abar(q, xi, xi))?;
        let mut forward = q * abar(t, xi, one) * ys.iter().fold(one, |acc, &y| acc * abar(q, xi, y.inv()) * abar(q, xi, y));
        let mut backward = abar(q / t, one, xi) * ys.iter().fold(one, |acc, &y| acc * abar(one, xi, y.inv()) * abar(one, xi, y));
        for (j, &xj) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            let (a, b) = (i + 1, j + 1);
            let d1 = guard(CTX, format!("ā_1(x_{b}, 1/x_{a}) = 0"), abar(one, xj, xi.inv()))?;
            let d2 = guard(CTX, format!("ā_q(x_{b}, x_{a}) = 0"), abar(q, xj, xi))?;
            let d3 = guard(CTX, format!("ā_1(x_{a}, 1/x_{b}) = 0"), abar(one, xi, xj.inv()))?;
            let d4 = guard(CTX, format!("ā_q(x_{a}, x_{b}) = 0"), abar(q, xi, xj))?;
            forward = forward * abar(q, xj, xi.inv()) / d1 * abar(one, xj, xi) / d2;
            backward = backward * abar(q, xi, xj.inv()) / d3 * abar(q * q, xi, xj) / d4;
        }
        y_coeffs.push(-lead * (forward + backward) / factorial);
    }
    Ok((u, y_coeffs))
}

/// Normalized `|𝒰 P + Σ_i 𝒴_i ∂^{2L}_{x_i} P|` at the probe point.
pub fn omega_2l_apply<T: Real>(params: &ModelParams<T>, poly: &PolyRep<T>, lambdas: &[Complex<T>]) -> Result<T> {
    let xs = xs_of(lambdas);
    let (u, ys) = omega_2l_terms(params, &xs)?;
    let order = 2 * params.len();
    let mut terms = vec![u * poly.eval(&xs)?];
    for (i, &y) in ys.iter().enumerate() {
        terms.push(y * poly.derivative(i, order).eval(&xs)?);
    }
    Ok(cancellation_residual(&terms))
}

/// One entry of the block operator `𝓗`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HEntry<T: Real> {
    /// Multiplication by a scalar.
    Scale(Complex<T>),
    /// `weight · ∂_{x_var}`.
    Derivative { var: usize, weight: Complex<T> },
}

/// First-order system `𝓗ψ = 0` equivalent to `Ω_{2L} Z̄ = 0`, with
/// `ψ = (ψ^(0); ψ_i^(k))`, `1 ≤ i ≤ L`, `1 ≤ k ≤ 2L-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionSystem<T: Real> {
    len: usize,
    rows: Vec<Vec<(usize, HEntry<T>)>>,
}

impl<T: Real> ReductionSystem<T> {
    /// Position of `ψ_i^(k)` in `ψ` (0-based `i`, `1 ≤ k ≤ 2L-1`).
    pub fn slot(&self, i: usize, k: usize) -> usize {
        1 + i * (2 * self.len - 1) + (k - 1)
    }

    pub fn dim(&self) -> usize {
        (2 * self.len - 1) * self.len + 1
    }

    pub fn rows(&self) -> &[Vec<(usize, HEntry<T>)>] {
        &self.rows
    }

    pub fn assemble(params: &ModelParams<T>, xs: &[Complex<T>]) -> Result<Self> {
        let len = params.len();
        let (u, ys) = omega_2l_terms(params, xs)?;
        let one = Complex::new(T::one(), T::zero());
        let mut sys = Self { len, rows: Vec::new() };
        let mut first = vec![(0, HEntry::Scale(u))];
        for (i, &y) in ys.iter().enumerate() {
            first.push((sys.slot(i, 2 * len - 1), HEntry::Derivative { var: i, weight: y }));
        }
        sys.rows.push(first);
        for i in 0..len {
            for k in 1..2 * len {
                let prev = if k == 1 { 0 } else { sys.slot(i, k - 1) };
                let row = vec![(sys.slot(i, k), HEntry::Scale(one)), (prev, HEntry::Derivative { var: i, weight: -one })];
                sys.rows.push(row);
            }
        }
        Ok(sys)
    }

    /// `ψ^(0) = P`, `ψ_i^(k) = ∂_i ψ_i^(k-1)`.
    pub fn state(&self, poly: &PolyRep<T>) -> Vec<PolyRep<T>> {
        let mut psi = vec![poly.clone(); self.dim()];
        for i in 0..self.len {
            for k in 1..2 * self.len {
                let prev = if k == 1 { 0 } else { self.slot(i, k - 1) };
                psi[self.slot(i, k)] = psi[prev].derivative(i, 1);
            }
        }
        psi
    }

    /// Normalized residual of every row of `𝓗ψ` at `xs`.
    pub fn apply(&self, psi: &[PolyRep<T>], xs: &[Complex<T>]) -> Result<Vec<T>> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension {
                op: "ReductionSystem::apply",
                detail: format!("state of length {} for dimension {}", psi.len(), self.dim()),
            });
        }
        self.rows
            .iter()
            .map(|row| {
                let terms: Vec<Complex<T>> = row
                    .iter()
                    .map(|&(col, entry)| match entry {
                        HEntry::Scale(s) => Ok(s * psi[col].eval(xs)?),
                        HEntry::Derivative { var, weight } => Ok(weight * psi[col].derivative(var, 1).eval(xs)?),
                    })
                    .collect::<Result<_>>()?;
                Ok(cancellation_residual(&terms))
            })
            .collect()
    }
}

/// Residuals of `𝓗ψ` at a probe point: the first row and the worst chain row.
pub fn reduction_system_check<T: Real>(
    params: &ModelParams<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
) -> Result<VerificationReport> {
    let xs = xs_of(lambdas);
    let sys = ReductionSystem::assemble(params, &xs)?;
    let res = sys.apply(&sys.state(poly), &xs)?;
    let chain = res[1..].iter().copied().fold(T::zero(), T::max);
    let mut report = VerificationReport::new();
    report.push("reduction_first_row", "first-order system, leading row", res[0], 1e-9);
    report.push("reduction_chain_rows", "first-order system, derivative chain", chain, 1e-15);
    Ok(report)
}

/// Location of a candidate pole of `L̄(x_0)` in the `λ_0` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleSite {
    /// `a(2λ_0) = 0` at `λ_0 = -γ/2`.
    TwoLambda,
    /// `b(λ_0 - λ_i) = 0` at `λ_0 = λ_i` (0-based).
    Lambda(usize),
    /// `a(λ_0 + λ_i) = 0` at `λ_0 = -γ - λ_i` (0-based).
    Reflected(usize),
}

impl PoleSite {
    pub fn center<T: Real>(self, params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Complex<T> {
        match self {
            PoleSite::TwoLambda => -params.gamma * real::<T>(0.5),
            PoleSite::Lambda(i) => lambdas[i],
            PoleSite::Reflected(i) => -params.gamma - lambdas[i],
        }
    }
}

/// Residue of `L̄ P` in `λ_0` at `site`, by the trapezoid rule on a circle
/// of radius `radius`, divided by `radius · max|L̄ P|` on that circle.
pub fn loop_residue<T: Real>(
    params: &ModelParams<T>,
    poly: &PolyRep<T>,
    lambdas: &[Complex<T>],
    site: PoleSite,
    radius: f64,
) -> Result<T> {
    const NODES: usize = 32;
    let center = site.center(params, lambdas);
    let r = real::<T>(radius);
    let mut acc = zero::<T>();
    let mut peak = T::zero();
    for dir in circle_nodes(NODES, T::one(), real(0.1)) {
        let terms = lambdas_terms(params, center + dir * r, poly, lambdas)?;
        let value: Complex<T> = terms.iter().copied().sum();
        peak = peak.max(value.norm());
        acc = acc + value * dir * r;
    }
    let residue = acc / real::<T>(NODES as f64);
    Ok(normalize(residue.norm(), r * peak))
}
