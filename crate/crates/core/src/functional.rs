//! Coefficients and residuals of the linear functional equation satisfied
//! by the partition function, the family obtained by exchanging `λ_0` with
//! each `λ_i`, and the `Z`/`V` split at `λ_0 = μ_1 - γ`.

use num_complex::Complex;

use crate::algebra::{guard, ModelParams};
use crate::error::{Error, Result};
use crate::oracle::{eigenvalue_functions, lambda_a, partition_function};
use crate::report::VerificationReport;
use crate::scalar::{cancellation_residual, real, rel_diff, Real};

/// `M_0` and `M_1..M_L` at a point `(λ_0; λ_1..λ_L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalCoefficients<T: Real> {
    pub m0: Complex<T>,
    pub mi: Vec<Complex<T>>,
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `Π_{j≠skip} a(λ_j - x)/b(λ_j - x) · b(λ_j + x)/a(λ_j + x)`.
fn forward_product<T: Real>(p: &ModelParams<T>, x: Complex<T>, lambdas: &[Complex<T>], skip: Option<usize>) -> Complex<T> {
    lambdas
        .iter()
        .enumerate()
        .filter(|&(j, _)| Some(j) != skip)
        .fold(one(), |acc, (_, &lj)| acc * p.a(lj - x) / p.b(lj - x) * p.b(lj + x) / p.a(lj + x))
}

/// `Π_{j≠skip} a(x - λ_j)/b(x - λ_j) · a(x + λ_j + γ)/b(x + λ_j + γ)`.
fn backward_product<T: Real>(p: &ModelParams<T>, x: Complex<T>, lambdas: &[Complex<T>], skip: Option<usize>) -> Complex<T> {
    let g = p.gamma;
    lambdas
        .iter()
        .enumerate()
        .filter(|&(j, _)| Some(j) != skip)
        .fold(one(), |acc, (_, &lj)| acc * p.a(x - lj) / p.b(x - lj) * p.a(x + lj + g) / p.b(x + lj + g))
}

fn check_denominators<T: Real>(p: &ModelParams<T>, lambda0: Complex<T>, lambdas: &[Complex<T>]) -> Result<()> {
    const CTX: &str = "functional coefficients";
    let two = real::<T>(2.0);
    guard(CTX, "a(2λ_0) = 0", p.a(lambda0 * two))?;
    for (j, &lj) in lambdas.iter().enumerate() {
        let n = j + 1;
        guard(CTX, format!("b(λ_{n} - λ_0) = 0"), p.b(lj - lambda0))?;
        guard(CTX, format!("a(λ_{n} + λ_0) = 0"), p.a(lj + lambda0))?;
        guard(CTX, format!("a(2λ_{n}) = 0"), p.a(lj * two))?;
        for (i, &li) in lambdas.iter().enumerate().take(j) {
            let m = i + 1;
            if p.b(lj - li).norm() < real(crate::algebra::SINGULARITY_GUARD) {
                return Err(Error::Coincident { i: m, j: n });
            }
            guard(CTX, format!("a(λ_{m} + λ_{n}) = 0"), p.a(lj + li))?;
            guard(CTX, format!("b(λ_{m} + λ_{n} + γ) = 0"), p.b(lj + li + p.gamma))?;
        }
    }
    Ok(())
}

pub fn coefficients<T: Real>(
    params: &ModelParams<T>,
    lambda0: Complex<T>,
    lambdas: &[Complex<T>],
) -> Result<FunctionalCoefficients<T>> {
    params.check_point(lambdas)?;
    check_denominators(params, lambda0, lambdas)?;
    let p = params;
    let c = p.c();
    let two = real::<T>(2.0);
    let ev0 = eigenvalue_functions(p, lambda0)?;
    let m0 = ev0.lambda_bar_a - ev0.lambda_a * forward_product(p, lambda0, lambdas, None);
    let mi = lambdas
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            let ev = eigenvalue_functions(p, li)?;
            let first = p.b(li * two) / p.a(li * two) * c / p.b(li - lambda0)
                * ev.lambda_a
                * forward_product(p, li, lambdas, Some(i));
            let second = c / p.a(li + lambda0) * ev.lambda_dtilde * backward_product(p, li, lambdas, Some(i));
            Ok(first + second)
        })
        .collect::<Result<_>>()?;
    Ok(FunctionalCoefficients { m0, mi })
}

/// The `L + 1` terms `M_0 Z(λ_1..λ_L)` and `M_i Z(λ_0, λ_1..λ̂_i..λ_L)`.
pub fn terms<T: Real>(params: &ModelParams<T>, lambda0: Complex<T>, lambdas: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let m = coefficients(params, lambda0, lambdas)?;
    let mut out = Vec::with_capacity(lambdas.len() + 1);
    out.push(m.m0 * partition_function(params, lambdas)?);
    for (i, &mi) in m.mi.iter().enumerate() {
        let mut point = Vec::with_capacity(lambdas.len());
        point.push(lambda0);
        point.extend(lambdas.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &l)| l));
        out.push(mi * partition_function(params, &point)?);
    }
    Ok(out)
}

/// `|Σ terms| / Σ |terms|` with the oracle standing in for `Z`.
pub fn residual<T: Real>(params: &ModelParams<T>, lambda0: Complex<T>, lambdas: &[Complex<T>]) -> Result<T> {
    Ok(cancellation_residual(&terms(params, lambda0, lambdas)?))
}

/// Residual of the equation with the `L + 1` values reassigned to roles:
/// role `r` receives the value originally in slot `roles[r]`, slot 0 being
/// `λ_0`.
///
/// The equations of the family differ from the base one only through
/// their coefficients. Since `Z` is symmetric, feeding it the reassigned
/// arguments yields exactly those modified coefficients.
pub fn permuted_residual<T: Real>(
    params: &ModelParams<T>,
    roles: &[usize],
    lambda0: Complex<T>,
    lambdas: &[Complex<T>],
) -> Result<T> {
    let n = lambdas.len() + 1;
    let mut seen = vec![false; n];
    if roles.len() != n || roles.iter().any(|&r| r >= n || std::mem::replace(&mut seen[r], true)) {
        return Err(Error::InvalidParams(format!("roles {roles:?} are not a permutation of 0..={}", n - 1)));
    }
    let values: Vec<Complex<T>> = std::iter::once(lambda0).chain(lambdas.iter().copied()).collect();
    let point: Vec<Complex<T>> = roles[1..].iter().map(|&r| values[r]).collect();
    residual(params, values[roles[0]], &point)
}

/// Residue of `M_0` in `λ_0` at `λ_0 = λ_k` (0-based `k`):
/// `c · b(2λ_k)/a(2λ_k) · Λ_A(λ_k) Π_{j≠k} a(λ_j-λ_k)/b(λ_j-λ_k) · b(λ_j+λ_k)/a(λ_j+λ_k)`.
/// The residue of `M_k` at the same point is its negative.
pub fn pole_residue<T: Real>(params: &ModelParams<T>, k: usize, lambdas: &[Complex<T>]) -> Result<Complex<T>> {
    let p = params;
    let two = real::<T>(2.0);
    let lk = lambdas[k];
    let a2 = guard("pole_residue", format!("a(2λ_{}) = 0", k + 1), p.a(lk * two))?;
    Ok(p.c() * p.b(lk * two) / a2 * lambda_a(p, lk) * forward_product(p, lk, lambdas, Some(k)))
}

/// `V(X) = Z(μ_1 - γ, X) / Π b(λ - μ_1) a(λ + μ_1)` on `L - 1` arguments.
pub fn v_function<T: Real>(params: &ModelParams<T>, rest: &[Complex<T>]) -> Result<Complex<T>> {
    let mu1 = params.mu[0];
    let mut point = vec![mu1 - params.gamma];
    point.extend_from_slice(rest);
    let denom = rest.iter().try_fold(one::<T>(), |acc, &l| {
        Ok::<_, Error>(acc * guard("v_function", "b(λ - μ_1) a(λ + μ_1) = 0", params.b(l - mu1) * params.a(l + mu1))?)
    })?;
    Ok(partition_function(params, &point)? / denom)
}

/// `m_i` with the `1/a(λ_i - μ_1)` and `1/b(λ_i + μ_1)` poles cancelled
/// against the matching factors of the site products.
fn m_coefficient<T: Real>(p: &ModelParams<T>, i: usize, lambdas: &[Complex<T>]) -> Complex<T> {
    let li = lambdas[i];
    let mu1 = p.mu[0];
    let rest = &p.mu[1..];
    let aa = rest.iter().fold(p.a(li + mu1), |acc, &m| acc * p.a(li - m) * p.a(li + m));
    let bb = rest.iter().fold(p.b(li - mu1), |acc, &m| acc * p.b(li - m) * p.b(li + m));
    (li + p.h).sinh() * aa * forward_product(p, li, lambdas, Some(i))
        - p.a(li - p.h) * bb * backward_product(p, li, lambdas, Some(i))
}

/// `κ = b(h + μ_1) b(2μ_1 - 2γ) Π_{j≥2} b(μ_1 - μ_j - γ) b(μ_1 + μ_j - γ)`.
pub fn kappa<T: Real>(p: &ModelParams<T>) -> Complex<T> {
    let mu1 = p.mu[0];
    let g = p.gamma;
    let two = real::<T>(2.0);
    p.mu[1..]
        .iter()
        .fold((p.h + mu1).sinh() * p.b(mu1 * two - g * two), |acc, &m| {
            acc * p.b(mu1 - m - g) * p.b(mu1 + m - g)
        })
}

/// Checks `Z(X) = κ⁻¹ Σ_i b(2λ_i)/a(2λ_i) Π_{j≠i} b(λ_j-μ_1) a(λ_j+μ_1) m_i V(X_i)`
/// and the symmetry of `V`.
pub fn v_split_check<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<VerificationReport> {
    params.check_point(lambdas)?;
    if params.len() < 2 {
        return Err(Error::InvalidParams("the Z/V split needs L >= 2".into()));
    }
    check_denominators(params, params.mu[0] - params.gamma, lambdas)?;
    let p = params;
    let mu1 = p.mu[0];
    let two = real::<T>(2.0);
    let kap = guard("v_split_check", "kappa = 0", kappa(p))?;
    let mut total = Complex::new(T::zero(), T::zero());
    let mut scale = T::zero();
    for i in 0..lambdas.len() {
        let rest: Vec<Complex<T>> = lambdas.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &l)| l).collect();
        let weight = rest.iter().fold(one::<T>(), |acc, &l| acc * p.b(l - mu1) * p.a(l + mu1));
        let term = p.b(lambdas[i] * two) / p.a(lambdas[i] * two) * weight * m_coefficient(p, i, lambdas) * v_function(p, &rest)?
            / kap;
        scale = scale + term.norm();
        total = total + term;
    }
    let z = partition_function(p, lambdas)?;
    let mut report = VerificationReport::new();
    report.push(
        "v_split",
        "Z/V split at lambda_0 = mu_1 - gamma",
        crate::scalar::normalize((total - z).norm(), scale + z.norm()),
        1e-9,
    );
    if lambdas.len() >= 3 {
        let rest = &lambdas[1..];
        let mut swapped = rest.to_vec();
        swapped.swap(0, 1);
        report.push(
            "v_symmetry",
            "V symmetric in its arguments",
            rel_diff(v_function(p, rest)?, v_function(p, &swapped)?),
            1e-12,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::C64;

    fn params(l: usize) -> ModelParams<f64> {
        let mu = (0..l).map(|j| cx(0.29 - 0.31 * j as f64, 0.05 + 0.09 * j as f64)).collect();
        ModelParams::new(cx(0.31, 0.11), cx(0.83, -0.07), mu).unwrap()
    }

    fn lambdas(l: usize) -> Vec<C64> {
        (0..l).map(|j| cx(0.57 - 0.38 * j as f64, -0.23 + 0.3 * j as f64)).collect()
    }

    #[test]
    fn single_site_reduces_to_sinh_ratio() {
        // At L = 1 the equation reads sinh(2λ_0) Z(λ_1) = sinh(2λ_1) Z(λ_0)
        // up to a common factor, so M_1 / M_0 = -sinh(2λ_1)/sinh(2λ_0).
        let p = params(1);
        let (l0, l1) = (cx(0.21, 0.4), cx(-0.33, 0.17));
        let m = coefficients(&p, l0, &[l1]).unwrap();
        let want = -(l1 * 2.0).sinh() / (l0 * 2.0).sinh();
        assert!(rel_diff(m.mi[0] / m.m0, want) < 1e-13);
    }

    #[test]
    fn residual_vanishes() {
        for l in 1..=3 {
            let r = residual(&params(l), cx(-0.12, 0.52), &lambdas(l)).unwrap();
            assert!(r < 1e-12, "L={l}: {r:e}");
        }
    }

    #[test]
    fn identity_roles_reproduce_residual() {
        let (p, ls, l0) = (params(2), lambdas(2), cx(-0.12, 0.52));
        assert_eq!(permuted_residual(&p, &[0, 1, 2], l0, &ls).unwrap(), residual(&p, l0, &ls).unwrap());
        assert!(permuted_residual(&p, &[1, 0, 2], l0, &ls).unwrap() < 1e-12);
        assert!(permuted_residual(&p, &[1, 1, 2], l0, &ls).is_err());
    }

    #[test]
    fn coincident_lambda0_is_rejected() {
        let ls = lambdas(2);
        assert!(matches!(coefficients(&params(2), ls[1], &ls), Err(Error::Singular { .. })));
    }

    #[test]
    fn special_zero_leaves_only_m0_term() {
        let p = params(2);
        let ls = [p.mu[0] - p.gamma, p.mu[0]];
        let l0 = cx(-0.12, 0.52);
        let m = coefficients(&p, l0, &ls).unwrap();
        let generic = terms(&p, l0, &lambdas(2)).unwrap();
        let scale: f64 = generic.iter().map(|z| z.norm()).sum();
        let t = terms(&p, l0, &ls).unwrap();
        assert!(t[1].norm() < 1e-12 * scale && t[2].norm() < 1e-12 * scale);
        assert!(m.m0.norm() > 1e-3);
        assert!(t[0].norm() < 1e-12 * scale);
    }

    #[test]
    fn v_split_holds() {
        for l in 2..=3 {
            let rep = v_split_check(&params(l), &lambdas(l)).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
        }
    }
}
