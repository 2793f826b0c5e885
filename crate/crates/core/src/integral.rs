//! The multiple contour integral for `Z`, evaluated exactly as a sum of
//! simple-pole residues at `w_i = λ_σ(i)` over permutations `σ`.

use itertools::Itertools;
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{guard, ModelParams, SINGULARITY_GUARD};
use crate::error::{Error, Result};
use crate::interp::{neville_at_zero, Extrapolation};
use crate::oracle::partition_function;
use crate::sampling::{draw_point, DEFAULT_CLEARANCE};
use crate::scalar::{compensated_sum, real, rel_diff, Real};

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `Θ_i` with `1/a(w_i - μ_i)` and `1/b(w_i + μ_i)` cancelled against the
/// `j = i` site factors.
fn theta<T: Real>(p: &ModelParams<T>, i: usize, w: &[Complex<T>]) -> Complex<T> {
    let (wi, g, h) = (w[i], p.gamma, p.h);
    let later_mu = &p.mu[i + 1..];
    let later_w = &w[i + 1..];
    let first = later_mu
        .iter()
        .fold((wi + h).sinh() * p.a(wi + p.mu[i]), |acc, &m| acc * p.a(wi - m) * p.a(wi + m))
        * later_w
            .iter()
            .fold(one(), |acc, &wk| acc * p.a(wk - wi) / p.b(wk - wi) * p.b(wk + wi) / p.a(wk + wi));
    let second = later_mu
        .iter()
        .fold(p.a(wi - h) * p.b(wi - p.mu[i]), |acc, &m| acc * p.b(wi - m) * p.b(wi + m))
        * later_w
            .iter()
            .fold(one(), |acc, &wk| acc * p.a(wi - wk) / p.b(wi - wk) * p.a(wi + wk + g) / p.b(wi + wk + g));
    first - second
}

/// Closed-form `H(w_1..w_L)`.
///
/// Returns exactly zero when two arguments coincide: the double zero of
/// `b(w_i - w_j)^2` outweighs the simple pole of `Θ_i`.
pub fn h_function<T: Real>(params: &ModelParams<T>, w: &[Complex<T>]) -> Result<Complex<T>> {
    let p = params;
    let n = p.len();
    if w.len() != n {
        return Err(Error::Dimension {
            op: "h_function",
            detail: format!("{} arguments for L = {n}", w.len()),
        });
    }
    let zero = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        for i in 0..j {
            if p.b(w[i] - w[j]).norm() < real(SINGULARITY_GUARD) {
                return Ok(zero);
            }
        }
    }
    check_h_singularities(p, w, "h_function")?;
    let two = real::<T>(2.0);
    let mut val = p.c().powu(n as u32);
    for i in 0..n {
        let wi = w[i];
        val = val * p.b(wi * two) / p.a(wi * two) * (p.h - p.mu[i]).sinh() / (p.h + p.mu[i]).sinh() * theta(p, i, w);
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = p.b(w[i] - w[j]);
            val = val * p.a(p.mu[i] + w[j]) * p.b(p.mu[i] - w[j]) * d * d;
        }
    }
    Ok(val)
}

/// Errors if any uncancelled denominator of `H` vanishes at `w`.
fn check_h_singularities<T: Real>(p: &ModelParams<T>, w: &[Complex<T>], ctx: &'static str) -> Result<()> {
    let two = real::<T>(2.0);
    for (i, &m) in p.mu.iter().enumerate() {
        guard(ctx, format!("b(h + μ_{}) = 0", i + 1), (p.h + m).sinh())?;
    }
    for (i, &wi) in w.iter().enumerate() {
        guard(ctx, format!("a(2w_{}) = 0", i + 1), p.a(wi * two))?;
        for (k, &wk) in w.iter().enumerate().skip(i + 1) {
            guard(ctx, format!("a(w_{} + w_{}) = 0", i + 1, k + 1), p.a(wi + wk))?;
            guard(ctx, format!("b(w_{} + w_{} + γ) = 0", i + 1, k + 1), p.b(wi + wk + p.gamma))?;
        }
    }
    Ok(())
}

/// Right-hand side of the recursion expressing `H` on `L` arguments
/// through `H̄`, the same function for the lattice without site 1, taken
/// here with unit normalization. Needs `L >= 2`.
pub fn h_recursion_rhs<T: Real>(params: &ModelParams<T>, w: &[Complex<T>]) -> Result<Complex<T>> {
    let p = params;
    let reduced = p
        .drop_first_site()
        .ok_or_else(|| Error::InvalidParams("the H recursion needs L >= 2".into()))?;
    let hbar = h_function(&reduced, &w[1..])?;
    let (w1, mu1, g) = (w[0], p.mu[0], p.gamma);
    let two = real::<T>(2.0);
    let geometric = w[1..].iter().fold(p.b(w1 * two) / p.a(w1 * two), |acc, &wj| {
        let d = p.b(w1 - wj);
        acc * d * d * p.b(mu1 - wj) * p.a(mu1 + wj)
    });
    let norm = p.mu[1..]
        .iter()
        .fold(p.b(mu1 * two - g * two), |acc, &m| acc * p.b(mu1 - m - g) * p.b(mu1 + m - g));
    let norm = guard("h_recursion_rhs", "b(2μ_1 - 2γ) Π b(μ_1 ∓ μ_j - γ) = 0", norm)?;
    let bh = guard("h_recursion_rhs", "b(h + μ_1) = 0", (p.h + mu1).sinh())?;
    let first = p
        .mu
        .iter()
        .skip(1)
        .fold((w1 + p.h).sinh() * p.a(w1 + mu1), |acc, &m| acc * p.a(w1 - m) * p.a(w1 + m))
        * w[1..]
            .iter()
            .fold(one(), |acc, &wk| acc * p.a(wk - w1) / p.b(wk - w1) * p.b(wk + w1) / p.a(wk + w1));
    let second = p
        .mu
        .iter()
        .skip(1)
        .fold(p.a(w1 - p.h) * p.b(w1 - mu1), |acc, &m| acc * p.b(w1 - m) * p.b(w1 + m))
        * w[1..]
            .iter()
            .fold(one(), |acc, &wk| acc * p.a(w1 - wk) / p.b(w1 - wk) * p.a(w1 + wk + g) / p.b(w1 + wk + g));
    Ok(hbar / bh * geometric / norm * (first - second))
}

/// `H(w) / rhs(w)`; constant in `w` when the recursion holds.
pub fn h_recursion_ratio<T: Real>(params: &ModelParams<T>, w: &[Complex<T>]) -> Result<Complex<T>> {
    let rhs = guard("h_recursion_ratio", "recursion right-hand side = 0", h_recursion_rhs(params, w)?)?;
    Ok(h_function(params, w)? / rhs)
}

/// Largest relative deviation of [`h_recursion_ratio`] across `count`
/// random integration points from the first one.
///
/// The ratio has its own singular set (the denominators of `H` and the
/// zeroes of the right-hand side), so points are redrawn until they clear
/// it.
pub fn h_recursion_spread<T: Real, R: Rng>(params: &ModelParams<T>, rng: &mut R, count: usize) -> Result<T> {
    let mut ratio = || -> Result<Complex<T>> {
        for _ in 0..64 {
            let (w, _) = draw_point(rng, params, DEFAULT_CLEARANCE)?;
            match h_recursion_ratio(params, &w) {
                Err(Error::Singular { .. }) => continue,
                other => return other,
            }
        }
        Err(Error::InvalidParams("no regular point for the H recursion in 64 draws".into()))
    };
    let base = ratio()?;
    let mut spread = T::zero();
    for _ in 1..count {
        spread = spread.max(rel_diff(base, ratio()?));
    }
    Ok(spread)
}

/// Residue of the integrand at `w_i = λ_σ(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTerm<T: Real> {
    pub sigma: Vec<usize>,
    pub value: Complex<T>,
}

/// Errors when the pole set is degenerate or `H` is singular on it.
pub fn scan_pole_set<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<()> {
    params.check_point(lambdas)?;
    for j in 0..lambdas.len() {
        for i in 0..j {
            if params.b(lambdas[j] - lambdas[i]).norm() < real(SINGULARITY_GUARD) {
                return Err(Error::Coincident { i: i + 1, j: j + 1 });
            }
        }
    }
    check_h_singularities(params, lambdas, "residue_sum pole scan")
}

/// One term per permutation, in lexicographic order of `σ`.
pub fn residue_terms<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<Vec<ResidueTerm<T>>> {
    scan_pole_set(params, lambdas)?;
    let n = lambdas.len();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    perms
        .into_par_iter()
        .map(|sigma| {
            let w: Vec<Complex<T>> = sigma.iter().map(|&s| lambdas[s]).collect();
            let mut denom = one::<T>();
            for &s in &sigma {
                for (j, &lj) in lambdas.iter().enumerate() {
                    if j != s {
                        denom = denom * params.b(lambdas[s] - lj);
                    }
                }
            }
            Ok(ResidueTerm {
                value: h_function(params, &w)? / denom,
                sigma,
            })
        })
        .collect()
}

/// `Z` from the residue sum, accumulated largest-first with compensation.
pub fn residue_sum<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>]) -> Result<Complex<T>> {
    let values: Vec<Complex<T>> = residue_terms(params, lambdas)?.into_iter().map(|t| t.value).collect();
    Ok(compensated_sum(&values))
}

/// Which evaluation of `Z` feeds the homogeneous extrapolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Oracle,
    ResidueSum,
}

/// Homogeneous point `λ_i = λ`, `μ_i = μ` on `len` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPoint<T: Real> {
    pub gamma: Complex<T>,
    pub h: Complex<T>,
    pub len: usize,
    pub lambda: Complex<T>,
    pub mu: Complex<T>,
}

/// Unit-modulus splitting directions `δ_i` (for `λ`) and `δ'_i` (for `μ`).
#[derive(Clone, Debug, PartialEq)]
pub struct Offsets<T: Real> {
    pub delta: Vec<Complex<T>>,
    pub delta_prime: Vec<Complex<T>>,
    /// `Z` depends on `ε` only through `ε^period`; extrapolation runs in
    /// that variable. Use 1 for arbitrary directions.
    pub period: u32,
}

impl<T: Real> Offsets<T> {
    /// `δ_i = e^{i(θ + 2πi/L)}`, `δ'_i` the same rotated by half a step.
    /// A single site is already homogeneous and gets zero offsets.
    ///
    /// Turning `ε` by `e^{2πi/L}` only relabels sites, and `Z` is symmetric
    /// in both sets of spectral parameters, hence period `L`.
    pub fn roots_of_unity(len: usize, theta: T) -> Self {
        if len == 1 {
            let zero = vec![Complex::new(T::zero(), T::zero())];
            return Self {
                delta: zero.clone(),
                delta_prime: zero,
                period: 1,
            };
        }
        let two_pi = T::PI() + T::PI();
        let n = real::<T>(len as f64);
        let at = |k: f64| Complex::from_polar(T::one(), theta + two_pi * real::<T>(k) / n);
        Self {
            delta: (0..len).map(|k| at(k as f64)).collect(),
            delta_prime: (0..len).map(|k| at(k as f64 + 0.5)).collect(),
            period: len as u32,
        }
    }
}

/// Default `ε` ladder: `0.128 · 2^{-k}`, `k = 0..8`, ending at `1e-3`.
pub fn default_eps_ladder() -> Vec<f64> {
    (0..8).map(|k| 0.128 / f64::from(1u32 << k)).collect()
}

/// `Z` at `λ_i = λ + εδ_i`, `μ_i = μ + εδ'_i`, extrapolated to `ε = 0`.
///
/// On the residue path the ladder is cut short (never below three rungs)
/// once the cancellation among residues exceeds [`RESIDUE_NOISE`].
pub fn homogeneous_limit<T: Real>(
    point: &HomogeneousPoint<T>,
    eps_ladder: &[f64],
    offsets: &Offsets<T>,
    path: EvalPath,
) -> Result<Extrapolation<T>> {
    if eps_ladder.len() < 3 {
        return Err(Error::InvalidParams("eps ladder needs at least 3 entries".into()));
    }
    if eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("eps ladder must be strictly decreasing".into()));
    }
    if eps_ladder[eps_ladder.len() - 1] < 1e-3 {
        return Err(Error::InvalidParams("smallest eps must be at least 1e-3".into()));
    }
    if offsets.delta.len() != point.len || offsets.delta_prime.len() != point.len {
        return Err(Error::InvalidParams("offset count must equal L".into()));
    }
    if offsets.period == 0 {
        return Err(Error::InvalidParams("offset period must be positive".into()));
    }
    let mut rungs: Vec<(T, Complex<T>)> = Vec::with_capacity(eps_ladder.len());
    for &e in eps_ladder {
        let e = real::<T>(e);
        let mu = offsets.delta_prime.iter().map(|&d| point.mu + d * e).collect();
        let params = ModelParams::new(point.gamma, point.h, mu)?;
        let lambdas: Vec<Complex<T>> = offsets.delta.iter().map(|&d| point.lambda + d * e).collect();
        let value = match path {
            EvalPath::Oracle => partition_function(&params, &lambdas)?,
            EvalPath::ResidueSum => {
                let terms: Vec<Complex<T>> = residue_terms(&params, &lambdas)?.into_iter().map(|t| t.value).collect();
                let value = compensated_sum(&terms);
                // The residues blow up like a power of 1/ε and cancel; stop
                // once the roundoff they leave behind would dominate.
                let scale: T = terms.iter().map(|t| t.norm()).sum();
                if rungs.len() >= 3 && T::epsilon() * scale > real::<T>(RESIDUE_NOISE) * value.norm() {
                    break;
                }
                value
            }
        };
        rungs.push((e.powi(offsets.period as i32), value));
    }
    let (xs, values): (Vec<T>, Vec<Complex<T>>) = rungs.into_iter().unzip();
    neville_at_zero(&xs, &values)
}

/// Largest relative roundoff accepted from a cancelling residue sum before
/// the remaining ladder rungs are dropped.
pub const RESIDUE_NOISE: f64 = 1e-12;
