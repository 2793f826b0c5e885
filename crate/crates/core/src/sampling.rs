//! Seeded parameter draws with rejection of near-singular points.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::ModelParams;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Minimum modulus of every denominator factor for a draw to be accepted.
pub const DEFAULT_CLEARANCE: f64 = 0.05;

const MAX_ATTEMPTS: usize = 10_000;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Modulus uniform in `[0.1, 1]`, argument at least 0.15 away from the
/// real axis.
pub fn draw_complex<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
    let modulus = rng.gen_range(0.1..=1.0);
    let angle: f64 = rng.gen_range(0.15..std::f64::consts::PI - 0.15);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Complex::from_polar(real(modulus), real(sign * angle))
}

pub fn draw_vec<T: Real, R: Rng>(rng: &mut R, len: usize) -> Vec<Complex<T>> {
    (0..len).map(|_| draw_complex(rng)).collect()
}

/// Smallest modulus among the parameter-only denominator factors:
/// `c`, `b(h ± μ_i)`, `b(μ_i - μ_j)` and the `Z/V` split normalization.
pub fn param_clearance<T: Real>(params: &ModelParams<T>) -> T {
    let p = params;
    let mu1 = p.mu[0];
    let two = real::<T>(2.0);
    let mut factors = vec![p.c(), p.b(mu1 * two - p.gamma * two)];
    for (i, &m) in p.mu.iter().enumerate() {
        factors.push((p.h + m).sinh());
        factors.push((p.h - m).sinh());
        if i > 0 {
            factors.push(p.b(mu1 - m - p.gamma));
            factors.push(p.b(mu1 + m - p.gamma));
        }
        for &n in &p.mu[i + 1..] {
            factors.push(p.b(m - n));
        }
    }
    factors.iter().map(|f| f.norm()).fold(T::infinity(), T::min)
}

/// Smallest modulus among the denominator factors involving spectral
/// parameters: `b`, `a` and `b(· + γ)` of pairwise sums and differences,
/// `a(2λ)`, `b(2λ)` and `b(λ - μ_1) a(λ + μ_1)`. With `only_last`, only
/// factors touching the final entry are considered.
fn point_clearance_impl<T: Real>(params: &ModelParams<T>, all: &[Complex<T>], only_last: bool) -> T {
    let p = params;
    let two = real::<T>(2.0);
    let last = all.len().saturating_sub(1);
    let mut factors = Vec::new();
    for (i, &x) in all.iter().enumerate() {
        if !only_last || i == last {
            factors.push(p.a(x * two));
            factors.push(p.b(x * two));
            factors.push(p.b(x - p.mu[0]) * p.a(x + p.mu[0]));
        }
        for (j, &y) in all.iter().enumerate().skip(i + 1) {
            if !only_last || j == last {
                factors.extend([p.b(x - y), p.a(x + y), p.b(x + y + p.gamma)]);
            }
        }
    }
    factors.iter().map(|f| f.norm()).fold(T::infinity(), T::min)
}

pub fn point_clearance<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>], lambda0: Option<Complex<T>>) -> T {
    let all: Vec<Complex<T>> = lambdas.iter().copied().chain(lambda0).collect();
    point_clearance_impl(params, &all, false)
}

/// Minimum of [`param_clearance`] and [`point_clearance`].
pub fn clearance<T: Real>(params: &ModelParams<T>, lambdas: &[Complex<T>], lambda0: Option<Complex<T>>) -> T {
    param_clearance(params).min(point_clearance(params, lambdas, lambda0))
}

/// A random model and spectral point (with `λ_0`) clearing every
/// denominator by `min_clearance`.
#[derive(Clone, Debug)]
pub struct Draw<T: Real> {
    pub params: ModelParams<T>,
    pub lambdas: Vec<Complex<T>>,
    pub lambda0: Complex<T>,
}

pub fn draw_model<T: Real, R: Rng>(rng: &mut R, len: usize, min_clearance: f64) -> Result<Draw<T>> {
    for _ in 0..MAX_ATTEMPTS {
        let params = ModelParams::new(draw_complex(rng), draw_complex(rng), draw_vec(rng, len))?;
        let lambdas = draw_vec(rng, len);
        let lambda0 = draw_complex(rng);
        if clearance(&params, &lambdas, Some(lambda0)) >= real(min_clearance) {
            return Ok(Draw { params, lambdas, lambda0 });
        }
    }
    Err(Error::InvalidParams(format!("no draw cleared {min_clearance} after {MAX_ATTEMPTS} attempts")))
}

/// A spectral point for fixed `params`, clearing the point factors.
pub fn draw_point<T: Real, R: Rng>(
    rng: &mut R,
    params: &ModelParams<T>,
    min_clearance: f64,
) -> Result<(Vec<Complex<T>>, Complex<T>)> {
    for _ in 0..MAX_ATTEMPTS {
        let lambdas = draw_vec(rng, params.len());
        let lambda0 = draw_complex(rng);
        if point_clearance(params, &lambdas, Some(lambda0)) >= real(min_clearance) {
            return Ok((lambdas, lambda0));
        }
    }
    Err(Error::InvalidParams(format!("no spectral point cleared {min_clearance} after {MAX_ATTEMPTS} attempts")))
}

/// A `λ_0` for a fixed point, clearing only the factors that involve it.
pub fn draw_lambda0<T: Real, R: Rng>(
    rng: &mut R,
    params: &ModelParams<T>,
    lambdas: &[Complex<T>],
    min_clearance: f64,
) -> Result<Complex<T>> {
    let mut all = lambdas.to_vec();
    all.push(Complex::new(T::zero(), T::zero()));
    for _ in 0..MAX_ATTEMPTS {
        let candidate = draw_complex(rng);
        *all.last_mut().unwrap() = candidate;
        if point_clearance_impl(params, &all, true) >= real(min_clearance) {
            return Ok(candidate);
        }
    }
    Err(Error::InvalidParams(format!("no lambda_0 cleared {min_clearance} after {MAX_ATTEMPTS} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_respect_ranges() {
        let mut rng = stream_rng(7, 0);
        for _ in 0..200 {
            let z: Complex<f64> = draw_complex(&mut rng);
            assert!((0.1..=1.0 + 1e-12).contains(&z.norm()));
            assert!(z.im.abs() > 0.1 * z.norm() * 0.14);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<Complex<f64>> = draw_vec(&mut stream_rng(1, 3), 4);
        let b: Vec<Complex<f64>> = draw_vec(&mut stream_rng(1, 3), 4);
        let c: Vec<Complex<f64>> = draw_vec(&mut stream_rng(1, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn accepted_draws_clear_threshold() {
        let mut rng = stream_rng(11, 0);
        for len in 1..=4 {
            let d: Draw<f64> = draw_model(&mut rng, len, DEFAULT_CLEARANCE).unwrap();
            assert!(clearance(&d.params, &d.lambdas, Some(d.lambda0)) >= DEFAULT_CLEARANCE);
        }
    }
}
