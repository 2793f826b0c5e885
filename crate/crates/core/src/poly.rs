//! Dense multivariate polynomials in `x_1..x_L` and the interpolation of
//! `Z̄` onto them.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::ModelParams;
use crate::error::{Error, Result};
use crate::interp::{circle_nodes, LagrangeFit};
use crate::oracle::zbar_grid;
use crate::scalar::{real, to_f64, Real};

/// Default ceiling on `L` for tensor-grid interpolation.
pub const DEFAULT_MAX_LEN: usize = 5;

/// Coefficient tensor of a polynomial with per-variable degree `degree`.
///
/// Entry `(k_1, .., k_L)` is the coefficient of `Π x_i^{k_i}`, stored
/// row-major with `k_1` varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRep<T: Real> {
    len: usize,
    degree: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> PolyRep<T> {
    pub fn new(len: usize, degree: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let want = (degree + 1).pow(len as u32);
        if coeffs.len() != want {
            return Err(Error::Dimension {
                op: "PolyRep::new",
                detail: format!("{} coefficients for {len} variables of degree {degree}, expected {want}", coeffs.len()),
            });
        }
        Ok(Self { len, degree, coeffs })
    }

    pub fn zeros(len: usize, degree: usize) -> Self {
        Self {
            len,
            degree,
            coeffs: vec![Complex::new(T::zero(), T::zero()); (degree + 1).pow(len as u32)],
        }
    }

    /// Coefficients drawn uniformly from the unit square.
    pub fn random<R: Rng>(len: usize, degree: usize, rng: &mut R) -> Self {
        let n = (degree + 1).pow(len as u32);
        let coeffs = (0..n)
            .map(|_| Complex::new(real(rng.gen_range(-1.0..1.0)), real(rng.gen_range(-1.0..1.0))))
            .collect();
        Self { len, degree, coeffs }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    fn stride(&self, var: usize) -> usize {
        (self.degree + 1).pow((self.len - 1 - var) as u32)
    }

    /// Coefficient at multi-index `idx`.
    pub fn coefficient(&self, idx: &[usize]) -> Complex<T> {
        let n = self.degree + 1;
        self.coeffs[idx.iter().fold(0, |acc, &k| acc * n + k)]
    }

    /// Coefficient of `Π x_i^{degree}`.
    pub fn top_coefficient(&self) -> Complex<T> {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            len: self.len,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Evaluates at `xs` by nested Horner, last variable innermost.
    pub fn eval(&self, xs: &[Complex<T>]) -> Result<Complex<T>> {
        if xs.len() != self.len {
            return Err(Error::Dimension {
                op: "PolyRep::eval",
                detail: format!("{} points for {} variables", xs.len(), self.len),
            });
        }
        let n = self.degree + 1;
        let mut layer = self.coeffs.clone();
        for &x in xs.iter().rev() {
            layer = layer
                .chunks(n)
                .map(|c| c.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &v| acc * x + v))
                .collect();
        }
        Ok(layer[0])
    }

    /// `Σ |c_α| Π |x_i|^{α_i}`, the magnitude scale of [`Self::eval`]: roundoff
    /// in the coefficients is amplified by this much.
    pub fn eval_scale(&self, xs: &[Complex<T>]) -> Result<T> {
        let abs = Self {
            len: self.len,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| Complex::new(c.norm(), T::zero())).collect(),
        };
        let moduli: Vec<Complex<T>> = xs.iter().map(|x| Complex::new(x.norm(), T::zero())).collect();
        Ok(abs.eval(&moduli)?.re)
    }

    /// `∂^k / ∂x_var^k`, keeping the tensor shape (top slices become zero).
    pub fn derivative(&self, var: usize, k: usize) -> Self {
        let n = self.degree + 1;
        let stride = self.stride(var);
        let mut out = Self::zeros(self.len, self.degree);
        for (flat, &c) in self.coeffs.iter().enumerate() {
            let m = (flat / stride) % n;
            if m < k {
                continue;
            }
            let falling = ((m - k + 1)..=m).fold(T::one(), |acc, f| acc * real(f as f64));
            out.coeffs[flat - k * stride] = out.coeffs[flat - k * stride] + c * falling;
        }
        out
    }

    /// Polynomial in the remaining variables obtained by fixing `x_var`;
    /// the fixed variable is kept with degree-zero dependence.
    pub fn substitute(&self, var: usize, x: Complex<T>) -> Self {
        let n = self.degree + 1;
        let stride = self.stride(var);
        let mut out = Self::zeros(self.len, self.degree);
        for (flat, &c) in self.coeffs.iter().enumerate() {
            let m = (flat / stride) % n;
            let dst = flat - m * stride;
            out.coeffs[dst] = out.coeffs[dst] + c * x.powu(m as u32);
        }
        out
    }

    /// JSON form `{"L", "degree", "coeffs"}` with nested `[re, im]` arrays.
    pub fn to_json(&self) -> serde_json::Value {
        fn nest(coeffs: &[[f64; 2]], n: usize, depth: usize) -> serde_json::Value {
            if depth == 1 {
                return serde_json::json!(coeffs);
            }
            let chunk = coeffs.len() / n;
            serde_json::Value::Array(coeffs.chunks(chunk).map(|c| nest(c, n, depth - 1)).collect())
        }
        let flat: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [to_f64(c.re), to_f64(c.im)]).collect();
        serde_json::json!({
            "L": self.len,
            "degree": self.degree,
            "coeffs": nest(&flat, self.degree + 1, self.len.max(1)),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize, Serialize)]
        struct Raw {
            #[serde(rename = "L")]
            len: usize,
            degree: usize,
            coeffs: serde_json::Value,
        }
        fn flatten(v: &serde_json::Value, out: &mut Vec<[f64; 2]>) -> std::result::Result<(), String> {
            match v.as_array() {
                Some(items) if items.len() == 2 && items.iter().all(|x| x.is_number()) => {
                    out.push([items[0].as_f64().unwrap(), items[1].as_f64().unwrap()]);
                    Ok(())
                }
                Some(items) => items.iter().try_for_each(|x| flatten(x, out)),
                None => Err("coefficient entries must be nested arrays of [re, im]".into()),
            }
        }
        let raw: Raw = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let mut flat = Vec::new();
        flatten(&raw.coeffs, &mut flat).map_err(Error::InvalidParams)?;
        Self::new(raw.len, raw.degree, flat.iter().map(|p| Complex::new(real(p[0]), real(p[1]))).collect())
    }
}

/// Grid placement and budget for [`interpolate_zbar`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationOptions {
    pub radius: f64,
    pub phase: f64,
    pub max_len: usize,
}

impl Default for InterpolationOptions {
    fn default() -> Self {
        Self {
            radius: 1.0,
            phase: 0.13,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

/// Applies the 1-D fit along every axis of a `n^L` value tensor.
fn fit_tensor<T: Real>(values: &mut [Complex<T>], len: usize, fit: &LagrangeFit<T>) -> Result<()> {
    let n = fit.len();
    for var in 0..len {
        let stride = n.pow((len - 1 - var) as u32);
        let fitted: Vec<(usize, Vec<Complex<T>>)> = (0..values.len())
            .into_par_iter()
            .filter(|flat| (flat / stride).is_multiple_of(n))
            .map(|base| {
                let fiber: Vec<Complex<T>> = (0..n).map(|m| values[base + m * stride]).collect();
                fit.fit(&fiber).map(|c| (base, c))
            })
            .collect::<Result<_>>()?;
        for (base, c) in fitted {
            for (m, v) in c.into_iter().enumerate() {
                values[base + m * stride] = v;
            }
        }
    }
    Ok(())
}

/// Interpolates `Z̄` on the `(2L+1)^L` tensor grid of circle nodes.
pub fn interpolate_zbar<T: Real>(params: &ModelParams<T>, opts: &InterpolationOptions) -> Result<PolyRep<T>> {
    let len = params.len();
    if len > opts.max_len {
        return Err(Error::Budget {
            requested: len,
            max: opts.max_len,
        });
    }
    let degree = 2 * len;
    let nodes = circle_nodes(degree + 1, real(opts.radius), real(opts.phase));
    let fit = LagrangeFit::new(&nodes)?;
    let mut values = zbar_grid(params, &nodes)?;
    fit_tensor(&mut values, len, &fit)?;
    PolyRep::new(len, degree, values)
}
