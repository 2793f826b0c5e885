//! Parameter files and the golden-value corpus. Complex numbers are
//! `[re, im]` pairs throughout.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::ModelParams;
use crate::integral::residue_sum;
use crate::oracle::partition_function;
use crate::scalar::rel_diff;

pub type Pair = [f64; 2];

fn to_complex(p: Pair) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

fn to_pair(z: Complex<f64>) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

/// `{"L", "gamma", "h", "mu", "lambda", "lambda0"?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(rename = "L")]
    pub len: usize,
    pub gamma: Pair,
    pub h: Pair,
    pub mu: Vec<Pair>,
    pub lambda: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<Pair>,
}

impl ParamFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: Self = serde_json::from_str(text).map_err(|e| InputError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let field = |field: &str, message: String| InputError::Field {
            field: field.into(),
            message,
        };
        if self.len == 0 {
            return Err(field("L", "lattice length must be at least 1".into()));
        }
        for (name, len) in [("mu", self.mu.len()), ("lambda", self.lambda.len())] {
            if len != self.len {
                return Err(field(name, format!("expected L = {} entries, found {len}", self.len)));
            }
        }
        let scalars = [("gamma", Some(self.gamma)), ("h", Some(self.h)), ("lambda0", self.lambda0)];
        for (name, value) in scalars {
            if value.is_some_and(|v| !v.iter().all(|x| x.is_finite())) {
                return Err(field(name, "non-finite value".into()));
            }
        }
        for (name, list) in [("mu", &self.mu), ("lambda", &self.lambda)] {
            if let Some(k) = list.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
                return Err(field(&format!("{name}[{k}]"), "non-finite value".into()));
            }
        }
        Ok(())
    }

    pub fn model_params(&self) -> ModelParams<f64> {
        ModelParams::new(
            to_complex(self.gamma),
            to_complex(self.h),
            self.mu.iter().copied().map(to_complex).collect(),
        )
        .expect("validated parameter file")
    }

    pub fn lambdas(&self) -> Vec<Complex<f64>> {
        self.lambda.iter().copied().map(to_complex).collect()
    }

    pub fn lambda0(&self) -> Option<Complex<f64>> {
        self.lambda0.map(to_complex)
    }

    pub fn from_model(params: &ModelParams<f64>, lambdas: &[Complex<f64>], lambda0: Option<Complex<f64>>) -> Self {
        Self {
            len: params.len(),
            gamma: to_pair(params.gamma),
            h: to_pair(params.h),
            mu: params.mu.iter().copied().map(to_pair).collect(),
            lambda: lambdas.iter().copied().map(to_pair).collect(),
            lambda0: lambda0.map(to_pair),
        }
    }
}

/// Agreement required between the two evaluation paths before a value is
/// admitted to the corpus.
pub const GOLDEN_AGREEMENT: f64 = 1e-10;

/// One corpus entry: the operator value of `Z` and its relative
/// discrepancy from the residue sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    #[serde(rename = "L")]
    pub len: usize,
    pub gamma: Pair,
    pub h: Pair,
    pub mu: Vec<Pair>,
    pub lambda: Vec<Pair>,
    #[serde(rename = "Z")]
    pub z: Pair,
    pub crosscheck_discrepancy: f64,
}

impl GoldenRecord {
    /// Evaluates both paths; `None` when they disagree beyond
    /// [`GOLDEN_AGREEMENT`].
    pub fn compute(params: &ModelParams<f64>, lambdas: &[Complex<f64>]) -> crate::Result<Option<Self>> {
        let z = partition_function(params, lambdas)?;
        let discrepancy = rel_diff(z, residue_sum(params, lambdas)?);
        if discrepancy.is_nan() || discrepancy > GOLDEN_AGREEMENT {
            return Ok(None);
        }
        let file = ParamFile::from_model(params, lambdas, None);
        Ok(Some(Self {
            len: file.len,
            gamma: file.gamma,
            h: file.h,
            mu: file.mu,
            lambda: file.lambda,
            z: to_pair(z),
            crosscheck_discrepancy: discrepancy,
        }))
    }

    pub fn params(&self) -> ParamFile {
        ParamFile {
            len: self.len,
            gamma: self.gamma,
            h: self.h,
            mu: self.mu.clone(),
            lambda: self.lambda.clone(),
            lambda0: None,
        }
    }

    pub fn z(&self) -> Complex<f64> {
        to_complex(self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const L2: &str = r#"{"L": 2, "gamma": [0.31, 0.11], "h": [0.83, -0.07],
        "mu": [[0.29, 0.05], [-0.41, 0.13]], "lambda": [[0.57, -0.23], [0.19, 0.37]]}"#;

    #[test]
    fn parses_and_round_trips() {
        let f = ParamFile::parse(L2).unwrap();
        assert_eq!(f.len, 2);
        assert_eq!(f.lambda0, None);
        let back = ParamFile::parse(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn mu_length_mismatch_names_field() {
        let bad = L2.replace("\"L\": 2", "\"L\": 3");
        match ParamFile::parse(&bad) {
            Err(InputError::Field { field, .. }) => assert_eq!(field, "mu"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let bad = "{\n\"L\": 1,\n\"gamma\": [0.1]\n}";
        match ParamFile::parse(bad) {
            Err(InputError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn golden_record_for_l2_draw() {
        let f = ParamFile::parse(L2).unwrap();
        let rec = GoldenRecord::compute(&f.model_params(), &f.lambdas()).unwrap().unwrap();
        assert!(rec.crosscheck_discrepancy <= GOLDEN_AGREEMENT);
        assert_eq!(rec.params().lambda, f.lambda);
    }
}
