//! Named residual rows collected by the verification routines.

use serde::{Deserialize, Serialize};

use crate::scalar::{to_f64, Real};

/// One verified identity: its residual, the tolerance it was held to and
/// the outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Row passes when the value exceeds `tol` instead of staying below it.
    #[serde(skip, default)]
    pub lower_bound: bool,
}

impl CheckRow {
    fn evaluate(&mut self) {
        self.pass = self.residual.is_finite()
            && if self.lower_bound {
                self.residual > self.tol
            } else {
                self.residual < self.tol
            };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    rows: Vec<CheckRow>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a row; non-finite residuals always fail.
    pub fn push<T: Real>(&mut self, name: impl Into<String>, anchor: impl Into<String>, residual: T, tol: f64) {
        let mut row = CheckRow {
            name: name.into(),
            anchor: anchor.into(),
            residual: to_f64(residual),
            tol,
            pass: false,
            lower_bound: false,
        };
        row.evaluate();
        self.rows.push(row);
    }

    /// Records a row that must exceed `threshold` (non-vacuity checks).
    pub fn push_lower_bound<T: Real>(
        &mut self,
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: T,
        threshold: f64,
    ) {
        let mut row = CheckRow {
            name: name.into(),
            anchor: anchor.into(),
            residual: to_f64(value),
            tol: threshold,
            pass: false,
            lower_bound: true,
        };
        row.evaluate();
        self.rows.push(row);
    }

    pub fn push_row(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
    }

    pub fn rows(&self) -> &[CheckRow] {
        &self.rows
    }

    pub fn get(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Largest residual among rows that are upper-bounded.
    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| !r.lower_bound)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    /// Re-evaluates pass flags after tolerance overrides keyed by row name.
    pub fn apply_overrides(&mut self, overrides: &std::collections::BTreeMap<String, f64>) {
        for row in &mut self.rows {
            if let Some(&tol) = overrides.get(&row.name) {
                row.tol = tol;
                row.evaluate();
            }
        }
    }
}
