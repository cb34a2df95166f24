//! Machine-readable run reports: one record per check, stable field order,
//! deterministic bytes for a fixed config and seed (timings are opt-in for
//! that reason).

use serde::Serialize;
use serde_json::Value;

use crate::harness::config::scalar_to_json;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub abs_diff: f64,
    /// Comparison tolerance; 0 means exact equality was demanded.
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl CheckResult {
    /// Records a yes/no predicate.
    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        CheckResult {
            name: name.into(),
            lhs: Value::Bool(pass),
            rhs: Value::Bool(true),
            abs_diff: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
            wall_ms: None,
        }
    }
}

/// Compares two scalars: exact equality in the rational backend, absolute
/// tolerance otherwise.
pub fn compare<S: Scalar>(name: impl Into<String>, lhs: &S, rhs: &S, tol: f64) -> CheckResult {
    let diff = (lhs.clone() - rhs.clone()).abs_f64();
    let (pass, tolerance) = if S::EXACT {
        (lhs == rhs, 0.0)
    } else {
        (diff <= tol, tol)
    };
    CheckResult {
        name: name.into(),
        lhs: scalar_to_json(lhs),
        rhs: scalar_to_json(rhs),
        abs_diff: diff,
        tolerance,
        pass,
        wall_ms: None,
    }
}

/// Aggregates many sub-comparisons into one line: reports the worst
/// absolute difference and the number of comparisons made.
pub struct Aggregate {
    name: String,
    count: usize,
    worst: f64,
    tol: f64,
    pass: bool,
}

impl Aggregate {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        Aggregate {
            name: name.into(),
            count: 0,
            worst: 0.0,
            tol,
            pass: true,
        }
    }

    pub fn add<S: Scalar>(&mut self, lhs: &S, rhs: &S) {
        let diff = (lhs.clone() - rhs.clone()).abs_f64();
        self.count += 1;
        if diff > self.worst {
            self.worst = diff;
        }
        let ok = if S::EXACT { lhs == rhs } else { diff <= self.tol };
        self.pass &= ok;
    }

    pub fn require(&mut self, ok: bool) {
        self.count += 1;
        self.pass &= ok;
        if !ok {
            self.worst = f64::INFINITY;
        }
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            lhs: Value::from(self.count as u64),
            rhs: Value::String("comparisons".into()),
            abs_diff: self.worst,
            tolerance: self.tol,
            pass: self.pass,
            wall_ms: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub backend: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, backend: &str, seed: u64) -> Self {
        RunReport {
            schema: 1,
            command: command.into(),
            backend: backend.to_string(),
            seed,
            pass: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckResult>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    #[test]
    fn compare_rational_exact() {
        let a = <BigRational as Scalar>::from_ratio(1, 3);
        let b = <BigRational as Scalar>::from_ratio(1, 3);
        let c = compare("x", &a, &b, 0.0);
        assert!(c.pass);
        assert_eq!(c.lhs["num"], "1");
    }

    #[test]
    fn compare_float_tolerance() {
        let c = compare("sum", &(0.1f64 + 0.2), &0.3f64, 1e-12);
        assert!(c.pass);
        let c = compare("off", &0.1f64, &0.3f64, 1e-12);
        assert!(!c.pass);
        assert!((c.abs_diff - 0.2).abs() < 1e-15);
    }
}
