use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckVerdict {
    Pass,
    Fail,
}

impl CheckVerdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckVerdict::Pass
        } else {
            CheckVerdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == CheckVerdict::Pass
    }
}

/// Relative residual `|lhs − rhs| / max(|lhs|, |rhs|, floor)`.
///
/// The floor keeps identities of the form `0 = 0` from dividing noise by
/// noise; callers pass a small multiple of the integrand's absolute scale.
pub fn relative_residual(lhs: Complex64, rhs: Complex64, floor: f64) -> f64 {
    let diff = (lhs - rhs).norm();
    let denom = lhs.norm().max(rhs.norm()).max(floor);
    if denom == 0.0 {
        0.0
    } else {
        diff / denom
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub label: String,
    pub s: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub relative: f64,
    pub quadrature_error: f64,
    pub passed: bool,
}

/// Outcome of one verification run: per-point residuals and a verdict that
/// passes iff every relative residual is within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub operator: Option<String>,
    pub function: String,
    pub tolerance: f64,
    pub points: Vec<ResidualPoint>,
    pub max_relative: f64,
    pub verdict: CheckVerdict,
    pub notes: Vec<String>,
}

impl ResidualReport {
    pub fn new(check: &str, function: &str, tolerance: f64) -> Self {
        ResidualReport {
            check: check.to_string(),
            operator: None,
            function: function.to_string(),
            tolerance,
            points: Vec::new(),
            max_relative: 0.0,
            verdict: CheckVerdict::Pass,
            notes: Vec::new(),
        }
    }

    /// Records `lhs` against `rhs`; `floor` bounds the relative denominator from below.
    pub fn push(&mut self, label: String, s: Complex64, lhs: Complex64, rhs: Complex64, floor: f64, quadrature_error: f64) {
        let relative = relative_residual(lhs, rhs, floor);
        self.push_point(ResidualPoint {
            label,
            s,
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
            relative,
            quadrature_error,
            passed: relative <= self.tolerance,
        });
    }

    pub fn push_point(&mut self, point: ResidualPoint) {
        self.max_relative = self.max_relative.max(point.relative);
        if !point.passed {
            self.verdict = CheckVerdict::Fail;
        }
        self.points.push(point);
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_applies_only_when_both_sides_small() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(1.0 + 1e-9, 0.0);
        assert!((relative_residual(a, b, 1e-6) - 1e-9).abs() < 1e-15);
        let tiny = Complex64::new(1e-15, 0.0);
        assert!(relative_residual(tiny, Complex64::new(0.0, 0.0), 1e-6) < 1e-8);
        assert_eq!(relative_residual(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0), 0.0);
    }

    #[test]
    fn verdict_follows_points() {
        let mut r = ResidualReport::new("demo", "zero", 1e-6);
        let one = Complex64::new(1.0, 0.0);
        r.push("a".into(), one, one, one, 0.0, 0.0);
        assert!(r.passed());
        r.push("b".into(), one, one, one * 2.0, 0.0, 0.0);
        assert!(!r.passed());
        assert!((r.max_relative - 0.5).abs() < 1e-15);
    }
}
