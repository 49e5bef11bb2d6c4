use serde::Serialize;

/// Version tag of the JSON report document.
pub const REPORT_SCHEMA: &str = "csk-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detail {
    pub input: f64,
    pub expected: f64,
    pub got: f64,
}

/// Outcome of one verification check; `pass` holds exactly when
/// `max_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check_name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: Vec<Detail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(check_name: impl Into<String>, tolerance: f64) -> Self {
        Report {
            check_name: check_name.into(),
            max_residual: 0.0,
            tolerance,
            pass: true,
            details: Vec::new(),
            error: None,
        }
    }

    /// Records one comparison with the given residual.
    pub fn record(&mut self, input: f64, expected: f64, got: f64, residual: f64) {
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.max_residual = self.max_residual.max(residual);
        self.pass = self.max_residual <= self.tolerance;
        self.details.push(Detail {
            input,
            expected,
            got,
        });
    }

    /// Records `|got - expected|`.
    pub fn record_abs(&mut self, input: f64, expected: f64, got: f64) {
        self.record(input, expected, got, (got - expected).abs());
    }

    /// Records `|got - expected| / |expected|`.
    pub fn record_rel(&mut self, input: f64, expected: f64, got: f64) {
        let scale = expected.abs().max(f64::MIN_POSITIVE);
        self.record(input, expected, got, (got - expected).abs() / scale);
    }

    /// Marks the check failed because an evaluation raised an error.
    pub fn record_error(&mut self, input: f64, err: impl std::fmt::Display) {
        self.max_residual = f64::INFINITY;
        self.pass = false;
        if self.error.is_none() {
            self.error = Some(format!("at {input}: {err}"));
        }
    }
}
