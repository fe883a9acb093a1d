//! Deterministic output formatting: floats are printed with 17
//! significant digits so runs are bit-for-bit comparable and every value
//! round-trips exactly.

use sparse_bellman_core::PropertyReport;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".to_string()
    } else if x > 0.0 {
        "\"inf\"".to_string()
    } else {
        "\"-inf\"".to_string()
    }
}

/// Minimal ordered JSON object writer (serde_json would reorder nothing,
/// but it prints shortest floats; the 17-digit policy needs direct control).
#[derive(Default)]
pub struct JsonObj {
    parts: Vec<String>,
}

impl JsonObj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn f64(mut self, key: &str, value: f64) -> Self {
        self.parts.push(format!("\"{key}\": {}", fmt_f64(value)));
        self
    }

    pub fn u64(mut self, key: &str, value: u64) -> Self {
        self.parts.push(format!("\"{key}\": {value}"));
        self
    }

    pub fn bool(mut self, key: &str, value: bool) -> Self {
        self.parts.push(format!("\"{key}\": {value}"));
        self
    }

    pub fn str(mut self, key: &str, value: &str) -> Self {
        self.parts.push(format!(
            "\"{key}\": {}",
            serde_json::to_string(value).expect("string")
        ));
        self
    }

    pub fn f64_array(mut self, key: &str, values: &[f64]) -> Self {
        let inner: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.parts
            .push(format!("\"{key}\": [{}]", inner.join(", ")));
        self
    }

    pub fn finish(self) -> String {
        format!("{{{}}}", self.parts.join(", "))
    }
}

pub fn report_line(report: &PropertyReport) -> String {
    JsonObj::new()
        .str("property", &report.property)
        .u64("samples", report.samples as u64)
        .f64("max_violation", report.max_violation)
        .f64_array("witness", &report.witness)
        .bool("passed", report.passed)
        .finish()
}
