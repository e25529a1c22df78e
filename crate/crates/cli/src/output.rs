//! Deterministic machine-readable formatting.
//!
//! Every floating-point value is printed with 17 significant digits, enough
//! for bit-exact round-trips. JSON objects keep their fields in insertion
//! order; non-finite numbers become `null` in JSON and named tokens in CSV.

use std::fmt::Write;

/// One float as a JSON number, or `null` when it is not finite.
pub fn json_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// One float as a CSV cell; infinities and NaN print as `inf`, `-inf`, `nan`.
pub fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn escape_into(out: &mut String, s: &str) {
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
}

/// A single JSON object built field by field, serialized in field order.
pub struct JsonObject {
    fields: Vec<(&'static str, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject { fields: Vec::new() }
    }

    fn raw(mut self, key: &'static str, value: String) -> Self {
        self.fields.push((key, value));
        self
    }

    pub fn string(self, key: &'static str, value: &str) -> Self {
        let mut quoted = String::with_capacity(value.len() + 2);
        quoted.push('"');
        escape_into(&mut quoted, value);
        quoted.push('"');
        self.raw(key, quoted)
    }

    pub fn number(self, key: &'static str, value: f64) -> Self {
        self.raw(key, json_number(value))
    }

    pub fn boolean(self, key: &'static str, value: bool) -> Self {
        self.raw(key, value.to_string())
    }

    pub fn null(self, key: &'static str) -> Self {
        self.raw(key, "null".to_string())
    }

    pub fn integer(self, key: &'static str, value: usize) -> Self {
        self.raw(key, value.to_string())
    }

    pub fn optional_integer(self, key: &'static str, value: Option<usize>) -> Self {
        match value {
            Some(n) => self.integer(key, n),
            None => self.null(key),
        }
    }

    /// A complex number as the two-element array `[re, im]`.
    pub fn complex(self, key: &'static str, re: f64, im: f64) -> Self {
        self.raw(key, format!("[{},{}]", json_number(re), json_number(im)))
    }

    pub fn optional_complex(self, key: &'static str, value: Option<(f64, f64)>) -> Self {
        match value {
            Some((re, im)) => self.complex(key, re, im),
            None => self.null(key),
        }
    }

    /// An interval as `[lo, hi]`; infinite endpoints become `null`.
    pub fn optional_interval(self, key: &'static str, value: Option<(f64, f64)>) -> Self {
        match value {
            Some((lo, hi)) => self.raw(key, format!("[{},{}]", json_number(lo), json_number(hi))),
            None => self.null(key),
        }
    }

    /// A flat array of numbers.
    pub fn numbers(self, key: &'static str, values: &[f64]) -> Self {
        let body: Vec<String> = values.iter().map(|&v| json_number(v)).collect();
        self.raw(key, format!("[{}]", body.join(",")))
    }

    /// The serialized object followed by a newline.
    pub fn finish(self) -> String {
        let mut out = String::from("{");
        for (i, (key, value)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('"');
            escape_into(&mut out, key);
            out.push_str("\":");
            out.push_str(value);
        }
        out.push_str("}\n");
        out
    }
}
