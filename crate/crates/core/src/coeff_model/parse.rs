//! Plain-text model files.
//!
//! ```text
//! # two-term model
//! name = fig3
//! a[0] = 0.92 + 0.82i
//! a[1] = 0.91 - 0.77i
//! b[0] = 0.41 - 0.95i
//! b[1] = -0.84 - 0.70i
//! ```
//!
//! One assignment per line, `#` starts a comment. Keys are `a[m]` or `b[m]`
//! with an integer Fourier index `m`, plus an optional `name`. Values are
//! complex literals such as `1`, `-0.5i`, `0.3 - 2e-3i` or `i`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{CoefficientField, LaurentSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ModelFile {
    pub name: Option<String>,
    pub field: CoefficientField,
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let mut name = None;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        if key == "name" {
            if name.is_some() {
                return Err(err("duplicate `name`".into()));
            }
            name = Some(value.to_string());
            continue;
        }
        let (series, index) = parse_key(key).map_err(err)?;
        let c = parse_complex(value).map_err(err)?;
        let target = if series == 'a' { &mut a } else { &mut b };
        if target.insert(index, c).is_some() {
            return Err(err(format!("duplicate coefficient {series}[{index}]")));
        }
    }
    if a.is_empty() && b.is_empty() {
        return Err(Error::InvalidModel("no coefficients given".into()));
    }
    let field = CoefficientField::new(LaurentSeries::from_map(a), LaurentSeries::from_map(b))?;
    Ok(ModelFile { name, field })
}

fn parse_key(key: &str) -> std::result::Result<(char, i32), String> {
    let mut chars = key.chars();
    let series = chars.next().ok_or("empty key")?;
    if series != 'a' && series != 'b' {
        return Err(format!("unknown key `{key}`"));
    }
    let rest = chars.as_str().trim();
    let inner = rest
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected `{series}[m]`, got `{key}`"))?;
    let m = inner
        .trim()
        .parse::<i32>()
        .map_err(|_| format!("bad Fourier index `{inner}`"))?;
    Ok((series, m))
}

/// Sum of real and imaginary terms, e.g. `-1.5e-2 + 3i`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty value".into());
    }
    let bytes = compact.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);

    let mut z = Complex64::new(0.0, 0.0);
    for t in terms {
        let (body, imag) = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
            Some(b) => (b, true),
            None => (t, false),
        };
        let x = match (body, imag) {
            ("" | "+", true) => 1.0,
            ("-", true) => -1.0,
            _ => body
                .parse::<f64>()
                .map_err(|_| format!("cannot parse `{t}` in `{s}`"))?,
        };
        if !x.is_finite() {
            return Err(format!("non-finite value in `{s}`"));
        }
        if imag {
            z.im += x;
        } else {
            z.re += x;
        }
    }
    Ok(z)
}

fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e} {} {:e}i", z.re, sign, z.im.abs())
}

/// Canonical text: sorted indices, full precision. Parsing it back yields an
/// identical field, so it doubles as the input of the model hash.
pub fn write_model(name: Option<&str>, field: &CoefficientField) -> String {
    let mut out = String::new();
    if let Some(n) = name {
        out.push_str(&format!("name = {n}\n"));
    }
    for (label, series) in [("a", field.a()), ("b", field.b())] {
        for (m, c) in series.terms() {
            out.push_str(&format!("{label}[{m}] = {}\n", format_complex(*c)));
        }
    }
    out
}
