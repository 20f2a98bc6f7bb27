use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{DiscreteLaw, UniformSample};

/// Parses one real number per line. Blank lines are skipped; LF and CRLF
/// endings are both accepted.
pub fn parse_sample_lines<T: Scalar>(text: &str) -> Result<UniformSample<T>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: {field:?} is not a number", lineno + 1)))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("line {}: value is not finite", lineno + 1)));
        }
        values.push(T::lit(v));
    }
    if values.is_empty() {
        return Err(Error::Parse("no values in input".into()));
    }
    UniformSample::new(values)
}

/// Empirical law of a file holding one value per line.
pub fn ingest_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<DiscreteLaw<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(parse_sample_lines::<T>(&text)?.law())
}
