//! Flag-value parsers: complex scalars (`a+bi`), comma vectors, and
//! `@file` indirection for inline JSON payloads.

use num_complex::Complex64;
use whittaker_core::WhittakerError;

/// Parse `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(text: &str) -> Result<Complex64, WhittakerError> {
    let bad = |t: &str| WhittakerError::InvalidParameter(format!("cannot parse complex `{t}`"));
    let s = text.trim();
    if s.is_empty() {
        return Err(bad(text));
    }
    if !s.contains('i') {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad(text));
    }
    let body = s.strip_suffix('i').ok_or_else(|| bad(text))?;
    // Split at the last sign that separates real and imaginary parts
    // (skipping a leading sign and exponent signs like `1e-3`).
    let mut split = None;
    for (idx, ch) in body.char_indices().skip(1) {
        if (ch == '+' || ch == '-') && !matches!(&body[idx - 1..idx], "e" | "E") {
            split = Some(idx);
        }
    }
    let (re_text, im_text) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let re = if re_text.is_empty() {
        0.0
    } else {
        re_text.parse::<f64>().map_err(|_| bad(text))?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad(text))?,
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_complex_vec(text: &str) -> Result<Vec<Complex64>, WhittakerError> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_int_vec<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, WhittakerError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<T>().map_err(|_| {
                WhittakerError::InvalidParameter(format!("cannot parse integer `{part}`"))
            })
        })
        .collect()
}

/// Inline payload, or the contents of a file when prefixed with `@`.
pub fn inline_or_file(text: &str) -> Result<String, WhittakerError> {
    if let Some(path) = text.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| WhittakerError::InvalidParameter(format!("cannot read {path}: {e}")))
    } else {
        Ok(text.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("1.5-0.5i").unwrap(),
            Complex64::new(1.5, -0.5)
        );
        assert_eq!(
            parse_complex("-1e-3+2e2i").unwrap(),
            Complex64::new(-1e-3, 200.0)
        );
        assert!(parse_complex("nonsense").is_err());
    }

    #[test]
    fn vectors() {
        let v = parse_complex_vec("1,0.5i,2-i").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], Complex64::new(2.0, -1.0));
        let ints: Vec<i64> = parse_int_vec("3,-1,0").unwrap();
        assert_eq!(ints, vec![3, -1, 0]);
    }
}
