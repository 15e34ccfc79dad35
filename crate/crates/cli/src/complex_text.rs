//! Text form of complex numbers: `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`,
//! with decimal or scientific mantissas.

use num_complex::Complex64;

use crate::error::CliError;

/// Parses one complex literal; surrounding whitespace is ignored.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Config(format!("malformed complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return parse_real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i]).ok_or_else(bad)?, imag_part(&body[i..]).ok_or_else(bad)?),
        None => (0.0, imag_part(body).ok_or_else(bad)?),
    };
    Ok(Complex64::new(re, im))
}

fn imag_part(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(s),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "pi" | "+pi" => return Some(std::f64::consts::PI),
        "-pi" => return Some(-std::f64::consts::PI),
        _ => {}
    }
    // reject the words Rust accepts but the format does not
    if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Whitespace- or comma-separated list of complex literals.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(parse_complex).collect()
}

/// A real number, also accepting `pi`.
pub fn parse_f64(text: &str) -> Result<f64, CliError> {
    parse_real(text.trim()).ok_or_else(|| CliError::Config(format!("malformed number '{text}'")))
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn format_complex(z: Complex64) -> String {
    let im = format!("{:.16e}", z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{:.16e}{sign}{im}i", z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex(" -3.5 ").unwrap(), c(-3.5, 0.0));
        assert_eq!(parse_complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("1e-3+2.5E+1i").unwrap(), c(1e-3, 25.0));
        assert_eq!(parse_complex("-1e+2-1e-2i").unwrap(), c(-100.0, -0.01));
        assert_eq!(parse_complex("4 - 0.5 i").unwrap(), c(4.0, -0.5));
    }

    #[test]
    fn malformed_literals() {
        for bad in ["", "abc", "1+2", "++1i", "1..2", "nan", "inf", "1+xi"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for z in [c(0.1, -0.2), c(1.0 / 3.0, 2e-300), c(-0.0, 0.0), c(6.02e23, -1.6e-19)] {
            let back = parse_complex(&format_complex(z)).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
        let x = std::f64::consts::E;
        assert_eq!(parse_f64(&format_f64(x)).unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_complex_list("-1, -4  -9+1i").unwrap(), vec![c(-1.0, 0.0), c(-4.0, 0.0), c(-9.0, 1.0)]);
    }
}
