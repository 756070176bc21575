//! Argument parsers: complex literals and range expressions.

use num_complex::Complex64 as C64;
use polefit_core::error::Error;

/// Parse "RE+IMi" / "RE-IMi" (whitespace tolerated), plus the degenerate
/// forms "RE", "IMi", "i", "-i".
pub fn parse_complex(s: &str) -> Result<C64, Error> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Validation("empty complex literal".into()));
    }
    let bad = || Error::Validation(format!("cannot parse complex literal '{s}'"));
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // find the sign that splits real and imaginary parts (skip a leading
        // sign and signs inside exponents)
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for idx in (1..chars.len()).rev() {
            let ch = chars[idx];
            if (ch == '+' || ch == '-') && !matches!(chars[idx - 1], 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().map_err(|_| bad())?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(C64::new(re, im))
            }
            None => {
                // pure imaginary
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(C64::new(re, 0.0))
    }
}

/// "lo:hi:count" for grid axes.
pub fn parse_count_range(s: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Validation(format!("expected lo:hi:count, got '{s}'")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range start '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range end '{}'", parts[1])))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range count '{}'", parts[2])))?;
    Ok((lo, hi, count))
}

/// "lo:step:hi", inclusive of the endpoint up to rounding.
pub fn parse_step_range(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Validation(format!("expected lo:step:hi, got '{s}'")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range start '{}'", parts[0])))?;
    let step: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range step '{}'", parts[1])))?;
    let hi: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad range end '{}'", parts[2])))?;
    if step <= 0.0 || hi < lo {
        return Err(Error::Validation(format!("degenerate range '{s}'")));
    }
    let count = ((hi - lo) / step).round() as usize;
    let mut out = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let t = lo + step * i as f64;
        if t <= hi + 1e-9 * step {
            out.push((t * 1e12).round() / 1e12);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("-1.2+0i").unwrap(), C64::new(-1.2, 0.0));
        assert_eq!(parse_complex("1.43-0.2i").unwrap(), C64::new(1.43, -0.2));
        assert_eq!(parse_complex(" -0.3 + 1.1667 i").unwrap(), C64::new(-0.3, 1.1667));
        assert_eq!(parse_complex("2.5").unwrap(), C64::new(2.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), C64::new(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), C64::new(1e-3, 2e-4));
        assert!(parse_complex("nope").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_count_range("-3:3:50").unwrap(), (-3.0, 3.0, 50));
        let ts = parse_step_range("0:0.1:1").unwrap();
        assert_eq!(ts.len(), 11);
        assert!((ts[10] - 1.0).abs() < 1e-12);
        assert!((ts[3] - 0.3).abs() < 1e-12);
    }
}
