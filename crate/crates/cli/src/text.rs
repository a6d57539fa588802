//! Scalar and complex literals on the command line, in config files and in
//! reports.
//!
//! Complex numbers are written `re+imi`: `1.5-2i`, `0+1i`, `-3+0i`. The
//! parser also accepts a bare real (`4`), a bare imaginary (`2i`, `-i`) and
//! a `*` before the `i`.

use maxcompact_core::C64;

use crate::error::CliError;

/// Shortest round-trip form; exponent notation outside `[1e-5, 1e16)`.
pub fn format_real(x: f64) -> String {
    // Adding zero turns -0 into 0.
    let x = x + 0.0;
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn format_complex(z: C64) -> String {
    let im = z.im + 0.0;
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(im.abs()))
}

/// A decimal, an exponent form, or a fraction `a/b`.
pub fn parse_real(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Validation(format!("not a real number: {s:?}"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Validation(format!("not a complex number: {s:?}"));
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse_real(&t)?, 0.0));
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => im.parse::<f64>().map_err(|_| bad())?,
    };
    if !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// Comma separated list of complex numbers.
pub fn parse_complex_list(s: &str) -> Result<Vec<C64>, CliError> {
    s.split(',').map(parse_complex).collect()
}

pub fn parse_real_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_real).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("4", C64::new(4.0, 0.0)),
            ("2i", C64::new(0.0, 2.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("1.5-2i", C64::new(1.5, -2.0)),
            ("1e-3+2e-5i", C64::new(1e-3, 2e-5)),
            ("-1e+2-1e+1i", C64::new(-100.0, -10.0)),
            (" 3 + 4*i ", C64::new(3.0, 4.0)),
            ("0+i", C64::new(0.0, 1.0)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn formatting_round_trips() {
        for z in [
            C64::new(1.5, -2.0),
            C64::new(-0.0, 0.0),
            C64::new(0.1, 1e-300),
            C64::new(-7.25e10, -0.0),
        ] {
            let s = format_complex(z);
            assert_eq!(parse_complex(&s).unwrap(), z + C64::new(0.0, 0.0), "{s}");
        }
        assert_eq!(format_complex(C64::new(-0.0, -0.0)), "0+0i");
        assert_eq!(format_complex(C64::new(1.5, -2.0)), "1.5-2i");
        assert_eq!(format_complex(C64::new(2e-26, -3e20)), "2e-26-3e20i");
    }

    #[test]
    fn reals() {
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
        assert_eq!(parse_real_list("1/3, 0.5").unwrap(), vec![1.0 / 3.0, 0.5]);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("x").is_err());
    }

    proptest::proptest! {
        #[test]
        fn complex_text_round_trips(re in -1e300f64..1e300, im in -1e300f64..1e300) {
            let z = C64::new(re, im);
            proptest::prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }
}
