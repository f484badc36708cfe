//! `%g`-style number formatting for CSV output.

/// Significant digits written to every CSV value.
pub const SIGNIFICANT_DIGITS: usize = 6;

/// Formats with [`SIGNIFICANT_DIGITS`] significant digits.
pub fn fmt_sig(v: f64) -> String {
    fmt_sig_digits(v, SIGNIFICANT_DIGITS)
}

/// Formats like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_sig_digits(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (10.0, "10"),
            (500.0, "500"),
            (0.5, "0.5"),
            (0.985828731646247, "0.985829"),
            (0.211145888987897, "0.211146"),
            (0.0001234567, "0.000123457"),
            (0.00001234567, "1.23457e-5"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e6"),
            (9.9999996, "10"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_sig(v), want, "{v}");
        }
    }
}
