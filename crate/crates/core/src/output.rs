//! Number formatting shared by the CSV and JSON writers.

/// Significant digits used unless full precision is requested.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Value as written to JSON: rounded unless `full_precision`.
pub fn json_num(x: f64, full_precision: bool) -> f64 {
    if full_precision {
        x
    } else {
        round_sig(x)
    }
}

/// Value as written to CSV. Magnitudes outside `[1e-5, 1e16)` use
/// exponent notation so underflowed weights stay short.
pub fn fmt_num(x: f64, full_precision: bool) -> String {
    let v = json_num(x, full_precision);
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt_num(82.0 / 75.0, false), "1.09333333");
        assert_eq!(fmt_num(0.5416666666666666, false), "0.541666667");
        assert_eq!(fmt_num(1.0 / 3.0, true), "0.3333333333333333");
        assert_eq!(fmt_num(0.0, false), "0");
        assert_eq!(fmt_num(3.0e-301, false), "3e-301");
        assert_eq!(fmt_num(1234.0, false), "1234");
        assert_eq!(round_sig(-0.123456789012), -0.123456789);
    }
}
