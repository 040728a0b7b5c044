//! Numeric rendering shared by the LP writer and JSON output.

/// Significant digits used for every number the toolkit writes out.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant decimal digits.
///
/// The result is the `f64` nearest to a decimal with at most 12 significant
/// digits, so formatting it with [`format_number`] and parsing it back is
/// exact. Non-finite inputs are returned unchanged.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("scientific float formatting always parses")
}

/// Formats `x` with at most 12 significant digits, locale independent.
///
/// Plain decimal notation is used for magnitudes in `[1e-6, 1e15)`,
/// scientific notation otherwise. Infinities are written `inf` / `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_owned() } else { "-inf".to_owned() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_owned();
    }
    let a = r.abs();
    if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
