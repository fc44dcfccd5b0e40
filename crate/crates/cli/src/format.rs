/// Formats `x` with at most `digits` significant digits, `%g` style.
///
/// Fixed notation is used for decimal exponents in `[-5, digits)` and
/// scientific notation otherwise; trailing zeros are dropped.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let out = if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    };
    if out == "-0" {
        "0".to_string()
    } else {
        out
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
