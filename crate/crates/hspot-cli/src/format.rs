//! Number formatting shared by stdout and CSV output.

/// `x` with 15 significant digits: plain decimal for moderate magnitudes, scientific
/// otherwise; trailing zeros are dropped.
pub fn sig15(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let decimals = (14 - e).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.14e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(1.0 / std::f64::consts::PI), "0.318309886183791");
        assert_eq!(sig15(1.0 / (2.0 * std::f64::consts::PI)), "0.159154943091895");
        assert_eq!(sig15(4.0), "4");
        assert_eq!(sig15(-2.5), "-2.5");
        assert_eq!(sig15(1.5e-9), "1.5e-9");
        assert_eq!(sig15(6.02214076e23), "6.02214076e23");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(f64::NAN), "NaN");
    }
}
