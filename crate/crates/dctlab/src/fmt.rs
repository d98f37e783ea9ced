//! Fixed float formatting for CSV artifacts, so repeated runs are
//! byte-identical.

/// Four decimals, for values reported to four places in the reference tables.
pub fn fixed4(x: f64) -> String {
    finite_or(x, |x| {
        let s = format!("{x:.4}");
        if s == "-0.0000" {
            "0.0000".to_string()
        } else {
            s
        }
    })
}

/// Six significant digits in the style of C's `%g`: plain notation for
/// exponents in `[-4, 6)`, scientific otherwise, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    finite_or(x, |x| {
        if x == 0.0 {
            return "0".to_string();
        }
        let sci = format!("{x:.5e}");
        let (mantissa, exp) = sci.split_once('e').expect("`e` formatting has an exponent");
        let exp: i32 = exp.parse().expect("integer exponent");
        if (-4..6).contains(&exp) {
            trim_zeros(format!("{x:.*}", (5 - exp) as usize))
        } else {
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
        }
    })
}

fn finite_or(x: f64, f: impl FnOnce(f64) -> String) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        f(x)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_four_places() {
        assert_eq!(fixed4(8.63374), "8.6337");
        assert_eq!(fixed4(-1e-17), "0.0000");
        assert_eq!(fixed4(f64::INFINITY), "inf");
    }

    #[test]
    fn six_significant_digits_match_printf_g() {
        let cases = [
            (0.0, "0"),
            (0.01, "0.01"),
            (0.192214, "0.192214"),
            (27.183456, "27.1835"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.000123456, "0.000123456"),
            (0.0000123456, "1.23456e-05"),
            (999999.5, "1e+06"),
            (-2.5, "-2.5"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(sig6(x), want, "{x}");
        }
    }
}
