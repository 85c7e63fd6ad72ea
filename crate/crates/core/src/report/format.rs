/// Renders `x` with 6 significant digits, `%g` style: fixed notation for
/// decimal exponents in [-4, 6), scientific otherwise, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Coordinate with two decimals, never printed as `-0.00`.
pub fn coord(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Escapes text for LaTeX body mode.
pub fn escape_latex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '#' | '$' | '%' | '&' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '^' => out.push_str("\\textasciicircum{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            '|' => out.push_str("\\textbar{}"),
            '<' => out.push_str("\\textless{}"),
            '>' => out.push_str("\\textgreater{}"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(7.34), "7.34");
        assert_eq!(sig6(0.782_580_208_5), "0.78258");
        assert_eq!(sig6(0.316_069_612_5), "0.31607");
        assert_eq!(sig6(-0.153_373_020_7), "-0.153373");
        assert_eq!(sig6(70.142_721_59), "70.1427");
        assert_eq!(sig6(123_456.7), "123457");
        assert_eq!(sig6(999_999.7), "1e+06");
        assert_eq!(sig6(1_234_567.0), "1.23457e+06");
        assert_eq!(sig6(0.000_012_345_67), "1.23457e-05");
        assert_eq!(sig6(0.000_123_456_7), "0.000123457");
        assert_eq!(sig6(100.0), "100");
        assert_eq!(sig6(f64::NAN), "nan");
    }

    #[test]
    fn sig6_round_trips_to_six_digits() {
        for x in [
            0.327_835_992_995,
            12.816_818_822,
            -9.262_340_089,
            3.0e-9,
            4.2e12,
        ] {
            let back: f64 = sig6(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-6 * x.abs(), "{x}");
        }
    }

    #[test]
    fn coordinates() {
        assert_eq!(coord(-0.001), "0.00");
        assert_eq!(coord(12.346), "12.35");
    }

    #[test]
    fn latex_specials() {
        assert_eq!(
            escape_latex(r"a\b#c%d$e{f}g_h"),
            r"a\textbackslash{}b\#c\%d\$e\{f\}g\_h"
        );
        assert_eq!(escape_latex("König, 2014"), "König, 2014");
        assert_eq!(escape_latex("EC|Retro"), r"EC\textbar{}Retro");
    }

    #[test]
    fn xml_specials() {
        assert_eq!(escape_xml("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
