use serde::Serialize;
use serde_json::Value;

/// Significant digits of every float the tool prints.
pub const DIGITS: usize = 12;

/// `x` with 12 significant digits, like C's `%.12g`.
pub fn g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS as i32).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Nearest float to the 12-digit rendering of `x`.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        g12(x).parse().expect("g12 output parses")
    } else {
        x
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON at full round-trip precision, newline-terminated. Used for
/// models and data vectors, which are read back and validated.
pub fn json_exact<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Pretty JSON with floats rounded to 12 significant digits, newline-terminated.
pub fn json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(2.0 / 3.0), "0.666666666667");
        assert_eq!(g12(10.0), "10");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(123456789012345.0), "1.23456789012e14");
        assert_eq!(g12(1.5e-7), "1.5e-7");
        assert_eq!(g12(0.0001), "0.0001");
        assert_eq!(g12(9.999999999999e11), "1e12");
        assert_eq!(g12(123456.7890123456), "123456.789012");
        assert_eq!(g12(9.99999999999951), "10");
        assert_eq!(g12(f64::NAN), "nan");
    }

    #[test]
    fn json_rounds_floats_only() {
        let v = serde_json::json!({"a": 0.1 + 0.2, "b": [1, 2.0000000000001], "c": "x"});
        let s = json(&v).unwrap();
        assert!(s.contains("\"a\": 0.3"));
        assert!(s.contains("2.0"));
        assert!(s.contains("1,"));
        assert!(s.ends_with("}\n"));
    }
}
