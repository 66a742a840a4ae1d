//! Text encodings shared by every report.

/// Round-trip exact decimal form of a double (17 significant digits).
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// [`real`] for optional values; `None` becomes the empty field.
pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_bitwise() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let back: f64 = real(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(real(1.5), "1.5000000000000000e0");
        assert_eq!(opt_real(None), "");
    }
}
