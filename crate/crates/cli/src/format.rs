/// Values closer to zero than this are round-off and print as 0.
const SNAP: f64 = 1e-14;

/// Twelve significant digits, `.` separator, fixed notation down to 1e-3.
pub fn value(x: f64) -> String {
    let x = if x.abs() < SNAP { 0.0 } else { x };
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if x.abs() < 1e-3 {
        return format!("{x:.11e}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(value(0.25), "0.250000000000");
        assert_eq!(value(1.0), "1.00000000000");
        assert_eq!(value(std::f64::consts::PI), "3.14159265359");
        assert_eq!(value(-0.5), "-0.500000000000");
        assert_eq!(value(123.456), "123.456000000");
        assert_eq!(value(0.001), "0.00100000000000");
    }

    #[test]
    fn zero_and_tiny_values() {
        assert_eq!(value(0.0), "0.00000000000");
        assert_eq!(value(1.1e-31), "0.00000000000");
        assert!(value(0.0).starts_with("0.000000000"));
        assert_eq!(value(2.5e-5), "2.50000000000e-5");
    }
}
