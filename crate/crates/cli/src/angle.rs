//! Angle specs such as `pi/5`, `-2pi/3`, `pi`, `0.25` (radians) or `1/3`.

use std::f64::consts::PI;

/// The angle in radians; `q = e^{i * angle}`.
pub fn parse(spec: &str) -> Result<f64, String> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("bad angle `{spec}` (expected forms like pi/5, -2pi/3, 0.5)");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix("π")) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let den = match den {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None => 1.0,
    };
    if den == 0.0 || !value.is_finite() || !den.is_finite() {
        return Err(bad());
    }
    Ok(sign * value / den)
}
