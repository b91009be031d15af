//! Shared numeric helpers: tolerances, canonical float formatting, and
//! Gaussian pdf evaluation.

/// Coefficient magnitudes at or below this are treated as zero when
/// reducing linear constraints and comparing canonical forms.
pub const EPS: f64 = 1e-9;

/// Format a float rounded to 12 significant digits, using the shortest
/// decimal representation of the rounded value. Deterministic, and stable
/// under the small round-off drift that different but mathematically equal
/// computation orders produce.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}")
        .parse()
        .expect("round-trip of finite float");
    format!("{rounded}")
}

/// Round to 12 significant digits (the numeric counterpart of [`fmt_sig`]).
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("round-trip of finite float")
}

/// Standard Gaussian density of `x` under mean `mu` and variance `var`.
pub fn gaussian_pdf(x: f64, mu: f64, var: f64) -> f64 {
    let d = x - mu;
    (-d * d / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}
