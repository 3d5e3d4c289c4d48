use crate::util::ln_binomial;

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A_w(p) = C(n, w) p^w (1 − p)^(n − w), evaluated in log space.
pub fn binomial_weight(n: usize, w: usize, p: f64) -> f64 {
    assert!(w <= n, "weight {w} exceeds {n} sites");
    assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
    if p == 0.0 {
        return if w == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if w == n { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(n as u64, w as u64) + w as f64 * p.ln() + (n - w) as f64 * (-p).ln_1p();
    ln.exp()
}

/// Σ_{w > max_w} A_w(p): probability mass beyond a truncation weight.
pub fn binomial_tail(n: usize, max_w: usize, p: f64) -> f64 {
    if max_w >= n {
        return 0.0;
    }
    let head: f64 = (0..=max_w).map(|w| binomial_weight(n, w, p)).sum();
    let upper: f64 = (max_w + 1..=n).map(|w| binomial_weight(n, w, p)).sum();
    // Summing the smaller side directly keeps tiny tails accurate.
    if upper < 0.5 {
        upper
    } else {
        (1.0 - head).max(0.0)
    }
}

/// Wilson score interval for `failures` out of `trials` at confidence z.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// 95% interval used for stratum estimates: Wilson, except that zero
/// failures report the rule-of-three upper bound 3/trials.
pub fn interval95(failures: u64, trials: u64) -> (f64, f64) {
    if failures == 0 && trials > 0 {
        return (0.0, (3.0 / trials as f64).min(1.0));
    }
    wilson_interval(failures, trials, Z95)
}
