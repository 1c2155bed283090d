//! Interval estimates used by the reports.

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// Upper end of the Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_upper(hits: u64, n: u64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

/// Sample mean and unbiased sample variance from exact integer moments.
pub fn mean_and_variance(n: u64, sum: u128, sum_sq: u128) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum as f64 / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    // n * sum_sq - sum^2 is exact in integers and never negative
    let scaled = (n as u128) * sum_sq - sum * sum;
    let var = scaled as f64 / (n as f64 * (n as f64 - 1.0));
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_at_zero_hits() {
        let hi = wilson_upper(0, 1000, Z99);
        // z^2 / (n + z^2) for zero hits
        assert!((hi - Z99 * Z99 / (1000.0 + Z99 * Z99)).abs() < 1e-12);
        assert!(hi < 0.01);
        assert_eq!(wilson_upper(0, 0, Z99), 1.0);
    }

    #[test]
    fn moments() {
        let xs = [2u64, 4, 4, 4, 5, 5, 7, 9];
        let sum: u128 = xs.iter().map(|&x| x as u128).sum();
        let sq: u128 = xs.iter().map(|&x| (x as u128) * (x as u128)).sum();
        let (m, v) = mean_and_variance(xs.len() as u64, sum, sq);
        assert_eq!(m, 5.0);
        assert!((v - 32.0 / 7.0).abs() < 1e-12);
        assert_eq!(mean_and_variance(3, 30, 300), (10.0, 0.0));
    }
}
