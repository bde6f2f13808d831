//! Small statistics toolbox: sample moments, normality diagnostics, and
//! Kolmogorov-Smirnov statistics.

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Sample skewness (g1).
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Sample excess kurtosis (g2).
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// Standard normal CDF via the Abramowitz-Stegun erf approximation
/// (abs error < 1.5e-7, plenty for diagnostics).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// One-sample KS statistic of `xs` against a CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Two-sample KS statistic.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut ix, mut iy) = (0usize, 0usize);
    let mut d = 0.0f64;
    while ix < xs.len() && iy < ys.len() {
        let v = xs[ix].min(ys[iy]);
        while ix < xs.len() && xs[ix] <= v {
            ix += 1;
        }
        while iy < ys.len() && ys[iy] <= v {
            iy += 1;
        }
        d = d.max((ix as f64 / nx - iy as f64 / ny).abs());
    }
    d
}

/// Lag-1 autocorrelation.
pub fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let cov = xs
        .windows(2)
        .map(|p| (p[0] - mean) * (p[1] - mean))
        .sum::<f64>()
        / n;
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamKey;

    #[test]
    fn normal_cdf_values() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-7);
        assert!((std_normal_cdf(1.96) - 0.975).abs() < 1e-3);
        assert!((std_normal_cdf(-1.96) - 0.025).abs() < 1e-3);
    }

    #[test]
    fn ks_two_sample_same_distribution_small() {
        let mut rng = StreamKey::root(1).rng();
        let xs: Vec<f64> = (0..2000).map(|_| rng.next_f64()).collect();
        let ys: Vec<f64> = (0..2000).map(|_| rng.next_f64()).collect();
        let d = ks_two_sample(&xs, &ys);
        // 1% critical value ~ 1.63 * sqrt(2/n)
        assert!(d < 1.63 * (2.0 / 2000.0f64).sqrt(), "{d}");
    }

    #[test]
    fn ks_one_sample_uniform() {
        let mut rng = StreamKey::root(2).rng();
        let xs: Vec<f64> = (0..5000).map(|_| rng.next_f64()).collect();
        let d = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 1.63 / (5000.0f64).sqrt(), "{d}");
    }

    #[test]
    fn ks_two_sample_detects_shift() {
        let mut rng = StreamKey::root(3).rng();
        let xs: Vec<f64> = (0..2000).map(|_| rng.next_f64()).collect();
        let ys: Vec<f64> = (0..2000).map(|_| rng.next_f64() + 0.3).collect();
        assert!(ks_two_sample(&xs, &ys) > 0.2);
    }

    #[test]
    fn moments_of_uniform_draws() {
        let mut rng = StreamKey::root(4).rng();
        let xs: Vec<f64> = (0..100_000).map(|_| rng.next_f64()).collect();
        let (m, se) = mean_stderr(&xs);
        assert!((m - 0.5).abs() < 4.0 * se);
        assert!(skewness(&xs).abs() < 0.05);
        assert!((excess_kurtosis(&xs) + 1.2).abs() < 0.1);
    }
}
