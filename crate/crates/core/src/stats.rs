//! Small shared numeric helpers: order-statistic critical values, sample
//! quantiles, and moment summaries.

/// Bootstrap critical value: the ceil((1-alpha) B)-th ascending order
/// statistic of the sup-norm draws, i.e. the floor(alpha B)-th from the top.
pub fn critical_value(sup_draws: &[f64], alpha: f64) -> f64 {
    debug_assert!(!sup_draws.is_empty());
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let b = sup_draws.len();
    let mut sorted = sup_draws.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = ((1.0 - alpha) * b as f64).ceil() as usize;
    sorted[rank.clamp(1, b) - 1]
}

/// Linear-interpolation sample quantile (the common "type 7" definition).
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Bessel-corrected sample standard deviation.
pub fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Sample interquartile range via type-7 quantiles.
pub fn interquartile_range(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    quantile_type7(&sorted, 0.75) - quantile_type7(&sorted, 0.25)
}

/// Sup norm of a vector.
pub fn sup_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_is_the_upper_order_statistic() {
        // 1..=100; at alpha=0.10 the rank is ceil(90) = 90, value 90
        let draws: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(critical_value(&draws, 0.10), 90.0);
        assert_eq!(critical_value(&draws, 0.05), 95.0);
        // order of input must not matter
        let mut rev = draws.clone();
        rev.reverse();
        assert_eq!(critical_value(&rev, 0.10), 90.0);
    }

    #[test]
    fn critical_value_is_monotone_in_level() {
        let draws: Vec<f64> = (0..257).map(|i| ((i * 7919) % 257) as f64).collect();
        let c10 = critical_value(&draws, 0.10);
        let c05 = critical_value(&draws, 0.05);
        assert!(c05 >= c10);
    }

    #[test]
    fn quantiles_and_iqr() {
        let xs: Vec<f64> = (1..=5).map(|i| i as f64).collect();
        assert_eq!(quantile_type7(&xs, 0.5), 3.0);
        assert_eq!(interquartile_range(&xs), 2.0);
    }
}
