use crate::error::{Result, TailError};

/// Kolmogorov–Smirnov distance `sup_x |F_m(x) - F(x)|` between the empirical
/// distribution of `draws` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(draws: &[f64], cdf: F) -> Result<f64> {
    if draws.is_empty() {
        return Err(TailError::Size { needed: 1, got: 0 });
    }
    let mut sorted = draws.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let upper = (i + 1) as f64 / m - f;
            let lower = f - i as f64 / m;
            upper.abs().max(lower.abs())
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_math::{normal_cdf, normal_quantile};

    #[test]
    fn examples() {
        assert!((ks_distance(&[0.0], normal_cdf).unwrap() - 0.5).abs() < 1e-15);
        let m = 9;
        let draws: Vec<f64> = (1..=m)
            .map(|i| normal_quantile(i as f64 / (m + 1) as f64).unwrap())
            .collect();
        assert!((ks_distance(&draws, normal_cdf).unwrap() - 0.1).abs() < 1e-9);
        assert!(matches!(
            ks_distance(&[], normal_cdf),
            Err(TailError::Size { .. })
        ));
    }

    #[test]
    fn order_invariant_and_positive() {
        let draws = [0.3, -1.2, 2.2, 0.0, -0.4, 0.9];
        let mut reversed = draws;
        reversed.reverse();
        let d = ks_distance(&draws, normal_cdf).unwrap();
        assert_eq!(d, ks_distance(&reversed, normal_cdf).unwrap());
        assert!(d > 0.0);
        assert!(d >= 0.5 / draws.len() as f64);
    }
}
