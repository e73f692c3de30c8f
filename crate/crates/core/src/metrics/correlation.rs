use super::MetricsError;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn population_std(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Point-biserial correlation `((M1 − M0) / s_n) · sqrt(n1·n0 / n²)` with
/// the population standard deviation `s_n` of the continuous variable.
pub fn point_biserial(binary: &[bool], continuous: &[f64]) -> Result<f64, MetricsError> {
    if binary.len() != continuous.len() {
        return Err(MetricsError::LengthMismatch {
            left: binary.len(),
            right: continuous.len(),
        });
    }
    if binary.len() < 2 {
        return Err(MetricsError::DegenerateGroups);
    }
    let ones: Vec<f64> = continuous.iter().zip(binary).filter(|(_, b)| **b).map(|(x, _)| *x).collect();
    let zeros: Vec<f64> = continuous.iter().zip(binary).filter(|(_, b)| !**b).map(|(x, _)| *x).collect();
    let s = population_std(continuous);
    if ones.is_empty() || zeros.is_empty() || s == 0.0 {
        return Err(MetricsError::DegenerateGroups);
    }
    let n = continuous.len() as f64;
    let (n1, n0) = (ones.len() as f64, zeros.len() as f64);
    Ok((mean(&ones) - mean(&zeros)) / s * (n1 * n0 / (n * n)).sqrt())
}

/// Pearson correlation; `None` when either variable is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let b = [false, true, false, true];
        let c = [0.0, 1.0, 0.0, 1.0];
        assert!((point_biserial(&b, &c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate() {
        assert!(matches!(point_biserial(&[true, false], &[0.5, 0.5]), Err(MetricsError::DegenerateGroups)));
        assert!(matches!(point_biserial(&[true, true], &[0.1, 0.5]), Err(MetricsError::DegenerateGroups)));
        assert!(point_biserial(&[true], &[0.1, 0.5]).is_err());
    }

    #[test]
    fn matches_pearson_on_hand_corpus() {
        let b = [true, false, true, true, false, false];
        let c = [0.9, 0.2, 0.7, 0.4, 0.5, 0.1];
        let as_f: Vec<f64> = b.iter().map(|&x| f64::from(u8::from(x))).collect();
        let r = point_biserial(&b, &c).unwrap();
        assert!((r - pearson(&as_f, &c).unwrap()).abs() < 1e-12);
        assert!((r - 0.727_606_875_108_999).abs() < 1e-12, "{r}");
    }
}
