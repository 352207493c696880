//! Small statistics kernels.

use crate::scalar::Scalar;

/// Two-sided tail probability `P(|T| >= t)` of Student's t with integer
/// `df >= 1` degrees of freedom.
///
/// Uses the finite trigonometric series for `P(|T| < t)` with
/// `θ = atan(t / sqrt(df))`:
///
/// ```text
/// df odd:  (2/π) [θ + sinθ cosθ (1 + 2/3 cos²θ + 2·4/(3·5) cos⁴θ + …)]
/// df even: sinθ (1 + 1/2 cos²θ + 1·3/(2·4) cos⁴θ + …)
/// ```
///
/// each series running to the `cos^(df-2)` (even) or `cos^(df-3)` (odd) term.
pub fn student_t_two_sided<T: Scalar>(t: T, df: usize) -> T {
    assert!(df >= 1, "t distribution needs at least one degree of freedom");
    let t = t.abs();
    if t.is_infinite() {
        return T::zero();
    }
    let theta = (t / T::from_count(df).sqrt()).atan();
    let (s, c) = theta.sin_cos();
    let c2 = c * c;
    let inside = if df % 2 == 1 {
        let mut term = T::one();
        let mut sum = T::zero();
        if df > 1 {
            sum = T::one();
            for k in 1..=(df - 3) / 2 {
                term = term * T::from_count(2 * k) / T::from_count(2 * k + 1) * c2;
                sum = sum + term;
            }
        }
        (T::lit(2.0) / T::PI()) * (theta + s * c * sum)
    } else {
        let mut term = T::one();
        let mut sum = T::one();
        for k in 1..=(df - 2) / 2 {
            term = term * T::from_count(2 * k - 1) / T::from_count(2 * k) * c2;
            sum = sum + term;
        }
        s * sum
    };
    (T::one() - inside).max(T::zero()).min(T::one())
}

/// Pearson correlation of two equal-length slices; `None` when either side
/// has zero variance or fewer than two points.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = T::from_count(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx = sxx + da * da;
        syy = syy + db * db;
        sxy = sxy + da * db;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    let r = sxy / (sxx * syy).sqrt();
    Some(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_for_small_df() {
        // df = 1 is Cauchy: P(|T| >= t) = 1 - 2 atan(t) / π
        for &t in &[0.0f64, 0.5, 1.0, 3.0] {
            let want = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_two_sided::<f64>(t, 1) - want).abs() < 1e-15);
        }
        // df = 2: P(|T| >= t) = 1 - t / sqrt(2 + t²)
        for &t in &[0.0f64, 0.5, 1.0, 3.0] {
            let want = 1.0 - t / (2.0 + t * t).sqrt();
            assert!((student_t_two_sided::<f64>(t, 2) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_is_one_at_zero_and_symmetric() {
        for df in 1..40 {
            assert!((student_t_two_sided::<f64>(0.0, df) - 1.0).abs() < 1e-15);
            assert_eq!(student_t_two_sided::<f64>(-2.0, df), student_t_two_sided::<f64>(2.0, df));
            assert_eq!(student_t_two_sided::<f64>(f64::INFINITY, df), 0.0);
        }
    }

    #[test]
    fn known_critical_values() {
        // two-sided 5% critical values
        assert!((student_t_two_sided::<f64>(12.706204736, 1) - 0.05).abs() < 1e-8);
        assert!((student_t_two_sided::<f64>(2.228138852, 10) - 0.05).abs() < 1e-8);
        assert!((student_t_two_sided::<f64>(2.042272456, 30) - 0.05).abs() < 1e-8);
    }

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pearson(&x, &x), Some(1.0));
        assert_eq!(pearson(&x, &[4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(pearson(&x, &[2.0, 2.0, 2.0, 2.0]), None);
        assert_eq!(pearson(&[1.0], &[1.0]), None);
    }
}
