/// `min(delta, max(-delta, v))`.
#[inline]
pub fn clamp(v: f64, delta: f64) -> f64 {
    v.max(-delta).min(delta)
}

/// `|clamp(pred) - clamp(target)|`, bounded by `2 * delta`.
#[inline]
pub fn clamped_l1(pred: f64, target: f64, delta: f64) -> f64 {
    (clamp(pred, delta) - clamp(target, delta)).abs()
}

/// Subgradient of [`clamped_l1`] with respect to `pred`: zero once the
/// prediction saturates or equals the clamped target.
#[inline]
pub fn clamped_l1_grad(pred: f64, target: f64, delta: f64) -> f64 {
    if pred.abs() > delta {
        return 0.0;
    }
    let diff = pred - clamp(target, delta);
    if diff > 0.0 {
        1.0
    } else if diff < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp(0.05, 0.1), 0.05);
        assert_eq!(clamp(0.5, 0.1), 0.1);
        assert_eq!(clamp(-3.0, 0.1), -0.1);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(clamped_l1(0.3, 0.3, 0.1), 0.0);
        assert!((clamped_l1(0.05, 0.2, 0.1) - 0.05).abs() < 1e-15);
        assert!((clamped_l1(-0.5, 0.5, 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn gradient_saturates() {
        assert_eq!(clamped_l1_grad(0.5, 0.0, 0.1), 0.0);
        assert_eq!(clamped_l1_grad(-0.5, 0.0, 0.1), 0.0);
        assert_eq!(clamped_l1_grad(0.05, 0.2, 0.1), -1.0);
        assert_eq!(clamped_l1_grad(0.05, -0.2, 0.1), 1.0);
        assert_eq!(clamped_l1_grad(0.1, 0.5, 0.1), 0.0);
    }

    proptest! {
        #[test]
        fn loss_in_bounds(p in -5.0f64..5.0, t in -5.0f64..5.0, d in 1e-4f64..1.0) {
            let l = clamped_l1(p, t, d);
            prop_assert!((0.0..=2.0 * d + 1e-15).contains(&l));
            prop_assert!(clamp(p, d).abs() <= d);
        }

        #[test]
        fn gradient_matches_difference_quotient(p in -0.09f64..0.09, t in -1.0f64..1.0) {
            let d = 0.1;
            let h = 1e-7;
            prop_assume!((p - clamp(t, d)).abs() > 2.0 * h);
            let num = (clamped_l1(p + h, t, d) - clamped_l1(p - h, t, d)) / (2.0 * h);
            prop_assert!((num - clamped_l1_grad(p, t, d)).abs() < 1e-6);
        }
    }
}
