//! The parameter sequences along which the return map approaches the
//! singular limit.

use std::f64::consts::TAU;

/// `k(λ) = −K_ω ln λ`, the phase shift produced by the logarithmic twist.
pub fn k_of_lambda(k_omega: f64, lambda: f64) -> f64 {
    -k_omega * lambda.ln()
}

/// `λ_n = exp(−2πn/K_ω)`, so that `k(λ_n) ≡ 0 (mod 2π)`.
pub fn lambda_n(k_omega: f64, n: u32) -> f64 {
    (-TAU * n as f64 / k_omega).exp()
}

/// `λ_(a,n) = k⁻¹(k(λ_n) + a) = exp(−(2πn + a)/K_ω)`, so that
/// `k(λ_(a,n)) ≡ a (mod 2π)`.
pub fn lambda_a_n(k_omega: f64, a: f64, n: u32) -> f64 {
    (-(TAU * n as f64 + a) / k_omega).exp()
}

/// The value of `λ` at which the rescaled return map is close to `h_a` with
/// `a = a*`, for the `n`-th turn. This is `λ_(a*,n)`.
pub fn pullback_lambda(k_omega: f64, a_star: f64, n: u32) -> f64 {
    lambda_a_n(k_omega, a_star, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::wrap_angle;
    use proptest::prelude::*;

    #[test]
    fn first_zero_phase_lambda() {
        assert!((lambda_n(3.0, 1) - (-TAU / 3.0).exp()).abs() < 1e-17);
        assert!((lambda_n(3.0, 1) - 0.1231447).abs() < 1e-7);
        assert_eq!(lambda_n(3.0, 1), lambda_a_n(3.0, 0.0, 1));
    }

    proptest! {
        #[test]
        fn phase_identity(a in 0.0f64..TAU, n in 1u32..60, k in 0.5f64..20.0) {
            let phase = wrap_angle(k_of_lambda(k, lambda_a_n(k, a, n)));
            prop_assert!(crate::model::circle_dist(phase, a) <= 1e-12);
        }

        #[test]
        fn decreasing_in_n(a in 0.0f64..TAU, n in 1u32..60, k in 1.0f64..20.0) {
            prop_assert!(lambda_a_n(k, a, n + 1) < lambda_a_n(k, a, n));
            prop_assert!(lambda_n(k, n + 1) < lambda_n(k, n));
        }
    }
}
