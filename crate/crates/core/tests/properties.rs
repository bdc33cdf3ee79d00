use fractel::fracops::{caputo_l1, frac_integral, SampledTrajectory, TimeGrid};
use fractel::mlfunc::{ml, ml_in_regime, ml_prabhakar2, prabhakar_series, rgamma, Regime};
use fractel::Complex64;
use proptest::prelude::*;

fn z_polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ml_recurrence(rho in 0.2f64..1.0, mu in 0.3f64..2.5, frac in 0.0f64..1.0, theta in -3.14f64..3.14) {
        // E_{ρ,μ}(z) = 1/Γ(μ) + z E_{ρ,μ+ρ}(z); |z| ≤ 50^ρ keeps exp(z^{1/ρ}) finite
        let z = z_polar(frac * 50f64.powf(rho), theta);
        let lhs = ml(rho, mu, z, 1e-13).unwrap();
        let rhs = ml(rho, mu + rho, z, 1e-13).unwrap();
        let err = (lhs.value - z * rhs.value - rgamma(mu)).norm();
        let scale = 1.0 + (z * rhs.value).norm();
        prop_assert!(err <= 1e-10 * scale, "err {err:e}");
    }

    #[test]
    fn series_and_contour_agree_where_both_apply(rho in 0.3f64..1.0, mu in 0.5f64..2.0, r in 0.1f64..4.0, theta in -3.14f64..3.14) {
        let z = z_polar(r, theta);
        let s = ml_in_regime(rho, mu, z, 1e-14, Regime::Series).unwrap();
        let c = ml_in_regime(rho, mu, z, 1e-14, Regime::Contour).unwrap();
        let scale = 1.0 + s.value.norm();
        prop_assume!(s.est_abs_error <= 1e-11 * scale && c.est_abs_error <= 1e-11 * scale);
        prop_assert!((s.value - c.value).norm() <= 1e-10 * scale);
    }

    #[test]
    fn asymptotic_and_contour_agree_far_out(rho in 0.3f64..0.9, mu in 0.5f64..2.0, lr in 3.0f64..5.0, frac in 0.0f64..1.0) {
        // arguments inside the decaying sector |arg z| ≥ 3πρ/4 … π
        let lo = 0.75 * rho * std::f64::consts::PI;
        let theta = lo + frac * (std::f64::consts::PI - lo);
        let z = z_polar(10f64.powf(lr), theta);
        let a = ml_in_regime(rho, mu, z, 1e-12, Regime::Asymptotic).unwrap();
        let c = ml_in_regime(rho, mu, z, 1e-12, Regime::Contour).unwrap();
        prop_assert!((a.value - c.value).norm() <= 1e-9, "{} vs {}", a.value, c.value);
    }

    #[test]
    fn prabhakar_reduction_matches_series(rho in 0.3f64..1.0, mu in 1.2f64..3.0, r in 0.0f64..2.0, theta in -3.14f64..3.14) {
        let z = z_polar(r, theta);
        let a = ml_prabhakar2(rho, mu, z, 1e-12).unwrap();
        let b = prabhakar_series(rho, mu, 2.0, z, 1e-14).unwrap();
        prop_assert!((a.value - b.value).norm() <= 1e-10 * (1.0 + b.value.norm()));
    }

    #[test]
    fn integrals_compose(a in 0.1f64..0.9, b in 0.1f64..0.9, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        // J^a J^b h = J^{a+b} h for h(0) = 0, up to the product rule error
        let grid = TimeGrid::new(1.0, 400).unwrap();
        let h = SampledTrajectory::from_real_fn(grid, |t| c1 * t + c2 * t * t + (3.0 * t).sin());
        let lhs = frac_integral(&frac_integral(&h, b).unwrap(), a).unwrap();
        let rhs = frac_integral(&h, a + b).unwrap();
        let err = lhs.values.iter().zip(&rhs.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-4, "err {err:e}");
    }

    #[test]
    fn l1_inverts_the_integral_on_affine_data(rho in 0.1f64..0.95, c0 in -2.0f64..2.0, c1 in -2.0f64..2.0) {
        // J^ρ of an affine function, then L1: recovers h - h(0) + h(0)
        // up to the L1 error on t^ρ-type data, which is O(h^{min(1+ρ,2-ρ)})
        let grid = TimeGrid::new(1.0, 800).unwrap();
        let h = SampledTrajectory::from_real_fn(grid, |t| c0 + c1 * t);
        let back = caputo_l1(&frac_integral(&h, rho).unwrap(), rho).unwrap();
        let first = grid.first_node_after(0.1);
        let err = (first..=grid.n())
            .map(|m| (back.values[m] - h.values[m]).norm())
            .fold(0.0, f64::max);
        prop_assert!(err <= 2e-2 * (c0.abs() + c1.abs() + 1e-3), "err {err:e}");
    }
}
