use bose_thermo::bound::{choose_parameters, correction_term, lower_bound, BoundConfig};
use bose_thermo::ideal_gas::{bose_fn_exp, critical_density, f0, mu0, thermal_density, BoseOrder};
use bose_thermo::kernels::dyson::separated_subset;
use bose_thermo::kernels::{
    build_f_r, build_h, build_w_r, verify_hole_lemma, CutoffProfile, Lattice, PeriodicLatticeField, Space,
};
use bose_thermo::potentials::{truncate, truncate_shell, PairPotential, RadialPotential};
use bose_thermo::scattering::{default_r_max, scattering_length_ode};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn torus(a: [f64; 3], b: [f64; 3], l: f64) -> f64 {
    (0..3)
        .map(|k| {
            let d = (a[k] - b[k]).rem_euclid(l);
            d.min(l - d).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn truncation_lowers_the_potential(height in 0.1f64..50.0, width in 0.2f64..3.0, phi in 0.01f64..5.0) {
        let v = RadialPotential::step(height, width).unwrap();
        let t = truncate(&v, phi).unwrap();
        prop_assert!(t.moment().unwrap() <= 2.0 * phi * (1.0 + 1e-9));
        for i in 0..50 {
            let r = width * 1.2 * i as f64 / 49.0;
            prop_assert!(t.value(r) >= 0.0 && t.value(r) <= v.value(r));
        }
    }

    #[test]
    fn scattering_length_lies_in_the_range(height in 0.01f64..1e3, width in 0.1f64..3.0) {
        let v = RadialPotential::step(height, width).unwrap();
        let a = scattering_length_ode(&v, default_r_max(&v), 16).unwrap().a;
        prop_assert!(a >= 0.0 && a <= width * (1.0 + 1e-12), "a = {a}, R0 = {width}");
    }

    #[test]
    fn truncated_profile_gradient_is_bounded(ratio in 1.5f64..200.0, shell in any::<bool>()) {
        // secant slopes of φ = u / (c r) bound φ' somewhere in each interval, and ã / r² is
        // decreasing, so the left endpoint gives a valid comparison
        let hs = RadialPotential::hard_core(1.0).unwrap();
        let t = if shell {
            truncate_shell(&hs, ratio, None).unwrap()
        } else {
            truncate(&hs, ratio).unwrap()
        };
        let sol = scattering_length_ode(&t, default_r_max(&t), 400).unwrap();
        let phi: Vec<(f64, f64)> = sol.profile.iter().filter(|p| p.r > 0.0).map(|p| (p.r, p.u / (sol.tail_slope * p.r))).collect();
        for w in phi.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            prop_assert!(slope >= -1e-9, "phi decreasing at r = {}", w[0].0);
            prop_assert!(slope <= sol.a / (w[0].0 * w[0].0) * (1.0 + 1e-6) + 1e-9, "r = {}: {slope}", w[0].0);
        }
    }

    #[test]
    fn mu0_is_nonpositive_and_inverts_the_density(beta in 0.1f64..10.0, frac in 1e-4f64..3.0) {
        let rc = critical_density(beta).unwrap();
        let rho = frac * rc;
        let mu = mu0(beta, rho).unwrap();
        prop_assert!(mu <= 0.0);
        if frac < 1.0 {
            let back = thermal_density(beta) * bose_fn_exp(BoseOrder::ThreeHalves, beta * mu).unwrap();
            prop_assert!((back / rho - 1.0).abs() < 1e-10);
        } else {
            prop_assert_eq!(mu, 0.0);
        }
    }

    #[test]
    fn free_energy_scales(beta in 0.1f64..10.0, rho in 1e-3f64..10.0) {
        let lhs = f0(beta, rho).unwrap();
        let rhs = rho.powf(5.0 / 3.0) * f0(beta * rho.powf(2.0 / 3.0), 1.0).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
    }

    #[test]
    fn bound_is_the_larger_branch(log_a in -9.0f64..-2.0, beta in 0.2f64..5.0, rho in 0.05f64..5.0) {
        let a = 10f64.powf(log_a);
        let rep = lower_bound(&BoundConfig::new(a, beta, rho)).unwrap();
        prop_assert_eq!(rep.lower_bound, rep.high_t.value.max(rep.low_t.value));
        let ceiling = f0(beta, rho).unwrap() + correction_term(a, beta, rho).unwrap();
        prop_assert!(rep.high_t.value <= ceiling && rep.low_t.value <= ceiling);
    }

    #[test]
    fn cutoff_profile_is_monotone(t in 0.0f64..3.0, dt in 0.0f64..1.0) {
        let (a, b) = (CutoffProfile::nu(t), CutoffProfile::nu(t + dt));
        prop_assert!((0.0..=1.0).contains(&a) && a <= b);
    }

    #[test]
    fn separated_subset_is_separated(
        pts in prop::collection::vec(prop::array::uniform3(0.0f64..10.0), 1..30),
        d in 0.5f64..4.0,
    ) {
        let idx = separated_subset(&pts, d, 10.0);
        prop_assert!(!idx.is_empty());
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[..k] {
                prop_assert!(torus(pts[i], pts[j], 10.0) >= d);
            }
        }
    }

    #[test]
    fn hole_eigenvalue_clears_the_tolerance(lambda in 0.0f64..1.5, ratio in 0.005f64..0.095) {
        let rep = verify_hole_lemma(ratio, 1.0, lambda, 256).unwrap();
        prop_assert!(rep.holds, "eigenvalue {} tol {}", rep.eigenvalue, rep.tol_disc);
    }
}

#[test]
fn scales_are_ordered_and_kappa_prime_positive() {
    // s / R and κβ / s² grow only like x^{-2/403} and x^{-δ}, so the separations stay
    // order one at any representable x; R / R0 separates fast
    for x in [1e-2, 1e-4, 1e-6, 1e-8] {
        let p = choose_parameters(&BoundConfig::new(x, 1.0, 1.0)).unwrap().high_t;
        let o = p.ordering(1.0, x);
        assert!(o.r_over_r0 >= 10.0, "x = {x}: {o:?}");
        assert!(o.s_over_r > 1.0, "x = {x}: {o:?}");
        assert!(o.kappa_beta_over_s2 >= 1.0 - 1e-12, "x = {x}: {o:?}");
        assert!(p.kappa_prime > 0.0, "x = {x}: kappa' = {}", p.kappa_prime);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn fft_round_trip(n in 2usize..10, seed in any::<u64>()) {
        let lat = Lattice::new(3.0, n).unwrap();
        let f = PeriodicLatticeField::from_fn(&lat, Space::Position, |i| {
            ((i as u64).wrapping_mul(seed | 1) % 1000) as f64 / 500.0 - 1.0
        });
        prop_assert!(f.round_trip_error() < 1e-13);
    }

    #[test]
    fn error_fields_are_nonnegative(s in 1.0f64..4.0, r in 4.0f64..7.0) {
        let lat = Lattice::new(16.0, 16).unwrap();
        let h = build_h(&lat, &CutoffProfile::new(s).unwrap()).unwrap();
        let f_r = build_f_r(&h, r).unwrap();
        let w_r = build_w_r(&f_r);
        prop_assert!(f_r.values.iter().all(|v| *v >= 0.0));
        prop_assert!(w_r.values.iter().all(|v| *v >= 0.0));
    }
}
