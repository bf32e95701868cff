use linhol::geometry::{BivectorField, VolumeDensity, DEFAULT_RANK_TOL};
use linhol::integrals::path_integral;
use linhol::modular::{
    defining_property_residual, gauge_shift_check, modular_field, poisson_field_residual,
};
use linhol::paths::{lift_min_norm, CotangentPath, TangentPath, DEFAULT_LIFT_TOL};
use linhol::poly::random_poly;
use linhol::presets;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shipped() -> Vec<BivectorField> {
    vec![
        presets::symplectic_r2(),
        presets::regular_r3(),
        presets::aff1().bivector(),
        presets::so3().bivector(),
        presets::sl2().bivector(),
        presets::h3().bivector(),
    ]
}

fn density(n: usize, rng: &mut ChaCha8Rng) -> VolumeDensity {
    VolumeDensity::new(random_poly(n, 2, 4, rng))
}

fn point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn defining_property_holds_on_probes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pi in shipped() {
            let n = pi.dim();
            let rho = density(n, &mut rng);
            let v = modular_field(&pi, &rho);
            for _ in 0..100 {
                let f = random_poly(n, 3, 8, &mut rng);
                let x = point(n, &mut rng);
                let r = defining_property_residual(&pi, &rho, &v.field, &f, &x).unwrap();
                prop_assert!(r <= 1e-9, "residual {r}");
            }
        }
    }

    #[test]
    fn gauge_law_is_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pi in shipped() {
            let n = pi.dim();
            let rho = density(n, &mut rng);
            let log_g = random_poly(n, 2, 6, &mut rng);
            prop_assert_eq!(gauge_shift_check(&pi, &rho, &log_g), 0.0);
        }
    }

    #[test]
    fn modular_fields_are_poisson(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pi in shipped() {
            let n = pi.dim();
            let v = modular_field(&pi, &density(n, &mut rng));
            let x = point(n, &mut rng);
            let r = poisson_field_residual(&pi, &v.field, &x).unwrap();
            prop_assert!(r <= 1e-10, "residual {r}");
        }
    }

    #[test]
    fn loop_integral_is_gauge_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lift = |pi: &BivectorField, t: TangentPath| lift_min_norm(pi, &t, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap();
        let reg = presets::regular_r3();
        let so3 = presets::so3().bivector();
        let aff = presets::aff1().bivector();
        let loops = vec![
            (reg.clone(), lift(&reg, TangentPath::ellipse(&[0.0, 0.0, 0.5], &[1.0, 0.0, 0.0], &[0.2, 0.7, 0.0], 1.0, 513).unwrap())),
            (so3.clone(), lift(&so3, TangentPath::ellipse(&[0.0, 0.0, 0.6], &[0.8, 0.0, 0.0], &[0.0, 0.8, 0.0], 1.0, 513).unwrap())),
            (aff.clone(), CotangentPath::stationary(&aff, &[0.0, 0.0], 1.0, 513, 1e-12, |t| vec![(3.0 * t).cos(), 1.0]).unwrap()),
        ];
        for (pi, alpha) in loops {
            let n = pi.dim();
            let rho = density(n, &mut rng);
            let log_g = random_poly(n, 2, 6, &mut rng);
            let a = path_integral(&modular_field(&pi, &rho).field, &alpha).unwrap();
            let b = path_integral(&modular_field(&pi, &rho.rescaled(&log_g)).field, &alpha).unwrap();
            prop_assert!((a - b).abs() <= 1e-7, "{a} vs {b}");
        }
    }
}
