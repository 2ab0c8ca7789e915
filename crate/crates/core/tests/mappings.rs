use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfseg::mappings::soft_boundary_value;
use sdfseg::{mapping_partials, sigmoid, soft_boundary, tanh_ab, ScalarField, SigmoidParams};

fn params() -> impl Strategy<Value = SigmoidParams> {
    (0.05f64..20.0, -5.0f64..5.0).prop_map(|(a, b)| SigmoidParams::new(a, b).unwrap())
}

fn naive_sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn partials_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let z: f64 = rng.gen_range(0.25..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a: f64 = rng.gen_range(0.5..4.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        // Keep sigma away from saturation so the difference quotient is well conditioned.
        if (a * z + b).abs() > 3.0 {
            continue;
        }
        n += 1;
        let p = SigmoidParams::new(a, b).unwrap();
        let d = mapping_partials(z, p);
        let s = |z: f64, a: f64, b: f64| naive_sigmoid(a * z + b);
        let t = |z: f64, a: f64, b: f64| 2.0 * naive_sigmoid(a * z + b) - 1.0;
        let pairs = [
            (d.sigmoid_dz, central(|x| s(x, a, b), z, h)),
            (d.sigmoid_dalpha, central(|x| s(z, x, b), a, h)),
            (d.sigmoid_dbeta, central(|x| s(z, a, x), b, h)),
            (d.tanh_dz, central(|x| t(x, a, b), z, h)),
            (d.tanh_dalpha, central(|x| t(z, x, b), a, h)),
            (d.tanh_dbeta, central(|x| t(z, a, x), b, h)),
        ];
        for (analytic, numeric) in pairs {
            worst = worst.max(rel_err(analytic, numeric));
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst:e}");
}

#[test]
fn sigmoid_against_direct_formula() {
    let p = SigmoidParams::new(4.0, 0.0).unwrap();
    assert!((sigmoid(1.0, p) - 1.0 / (1.0 + (-4.0f64).exp())).abs() <= f64::EPSILON);
    assert_eq!(tanh_ab(1e9, p), 1.0);
    assert_eq!(tanh_ab(-1e9, p), -1.0);
}

#[test]
fn degenerate_field_has_no_boundary() {
    let phi = ScalarField::filled(4, 4, -(32f64).sqrt());
    let b = soft_boundary(&phi, SigmoidParams::default());
    assert!(b.max_abs() < 1e-9);
}

proptest! {
    #[test]
    fn complement_identity(z in -200.0f64..200.0, p in params()) {
        let flipped = SigmoidParams::new(p.alpha(), -p.beta()).unwrap();
        let sum = sigmoid(z, p) + sigmoid(-z, flipped);
        prop_assert!((sum - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn tanh_is_twice_sigmoid_minus_one(z in -1e3f64..1e3, p in params()) {
        prop_assert_eq!(tanh_ab(z, p).to_bits(), (2.0 * sigmoid(z, p) - 1.0).to_bits());
    }

    #[test]
    fn stable_for_large_arguments(z in -1e6f64..1e6, p in params()) {
        let s = sigmoid(z, p);
        prop_assert!((0.0..=1.0).contains(&s));
        let d = mapping_partials(z, p);
        prop_assert!(d.sigmoid_dz.is_finite() && d.tanh_dalpha.is_finite());
    }

    #[test]
    fn boundary_range(z in -50.0f64..50.0, a in 0.05f64..20.0, b in -5.0f64..5.0) {
        let centred = SigmoidParams::new(a, 0.0).unwrap();
        let v = soft_boundary_value(z, centred);
        prop_assert!(v <= 0.25);
        prop_assert!(v >= 0.0);
        // Monotone decay in |z| when beta = 0.
        prop_assert!(soft_boundary_value(z.abs() + 0.1, centred) <= v);
        let general = soft_boundary_value(z, SigmoidParams::new(a, b).unwrap());
        prop_assert!((0.0..1.0).contains(&general));
    }

    #[test]
    fn boundary_strictly_positive_in_moderate_range(z in -5.0f64..5.0, p in params()) {
        prop_assert!(soft_boundary_value(z, p) > 0.0);
    }
}
