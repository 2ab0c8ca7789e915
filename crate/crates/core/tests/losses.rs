use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfseg::gradcheck::random_instance;
use sdfseg::synthetic::{disc_mask, random_blobs};
use sdfseg::{
    loss_ce, loss_lmhd, loss_lse, loss_rmhd, loss_total, loss_with_gradients, signed_distance,
    BinaryMask, LossConfig, LossWeights, Reduction, ScalarField, SigmoidParams,
};
use sdfseg_oracle::{fd_gradient, NaiveLoss};

fn naive(cfg: &LossConfig) -> NaiveLoss {
    let w = cfg.weights;
    NaiveLoss {
        alpha: cfg.params.alpha(),
        beta: cfg.params.beta(),
        weights: [w.lmhd, w.rmhd, w.lse, w.ce],
        mean_pixel_terms: cfg.reduction == Reduction::Mean,
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn matches_scalar_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..30 {
        let inst = random_instance(&mut rng, 24);
        let reduction = if trial % 2 == 0 {
            Reduction::Sum
        } else {
            Reduction::Mean
        };
        let cfg = LossConfig {
            params: inst.params,
            reduction,
            weights: LossWeights::new(0.7, 0.3, 1.5, 0.25).unwrap(),
            ..LossConfig::default()
        };
        let got = loss_total(&inst.phi_pred, &inst.phi_gt, &inst.s_gt, &cfg).unwrap();
        let want = naive(&cfg).evaluate(inst.phi_pred.data(), inst.phi_gt.data(), inst.s_gt.data());
        for (g, w) in [
            (got.lmhd, want.lmhd),
            (got.rmhd, want.rmhd),
            (got.lse, want.lse),
            (got.ce, want.ce),
            (got.total, want.total),
        ] {
            assert!(close(g, w, 1e-12), "{g} vs {w}");
        }
    }
}

#[test]
fn gradients_match_oracle_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let inst = random_instance(&mut rng, 10);
        let cfg = LossConfig {
            params: inst.params,
            ..LossConfig::default()
        };
        let (_, g) = loss_with_gradients(&inst.phi_pred, &inst.phi_gt, &inst.s_gt, &cfg).unwrap();
        let (d_phi, d_alpha, d_beta) = fd_gradient(
            &naive(&cfg),
            inst.phi_pred.data(),
            inst.phi_gt.data(),
            inst.s_gt.data(),
            1e-4,
        );
        let check = |a: f64, n: f64| {
            if a.abs() < 1e-6 {
                assert!((a - n).abs() < 1e-8, "{a} vs {n}");
            } else {
                assert!((a - n).abs() / a.abs() < 1e-5, "{a} vs {n}");
            }
        };
        for (&a, &n) in g.d_phi.data().iter().zip(&d_phi) {
            check(a, n);
        }
        check(g.d_alpha, d_alpha);
        check(g.d_beta, d_beta);
    }
}

#[test]
fn frozen_gt_paths_match_oracle_with_gt_held_fixed() {
    // Without the GT paths, d_alpha is the derivative with B(gt) and tanh(gt) frozen.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst = random_instance(&mut rng, 8);
    let cfg = LossConfig {
        params: inst.params,
        gt_param_paths: false,
        ..LossConfig::default()
    };
    let (_, frozen) = loss_with_gradients(&inst.phi_pred, &inst.phi_gt, &inst.s_gt, &cfg).unwrap();
    let (_, full) = loss_with_gradients(
        &inst.phi_pred,
        &inst.phi_gt,
        &inst.s_gt,
        &LossConfig {
            gt_param_paths: true,
            ..cfg
        },
    )
    .unwrap();
    assert_eq!(frozen.d_phi, full.d_phi);

    let p = inst.params;
    let h = 1e-5;
    let at = |alpha: f64| {
        let q = SigmoidParams::new(alpha, p.beta()).unwrap();
        let lmhd: f64 = inst
            .phi_pred
            .data()
            .iter()
            .zip(inst.phi_gt.data())
            .map(|(&z, &g)| {
                sdfseg::mappings::soft_boundary_value(g, p) * sdfseg::tanh_ab(z, q).abs()
            })
            .sum();
        let lse: f64 = inst
            .phi_pred
            .data()
            .iter()
            .zip(inst.phi_gt.data())
            .map(|(&z, &g)| (sdfseg::tanh_ab(z, q) - sdfseg::tanh_ab(g, p)).powi(2))
            .sum();
        let rmhd_frozen: f64 = inst
            .phi_pred
            .data()
            .iter()
            .zip(inst.phi_gt.data())
            .map(|(&z, &g)| {
                sdfseg::mappings::soft_boundary_value(z, q) * sdfseg::tanh_ab(g, p).abs()
            })
            .sum();
        let ce = loss_ce(&inst.phi_pred, &inst.s_gt, q, Reduction::Sum).unwrap();
        0.9 * lmhd + 0.1 * rmhd_frozen + lse + ce
    };
    let numeric = (at(p.alpha() + h) - at(p.alpha() - h)) / (2.0 * h);
    assert!(
        (frozen.d_alpha - numeric).abs() <= 1e-5 * numeric.abs().max(1.0),
        "{} vs {numeric}",
        frozen.d_alpha
    );
}

#[test]
fn perfect_prediction_leaves_only_the_residual_floor() {
    let s = disc_mask(32, 32, 15.5, 15.5, 9.0);
    let phi = signed_distance(&s).field;
    let p = SigmoidParams::default();
    assert_eq!(loss_lse(&phi, &phi, p, Reduction::Sum).unwrap(), 0.0);
    let lmhd = loss_lmhd(&phi, &phi, p).unwrap();
    let floor: f64 = phi
        .data()
        .iter()
        .map(|&g| sdfseg::mappings::soft_boundary_value(g, p) * sdfseg::tanh_ab(g, p).abs())
        .sum();
    assert!(lmhd > 0.0);
    assert!(close(lmhd, floor, 1e-13));
    assert!(close(loss_rmhd(&phi, &phi, p).unwrap(), floor, 1e-13));
}

#[test]
fn lse_is_minimal_at_the_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = random_blobs(&mut rng, 20, 20);
    let phi = signed_distance(&s).field;
    let p = SigmoidParams::default();
    for _ in 0..20 {
        let noisy = phi.map(|v| v + 0.3);
        assert!(loss_lse(&noisy, &phi, p, Reduction::Sum).unwrap() > 0.0);
    }
}

#[test]
fn cross_entropy_minimised_at_foreground_rate() {
    // Over constant predictors the minimiser satisfies sigma(alpha*c + beta) = rate.
    let s = BinaryMask::from_fn(10, 10, |r, _| r < 3);
    let p = SigmoidParams::new(2.0, 0.5).unwrap();
    let rate: f64 = 0.3;
    let c_star = ((rate / (1.0 - rate)).ln() - p.beta()) / p.alpha();
    let ce = |c: f64| loss_ce(&ScalarField::filled(10, 10, c), &s, p, Reduction::Mean).unwrap();
    let best = ce(c_star);
    for delta in [1e-3, 1e-2, 0.1, 1.0] {
        assert!(best < ce(c_star + delta));
        assert!(best < ce(c_star - delta));
    }
}

#[test]
fn cross_entropy_clamp_is_finite() {
    let s = BinaryMask::from_fn(2, 1, |_, c| c == 0);
    let phi = ScalarField::new(2, 1, vec![-1e6, 1e6]).unwrap();
    let cfg = LossConfig {
        weights: LossWeights::new(0.0, 0.0, 0.0, 1.0).unwrap(),
        ..LossConfig::default()
    };
    let (b, g) = loss_with_gradients(&phi, &phi, &s, &cfg).unwrap();
    assert!((b.ce - 2.0 * -(1e-12f64).ln()).abs() < 1e-9);
    assert_eq!(g.d_phi.data(), &[0.0, 0.0]);
}

#[test]
fn loss_grows_with_translation() {
    for (radius, centre) in [(8.0, 31.5), (12.0, 30.0)] {
        let s_gt = disc_mask(64, 64, centre, centre, radius);
        let phi_gt = signed_distance(&s_gt).field;
        let cfg = LossConfig::default();
        let totals: Vec<f64> = (0..=5)
            .map(|t| {
                let moved = disc_mask(64, 64, centre, centre + t as f64, radius);
                let phi = signed_distance(&moved).field;
                loss_total(&phi, &phi_gt, &s_gt, &cfg).unwrap().total
            })
            .collect();
        assert!(totals.windows(2).all(|w| w[1] > w[0]), "{totals:?}");
    }
}

#[test]
fn rejects_mismatched_shapes() {
    let a = ScalarField::filled(3, 3, 0.0);
    let b = ScalarField::filled(3, 4, 0.0);
    let s = BinaryMask::zeros(3, 3);
    assert!(loss_total(&a, &b, &s, &LossConfig::default()).is_err());
    assert!(loss_ce(&b, &s, SigmoidParams::default(), Reduction::Sum).is_err());
}

fn field(max: usize) -> impl Strategy<Value = (ScalarField, ScalarField)> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(-20.0f64..20.0, w * h),
            proptest::collection::vec(-20.0f64..20.0, w * h),
        )
            .prop_map(move |(a, b)| {
                (
                    ScalarField::new(w, h, a).unwrap(),
                    ScalarField::new(w, h, b).unwrap(),
                )
            })
    })
}

proptest! {
    #[test]
    fn directional_terms_swap(pair in field(8), a in 0.1f64..10.0, b in -2.0f64..2.0) {
        let (x, y) = pair;
        let p = SigmoidParams::new(a, b).unwrap();
        prop_assert_eq!(loss_lmhd(&x, &y, p).unwrap(), loss_rmhd(&y, &x, p).unwrap());
        prop_assert_eq!(loss_lse(&x, &y, p, Reduction::Sum).unwrap(), loss_lse(&y, &x, p, Reduction::Sum).unwrap());
    }

    #[test]
    fn all_terms_non_negative(pair in field(8), a in 0.1f64..10.0, b in -2.0f64..2.0, seed in any::<u64>()) {
        let (x, y) = pair;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = BinaryMask::from_fn(x.width(), x.height(), |_, _| rng.gen_bool(0.5));
        let cfg = LossConfig { params: SigmoidParams::new(a, b).unwrap(), ..LossConfig::default() };
        let out = loss_total(&x, &y, &s, &cfg).unwrap();
        prop_assert!(out.lmhd >= 0.0 && out.rmhd >= 0.0 && out.lse >= 0.0 && out.ce >= 0.0);
        prop_assert!(out.total.is_finite());
    }
}
